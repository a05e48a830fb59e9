#pragma once

#include <stdexcept>
#include <string>

namespace rxeval {

/// Stable process exit codes. These are part of the CLI contract and must
/// not be renumbered.
enum class ExitCode : int {
    ok = 0,
    validation = 1,  // corpus/prediction content failed validation
    input = 2,       // missing or unusable input (file, record id, flag)
    endpoint = 3,    // inference endpoint or credential problem
    internal = 4,
};

/// Content that fails schema or invariant checks (bad line, duplicate id).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Missing files, unknown record ids, unusable arguments.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inference endpoint configuration or credential failures.
class EndpointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rxeval
