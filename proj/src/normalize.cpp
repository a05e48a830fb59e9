#include "rxeval/normalize.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace rxeval {

namespace {

bool is_space(char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

char ascii_upper(char c) {
    return static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
}

std::string collapse_and_trim(std::string_view text, bool collapse) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char c : text) {
        if (is_space(c)) {
            if (collapse) {
                pending_space = !out.empty();
            } else if (!out.empty()) {
                out.push_back(c);
            }
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(c);
    }
    while (!out.empty() && is_space(out.back())) out.pop_back();
    return out;
}

std::string ascii_upper_copy(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = ascii_upper(c);
    return out;
}

bool iequals_ascii(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (ascii_upper(a[i]) != ascii_upper(b[i])) return false;
    }
    return true;
}

// Canonical unit spellings; anything not listed passes through untouched.
constexpr std::pair<std::string_view, std::string_view> kUnitAliases[] = {
    {"mg", "MG"}, {"ml", "ML"}, {"mcg", "MCG"}, {"\xc2\xb5g", "MCG"},
    {"g", "G"},   {"iu", "IU"},
};

std::vector<std::string_view> split_tokens(std::string_view text) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space(text[i])) ++i;
        std::size_t start = i;
        while (i < text.size() && !is_space(text[i])) ++i;
        if (i > start) tokens.push_back(text.substr(start, i - start));
    }
    return tokens;
}

}  // namespace

std::string normalize_name(std::string_view raw, const NormalizationConfig& cfg) {
    std::string stripped;
    stripped.reserve(raw.size());
    for (char c : raw) {
        if (cfg.strip_punctuation.find(c) != std::string::npos) continue;
        stripped.push_back(cfg.case_fold ? ascii_upper(c) : c);
    }
    return collapse_and_trim(stripped, cfg.collapse_whitespace);
}

std::string normalize_dosage(std::string_view raw, const NormalizationConfig& cfg) {
    std::string out;
    out.reserve(raw.size());
    for (std::string_view token : split_tokens(raw)) {
        std::string canonical;
        bool aliased = false;
        for (const auto& [alias, unit] : kUnitAliases) {
            if (iequals_ascii(token, alias)) {
                canonical = unit;
                aliased = true;
                break;
            }
        }
        if (!aliased) {
            canonical = cfg.case_fold ? ascii_upper_copy(token) : std::string(token);
        }
        if (!out.empty()) out.push_back(' ');
        out += canonical;
    }
    return out;
}

std::vector<std::uint32_t> utf8_codepoints(std::string_view text) {
    std::vector<std::uint32_t> cps;
    cps.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        const auto b0 = static_cast<unsigned char>(text[i]);
        std::size_t len = 1;
        std::uint32_t cp = b0;
        if ((b0 & 0xE0u) == 0xC0u) {
            len = 2;
            cp = b0 & 0x1Fu;
        } else if ((b0 & 0xF0u) == 0xE0u) {
            len = 3;
            cp = b0 & 0x0Fu;
        } else if ((b0 & 0xF8u) == 0xF0u) {
            len = 4;
            cp = b0 & 0x07u;
        }
        if (i + len > text.size()) len = 1, cp = b0;
        for (std::size_t k = 1; k < len; ++k) {
            const auto bk = static_cast<unsigned char>(text[i + k]);
            if ((bk & 0xC0u) != 0x80u) {  // truncated sequence: emit lead byte alone
                len = 1;
                cp = b0;
                break;
            }
            cp = (cp << 6) | (bk & 0x3Fu);
        }
        cps.push_back(cp);
        i += len;
    }
    return cps;
}

namespace {

// Appends one code point per element of `word` separated by single spaces.
void append_spaced_word(std::string& out, std::string_view word) {
    const auto cps = utf8_codepoints(word);
    std::size_t byte = 0;
    for (std::size_t k = 0; k < cps.size(); ++k) {
        std::size_t next = byte + 1;
        while (next < word.size() &&
               (static_cast<unsigned char>(word[next]) & 0xC0u) == 0x80u) {
            ++next;
        }
        if (k > 0) out.push_back(' ');
        out.append(word.substr(byte, next - byte));
        byte = next;
    }
}

}  // namespace

std::string space_out(std::string_view text) {
    if (!text.empty() && (text.front() == ' ' || text.back() == ' ')) {
        throw std::invalid_argument("space_out: leading or trailing space");
    }
    if (text.find("  ") != std::string_view::npos) {
        throw std::invalid_argument("space_out: input contains a double space");
    }
    std::string out;
    out.reserve(text.size() * 2);
    std::size_t i = 0;
    bool first_word = true;
    while (i <= text.size()) {
        const std::size_t space = std::min(text.find(' ', i), text.size());
        if (!first_word) out.append("  ");
        append_spaced_word(out, text.substr(i, space - i));
        first_word = false;
        i = space + 1;
    }
    return out;
}

std::string unspace(std::string_view spaced) {
    if (spaced.find("   ") != std::string_view::npos) {
        throw std::invalid_argument("unspace: run of three or more spaces");
    }
    if (!spaced.empty() && (spaced.front() == ' ' || spaced.back() == ' ')) {
        throw std::invalid_argument("unspace: leading or trailing space");
    }
    std::string out;
    out.reserve(spaced.size());
    std::size_t i = 0;
    while (i < spaced.size()) {
        if (spaced[i] == ' ') {
            if (spaced[i + 1] == ' ') {  // word gap
                out.push_back(' ');
                i += 2;
            } else {  // intra-word separator
                ++i;
            }
            continue;
        }
        out.push_back(spaced[i]);
        ++i;
    }
    return out;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
    const auto ca = utf8_codepoints(a);
    const auto cb = utf8_codepoints(b);
    return edit_distance_seq<std::uint32_t>(ca, cb);
}

double similarity(std::string_view a, std::string_view b) {
    const auto ca = utf8_codepoints(a);
    const auto cb = utf8_codepoints(b);
    const std::size_t longest = std::max(ca.size(), cb.size());
    if (longest == 0) return 1.0;
    const std::size_t dist = edit_distance_seq<std::uint32_t>(ca, cb);
    return 1.0 - static_cast<double>(dist) / static_cast<double>(longest);
}

}  // namespace rxeval
