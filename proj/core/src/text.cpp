#include "tidykg/text.hpp"

#include <cctype>
#include <cstdio>

namespace tidykg {

namespace {
bool is_word_char(unsigned char c) { return std::isalnum(c) != 0; }
}  // namespace

std::string to_lower(const std::string& s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string strip(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string normalize_name(const std::string& raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (unsigned char c : raw) {
        if (c == '_' || std::isspace(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

std::string camel_to_words(const std::string& raw) {
    std::string spaced;
    spaced.reserve(raw.size() + 4);
    for (std::size_t i = 0; i < raw.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(raw[i]);
        if (c == '_' || c == '/') {
            spaced.push_back(' ');
            continue;
        }
        if (std::isupper(c) && i > 0) {
            unsigned char prev = static_cast<unsigned char>(raw[i - 1]);
            if (std::islower(prev) || std::isdigit(prev)) spaced.push_back(' ');
        }
        spaced.push_back(static_cast<char>(c));
    }
    return normalize_name(spaced);
}

std::string conceptnet_term(const std::string& uri) {
    // /c/<lang>/<term>[/...]
    std::vector<std::string> parts = split(uri, '/');
    // split on leading '/' yields an empty first element.
    std::vector<std::string> seg;
    for (auto& p : parts)
        if (!p.empty()) seg.push_back(p);
    if (seg.size() < 3 || seg[0] != "c") return "";
    return seg[2];
}

std::string conceptnet_language(const std::string& uri) {
    std::vector<std::string> parts = split(uri, '/');
    std::vector<std::string> seg;
    for (auto& p : parts)
        if (!p.empty()) seg.push_back(p);
    if (seg.size() < 2 || seg[0] != "c") return "";
    return seg[1];
}

std::string conceptnet_relation(const std::string& uri) {
    if (uri.rfind("/r/", 0) != 0) return "";
    return uri.substr(3);
}

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (unsigned char c : text) {
        if (is_word_char(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            tokens.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(cur);
    return tokens;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

namespace {
std::string article(const std::string& name) {
    if (name.empty()) return "a";
    switch (name.front()) {
        case 'a': case 'e': case 'i': case 'o': case 'u': return "an";
        default: return "a";
    }
}
}  // namespace

std::vector<std::string> split_whitespace(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char c : s) {
        if (std::isspace(c)) {
            if (!cur.empty()) {
                out.push_back(cur);
                cur.clear();
            }
        } else {
            cur.push_back(static_cast<char>(c));
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::string join_names(const std::vector<std::string>& names) {
    if (names.empty()) return "nothing";
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i > 0) out += (i + 1 == names.size()) ? " and " : ", ";
        out += article(names[i]) + " " + names[i];
    }
    return out;
}

std::string format_double(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

}  // namespace tidykg
