#pragma once

// Text preprocessing: Jira wiki-markup stripping with configurable handling
// of code/noformat/panel blocks, alphanumeric tokenization, camelCase
// sub-token splitting and lowercase/stem normalization.

#include <algorithm>
#include <cstring>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "fileloc/porter.hpp"

namespace fileloc {

enum class MarkupMode { keep_raw, strip_formatting, strip_blocks, blocks_to_marker };

struct PreprocessConfig {
    MarkupMode markup_mode = MarkupMode::keep_raw;
    bool lowercase = true;
    bool stem = true;
    bool subtoken_split = false;
    std::string marker_word = "CODEBLOCKMARKER";

    std::string fingerprint() const {
        std::string s = "m";
        s += std::to_string(static_cast<int>(markup_mode));
        s += lowercase ? "L" : "l";
        s += stem ? "S" : "s";
        s += subtoken_split ? "T" : "t";
        s += marker_word;
        return s;
    }
};

using TokenStream = std::vector<std::string>;

namespace detail {

// {code}/{noformat}/{panel} blocks, with optional parameters on the opening
// tag; an unclosed opening tag runs to the end of the text.
inline std::string handle_blocks(const std::string& text, MarkupMode mode,
                                 const std::string& marker) {
    static const std::regex open_re(R"(\{(code|noformat|panel)(?::[^}\n]*)?\})",
                                    std::regex::ECMAScript);
    std::string out;
    out.reserve(text.size());
    std::size_t pos = 0;
    std::smatch m;
    while (pos < text.size() &&
           std::regex_search(text.cbegin() + static_cast<std::ptrdiff_t>(pos), text.cend(), m,
                             open_re)) {
        std::size_t open_at = pos + static_cast<std::size_t>(m.position(0));
        std::size_t open_end = open_at + static_cast<std::size_t>(m.length(0));
        std::string close_tag = "{" + m.str(1) + "}";
        std::size_t close_at = text.find(close_tag, open_end);
        std::size_t content_end = close_at == std::string::npos ? text.size() : close_at;
        std::size_t block_end =
            close_at == std::string::npos ? text.size() : close_at + close_tag.size();

        out.append(text, pos, open_at - pos);
        switch (mode) {
            case MarkupMode::strip_formatting:
                out.append(text, open_end, content_end - open_end);
                break;
            case MarkupMode::strip_blocks: break;
            case MarkupMode::blocks_to_marker:
                out += ' ';
                out += marker;
                out += ' ';
                break;
            case MarkupMode::keep_raw: break;  // not reached
        }
        pos = block_end;
    }
    out.append(text, pos, text.size() - pos);
    return out;
}

inline std::string regex_remove(const std::string& text, const std::regex& re,
                                const char* replacement = "") {
    return std::regex_replace(text, re, replacement);
}

inline std::string strip_pass(const std::string& input, MarkupMode mode,
                              const std::string& marker) {
    static const std::regex image_re(R"(!([^!\s|][^!\n|]*)(\|[^!\n]*)?!)");
    static const std::regex attachment_re(R"(\[\^[^\]\n]*\])");
    static const std::regex link_re(R"(\[[^\[\]\n]*\])");
    static const std::regex hrule_re(R"((^|\n)-{4,}*(?=\n|$))");
    static const std::regex heading_re(R"((^|\n)(h[1-6]\.|bq\.)[ \t]*)");
    static const std::regex list_re(R"((^|\n)[\*#\-]+[ \t]+)");
    static const std::regex table_sep_re(R"(\|+)");
    static const std::regex tag_re(R"(\{(color|quote|anchor)(?::[^}\n]*)?\})");
    static const std::regex mono_re(R"(\{\{([^}\n]*)\}\})");
    static const std::regex bold_re(R"(\*([^\*\n]+)\*)");
    static const std::regex italic_re(R"(_([^_\n]+)_)");
    static const std::regex cite_re(R"(\?\?([^\n]+?)\?\?)");
    static const std::regex ins_re(R"(\+([^\+\n]+)\+)");
    static const std::regex sup_re(R"(\^([^\^\n]+)\^)");
    static const std::regex sub_re(R"(~([^~\n]+)~)");
    static const std::regex del_re(R"((^|[ \t\n])-([^\-\n]+)-(?=[ \t\n]|$))");

    std::string t = handle_blocks(input, mode, marker);
    t = regex_remove(t, image_re);
    t = regex_remove(t, attachment_re);
    t = regex_remove(t, link_re);
    for (const char* emo : {":)", ":(", ":P", ":D", ";)", "(y)", "(n)", "(i)", "(/)",
                            "(x)", "(!)", "(+)", "(-)", "(?)", "(on)", "(off)", "(*)",
                            "(*r)", "(*g)", "(*b)", "(*y)", "(flag)", "(flagoff)"}) {
        std::size_t at;
        while ((at = t.find(emo)) != std::string::npos) t.erase(at, std::strlen(emo));
    }
    t = regex_remove(t, hrule_re, "$1");
    t = regex_remove(t, heading_re, "$1");
    t = regex_remove(t, list_re, "$1");
    t = std::regex_replace(t, table_sep_re, " ");
    t = regex_remove(t, tag_re);
    t = std::regex_replace(t, mono_re, "$1");
    t = std::regex_replace(t, bold_re, "$1");
    t = std::regex_replace(t, italic_re, "$1");
    t = std::regex_replace(t, cite_re, "$1");
    t = std::regex_replace(t, ins_re, "$1");
    t = std::regex_replace(t, sup_re, "$1");
    t = std::regex_replace(t, sub_re, "$1");
    t = std::regex_replace(t, del_re, "$1$2");
    return t;
}

}  // namespace detail

// Removes Jira wiki formatting.  Text modifiers keep their inner text;
// images, attachments and links are removed entirely; code/noformat/panel
// blocks are handled per mode.  Iterated to a fixed point so the operation
// is idempotent for every mode.
inline std::string strip_jira_markup(const std::string& text, MarkupMode mode,
                                     const std::string& marker = "CODEBLOCKMARKER") {
    if (mode == MarkupMode::keep_raw) return text;
    std::string current = text;
    for (int i = 0; i < 8; ++i) {
        std::string next = detail::strip_pass(current, mode, marker);
        if (next == current) break;
        current = std::move(next);
    }
    return current;
}

inline bool is_token_char(char c) {
    return (c >= '0' && c <= '9') || (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z');
}

// Splits on any non-alphanumeric byte; multi-byte UTF-8 sequences act as
// separators, which matches lossy decoding of non-text content.
inline TokenStream tokenize(std::string_view text) {
    TokenStream tokens;
    std::string current;
    for (char c : text) {
        if (is_token_char(c)) {
            current += c;
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

// Splits camelCase/UpperCamelCase compounds and letter/digit boundaries.
// A run of uppercase followed by lowercase splits before the last capital
// ("parseHTTPResponse" -> parse, HTTP, Response).  The compound itself is
// not retained.
inline std::vector<std::string> split_subtokens(std::string_view token) {
    enum Class { lower, upper, digit };
    auto classify = [](char c) {
        if (c >= '0' && c <= '9') return digit;
        if (c >= 'A' && c <= 'Z') return upper;
        return lower;
    };
    std::vector<std::string> parts;
    std::string current;
    for (std::size_t i = 0; i < token.size(); ++i) {
        char c = token[i];
        if (!current.empty()) {
            Class prev = classify(token[i - 1]);
            Class cur = classify(c);
            bool boundary = (prev == lower && cur == upper) ||
                            (prev == digit) != (cur == digit);
            bool acronym_end = prev == upper && cur == lower && current.size() >= 2 &&
                               classify(token[i - 2]) == upper;
            if (acronym_end) {
                char last = current.back();
                current.pop_back();
                parts.push_back(std::move(current));
                current.assign(1, last);
            } else if (boundary) {
                parts.push_back(std::move(current));
                current.clear();
            }
        }
        current += c;
    }
    if (!current.empty()) parts.push_back(std::move(current));
    return parts;
}

inline std::string ascii_lower(std::string s) {
    for (char& c : s)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return s;
}

// Sub-token split, then lowercase, then Porter stem, in that order.
inline TokenStream normalize(TokenStream stream, const PreprocessConfig& config) {
    if (config.subtoken_split) {
        TokenStream split;
        split.reserve(stream.size());
        for (const auto& token : stream)
            for (auto& part : split_subtokens(token)) split.push_back(std::move(part));
        stream = std::move(split);
    }
    if (config.lowercase)
        for (auto& token : stream) token = ascii_lower(std::move(token));
    if (config.stem) {
        PorterStemmer stemmer;
        for (auto& token : stream) token = stemmer.stem(std::move(token));
    }
    return stream;
}

inline TokenStream preprocess_text(const std::string& text, const PreprocessConfig& config) {
    return normalize(tokenize(strip_jira_markup(text, config.markup_mode, config.marker_word)),
                     config);
}

}  // namespace fileloc
