#include "yada/path_syntax.hpp"

#include <cctype>

namespace yada {

namespace {

bool name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }

bool name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' ||
           c == ':';
}

}  // namespace

PathSyntaxError::PathSyntaxError(std::string message, std::size_t offset)
    : std::runtime_error(message + " (offset " + std::to_string(offset) + ")"), offset_(offset) {}

std::vector<RawSegment> lex_path(std::string_view text) {
    std::vector<RawSegment> out;
    std::size_t i = 0;
    if (text.empty()) throw PathSyntaxError("empty path", 0);
    while (i < text.size()) {
        if (text[i] != '/') throw PathSyntaxError("expected '/'", i);
        ++i;
        RawSegment seg;
        seg.offset = i;
        if (i < text.size() && text[i] == '*') {
            seg.name = "*";
            ++i;
        } else {
            if (i >= text.size() || !name_start(text[i])) {
                throw PathSyntaxError("expected segment name", i);
            }
            const std::size_t start = i;
            while (i < text.size() && name_char(text[i])) ++i;
            seg.name = std::string(text.substr(start, i - start));
            if (i < text.size() && text[i] == '[') {
                constexpr std::string_view kOpen = "[key='";
                if (text.substr(i, kOpen.size()) != kOpen) {
                    throw PathSyntaxError("expected [key='...']", i);
                }
                i += kOpen.size();
                const auto close = text.find('\'', i);
                if (close == std::string_view::npos) {
                    throw PathSyntaxError("unterminated key literal", i);
                }
                seg.key_literal = std::string(text.substr(i, close - i));
                i = close + 1;
                if (i >= text.size() || text[i] != ']') throw PathSyntaxError("expected ']'", i);
                ++i;
            }
        }
        if (i < text.size() && text[i] != '/') {
            throw PathSyntaxError("unexpected character '" + std::string(1, text[i]) + "'", i);
        }
        out.push_back(std::move(seg));
    }
    return out;
}

std::string key_predicate(std::string_view literal) {
    std::string out = "[key='";
    out += literal;
    out += "']";
    return out;
}

}  // namespace yada
