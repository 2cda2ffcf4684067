#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace yada {

/// Malformed path text; offset points at the offending byte.
class PathSyntaxError : public std::runtime_error {
public:
    PathSyntaxError(std::string message, std::size_t offset);
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// One lexical segment of `/seg(/seg)*`, seg := name | name[key='literal'] | *
struct RawSegment {
    std::string name;  // "*" for a wildcard
    std::optional<std::string> key_literal;
    std::size_t offset = 0;

    bool wildcard() const { return name == "*"; }
};

std::vector<RawSegment> lex_path(std::string_view text);

/// Renders `[key='literal']`; literals never contain a single quote.
std::string key_predicate(std::string_view literal);

}  // namespace yada
