#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "yada/value.hpp"

namespace yada {

enum class NodeKind { Container, List, Leaf, LeafList };

std::string_view to_string(NodeKind kind);

/// Built-in leaf type. The registry is closed: air-sensor, decimal, string,
/// boolean.
struct LeafType {
    std::string_view name;
    ValueKind value_kind;
    std::string_view unit;
};

/// Looks up a registry type by name; nullptr if unknown.
const LeafType* find_leaf_type(std::string_view name);
std::span<const LeafType> leaf_type_registry();

struct SchemaNode {
    NodeKind kind = NodeKind::Container;
    std::string name;
    std::optional<std::string> description;
    std::vector<SchemaNode> children;  // Container / List
    std::string key_leaf;              // List
    std::string type_name;             // Leaf / LeafList

    bool is_leafy() const { return kind == NodeKind::Leaf || kind == NodeKind::LeafList; }
    const SchemaNode* child(std::string_view child_name) const;
    /// Registry entry of a Leaf/LeafList; nullptr for interior nodes.
    const LeafType* leaf_type() const;

    friend bool operator==(const SchemaNode&, const SchemaNode&) = default;
};

struct SchemaModule {
    std::string name;
    std::vector<SchemaNode> roots;

    const SchemaNode* root(std::string_view root_name) const;

    friend bool operator==(const SchemaModule&, const SchemaModule&) = default;
};

using SchemaPtr = std::shared_ptr<const SchemaModule>;

class SchemaError : public std::runtime_error {
public:
    enum class Kind { Syntax, DuplicateName, UnknownType, BadKey, NotFound };

    SchemaError(Kind kind, std::string message, std::size_t offset = 0, std::string path = {},
                std::size_t segment = 0);

    Kind kind() const { return kind_; }
    /// Byte offset into the source text (parse errors only).
    std::size_t offset() const { return offset_; }
    /// Slash-joined schema path of the offending node, module name first.
    const std::string& path() const { return path_; }
    /// Index of the first unresolved segment (NotFound only).
    std::size_t segment() const { return segment_; }

private:
    Kind kind_;
    std::size_t offset_;
    std::string path_;
    std::size_t segment_;
};

/// Parses a complete `module NAME { ... }` declaration.
SchemaModule parse_schema(std::string_view text);

/// Canonical text: two-space indentation, one statement per line, statements
/// in declaration order (description, key and type before children).
std::string print_schema(const SchemaModule& module);

/// Descends from the module roots by name. Throws SchemaError{NotFound}
/// reporting the index of the first missing segment.
const SchemaNode& resolve(const SchemaModule& module, std::span<const std::string> segments);

/// Every Leaf/LeafList of the module as a name path, in declaration order.
std::vector<std::vector<std::string>> leaf_name_paths(const SchemaModule& module);

SchemaModule load_schema_file(const std::string& file);

}  // namespace yada
