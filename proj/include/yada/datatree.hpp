#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "yada/schema.hpp"
#include "yada/value.hpp"

namespace yada {

/// Simulated time in integer microseconds since epoch 0.
using Timestamp = std::int64_t;

struct PathSegment {
    std::string name;
    std::optional<Value> key;  // present exactly on list segments

    friend bool operator==(const PathSegment&, const PathSegment&) = default;
    friend std::strong_ordering operator<=>(const PathSegment& a, const PathSegment& b);
};

/// Concrete address of one leaf (or leaf-list) instance.
class LeafPath {
public:
    LeafPath() = default;
    explicit LeafPath(std::vector<PathSegment> segments) : segments_(std::move(segments)) {}

    /// Parses `/a/b[key='v']/c`, typing key literals by the schema's key leaf.
    /// Throws DataError{UnknownPath} if the text does not name a leaf.
    static LeafPath parse(const SchemaModule& schema, std::string_view text);

    const std::vector<PathSegment>& segments() const { return segments_; }
    std::size_t size() const { return segments_.size(); }
    bool empty() const { return segments_.empty(); }

    /// Same path with every list key removed: identifies the schema leaf.
    LeafPath schema_path() const;
    std::vector<std::string> names() const;
    std::string to_string() const;

    friend bool operator==(const LeafPath&, const LeafPath&) = default;
    friend std::strong_ordering operator<=>(const LeafPath& a, const LeafPath& b);

private:
    std::vector<PathSegment> segments_;
};

class DataError : public std::runtime_error {
public:
    enum class Kind { UnknownPath, TypeMismatch, SchemaMismatch, Parse };
    DataError(Kind kind, std::string message);
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

struct DataNode;

struct ListEntry {
    std::vector<DataNode> children;

    /// Value of the key leaf, if the entry holds it.
    const Value* key(std::string_view key_leaf) const;

    friend bool operator==(const ListEntry&, const ListEntry&);
};

struct DataNode {
    NodeKind kind = NodeKind::Container;
    std::string name;
    std::vector<DataNode> children;  // Container, schema declaration order
    std::vector<ListEntry> entries;  // List, ascending key order
    Value value;                     // Leaf
    std::vector<Value> values;       // LeafList, insertion order
    Timestamp last_updated = 0;      // Leaf / LeafList

    static DataNode leaf(std::string name, Value v, Timestamp ts);

    const DataNode* child(std::string_view child_name) const;

    friend bool operator==(const DataNode&, const DataNode&) = default;
};

/// One leaf instance reached by a document-order walk.
struct LeafRef {
    LeafPath path;
    const DataNode* node = nullptr;
};

enum class UpdateOutcome { Applied, Dropped };

class DataTree {
public:
    explicit DataTree(SchemaPtr schema);

    const SchemaModule& schema() const { return *schema_; }
    const SchemaPtr& schema_ptr() const { return schema_; }

    const std::vector<DataNode>& roots() const { return roots_; }
    /// Raw access for loaders and tests; callers own validity.
    std::vector<DataNode>& mutable_roots() { return roots_; }

    bool empty() const { return roots_.empty(); }

    const DataNode* find(const LeafPath& path) const;

    /// Writes `value` at `path` with last-writer-wins on `ts`. Missing
    /// ancestors are created. An update older than the leaf's lastUpdated is
    /// ignored and reported as Dropped. Throws DataError{UnknownPath,
    /// TypeMismatch}; on throw the tree is unchanged.
    UpdateOutcome apply_update(const LeafPath& path, const Value& value, Timestamp ts);

    /// All leaf instances in schema declaration order, list entries by key.
    std::vector<LeafRef> leaves() const;
    std::size_t leaf_count() const;

    friend bool operator==(const DataTree& a, const DataTree& b);

private:
    SchemaPtr schema_;
    std::vector<DataNode> roots_;
};

struct Violation {
    enum class Kind {
        UnknownNode,
        KindMismatch,
        TypeMismatch,
        DuplicateName,
        DuplicateListKey,
        MissingListKey,
        UnorderedList,
        DuplicateLeafListValue,
        StringTooLong,
    };
    Kind kind;
    std::string locator;
    std::string message;
};

std::string_view to_string(Violation::Kind kind);

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
    std::size_t count(Violation::Kind kind) const;
};

ValidationReport validate(const DataTree& tree);

/// Leaf paths whose values differ or that exist in only one tree, sorted.
/// Throws DataError{SchemaMismatch} when the trees use different schemas.
std::vector<LeafPath> diff(const DataTree& a, const DataTree& b);

/// Canonical JSON: schema-ordered object keys, lists as key-ordered arrays,
/// shortest decimals, no insignificant whitespace.
std::string serialize(const DataTree& tree);

/// Reads an instance document (canonical JSON or any equivalent JSON).
/// Loaded leaves carry lastUpdated = 0.
DataTree parse_instance(SchemaPtr schema, std::string_view json_text);
DataTree load_instance_file(SchemaPtr schema, const std::string& file);

}  // namespace yada
