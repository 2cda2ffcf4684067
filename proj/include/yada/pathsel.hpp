#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "yada/datatree.hpp"
#include "yada/path_syntax.hpp"
#include "yada/schema.hpp"

namespace yada {

struct PathStep {
    std::string name;  // "*" matches any sibling
    std::optional<std::string> key_literal;

    bool wildcard() const { return name == "*"; }
    friend bool operator==(const PathStep&, const PathStep&) = default;
};

/// Absolute path expression: `/seg(/seg)*`.
class PathExpr {
public:
    explicit PathExpr(std::vector<PathStep> steps);

    const std::vector<PathStep>& steps() const { return steps_; }
    std::size_t size() const { return steps_.size(); }
    std::string to_string() const;

    friend bool operator==(const PathExpr&, const PathExpr&) = default;

private:
    std::vector<PathStep> steps_;
};

/// Throws PathSyntaxError with the byte offset of the first bad character.
PathExpr parse_path(std::string_view text);

class BindError : public std::runtime_error {
public:
    enum class Kind { UnknownSegment, PredicateOnNonList };
    BindError(Kind kind, std::string message, std::size_t segment);
    Kind kind() const { return kind_; }
    std::size_t segment() const { return segment_; }

private:
    Kind kind_;
    std::size_t segment_;
};

/// A PathExpr checked against a schema.
class BoundPath {
public:
    const PathExpr& expr() const { return expr_; }
    const SchemaModule& schema() const { return *schema_; }

    /// True when the concrete leaf path lies at or beneath what the
    /// expression addresses.
    bool matches(const LeafPath& path) const;

private:
    friend BoundPath bind_path(const PathExpr&, SchemaPtr);
    BoundPath(PathExpr expr, SchemaPtr schema) : expr_(std::move(expr)), schema_(std::move(schema)) {}

    PathExpr expr_;
    SchemaPtr schema_;
};

BoundPath bind_path(const PathExpr& expr, SchemaPtr schema);

/// Leaf instances selected by `path`, in document order.
std::vector<LeafPath> evaluate(const DataTree& tree, const BoundPath& path);

struct SelectionSet {
    std::string name;
    std::vector<PathExpr> exprs;

    /// Adds `expr` unless an equal expression is already present.
    void add(PathExpr expr);
};

std::vector<BoundPath> bind_all(const SelectionSet& sel, SchemaPtr schema);

/// Sorted union of evaluate() over every bound path.
std::vector<LeafPath> evaluate_union(const DataTree& tree, std::span<const BoundPath> paths);

/// Copy of `tree` holding only the selected leaves and the ancestors needed to
/// address them (containers, list entries and their key leaves).
DataTree project(const DataTree& tree, std::span<const BoundPath> paths);
DataTree project(const DataTree& tree, const SelectionSet& sel);

/// The default air quality KPI: seven of the fourteen sensor leaves.
SelectionSet kpi_airquality();

/// `.ypath` text: one path per line, `#` starts a comment.
SelectionSet parse_selection(std::string name, std::string_view text);
SelectionSet load_selection_file(const std::string& file);

}  // namespace yada
