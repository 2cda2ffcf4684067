#pragma once

// Brute-force reference computations. These walk the raw DataNode structure
// and compare rendered strings; they deliberately share no traversal code
// with the library.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "yada/datatree.hpp"
#include "yada/pathsel.hpp"

namespace yada::testing {

/// (name, rendered key) per segment.
using FlatPath = std::vector<std::pair<std::string, std::optional<std::string>>>;

inline FlatPath flatten(const LeafPath& p) {
    FlatPath out;
    for (const auto& s : p.segments()) {
        out.emplace_back(s.name, s.key ? std::optional<std::string>(s.key->to_string()) : std::nullopt);
    }
    return out;
}

inline std::string render_value(const DataNode& n) {
    if (n.kind == NodeKind::Leaf) return "v:" + std::to_string(static_cast<int>(n.value.kind())) + ":" + n.value.to_string();
    std::string out = "L";
    for (const auto& v : n.values) out += "|" + std::to_string(static_cast<int>(v.kind())) + ":" + v.to_string();
    return out;
}

namespace detail {

inline void enumerate(const std::vector<DataNode>& kids, const std::vector<SchemaNode>& skids,
                      FlatPath& prefix, std::map<FlatPath, std::string>& out) {
    for (const auto& node : kids) {
        const SchemaNode* sn = nullptr;
        for (const auto& s : skids) {
            if (s.name == node.name) sn = &s;
        }
        if (!sn) continue;
        if (node.kind == NodeKind::Leaf || node.kind == NodeKind::LeafList) {
            prefix.emplace_back(node.name, std::nullopt);
            out[prefix] = render_value(node);
            prefix.pop_back();
        } else if (node.kind == NodeKind::Container) {
            prefix.emplace_back(node.name, std::nullopt);
            enumerate(node.children, sn->children, prefix, out);
            prefix.pop_back();
        } else {
            for (const auto& e : node.entries) {
                std::optional<std::string> key;
                for (const auto& c : e.children) {
                    if (c.name == sn->key_leaf) key = c.value.to_string();
                }
                prefix.emplace_back(node.name, key);
                enumerate(e.children, sn->children, prefix, out);
                prefix.pop_back();
            }
        }
    }
}

}  // namespace detail

/// Every leaf instance of `tree` with a rendering of its value(s).
inline std::map<FlatPath, std::string> enumerate_leaves(const DataTree& tree) {
    std::map<FlatPath, std::string> out;
    FlatPath prefix;
    detail::enumerate(tree.roots(), tree.schema().roots, prefix, out);
    return out;
}

/// Segment-by-segment match of an expression against one concrete path:
/// names equal or wildcard; predicates compare the rendered key text.
inline bool brute_match(const PathExpr& expr, const FlatPath& path) {
    if (expr.size() > path.size()) return false;
    for (std::size_t i = 0; i < expr.size(); ++i) {
        const auto& step = expr.steps()[i];
        if (step.name != "*" && step.name != path[i].first) return false;
        if (step.key_literal && (!path[i].second || *path[i].second != *step.key_literal)) {
            return false;
        }
    }
    return true;
}

inline std::set<FlatPath> brute_evaluate(const DataTree& tree, const PathExpr& expr) {
    std::set<FlatPath> out;
    for (const auto& [path, _] : enumerate_leaves(tree)) {
        if (brute_match(expr, path)) out.insert(path);
    }
    return out;
}

inline std::set<FlatPath> as_set(const std::vector<LeafPath>& paths) {
    std::set<FlatPath> out;
    for (const auto& p : paths) out.insert(flatten(p));
    return out;
}

/// Paths present in only one tree or rendered differently.
inline std::set<FlatPath> brute_diff(const DataTree& a, const DataTree& b) {
    const auto la = enumerate_leaves(a);
    const auto lb = enumerate_leaves(b);
    std::set<FlatPath> out;
    for (const auto& [p, v] : la) {
        auto it = lb.find(p);
        if (it == lb.end() || it->second != v) out.insert(p);
    }
    for (const auto& [p, v] : lb) {
        if (!la.count(p)) out.insert(p);
    }
    return out;
}

}  // namespace yada::testing
