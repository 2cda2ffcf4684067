#pragma once

// Seeded random schemas, instance trees and path expressions for the
// property tests and the acceptance suite.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "yada/datatree.hpp"
#include "yada/pathsel.hpp"
#include "yada/schema.hpp"

namespace yada::testing {

using Rng = std::mt19937_64;

inline std::size_t pick(Rng& rng, std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

inline const std::vector<std::string>& name_pool() {
    static const std::vector<std::string> pool{
        "a", "b", "c", "value", "pm2.5-data", "temp", "rh", "gas_1", "x.y", "ns:leaf",
        "sensor", "entry", "k", "z-z", "ozone", "alpha", "beta"};
    return pool;
}

class SchemaGen {
public:
    SchemaGen(Rng& rng, int max_depth, int max_nodes)
        : rng_(rng), max_depth_(max_depth), budget_(max_nodes) {}

    SchemaModule module() {
        SchemaModule m;
        m.name = "m" + std::to_string(pick(rng_, 1000));
        const std::size_t roots = pick(rng_, 4);
        auto names = fresh_names(roots);
        for (auto& n : names) {
            if (budget_ <= 0) break;
            --budget_;
            m.roots.push_back(interior(NodeKind::Container, n, 1));
        }
        return m;
    }

private:
    std::vector<std::string> fresh_names(std::size_t n) {
        auto pool = name_pool();
        std::shuffle(pool.begin(), pool.end(), rng_);
        pool.resize(std::min(n, pool.size()));
        return pool;
    }

    std::optional<std::string> maybe_description() {
        static const std::vector<std::string> texts{"plain", "with \"quotes\"", "back\\slash",
                                                    "two\nlines", "tab\there", ""};
        if (!coin(rng_, 0.4)) return std::nullopt;
        return texts[pick(rng_, texts.size())];
    }

    SchemaNode leaf(NodeKind kind, std::string name) {
        SchemaNode n;
        n.kind = kind;
        n.name = std::move(name);
        n.description = maybe_description();
        const auto reg = leaf_type_registry();
        n.type_name = std::string(reg[pick(rng_, reg.size())].name);
        return n;
    }

    SchemaNode interior(NodeKind kind, std::string name, int depth) {
        SchemaNode n;
        n.kind = kind;
        n.name = std::move(name);
        n.description = maybe_description();
        std::size_t want = pick(rng_, 5);
        if (kind == NodeKind::List) want = std::max<std::size_t>(want, 1);
        auto names = fresh_names(want);
        for (std::size_t i = 0; i < names.size(); ++i) {
            const bool must_leaf = kind == NodeKind::List && i == 0;
            if (budget_ <= 0 && !must_leaf) break;
            --budget_;
            const bool can_nest = depth + 1 < max_depth_ && !must_leaf;
            const std::size_t roll = pick(rng_, 10);
            if (can_nest && roll < 2) {
                n.children.push_back(interior(NodeKind::Container, names[i], depth + 1));
            } else if (can_nest && roll < 4) {
                n.children.push_back(interior(NodeKind::List, names[i], depth + 1));
            } else if (!must_leaf && roll < 5) {
                n.children.push_back(leaf(NodeKind::LeafList, names[i]));
            } else {
                n.children.push_back(leaf(NodeKind::Leaf, names[i]));
            }
        }
        if (kind == NodeKind::List) n.key_leaf = n.children.front().name;
        return n;
    }

    Rng& rng_;
    int max_depth_;
    int budget_;
};

inline SchemaModule random_schema(Rng& rng, int max_depth = 4, int max_nodes = 40) {
    return SchemaGen(rng, max_depth, max_nodes).module();
}

inline std::size_t count_nodes(const std::vector<SchemaNode>& nodes) {
    std::size_t n = 0;
    for (const auto& c : nodes) n += 1 + count_nodes(c.children);
    return n;
}

inline int depth_of(const std::vector<SchemaNode>& nodes) {
    int d = 0;
    for (const auto& c : nodes) d = std::max(d, 1 + depth_of(c.children));
    return d;
}

/// Small value pools so that keys and values collide often.
inline Value random_value(Rng& rng, ValueKind kind) {
    switch (kind) {
        case ValueKind::Num: {
            static const std::int64_t micros[] = {0, 1'000'000, 12'500'000, -3'250'000, 21'400'000,
                                                  31'000, 7, 999'999'999};
            return Value(Decimal::from_micros(micros[pick(rng, std::size(micros))]));
        }
        case ValueKind::Str: {
            static const char* strs[] = {"", "on", "off", "x\"y", "line\nbreak", "üñï"};
            return Value(std::string(strs[pick(rng, std::size(strs))]));
        }
        case ValueKind::Bool: return Value(coin(rng, 0.5));
    }
    return Value();
}

/// Random concrete leaf path through `schema`, or nullopt if it has no leaves.
inline std::optional<LeafPath> random_leaf_path(Rng& rng, const SchemaModule& schema) {
    std::vector<PathSegment> segs;
    const std::vector<SchemaNode>* level = &schema.roots;
    while (true) {
        if (level->empty()) return std::nullopt;
        const SchemaNode& sn = (*level)[pick(rng, level->size())];
        PathSegment seg{sn.name, std::nullopt};
        if (sn.kind == NodeKind::List) {
            seg.key = random_value(rng, sn.child(sn.key_leaf)->leaf_type()->value_kind);
        }
        segs.push_back(std::move(seg));
        if (sn.is_leafy()) return LeafPath(std::move(segs));
        level = &sn.children;
    }
}

/// Builds a tree by applying `updates` random writes through apply_update.
inline DataTree random_tree(Rng& rng, const SchemaPtr& schema, int updates) {
    DataTree tree(schema);
    for (int i = 0; i < updates; ++i) {
        auto path = random_leaf_path(rng, *schema);
        if (!path) break;
        // Writes to a key leaf must carry the entry's own key.
        const auto nodes_names = path->names();
        const auto& segs = path->segments();
        std::optional<Value> forced;
        if (segs.size() >= 2 && segs[segs.size() - 2].key) {
            std::vector<std::string> parent(nodes_names.begin(), nodes_names.end() - 1);
            const SchemaNode& list = resolve(*schema, parent);
            if (list.key_leaf == segs.back().name) forced = *segs[segs.size() - 2].key;
        }
        const SchemaNode& leaf = resolve(*schema, nodes_names);
        const Value v = forced ? *forced : random_value(rng, leaf.leaf_type()->value_kind);
        tree.apply_update(*path, v, i);
    }
    return tree;
}

/// Random expression that binds against `schema`: a walk of random depth with
/// wildcards and key predicates sprinkled in.
inline PathExpr random_expr(Rng& rng, const SchemaModule& schema) {
    std::vector<PathStep> steps;
    const std::vector<SchemaNode>* level = &schema.roots;
    while (!level->empty()) {
        const SchemaNode& sn = (*level)[pick(rng, level->size())];
        PathStep step{sn.name, std::nullopt};
        if (sn.kind == NodeKind::List && coin(rng, 0.5)) {
            const ValueKind kk = sn.child(sn.key_leaf)->leaf_type()->value_kind;
            step.key_literal = random_value(rng, kk).to_string();
            // Literals cannot contain a quote; fall back to a plain step.
            if (step.key_literal->find('\'') != std::string::npos) step.key_literal.reset();
        } else if (coin(rng, 0.2)) {
            step.name = "*";
        }
        steps.push_back(std::move(step));
        if (sn.is_leafy() || coin(rng, 0.25)) break;
        level = &sn.children;
    }
    if (steps.empty()) steps.push_back({"*", std::nullopt});
    return PathExpr(std::move(steps));
}

}  // namespace yada::testing
