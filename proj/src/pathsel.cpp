#include "yada/pathsel.hpp"

#include <algorithm>
#include <filesystem>
#include <set>

#include "yada/io.hpp"

namespace yada {

namespace {

const SchemaNode* schema_child(const std::vector<SchemaNode>& kids, std::string_view name) {
    for (const auto& k : kids) {
        if (k.name == name) return &k;
    }
    return nullptr;
}

const DataNode* data_child(const std::vector<DataNode>& kids, std::string_view name) {
    for (const auto& k : kids) {
        if (k.name == name) return &k;
    }
    return nullptr;
}

ValueKind key_kind(const SchemaNode& list) {
    return list.child(list.key_leaf)->leaf_type()->value_kind;
}

void collect_all(const std::vector<DataNode>& kids, const std::vector<SchemaNode>& skids,
                 std::vector<PathSegment>& prefix, std::vector<LeafPath>& out);

void collect_node(const DataNode& node, const SchemaNode& sn, std::vector<PathSegment>& prefix,
                  std::vector<LeafPath>& out) {
    switch (node.kind) {
        case NodeKind::Leaf:
        case NodeKind::LeafList:
            prefix.push_back({node.name, std::nullopt});
            out.emplace_back(prefix);
            prefix.pop_back();
            break;
        case NodeKind::Container:
            prefix.push_back({node.name, std::nullopt});
            collect_all(node.children, sn.children, prefix, out);
            prefix.pop_back();
            break;
        case NodeKind::List:
            for (const auto& entry : node.entries) {
                const Value* key = entry.key(sn.key_leaf);
                if (!key) continue;
                prefix.push_back({node.name, *key});
                collect_all(entry.children, sn.children, prefix, out);
                prefix.pop_back();
            }
            break;
    }
}

void collect_all(const std::vector<DataNode>& kids, const std::vector<SchemaNode>& skids,
                 std::vector<PathSegment>& prefix, std::vector<LeafPath>& out) {
    for (const auto& sn : skids) {
        if (const DataNode* node = data_child(kids, sn.name)) collect_node(*node, sn, prefix, out);
    }
}

class Evaluator {
public:
    Evaluator(const PathExpr& expr, std::vector<LeafPath>& out) : expr_(expr), out_(out) {}

    void walk(const std::vector<DataNode>& kids, const std::vector<SchemaNode>& skids,
              std::size_t depth) {
        const PathStep& step = expr_.steps()[depth];
        const bool last = depth + 1 == expr_.size();
        for (const auto& sn : skids) {
            if (!step.wildcard() && sn.name != step.name) continue;
            const DataNode* node = data_child(kids, sn.name);
            if (!node || node->kind != sn.kind) continue;
            if (step.key_literal && node->kind != NodeKind::List) continue;
            switch (node->kind) {
                case NodeKind::Leaf:
                case NodeKind::LeafList:
                    if (last) collect_node(*node, sn, prefix_, out_);
                    break;
                case NodeKind::Container:
                    if (last) {
                        collect_node(*node, sn, prefix_, out_);
                    } else {
                        prefix_.push_back({node->name, std::nullopt});
                        walk(node->children, sn.children, depth + 1);
                        prefix_.pop_back();
                    }
                    break;
                case NodeKind::List: {
                    std::optional<Value> want;
                    if (step.key_literal) {
                        want = Value::parse_as(key_kind(sn), *step.key_literal);
                        if (!want) break;  // literal can never equal a typed key
                    }
                    for (const auto& entry : node->entries) {
                        const Value* key = entry.key(sn.key_leaf);
                        if (!key || (want && *want != *key)) continue;
                        prefix_.push_back({node->name, *key});
                        if (last) {
                            collect_all(entry.children, sn.children, prefix_, out_);
                        } else {
                            walk(entry.children, sn.children, depth + 1);
                        }
                        prefix_.pop_back();
                    }
                    break;
                }
            }
        }
    }

private:
    const PathExpr& expr_;
    std::vector<LeafPath>& out_;
    std::vector<PathSegment> prefix_;
};

// Keeps the nodes under `kids` whose subtree holds a kept leaf.
std::vector<DataNode> prune(const std::vector<DataNode>& kids, const std::vector<SchemaNode>& skids,
                            std::vector<PathSegment>& prefix, const std::set<LeafPath>& keep) {
    std::vector<DataNode> out;
    for (const auto& node : kids) {
        const SchemaNode* sn = schema_child(skids, node.name);
        if (!sn || sn->kind != node.kind) continue;
        switch (node.kind) {
            case NodeKind::Leaf:
            case NodeKind::LeafList: {
                prefix.push_back({node.name, std::nullopt});
                if (keep.count(LeafPath(prefix))) out.push_back(node);
                prefix.pop_back();
                break;
            }
            case NodeKind::Container: {
                prefix.push_back({node.name, std::nullopt});
                auto sub = prune(node.children, sn->children, prefix, keep);
                prefix.pop_back();
                if (!sub.empty()) {
                    DataNode copy;
                    copy.kind = node.kind;
                    copy.name = node.name;
                    copy.children = std::move(sub);
                    out.push_back(std::move(copy));
                }
                break;
            }
            case NodeKind::List: {
                DataNode copy;
                copy.kind = node.kind;
                copy.name = node.name;
                for (const auto& entry : node.entries) {
                    const Value* key = entry.key(sn->key_leaf);
                    if (!key) continue;
                    prefix.push_back({node.name, *key});
                    auto sub = prune(entry.children, sn->children, prefix, keep);
                    prefix.pop_back();
                    if (sub.empty()) continue;
                    ListEntry kept;
                    for (const auto& child : entry.children) {
                        if (child.name == sn->key_leaf || data_child(sub, child.name)) {
                            const DataNode* pruned = data_child(sub, child.name);
                            kept.children.push_back(pruned ? *pruned : child);
                        }
                    }
                    copy.entries.push_back(std::move(kept));
                }
                if (!copy.entries.empty()) out.push_back(std::move(copy));
                break;
            }
        }
    }
    return out;
}

}  // namespace

PathExpr::PathExpr(std::vector<PathStep> steps) : steps_(std::move(steps)) {
    if (steps_.empty()) throw std::invalid_argument("path expression needs at least one segment");
}

std::string PathExpr::to_string() const {
    std::string out;
    for (const auto& s : steps_) {
        out += '/';
        out += s.name;
        if (s.key_literal) out += key_predicate(*s.key_literal);
    }
    return out;
}

PathExpr parse_path(std::string_view text) {
    std::vector<PathStep> steps;
    for (auto& raw : lex_path(text)) {
        steps.push_back({std::move(raw.name), std::move(raw.key_literal)});
    }
    return PathExpr(std::move(steps));
}

BindError::BindError(Kind kind, std::string message, std::size_t segment)
    : std::runtime_error(std::move(message)), kind_(kind), segment_(segment) {}

BoundPath bind_path(const PathExpr& expr, SchemaPtr schema) {
    std::vector<const std::vector<SchemaNode>*> levels{&schema->roots};
    for (std::size_t i = 0; i < expr.size(); ++i) {
        const PathStep& step = expr.steps()[i];
        std::vector<const SchemaNode*> hits;
        for (const auto* level : levels) {
            for (const auto& sn : *level) {
                if (step.wildcard() || sn.name == step.name) hits.push_back(&sn);
            }
        }
        if (hits.empty()) {
            throw BindError(BindError::Kind::UnknownSegment,
                            "segment " + std::to_string(i) + " ('" + step.name + "') of " +
                                expr.to_string() + " matches no schema node",
                            i);
        }
        if (step.key_literal) {
            // A predicate narrows the candidates to lists; it is an error only
            // when nothing it could apply to remains.
            std::erase_if(hits, [](const SchemaNode* sn) { return sn->kind != NodeKind::List; });
            if (hits.empty()) {
                throw BindError(BindError::Kind::PredicateOnNonList,
                                "key predicate on segment " + std::to_string(i) + " ('" + step.name +
                                    "') of " + expr.to_string() + " which is not a list",
                                i);
            }
        }
        levels.clear();
        for (const auto* sn : hits) {
            if (!sn->is_leafy()) levels.push_back(&sn->children);
        }
    }
    return BoundPath(expr, std::move(schema));
}

bool BoundPath::matches(const LeafPath& path) const {
    const auto& steps = expr_.steps();
    if (steps.size() > path.size()) return false;
    const std::vector<SchemaNode>* level = &schema_->roots;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const PathSegment& seg = path.segments()[i];
        if (!steps[i].wildcard() && steps[i].name != seg.name) return false;
        const SchemaNode* sn = level ? schema_child(*level, seg.name) : nullptr;
        if (!sn) return false;
        if (steps[i].key_literal) {
            if (sn->kind != NodeKind::List || !seg.key) return false;
            auto want = Value::parse_as(key_kind(*sn), *steps[i].key_literal);
            if (!want || *want != *seg.key) return false;
        }
        level = sn->is_leafy() ? nullptr : &sn->children;
    }
    return true;
}

std::vector<LeafPath> evaluate(const DataTree& tree, const BoundPath& path) {
    std::vector<LeafPath> out;
    Evaluator(path.expr(), out).walk(tree.roots(), tree.schema().roots, 0);
    return out;
}

void SelectionSet::add(PathExpr expr) {
    if (std::find(exprs.begin(), exprs.end(), expr) == exprs.end()) exprs.push_back(std::move(expr));
}

std::vector<BoundPath> bind_all(const SelectionSet& sel, SchemaPtr schema) {
    std::vector<BoundPath> out;
    out.reserve(sel.exprs.size());
    for (const auto& e : sel.exprs) out.push_back(bind_path(e, schema));
    return out;
}

std::vector<LeafPath> evaluate_union(const DataTree& tree, std::span<const BoundPath> paths) {
    std::set<LeafPath> all;
    for (const auto& p : paths) {
        for (auto& leaf : evaluate(tree, p)) all.insert(std::move(leaf));
    }
    return {all.begin(), all.end()};
}

DataTree project(const DataTree& tree, std::span<const BoundPath> paths) {
    const auto selected = evaluate_union(tree, paths);
    const std::set<LeafPath> keep(selected.begin(), selected.end());
    DataTree out(tree.schema_ptr());
    std::vector<PathSegment> prefix;
    out.mutable_roots() = prune(tree.roots(), tree.schema().roots, prefix, keep);
    return out;
}

DataTree project(const DataTree& tree, const SelectionSet& sel) {
    const auto bound = bind_all(sel, tree.schema_ptr());
    return project(tree, bound);
}

SelectionSet kpi_airquality() {
    SelectionSet sel{"air-quality-kpi", {}};
    for (const char* p : {"/AirParticleURI/value/pm2.5-data", "/AirParticleURI/value/pm10-data",
                          "/AirGasesURI/value/carbon-monoxide-data",
                          "/AirGasesURI/value/nitrogen-dioxide", "/AirGasesURI/value/ozone",
                          "/AirTemperatureURI/value", "/AirHumidityURI/value"}) {
        sel.add(parse_path(p));
    }
    return sel;
}

SelectionSet parse_selection(std::string name, std::string_view text) {
    SelectionSet sel{std::move(name), {}};
    std::size_t line_start = 0;
    std::size_t line_no = 1;
    while (line_start <= text.size()) {
        std::size_t end = text.find('\n', line_start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(line_start, end - line_start);
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        std::size_t b = 0;
        std::size_t e = line.size();
        while (b < e && std::isspace(static_cast<unsigned char>(line[b]))) ++b;
        while (e > b && std::isspace(static_cast<unsigned char>(line[e - 1]))) --e;
        if (b < e) {
            try {
                sel.add(parse_path(line.substr(b, e - b)));
            } catch (const PathSyntaxError& err) {
                throw PathSyntaxError("line " + std::to_string(line_no) + ": " + err.what(),
                                      line_start + b + err.offset());
            }
        }
        line_start = end + 1;
        ++line_no;
    }
    return sel;
}

SelectionSet load_selection_file(const std::string& file) {
    return parse_selection(std::filesystem::path(file).stem().string(), read_file(file));
}

}  // namespace yada
