#include "yada/datatree.hpp"

#include <algorithm>
#include <map>

#include <nlohmann/json.hpp>

#include "yada/io.hpp"
#include "yada/path_syntax.hpp"

namespace yada {

namespace {

using json = nlohmann::json;

std::size_t schema_index(const std::vector<SchemaNode>& kids, std::string_view name) {
    for (std::size_t i = 0; i < kids.size(); ++i) {
        if (kids[i].name == name) return i;
    }
    return kids.size();
}

DataNode* find_child(std::vector<DataNode>& kids, std::string_view name) {
    for (auto& k : kids) {
        if (k.name == name) return &k;
    }
    return nullptr;
}

const DataNode* find_child(const std::vector<DataNode>& kids, std::string_view name) {
    for (const auto& k : kids) {
        if (k.name == name) return &k;
    }
    return nullptr;
}

// Returns the child named sn.name, inserting an empty one at its schema
// position when absent.
DataNode& child_for(std::vector<DataNode>& kids, const std::vector<SchemaNode>& schema_kids,
                    const SchemaNode& sn) {
    if (DataNode* existing = find_child(kids, sn.name)) return *existing;
    const std::size_t idx = schema_index(schema_kids, sn.name);
    auto pos = std::find_if(kids.begin(), kids.end(), [&](const DataNode& k) {
        return schema_index(schema_kids, k.name) > idx;
    });
    DataNode fresh;
    fresh.kind = sn.kind;
    fresh.name = sn.name;
    return *kids.insert(pos, std::move(fresh));
}

std::string segment_text(const PathSegment& seg) {
    std::string out = "/" + seg.name;
    if (seg.key) out += key_predicate(seg.key->to_string());
    return out;
}

// Schema node per path segment; throws on any mismatch.
std::vector<const SchemaNode*> bind_leaf_path(const SchemaModule& schema, const LeafPath& path) {
    if (path.empty()) throw DataError(DataError::Kind::UnknownPath, "empty path");
    std::vector<const SchemaNode*> nodes;
    const std::vector<SchemaNode>* level = &schema.roots;
    std::string prefix;
    for (std::size_t i = 0; i < path.size(); ++i) {
        const PathSegment& seg = path.segments()[i];
        prefix += "/" + seg.name;
        const SchemaNode* sn = nullptr;
        if (level) {
            for (const auto& cand : *level) {
                if (cand.name == seg.name) sn = &cand;
            }
        }
        if (!sn) throw DataError(DataError::Kind::UnknownPath, "no schema node " + prefix);
        if (sn->kind == NodeKind::List) {
            if (!seg.key) {
                throw DataError(DataError::Kind::UnknownPath, "list segment needs a key: " + prefix);
            }
            const SchemaNode* key_leaf = sn->child(sn->key_leaf);
            if (seg.key->kind() != key_leaf->leaf_type()->value_kind) {
                throw DataError(DataError::Kind::TypeMismatch,
                                "key of " + prefix + " must be " +
                                    std::string(to_string(key_leaf->leaf_type()->value_kind)));
            }
        } else if (seg.key) {
            throw DataError(DataError::Kind::UnknownPath, "key on non-list segment " + prefix);
        }
        nodes.push_back(sn);
        level = sn->is_leafy() ? nullptr : &sn->children;
    }
    if (!nodes.back()->is_leafy()) {
        throw DataError(DataError::Kind::UnknownPath, path.to_string() + " does not address a leaf");
    }
    return nodes;
}

bool is_key_leaf(const std::vector<const SchemaNode*>& nodes, std::size_t i) {
    return i > 0 && nodes[i - 1]->kind == NodeKind::List && nodes[i - 1]->key_leaf == nodes[i]->name;
}

void collect(const std::vector<DataNode>& kids, std::vector<PathSegment>& prefix,
             const std::vector<SchemaNode>* schema_kids, std::vector<LeafRef>& out) {
    // Walk in schema order so that stray data order never affects output.
    auto visit = [&](const DataNode& node, const SchemaNode* sn) {
        switch (node.kind) {
            case NodeKind::Leaf:
            case NodeKind::LeafList:
                prefix.push_back({node.name, std::nullopt});
                out.push_back({LeafPath(prefix), &node});
                prefix.pop_back();
                break;
            case NodeKind::Container:
                prefix.push_back({node.name, std::nullopt});
                collect(node.children, prefix, sn ? &sn->children : nullptr, out);
                prefix.pop_back();
                break;
            case NodeKind::List:
                for (const auto& entry : node.entries) {
                    const Value* key = sn ? entry.key(sn->key_leaf) : nullptr;
                    prefix.push_back({node.name, key ? std::optional<Value>(*key) : std::nullopt});
                    collect(entry.children, prefix, sn ? &sn->children : nullptr, out);
                    prefix.pop_back();
                }
                break;
        }
    };
    if (!schema_kids) {
        for (const auto& k : kids) visit(k, nullptr);
        return;
    }
    for (const auto& sn : *schema_kids) {
        if (const DataNode* k = find_child(kids, sn.name)) visit(*k, &sn);
    }
}

// --- validation ---------------------------------------------------------

struct Validator {
    ValidationReport report;

    void add(Violation::Kind kind, const std::string& locator, std::string message) {
        report.violations.push_back({kind, locator.empty() ? "/" : locator, std::move(message)});
    }

    void check_value(const Value& v, const SchemaNode& sn, const std::string& locator) {
        const ValueKind want = sn.leaf_type()->value_kind;
        if (v.kind() != want) {
            add(Violation::Kind::TypeMismatch, locator,
                "expected " + std::string(to_string(want)) + ", got " +
                    std::string(to_string(v.kind())));
        } else if (v.is_str() && v.as_str().size() > kMaxStringBytes) {
            add(Violation::Kind::StringTooLong, locator, "string exceeds 4096 bytes");
        }
    }

    void children(const std::vector<DataNode>& kids, const std::vector<SchemaNode>& schema_kids,
                  const std::string& locator) {
        std::vector<std::string_view> seen;
        for (const auto& node : kids) {
            const std::string here = locator + "/" + node.name;
            if (std::find(seen.begin(), seen.end(), node.name) != seen.end()) {
                add(Violation::Kind::DuplicateName, here, "duplicate sibling '" + node.name + "'");
                continue;
            }
            seen.push_back(node.name);
            const std::size_t idx = schema_index(schema_kids, node.name);
            if (idx == schema_kids.size()) {
                add(Violation::Kind::UnknownNode, here, "not in schema");
                continue;
            }
            const SchemaNode& sn = schema_kids[idx];
            if (sn.kind != node.kind) {
                add(Violation::Kind::KindMismatch, here,
                    "schema says " + std::string(to_string(sn.kind)) + ", instance is " +
                        std::string(to_string(node.kind)));
                continue;
            }
            switch (node.kind) {
                case NodeKind::Container: children(node.children, sn.children, here); break;
                case NodeKind::List: list(node, sn, here); break;
                case NodeKind::Leaf: check_value(node.value, sn, here); break;
                case NodeKind::LeafList:
                    for (std::size_t i = 0; i < node.values.size(); ++i) {
                        check_value(node.values[i], sn, here);
                        for (std::size_t j = 0; j < i; ++j) {
                            if (node.values[j] == node.values[i]) {
                                add(Violation::Kind::DuplicateLeafListValue, here,
                                    "value " + node.values[i].to_string() + " repeated");
                                break;
                            }
                        }
                    }
                    break;
            }
        }
    }

    void list(const DataNode& node, const SchemaNode& sn, const std::string& here) {
        const Value* prev = nullptr;
        for (const auto& entry : node.entries) {
            const Value* key = entry.key(sn.key_leaf);
            if (!key) {
                add(Violation::Kind::MissingListKey, here, "entry lacks key leaf '" + sn.key_leaf + "'");
                children(entry.children, sn.children, here);
                continue;
            }
            const std::string entry_loc = here + key_predicate(key->to_string());
            if (prev) {
                if (*prev == *key) {
                    add(Violation::Kind::DuplicateListKey, entry_loc,
                        "key " + key->to_string() + " not unique");
                } else if (*key < *prev) {
                    add(Violation::Kind::UnorderedList, entry_loc, "entries not in key order");
                }
            }
            prev = key;
            children(entry.children, sn.children, entry_loc);
        }
    }
};

// --- serialization ------------------------------------------------------

void write_json_string(const std::string& s, std::string& out) {
    out += '"';
    for (unsigned char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            case '\b': out += "\\b"; break;
            case '\f': out += "\\f"; break;
            default:
                if (c < 0x20) {
                    static constexpr char kHex[] = "0123456789abcdef";
                    out += "\\u00";
                    out += kHex[c >> 4];
                    out += kHex[c & 0xF];
                } else {
                    out += static_cast<char>(c);
                }
        }
    }
    out += '"';
}

void write_value(const Value& v, std::string& out) {
    switch (v.kind()) {
        case ValueKind::Num: out += v.as_num().to_string(); break;
        case ValueKind::Str: write_json_string(v.as_str(), out); break;
        case ValueKind::Bool: out += v.as_bool() ? "true" : "false"; break;
    }
}

void write_object(const std::vector<DataNode>& kids, const std::vector<SchemaNode>& schema_kids,
                  std::string& out);

void write_node(const DataNode& node, const SchemaNode& sn, std::string& out) {
    switch (node.kind) {
        case NodeKind::Container: write_object(node.children, sn.children, out); break;
        case NodeKind::List: {
            out += '[';
            bool first = true;
            for (const auto& entry : node.entries) {
                if (!first) out += ',';
                first = false;
                write_object(entry.children, sn.children, out);
            }
            out += ']';
            break;
        }
        case NodeKind::Leaf: write_value(node.value, out); break;
        case NodeKind::LeafList: {
            out += '[';
            for (std::size_t i = 0; i < node.values.size(); ++i) {
                if (i) out += ',';
                write_value(node.values[i], out);
            }
            out += ']';
            break;
        }
    }
}

void write_object(const std::vector<DataNode>& kids, const std::vector<SchemaNode>& schema_kids,
                  std::string& out) {
    out += '{';
    bool first = true;
    for (const auto& sn : schema_kids) {
        const DataNode* node = find_child(kids, sn.name);
        if (!node) continue;
        if (!first) out += ',';
        first = false;
        write_json_string(sn.name, out);
        out += ':';
        write_node(*node, sn, out);
    }
    out += '}';
}

// --- instance loading ---------------------------------------------------

Value scalar_from_json(const json& j, const SchemaNode& sn, const std::string& locator) {
    const ValueKind want = sn.leaf_type()->value_kind;
    auto mismatch = [&]() {
        return DataError(DataError::Kind::TypeMismatch,
                         locator + ": expected " + std::string(to_string(want)));
    };
    switch (want) {
        case ValueKind::Num: {
            std::optional<Decimal> d;
            if (j.is_number_integer()) {
                d = Decimal::from_double(static_cast<double>(j.get<std::int64_t>()));
            } else if (j.is_number()) {
                d = Decimal::from_double(j.get<double>());
            }
            if (!d) throw mismatch();
            return Value(*d);
        }
        case ValueKind::Str:
            if (!j.is_string()) throw mismatch();
            return Value(j.get<std::string>());
        case ValueKind::Bool:
            if (!j.is_boolean()) throw mismatch();
            return Value(j.get<bool>());
    }
    throw mismatch();
}

std::vector<DataNode> object_from_json(const json& j, const std::vector<SchemaNode>& schema_kids,
                                       const std::string& locator);

DataNode node_from_json(const json& j, const SchemaNode& sn, const std::string& locator) {
    DataNode node;
    node.kind = sn.kind;
    node.name = sn.name;
    switch (sn.kind) {
        case NodeKind::Container:
            node.children = object_from_json(j, sn.children, locator);
            break;
        case NodeKind::List: {
            if (!j.is_array()) {
                throw DataError(DataError::Kind::TypeMismatch, locator + ": expected array");
            }
            for (const auto& item : j) {
                ListEntry entry{object_from_json(item, sn.children, locator)};
                if (!entry.key(sn.key_leaf)) {
                    throw DataError(DataError::Kind::Parse,
                                    locator + ": list entry lacks key '" + sn.key_leaf + "'");
                }
                node.entries.push_back(std::move(entry));
            }
            std::stable_sort(node.entries.begin(), node.entries.end(),
                             [&](const ListEntry& a, const ListEntry& b) {
                                 return *a.key(sn.key_leaf) < *b.key(sn.key_leaf);
                             });
            break;
        }
        case NodeKind::Leaf:
            node.value = scalar_from_json(j, sn, locator);
            break;
        case NodeKind::LeafList:
            if (!j.is_array()) {
                throw DataError(DataError::Kind::TypeMismatch, locator + ": expected array");
            }
            for (const auto& item : j) node.values.push_back(scalar_from_json(item, sn, locator));
            break;
    }
    return node;
}

std::vector<DataNode> object_from_json(const json& j, const std::vector<SchemaNode>& schema_kids,
                                       const std::string& locator) {
    if (!j.is_object()) {
        throw DataError(DataError::Kind::TypeMismatch, (locator.empty() ? "/" : locator) +
                                                           ": expected object");
    }
    for (const auto& [name, _] : j.items()) {
        if (schema_index(schema_kids, name) == schema_kids.size()) {
            throw DataError(DataError::Kind::UnknownPath, locator + "/" + name + " not in schema");
        }
    }
    std::vector<DataNode> kids;
    for (const auto& sn : schema_kids) {
        auto it = j.find(sn.name);
        if (it == j.end()) continue;
        kids.push_back(node_from_json(*it, sn, locator + "/" + sn.name));
    }
    return kids;
}

}  // namespace

// --- PathSegment / LeafPath -----------------------------------------------

std::strong_ordering operator<=>(const PathSegment& a, const PathSegment& b) {
    if (auto c = a.name.compare(b.name) <=> 0; c != 0) return c;
    if (a.key.has_value() != b.key.has_value()) return a.key.has_value() <=> b.key.has_value();
    if (!a.key) return std::strong_ordering::equal;
    return *a.key <=> *b.key;
}

std::strong_ordering operator<=>(const LeafPath& a, const LeafPath& b) {
    return std::lexicographical_compare_three_way(a.segments_.begin(), a.segments_.end(),
                                                  b.segments_.begin(), b.segments_.end());
}

LeafPath LeafPath::parse(const SchemaModule& schema, std::string_view text) {
    std::vector<RawSegment> raw;
    try {
        raw = lex_path(text);
    } catch (const PathSyntaxError& e) {
        throw DataError(DataError::Kind::UnknownPath, e.what());
    }
    std::vector<PathSegment> segs;
    const std::vector<SchemaNode>* level = &schema.roots;
    std::string prefix;
    for (const auto& r : raw) {
        prefix += "/" + r.name;
        if (r.wildcard()) {
            throw DataError(DataError::Kind::UnknownPath, "wildcard in leaf path " + prefix);
        }
        const SchemaNode* sn = nullptr;
        if (level) {
            for (const auto& cand : *level) {
                if (cand.name == r.name) sn = &cand;
            }
        }
        if (!sn) throw DataError(DataError::Kind::UnknownPath, "no schema node " + prefix);
        PathSegment seg{r.name, std::nullopt};
        if (r.key_literal) {
            if (sn->kind != NodeKind::List) {
                throw DataError(DataError::Kind::UnknownPath, "key on non-list segment " + prefix);
            }
            const ValueKind kind = sn->child(sn->key_leaf)->leaf_type()->value_kind;
            auto key = Value::parse_as(kind, *r.key_literal);
            if (!key) {
                throw DataError(DataError::Kind::TypeMismatch,
                                "key '" + *r.key_literal + "' is not a valid " +
                                    std::string(yada::to_string(kind)));
            }
            seg.key = std::move(*key);
        }
        segs.push_back(std::move(seg));
        level = sn->is_leafy() ? nullptr : &sn->children;
    }
    LeafPath path(std::move(segs));
    bind_leaf_path(schema, path);
    return path;
}

LeafPath LeafPath::schema_path() const {
    std::vector<PathSegment> segs;
    segs.reserve(segments_.size());
    for (const auto& s : segments_) segs.push_back({s.name, std::nullopt});
    return LeafPath(std::move(segs));
}

std::vector<std::string> LeafPath::names() const {
    std::vector<std::string> out;
    out.reserve(segments_.size());
    for (const auto& s : segments_) out.push_back(s.name);
    return out;
}

std::string LeafPath::to_string() const {
    std::string out;
    for (const auto& s : segments_) out += segment_text(s);
    return out;
}

DataError::DataError(Kind kind, std::string message)
    : std::runtime_error(std::move(message)), kind_(kind) {}

// --- nodes ----------------------------------------------------------------

const Value* ListEntry::key(std::string_view key_leaf) const {
    for (const auto& c : children) {
        if (c.name == key_leaf && c.kind == NodeKind::Leaf) return &c.value;
    }
    return nullptr;
}

bool operator==(const ListEntry& a, const ListEntry& b) { return a.children == b.children; }

DataNode DataNode::leaf(std::string name, Value v, Timestamp ts) {
    DataNode n;
    n.kind = NodeKind::Leaf;
    n.name = std::move(name);
    n.value = std::move(v);
    n.last_updated = ts;
    return n;
}

const DataNode* DataNode::child(std::string_view child_name) const {
    return find_child(children, child_name);
}

// --- DataTree -------------------------------------------------------------

DataTree::DataTree(SchemaPtr schema) : schema_(std::move(schema)) {
    if (!schema_) throw std::invalid_argument("DataTree requires a schema");
}

const DataNode* DataTree::find(const LeafPath& path) const {
    const std::vector<DataNode>* level = &roots_;
    const std::vector<SchemaNode>* schema_level = &schema_->roots;
    const DataNode* node = nullptr;
    for (const auto& seg : path.segments()) {
        if (!level) return nullptr;
        const std::size_t idx = schema_index(*schema_level, seg.name);
        if (idx == schema_level->size()) return nullptr;
        const SchemaNode& sn = (*schema_level)[idx];
        node = find_child(*level, seg.name);
        if (!node) return nullptr;
        schema_level = &sn.children;
        if (node->kind == NodeKind::List) {
            if (!seg.key) return nullptr;
            auto hit = std::find_if(node->entries.begin(), node->entries.end(),
                                    [&](const ListEntry& e) {
                                        const Value* k = e.key(sn.key_leaf);
                                        return k && *k == *seg.key;
                                    });
            if (hit == node->entries.end()) return nullptr;
            level = &hit->children;
        } else if (node->kind == NodeKind::Container) {
            level = &node->children;
        } else {
            level = nullptr;
        }
    }
    return node && (node->kind == NodeKind::Leaf || node->kind == NodeKind::LeafList) ? node
                                                                                      : nullptr;
}

UpdateOutcome DataTree::apply_update(const LeafPath& path, const Value& value, Timestamp ts) {
    const auto nodes = bind_leaf_path(*schema_, path);
    const SchemaNode& leaf_schema = *nodes.back();
    const ValueKind want = leaf_schema.leaf_type()->value_kind;
    if (value.kind() != want) {
        throw DataError(DataError::Kind::TypeMismatch,
                        path.to_string() + ": expected " + std::string(to_string(want)) + ", got " +
                            std::string(to_string(value.kind())));
    }
    if (value.is_str() && value.as_str().size() > kMaxStringBytes) {
        throw DataError(DataError::Kind::TypeMismatch, path.to_string() + ": string too long");
    }
    const std::size_t last = nodes.size() - 1;
    if (is_key_leaf(nodes, last) && *path.segments()[last - 1].key != value) {
        throw DataError(DataError::Kind::TypeMismatch,
                        path.to_string() + ": key leaf value must equal the entry key");
    }

    if (const DataNode* existing = find(path); existing && ts < existing->last_updated) {
        return UpdateOutcome::Dropped;
    }

    std::vector<DataNode>* level = &roots_;
    const std::vector<SchemaNode>* schema_level = &schema_->roots;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const SchemaNode& sn = *nodes[i];
        DataNode& node = child_for(*level, *schema_level, sn);
        if (i == last) {
            if (node.kind == NodeKind::Leaf) {
                node.value = value;
            } else if (std::find(node.values.begin(), node.values.end(), value) ==
                       node.values.end()) {
                node.values.push_back(value);
            }
            node.last_updated = std::max(ts, node.last_updated);
            break;
        }
        if (sn.kind == NodeKind::List) {
            const Value& key = *path.segments()[i].key;
            auto it = std::lower_bound(node.entries.begin(), node.entries.end(), key,
                                       [&](const ListEntry& e, const Value& k) {
                                           const Value* ek = e.key(sn.key_leaf);
                                           return ek && *ek < k;
                                       });
            if (it == node.entries.end() || !it->key(sn.key_leaf) || *it->key(sn.key_leaf) != key) {
                ListEntry entry;
                entry.children.push_back(DataNode::leaf(sn.key_leaf, key, ts));
                it = node.entries.insert(it, std::move(entry));
            }
            level = &it->children;
        } else {
            level = &node.children;
        }
        schema_level = &sn.children;
    }
    return UpdateOutcome::Applied;
}

std::vector<LeafRef> DataTree::leaves() const {
    std::vector<LeafRef> out;
    std::vector<PathSegment> prefix;
    collect(roots_, prefix, &schema_->roots, out);
    return out;
}

std::size_t DataTree::leaf_count() const { return leaves().size(); }

bool operator==(const DataTree& a, const DataTree& b) {
    if (a.schema_ != b.schema_ && *a.schema_ != *b.schema_) return false;
    return a.roots_ == b.roots_;
}

// --- free functions -----------------------------------------------------

std::string_view to_string(Violation::Kind kind) {
    switch (kind) {
        case Violation::Kind::UnknownNode: return "UnknownNode";
        case Violation::Kind::KindMismatch: return "KindMismatch";
        case Violation::Kind::TypeMismatch: return "TypeMismatch";
        case Violation::Kind::DuplicateName: return "DuplicateName";
        case Violation::Kind::DuplicateListKey: return "DuplicateListKey";
        case Violation::Kind::MissingListKey: return "MissingListKey";
        case Violation::Kind::UnorderedList: return "UnorderedList";
        case Violation::Kind::DuplicateLeafListValue: return "DuplicateLeafListValue";
        case Violation::Kind::StringTooLong: return "StringTooLong";
    }
    return "?";
}

std::size_t ValidationReport::count(Violation::Kind kind) const {
    return static_cast<std::size_t>(std::count_if(
        violations.begin(), violations.end(), [&](const Violation& v) { return v.kind == kind; }));
}

ValidationReport validate(const DataTree& tree) {
    Validator v;
    v.children(tree.roots(), tree.schema().roots, "");
    return std::move(v.report);
}

std::vector<LeafPath> diff(const DataTree& a, const DataTree& b) {
    if (a.schema_ptr() != b.schema_ptr() && a.schema() != b.schema()) {
        throw DataError(DataError::Kind::SchemaMismatch, "trees bound to different schemas");
    }
    std::map<LeafPath, const DataNode*> left;
    for (auto& ref : a.leaves()) left.emplace(std::move(ref.path), ref.node);
    std::vector<LeafPath> out;
    for (auto& ref : b.leaves()) {
        auto it = left.find(ref.path);
        if (it == left.end()) {
            out.push_back(std::move(ref.path));
            continue;
        }
        const DataNode& x = *it->second;
        const DataNode& y = *ref.node;
        const bool same = x.kind == y.kind &&
                          (x.kind == NodeKind::Leaf ? x.value == y.value : x.values == y.values);
        if (!same) out.push_back(ref.path);
        left.erase(it);
    }
    for (auto& [path, _] : left) out.push_back(path);
    std::sort(out.begin(), out.end());
    return out;
}

std::string serialize(const DataTree& tree) {
    std::string out;
    write_object(tree.roots(), tree.schema().roots, out);
    return out;
}

DataTree parse_instance(SchemaPtr schema, std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw DataError(DataError::Kind::Parse, e.what());
    }
    DataTree tree(schema);
    tree.mutable_roots() = object_from_json(j, schema->roots, "");
    return tree;
}

DataTree load_instance_file(SchemaPtr schema, const std::string& file) {
    return parse_instance(std::move(schema), read_file(file));
}

}  // namespace yada
