#include "yada/schema.hpp"

#include <array>
#include <cctype>
#include <unordered_set>

#include "yada/io.hpp"

namespace yada {

namespace {

constexpr std::array<LeafType, 4> kRegistry{{
    {"air-sensor", ValueKind::Num, ""},
    {"decimal", ValueKind::Num, ""},
    {"string", ValueKind::Str, ""},
    {"boolean", ValueKind::Bool, ""},
}};

constexpr std::array<std::string_view, 8> kKeywords{
    "module", "container", "list", "key", "leaf", "leaf-list", "type", "description"};

bool is_keyword(std::string_view word) {
    for (auto k : kKeywords) {
        if (k == word) return true;
    }
    return false;
}

bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' ||
           c == ':';
}

enum class Tok { Ident, String, LBrace, RBrace, Semi, End };

struct Token {
    Tok kind;
    std::string text;
    std::size_t offset;
};

std::string_view describe(Tok t) {
    switch (t) {
        case Tok::Ident: return "identifier";
        case Tok::String: return "string";
        case Tok::LBrace: return "'{'";
        case Tok::RBrace: return "'}'";
        case Tok::Semi: return "';'";
        case Tok::End: return "end of input";
    }
    return "?";
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        skip_space();
        const std::size_t start = pos_;
        if (pos_ >= src_.size()) return {Tok::End, {}, start};
        const char c = src_[pos_];
        switch (c) {
            case '{': ++pos_; return {Tok::LBrace, "{", start};
            case '}': ++pos_; return {Tok::RBrace, "}", start};
            case ';': ++pos_; return {Tok::Semi, ";", start};
            case '"': return string_literal();
            default: break;
        }
        if (is_ident_start(c)) {
            while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
            return {Tok::Ident, std::string(src_.substr(start, pos_ - start)), start};
        }
        throw SchemaError(SchemaError::Kind::Syntax,
                          "unexpected character '" + std::string(1, c) + "'", start);
    }

private:
    void skip_space() {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else if (src_.substr(pos_, 2) == "//") {
                while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
            } else if (src_.substr(pos_, 2) == "/*") {
                const auto close = src_.find("*/", pos_ + 2);
                if (close == std::string_view::npos) {
                    throw SchemaError(SchemaError::Kind::Syntax, "unterminated comment", pos_);
                }
                pos_ = close + 2;
            } else {
                break;
            }
        }
    }

    Token string_literal() {
        const std::size_t start = pos_++;
        std::string out;
        while (pos_ < src_.size()) {
            const char c = src_[pos_++];
            if (c == '"') return {Tok::String, std::move(out), start};
            if (c == '\\') {
                if (pos_ >= src_.size()) break;
                const char e = src_[pos_++];
                switch (e) {
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    case '"': out += '"'; break;
                    case '\\': out += '\\'; break;
                    default:
                        throw SchemaError(SchemaError::Kind::Syntax,
                                          "unknown escape '\\" + std::string(1, e) + "'", pos_ - 2);
                }
            } else {
                out += c;
            }
        }
        throw SchemaError(SchemaError::Kind::Syntax, "unterminated string", start);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

class Parser {
public:
    explicit Parser(std::string_view src) : lex_(src) { advance(); }

    SchemaModule module() {
        expect_keyword("module");
        SchemaModule m;
        m.name = expect(Tok::Ident).text;
        expect(Tok::LBrace);
        std::unordered_set<std::string> names;
        while (cur_.kind != Tok::RBrace) {
            const Token kw = expect(Tok::Ident);
            if (kw.text != "container") {
                syntax_at(kw, is_keyword(kw.text)
                                  ? "'" + kw.text + "' not allowed at module level; expected 'container'"
                                  : "unknown statement '" + kw.text + "'");
            }
            SchemaNode node = body_node(NodeKind::Container, m.name);
            if (!names.insert(node.name).second) {
                throw SchemaError(SchemaError::Kind::DuplicateName,
                                  "duplicate name '" + node.name + "'", kw.offset,
                                  m.name + "/" + node.name);
            }
            m.roots.push_back(std::move(node));
        }
        expect(Tok::RBrace);
        expect(Tok::End);
        return m;
    }

private:
    // Parses `NAME { ... }` after a container/list/leaf/leaf-list keyword.
    SchemaNode body_node(NodeKind kind, const std::string& parent_path) {
        SchemaNode node;
        node.kind = kind;
        const Token name = expect(Tok::Ident);
        node.name = name.text;
        const std::string path = parent_path + "/" + node.name;
        expect(Tok::LBrace);

        std::unordered_set<std::string> child_names;
        bool saw_key = false;
        bool saw_type = false;
        while (cur_.kind != Tok::RBrace) {
            const Token kw = expect(Tok::Ident);
            const std::string& word = kw.text;
            if (word == "description") {
                if (node.description) syntax_at(kw, "duplicate description");
                node.description = expect(Tok::String).text;
                expect(Tok::Semi);
            } else if (word == "key" && kind == NodeKind::List) {
                if (saw_key) syntax_at(kw, "duplicate key");
                if (cur_.kind != Tok::String && cur_.kind != Tok::Ident) {
                    syntax_at(cur_, "expected key name");
                }
                node.key_leaf = cur_.text;
                advance();
                expect(Tok::Semi);
                saw_key = true;
            } else if (word == "type" && node.is_leafy()) {
                if (saw_type) syntax_at(kw, "duplicate type");
                const Token type = expect(Tok::Ident);
                if (!find_leaf_type(type.text)) {
                    throw SchemaError(SchemaError::Kind::UnknownType,
                                      "unknown type '" + type.text + "'", type.offset, path);
                }
                node.type_name = type.text;
                expect(Tok::Semi);
                saw_type = true;
            } else if (!node.is_leafy() && (word == "container" || word == "list" ||
                                            word == "leaf" || word == "leaf-list")) {
                const NodeKind child_kind = word == "container" ? NodeKind::Container
                                            : word == "list"    ? NodeKind::List
                                            : word == "leaf"    ? NodeKind::Leaf
                                                                : NodeKind::LeafList;
                SchemaNode child = body_node(child_kind, path);
                if (!child_names.insert(child.name).second) {
                    throw SchemaError(SchemaError::Kind::DuplicateName,
                                      "duplicate name '" + child.name + "'", kw.offset,
                                      path + "/" + child.name);
                }
                node.children.push_back(std::move(child));
            } else if (is_keyword(word)) {
                syntax_at(kw, "'" + word + "' not allowed in " + std::string(to_string(kind)));
            } else {
                syntax_at(kw, "unknown statement '" + word + "'");
            }
        }
        const Token close = expect(Tok::RBrace);

        if (node.is_leafy() && !saw_type) {
            syntax_at(close, std::string(to_string(kind)) + " '" + node.name + "' requires a type");
        }
        if (kind == NodeKind::List) {
            if (!saw_key) {
                throw SchemaError(SchemaError::Kind::BadKey, "list has no key statement",
                                  name.offset, path);
            }
            const SchemaNode* key = node.child(node.key_leaf);
            if (!key || key->kind != NodeKind::Leaf) {
                throw SchemaError(SchemaError::Kind::BadKey,
                                  "key '" + node.key_leaf + "' names no direct leaf child",
                                  name.offset, path);
            }
        }
        return node;
    }

    void advance() { cur_ = lex_.next(); }

    Token expect(Tok kind) {
        if (cur_.kind != kind) {
            syntax_at(cur_, "expected " + std::string(describe(kind)) + ", found " +
                                (cur_.kind == Tok::End ? std::string("end of input")
                                                       : "'" + cur_.text + "'"));
        }
        Token t = cur_;
        advance();
        return t;
    }

    void expect_keyword(std::string_view word) {
        if (cur_.kind != Tok::Ident || cur_.text != word) {
            syntax_at(cur_, "expected '" + std::string(word) + "'");
        }
        advance();
    }

    [[noreturn]] static void syntax_at(const Token& t, const std::string& msg) {
        throw SchemaError(SchemaError::Kind::Syntax, msg, t.offset);
    }

    Lexer lex_;
    Token cur_{Tok::End, {}, 0};
};

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    out += '"';
    return out;
}

std::string_view keyword_of(NodeKind kind) {
    switch (kind) {
        case NodeKind::Container: return "container";
        case NodeKind::List: return "list";
        case NodeKind::Leaf: return "leaf";
        case NodeKind::LeafList: return "leaf-list";
    }
    return "?";
}

void print_node(const SchemaNode& node, int depth, std::string& out) {
    const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
    const std::string inner(static_cast<std::size_t>(depth + 1) * 2, ' ');
    out += pad;
    out += keyword_of(node.kind);
    out += ' ';
    out += node.name;
    out += " {\n";
    if (node.description) out += inner + "description " + quote(*node.description) + ";\n";
    if (node.kind == NodeKind::List) out += inner + "key " + quote(node.key_leaf) + ";\n";
    if (node.is_leafy()) out += inner + "type " + node.type_name + ";\n";
    for (const auto& child : node.children) print_node(child, depth + 1, out);
    out += pad + "}\n";
}

void collect_leaves(const SchemaNode& node, std::vector<std::string>& prefix,
                    std::vector<std::vector<std::string>>& out) {
    prefix.push_back(node.name);
    if (node.is_leafy()) {
        out.push_back(prefix);
    } else {
        for (const auto& child : node.children) collect_leaves(child, prefix, out);
    }
    prefix.pop_back();
}

}  // namespace

std::string_view to_string(NodeKind kind) {
    switch (kind) {
        case NodeKind::Container: return "container";
        case NodeKind::List: return "list";
        case NodeKind::Leaf: return "leaf";
        case NodeKind::LeafList: return "leaf-list";
    }
    return "?";
}

std::span<const LeafType> leaf_type_registry() { return kRegistry; }

const LeafType* find_leaf_type(std::string_view name) {
    for (const auto& t : kRegistry) {
        if (t.name == name) return &t;
    }
    return nullptr;
}

const SchemaNode* SchemaNode::child(std::string_view child_name) const {
    for (const auto& c : children) {
        if (c.name == child_name) return &c;
    }
    return nullptr;
}

const LeafType* SchemaNode::leaf_type() const {
    return is_leafy() ? find_leaf_type(type_name) : nullptr;
}

const SchemaNode* SchemaModule::root(std::string_view root_name) const {
    for (const auto& r : roots) {
        if (r.name == root_name) return &r;
    }
    return nullptr;
}

SchemaError::SchemaError(Kind kind, std::string message, std::size_t offset, std::string path,
                         std::size_t segment)
    : std::runtime_error(
          path.empty() ? message + " (offset " + std::to_string(offset) + ")"
                       : message + " at " + path),
      kind_(kind),
      offset_(offset),
      path_(std::move(path)),
      segment_(segment) {}

SchemaModule parse_schema(std::string_view text) { return Parser(text).module(); }

std::string print_schema(const SchemaModule& module) {
    std::string out = "module " + module.name + " {\n";
    for (const auto& root : module.roots) print_node(root, 1, out);
    out += "}\n";
    return out;
}

const SchemaNode& resolve(const SchemaModule& module, std::span<const std::string> segments) {
    if (segments.empty()) {
        throw SchemaError(SchemaError::Kind::NotFound, "empty path", 0, {}, 0);
    }
    const SchemaNode* node = module.root(segments[0]);
    std::string path = module.name;
    for (std::size_t i = 0;; ++i) {
        path += "/" + segments[i];
        if (!node) {
            throw SchemaError(SchemaError::Kind::NotFound,
                              "no node '" + segments[i] + "' (segment " + std::to_string(i) + ")",
                              0, path, i);
        }
        if (i + 1 == segments.size()) return *node;
        node = node->child(segments[i + 1]);
    }
}

std::vector<std::vector<std::string>> leaf_name_paths(const SchemaModule& module) {
    std::vector<std::vector<std::string>> out;
    std::vector<std::string> prefix;
    for (const auto& root : module.roots) collect_leaves(root, prefix, out);
    return out;
}

SchemaModule load_schema_file(const std::string& file) { return parse_schema(read_file(file)); }

}  // namespace yada
