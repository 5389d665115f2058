#include "serpmine/html.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_map>
#include <unordered_set>

namespace serpmine::html {

namespace {

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    }
    return true;
}

std::string lower_copy(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

const std::unordered_set<std::string>& void_elements() {
    static const std::unordered_set<std::string> v = {
        "area", "base", "br",    "col",   "embed",  "hr",    "img",
        "input", "link", "meta", "param", "source", "track", "wbr"};
    return v;
}

// Tags that implicitly close an open element with the same name.
const std::unordered_set<std::string>& self_nesting_closers() {
    static const std::unordered_set<std::string> v = {"li", "option", "tr", "td", "th", "dt",
                                                      "dd"};
    return v;
}

// Block-level openers that implicitly close an open <p>.
const std::unordered_set<std::string>& p_closers() {
    static const std::unordered_set<std::string> v = {
        "p",  "div", "ul",    "ol",      "li",    "table", "section", "article", "aside",
        "h1", "h2",  "h3",    "h4",      "h5",    "h6",    "nav",     "header",  "footer",
        "form", "figure", "blockquote", "pre"};
    return v;
}

struct TreeBuilder {
    std::string_view src;
    size_t pos = 0;
    std::unique_ptr<Node> doc;
    std::vector<Node*> stack;  // open elements, doc at bottom

    explicit TreeBuilder(std::string_view markup) : src(markup) {
        doc = std::make_unique<Node>();
        doc->kind = Node::Kind::Document;
        stack.push_back(doc.get());
    }

    Node* top() { return stack.back(); }

    Node* append_child(Node::Kind kind) {
        auto node = std::make_unique<Node>();
        node->kind = kind;
        node->parent = top();
        Node* raw = node.get();
        top()->children.push_back(std::move(node));
        return raw;
    }

    void append_text(std::string_view raw, size_t offset) {
        if (raw.empty()) return;
        Node* n = append_child(Node::Kind::Text);
        n->text = decode_entities(raw);
        n->source_offset = offset;
    }

    void run() {
        size_t text_start = 0;
        while (pos < src.size()) {
            if (src[pos] != '<') {
                ++pos;
                continue;
            }
            // A '<' not starting a plausible tag is literal text.
            if (pos + 1 >= src.size()) break;
            const char next = src[pos + 1];
            const bool tag_like = std::isalpha(static_cast<unsigned char>(next)) || next == '/' ||
                                  next == '!' || next == '?';
            if (!tag_like) {
                ++pos;
                continue;
            }
            append_text(src.substr(text_start, pos - text_start), text_start);
            if (next == '!' || next == '?') {
                skip_markup_declaration();
            } else if (next == '/') {
                handle_close_tag();
            } else {
                handle_open_tag();
            }
            text_start = pos;
        }
        append_text(src.substr(text_start), text_start);
    }

    void skip_markup_declaration() {
        if (src.compare(pos, 4, "<!--") == 0) {
            size_t end = src.find("-->", pos + 4);
            pos = (end == std::string_view::npos) ? src.size() : end + 3;
            return;
        }
        size_t end = src.find('>', pos);
        pos = (end == std::string_view::npos) ? src.size() : end + 1;
    }

    std::string read_name() {
        size_t start = pos;
        while (pos < src.size()) {
            const char c = src[pos];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == ':')
                ++pos;
            else
                break;
        }
        return lower_copy(src.substr(start, pos - start));
    }

    void skip_ws() {
        while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    }

    void handle_close_tag() {
        pos += 2;  // "</"
        const std::string name = read_name();
        size_t end = src.find('>', pos);
        pos = (end == std::string_view::npos) ? src.size() : end + 1;
        if (name.empty()) return;
        // Pop to the matching open element; ignore stray close tags.
        for (size_t i = stack.size(); i-- > 1;) {
            if (stack[i]->tag == name) {
                stack.resize(i);
                return;
            }
        }
    }

    void implicit_closes(const std::string& tag) {
        if (self_nesting_closers().count(tag)) {
            if (top()->is_element() && top()->tag == tag) stack.pop_back();
            // new row closes any open cell as well
            if (tag == "tr" && top()->is_element() &&
                (top()->tag == "td" || top()->tag == "th"))
                stack.pop_back();
        }
        if (p_closers().count(tag) && top()->is_element() && top()->tag == "p") stack.pop_back();
    }

    void handle_open_tag() {
        const size_t tag_offset = pos;
        ++pos;  // '<'
        const std::string name = read_name();
        std::vector<std::pair<std::string, std::string>> attrs;
        bool self_closing = false;
        while (pos < src.size()) {
            skip_ws();
            if (pos >= src.size()) break;
            if (src[pos] == '>') {
                ++pos;
                break;
            }
            if (src[pos] == '/') {
                ++pos;
                if (pos < src.size() && src[pos] == '>') {
                    ++pos;
                    self_closing = true;
                    break;
                }
                continue;
            }
            std::string attr_name = read_name();
            if (attr_name.empty()) {
                ++pos;  // unparseable byte inside the tag
                continue;
            }
            skip_ws();
            std::string value;
            if (pos < src.size() && src[pos] == '=') {
                ++pos;
                skip_ws();
                if (pos < src.size() && (src[pos] == '"' || src[pos] == '\'')) {
                    const char quote = src[pos++];
                    size_t vstart = pos;
                    while (pos < src.size() && src[pos] != quote) ++pos;
                    value = decode_entities(src.substr(vstart, pos - vstart));
                    if (pos < src.size()) ++pos;
                } else {
                    size_t vstart = pos;
                    while (pos < src.size() && !std::isspace(static_cast<unsigned char>(src[pos])) &&
                           src[pos] != '>')
                        ++pos;
                    value = decode_entities(src.substr(vstart, pos - vstart));
                }
            }
            attrs.emplace_back(std::move(attr_name), std::move(value));
        }

        if (name.empty()) return;
        implicit_closes(name);

        Node* el = append_child(Node::Kind::Element);
        el->tag = name;
        el->attrs = std::move(attrs);
        el->source_offset = tag_offset;

        if (name == "script" || name == "style") {
            consume_raw_text(el, name);
            return;
        }
        if (!self_closing && !void_elements().count(name)) stack.push_back(el);
    }

    // script/style content is raw text up to the matching close tag.
    void consume_raw_text(Node* el, const std::string& name) {
        const size_t content_start = pos;
        size_t search = pos;
        while (search < src.size()) {
            size_t lt = src.find("</", search);
            if (lt == std::string_view::npos) {
                search = src.size();
                break;
            }
            if (iequals(src.substr(lt + 2, name.size()), name)) {
                // raw text ends here
                if (lt > content_start) {
                    auto node = std::make_unique<Node>();
                    node->kind = Node::Kind::Text;
                    node->text = std::string(src.substr(content_start, lt - content_start));
                    node->parent = el;
                    node->source_offset = content_start;
                    el->children.push_back(std::move(node));
                }
                size_t end = src.find('>', lt);
                pos = (end == std::string_view::npos) ? src.size() : end + 1;
                return;
            }
            search = lt + 2;
        }
        pos = src.size();
    }
};

}  // namespace

const std::string* Node::attr(std::string_view name) const {
    for (const auto& [k, v] : attrs) {
        if (k == name) return &v;
    }
    return nullptr;
}

bool Node::has_class(std::string_view cls) const {
    const std::string* v = attr("class");
    if (!v) return false;
    size_t i = 0;
    while (i < v->size()) {
        while (i < v->size() && std::isspace(static_cast<unsigned char>((*v)[i]))) ++i;
        size_t start = i;
        while (i < v->size() && !std::isspace(static_cast<unsigned char>((*v)[i]))) ++i;
        if (std::string_view(*v).substr(start, i - start) == cls) return true;
    }
    return false;
}

std::unique_ptr<Node> parse(std::string_view markup) {
    TreeBuilder builder(markup);
    builder.run();
    return std::move(builder.doc);
}

std::string decode_entities(std::string_view s) {
    static const std::unordered_map<std::string, std::string> named = {
        {"amp", "&"},  {"lt", "<"},    {"gt", ">"},   {"quot", "\""},
        {"apos", "'"}, {"nbsp", " "},  {"#39", "'"},
    };
    std::string out;
    out.reserve(s.size());
    size_t i = 0;
    while (i < s.size()) {
        if (s[i] != '&') {
            out.push_back(s[i++]);
            continue;
        }
        size_t semi = s.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 10) {
            out.push_back(s[i++]);
            continue;
        }
        std::string_view body = s.substr(i + 1, semi - i - 1);
        auto it = named.find(std::string(body));
        if (it != named.end()) {
            out += it->second;
            i = semi + 1;
            continue;
        }
        if (!body.empty() && body[0] == '#') {
            long code = 0;
            bool ok = false;
            if (body.size() > 1 && (body[1] == 'x' || body[1] == 'X')) {
                ok = body.size() > 2;
                for (size_t k = 2; k < body.size() && ok; ++k) {
                    if (!std::isxdigit(static_cast<unsigned char>(body[k]))) ok = false;
                }
                if (ok) code = std::stol(std::string(body.substr(2)), nullptr, 16);
            } else {
                ok = body.size() > 1;
                for (size_t k = 1; k < body.size() && ok; ++k) {
                    if (!std::isdigit(static_cast<unsigned char>(body[k]))) ok = false;
                }
                if (ok) code = std::stol(std::string(body.substr(1)), nullptr, 10);
            }
            if (ok && code > 0 && code < 0x110000) {
                // UTF-8 encode
                unsigned cp = static_cast<unsigned>(code);
                if (cp < 0x80) {
                    out.push_back(static_cast<char>(cp));
                } else if (cp < 0x800) {
                    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
                    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
                } else if (cp < 0x10000) {
                    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
                    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
                    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
                } else {
                    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
                    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
                    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
                    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
                }
                i = semi + 1;
                continue;
            }
        }
        out.push_back(s[i++]);
    }
    return out;
}

namespace {

void collect_text(const Node& node, std::string& out) {
    if (node.kind == Node::Kind::Text) {
        out += node.text;
        return;
    }
    for (const auto& child : node.children) collect_text(*child, out);
}

}  // namespace

std::string text_content(const Node& node) {
    std::string raw;
    collect_text(node, raw);
    std::string out;
    out.reserve(raw.size());
    bool in_ws = false;
    for (char c : raw) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            in_ws = true;
            continue;
        }
        if (in_ws && !out.empty()) out.push_back(' ');
        in_ws = false;
        out.push_back(c);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Selector engine

Selector Selector::parse(std::string_view css) {
    Selector sel;
    sel.text_ = std::string(css);

    size_t i = 0;
    auto skip_ws = [&] {
        while (i < css.size() && std::isspace(static_cast<unsigned char>(css[i]))) ++i;
    };
    auto read_ident = [&]() -> std::string {
        size_t start = i;
        while (i < css.size()) {
            const char c = css[i];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_')
                ++i;
            else
                break;
        }
        return std::string(css.substr(start, i - start));
    };

    auto parse_compound = [&]() -> Compound {
        Compound comp;
        if (i < css.size() && css[i] == '*') {
            ++i;
        } else if (i < css.size() &&
                   (std::isalnum(static_cast<unsigned char>(css[i])) || css[i] == '_')) {
            SimplePart p;
            p.kind = SimplePart::Kind::Tag;
            p.name = lower_copy(read_ident());
            if (p.name.empty()) throw SelectorError("expected tag name in selector: " + sel.text_);
            comp.parts.push_back(std::move(p));
        }
        while (i < css.size()) {
            const char c = css[i];
            if (c == '.') {
                ++i;
                SimplePart p;
                p.kind = SimplePart::Kind::Class;
                p.name = read_ident();
                if (p.name.empty()) throw SelectorError("empty class in selector: " + sel.text_);
                comp.parts.push_back(std::move(p));
            } else if (c == '#') {
                ++i;
                SimplePart p;
                p.kind = SimplePart::Kind::Id;
                p.name = read_ident();
                if (p.name.empty()) throw SelectorError("empty id in selector: " + sel.text_);
                comp.parts.push_back(std::move(p));
            } else if (c == '[') {
                ++i;
                skip_ws();
                SimplePart p;
                p.name = lower_copy(read_ident());
                if (p.name.empty())
                    throw SelectorError("empty attribute name in selector: " + sel.text_);
                skip_ws();
                if (i < css.size() && css[i] == ']') {
                    ++i;
                    p.kind = SimplePart::Kind::AttrPresent;
                } else {
                    if (i < css.size() && css[i] == '~' && i + 1 < css.size() &&
                        css[i + 1] == '=') {
                        p.kind = SimplePart::Kind::AttrWord;
                        i += 2;
                    } else if (i < css.size() && css[i] == '=') {
                        p.kind = SimplePart::Kind::AttrEquals;
                        ++i;
                    } else {
                        throw SelectorError("bad attribute selector in: " + sel.text_);
                    }
                    skip_ws();
                    if (i < css.size() && (css[i] == '"' || css[i] == '\'')) {
                        const char quote = css[i++];
                        size_t start = i;
                        while (i < css.size() && css[i] != quote) ++i;
                        if (i >= css.size())
                            throw SelectorError("unterminated attribute value in: " + sel.text_);
                        p.value = std::string(css.substr(start, i - start));
                        ++i;
                    } else {
                        size_t start = i;
                        while (i < css.size() && css[i] != ']' &&
                               !std::isspace(static_cast<unsigned char>(css[i])))
                            ++i;
                        p.value = std::string(css.substr(start, i - start));
                    }
                    skip_ws();
                    if (i >= css.size() || css[i] != ']')
                        throw SelectorError("unterminated attribute selector in: " + sel.text_);
                    ++i;
                }
                comp.parts.push_back(std::move(p));
            } else {
                break;
            }
        }
        return comp;
    };

    auto starts_compound = [&]() {
        if (i >= css.size()) return false;
        const char c = css[i];
        return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '*' ||
               c == '.' || c == '#' || c == '[';
    };

    while (true) {
        skip_ws();
        std::vector<Compound> chain;
        while (i < css.size() && css[i] != ',') {
            if (!starts_compound())
                throw SelectorError("expected a compound selector in: " + sel.text_);
            chain.push_back(parse_compound());
            // trailing combinator?
            size_t before = i;
            skip_ws();
            if (i < css.size() && css[i] == '>') {
                chain.back().combinator = Compound::Combinator::Child;
                ++i;
                skip_ws();
                if (i >= css.size() || css[i] == ',')
                    throw SelectorError("dangling '>' in selector: " + sel.text_);
            } else if (i < css.size() && css[i] != ',' && before != i) {
                chain.back().combinator = Compound::Combinator::Descendant;
            } else {
                break;
            }
        }
        if (chain.empty()) throw SelectorError("empty selector: " + sel.text_);
        sel.alternatives_.push_back(std::move(chain));
        skip_ws();
        if (i >= css.size()) break;
        if (css[i] == ',') {
            ++i;
            continue;
        }
        throw SelectorError("trailing garbage in selector: " + sel.text_);
    }
    return sel;
}

bool Selector::compound_matches(const Compound& c, const Node& e) {
    if (!e.is_element()) return false;
    for (const auto& p : c.parts) {
        switch (p.kind) {
            case SimplePart::Kind::Tag:
                if (e.tag != p.name) return false;
                break;
            case SimplePart::Kind::Class:
                if (!e.has_class(p.name)) return false;
                break;
            case SimplePart::Kind::Id: {
                const std::string* id = e.attr("id");
                if (!id || *id != p.name) return false;
                break;
            }
            case SimplePart::Kind::AttrPresent:
                if (!e.attr(p.name)) return false;
                break;
            case SimplePart::Kind::AttrEquals: {
                const std::string* v = e.attr(p.name);
                if (!v || *v != p.value) return false;
                break;
            }
            case SimplePart::Kind::AttrWord: {
                const std::string* v = e.attr(p.name);
                if (!v) return false;
                bool found = false;
                size_t i = 0;
                while (i < v->size() && !found) {
                    while (i < v->size() && std::isspace(static_cast<unsigned char>((*v)[i]))) ++i;
                    size_t start = i;
                    while (i < v->size() && !std::isspace(static_cast<unsigned char>((*v)[i]))) ++i;
                    if (std::string_view(*v).substr(start, i - start) == p.value) found = true;
                }
                if (!found) return false;
                break;
            }
        }
    }
    return true;
}

bool Selector::complex_matches(const std::vector<Compound>& chain, const Node& e) {
    // match right-to-left with backtracking over descendant combinators
    struct Walker {
        static bool run(const std::vector<Compound>& chain, size_t idx, const Node& e) {
            if (!compound_matches(chain[idx], e)) return false;
            if (idx == 0) return true;
            const auto comb = chain[idx - 1].combinator;
            const Node* p = e.parent;
            if (comb == Compound::Combinator::Child) {
                return p && p->is_element() && run(chain, idx - 1, *p);
            }
            while (p && p->is_element()) {
                if (run(chain, idx - 1, *p)) return true;
                p = p->parent;
            }
            return false;
        }
    };
    return Walker::run(chain, chain.size() - 1, e);
}

bool Selector::matches(const Node& element) const {
    for (const auto& chain : alternatives_) {
        if (complex_matches(chain, element)) return true;
    }
    return false;
}

std::vector<const Node*> Selector::select_all(const Node& root) const {
    // descendants of root only, in document (pre-)order
    std::vector<const Node*> out;
    struct Dfs {
        const Selector& sel;
        std::vector<const Node*>& out;
        void visit(const Node& n) {
            if (n.is_element() && sel.matches(n)) out.push_back(&n);
            for (const auto& child : n.children) visit(*child);
        }
    } dfs{*this, out};
    for (const auto& child : root.children) dfs.visit(*child);
    return out;
}

}  // namespace serpmine::html
