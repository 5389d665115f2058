#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "serpmine/errors.hpp"

namespace serpmine::html {

// A node in the recovered document tree. The builder is forgiving in the
// browser sense: unclosed and misnested tags never fail, they just close
// implicitly. Comments and doctypes are dropped.
struct Node {
    enum class Kind { Document, Element, Text };

    Kind kind = Kind::Document;
    std::string tag;  // lowercase, elements only
    std::vector<std::pair<std::string, std::string>> attrs;
    std::string text;  // text nodes only, entities decoded
    std::vector<std::unique_ptr<Node>> children;
    Node* parent = nullptr;
    size_t source_offset = 0;  // offset of '<' of the open tag

    bool is_element() const { return kind == Kind::Element; }
    const std::string* attr(std::string_view name) const;
    bool has_class(std::string_view cls) const;
};

// Builds a tree from arbitrary markup. Never throws; any byte sequence
// yields a tree.
std::unique_ptr<Node> parse(std::string_view markup);

// Concatenated text of all descendant text nodes with whitespace runs
// collapsed to single spaces and ends trimmed.
std::string text_content(const Node& node);

// Decodes the common named entities plus numeric character references.
std::string decode_entities(std::string_view s);

// Supported selector grammar:
//   group      = complex ("," complex)*
//   complex    = compound ((" " | ">") compound)*
//   compound   = (tag | "*")? simple*
//   simple     = "." class | "#" id | "[" name (("=" | "~=") value)? "]"
// Attribute values may be bare or quoted.
class Selector {
public:
    // Throws SelectorError on empty or unparseable selector text.
    static Selector parse(std::string_view css);

    // Whether the element matches (considering required ancestry).
    bool matches(const Node& element) const;

    // All matching elements under root in document order.
    std::vector<const Node*> select_all(const Node& root) const;

    const std::string& text() const { return text_; }

private:
    struct SimplePart {
        enum class Kind { Tag, Class, Id, AttrPresent, AttrEquals, AttrWord };
        Kind kind;
        std::string name;   // tag, class, id, or attribute name
        std::string value;  // attribute value for AttrEquals / AttrWord
    };
    struct Compound {
        std::vector<SimplePart> parts;
        // Relation of this compound to the one on its right.
        enum class Combinator { None, Descendant, Child } combinator = Combinator::None;
    };

    static bool compound_matches(const Compound& c, const Node& e);
    // complex selector stored left-to-right; matching walks right-to-left
    static bool complex_matches(const std::vector<Compound>& chain, const Node& e);

    std::vector<std::vector<Compound>> alternatives_;
    std::string text_;
};

}  // namespace serpmine::html
