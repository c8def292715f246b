#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace a11yrev::html {

// Forgiving DOM: unclosed tags are closed implicitly, stray end tags are
// ignored, script/style bodies are dropped.
struct Node {
  enum class Kind { Element, Text };

  Kind kind = Kind::Element;
  std::string tag;  // lowercase; empty for the document root
  std::string id;
  std::vector<std::string> classes;
  std::string text;  // text nodes only, entities decoded
  std::size_t parent = 0;
  std::vector<std::size_t> children;
};

class Document {
 public:
  static Document parse(std::string_view markup);

  const Node& node(std::size_t index) const { return nodes_[index]; }
  std::size_t root() const noexcept { return 0; }
  std::size_t size() const noexcept { return nodes_.size(); }

  // Descendant text with whitespace runs collapsed and the ends trimmed.
  std::string text_content(std::size_t index) const;

 private:
  std::vector<Node> nodes_;
};

// Selectors: compounds of tag, .class and #id joined by descendant
// combinators (whitespace), e.g. "div.review ul li".
class Selector {
 public:
  static Selector parse(std::string_view text);

  // Element descendants of `scope` (document order) matching the selector;
  // ancestors above `scope` do not count.
  std::vector<std::size_t> select(const Document& doc, std::size_t scope) const;

 private:
  struct Compound {
    std::string tag;
    std::string id;
    std::vector<std::string> classes;
  };

  bool matches(const Document& doc, std::size_t element, std::size_t scope) const;
  static bool matches_compound(const Node& node, const Compound& compound);

  std::vector<Compound> compounds_;
};

std::string decode_entities(std::string_view text);

}  // namespace a11yrev::html
