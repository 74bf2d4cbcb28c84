#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pageguard::html {

// Minimal tolerant HTML scanner. Every element remembers its byte span in
// the source string, so callers can insert or delete markup by splicing the
// original bytes instead of re-serializing (re-serialization could not
// guarantee byte preservation of untouched content).
struct Node {
  enum class Kind { kElement, kText, kComment, kDoctype };

  Kind kind = Kind::kText;
  std::string tag;  // lowercase; empty for non-elements
  std::vector<std::pair<std::string, std::string>> attrs;
  std::string text;  // raw source slice for text/comment/doctype nodes
  std::vector<Node> children;

  std::size_t src_begin = 0;    // offset of '<' (or first text byte)
  std::size_t src_end = 0;      // one past '>' of the close tag (or text end)
  std::size_t inner_begin = 0;  // just after the open tag
  std::size_t inner_end = 0;    // at '<' of the close tag

  const std::string* attr(std::string_view name) const;
  bool has_attr(std::string_view name) const;
  bool is_element(std::string_view tag_name) const;
};

struct Document {
  std::vector<Node> roots;
};

// Throws MalformedPageHtml on unterminated tags/comments/quotes.
Document parse(const std::string& source);

using NodePredicate = std::function<bool(const Node&)>;

// Pre-order traversal over elements only.
void for_each_element(const Document& doc,
                      const std::function<void(const Node&, const Node*)>& fn);
const Node* find_element(const Document& doc, const NodePredicate& pred);
std::vector<const Node*> find_elements(const Document& doc,
                                       const NodePredicate& pred);
const Node* find_by_attr(const Document& doc, std::string_view name,
                         std::string_view value);

// True when inline style hides the element or it is aria-hidden.
bool is_hidden_element(const Node& node);

// Reader-visible text: skips head/script/style/comments and hidden elements,
// unescapes common entities, collapses whitespace.
std::string visible_text(const Document& doc);
std::string visible_text_excluding(const Document& doc,
                                   const NodePredicate& excluded);
std::string visible_text_of(const Node& node);

// Every text byte under the node, entities unescaped, hidden or not — the
// "what a model reads in the markup" view.
std::string raw_text_of(const Node& node);

std::vector<std::string> tokenize_text(const std::string& text);

std::string escape_text(std::string_view raw);
std::string escape_attr(std::string_view raw);
std::string unescape_entities(std::string_view raw);

// Splicing primitives over the original source bytes.
std::string insert_at(const std::string& source, std::size_t offset,
                      const std::string& markup);
std::string remove_ranges(const std::string& source,
                          std::vector<std::pair<std::size_t, std::size_t>> ranges);

}  // namespace pageguard::html
