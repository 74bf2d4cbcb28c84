#include "pageguard/html.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "pageguard/errors.hpp"

namespace pageguard::html {

namespace {

bool is_void_tag(std::string_view tag) {
  static constexpr std::array<std::string_view, 14> kVoid = {
      "area", "base",  "br",    "col",  "embed",  "hr",    "img",
      "input", "link", "meta",  "param", "source", "track", "wbr"};
  return std::find(kVoid.begin(), kVoid.end(), tag) != kVoid.end();
}

bool is_raw_text_tag(std::string_view tag) {
  return tag == "script" || tag == "style";
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ||
         c == ':';
}

struct Parser {
  const std::string& src;
  std::size_t pos = 0;

  explicit Parser(const std::string& s) : src(s) {}

  bool eof() const { return pos >= src.size(); }
  char peek() const { return src[pos]; }
  bool starts_with(std::string_view s) const {
    return src.compare(pos, s.size(), s) == 0;
  }

  void skip_space() {
    while (!eof() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
  }

  Document run() {
    Document doc;
    std::vector<Node*> stack;  // open elements; pointers stay valid because
                               // we only append to the *innermost* child list

    auto current_children = [&]() -> std::vector<Node>& {
      return stack.empty() ? doc.roots : stack.back()->children;
    };

    while (!eof()) {
      if (peek() != '<') {
        std::size_t start = pos;
        std::size_t lt = src.find('<', pos);
        if (lt == std::string::npos) lt = src.size();
        Node text;
        text.kind = Node::Kind::kText;
        text.text = src.substr(start, lt - start);
        text.src_begin = start;
        text.src_end = lt;
        current_children().push_back(std::move(text));
        pos = lt;
        continue;
      }
      if (starts_with("<!--")) {
        std::size_t start = pos;
        std::size_t end = src.find("-->", pos + 4);
        if (end == std::string::npos)
          throw MalformedPageHtml("unterminated comment at offset " +
                                  std::to_string(start));
        Node c;
        c.kind = Node::Kind::kComment;
        c.text = src.substr(start + 4, end - (start + 4));
        c.src_begin = start;
        c.src_end = end + 3;
        current_children().push_back(std::move(c));
        pos = end + 3;
        continue;
      }
      if (starts_with("<!")) {
        std::size_t start = pos;
        std::size_t end = src.find('>', pos);
        if (end == std::string::npos)
          throw MalformedPageHtml("unterminated declaration at offset " +
                                  std::to_string(start));
        Node d;
        d.kind = Node::Kind::kDoctype;
        d.text = src.substr(start, end + 1 - start);
        d.src_begin = start;
        d.src_end = end + 1;
        current_children().push_back(std::move(d));
        pos = end + 1;
        continue;
      }
      if (starts_with("</")) {
        std::size_t start = pos;
        pos += 2;
        std::size_t name_start = pos;
        while (!eof() && is_name_char(peek())) ++pos;
        std::string tag = to_lower(src.substr(name_start, pos - name_start));
        skip_space();
        if (eof() || peek() != '>')
          throw MalformedPageHtml("unterminated close tag at offset " +
                                  std::to_string(start));
        ++pos;
        // Pop to the matching open element; a stray close tag is ignored.
        auto it = std::find_if(stack.rbegin(), stack.rend(),
                               [&](Node* n) { return n->tag == tag; });
        if (it == stack.rend()) continue;
        while (!stack.empty()) {
          Node* open = stack.back();
          stack.pop_back();
          if (open->tag == tag) {
            open->inner_end = start;
            open->src_end = pos;
            break;
          }
          // Implicitly closed by an outer close tag.
          open->inner_end = start;
          open->src_end = start;
        }
        continue;
      }
      // Open tag.
      std::size_t start = pos;
      ++pos;
      if (eof() || !std::isalpha(static_cast<unsigned char>(peek()))) {
        // A lone '<' in text; treat the character as text content.
        Node text;
        text.kind = Node::Kind::kText;
        text.text = "<";
        text.src_begin = start;
        text.src_end = start + 1;
        current_children().push_back(std::move(text));
        continue;
      }
      std::size_t name_start = pos;
      while (!eof() && is_name_char(peek())) ++pos;
      Node el;
      el.kind = Node::Kind::kElement;
      el.tag = to_lower(src.substr(name_start, pos - name_start));
      el.src_begin = start;

      bool self_closing = false;
      while (true) {
        skip_space();
        if (eof())
          throw MalformedPageHtml("unterminated tag at offset " +
                                  std::to_string(start));
        if (peek() == '>') {
          ++pos;
          break;
        }
        if (peek() == '/') {
          ++pos;
          skip_space();
          if (eof() || peek() != '>')
            throw MalformedPageHtml("unterminated tag at offset " +
                                    std::to_string(start));
          ++pos;
          self_closing = true;
          break;
        }
        std::size_t an_start = pos;
        while (!eof() && peek() != '=' && peek() != '>' && peek() != '/' &&
               !std::isspace(static_cast<unsigned char>(peek())))
          ++pos;
        if (pos == an_start)
          throw MalformedPageHtml("bad attribute at offset " +
                                  std::to_string(an_start));
        std::string attr_name = to_lower(src.substr(an_start, pos - an_start));
        std::string attr_value;
        skip_space();
        if (!eof() && peek() == '=') {
          ++pos;
          skip_space();
          if (eof())
            throw MalformedPageHtml("unterminated tag at offset " +
                                    std::to_string(start));
          if (peek() == '"' || peek() == '\'') {
            char quote = peek();
            ++pos;
            std::size_t v_start = pos;
            std::size_t v_end = src.find(quote, pos);
            if (v_end == std::string::npos)
              throw MalformedPageHtml("unterminated quote at offset " +
                                      std::to_string(v_start - 1));
            attr_value = unescape_entities(src.substr(v_start, v_end - v_start));
            pos = v_end + 1;
          } else {
            std::size_t v_start = pos;
            while (!eof() && peek() != '>' &&
                   !std::isspace(static_cast<unsigned char>(peek())))
              ++pos;
            attr_value = src.substr(v_start, pos - v_start);
          }
        }
        el.attrs.emplace_back(std::move(attr_name), std::move(attr_value));
      }
      el.inner_begin = pos;

      if (self_closing || is_void_tag(el.tag)) {
        el.inner_end = pos;
        el.src_end = pos;
        current_children().push_back(std::move(el));
        continue;
      }
      if (is_raw_text_tag(el.tag)) {
        std::string close = "</" + el.tag;
        std::size_t body_end = src.size();
        std::size_t probe = pos;
        while (true) {
          probe = src.find(close, probe);
          if (probe == std::string::npos) break;
          std::size_t after = probe + close.size();
          if (after < src.size() &&
              (src[after] == '>' ||
               std::isspace(static_cast<unsigned char>(src[after])))) {
            body_end = probe;
            break;
          }
          probe = after;
        }
        if (body_end == src.size() && probe == std::string::npos) {
          // Raw text runs to EOF; tolerate it as an auto-closed element.
          Node text;
          text.kind = Node::Kind::kText;
          text.text = src.substr(pos);
          text.src_begin = pos;
          text.src_end = src.size();
          el.children.push_back(std::move(text));
          el.inner_end = src.size();
          el.src_end = src.size();
          current_children().push_back(std::move(el));
          pos = src.size();
          continue;
        }
        Node text;
        text.kind = Node::Kind::kText;
        text.text = src.substr(pos, body_end - pos);
        text.src_begin = pos;
        text.src_end = body_end;
        el.children.push_back(std::move(text));
        el.inner_end = body_end;
        std::size_t gt = src.find('>', body_end);
        if (gt == std::string::npos)
          throw MalformedPageHtml("unterminated close tag at offset " +
                                  std::to_string(body_end));
        el.src_end = gt + 1;
        current_children().push_back(std::move(el));
        pos = gt + 1;
        continue;
      }
      current_children().push_back(std::move(el));
      stack.push_back(&current_children().back());
    }
    // Auto-close anything still open at EOF.
    for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
      (*it)->inner_end = src.size();
      (*it)->src_end = src.size();
    }
    return doc;
  }
};

void walk(const Node& node, const Node* parent,
          const std::function<void(const Node&, const Node*)>& fn) {
  if (node.kind == Node::Kind::kElement) fn(node, parent);
  for (const Node& child : node.children) {
    walk(child, node.kind == Node::Kind::kElement ? &node : parent, fn);
  }
}

void collect_visible(const Node& node, const NodePredicate& excluded,
                     std::string& out) {
  if (node.kind == Node::Kind::kComment || node.kind == Node::Kind::kDoctype)
    return;
  if (node.kind == Node::Kind::kText) {
    out += unescape_entities(node.text);
    return;
  }
  if (node.tag == "head" || node.tag == "script" || node.tag == "style") return;
  if (is_hidden_element(node)) return;
  if (excluded && excluded(node)) return;
  out += ' ';  // element boundaries always separate words
  for (const Node& child : node.children) collect_visible(child, excluded, out);
  out += ' ';
}

std::string collapse_whitespace(const std::string& raw) {
  std::string out;
  out.reserve(raw.size());
  bool in_space = true;
  for (char c : raw) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      in_space = true;
      continue;
    }
    if (in_space && !out.empty()) out += ' ';
    in_space = false;
    out += c;
  }
  return out;
}

}  // namespace

const std::string* Node::attr(std::string_view name) const {
  for (const auto& [k, v] : attrs) {
    if (k == name) return &v;
  }
  return nullptr;
}

bool Node::has_attr(std::string_view name) const { return attr(name) != nullptr; }

bool Node::is_element(std::string_view tag_name) const {
  return kind == Kind::kElement && tag == tag_name;
}

Document parse(const std::string& source) { return Parser(source).run(); }

void for_each_element(const Document& doc,
                      const std::function<void(const Node&, const Node*)>& fn) {
  for (const Node& root : doc.roots) walk(root, nullptr, fn);
}

const Node* find_element(const Document& doc, const NodePredicate& pred) {
  const Node* found = nullptr;
  for_each_element(doc, [&](const Node& node, const Node*) {
    if (!found && pred(node)) found = &node;
  });
  return found;
}

std::vector<const Node*> find_elements(const Document& doc,
                                       const NodePredicate& pred) {
  std::vector<const Node*> out;
  for_each_element(doc, [&](const Node& node, const Node*) {
    if (pred(node)) out.push_back(&node);
  });
  return out;
}

const Node* find_by_attr(const Document& doc, std::string_view name,
                         std::string_view value) {
  return find_element(doc, [&](const Node& node) {
    const std::string* v = node.attr(name);
    return v && *v == value;
  });
}

bool is_hidden_element(const Node& node) {
  if (node.has_attr("hidden")) return true;
  const std::string* aria = node.attr("aria-hidden");
  if (aria && *aria == "true") return true;
  const std::string* style = node.attr("style");
  if (style) {
    std::string squeezed;
    for (char c : *style) {
      if (!std::isspace(static_cast<unsigned char>(c))) squeezed += std::tolower(c);
    }
    if (squeezed.find("display:none") != std::string::npos) return true;
  }
  return false;
}

std::string visible_text(const Document& doc) {
  return visible_text_excluding(doc, nullptr);
}

std::string visible_text_excluding(const Document& doc,
                                   const NodePredicate& excluded) {
  std::string raw;
  for (const Node& root : doc.roots) collect_visible(root, excluded, raw);
  return collapse_whitespace(raw);
}

std::string visible_text_of(const Node& node) {
  std::string raw;
  collect_visible(node, nullptr, raw);
  return collapse_whitespace(raw);
}

std::string raw_text_of(const Node& node) {
  std::string out;
  if (node.kind == Node::Kind::kText) {
    out += unescape_entities(node.text);
  } else if (node.kind == Node::Kind::kElement) {
    for (const Node& child : node.children) out += raw_text_of(child);
  }
  return out;
}

std::vector<std::string> tokenize_text(const std::string& text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) tokens.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

std::string escape_text(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string escape_attr(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape_entities(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  std::size_t i = 0;
  while (i < raw.size()) {
    if (raw[i] != '&') {
      out += raw[i++];
      continue;
    }
    auto take = [&](std::string_view entity, std::string_view repl) {
      if (raw.compare(i, entity.size(), entity) == 0) {
        out += repl;
        i += entity.size();
        return true;
      }
      return false;
    };
    if (take("&amp;", "&") || take("&lt;", "<") || take("&gt;", ">") ||
        take("&quot;", "\"") || take("&#39;", "'") || take("&apos;", "'") ||
        take("&nbsp;", " "))
      continue;
    out += raw[i++];
  }
  return out;
}

std::string insert_at(const std::string& source, std::size_t offset,
                      const std::string& markup) {
  std::string out;
  out.reserve(source.size() + markup.size());
  out.append(source, 0, offset);
  out.append(markup);
  out.append(source, offset, source.size() - offset);
  return out;
}

std::string remove_ranges(const std::string& source,
                          std::vector<std::pair<std::size_t, std::size_t>> ranges) {
  std::sort(ranges.begin(), ranges.end());
  std::string out;
  out.reserve(source.size());
  std::size_t cursor = 0;
  for (const auto& [begin, end] : ranges) {
    if (begin < cursor) continue;  // nested inside an already removed span
    out.append(source, cursor, begin - cursor);
    cursor = end;
  }
  out.append(source, cursor, source.size() - cursor);
  return out;
}

}  // namespace pageguard::html
