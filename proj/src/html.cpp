#include "a11yrev/html.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "a11yrev/error.hpp"

namespace a11yrev::html {
namespace {

const std::unordered_set<std::string_view> kVoidElements = {
    "area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta", "param", "source", "track", "wbr"};

const std::unordered_set<std::string_view> kListScopes = {"ul", "ol", "menu"};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

void append_utf8(std::string& out, unsigned long cp) {
  if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
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
}

struct Tag {
  std::string name;
  bool closing = false;
  bool self_closing = false;
  std::string id;
  std::vector<std::string> classes;
};

// Parses the inside of "<...>"; attribute values may be quoted or bare.
Tag parse_tag(std::string_view body) {
  Tag tag;
  std::size_t i = 0;
  if (i < body.size() && body[i] == '/') {
    tag.closing = true;
    ++i;
  }
  const std::size_t name_start = i;
  while (i < body.size() && !is_space(body[i]) && body[i] != '/' && body[i] != '>') ++i;
  tag.name = lower(body.substr(name_start, i - name_start));
  while (i < body.size()) {
    while (i < body.size() && (is_space(body[i]) || body[i] == '/')) {
      if (body[i] == '/') tag.self_closing = true;
      ++i;
    }
    const std::size_t key_start = i;
    while (i < body.size() && !is_space(body[i]) && body[i] != '=' && body[i] != '/') ++i;
    const std::string key = lower(body.substr(key_start, i - key_start));
    if (key.empty()) {
      if (i < body.size()) ++i;
      continue;
    }
    tag.self_closing = false;
    while (i < body.size() && is_space(body[i])) ++i;
    std::string value;
    if (i < body.size() && body[i] == '=') {
      ++i;
      while (i < body.size() && is_space(body[i])) ++i;
      if (i < body.size() && (body[i] == '"' || body[i] == '\'')) {
        const char quote = body[i++];
        const std::size_t end = body.find(quote, i);
        value = std::string(body.substr(i, end == std::string_view::npos ? std::string_view::npos : end - i));
        i = end == std::string_view::npos ? body.size() : end + 1;
      } else {
        const std::size_t start = i;
        while (i < body.size() && !is_space(body[i])) ++i;
        value = std::string(body.substr(start, i - start));
      }
    }
    value = decode_entities(value);
    if (key == "id") {
      tag.id = value;
    } else if (key == "class") {
      std::size_t p = 0;
      while (p < value.size()) {
        while (p < value.size() && is_space(value[p])) ++p;
        const std::size_t start = p;
        while (p < value.size() && !is_space(value[p])) ++p;
        if (p > start) tag.classes.push_back(value.substr(start, p - start));
      }
    }
  }
  return tag;
}

}  // namespace

std::string decode_entities(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '&') {
      out.push_back(text[i++]);
      continue;
    }
    const std::size_t semi = text.find(';', i);
    if (semi == std::string_view::npos || semi - i > 10) {
      out.push_back(text[i++]);
      continue;
    }
    const std::string_view name = text.substr(i + 1, semi - i - 1);
    bool known = true;
    if (name == "amp") {
      out.push_back('&');
    } else if (name == "lt") {
      out.push_back('<');
    } else if (name == "gt") {
      out.push_back('>');
    } else if (name == "quot") {
      out.push_back('"');
    } else if (name == "apos") {
      out.push_back('\'');
    } else if (name == "nbsp") {
      out.push_back(' ');
    } else if (name.size() > 1 && name[0] == '#') {
      const bool hex = name[1] == 'x' || name[1] == 'X';
      const std::string digits(name.substr(hex ? 2 : 1));
      char* end = nullptr;
      const unsigned long cp = std::strtoul(digits.c_str(), &end, hex ? 16 : 10);
      if (digits.empty() || *end != '\0') {
        known = false;
      } else {
        append_utf8(out, cp);
      }
    } else {
      known = false;
    }
    if (known) {
      i = semi + 1;
    } else {
      out.push_back(text[i++]);
    }
  }
  return out;
}

Document Document::parse(std::string_view markup) {
  Document doc;
  doc.nodes_.push_back(Node{});
  std::vector<std::size_t> stack{0};

  auto add_node = [&](Node node) {
    node.parent = stack.back();
    const std::size_t index = doc.nodes_.size();
    doc.nodes_.push_back(std::move(node));
    doc.nodes_[stack.back()].children.push_back(index);
    return index;
  };
  auto add_text = [&](std::string_view raw) {
    if (raw.empty()) return;
    Node text;
    text.kind = Node::Kind::Text;
    text.text = decode_entities(raw);
    add_node(std::move(text));
  };
  // Closes open elements down to (and including) the innermost `name`,
  // unless a `barrier` element is open above it.
  auto close_to = [&](std::string_view name, const std::unordered_set<std::string_view>* barrier) {
    for (std::size_t depth = stack.size(); depth-- > 1;) {
      const std::string& tag = doc.nodes_[stack[depth]].tag;
      if (tag == name) {
        stack.resize(depth);
        return;
      }
      if (barrier && barrier->contains(tag)) return;
    }
  };

  std::size_t i = 0;
  while (i < markup.size()) {
    const std::size_t lt = markup.find('<', i);
    if (lt == std::string_view::npos) {
      add_text(markup.substr(i));
      break;
    }
    add_text(markup.substr(i, lt - i));
    if (markup.substr(lt).starts_with("<!--")) {
      const std::size_t end = markup.find("-->", lt + 4);
      i = end == std::string_view::npos ? markup.size() : end + 3;
      continue;
    }
    const std::size_t gt = markup.find('>', lt + 1);
    if (gt == std::string_view::npos) {
      add_text(markup.substr(lt));
      break;
    }
    const std::string_view body = markup.substr(lt + 1, gt - lt - 1);
    i = gt + 1;
    if (body.empty() || body[0] == '!' || body[0] == '?') continue;
    if (!(std::isalpha(static_cast<unsigned char>(body[0])) || body[0] == '/')) {
      add_text(markup.substr(lt, gt - lt + 1));
      continue;
    }
    Tag tag = parse_tag(body);
    if (tag.name.empty()) continue;
    if (tag.closing) {
      close_to(tag.name, nullptr);
      continue;
    }
    if (tag.name == "li") close_to("li", &kListScopes);
    if (tag.name == "p") close_to("p", nullptr);

    Node element;
    element.tag = tag.name;
    element.id = std::move(tag.id);
    element.classes = std::move(tag.classes);
    const std::size_t index = add_node(std::move(element));

    if (tag.name == "script" || tag.name == "style") {
      const std::string end_tag = "</" + tag.name;
      std::size_t p = i;
      std::size_t end = std::string_view::npos;
      while (p < markup.size()) {
        const std::size_t candidate = markup.find("</", p);
        if (candidate == std::string_view::npos) break;
        if (lower(markup.substr(candidate, end_tag.size())) == end_tag) {
          end = candidate;
          break;
        }
        p = candidate + 2;
      }
      if (end == std::string_view::npos) {
        i = markup.size();
      } else {
        const std::size_t close = markup.find('>', end);
        i = close == std::string_view::npos ? markup.size() : close + 1;
      }
      continue;
    }
    if (!tag.self_closing && !kVoidElements.contains(tag.name)) stack.push_back(index);
  }
  return doc;
}

std::string Document::text_content(std::size_t index) const {
  std::string raw;
  std::vector<std::size_t> pending{index};
  while (!pending.empty()) {
    const std::size_t current = pending.back();
    pending.pop_back();
    const Node& n = nodes_[current];
    if (n.kind == Node::Kind::Text) {
      raw += n.text;
      continue;
    }
    if (n.tag == "br") raw.push_back(' ');
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) pending.push_back(*it);
  }
  std::string out;
  bool space = false;
  for (char c : raw) {
    if (is_space(c)) {
      space = true;
      continue;
    }
    if (space && !out.empty()) out.push_back(' ');
    space = false;
    out.push_back(c);
  }
  return out;
}

Selector Selector::parse(std::string_view text) {
  Selector selector;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    if (i >= text.size()) break;
    Compound compound;
    std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    const std::string_view part = text.substr(start, i - start);
    std::size_t p = 0;
    auto read_name = [&] {
      const std::size_t s = p;
      while (p < part.size() && part[p] != '.' && part[p] != '#') ++p;
      return std::string(part.substr(s, p - s));
    };
    if (p < part.size() && part[p] != '.' && part[p] != '#') compound.tag = lower(read_name());
    while (p < part.size()) {
      const char kind = part[p++];
      std::string name = read_name();
      if (name.empty()) fail(ErrorCode::InvalidArgument, "bad selector '" + std::string(text) + "'");
      if (kind == '.') {
        compound.classes.push_back(std::move(name));
      } else {
        compound.id = std::move(name);
      }
    }
    if (compound.tag == "*") compound.tag.clear();
    for (char c : compound.tag) {
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') {
        fail(ErrorCode::InvalidArgument, "unsupported selector syntax in '" + std::string(text) + "'");
      }
    }
    selector.compounds_.push_back(std::move(compound));
  }
  if (selector.compounds_.empty()) fail(ErrorCode::InvalidArgument, "empty selector");
  return selector;
}

bool Selector::matches_compound(const Node& node, const Compound& compound) {
  if (node.kind != Node::Kind::Element || node.tag.empty()) return false;
  if (!compound.tag.empty() && node.tag != compound.tag) return false;
  if (!compound.id.empty() && node.id != compound.id) return false;
  for (const auto& cls : compound.classes) {
    if (std::find(node.classes.begin(), node.classes.end(), cls) == node.classes.end()) return false;
  }
  return true;
}

bool Selector::matches(const Document& doc, std::size_t element, std::size_t scope) const {
  if (!matches_compound(doc.node(element), compounds_.back())) return false;
  std::size_t current = element;
  for (std::size_t k = compounds_.size() - 1; k-- > 0;) {
    bool found = false;
    while (current != scope && current != doc.root()) {
      current = doc.node(current).parent;
      if (current == scope) break;
      if (matches_compound(doc.node(current), compounds_[k])) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

std::vector<std::size_t> Selector::select(const Document& doc, std::size_t scope) const {
  std::vector<std::size_t> out;
  std::vector<std::size_t> pending(doc.node(scope).children.rbegin(), doc.node(scope).children.rend());
  while (!pending.empty()) {
    const std::size_t current = pending.back();
    pending.pop_back();
    if (matches(doc, current, scope)) out.push_back(current);
    const auto& children = doc.node(current).children;
    for (auto it = children.rbegin(); it != children.rend(); ++it) pending.push_back(*it);
  }
  return out;
}

}  // namespace a11yrev::html
