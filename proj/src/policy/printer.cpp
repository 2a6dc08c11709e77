#include <set>
#include <string>

#include "sysflow/policy/ast.hpp"

namespace sysflow::policy {

namespace {

bool breaks_word(char c) {
  switch (c) {
    case '(': case ')': case '[': case ']': case ',': case '"': case '#':
    case '=': case '!': case '<': case '>': case '\\':
    case ' ': case '\t': case '\r': case '\n': case '\f': case '\v':
      return true;
    default:
      return false;
  }
}

/// True if the text lexes back as one bare word.
bool is_plain(std::string_view text) {
  if (text.empty() || text.find(":=") != std::string_view::npos) return false;
  if (text.back() == ':') return false;
  for (char c : text) {
    if (breaks_word(c)) return false;
  }
  return true;
}

std::string quote(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

class Printer {
 public:
  explicit Printer(const std::set<std::string, std::less<>>* lists) : lists_(lists) {}

  std::string item(std::string_view text) const {
    return is_plain(text) ? std::string(text) : quote(text);
  }

  std::string value(std::string_view text) const {
    const bool ambiguous = text.starts_with("sf.") || is_keyword(text) ||
                           (lists_ != nullptr && lists_->contains(text));
    return is_plain(text) && !ambiguous ? std::string(text) : quote(text);
  }

  std::string items(const std::vector<std::string>& values, char open, char close) const {
    std::string out(1, open);
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i > 0) out += ", ";
      out += item(values[i]);
    }
    out.push_back(close);
    return out;
  }

  std::string atom(const Atom& a) const {
    if (const auto* p = std::get_if<AttrPath>(&a)) return attr_path_name(*p);
    if (const auto* v = std::get_if<Value>(&a)) return value(v->text);
    if (const auto* l = std::get_if<ValueList>(&a)) return items(l->items, '(', ')');
    return std::get<ListRef>(a).name;
  }

  std::string cond(const Condition& c) const {
    switch (c.kind) {
      case CondKind::Or:
        return join(c, " or ", [](const Condition& child) { return child.kind == CondKind::Or; });
      case CondKind::And:
        return join(c, " and ", [](const Condition& child) {
          return child.kind == CondKind::Or || child.kind == CondKind::And;
        });
      case CondKind::Not: {
        const Condition& child = c.children.at(0);
        const bool group = child.kind == CondKind::Or || child.kind == CondKind::And;
        return "not " + (group ? "(" + cond(child) + ")" : cond(child));
      }
      case CondKind::Exists:
        return atom(c.lhs) + " exists";
      case CondKind::Binary:
        return atom(c.lhs) + " " + std::string(to_string(c.op)) + " " + atom(c.rhs);
      case CondKind::MacroRef:
        return c.macro;
    }
    return {};
  }

 private:
  template <typename NeedsGroup>
  std::string join(const Condition& c, std::string_view sep, NeedsGroup needs_group) const {
    std::string out;
    for (std::size_t i = 0; i < c.children.size(); ++i) {
      if (i > 0) out += sep;
      const Condition& child = c.children[i];
      out += needs_group(child) ? "(" + cond(child) + ")" : cond(child);
    }
    return out;
  }

  const std::set<std::string, std::less<>>* lists_;
};

}  // namespace

std::string pretty_print(const Condition& cond) { return Printer(nullptr).cond(cond); }

std::string pretty_print(const Policy& policy) {
  std::set<std::string, std::less<>> names;
  for (const auto& l : policy.lists) names.insert(l.name);
  const Printer printer(&names);

  std::string out;
  for (const auto& l : policy.lists) {
    out += l.name + " := " + printer.items(l.values, '(', ')') + "\n";
  }
  for (const auto& m : policy.macros) {
    out += m.name + " := " + printer.cond(m.body) + "\n";
  }
  for (const auto& r : policy.rules) {
    out += r.name + ": ";
    if (r.action == RuleAction::Match) {
      out += "match " + printer.cond(r.cond);
      for (std::size_t i = 0; i < r.show.size(); ++i) {
        out += i == 0 ? " show " : ", ";
        out += attr_path_name(r.show[i]);
      }
    } else {
      out += "tag " + printer.cond(r.cond) + " with " + printer.items(r.labels, '[', ']');
    }
    out += "\n";
  }
  return out;
}

}  // namespace sysflow::policy
