#include "sysflow/policy/ast.hpp"

#include <algorithm>
#include <array>
#include <charconv>

namespace sysflow::policy {

std::string to_string(const Location& loc) {
  return loc.source + ":" + std::to_string(loc.line) + ":" + std::to_string(loc.column);
}

PolicyError::PolicyError(Location loc, const std::string& detail)
    : Error(to_string(loc) + ": " + detail), loc_(std::move(loc)), detail_(detail) {}

std::string_view to_string(BinaryOp op) {
  switch (op) {
    case BinaryOp::In: return "in";
    case BinaryOp::Pmatch: return "pmatch";
    case BinaryOp::Contains: return "contains";
    case BinaryOp::Startswith: return "startswith";
    case BinaryOp::Eq: return "=";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
  }
  return "?";
}

Condition Condition::make_or(std::vector<Condition> children) {
  Condition c;
  c.kind = CondKind::Or;
  c.children = std::move(children);
  return c;
}

Condition Condition::make_and(std::vector<Condition> children) {
  Condition c;
  c.kind = CondKind::And;
  c.children = std::move(children);
  return c;
}

Condition Condition::make_not(Condition child) {
  Condition c;
  c.kind = CondKind::Not;
  c.children.push_back(std::move(child));
  return c;
}

Condition Condition::make_exists(AttrPath attr) {
  Condition c;
  c.kind = CondKind::Exists;
  c.lhs = attr;
  return c;
}

Condition Condition::make_binary(BinaryOp op, Atom lhs, Atom rhs) {
  Condition c;
  c.kind = CondKind::Binary;
  c.op = op;
  c.lhs = std::move(lhs);
  c.rhs = std::move(rhs);
  return c;
}

Condition Condition::make_macro(std::string name) {
  Condition c;
  c.kind = CondKind::MacroRef;
  c.macro = std::move(name);
  return c;
}

bool operator==(const Condition& a, const Condition& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case CondKind::Or:
    case CondKind::And:
    case CondKind::Not:
      return a.children == b.children;
    case CondKind::Exists:
      return a.lhs == b.lhs;
    case CondKind::Binary:
      return a.op == b.op && a.lhs == b.lhs && a.rhs == b.rhs;
    case CondKind::MacroRef:
      return a.macro == b.macro;
  }
  return false;
}

const ListDef* Policy::find_list(std::string_view name) const {
  auto it = std::find_if(lists.begin(), lists.end(), [&](const ListDef& l) { return l.name == name; });
  return it == lists.end() ? nullptr : &*it;
}

const MacroDef* Policy::find_macro(std::string_view name) const {
  auto it =
      std::find_if(macros.begin(), macros.end(), [&](const MacroDef& m) { return m.name == name; });
  return it == macros.end() ? nullptr : &*it;
}

std::optional<std::int64_t> integer_value(std::string_view text) {
  if (text.empty()) return std::nullopt;
  std::int64_t v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return v;
}

bool is_keyword(std::string_view word) {
  static constexpr std::array<std::string_view, 12> kKeywords = {
      "match", "tag", "show", "with", "and", "or", "not", "exists",
      "in", "pmatch", "contains", "startswith"};
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

std::string attr_path_name(const AttrPath& path) {
  std::string out(attribute_info(path.attr).name);
  if (path.k) out += "(" + std::to_string(*path.k) + ")";
  return out;
}

}  // namespace sysflow::policy
