#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sysflow/error.hpp"
#include "sysflow/flat_record.hpp"

namespace sysflow::policy {

struct Location {
  std::string source;
  std::uint32_t line = 0;
  std::uint32_t column = 0;
};

/// "source:line:column"
std::string to_string(const Location& loc);

/// Compile-time problem in a policy; what() is prefixed with the location.
class PolicyError : public Error {
 public:
  PolicyError(Location loc, const std::string& detail);

  const Location& location() const { return loc_; }
  const std::string& detail() const { return detail_; }

 private:
  Location loc_;
  std::string detail_;
};

enum class BinaryOp : std::uint8_t { In, Pmatch, Contains, Startswith, Eq, Ne, Lt, Le, Gt, Ge };

std::string_view to_string(BinaryOp op);

/// sf.* attribute, with the ancestor index for sf.proc.achain(k).
struct AttrPath {
  Attr attr = Attr::Type;
  std::optional<std::uint32_t> k;

  bool operator==(const AttrPath&) const = default;
};

/// A literal value; numeric when the text is a decimal integer.
struct Value {
  std::string text;

  bool operator==(const Value&) const = default;
};

/// Inline list: (a, b, c).
struct ValueList {
  std::vector<std::string> items;

  bool operator==(const ValueList&) const = default;
};

/// Reference to a named list.
struct ListRef {
  std::string name;

  bool operator==(const ListRef&) const = default;
};

using Atom = std::variant<AttrPath, Value, ValueList, ListRef>;

enum class CondKind : std::uint8_t { Or, And, Not, Exists, Binary, MacroRef };

/// Condition tree. Or/And hold two or more children, Not exactly one.
/// Exists and Binary use lhs (and rhs); MacroRef uses macro. Equality ignores
/// locations.
struct Condition {
  CondKind kind = CondKind::Exists;
  std::vector<Condition> children;
  BinaryOp op = BinaryOp::Eq;
  Atom lhs;
  Atom rhs;
  std::string macro;
  Location loc;

  static Condition make_or(std::vector<Condition> children);
  static Condition make_and(std::vector<Condition> children);
  static Condition make_not(Condition child);
  static Condition make_exists(AttrPath attr);
  static Condition make_binary(BinaryOp op, Atom lhs, Atom rhs);
  static Condition make_macro(std::string name);

  friend bool operator==(const Condition& a, const Condition& b);
};

struct ListDef {
  std::string name;
  std::vector<std::string> values;
  Location loc;

  friend bool operator==(const ListDef& a, const ListDef& b) {
    return a.name == b.name && a.values == b.values;
  }
};

struct MacroDef {
  std::string name;
  Condition body;
  Location loc;

  friend bool operator==(const MacroDef& a, const MacroDef& b) {
    return a.name == b.name && a.body == b.body;
  }
};

enum class RuleAction : std::uint8_t { Match, Tag };

struct Rule {
  std::string name;
  RuleAction action = RuleAction::Match;
  Condition cond;
  std::vector<AttrPath> show;        // Match only
  std::vector<std::string> labels;   // Tag only, non-empty
  Location loc;

  friend bool operator==(const Rule& a, const Rule& b) {
    return a.name == b.name && a.action == b.action && a.cond == b.cond && a.show == b.show &&
           a.labels == b.labels;
  }
};

/// A compiled policy: every reference resolves, macros are acyclic and every
/// operator is applied to operands of a suitable type.
struct Policy {
  std::vector<ListDef> lists;
  std::vector<MacroDef> macros;
  std::vector<Rule> rules;

  const ListDef* find_list(std::string_view name) const;
  const MacroDef* find_macro(std::string_view name) const;

  friend bool operator==(const Policy&, const Policy&) = default;
};

/// Decimal integer value of a literal, if it is one.
std::optional<std::int64_t> integer_value(std::string_view text);

/// Words the grammar reserves; they cannot name lists or macros.
bool is_keyword(std::string_view word);

/// sf.proc.achain(2), sf.file.path, ...
std::string attr_path_name(const AttrPath& path);

/// Canonical text that parses back to an equal Policy.
std::string pretty_print(const Policy& policy);
std::string pretty_print(const Condition& cond);

}  // namespace sysflow::policy
