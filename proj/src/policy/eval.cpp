#include "sysflow/policy/eval.hpp"

#include <algorithm>
#include <stdexcept>

namespace sysflow::policy {

namespace {

bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

// Operand after resolution. Literals keep both readings; the checker has
// already rejected combinations that make no sense.
struct Operand {
  bool absent = false;
  std::optional<std::int64_t> num;
  std::optional<std::string> str;
  const std::vector<std::string>* shared = nullptr;  // list literals and named lists
  std::optional<std::vector<std::string>> owned;      // attribute lists
  bool program = false;                               // values name programs

  const std::vector<std::string>* list() const { return owned ? &*owned : shared; }
};

bool same_program(std::string_view value, std::string_view wanted, bool program) {
  if (value == wanted) return true;
  return program && program_name(value) == wanted;
}

// Applies `test` to each string on the left: the scalar, or every element.
template <typename Test>
bool any_string(const Operand& lhs, Test test) {
  if (lhs.str) return test(*lhs.str);
  if (const auto* items = lhs.list()) return std::any_of(items->begin(), items->end(), test);
  return false;
}

}  // namespace

std::string_view program_name(std::string_view value) {
  std::size_t begin = 0;
  while (begin < value.size() && is_blank(value[begin])) ++begin;
  std::size_t end = begin;
  while (end < value.size() && !is_blank(value[end])) ++end;
  std::string_view word = value.substr(begin, end - begin);
  const auto slash = word.rfind('/');
  return slash == std::string_view::npos ? word : word.substr(slash + 1);
}

bool pmatch(std::string_view value, std::span<const std::string> patterns) {
  const std::string_view name = program_name(value);
  return std::any_of(patterns.begin(), patterns.end(),
                     [&](const std::string& p) { return name.starts_with(p); });
}

Evaluator::Evaluator(const Policy& policy) {
  for (const auto& l : policy.lists) lists_[l.name] = &l.values;
  for (const auto& m : policy.macros) macros_[m.name] = &m.body;
}

AttrValue Evaluator::resolve(const AttrPath& path, const FlatRecord& rec) {
  if (path.attr == Attr::ProcAchain) return rec.achain(path.k);
  return rec.get(path.attr);
}

const std::vector<std::string>& Evaluator::list_items(const Atom& atom) const {
  if (const auto* l = std::get_if<ValueList>(&atom)) return l->items;
  const auto& name = std::get<ListRef>(atom).name;
  auto it = lists_.find(name);
  if (it == lists_.end()) throw std::logic_error("unresolved list " + name);
  return *it->second;
}

bool Evaluator::eval(const Condition& cond, const FlatRecord& rec) const {
  switch (cond.kind) {
    case CondKind::Or:
      return std::any_of(cond.children.begin(), cond.children.end(),
                         [&](const Condition& c) { return eval(c, rec); });
    case CondKind::And:
      return std::all_of(cond.children.begin(), cond.children.end(),
                         [&](const Condition& c) { return eval(c, rec); });
    case CondKind::Not:
      return !eval(cond.children.at(0), rec);
    case CondKind::Exists:
      return !is_absent(resolve(std::get<AttrPath>(cond.lhs), rec));
    case CondKind::Binary:
      return eval_binary(cond, rec);
    case CondKind::MacroRef: {
      auto it = macros_.find(cond.macro);
      if (it == macros_.end()) throw std::logic_error("unresolved macro " + cond.macro);
      return eval(*it->second, rec);
    }
  }
  return false;
}

bool Evaluator::eval_binary(const Condition& cond, const FlatRecord& rec) const {
  auto load = [&](const Atom& atom) {
    Operand o;
    if (const auto* path = std::get_if<AttrPath>(&atom)) {
      o.program = attribute_info(path->attr).names_program;
      AttrValue v = resolve(*path, rec);
      if (is_absent(v)) {
        o.absent = true;
      } else if (auto* n = std::get_if<std::int64_t>(&v)) {
        o.num = *n;
      } else if (auto* s = std::get_if<std::string>(&v)) {
        o.str = std::move(*s);
      } else {
        o.owned = std::move(std::get<std::vector<std::string>>(v));
      }
    } else if (const auto* value = std::get_if<Value>(&atom)) {
      o.str = value->text;
      o.num = integer_value(value->text);
    } else {
      o.shared = &list_items(atom);
    }
    return o;
  };

  Operand lhs = load(cond.lhs);
  if (lhs.absent) return false;
  Operand rhs = load(cond.rhs);
  if (rhs.absent) return false;

  switch (cond.op) {
    case BinaryOp::In: {
      const std::vector<std::string>& items = *rhs.list();
      const bool program = lhs.program || rhs.program;
      if (lhs.num && !lhs.str) {
        return std::any_of(items.begin(), items.end(), [&](const std::string& item) {
          return integer_value(item) == lhs.num;
        });
      }
      return any_string(lhs, [&](const std::string& value) {
        return std::any_of(items.begin(), items.end(), [&](const std::string& item) {
          // Attribute lists on the right hold the program-valued side.
          return rhs.program ? same_program(item, value, true)
                             : same_program(value, item, program);
        });
      });
    }
    case BinaryOp::Pmatch: {
      std::vector<std::string> single;
      if (rhs.list() == nullptr) single.push_back(*rhs.str);
      const std::span<const std::string> patterns =
          rhs.list() != nullptr ? std::span<const std::string>(*rhs.list()) : single;
      return any_string(lhs, [&](const std::string& value) { return pmatch(value, patterns); });
    }
    case BinaryOp::Contains:
      return any_string(lhs, [&](const std::string& value) {
        return value.find(*rhs.str) != std::string::npos;
      });
    case BinaryOp::Startswith:
      return any_string(lhs, [&](const std::string& value) { return value.starts_with(*rhs.str); });
    default:
      break;
  }

  // Relational operators. Numbers compare numerically when both sides have a
  // numeric reading, strings otherwise.
  int order = 0;
  if (lhs.num && rhs.num) {
    order = *lhs.num < *rhs.num ? -1 : *lhs.num > *rhs.num ? 1 : 0;
  } else if (lhs.str && rhs.str) {
    const int c = lhs.str->compare(*rhs.str);
    order = c < 0 ? -1 : c > 0 ? 1 : 0;
  } else {
    return false;
  }
  switch (cond.op) {
    case BinaryOp::Eq: return order == 0;
    case BinaryOp::Ne: return order != 0;
    case BinaryOp::Lt: return order < 0;
    case BinaryOp::Le: return order <= 0;
    case BinaryOp::Gt: return order > 0;
    case BinaryOp::Ge: return order >= 0;
    default: return false;
  }
}

bool eval_condition(const Policy& policy, const Condition& cond, const FlatRecord& rec) {
  return Evaluator(policy).eval(cond, rec);
}

Condition inline_macros(const Policy& policy, const Condition& cond) {
  if (cond.kind == CondKind::MacroRef) {
    const MacroDef* m = policy.find_macro(cond.macro);
    if (m == nullptr) throw std::logic_error("unresolved macro " + cond.macro);
    return inline_macros(policy, m->body);
  }
  Condition out = cond;
  for (auto& child : out.children) child = inline_macros(policy, child);
  return out;
}

}  // namespace sysflow::policy
