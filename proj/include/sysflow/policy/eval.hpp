#pragma once

#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sysflow/flat_record.hpp"
#include "sysflow/policy/ast.hpp"

namespace sysflow::policy {

/// basename of the first whitespace-separated word: "/usr/bin/apt-get x" -> "apt-get".
std::string_view program_name(std::string_view value);

/// True if some pattern is a prefix of program_name(value).
bool pmatch(std::string_view value, std::span<const std::string> patterns);

/// Evaluates conditions of a checked policy against flattened records.
///
/// A comparison with an absent operand is false, and `not` negates after that,
/// so `not sf.file.path = x` holds for records without a file. `exists` is the
/// only test that looks at presence. `in` with an attribute list on the left
/// means a non-empty intersection. For program-valued attributes (sf.proc.exe,
/// sf.pproc.exe, achain) `in` also accepts the program name of the value.
///
/// Holds pointers into `policy`, which must outlive the evaluator.
class Evaluator {
 public:
  explicit Evaluator(const Policy& policy);

  bool eval(const Condition& cond, const FlatRecord& rec) const;

  /// Current value of an attribute, for show clauses.
  static AttrValue resolve(const AttrPath& path, const FlatRecord& rec);

 private:
  bool eval_binary(const Condition& cond, const FlatRecord& rec) const;
  const std::vector<std::string>& list_items(const Atom& atom) const;

  std::unordered_map<std::string, const std::vector<std::string>*> lists_;
  std::unordered_map<std::string, const Condition*> macros_;
};

/// Convenience for one-off checks: Evaluator(policy).eval(cond, rec).
bool eval_condition(const Policy& policy, const Condition& cond, const FlatRecord& rec);

/// Copy of `cond` with every macro reference replaced by the macro's body.
Condition inline_macros(const Policy& policy, const Condition& cond);

}  // namespace sysflow::policy
