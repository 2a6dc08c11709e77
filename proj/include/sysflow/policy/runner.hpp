#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sysflow/entity_store.hpp"
#include "sysflow/model.hpp"
#include "sysflow/policy/ast.hpp"
#include "sysflow/policy/eval.hpp"

namespace sysflow::policy {

struct RunOptions {
  /// Report a match rule at most once per process. A process usually shows up
  /// in several records (exec, flows, exit) and one alert is enough.
  bool once_per_process = true;
};

struct Finding {
  std::string rule;
  RuleAction action = RuleAction::Match;
  std::size_t record_index = 0;  // position in the stream, entities included
  RecordKind kind = RecordKind::ProcessEvent;
  Timestamp ts = 0;
  std::uint32_t pid = 0;
  std::string exe;
  std::vector<std::pair<std::string, AttrValue>> shown;  // match rules with show
  std::vector<std::string> added_tags;                   // tag rules, never empty
};

/// Single-pass rule engine. Feed records in stream order; entities are
/// remembered so that later records can be flattened against them.
class PolicyRunner {
 public:
  /// Keeps a reference to `policy`.
  explicit PolicyRunner(const Policy& policy, RunOptions options = {});

  /// Evaluates every rule in order against `rec` and appends the labels of
  /// matching tag rules to rec.tags (skipping labels already present).
  /// Returns the findings for this record. Throws OrderingError for records
  /// that reference unknown entities.
  std::vector<Finding> process(SfRecord& rec);

  std::size_t records_seen() const { return index_; }

 private:
  const Policy& policy_;
  RunOptions options_;
  Evaluator evaluator_;
  EntityStore store_;
  std::set<std::pair<std::size_t, Oid>> reported_;  // (rule index, process)
  std::size_t index_ = 0;
};

/// Batch form of PolicyRunner; tags are applied to `records` in place.
std::vector<Finding> run_policy(const Policy& policy, std::span<SfRecord> records,
                                RunOptions options = {});

/// {"rule":..., "action":..., "index":..., "type":..., "ts":..., "pid":...,
///  "exe":..., "show":{...}, "tags":[...]} on one line.
std::string finding_to_json(const Finding& finding);

}  // namespace sysflow::policy
