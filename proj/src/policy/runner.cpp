#include "sysflow/policy/runner.hpp"

#include <algorithm>

#include <json.hpp>

#include "sysflow/flat_record.hpp"

namespace sysflow::policy {

PolicyRunner::PolicyRunner(const Policy& policy, RunOptions options)
    : policy_(policy), options_(options), evaluator_(policy) {}

std::vector<Finding> PolicyRunner::process(SfRecord& rec) {
  const std::size_t index = index_++;
  std::vector<Finding> out;
  if (is_entity(rec.kind())) {
    store_.put(rec);
    return out;
  }
  if (policy_.rules.empty()) return out;

  const FlatRecord flat = flatten(rec, store_);
  auto finding = [&](const Rule& rule) {
    Finding f;
    f.rule = rule.name;
    f.action = rule.action;
    f.record_index = index;
    f.kind = rec.kind();
    f.ts = start_ts_of(rec);
    f.pid = flat.process().pid;
    f.exe = flat.process().exe;
    return f;
  };

  for (std::size_t i = 0; i < policy_.rules.size(); ++i) {
    const Rule& rule = policy_.rules[i];
    if (!evaluator_.eval(rule.cond, flat)) continue;
    if (rule.action == RuleAction::Tag) {
      Finding f = finding(rule);
      for (const auto& label : rule.labels) {
        if (std::find(rec.tags.begin(), rec.tags.end(), label) == rec.tags.end()) {
          rec.tags.push_back(label);
        }
      }
      f.added_tags = rule.labels;
      out.push_back(std::move(f));
      continue;
    }
    if (options_.once_per_process && !reported_.emplace(i, flat.process().oid).second) continue;
    Finding f = finding(rule);
    for (const auto& path : rule.show) {
      f.shown.emplace_back(attr_path_name(path), Evaluator::resolve(path, flat));
    }
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<Finding> run_policy(const Policy& policy, std::span<SfRecord> records,
                                RunOptions options) {
  PolicyRunner runner(policy, options);
  std::vector<Finding> out;
  for (auto& rec : records) {
    auto found = runner.process(rec);
    std::move(found.begin(), found.end(), std::back_inserter(out));
  }
  return out;
}

std::string finding_to_json(const Finding& finding) {
  nlohmann::ordered_json j;
  j["rule"] = finding.rule;
  j["action"] = finding.action == RuleAction::Match ? "match" : "tag";
  j["index"] = finding.record_index;
  j["type"] = kind_abbrev(finding.kind);
  j["ts"] = finding.ts;
  j["pid"] = finding.pid;
  j["exe"] = finding.exe;
  if (!finding.shown.empty()) {
    nlohmann::ordered_json shown = nlohmann::ordered_json::object();
    for (const auto& [name, value] : finding.shown) {
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
              shown[name] = nullptr;
            } else {
              shown[name] = v;
            }
          },
          value);
    }
    j["show"] = std::move(shown);
  }
  if (!finding.added_tags.empty()) j["tags"] = finding.added_tags;
  return j.dump();
}

}  // namespace sysflow::policy
