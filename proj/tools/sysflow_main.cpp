#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sysflow/cli/commands.hpp"

namespace {

using namespace sysflow;

// Enum-valued option: the text is checked against `names` at parse time and
// converted once parsing succeeded.
template <typename E>
struct Choice {
  const std::map<std::string, E>* names;
  std::string text;
  E* target;

  void add(CLI::App* cmd, const std::string& flag, const std::string& help) {
    std::vector<std::string> keys;
    for (const auto& [k, v] : *names) keys.push_back(k);
    cmd->add_option(flag, text, help)->check(CLI::IsMember(keys));
  }
  void apply() const {
    if (!text.empty()) *target = names->at(text);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SysFlow telemetry toolchain: generate, aggregate, inspect and hunt."};
  app.require_subcommand(1);
  app.set_version_flag("--version", "sysflow 1.0");

  const std::map<std::string, gen::Profile> profiles{{"attack_table2", gen::Profile::attack_table2},
                                                     {"db", gen::Profile::db},
                                                     {"web", gen::Profile::web},
                                                     {"threads", gen::Profile::threads}};
  const std::map<std::string, aggregate::OutputFormat> formats{
      {"binary", aggregate::OutputFormat::binary}, {"jsonl", aggregate::OutputFormat::jsonl}};
  const std::map<std::string, codec::Compression> compressions{
      {"deflate", codec::Compression::deflate}, {"none", codec::Compression::none}};
  const std::map<std::string, aggregate::OrphanFdPolicy> orphan{
      {"fail", aggregate::OrphanFdPolicy::fail}, {"drop", aggregate::OrphanFdPolicy::drop}};
  const std::map<std::string, cli::PrintFormat> print_formats{
      {"table", cli::PrintFormat::table}, {"jsonl", cli::PrintFormat::jsonl}};

  cli::GenArgs gen_args;
  auto* gen = app.add_subcommand("gen", "Write a synthetic raw syscall trace (JSON lines)");
  Choice<gen::Profile> profile{&profiles, {}, &gen_args.options.profile};
  profile.add(gen, "--profile", "attack_table2 | db | web | threads");
  gen->add_option("--seed", gen_args.options.seed, "Random seed");
  gen->add_option("--ops", gen_args.options.n_ops, "db: number of read/write syscalls");
  gen->add_option("--duration-secs", gen_args.options.duration_secs, "db: trace length");
  gen->add_option("--conns", gen_args.options.n_conns, "web: number of connections");
  gen->add_option("--handoff", gen_args.options.tid_handoff, "web: threads per connection");
  gen->add_option("--threads", gen_args.options.n_threads, "threads: threads to create");
  gen->add_option("-o,--output", gen_args.output, "Output path, - for stdout");

  cli::AggregateArgs agg_args;
  double timeout = 0;
  auto* agg = app.add_subcommand("aggregate", "Lift a raw trace into SysFlow records");
  agg->add_option("-i,--input", agg_args.input, "Raw trace, - for stdin");
  agg->add_option("-o,--output", agg_args.output, "SysFlow stream, - for stdout");
  auto* timeout_opt = agg->add_option("--timeout-secs", timeout,
                                      "Flow export interval (default 30, or SF_FLOW_TIMEOUT_SECS)");
  Choice<aggregate::OutputFormat> format{&formats, {}, &agg_args.format};
  format.add(agg, "--format", "binary | jsonl");
  Choice<codec::Compression> compression{&compressions, {}, &agg_args.compression};
  compression.add(agg, "--compression", "deflate | none");
  Choice<aggregate::OrphanFdPolicy> orphan_fd{&orphan, {}, &agg_args.orphan_fd};
  orphan_fd.add(agg, "--orphan-fd", "fail | drop: I/O on a never-opened fd");
  agg->add_option("--hostname", agg_args.hostname, "Hostname written to the stream header");

  cli::PrintArgs print_args;
  auto* print = app.add_subcommand("print", "Render a SysFlow stream");
  print->add_option("-i,--input", print_args.input, "SysFlow stream (binary or JSON lines)");
  Choice<cli::PrintFormat> print_format{&print_formats, {}, &print_args.format};
  print_format.add(print, "--format", "table | jsonl");
  print->add_flag("--lenient", print_args.lenient, "Skip blocks with unknown record types");

  cli::PolicyArgs policy_args;
  auto* pol = app.add_subcommand("policy", "Run detection and tagging rules over a stream");
  pol->add_option("-i,--input", policy_args.input, "SysFlow stream");
  pol->add_option("policies", policy_args.policy_files, "Policy files (.sfp), applied in order")
      ->required();
  pol->add_option("--emit-tagged", policy_args.emit_tagged,
                  "Write the stream with tags applied to this file");
  pol->add_flag("--every-match", policy_args.every_match,
                "Report match rules on every record, not once per process");
  pol->add_flag("--lenient", policy_args.lenient, "Skip blocks with unknown record types");

  cli::StatsArgs stats_args;
  auto* stats = app.add_subcommand("stats", "Summarize a SysFlow stream");
  stats->add_option("-i,--input", stats_args.input, "SysFlow stream");
  stats->add_option("--top", stats_args.top, "Processes to list");
  stats->add_flag("--lenient", stats_args.lenient, "Skip blocks with unknown record types");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kDataError;
  }

  profile.apply();
  format.apply();
  compression.apply();
  orphan_fd.apply();
  print_format.apply();

  const cli::Io io{std::cin, std::cout, std::cerr};
  if (*gen) return cli::cmd_gen(gen_args, io);
  if (*agg) {
    if (timeout_opt->count() > 0) agg_args.timeout_secs = timeout;
    return cli::cmd_aggregate(agg_args, io);
  }
  if (*print) return cli::cmd_print(print_args, io);
  if (*pol) return cli::cmd_policy(policy_args, io);
  return cli::cmd_stats(stats_args, io);
}
