#pragma once

// Subcommands of the sysflow tool, callable without a process boundary.
// Each returns an exit code: 0 ok, 1 bad data or policy, 2 I/O failure.
// Data goes to `out`, diagnostics to `err`.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sysflow/aggregate/pipeline.hpp"
#include "sysflow/codec/container.hpp"
#include "sysflow/entity_store.hpp"
#include "sysflow/gen/generator.hpp"

namespace sysflow::cli {

enum ExitCode : int { kOk = 0, kDataError = 1, kIoError = 2 };

struct Io {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

struct GenArgs {
  gen::GenOptions options;
  std::string output = "-";
};

struct AggregateArgs {
  std::string input = "-";
  std::string output = "-";
  /// Unset: SF_FLOW_TIMEOUT_SECS if present, else 30.
  std::optional<double> timeout_secs;
  aggregate::OutputFormat format = aggregate::OutputFormat::binary;
  codec::Compression compression = codec::Compression::deflate;
  aggregate::OrphanFdPolicy orphan_fd = aggregate::OrphanFdPolicy::fail;
  std::string hostname = "unknown";
};

enum class PrintFormat { table, jsonl };

struct PrintArgs {
  std::string input = "-";
  PrintFormat format = PrintFormat::table;
  bool lenient = false;
};

struct PolicyArgs {
  std::string input = "-";
  std::vector<std::string> policy_files;
  std::string emit_tagged;  // empty: do not write a tagged stream
  bool every_match = false; // report match rules on every record
  bool lenient = false;
};

struct StatsArgs {
  std::string input = "-";
  std::size_t top = 10;
  bool lenient = false;
};

int cmd_gen(const GenArgs& args, Io io);
int cmd_aggregate(const AggregateArgs& args, Io io);
int cmd_print(const PrintArgs& args, Io io);
int cmd_policy(const PolicyArgs& args, Io io);
int cmd_stats(const StatsArgs& args, Io io);

/// SF_FLOW_TIMEOUT_SECS when set, else `fallback`. Throws
/// std::invalid_argument for a value that is not a positive number.
double timeout_from_env(double fallback);

/// Reads either encoding; the binary magic starts with 'S', JSON with '{'.
class RecordSource {
 public:
  virtual ~RecordSource() = default;

  /// Throws codec::DecodeError or codec::JsonLineError for a bad preamble.
  static std::unique_ptr<RecordSource> open(std::istream& in, bool lenient);

  virtual const Header& header() const = 0;
  virtual std::optional<SfRecord> next() = 0;
  virtual const EntityStore& entities() const = 0;
  virtual bool binary() const = 0;
};

/// Event and flow rows with the columns # Type Process PPID PID Op-Flags
/// Start End Resource Reads Writes Cont-ID. Entities are not shown but are
/// used to fill the columns. Returns the number of rows.
std::size_t print_table(RecordSource& source, std::ostream& out);

/// 2019-04-10T16:47:00.000 (UTC).
std::string format_ts(Timestamp ts);

}  // namespace sysflow::cli
