#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "sysflow/aggregate/aggregator.hpp"
#include "sysflow/codec/container.hpp"
#include "sysflow/record_sink.hpp"

namespace sysflow::aggregate {

enum class OutputFormat { binary, jsonl };

struct AggregateOptions {
  AggregatorConfig config;
  OutputFormat format = OutputFormat::binary;
  codec::WriteOptions write;
  std::string hostname = "unknown";
};

struct CompressionStats {
  std::uint64_t raw_events = 0;
  std::uint64_t sf_records = 0;  // header excluded
  std::uint64_t entity_records = 0;
  /// raw_events / sf_records (0 when nothing was produced).
  double ratio = 0.0;
  std::uint64_t bytes = 0;
};

/// Header for a stream whose first raw event happened at `first_ts`.
Header make_header(const std::string& hostname, Timestamp first_ts);

/// Aggregates an in-memory trace; the result has no header.
std::vector<SfRecord> aggregate_events(std::span<const ingest::RawEvent> events,
                                       const AggregatorConfig& config = {});

/// Raw JSON lines in, encoded stream out.
CompressionStats aggregate_stream(std::istream& raw, std::ostream& out,
                                  const AggregateOptions& opts = {});

/// File version of aggregate_stream; "-" means stdin/stdout. Throws IoError
/// when a file cannot be opened.
CompressionStats aggregate_file(const std::string& raw_path, const std::string& out_path,
                                const AggregateOptions& opts = {});

}  // namespace sysflow::aggregate
