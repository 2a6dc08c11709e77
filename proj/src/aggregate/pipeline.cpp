#include "sysflow/aggregate/pipeline.hpp"

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include "sysflow/codec/json_lines.hpp"

namespace sysflow::aggregate {

namespace {

// Counts bytes on their way to the real stream.
class CountingBuf : public std::streambuf {
 public:
  explicit CountingBuf(std::streambuf* target) : target_(target) {}
  std::uint64_t count() const { return count_; }

 protected:
  int_type overflow(int_type ch) override {
    if (traits_type::eq_int_type(ch, traits_type::eof())) return traits_type::not_eof(ch);
    ++count_;
    return target_->sputc(traits_type::to_char_type(ch));
  }
  std::streamsize xsputn(const char* s, std::streamsize n) override {
    const std::streamsize written = target_->sputn(s, n);
    count_ += static_cast<std::uint64_t>(written);
    return written;
  }
  int sync() override { return target_->pubsync(); }

 private:
  std::streambuf* target_;
  std::uint64_t count_ = 0;
};

}  // namespace

Header make_header(const std::string& hostname, Timestamp first_ts) {
  Header h;
  h.version = 1;
  h.hostname = hostname;
  h.exported_at = first_ts;
  return h;
}

std::vector<SfRecord> aggregate_events(std::span<const ingest::RawEvent> events,
                                       const AggregatorConfig& config) {
  Aggregator agg(config);
  std::vector<SfRecord> out;
  for (const auto& ev : events) {
    auto recs = agg.process_event(ev);
    out.insert(out.end(), std::make_move_iterator(recs.begin()),
               std::make_move_iterator(recs.end()));
  }
  auto tail = agg.finalize();
  out.insert(out.end(), std::make_move_iterator(tail.begin()), std::make_move_iterator(tail.end()));
  return out;
}

CompressionStats aggregate_stream(std::istream& raw, std::ostream& out,
                                  const AggregateOptions& opts) {
  ingest::RawTraceReader reader(raw);
  Aggregator agg(opts.config);

  std::optional<ingest::RawEvent> first = reader.next();
  const Header header = make_header(opts.hostname, first ? first->ts : 0);

  CountingBuf counter(out.rdbuf());
  std::ostream counted(&counter);

  std::unique_ptr<codec::OstreamByteSink> bytes;
  std::unique_ptr<RecordSink> sink;
  if (opts.format == OutputFormat::binary) {
    bytes = std::make_unique<codec::OstreamByteSink>(counted);
    sink = std::make_unique<codec::StreamWriter>(*bytes, header, opts.write);
  } else {
    sink = std::make_unique<codec::JsonLinesWriter>(counted, header);
  }

  std::uint64_t entities = 0;
  auto feed = [&](const std::vector<SfRecord>& recs) {
    for (const auto& r : recs) {
      if (is_entity(r.kind())) ++entities;
      sink->put(r);
    }
  };
  for (auto ev = std::move(first); ev; ev = reader.next()) {
    try {
      feed(agg.process_event(*ev));
    } catch (const IoError&) {
      throw;
    } catch (const Error& e) {
      // Point at the input line that triggered the failure.
      throw AggregateError("line " + std::to_string(reader.line_no()) + ": " + e.what());
    }
  }
  feed(agg.finalize());
  sink->finish();
  counted.flush();
  if (!out) throw IoError("write to output failed");

  CompressionStats stats;
  stats.raw_events = agg.stats().raw_events;
  stats.sf_records = agg.stats().records;
  stats.entity_records = entities;
  stats.ratio = stats.sf_records == 0
                    ? 0.0
                    : static_cast<double>(stats.raw_events) / static_cast<double>(stats.sf_records);
  stats.bytes = counter.count();
  return stats;
}

CompressionStats aggregate_file(const std::string& raw_path, const std::string& out_path,
                                const AggregateOptions& opts) {
  std::ifstream in_file;
  std::istream* in = &std::cin;
  if (raw_path != "-") {
    in_file.open(raw_path, std::ios::binary);
    if (!in_file) throw IoError("cannot open " + raw_path);
    in = &in_file;
  }
  std::ofstream out_file;
  std::ostream* out = &std::cout;
  if (out_path != "-") {
    out_file.open(out_path, std::ios::binary | std::ios::trunc);
    if (!out_file) throw IoError("cannot create " + out_path);
    out = &out_file;
  }
  CompressionStats stats = aggregate_stream(*in, *out, opts);
  if (out_file.is_open()) {
    out_file.close();
    if (!out_file) throw IoError("cannot write " + out_path);
  }
  return stats;
}

}  // namespace sysflow::aggregate
