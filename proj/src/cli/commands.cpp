#include "sysflow/cli/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "sysflow/codec/json_lines.hpp"
#include "sysflow/policy/parser.hpp"
#include "sysflow/policy/runner.hpp"

namespace sysflow::cli {

namespace {

class Input {
 public:
  Input(const std::string& path, std::istream& fallback) : stream_(&fallback) {
    if (path == "-") return;
    file_.open(path, std::ios::binary);
    if (!file_) throw IoError("cannot open " + path);
    stream_ = &file_;
  }
  std::istream& get() { return *stream_; }

 private:
  std::ifstream file_;
  std::istream* stream_;
};

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : path_(path), stream_(&fallback) {
    if (path == "-") return;
    file_.open(path, std::ios::binary | std::ios::trunc);
    if (!file_) throw IoError("cannot create " + path);
    stream_ = &file_;
  }
  std::ostream& get() { return *stream_; }

  void close() {
    stream_->flush();
    bool ok = static_cast<bool>(*stream_);
    if (file_.is_open()) {
      file_.close();
      ok = ok && !file_.fail();
    }
    if (!ok) throw IoError("cannot write " + (path_ == "-" ? std::string("stdout") : path_));
  }

 private:
  std::string path_;
  std::ofstream file_;
  std::ostream* stream_;
};

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const IoError& e) {
    err << "sysflow: " << e.what() << '\n';
    return kIoError;
  } catch (const std::exception& e) {
    err << "sysflow: " << e.what() << '\n';
    return kDataError;
  }
}

double parse_timeout(const std::string& text) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !std::isfinite(v) || v <= 0) {
    throw std::invalid_argument("SF_FLOW_TIMEOUT_SECS must be a positive number, got '" + text +
                                "'");
  }
  return v;
}

}  // namespace

double timeout_from_env(double fallback) {
  const char* env = std::getenv("SF_FLOW_TIMEOUT_SECS");
  if (env == nullptr || *env == '\0') return fallback;
  return parse_timeout(env);
}

int cmd_gen(const GenArgs& args, Io io) {
  return guarded(io.err, [&] {
    gen::validate(args.options);
    Output out(args.output, io.out);
    const auto events = gen::generate(args.options);
    gen::write_trace(events, out.get());
    out.close();
    io.err << "generated " << events.size() << " raw events (" << to_string(args.options.profile)
           << ")\n";
    return kOk;
  });
}

int cmd_aggregate(const AggregateArgs& args, Io io) {
  return guarded(io.err, [&] {
    const double secs = args.timeout_secs ? *args.timeout_secs : timeout_from_env(30.0);
    if (!std::isfinite(secs) || secs <= 0 || secs > 1e9) {
      throw std::invalid_argument("--timeout-secs must be positive");
    }
    aggregate::AggregateOptions opts;
    opts.config.flow_timeout =
        std::max<Timestamp>(1, static_cast<Timestamp>(std::llround(secs * 1e9)));
    opts.config.orphan_fd_policy = args.orphan_fd;
    opts.format = args.format;
    opts.write.compression = args.compression;
    opts.hostname = args.hostname;

    Input in(args.input, io.in);
    Output out(args.output, io.out);
    const auto stats = aggregate::aggregate_stream(in.get(), out.get(), opts);
    out.close();
    char ratio[32];
    std::snprintf(ratio, sizeof ratio, "%.2f", stats.ratio);
    io.err << "raw_events=" << stats.raw_events << " sf_records=" << stats.sf_records
           << " events_flows=" << stats.sf_records - stats.entity_records << " ratio=" << ratio
           << " bytes=" << stats.bytes << '\n';
    return kOk;
  });
}

int cmd_print(const PrintArgs& args, Io io) {
  return guarded(io.err, [&] {
    Input in(args.input, io.in);
    auto source = RecordSource::open(in.get(), args.lenient);
    if (args.format == PrintFormat::table) {
      print_table(*source, io.out);
    } else {
      codec::JsonLinesWriter writer(io.out, source->header());
      while (auto rec = source->next()) writer.put(*rec);
      writer.finish();
    }
    io.out.flush();
    if (!io.out) throw IoError("cannot write output");
    return kOk;
  });
}

int cmd_policy(const PolicyArgs& args, Io io) {
  return guarded(io.err, [&] {
    if (args.policy_files.empty()) throw std::invalid_argument("no policy files given");
    if (args.emit_tagged == "-") {
      throw std::invalid_argument("--emit-tagged needs a file; stdout carries the findings");
    }
    const policy::Policy pol = policy::load_policy_files(args.policy_files);

    Input in(args.input, io.in);
    auto source = RecordSource::open(in.get(), args.lenient);

    std::optional<Output> tagged;
    std::optional<codec::OstreamByteSink> bytes;
    std::unique_ptr<RecordSink> sink;
    if (!args.emit_tagged.empty()) {
      tagged.emplace(args.emit_tagged, io.out);
      if (source->binary()) {
        bytes.emplace(tagged->get());
        sink = std::make_unique<codec::StreamWriter>(*bytes, source->header());
      } else {
        sink = std::make_unique<codec::JsonLinesWriter>(tagged->get(), source->header());
      }
    }

    policy::PolicyRunner runner(pol, policy::RunOptions{!args.every_match});
    std::size_t findings = 0;
    while (auto rec = source->next()) {
      for (const auto& f : runner.process(*rec)) {
        io.out << policy::finding_to_json(f) << '\n';
        ++findings;
      }
      if (sink) sink->put(*rec);
    }
    if (sink) sink->finish();
    if (tagged) tagged->close();
    io.out.flush();
    if (!io.out) throw IoError("cannot write output");
    io.err << "records=" << runner.records_seen() << " findings=" << findings << '\n';
    return kOk;
  });
}

int cmd_stats(const StatsArgs& args, Io io) {
  return guarded(io.err, [&] {
    Input in(args.input, io.in);
    auto source = RecordSource::open(in.get(), args.lenient);

    constexpr RecordKind kKinds[] = {
        RecordKind::Container,    RecordKind::Process,     RecordKind::File,
        RecordKind::ProcessEvent, RecordKind::ProcessFlow, RecordKind::FileEvent,
        RecordKind::FileFlow,     RecordKind::NetworkEvent, RecordKind::NetworkFlow};
    std::map<RecordKind, std::uint64_t> by_kind;
    std::uint64_t op_counts[kOpCount] = {};
    std::map<std::string, std::uint64_t> io_totals{
        {"file_reads", 0}, {"file_read_bytes", 0}, {"file_writes", 0}, {"file_write_bytes", 0},
        {"net_recvs", 0},  {"net_recv_bytes", 0},  {"net_sends", 0},   {"net_send_bytes", 0},
        {"threads_cloned", 0}, {"threads_exited", 0}};
    struct ProcCount {
      std::uint32_t pid = 0;
      std::string command;
      std::uint64_t records = 0;
    };
    std::map<Oid, ProcCount> procs;
    std::uint64_t total = 0;

    while (auto rec = source->next()) {
      ++total;
      ++by_kind[rec->kind()];
      if (is_entity(rec->kind())) continue;
      const OpFlags flags = opflags_of(*rec);
      for (int op = 0; op < kOpCount; ++op) {
        if (flags.has(static_cast<Op>(op))) ++op_counts[op];
      }
      if (const auto* f = rec->get_if<FileFlow>()) {
        io_totals["file_reads"] += f->num_reads;
        io_totals["file_read_bytes"] += f->bytes_read;
        io_totals["file_writes"] += f->num_writes;
        io_totals["file_write_bytes"] += f->bytes_written;
      } else if (const auto* f = rec->get_if<NetworkFlow>()) {
        io_totals["net_recvs"] += f->num_recvs;
        io_totals["net_recv_bytes"] += f->bytes_received;
        io_totals["net_sends"] += f->num_sends;
        io_totals["net_send_bytes"] += f->bytes_sent;
      } else if (const auto* f = rec->get_if<ProcessFlow>()) {
        io_totals["threads_cloned"] += f->num_threads_cloned;
        io_totals["threads_exited"] += f->num_threads_exited;
      }
      const Oid oid = proc_oid_of(*rec);
      ProcCount& pc = procs[oid];
      if (const Process* p = source->entities().process(oid)) {
        pc.pid = p->pid;
        pc.command = command_line(*p);
      }
      ++pc.records;
    }

    nlohmann::ordered_json j;
    j["records"] = total;
    nlohmann::ordered_json kinds = nlohmann::ordered_json::object();
    for (RecordKind k : kKinds) kinds[std::string(kind_abbrev(k))] = by_kind[k];
    j["by_type"] = std::move(kinds);
    nlohmann::ordered_json ops = nlohmann::ordered_json::object();
    for (int op = 0; op < kOpCount; ++op) {
      ops[std::string(op_name(static_cast<Op>(op)))] = op_counts[op];
    }
    j["ops"] = std::move(ops);
    nlohmann::ordered_json totals = nlohmann::ordered_json::object();
    for (const char* key : {"file_reads", "file_read_bytes", "file_writes", "file_write_bytes",
                            "net_recvs", "net_recv_bytes", "net_sends", "net_send_bytes",
                            "threads_cloned", "threads_exited"}) {
      totals[key] = io_totals[key];
    }
    j["io"] = std::move(totals);

    std::vector<std::pair<Oid, ProcCount>> ranked(procs.begin(), procs.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.second.records != b.second.records) return a.second.records > b.second.records;
      if (a.second.pid != b.second.pid) return a.second.pid < b.second.pid;
      return a.first < b.first;
    });
    if (ranked.size() > args.top) ranked.resize(args.top);
    nlohmann::ordered_json top = nlohmann::ordered_json::array();
    for (const auto& [oid, pc] : ranked) {
      top.push_back({{"pid", pc.pid}, {"process", pc.command}, {"records", pc.records}});
    }
    j["top_processes"] = std::move(top);

    io.out << j.dump(2) << '\n';
    io.out.flush();
    if (!io.out) throw IoError("cannot write output");
    return kOk;
  });
}

}  // namespace sysflow::cli
