#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "sysflow/error.hpp"
#include "sysflow/ingest/raw_event.hpp"
#include "sysflow/ingest/syscall_map.hpp"
#include "sysflow/model.hpp"

namespace sysflow::aggregate {

inline constexpr Timestamp kNanosPerSecond = 1'000'000'000;

enum class OrphanFdPolicy { drop, fail };

struct AggregatorConfig {
  Timestamp flow_timeout = 30 * kNanosPerSecond;
  OrphanFdPolicy orphan_fd_policy = OrphanFdPolicy::fail;
  /// Live flow states before the oldest one is forced out.
  std::size_t max_flow_states = 1'000'000;
};

/// Input the aggregator cannot lift: time going backwards, or a syscall on a
/// resource of the wrong kind.
class AggregateError : public Error {
 public:
  using Error::Error;
};

/// Identity of a flow. ProcessFlows are one per process (tid 0 here; the
/// record carries the tid of the thread that opened the window).
struct FlowKey {
  Oid proc_oid = Oid::none;
  std::uint32_t tid = 0;
  RecordKind kind = RecordKind::FileFlow;
  Oid file_oid = Oid::none;
  std::int32_t fd = -1;
  NetTuple net;

  auto operator<=>(const FlowKey&) const = default;
};

struct FlowState {
  FlowKey key;
  std::uint32_t tid = 0;
  Timestamp start_ts = 0;
  Timestamp last_ts = 0;
  OpFlags opflags;
  // FileFlow: reads, bytes read, writes, bytes written.
  // NetworkFlow: sends, bytes sent, recvs, bytes received.
  std::uint64_t counters[4] = {0, 0, 0, 0};
  std::uint64_t threads_cloned = 0;
  std::uint64_t threads_exited = 0;
  bool active = false;  // at least one op since the last export
  bool exported_once = false;
  std::uint64_t seq = 0;  // tie-break for emission order
};

struct AggregatorStats {
  std::uint64_t raw_events = 0;
  std::uint64_t records = 0;
  std::uint64_t dropped_orphans = 0;
  std::uint64_t evicted_states = 0;
};

/// Event-time state machine from raw syscalls to entities, events and flows.
///
/// Flow windows are anchored at the first op after creation or export. Before
/// each event, every window that has lasted the timeout is exported with
/// end_ts = last op, and its counters and flags are reset; a window without
/// ops is never exported. close exports the flow with CLOSE (after exporting
/// other threads' flows on the same descriptor); a thread exit exports that
/// thread's file and network flows; a process exit exports everything the
/// process owns ahead of its EXIT event.
class Aggregator {
 public:
  explicit Aggregator(AggregatorConfig config = {});

  /// Records produced by `ev`, entities first. Throws AggregateError,
  /// ingest::OrphanFdError (policy fail).
  std::vector<SfRecord> process_event(const ingest::RawEvent& ev);

  /// Exports every live window; state is empty afterwards.
  std::vector<SfRecord> finalize();

  const AggregatorConfig& config() const { return config_; }
  const AggregatorStats& stats() const { return stats_; }
  std::size_t live_flow_states() const { return states_.size(); }

 private:
  struct ProcInfo {
    Process entity;
    bool stub = false;
  };

  using ActiveKey = std::pair<Timestamp, std::uint64_t>;

  Oid next_oid() { return static_cast<Oid>(++last_oid_); }
  void emit(SfRecord rec);

  // Entities.
  ProcInfo& ensure_process(const ingest::RawEvent& ev);
  Oid ensure_parent(std::uint32_t ppid, std::uint32_t child_pid, Timestamp ts);
  Oid ensure_container(const ingest::ContainerInfo& info, Timestamp ts);
  const File& ensure_file(const std::string& path, std::optional<FileType> type, Timestamp ts);
  const File& new_file_generation(const std::string& path, FileType type, Timestamp ts);
  void end_file_generation(const std::string& path);

  // Flow state bookkeeping.
  FlowState& touch(const FlowKey& key, std::uint32_t tid, Timestamp ts);
  void mark_active(FlowState& st, Timestamp ts);
  void export_flow(FlowState& st);
  void drop_state(const FlowKey& key);
  void export_and_drop(std::vector<FlowKey> keys);
  void expire(Timestamp now);
  void enforce_cap();
  SfRecord to_record(const FlowState& st) const;

  // Per-syscall handlers.
  void on_process_op(const ingest::RawEvent& ev, const ingest::OpTarget& target, ProcInfo& proc);
  void on_file_event(const ingest::RawEvent& ev, Op op, ProcInfo& proc);
  void on_network_event(const ingest::RawEvent& ev, Op op, ProcInfo& proc,
                        const NetTuple& net);
  void on_flow_op(const ingest::RawEvent& ev, const ingest::OpTarget& target, ProcInfo& proc,
                  const FlowKey& key);
  void on_close(const ingest::RawEvent& ev, ProcInfo& proc, const FlowKey& key);
  void on_thread_exit(const ingest::RawEvent& ev, ProcInfo& proc);
  void on_process_exit(const ingest::RawEvent& ev, ProcInfo& proc);

  /// Resolves the flow key for an fd-based op, or nullopt when the event is
  /// dropped under the orphan policy.
  std::optional<FlowKey> resolve_fd(const ingest::RawEvent& ev, const ingest::OpTarget& target,
                                    Oid proc_oid);

  AggregatorConfig config_;
  AggregatorStats stats_;
  std::vector<SfRecord> out_;
  std::optional<Timestamp> last_ts_;
  std::uint64_t last_oid_ = 0;
  std::uint64_t next_seq_ = 0;

  std::unordered_map<std::uint32_t, ProcInfo> procs_;  // by pid, current generation
  std::map<std::string, Oid> containers_;              // by container id
  std::map<std::string, File> files_;                  // by path, current generation
  ingest::FdRegistry fds_;

  std::map<FlowKey, FlowState> states_;
  std::map<ActiveKey, FlowKey> active_;  // (start_ts, seq)
  std::map<ActiveKey, FlowKey> idle_;    // (last_ts, seq)
  std::map<Oid, std::set<FlowKey>> by_proc_;
};

}  // namespace sysflow::aggregate
