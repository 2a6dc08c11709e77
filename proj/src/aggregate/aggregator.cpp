#include "sysflow/aggregate/aggregator.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace sysflow::aggregate {

using ingest::FdResource;
using ingest::FileHandle;
using ingest::OpTarget;
using ingest::RawEvent;
using ingest::SocketHandle;
using ingest::Syscall;

namespace {

std::uint64_t bytes_of(std::int64_t ret) { return ret > 0 ? static_cast<std::uint64_t>(ret) : 0; }

bool is_directory_op(Op op) {
  return op == Op::Mkdir || op == Op::Rmdir || op == Op::Mount || op == Op::Umount;
}

}  // namespace

Aggregator::Aggregator(AggregatorConfig config) : config_(config) {
  if (config_.flow_timeout == 0) throw std::invalid_argument("flow timeout must be positive");
  if (config_.max_flow_states == 0) throw std::invalid_argument("flow state cap must be positive");
}

void Aggregator::emit(SfRecord rec) {
  ++stats_.records;
  out_.push_back(std::move(rec));
}

// ---------------------------------------------------------------------------
// Entities

Oid Aggregator::ensure_container(const ingest::ContainerInfo& info, Timestamp ts) {
  auto it = containers_.find(info.id);
  if (it != containers_.end()) return it->second;
  Container c;
  c.oid = next_oid();
  c.ts = ts;
  c.container_id = info.id;
  c.name = info.name;
  c.image = info.image;
  c.container_type = info.type;
  containers_.emplace(info.id, c.oid);
  emit(c);
  return c.oid;
}

// A parent we have never seen gets a placeholder entity carrying only its
// pid, so that the child can reference it. It is filled in if the parent
// shows up later.
Oid Aggregator::ensure_parent(std::uint32_t ppid, std::uint32_t child_pid, Timestamp ts) {
  if (ppid == 0 || ppid == child_pid) return Oid::none;
  if (auto it = procs_.find(ppid); it != procs_.end()) return it->second.entity.oid;
  ProcInfo stub;
  stub.stub = true;
  stub.entity.oid = next_oid();
  stub.entity.ts = ts;
  stub.entity.pid = ppid;
  stub.entity.created_ts = ts;
  const Oid oid = stub.entity.oid;
  emit(stub.entity);
  procs_.emplace(ppid, std::move(stub));
  return oid;
}

Aggregator::ProcInfo& Aggregator::ensure_process(const RawEvent& ev) {
  if (auto it = procs_.find(ev.pid); it != procs_.end() && !it->second.stub) return it->second;

  const Oid container = ev.container ? ensure_container(*ev.container, ev.ts) : Oid::none;
  const Oid parent = ensure_parent(ev.ppid, ev.pid, ev.ts);

  auto it = procs_.find(ev.pid);
  if (it == procs_.end()) {
    ProcInfo info;
    info.entity.oid = next_oid();
    info.entity.created_ts = ev.ts;
    info.entity.pid = ev.pid;
    it = procs_.emplace(ev.pid, std::move(info)).first;
  }
  ProcInfo& proc = it->second;
  proc.stub = false;
  Process& p = proc.entity;
  p.ts = ev.ts;
  p.parent_oid = parent;
  p.container_oid = container;
  p.exe = ev.exe;
  p.args = ev.args;
  p.uid = ev.uid;
  p.gid = ev.gid;
  emit(p);
  return proc;
}

const File& Aggregator::new_file_generation(const std::string& path, FileType type, Timestamp ts) {
  File f;
  f.oid = next_oid();
  f.ts = ts;
  f.path = path;
  f.file_type = type;
  emit(f);
  return files_.insert_or_assign(path, std::move(f)).first->second;
}

const File& Aggregator::ensure_file(const std::string& path, std::optional<FileType> type,
                                    Timestamp ts) {
  if (auto it = files_.find(path); it != files_.end()) return it->second;
  return new_file_generation(path, type.value_or(FileType::regular), ts);
}

void Aggregator::end_file_generation(const std::string& path) { files_.erase(path); }

// ---------------------------------------------------------------------------
// Flow state bookkeeping

void Aggregator::mark_active(FlowState& st, Timestamp ts) {
  if (!st.active) {
    if (st.seq != 0) idle_.erase({st.last_ts, st.seq});
    st.active = true;
    st.start_ts = ts;
    st.seq = ++next_seq_;
    active_.emplace(ActiveKey{st.start_ts, st.seq}, st.key);
  }
  st.last_ts = ts;
}

FlowState& Aggregator::touch(const FlowKey& key, std::uint32_t tid, Timestamp ts) {
  auto it = states_.find(key);
  if (it == states_.end()) {
    enforce_cap();
    FlowState st;
    st.key = key;
    it = states_.emplace(key, st).first;
    by_proc_[key.proc_oid].insert(key);
  }
  FlowState& st = it->second;
  if (!st.active) st.tid = tid;
  mark_active(st, ts);
  return st;
}

SfRecord Aggregator::to_record(const FlowState& st) const {
  const FlowKey& k = st.key;
  switch (k.kind) {
    case RecordKind::ProcessFlow: {
      ProcessFlow f;
      f.proc_oid = k.proc_oid;
      f.start_ts = st.start_ts;
      f.end_ts = st.last_ts;
      f.tid = st.tid;
      f.opflags = st.opflags;
      f.num_threads_cloned = st.threads_cloned;
      f.num_threads_exited = st.threads_exited;
      return f;
    }
    case RecordKind::FileFlow: {
      FileFlow f;
      f.proc_oid = k.proc_oid;
      f.file_oid = k.file_oid;
      f.start_ts = st.start_ts;
      f.end_ts = st.last_ts;
      f.tid = st.tid;
      f.fd = k.fd;
      f.opflags = st.opflags;
      f.num_reads = st.counters[0];
      f.bytes_read = st.counters[1];
      f.num_writes = st.counters[2];
      f.bytes_written = st.counters[3];
      return f;
    }
    case RecordKind::NetworkFlow: {
      NetworkFlow f;
      f.proc_oid = k.proc_oid;
      f.start_ts = st.start_ts;
      f.end_ts = st.last_ts;
      f.tid = st.tid;
      f.fd = k.fd;
      f.net = k.net;
      f.opflags = st.opflags;
      f.num_sends = st.counters[0];
      f.bytes_sent = st.counters[1];
      f.num_recvs = st.counters[2];
      f.bytes_received = st.counters[3];
      return f;
    }
    default:
      throw std::logic_error("flow state with non-flow kind");
  }
}

void Aggregator::export_flow(FlowState& st) {
  if (!st.active) return;
  emit(to_record(st));
  active_.erase({st.start_ts, st.seq});
  st.active = false;
  st.exported_once = true;
  st.opflags.clear();
  std::fill(std::begin(st.counters), std::end(st.counters), 0);
  st.threads_cloned = 0;
  st.threads_exited = 0;
  idle_.emplace(ActiveKey{st.last_ts, st.seq}, st.key);
}

void Aggregator::drop_state(const FlowKey& key) {
  auto it = states_.find(key);
  if (it == states_.end()) return;
  const FlowState& st = it->second;
  if (st.active) {
    active_.erase({st.start_ts, st.seq});
  } else {
    idle_.erase({st.last_ts, st.seq});
  }
  if (auto p = by_proc_.find(key.proc_oid); p != by_proc_.end()) {
    p->second.erase(key);
    if (p->second.empty()) by_proc_.erase(p);
  }
  states_.erase(it);
}

// Exports the live windows among `keys` oldest first, then forgets all of them.
void Aggregator::export_and_drop(std::vector<FlowKey> keys) {
  std::vector<FlowState*> live;
  for (const auto& k : keys) {
    auto it = states_.find(k);
    if (it != states_.end() && it->second.active) live.push_back(&it->second);
  }
  std::sort(live.begin(), live.end(), [](const FlowState* a, const FlowState* b) {
    return std::pair(a->start_ts, a->seq) < std::pair(b->start_ts, b->seq);
  });
  for (FlowState* st : live) export_flow(*st);
  for (const auto& k : keys) drop_state(k);
}

void Aggregator::expire(Timestamp now) {
  while (!active_.empty()) {
    const auto [start, seq] = active_.begin()->first;
    if (now - start < config_.flow_timeout) break;
    export_flow(states_.at(active_.begin()->second));
  }
}

// Makes room for one more state: the least recently used idle state goes
// first (nothing to export), otherwise the oldest live window is exported.
void Aggregator::enforce_cap() {
  while (states_.size() >= config_.max_flow_states) {
    ++stats_.evicted_states;
    if (!idle_.empty()) {
      drop_state(idle_.begin()->second);
    } else {
      const FlowKey key = active_.begin()->second;
      export_flow(states_.at(key));
      drop_state(key);
    }
  }
}

// ---------------------------------------------------------------------------
// Syscall handlers

std::optional<FlowKey> Aggregator::resolve_fd(const RawEvent& ev, const OpTarget& target,
                                              Oid proc_oid) {
  FlowKey key;
  key.proc_oid = proc_oid;
  key.tid = ev.tid;
  key.kind = target.kind;

  auto orphan = [&]() -> std::optional<FlowKey> {
    if (config_.orphan_fd_policy == OrphanFdPolicy::fail) {
      throw ingest::OrphanFdError(ev.pid, ev.fd.value_or(-1));
    }
    ++stats_.dropped_orphans;
    return std::nullopt;
  };
  auto from_handle = [&](const FdResource& res) {
    key.fd = *ev.fd;
    if (const auto* f = std::get_if<FileHandle>(&res)) {
      key.kind = RecordKind::FileFlow;
      key.file_oid = f->file_oid;
    } else {
      key.kind = RecordKind::NetworkFlow;
      key.net = std::get<SocketHandle>(res).net;
    }
    return key;
  };

  switch (ingest::normalize(ev.syscall)) {
    case Syscall::open: {
      const File& file = ensure_file(*ev.path, ev.file_type, ev.ts);
      key.file_oid = file.oid;
      std::int32_t fd = ev.fd.value_or(static_cast<std::int32_t>(ev.ret));
      if (ev.ret < 0) fd = -1;
      key.fd = fd;
      if (fd >= 0) fds_.bind(ev.pid, fd, FileHandle{file.oid, file.path});
      return key;
    }
    case Syscall::read:
    case Syscall::write:
    case Syscall::close:
      // syscall_to_op has already checked that the fd is registered.
      return from_handle(*fds_.find(ev.pid, *ev.fd));
    case Syscall::mmap:
    case Syscall::setns: {
      if (const FdResource* res = fds_.find(ev.pid, *ev.fd)) {
        if (!std::holds_alternative<FileHandle>(*res)) {
          throw AggregateError(std::string(ingest::to_string(ev.syscall)) + " on socket fd " +
                               std::to_string(*ev.fd) + " of pid " + std::to_string(ev.pid));
        }
        return from_handle(*res);
      }
      if (ev.path) {
        key.file_oid = ensure_file(*ev.path, ev.file_type, ev.ts).oid;
        key.fd = *ev.fd;
        return key;
      }
      return orphan();
    }
    case Syscall::accept:
    case Syscall::connect:
      key.fd = ev.ret < 0 ? -1 : *ev.fd;
      key.net = *ev.net;
      if (key.fd >= 0) fds_.bind(ev.pid, key.fd, SocketHandle{*ev.net});
      return key;
    case Syscall::send:
    case Syscall::recv:
    case Syscall::shutdown: {
      if (const FdResource* res = fds_.find(ev.pid, *ev.fd)) {
        if (!std::holds_alternative<SocketHandle>(*res)) {
          throw AggregateError(std::string(ingest::to_string(ev.syscall)) + " on file fd " +
                               std::to_string(*ev.fd) + " of pid " + std::to_string(ev.pid));
        }
        return from_handle(*res);
      }
      if (ev.net) {
        fds_.bind(ev.pid, *ev.fd, SocketHandle{*ev.net});
        key.fd = *ev.fd;
        key.net = *ev.net;
        return key;
      }
      return orphan();
    }
    default:
      throw std::logic_error("resolve_fd on a syscall without descriptor");
  }
}

void Aggregator::on_process_op(const RawEvent& ev, const OpTarget& target, ProcInfo& proc) {
  if (target.kind == RecordKind::ProcessFlow) {
    if (target.op == Op::Exit) {
      on_thread_exit(ev, proc);
      return;
    }
    FlowKey key;
    key.proc_oid = proc.entity.oid;
    key.kind = RecordKind::ProcessFlow;
    FlowState& st = touch(key, ev.tid, ev.ts);
    st.opflags.set(Op::Clone);
    ++st.threads_cloned;
    return;
  }

  ProcessEvent pe;
  pe.proc_oid = proc.entity.oid;
  pe.ts = ev.ts;
  pe.tid = ev.tid;
  pe.opflags = OpFlags::of(target.op);
  pe.ret = ev.ret;
  Process& p = proc.entity;
  switch (target.op) {
    case Op::Exec:
      if (p.exe != ev.exe || p.args != ev.args) {
        p.ts = ev.ts;
        p.exe = ev.exe;
        p.args = ev.args;
        emit(p);
      }
      pe.args_delta = ev.args;
      break;
    case Op::Setuid:
    case Op::Setgid: {
      const bool uid = target.op == Op::Setuid;
      const std::uint32_t value = uid ? ev.uid : ev.gid;
      std::uint32_t& current = uid ? p.uid : p.gid;
      if (ev.ret >= 0 && current != value) {
        current = value;
        p.ts = ev.ts;
        emit(p);
      }
      pe.args_delta = std::to_string(value);
      break;
    }
    case Op::Exit:
      on_process_exit(ev, proc);
      return;
    default:
      break;
  }
  emit(pe);
}

void Aggregator::on_thread_exit(const RawEvent& ev, ProcInfo& proc) {
  std::vector<FlowKey> owned;
  if (auto it = by_proc_.find(proc.entity.oid); it != by_proc_.end()) {
    for (const auto& k : it->second) {
      if (k.kind != RecordKind::ProcessFlow && k.tid == ev.tid) owned.push_back(k);
    }
  }
  export_and_drop(std::move(owned));

  FlowKey key;
  key.proc_oid = proc.entity.oid;
  key.kind = RecordKind::ProcessFlow;
  FlowState& st = touch(key, ev.tid, ev.ts);
  st.opflags.set(Op::Exit);
  ++st.threads_exited;
}

void Aggregator::on_process_exit(const RawEvent& ev, ProcInfo& proc) {
  const Oid oid = proc.entity.oid;
  if (auto it = by_proc_.find(oid); it != by_proc_.end()) {
    export_and_drop({it->second.begin(), it->second.end()});
  }
  ProcessEvent pe;
  pe.proc_oid = oid;
  pe.ts = ev.ts;
  pe.tid = ev.tid;
  pe.opflags = OpFlags::of(Op::Exit);
  pe.ret = ev.ret;
  emit(pe);
  fds_.release_process(ev.pid);
  procs_.erase(ev.pid);
}

void Aggregator::on_file_event(const RawEvent& ev, Op op, ProcInfo& proc) {
  std::optional<FileType> type = ev.file_type;
  if (!type && is_directory_op(op)) type = FileType::directory;
  const File& src = ensure_file(*ev.path, type, ev.ts);
  const Oid src_oid = src.oid;
  const FileType src_type = src.file_type;

  FileEvent fe;
  fe.proc_oid = proc.entity.oid;
  fe.file_oid = src_oid;
  fe.ts = ev.ts;
  fe.tid = ev.tid;
  fe.opflags = OpFlags::of(op);
  fe.ret = ev.ret;
  if (op == Op::Rename || op == Op::Link || op == Op::Symlink) {
    const FileType dst_type = op == Op::Symlink ? FileType::regular : src_type;
    fe.new_file_oid = new_file_generation(*ev.new_path, dst_type, ev.ts).oid;
  }
  emit(fe);

  if (ev.ret >= 0) {
    if (op == Op::Unlink || op == Op::Rmdir) end_file_generation(*ev.path);
    if (op == Op::Rename && *ev.new_path != *ev.path) {
      // The destination entry now owns the path; only drop the source name
      // when it still maps to the source generation.
      if (auto it = files_.find(*ev.path); it != files_.end() && it->second.oid == src_oid) {
        files_.erase(it);
      }
    }
  }
}

void Aggregator::on_network_event(const RawEvent& ev, Op op, ProcInfo& proc,
                                  const NetTuple& net) {
  NetworkEvent ne;
  ne.proc_oid = proc.entity.oid;
  ne.ts = ev.ts;
  ne.tid = ev.tid;
  ne.opflags = OpFlags::of(op);
  ne.net = net;
  emit(ne);
}

void Aggregator::on_flow_op(const RawEvent& ev, const OpTarget& target, ProcInfo& proc,
                            const FlowKey& key) {
  (void)proc;
  FlowState& st = touch(key, ev.tid, ev.ts);
  st.opflags.set(target.op);
  const std::uint64_t bytes = bytes_of(ev.ret);
  if (key.kind == RecordKind::FileFlow) {
    if (target.op == Op::Read) {
      ++st.counters[0];
      st.counters[1] += bytes;
    } else if (target.op == Op::Write) {
      ++st.counters[2];
      st.counters[3] += bytes;
    }
  } else if (key.kind == RecordKind::NetworkFlow) {
    if (target.op == Op::Send) {
      ++st.counters[0];
      st.counters[1] += bytes;
    } else if (target.op == Op::Recv) {
      ++st.counters[2];
      st.counters[3] += bytes;
    }
  }
}

void Aggregator::on_close(const RawEvent& ev, ProcInfo& proc, const FlowKey& key) {
  // Other threads' flows on the same descriptor end with it, without CLOSE.
  std::vector<FlowKey> others;
  if (auto it = by_proc_.find(proc.entity.oid); it != by_proc_.end()) {
    for (const auto& k : it->second) {
      if (k.tid != key.tid && k.kind == key.kind && k.fd == key.fd &&
          k.file_oid == key.file_oid && k.net == key.net) {
        others.push_back(k);
      }
    }
  }
  export_and_drop(std::move(others));

  FlowState& st = touch(key, ev.tid, ev.ts);
  st.opflags.set(Op::Close);
  export_flow(st);
  drop_state(key);
  if (key.fd >= 0) fds_.release(ev.pid, key.fd);
}

std::vector<SfRecord> Aggregator::process_event(const RawEvent& ev) {
  out_.clear();
  if (last_ts_ && ev.ts < *last_ts_) {
    throw AggregateError("event time " + std::to_string(ev.ts) + " precedes " +
                         std::to_string(*last_ts_));
  }
  last_ts_ = ev.ts;
  ++stats_.raw_events;
  expire(ev.ts);

  OpTarget target;
  try {
    target = ingest::syscall_to_op(ev, fds_);
  } catch (const ingest::OrphanFdError&) {
    if (config_.orphan_fd_policy == OrphanFdPolicy::fail) throw;
    ++stats_.dropped_orphans;
    return std::move(out_);
  }

  // Resolve descriptors before creating the process so that a dropped event
  // leaves no trace.
  std::optional<FlowKey> key;
  std::optional<NetTuple> net;
  if (target.kind == RecordKind::FileFlow || target.kind == RecordKind::NetworkFlow) {
    key = resolve_fd(ev, target, Oid::none);
    if (!key) return std::move(out_);
  } else if (target.kind == RecordKind::NetworkEvent) {
    if (ev.net) {
      net = ev.net;
      if (ev.fd && *ev.fd >= 0) fds_.bind(ev.pid, *ev.fd, SocketHandle{*ev.net});
    } else if (const FdResource* res = ev.fd ? fds_.find(ev.pid, *ev.fd) : nullptr;
               res != nullptr && std::holds_alternative<SocketHandle>(*res)) {
      net = std::get<SocketHandle>(*res).net;
    } else if (config_.orphan_fd_policy == OrphanFdPolicy::fail) {
      throw ingest::OrphanFdError(ev.pid, ev.fd.value_or(-1));
    } else {
      ++stats_.dropped_orphans;
      return std::move(out_);
    }
  }

  ProcInfo& proc = ensure_process(ev);
  switch (target.kind) {
    case RecordKind::ProcessEvent:
    case RecordKind::ProcessFlow:
      on_process_op(ev, target, proc);
      break;
    case RecordKind::FileEvent:
      on_file_event(ev, target.op, proc);
      break;
    case RecordKind::NetworkEvent:
      on_network_event(ev, target.op, proc, *net);
      break;
    case RecordKind::FileFlow:
    case RecordKind::NetworkFlow:
      key->proc_oid = proc.entity.oid;
      if (target.op == Op::Close) {
        on_close(ev, proc, *key);
      } else {
        on_flow_op(ev, target, proc, *key);
      }
      break;
    default:
      throw std::logic_error("unexpected record kind for syscall");
  }
  return std::move(out_);
}

std::vector<SfRecord> Aggregator::finalize() {
  out_.clear();
  std::vector<FlowKey> live;
  for (const auto& [order, key] : active_) live.push_back(key);
  for (const auto& key : live) export_flow(states_.at(key));
  states_.clear();
  active_.clear();
  idle_.clear();
  by_proc_.clear();
  return std::move(out_);
}

}  // namespace sysflow::aggregate
