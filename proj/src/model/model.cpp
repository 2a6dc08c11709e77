#include "sysflow/model.hpp"

#include <array>
#include <charconv>
#include <string>

#include "sysflow/error.hpp"

namespace sysflow {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr std::array<std::string_view, kRecordKindCount> kKindNames = {
    "Header",      "Container", "Process",   "File",         "ProcessEvent",
    "ProcessFlow", "FileEvent", "FileFlow",  "NetworkEvent", "NetworkFlow",
};

constexpr std::array<std::string_view, kRecordKindCount> kKindAbbrevs = {
    "H", "C", "P", "F", "PE", "PF", "FE", "FF", "NE", "NF",
};

constexpr std::array<std::string_view, kOpCount> kOpNames = {
    "CLONE",  "EXEC",   "EXIT",  "SETUID",  "SETGID",   "BIND",  "LISTEN",
    "MKDIR",  "RMDIR",  "UNLINK", "SYMLINK", "LINK",    "RENAME", "CHMOD",
    "CHOWN",  "MOUNT",  "UMOUNT", "ACCEPT",  "CONNECT", "SEND",  "RECV",
    "SHUTDOWN", "CLOSE", "OPEN",  "READ",    "WRITE",   "SETNS", "MMAP",
};

std::string describe_bit(Op op, RecordKind kind) {
  return std::string(op_name(op)) + " is not a valid operation for " +
         std::string(kind_name(kind));
}

}  // namespace

std::string_view kind_name(RecordKind kind) {
  return kKindNames.at(static_cast<std::size_t>(kind));
}

std::string_view kind_abbrev(RecordKind kind) {
  return kKindAbbrevs.at(static_cast<std::size_t>(kind));
}

std::optional<RecordKind> kind_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name || kKindAbbrevs[i] == name) {
      return static_cast<RecordKind>(i);
    }
  }
  return std::nullopt;
}

std::string_view op_name(Op op) { return kOpNames.at(static_cast<std::size_t>(op)); }

std::optional<Op> op_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kOpNames.size(); ++i) {
    if (kOpNames[i] == name) return static_cast<Op>(i);
  }
  return std::nullopt;
}

OpFlags allowed_ops(RecordKind kind) {
  switch (kind) {
    case RecordKind::ProcessEvent:
      return Op::Clone | Op::Exec | Op::Exit | Op::Setuid | Op::Setgid;
    case RecordKind::NetworkEvent:
      return Op::Bind | Op::Listen;
    case RecordKind::FileEvent:
      return Op::Mkdir | Op::Rmdir | Op::Unlink | Op::Symlink | Op::Link |
             Op::Rename | Op::Chmod | Op::Chown | Op::Mount | Op::Umount;
    case RecordKind::ProcessFlow:
      return Op::Clone | Op::Exit;
    case RecordKind::NetworkFlow:
      return Op::Accept | Op::Connect | Op::Send | Op::Recv | Op::Shutdown | Op::Close;
    case RecordKind::FileFlow:
      return Op::Open | Op::Read | Op::Write | Op::Setns | Op::Mmap | Op::Close;
    default:
      return OpFlags{};
  }
}

std::string opflags_to_string(OpFlags flags, RecordKind kind) {
  if (is_entity(kind)) {
    throw ValidationError(std::string(kind_name(kind)) + " records carry no op flags");
  }
  const OpFlags allowed = allowed_ops(kind);
  for (int i = 0; i < 32; ++i) {
    if ((flags.bits() >> i & 1u) == 0) continue;
    if (i >= kOpCount) {
      throw ValidationError("unknown op flag bit " + std::to_string(i));
    }
    if (!allowed.has(static_cast<Op>(i))) {
      throw ValidationError(describe_bit(static_cast<Op>(i), kind));
    }
  }

  if (is_event(kind)) {
    if (flags.count() != 1) {
      throw ValidationError(std::string(kind_name(kind)) +
                            " must have exactly one op flag, has " +
                            std::to_string(flags.count()));
    }
    return std::string(op_name(static_cast<Op>(std::countr_zero(flags.bits()))));
  }

  if (flags.empty()) {
    throw ValidationError(std::string(kind_name(kind)) + " must have at least one op flag");
  }

  auto slot = [&](Op op, char c) { return flags.has(op) ? c : ' '; };
  auto pair_slot = [&](Op a, char ca, Op b, char cb) {
    if (flags.has(a) && flags.has(b)) return 'B';
    if (flags.has(a)) return ca;
    if (flags.has(b)) return cb;
    return ' ';
  };

  std::string out;
  std::string extras;
  switch (kind) {
    case RecordKind::FileFlow:
      out = {slot(Op::Open, 'O'), ' ', pair_slot(Op::Read, 'R', Op::Write, 'W'), ' ',
             slot(Op::Close, 'C')};
      if (flags.has(Op::Mmap)) extras += "+MMAP";
      if (flags.has(Op::Setns)) extras += "+SETNS";
      break;
    case RecordKind::NetworkFlow:
      out = {pair_slot(Op::Accept, 'A', Op::Connect, 'C'), ' ', slot(Op::Send, 'S'),
             slot(Op::Recv, 'R'), ' ', slot(Op::Close, 'C')};
      if (flags.has(Op::Shutdown)) extras += "+SHUTDOWN";
      break;
    case RecordKind::ProcessFlow:
      out = {slot(Op::Clone, 'C'), ' ', slot(Op::Exit, 'E')};
      break;
    default:
      break;
  }
  return out + extras;
}

std::string opflags_names(OpFlags flags) {
  std::string out;
  for (int i = 0; i < kOpCount; ++i) {
    if (!flags.has(static_cast<Op>(i))) continue;
    if (!out.empty()) out += '|';
    out += op_name(static_cast<Op>(i));
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string_view to_string(ContainerType t) {
  switch (t) {
    case ContainerType::docker: return "docker";
    case ContainerType::lxc: return "lxc";
    case ContainerType::other: return "other";
  }
  return "other";
}

std::string_view to_string(FileType t) {
  switch (t) {
    case FileType::regular: return "regular";
    case FileType::directory: return "directory";
    case FileType::pipe: return "pipe";
    case FileType::unix_socket: return "unix_socket";
    case FileType::device: return "device";
  }
  return "regular";
}

std::string_view to_string(Proto p) { return p == Proto::udp ? "udp" : "tcp"; }

std::optional<ContainerType> container_type_from_string(std::string_view s) {
  if (s == "docker") return ContainerType::docker;
  if (s == "lxc") return ContainerType::lxc;
  if (s == "other") return ContainerType::other;
  return std::nullopt;
}

std::optional<FileType> file_type_from_string(std::string_view s) {
  if (s == "regular") return FileType::regular;
  if (s == "directory") return FileType::directory;
  if (s == "pipe") return FileType::pipe;
  if (s == "unix_socket") return FileType::unix_socket;
  if (s == "device") return FileType::device;
  return std::nullopt;
}

std::optional<Proto> proto_from_string(std::string_view s) {
  if (s == "tcp") return Proto::tcp;
  if (s == "udp") return Proto::udp;
  return std::nullopt;
}

std::string ipv4_to_string(std::uint32_t ip) {
  return std::to_string(ip >> 24) + '.' + std::to_string(ip >> 16 & 0xFF) + '.' +
         std::to_string(ip >> 8 & 0xFF) + '.' + std::to_string(ip & 0xFF);
}

std::optional<std::uint32_t> parse_ipv4(std::string_view text) {
  std::uint32_t ip = 0;
  const char* p = text.data();
  const char* end = text.data() + text.size();
  for (int octet = 0; octet < 4; ++octet) {
    if (octet > 0) {
      if (p == end || *p != '.') return std::nullopt;
      ++p;
    }
    unsigned value = 0;
    auto [next, ec] = std::from_chars(p, end, value);
    if (ec != std::errc{} || next == p || next - p > 3 || value > 255) return std::nullopt;
    ip = ip << 8 | value;
    p = next;
  }
  if (p != end) return std::nullopt;
  return ip;
}

std::string to_string(const NetTuple& net) {
  return ipv4_to_string(net.sip) + ':' + std::to_string(net.sport) + " -- " +
         ipv4_to_string(net.dip) + ':' + std::to_string(net.dport);
}

std::string command_line(const Process& proc) {
  if (proc.args.empty()) return proc.exe;
  return proc.exe + ' ' + proc.args;
}

// ---------------------------------------------------------------------------

Oid proc_oid_of(const SfRecord& rec) {
  return std::visit(
      Overloaded{
          [](const Header&) { return Oid::none; },
          [](const Container&) { return Oid::none; },
          [](const Process&) { return Oid::none; },
          [](const File&) { return Oid::none; },
          [](const auto& r) { return r.proc_oid; },
      },
      rec.body);
}

Timestamp start_ts_of(const SfRecord& rec) {
  return std::visit(
      Overloaded{
          [](const Header& h) { return h.exported_at; },
          [](const ProcessFlow& f) { return f.start_ts; },
          [](const FileFlow& f) { return f.start_ts; },
          [](const NetworkFlow& f) { return f.start_ts; },
          [](const auto& r) { return r.ts; },
      },
      rec.body);
}

Timestamp end_ts_of(const SfRecord& rec) {
  return std::visit(
      Overloaded{
          [](const ProcessFlow& f) { return f.end_ts; },
          [](const FileFlow& f) { return f.end_ts; },
          [](const NetworkFlow& f) { return f.end_ts; },
          [&rec](const auto&) { return start_ts_of(rec); },
      },
      rec.body);
}

OpFlags opflags_of(const SfRecord& rec) {
  return std::visit(
      Overloaded{
          [](const Header&) { return OpFlags{}; },
          [](const Container&) { return OpFlags{}; },
          [](const Process&) { return OpFlags{}; },
          [](const File&) { return OpFlags{}; },
          [](const auto& r) { return r.opflags; },
      },
      rec.body);
}

std::uint32_t tid_of(const SfRecord& rec) {
  return std::visit(
      Overloaded{
          [](const Header&) { return std::uint32_t{0}; },
          [](const Container&) { return std::uint32_t{0}; },
          [](const Process& p) { return p.pid; },
          [](const File&) { return std::uint32_t{0}; },
          [](const auto& r) { return r.tid; },
      },
      rec.body);
}

std::vector<Oid> references_of(const SfRecord& rec) {
  std::vector<Oid> refs;
  auto add = [&refs](Oid oid) {
    if (oid != Oid::none) refs.push_back(oid);
  };
  std::visit(Overloaded{
                 [](const Header&) {},
                 [](const Container&) {},
                 [](const File&) {},
                 [&](const Process& p) {
                   add(p.parent_oid);
                   add(p.container_oid);
                 },
                 [&](const FileEvent& e) {
                   add(e.proc_oid);
                   add(e.file_oid);
                   add(e.new_file_oid);
                 },
                 [&](const FileFlow& f) {
                   add(f.proc_oid);
                   add(f.file_oid);
                 },
                 [&](const auto& r) { add(r.proc_oid); },
             },
             rec.body);
  return refs;
}

namespace {

void require(bool cond, RecordKind kind, const char* what) {
  if (!cond) throw ValidationError(std::string(kind_name(kind)) + ": " + what);
}

void check_flow_span(Timestamp start, Timestamp end, RecordKind kind) {
  require(start <= end, kind, "start_ts must not exceed end_ts");
}

}  // namespace

void validate(const SfRecord& rec) {
  const RecordKind kind = rec.kind();
  if (!is_entity(kind)) {
    opflags_to_string(opflags_of(rec), kind);  // bit-level checks
    require(proc_oid_of(rec) != Oid::none, kind, "proc_oid must be set");
  }
  std::visit(
      Overloaded{
          [](const Header&) {},
          [kind](const Container& c) {
            require(c.oid != Oid::none, kind, "oid must be set");
            require(!c.container_id.empty(), kind, "container_id must not be empty");
          },
          [kind](const Process& p) {
            require(p.oid != Oid::none, kind, "oid must be set");
            require(p.parent_oid != p.oid, kind, "process cannot be its own parent");
          },
          [kind](const File& f) {
            require(f.oid != Oid::none, kind, "oid must be set");
            if (f.file_type == FileType::regular || f.file_type == FileType::directory) {
              require(!f.path.empty(), kind, "path must not be empty");
            }
          },
          [](const ProcessEvent&) {},
          [](const NetworkEvent&) {},
          [kind](const FileEvent& e) {
            require(e.file_oid != Oid::none, kind, "file_oid must be set");
            const bool two_paths =
                e.opflags.has(Op::Rename) || e.opflags.has(Op::Link) || e.opflags.has(Op::Symlink);
            require(two_paths == (e.new_file_oid != Oid::none), kind,
                    "new_file_oid is set exactly for RENAME, LINK and SYMLINK");
          },
          [kind](const ProcessFlow& f) {
            check_flow_span(f.start_ts, f.end_ts, kind);
            require(!f.opflags.has(Op::Clone) || f.num_threads_cloned >= 1, kind,
                    "CLONE requires num_threads_cloned >= 1");
            require(!f.opflags.has(Op::Exit) || f.num_threads_exited >= 1, kind,
                    "EXIT requires num_threads_exited >= 1");
          },
          [kind](const FileFlow& f) {
            check_flow_span(f.start_ts, f.end_ts, kind);
            require(f.file_oid != Oid::none, kind, "file_oid must be set");
            require(f.opflags.has(Op::Read) == (f.num_reads > 0), kind,
                    "READ is set exactly when num_reads > 0");
            require(f.opflags.has(Op::Write) == (f.num_writes > 0), kind,
                    "WRITE is set exactly when num_writes > 0");
          },
          [kind](const NetworkFlow& f) {
            check_flow_span(f.start_ts, f.end_ts, kind);
            require(f.opflags.has(Op::Send) == (f.num_sends > 0), kind,
                    "SEND is set exactly when num_sends > 0");
            require(f.opflags.has(Op::Recv) == (f.num_recvs > 0), kind,
                    "RECV is set exactly when num_recvs > 0");
          },
      },
      rec.body);
}

}  // namespace sysflow
