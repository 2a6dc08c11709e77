#pragma once

// Core telemetry data model: entities (header, container, process, file),
// single-operation events, and volumetric flows.

#include <bit>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sysflow {

/// Object ID of an entity. Dense per exporter session, starting at 1;
/// Oid::none (0) means "no reference".
enum class Oid : std::uint64_t { none = 0 };

constexpr std::uint64_t to_u64(Oid oid) { return static_cast<std::uint64_t>(oid); }

/// Nanoseconds since the Unix epoch.
using Timestamp = std::uint64_t;

/// Record type tag. The numeric values are the wire tags of the binary codec
/// and match the alternative index of RecordBody.
enum class RecordKind : std::uint8_t {
  Header = 0,
  Container = 1,
  Process = 2,
  File = 3,
  ProcessEvent = 4,
  ProcessFlow = 5,
  FileEvent = 6,
  FileFlow = 7,
  NetworkEvent = 8,
  NetworkFlow = 9,
};

inline constexpr int kRecordKindCount = 10;

constexpr bool is_entity(RecordKind k) { return k <= RecordKind::File; }
constexpr bool is_event(RecordKind k) {
  return k == RecordKind::ProcessEvent || k == RecordKind::FileEvent ||
         k == RecordKind::NetworkEvent;
}
constexpr bool is_flow(RecordKind k) {
  return k == RecordKind::ProcessFlow || k == RecordKind::FileFlow ||
         k == RecordKind::NetworkFlow;
}

/// "FileFlow", "ProcessEvent", ...
std::string_view kind_name(RecordKind kind);
/// Short form used in tables and policies: "PE", "FF", "NF", ... Entities use
/// "H", "C", "P", "F".
std::string_view kind_abbrev(RecordKind kind);
std::optional<RecordKind> kind_from_name(std::string_view name);

// ---------------------------------------------------------------------------
// Operation flags

/// Bit positions of the op-flags bitmap. Frozen: the codec writes the raw
/// bitmap.
enum class Op : std::uint8_t {
  Clone = 0,
  Exec = 1,
  Exit = 2,
  Setuid = 3,
  Setgid = 4,
  Bind = 5,
  Listen = 6,
  Mkdir = 7,
  Rmdir = 8,
  Unlink = 9,
  Symlink = 10,
  Link = 11,
  Rename = 12,
  Chmod = 13,
  Chown = 14,
  Mount = 15,
  Umount = 16,
  Accept = 17,
  Connect = 18,
  Send = 19,
  Recv = 20,
  Shutdown = 21,
  Close = 22,
  Open = 23,
  Read = 24,
  Write = 25,
  Setns = 26,
  Mmap = 27,
};

inline constexpr int kOpCount = 28;

std::string_view op_name(Op op);
std::optional<Op> op_from_name(std::string_view name);

class OpFlags {
 public:
  constexpr OpFlags() = default;
  constexpr explicit OpFlags(std::uint32_t bits) : bits_(bits) {}

  static constexpr OpFlags of(Op op) { return OpFlags(bit(op)); }

  constexpr bool has(Op op) const { return (bits_ & bit(op)) != 0; }
  constexpr void set(Op op) { bits_ |= bit(op); }
  constexpr void clear() { bits_ = 0; }
  constexpr std::uint32_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int count() const { return std::popcount(bits_); }
  /// True when every set bit is also set in `mask`.
  constexpr bool subset_of(OpFlags mask) const { return (bits_ & ~mask.bits_) == 0; }

  constexpr OpFlags operator|(OpFlags o) const { return OpFlags(bits_ | o.bits_); }
  constexpr bool operator==(const OpFlags&) const = default;

 private:
  static constexpr std::uint32_t bit(Op op) {
    return std::uint32_t{1} << static_cast<unsigned>(op);
  }
  std::uint32_t bits_ = 0;
};

constexpr OpFlags operator|(Op a, Op b) { return OpFlags::of(a) | OpFlags::of(b); }
constexpr OpFlags operator|(OpFlags a, Op b) { return a | OpFlags::of(b); }

/// Operations a record kind may carry. Empty for entities.
OpFlags allowed_ops(RecordKind kind);

/// Fixed-width mnemonic used by the table printer.
///  FileFlow:    [O] [R|W|B] [C]   e.g. "O R C", "  W C"   (B = read and write)
///  NetworkFlow: [A|C] [S][R] [C]  e.g. "A SR C"
///  ProcessFlow: [C] [E]           e.g. "C E"
/// Rare flow bits without a slot (MMAP, SETNS, SHUTDOWN) are appended as
/// "+NAME". Events render the single op name ("EXEC", "MKDIR").
/// Throws ValidationError for bits outside the kind's row, an event without
/// exactly one bit, or a flow without any bit.
std::string opflags_to_string(OpFlags flags, RecordKind kind);

/// "OPEN|READ|CLOSE", in bit order. Used for the sf.opflags attribute.
std::string opflags_names(OpFlags flags);

// ---------------------------------------------------------------------------
// Entities

enum class ContainerType : std::uint8_t { docker = 0, lxc = 1, other = 2 };
enum class FileType : std::uint8_t {
  regular = 0,
  directory = 1,
  pipe = 2,
  unix_socket = 3,
  device = 4,
};
enum class Proto : std::uint8_t { tcp = 0, udp = 1 };

std::string_view to_string(ContainerType t);
std::string_view to_string(FileType t);
std::string_view to_string(Proto p);
std::optional<ContainerType> container_type_from_string(std::string_view s);
std::optional<FileType> file_type_from_string(std::string_view s);
std::optional<Proto> proto_from_string(std::string_view s);

/// Dotted quad; the integer holds the first octet in its most significant byte.
std::string ipv4_to_string(std::uint32_t ip);
std::optional<std::uint32_t> parse_ipv4(std::string_view text);

struct Header {
  std::uint32_t version = 1;
  std::string hostname;
  std::string distribution;
  std::string kernel_version;
  Timestamp exported_at = 0;

  bool operator==(const Header&) const = default;
};

struct Container {
  Oid oid = Oid::none;
  Timestamp ts = 0;
  std::string container_id;
  std::string name;
  std::string image;
  ContainerType container_type = ContainerType::docker;

  bool operator==(const Container&) const = default;
};

struct Process {
  Oid oid = Oid::none;
  Timestamp ts = 0;
  Oid parent_oid = Oid::none;
  Oid container_oid = Oid::none;
  std::uint32_t pid = 0;
  std::string exe;
  std::string args;
  std::uint32_t uid = 0;
  std::uint32_t gid = 0;
  Timestamp created_ts = 0;

  bool operator==(const Process&) const = default;
};

/// "exe args", or just exe when there are no arguments.
std::string command_line(const Process& proc);

struct File {
  Oid oid = Oid::none;
  Timestamp ts = 0;
  std::string path;
  FileType file_type = FileType::regular;

  bool operator==(const File&) const = default;
};

// ---------------------------------------------------------------------------
// Events and flows

struct NetTuple {
  std::uint32_t sip = 0;
  std::uint16_t sport = 0;
  std::uint32_t dip = 0;
  std::uint16_t dport = 0;
  Proto proto = Proto::tcp;

  auto operator<=>(const NetTuple&) const = default;
};

/// "sip:sport -- dip:dport"
std::string to_string(const NetTuple& net);

struct ProcessEvent {
  Oid proc_oid = Oid::none;
  Timestamp ts = 0;
  std::uint32_t tid = 0;
  OpFlags opflags;
  std::int64_t ret = 0;
  std::optional<std::string> args_delta;

  bool operator==(const ProcessEvent&) const = default;
};

struct ProcessFlow {
  Oid proc_oid = Oid::none;
  Timestamp start_ts = 0;
  Timestamp end_ts = 0;
  std::uint32_t tid = 0;
  OpFlags opflags;
  std::uint64_t num_threads_cloned = 0;
  std::uint64_t num_threads_exited = 0;

  bool operator==(const ProcessFlow&) const = default;
};

struct FileEvent {
  Oid proc_oid = Oid::none;
  Oid file_oid = Oid::none;
  Timestamp ts = 0;
  std::uint32_t tid = 0;
  OpFlags opflags;
  Oid new_file_oid = Oid::none;
  std::int64_t ret = 0;

  bool operator==(const FileEvent&) const = default;
};

struct FileFlow {
  Oid proc_oid = Oid::none;
  Oid file_oid = Oid::none;
  Timestamp start_ts = 0;
  Timestamp end_ts = 0;
  std::uint32_t tid = 0;
  std::int32_t fd = -1;
  OpFlags opflags;
  std::uint64_t num_reads = 0;
  std::uint64_t bytes_read = 0;
  std::uint64_t num_writes = 0;
  std::uint64_t bytes_written = 0;

  bool operator==(const FileFlow&) const = default;
};

struct NetworkEvent {
  Oid proc_oid = Oid::none;
  Timestamp ts = 0;
  std::uint32_t tid = 0;
  OpFlags opflags;
  NetTuple net;

  bool operator==(const NetworkEvent&) const = default;
};

struct NetworkFlow {
  Oid proc_oid = Oid::none;
  Timestamp start_ts = 0;
  Timestamp end_ts = 0;
  std::uint32_t tid = 0;
  std::int32_t fd = -1;
  NetTuple net;
  OpFlags opflags;
  std::uint64_t num_sends = 0;
  std::uint64_t bytes_sent = 0;
  std::uint64_t num_recvs = 0;
  std::uint64_t bytes_received = 0;

  bool operator==(const NetworkFlow&) const = default;
};

/// Alternative order matches RecordKind.
using RecordBody = std::variant<Header, Container, Process, File, ProcessEvent,
                                ProcessFlow, FileEvent, FileFlow, NetworkEvent,
                                NetworkFlow>;

struct SfRecord {
  RecordBody body;
  /// Labels added by policy tag rules; empty on creation.
  std::vector<std::string> tags;

  SfRecord() = default;
  template <class T>
    requires std::is_constructible_v<RecordBody, T&&>
  SfRecord(T&& b) : body(std::forward<T>(b)) {}  // NOLINT: implicit by intent

  RecordKind kind() const { return static_cast<RecordKind>(body.index()); }

  template <class T>
  const T* get_if() const {
    return std::get_if<T>(&body);
  }

  bool operator==(const SfRecord&) const = default;
};

/// Process referenced by an event or flow; Oid::none for entities.
Oid proc_oid_of(const SfRecord& rec);
/// Event timestamp, or flow start time. Entities report their export time.
Timestamp start_ts_of(const SfRecord& rec);
/// Flow end time; events and entities report start_ts_of().
Timestamp end_ts_of(const SfRecord& rec);
OpFlags opflags_of(const SfRecord& rec);
std::uint32_t tid_of(const SfRecord& rec);

/// Every object ID this record refers to (not including its own).
std::vector<Oid> references_of(const SfRecord& rec);

/// Throws ValidationError if the record breaks the invariants of its type.
void validate(const SfRecord& rec);

}  // namespace sysflow
