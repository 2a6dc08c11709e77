#pragma once

// Raw syscall-level input: one JSON object per line, ts non-decreasing.

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>

#include "sysflow/error.hpp"
#include "sysflow/model.hpp"

namespace sysflow::ingest {

enum class Syscall : std::uint8_t {
  clone,
  execve,
  exit,
  setuid,
  setgid,
  open,
  openat,
  read,
  write,
  close,
  mmap,
  setns,
  mkdir,
  rmdir,
  unlink,
  symlink,
  link,
  rename,
  chmod,
  chown,
  mount,
  umount,
  bind,
  listen,
  accept,
  connect,
  send,
  recv,
  sendto,
  recvfrom,
  shutdown,
};

inline constexpr int kSyscallCount = 31;

std::string_view to_string(Syscall s);
std::optional<Syscall> syscall_from_string(std::string_view name);
/// openat -> open, sendto -> send, recvfrom -> recv; identity otherwise.
Syscall normalize(Syscall s);

/// Container metadata as carried on raw events.
struct ContainerInfo {
  std::string id;
  std::string name;
  std::string image;
  ContainerType type = ContainerType::docker;

  bool operator==(const ContainerInfo&) const = default;
};

struct RawEvent {
  Timestamp ts = 0;
  std::uint32_t pid = 0;
  std::uint32_t tid = 0;
  std::uint32_t ppid = 0;
  std::string exe;
  std::string args;
  std::uint32_t uid = 0;
  std::uint32_t gid = 0;
  std::optional<ContainerInfo> container;
  Syscall syscall = Syscall::open;
  std::optional<std::int32_t> fd;
  std::optional<std::string> path;
  /// Destination of rename, link and symlink.
  std::optional<std::string> new_path;
  std::optional<FileType> file_type;
  std::optional<NetTuple> net;
  /// Bytes transferred for I/O syscalls, status otherwise. Negative = failure.
  std::int64_t ret = 0;
  /// clone only: true for a new thread, false for a new process.
  bool thread_flag = false;

  bool operator==(const RawEvent&) const = default;
};

class RawParseError : public Error {
 public:
  RawParseError(std::size_t line, const std::string& detail);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Parses and validates one line; the syscall comes back normalized.
/// Throws RawParseError carrying `line_no`.
RawEvent parse_raw(std::string_view line, std::size_t line_no = 1);

/// Compact JSON with a fixed key order; optional fields are omitted when
/// unset. parse_raw(to_raw_json(ev)) == ev for normalized events.
std::string to_raw_json(const RawEvent& ev);

/// Reads a raw trace line by line, skipping blank lines, and rejects
/// timestamps that go backwards.
class RawTraceReader {
 public:
  explicit RawTraceReader(std::istream& in) : in_(in) {}

  std::optional<RawEvent> next();
  std::size_t line_no() const { return line_no_; }
  std::size_t events_read() const { return events_; }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
  std::size_t events_ = 0;
  std::optional<Timestamp> last_ts_;
};

}  // namespace sysflow::ingest
