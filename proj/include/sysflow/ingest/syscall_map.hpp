#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <variant>

#include "sysflow/error.hpp"
#include "sysflow/ingest/raw_event.hpp"
#include "sysflow/model.hpp"

namespace sysflow::ingest {

struct OpTarget {
  RecordKind kind;
  Op op;

  bool operator==(const OpTarget&) const = default;
};

/// Static mapping of a (normalized) syscall to its record type and op bit.
/// clone and exit map to their process-level ProcessEvent form; close, read
/// and write to FileFlow. syscall_to_op refines these.
OpTarget base_operation(Syscall s);

struct FileHandle {
  Oid file_oid = Oid::none;
  std::string path;
};

struct SocketHandle {
  NetTuple net;
};

using FdResource = std::variant<FileHandle, SocketHandle>;

/// A read, write or close names an fd that was never opened.
class OrphanFdError : public Error {
 public:
  OrphanFdError(std::uint32_t pid, std::int32_t fd);
  std::uint32_t pid() const { return pid_; }
  std::int32_t fd() const { return fd_; }

 private:
  std::uint32_t pid_;
  std::int32_t fd_;
};

/// (pid, fd) -> open resource. Built from open/accept/connect/bind; dup and
/// fcntl are not modeled.
class FdRegistry {
 public:
  void bind(std::uint32_t pid, std::int32_t fd, FdResource res);
  const FdResource* find(std::uint32_t pid, std::int32_t fd) const;
  bool release(std::uint32_t pid, std::int32_t fd);
  void release_process(std::uint32_t pid);
  std::size_t size() const { return fds_.size(); }

 private:
  std::map<std::pair<std::uint32_t, std::int32_t>, FdResource> fds_;
};

/// Record type and op bit for `ev`:
///  - clone: thread_flag selects ProcessFlow CLONE over ProcessEvent CLONE
///  - exit: the main thread (tid == pid) ends the process (ProcessEvent EXIT),
///    any other thread is a ProcessFlow EXIT
///  - close/read/write: NetworkFlow (CLOSE/RECV/SEND) when the fd is a socket
/// Throws OrphanFdError when close/read/write names an unknown fd.
OpTarget syscall_to_op(const RawEvent& ev, const FdRegistry& registry);

}  // namespace sysflow::ingest
