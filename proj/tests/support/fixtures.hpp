#pragma once

// Hand-built traces and streams shared by the test suites.

#include <cstdint>
#include <string>
#include <vector>

#include "sysflow/ingest/raw_event.hpp"
#include "sysflow/model.hpp"

namespace sysflow::testing {

inline constexpr Timestamp kSec = 1'000'000'000;
inline constexpr Timestamp kT0 = 1'554'914'820ULL * kSec;

/// Shorthand for building raw events: one process identity, any syscall.
struct RawActor {
  std::uint32_t pid = 100;
  std::uint32_t ppid = 0;  // no parent: keeps hand-counted outputs free of stubs
  std::string exe = "/bin/app";
  std::string args;

  ingest::RawEvent ev(Timestamp ts, ingest::Syscall sc, std::uint32_t tid = 0) const;
  ingest::RawEvent open(Timestamp ts, const std::string& path, std::int32_t fd) const;
  ingest::RawEvent io(Timestamp ts, ingest::Syscall sc, std::int32_t fd, std::int64_t ret,
                      std::uint32_t tid = 0) const;
  ingest::RawEvent sock(Timestamp ts, ingest::Syscall sc, std::int32_t fd, const NetTuple& net,
                        std::uint32_t tid = 0) const;
  ingest::RawEvent file_op(Timestamp ts, ingest::Syscall sc, const std::string& path,
                           std::int64_t ret = 0) const;
};

NetTuple tcp(const char* sip, std::uint16_t sport, const char* dip, std::uint16_t dport);

/// A trace that stresses the aggregator: several processes (some with
/// unseen parents or containers), threads that clone and exit, descriptors
/// shared between threads and closed by any of them, sockets used through
/// read/write as well as send/recv, failing calls, file renames and
/// unlinks, exec and setuid, process exit and pid reuse. Timestamps advance
/// in bursts so that windows expire at many different points. Never uses an
/// unopened descriptor.
std::vector<ingest::RawEvent> random_trace(std::uint64_t seed, std::size_t n_events);

/// `cat /etc/passwd` inside a shell: open, two reads, close.
std::vector<ingest::RawEvent> passwd_reader_trace();

/// bash -> python -> curl, with curl connecting out. Built record by record.
std::vector<SfRecord> shell_chain_records();

}  // namespace sysflow::testing
