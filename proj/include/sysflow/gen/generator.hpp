#pragma once

// Deterministic synthetic raw traces. Random choices come from mt19937_64
// mapped with plain modulo arithmetic so that a (profile, seed, params)
// triple gives the same bytes on every platform.

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sysflow/error.hpp"
#include "sysflow/ingest/raw_event.hpp"

namespace sysflow::gen {

enum class Profile { attack_table2, db, web, threads };

std::string_view to_string(Profile p);
std::optional<Profile> profile_from_string(std::string_view name);

/// 2019-04-10T16:47:00Z, the first minute of the attack scenario.
inline constexpr Timestamp kScenarioEpoch = 1'554'914'820ULL * 1'000'000'000ULL;

struct GenOptions {
  Profile profile = Profile::attack_table2;
  std::uint64_t seed = 1;
  // db
  std::uint64_t n_ops = 100'000;
  double duration_secs = 60.0;
  // web
  std::uint32_t n_conns = 1'000;
  std::uint32_t tid_handoff = 3;
  // threads
  std::uint32_t n_threads = 5'000;
};

class GenError : public Error {
 public:
  using Error::Error;
};

/// Throws GenError for out-of-range parameters.
void validate(const GenOptions& opts);

/// attack_table2: node.js server hijack, script drop and exfiltration. Seed
///   is ignored. Aggregated with a 30 s timeout it yields 16 event/flow
///   records (6 PE, 5 FF, 1 FE, 4 NF).
/// db: one backend process with a single data file opened once and never
///   closed; n_ops 8 KiB reads (60%) and writes spread over duration_secs,
///   about 2% of them failing with EAGAIN.
/// web: a server accepting n_conns short connections in 10 ms slots. Each
///   connection is accepted, served, and closed by up to tid_handoff
///   different threads, giving that many network flows.
/// threads: one process creating and reaping n_threads threads in 2 ms slots.
std::vector<ingest::RawEvent> generate(const GenOptions& opts);

/// One JSON line per event.
void write_trace(std::span<const ingest::RawEvent> events, std::ostream& out);

}  // namespace sysflow::gen
