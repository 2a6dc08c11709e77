#include "sysflow/gen/generator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace sysflow::gen {

using ingest::ContainerInfo;
using ingest::RawEvent;
using ingest::Syscall;

namespace {

constexpr Timestamp kMs = 1'000'000;
constexpr Timestamp kSec = 1'000'000'000;

std::uint32_t ip(std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d) {
  return (std::uint32_t{a} << 24) | (std::uint32_t{b} << 16) | (std::uint32_t{c} << 8) | d;
}

NetTuple tcp(std::uint32_t sip, std::uint16_t sport, std::uint32_t dip, std::uint16_t dport) {
  return NetTuple{sip, sport, dip, dport, Proto::tcp};
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform-ish integer in [lo, hi].
  std::uint64_t range(std::uint64_t lo, std::uint64_t hi) {
    return lo + engine_() % (hi - lo + 1);
  }
  bool chance(std::uint64_t percent) { return engine_() % 100 < percent; }

 private:
  std::mt19937_64 engine_;
};

// Fixed identity of one traced process; stamps it onto every event.
struct Actor {
  std::uint32_t pid = 0;
  std::uint32_t ppid = 0;
  std::string exe;
  std::string args;
  std::optional<ContainerInfo> container;

  RawEvent at(Timestamp ts, Syscall sc, std::uint32_t tid = 0) const {
    RawEvent ev;
    ev.ts = ts;
    ev.pid = pid;
    ev.tid = tid == 0 ? pid : tid;
    ev.ppid = ppid;
    ev.exe = exe;
    ev.args = args;
    ev.container = container;
    ev.syscall = sc;
    return ev;
  }
};

class Trace {
 public:
  RawEvent& add(RawEvent ev) {
    events_.push_back(std::move(ev));
    return events_.back();
  }
  RawEvent& fd_op(const Actor& a, Timestamp ts, Syscall sc, std::int32_t fd, std::int64_t ret,
                  std::uint32_t tid = 0) {
    RawEvent ev = a.at(ts, sc, tid);
    ev.fd = fd;
    ev.ret = ret;
    return add(std::move(ev));
  }
  RawEvent& open(const Actor& a, Timestamp ts, const std::string& path, std::int32_t fd) {
    RawEvent& ev = fd_op(a, ts, Syscall::open, fd, fd);
    ev.path = path;
    return ev;
  }
  RawEvent& sock(const Actor& a, Timestamp ts, Syscall sc, std::int32_t fd, const NetTuple& net,
                 std::uint32_t tid = 0) {
    RawEvent& ev = fd_op(a, ts, sc, fd, 0, tid);
    ev.net = net;
    return ev;
  }

  std::vector<RawEvent> take() {
    // Stable: events sharing a timestamp keep their scripted order.
    std::stable_sort(events_.begin(), events_.end(),
                     [](const RawEvent& a, const RawEvent& b) { return a.ts < b.ts; });
    return std::move(events_);
  }

 private:
  std::vector<RawEvent> events_;
};

// Offsets are in milliseconds from the scenario epoch.
Timestamp at_ms(std::uint64_t ms) { return kScenarioEpoch + ms * kMs; }

std::vector<RawEvent> attack_table2() {
  const ContainerInfo node_js{"node-js", "node-js", "node:8.11", ContainerType::docker};
  const Actor node{21847, 1887, "node", "app.js", node_js};
  const Actor exfil{21849, 21847, "/tmp/exfil.py", "", node_js};
  const Actor apt{21851, 21849, "apt", "install pip", node_js};

  const std::uint32_t local = ip(172, 30, 10, 2);
  const std::uint32_t attacker = ip(198, 51, 100, 1);
  const std::uint32_t malware = ip(203, 0, 113, 7);
  const std::uint32_t storage = ip(10, 0, 0, 5);
  const std::uint32_t c2 = ip(203, 0, 113, 9);

  Trace t;
  // Server start, library load, log directory.
  t.add(node.at(at_ms(0), Syscall::execve));
  t.open(node, at_ms(1000), "/lib/gnu/libc.so", 3);
  t.fd_op(node, at_ms(1100), Syscall::read, 3, 832);
  t.fd_op(node, at_ms(1200), Syscall::close, 3, 0);
  t.add(node.at(at_ms(2000), Syscall::mkdir)).path = "/tmp/log";

  // Application log: 100 writes, a quiet spell, 100 more, 50 more, close.
  t.open(node, at_ms(40'000), "/tmp/log/app.log", 4);
  for (std::uint64_t i = 0; i < 100; ++i) t.fd_op(node, at_ms(40'100 + i * 250), Syscall::write, 4, 80);
  for (std::uint64_t i = 0; i < 100; ++i) t.fd_op(node, at_ms(110'000 + i * 110), Syscall::write, 4, 80);
  for (std::uint64_t i = 0; i < 50; ++i) t.fd_op(node, at_ms(145'000 + i * 100), Syscall::write, 4, 80);
  t.fd_op(node, at_ms(150'000), Syscall::close, 4, 0);

  // Attacker connection with the exploit payload.
  t.sock(node, at_ms(90'500), Syscall::accept, 5, tcp(attacker, 3522, local, 443));
  t.fd_op(node, at_ms(91'000), Syscall::recv, 5, 80);
  t.fd_op(node, at_ms(91'500), Syscall::send, 5, 490);
  t.fd_op(node, at_ms(119'000), Syscall::send, 5, 490);
  t.fd_op(node, at_ms(120'200), Syscall::close, 5, 0);

  // Script download from the malware server.
  t.sock(node, at_ms(92'000), Syscall::connect, 6, tcp(local, 8353, malware, 2345));
  t.fd_op(node, at_ms(92'100), Syscall::send, 6, 94);
  t.fd_op(node, at_ms(92'200), Syscall::recv, 6, 1500);
  t.fd_op(node, at_ms(92'300), Syscall::recv, 6, 1500);
  t.fd_op(node, at_ms(92'400), Syscall::recv, 6, 1355);
  t.fd_op(node, at_ms(121'000), Syscall::close, 6, 0);

  // Script written to disk.
  t.open(node, at_ms(93'000), "/tmp/exfil.py", 7);
  for (std::uint64_t i = 0; i < 5; ++i) t.fd_op(node, at_ms(93'100 + i * 100), Syscall::write, 7, 700);
  t.fd_op(node, at_ms(93'600), Syscall::write, 7, 750);
  t.fd_op(node, at_ms(93'700), Syscall::close, 7, 0);

  // Script runs, installs a package, talks to storage and C&C.
  t.add(exfil.at(at_ms(94'000), Syscall::execve));
  t.add(apt.at(at_ms(95'000), Syscall::execve));
  t.add(apt.at(at_ms(96'000), Syscall::exit));
  t.sock(exfil, at_ms(97'000), Syscall::connect, 3, tcp(local, 8356, storage, 3000));
  t.fd_op(exfil, at_ms(97'100), Syscall::send, 3, 34);
  t.fd_op(exfil, at_ms(97'200), Syscall::recv, 3, 80);
  t.fd_op(exfil, at_ms(97'300), Syscall::recv, 3, 85);
  t.fd_op(exfil, at_ms(97'400), Syscall::close, 3, 0);
  t.sock(exfil, at_ms(98'000), Syscall::connect, 4, tcp(local, 8357, c2, 4444));
  t.fd_op(exfil, at_ms(98'100), Syscall::send, 4, 94);
  t.fd_op(exfil, at_ms(98'200), Syscall::send, 4, 94);
  t.fd_op(exfil, at_ms(98'300), Syscall::recv, 4, 46);
  t.fd_op(exfil, at_ms(98'400), Syscall::close, 4, 0);
  t.add(exfil.at(at_ms(99'000), Syscall::exit));

  t.add(node.at(at_ms(185'000), Syscall::exit));
  return t.take();
}

std::vector<RawEvent> db_profile(const GenOptions& o) {
  Rng rng(o.seed);
  const Actor pg{3001, 1, "/usr/lib/postgresql/11/bin/postgres", "-D /var/lib/postgresql/data",
                 ContainerInfo{"pg-0", "pg-0", "postgres:11", ContainerType::docker}};
  const Timestamp t0 = kScenarioEpoch;
  const auto span = static_cast<Timestamp>(std::llround(o.duration_secs * static_cast<double>(kSec)));
  const Timestamp slot = std::max<Timestamp>(span / o.n_ops, 2);
  const std::int32_t fd = 5;

  Trace t;
  t.open(pg, t0, "/var/lib/postgresql/data/base/16384/2619", fd);
  for (std::uint64_t i = 0; i < o.n_ops; ++i) {
    const Timestamp ts = t0 + 1 + i * slot + rng.range(0, slot / 2);
    const bool read = rng.chance(60);
    const std::int64_t ret = rng.chance(2) ? -11 : 8192;
    t.fd_op(pg, ts, read ? Syscall::read : Syscall::write, fd, ret);
  }
  return t.take();
}

std::vector<RawEvent> web_profile(const GenOptions& o) {
  Rng rng(o.seed);
  const Actor httpd{5001, 1, "/usr/sbin/httpd", "-DFOREGROUND",
                    ContainerInfo{"web-0", "web-0", "httpd:2.4", ContainerType::docker}};
  const std::uint32_t local = ip(172, 30, 20, 4);
  const Timestamp t0 = kScenarioEpoch;
  const std::uint32_t workers = o.tid_handoff - 1;
  // Thread of each handoff stage: accept, serve, close.
  const std::uint32_t stage_tid[3] = {
      httpd.pid,
      o.tid_handoff >= 2 ? httpd.pid + 1 : httpd.pid,
      o.tid_handoff >= 3 ? httpd.pid + 2 : (o.tid_handoff >= 2 ? httpd.pid + 1 : httpd.pid),
  };

  Trace t;
  t.add(httpd.at(t0, Syscall::execve));
  t.sock(httpd, t0 + 1 * kMs, Syscall::bind, 3, tcp(0, 80, 0, 0));
  t.sock(httpd, t0 + 2 * kMs, Syscall::listen, 3, tcp(0, 80, 0, 0));
  for (std::uint32_t w = 0; w < workers; ++w) {
    RawEvent& ev = t.add(httpd.at(t0 + (3 + w) * kMs, Syscall::clone));
    ev.thread_flag = true;
    ev.ret = httpd.pid + 1 + w;
  }

  const Timestamp slot = 10 * kMs;
  const Timestamp first = t0 + 10 * kMs;
  for (std::uint32_t c = 0; c < o.n_conns; ++c) {
    const Timestamp base = first + c * slot + rng.range(0, kMs / 2);
    const auto client = static_cast<std::uint32_t>(ip(198, 18, 0, 0) + rng.range(1, 0x1FFFE));
    const auto port = static_cast<std::uint16_t>(rng.range(1024, 65535));
    const std::int32_t fd = 4;
    t.sock(httpd, base, Syscall::accept, fd, tcp(client, port, local, 80), stage_tid[0]);
    t.fd_op(httpd, base + 1 * kMs, Syscall::recv, fd,
            static_cast<std::int64_t>(rng.range(64, 1500)), stage_tid[1]);
    t.fd_op(httpd, base + 2 * kMs, Syscall::send, fd,
            static_cast<std::int64_t>(rng.range(200, 20000)), stage_tid[1]);
    t.fd_op(httpd, base + 3 * kMs, Syscall::shutdown, fd, 0, stage_tid[2]);
    t.fd_op(httpd, base + 4 * kMs, Syscall::close, fd, 0, stage_tid[2]);
  }

  const Timestamp end = first + o.n_conns * slot;
  for (std::uint32_t w = 0; w < workers; ++w) {
    t.add(httpd.at(end + w * kMs, Syscall::exit, httpd.pid + 1 + w));
  }
  t.add(httpd.at(end + (workers + 1) * kMs, Syscall::exit));
  return t.take();
}

std::vector<RawEvent> threads_profile(const GenOptions& o) {
  Rng rng(o.seed);
  const Actor matmul{7001, 1, "/opt/bench/matmul", "--rows 5000", std::nullopt};
  const Timestamp t0 = kScenarioEpoch;
  const Timestamp slot = 2 * kMs;

  Trace t;
  t.add(matmul.at(t0, Syscall::execve));
  for (std::uint32_t i = 0; i < o.n_threads; ++i) {
    const Timestamp base = t0 + kMs + i * slot;
    const std::uint32_t tid = matmul.pid + 1 + i;
    RawEvent& clone = t.add(matmul.at(base, Syscall::clone));
    clone.thread_flag = true;
    clone.ret = tid;
    t.add(matmul.at(base + 1 + rng.range(0, slot - 2), Syscall::exit, tid));
  }
  t.add(matmul.at(t0 + kMs + o.n_threads * slot, Syscall::exit));
  return t.take();
}

}  // namespace

std::string_view to_string(Profile p) {
  switch (p) {
    case Profile::attack_table2: return "attack_table2";
    case Profile::db: return "db";
    case Profile::web: return "web";
    case Profile::threads: return "threads";
  }
  return "attack_table2";
}

std::optional<Profile> profile_from_string(std::string_view name) {
  for (Profile p : {Profile::attack_table2, Profile::db, Profile::web, Profile::threads}) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

void validate(const GenOptions& o) {
  switch (o.profile) {
    case Profile::attack_table2:
      return;
    case Profile::db:
      if (o.n_ops == 0) throw GenError("db: n_ops must be positive");
      if (!(o.duration_secs > 0.0) || o.duration_secs > 1e7) {
        throw GenError("db: duration_secs must be in (0, 1e7]");
      }
      if (o.duration_secs * 1e9 / static_cast<double>(o.n_ops) < 2.0) {
        throw GenError("db: more than one op per 2 ns requested");
      }
      return;
    case Profile::web:
      if (o.n_conns == 0) throw GenError("web: n_conns must be positive");
      if (o.tid_handoff < 1 || o.tid_handoff > 3) throw GenError("web: tid_handoff must be 1..3");
      return;
    case Profile::threads:
      if (o.n_threads == 0) throw GenError("threads: n_threads must be positive");
      if (o.n_threads > 1'000'000) throw GenError("threads: n_threads must be at most 1000000");
      return;
  }
}

std::vector<RawEvent> generate(const GenOptions& opts) {
  validate(opts);
  switch (opts.profile) {
    case Profile::attack_table2: return attack_table2();
    case Profile::db: return db_profile(opts);
    case Profile::web: return web_profile(opts);
    case Profile::threads: return threads_profile(opts);
  }
  return {};
}

void write_trace(std::span<const RawEvent> events, std::ostream& out) {
  for (const auto& ev : events) out << ingest::to_raw_json(ev) << '\n';
  if (!out) throw IoError("write of raw trace failed");
}

}  // namespace sysflow::gen
