#include "fixtures.hpp"

#include <algorithm>
#include <map>
#include <random>

namespace sysflow::testing {

using ingest::RawEvent;
using ingest::Syscall;

RawEvent RawActor::ev(Timestamp ts, Syscall sc, std::uint32_t tid) const {
  RawEvent e;
  e.ts = ts;
  e.pid = pid;
  e.tid = tid == 0 ? pid : tid;
  e.ppid = ppid;
  e.exe = exe;
  e.args = args;
  e.syscall = sc;
  return e;
}

RawEvent RawActor::open(Timestamp ts, const std::string& path, std::int32_t fd) const {
  RawEvent e = ev(ts, Syscall::open);
  e.path = path;
  e.fd = fd;
  e.ret = fd;
  return e;
}

RawEvent RawActor::io(Timestamp ts, Syscall sc, std::int32_t fd, std::int64_t ret,
                      std::uint32_t tid) const {
  RawEvent e = ev(ts, sc, tid);
  e.fd = fd;
  e.ret = ret;
  return e;
}

RawEvent RawActor::sock(Timestamp ts, Syscall sc, std::int32_t fd, const NetTuple& net,
                        std::uint32_t tid) const {
  RawEvent e = io(ts, sc, fd, sc == Syscall::accept ? fd : 0, tid);
  e.net = net;
  return e;
}

RawEvent RawActor::file_op(Timestamp ts, Syscall sc, const std::string& path,
                           std::int64_t ret) const {
  RawEvent e = ev(ts, sc);
  e.path = path;
  e.ret = ret;
  return e;
}

NetTuple tcp(const char* sip, std::uint16_t sport, const char* dip, std::uint16_t dport) {
  return NetTuple{*parse_ipv4(sip), sport, *parse_ipv4(dip), dport, Proto::tcp};
}

namespace {

struct Sim {
  struct Proc {
    RawActor actor;
    std::uint32_t uid = 0;
    std::uint32_t gid = 0;
    std::optional<ingest::ContainerInfo> container;
    std::vector<std::uint32_t> threads;  // threads[0] is the main thread
    std::map<std::int32_t, bool> fds;    // fd -> is socket
    std::vector<std::uint32_t> dead_threads;

    // Lowest free descriptor, as the kernel hands them out.
    std::int32_t free_fd() const {
      std::int32_t fd = 3;
      while (fds.contains(fd)) ++fd;
      return fd;
    }
  };

  explicit Sim(std::uint64_t seed) : rng(seed) {}

  std::mt19937_64 rng;
  Timestamp now = kT0;
  std::uint32_t next_pid = 200;
  std::uint32_t next_tid = 5000;
  std::vector<std::uint32_t> dead_pids;
  std::vector<Proc> procs;
  std::vector<RawEvent> out;

  std::uint64_t below(std::uint64_t n) { return rng() % n; }
  bool coin(int percent) { return static_cast<int>(below(100)) < percent; }
  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }

  void tick() {
    const std::uint64_t r = below(100);
    if (r < 55) return;
    if (r < 90) {
      now += below(2000) * 1'000'000;
    } else {
      now += below(40) * kSec + below(1000) * 1'000'000;
    }
  }

  RawEvent base(const Proc& p, Syscall sc, std::uint32_t tid = 0) {
    RawEvent e = p.actor.ev(now, sc, tid);
    e.uid = p.uid;
    e.gid = p.gid;
    e.container = p.container;
    return e;
  }

  std::uint32_t any_tid(const Proc& p) { return pick(p.threads); }

  void spawn(std::optional<std::uint32_t> parent) {
    static const std::vector<std::string> kExes = {"/usr/bin/node", "/bin/bash", "/usr/bin/python3",
                                                   "/usr/sbin/nginx", "apt"};
    Proc p;
    if (!dead_pids.empty() && coin(40)) {
      p.actor.pid = dead_pids.back();
      dead_pids.pop_back();
    } else {
      p.actor.pid = next_pid++;
    }
    p.actor.ppid = parent ? *parent : (coin(50) ? 1 : 4000 + static_cast<std::uint32_t>(below(3)));
    p.actor.exe = pick(kExes);
    p.actor.args = coin(50) ? "" : "-c run";
    p.uid = coin(50) ? 0 : 1000;
    p.gid = p.uid;
    if (coin(40)) {
      const auto k = below(2);
      p.container = ingest::ContainerInfo{"c" + std::to_string(k), "web" + std::to_string(k),
                                          "img:" + std::to_string(k), ContainerType::docker};
    }
    p.threads.push_back(p.actor.pid);
    if (parent) {
      // The parent reports the fork; the child shows up on its first event.
      auto it = std::find_if(procs.begin(), procs.end(),
                             [&](const Proc& q) { return q.actor.pid == *parent; });
      if (it != procs.end()) {
        RawEvent e = base(*it, Syscall::clone);
        e.ret = p.actor.pid;
        out.push_back(e);
        p.container = it->container;
      }
    }
    procs.push_back(std::move(p));
  }

  std::optional<std::int32_t> some_fd(const Proc& p, int want) {  // want: 0 file, 1 socket, 2 any
    std::vector<std::int32_t> fds;
    for (const auto& [fd, socket] : p.fds) {
      if (want == 2 || socket == (want == 1)) fds.push_back(fd);
    }
    if (fds.empty()) return std::nullopt;
    return pick(fds);
  }

  void step() {
    static const std::vector<std::string> kFiles = {"/etc/passwd", "/var/log/app.log", "/tmp/a",
                                                    "/tmp/b", "/data/db.bin", "/tmp/exfil.py"};
    static const std::vector<std::string> kDirs = {"/tmp/d1", "/tmp/d2"};
    static const std::vector<NetTuple> kNets = {tcp("10.0.0.1", 40000, "10.0.0.2", 80),
                                                tcp("10.0.0.1", 40001, "8.8.8.8", 443),
                                                tcp("172.17.0.2", 3000, "10.1.1.1", 51000),
                                                NetTuple{0, 0, *parse_ipv4("0.0.0.0"), 53, Proto::udp}};

    tick();
    if (procs.empty() || (procs.size() < 4 && coin(3))) {
      spawn(procs.empty() || coin(40) ? std::nullopt
                                      : std::optional<std::uint32_t>(pick(procs).actor.pid));
      return;
    }
    const std::size_t pi = below(procs.size());
    Proc& p = procs[pi];
    const std::uint32_t tid = any_tid(p);
    const std::uint64_t roll = below(100);

    if (roll < 14) {  // open
      RawEvent e = base(p, coin(30) ? Syscall::openat : Syscall::open);
      e.path = pick(kFiles);
      if (coin(10)) {
        e.ret = -2;
      } else {
        const std::int32_t fd = p.free_fd();
        if (coin(50)) e.fd = fd;
        e.ret = fd;
        p.fds[fd] = false;
      }
      e.tid = tid;
      out.push_back(e);
    } else if (roll < 40) {  // read/write on anything
      auto fd = some_fd(p, 2);
      if (!fd) return;
      RawEvent e = base(p, coin(50) ? Syscall::read : Syscall::write, tid);
      e.fd = *fd;
      e.ret = coin(85) ? static_cast<std::int64_t>(below(9000)) : -11;
      out.push_back(e);
    } else if (roll < 48) {  // send/recv
      auto fd = some_fd(p, 1);
      if (!fd) return;
      static const std::vector<Syscall> kCalls = {Syscall::send, Syscall::recv, Syscall::sendto,
                                                  Syscall::recvfrom};
      RawEvent e = base(p, pick(kCalls), tid);
      e.fd = *fd;
      e.ret = coin(90) ? static_cast<std::int64_t>(below(1500)) : -104;
      out.push_back(e);
    } else if (roll < 56) {  // close
      auto fd = some_fd(p, 2);
      if (!fd) return;
      RawEvent e = base(p, Syscall::close, tid);
      e.fd = *fd;
      out.push_back(e);
      p.fds.erase(*fd);
    } else if (roll < 59) {  // mmap / setns
      RawEvent e = base(p, coin(70) ? Syscall::mmap : Syscall::setns, tid);
      if (auto fd = some_fd(p, 0); fd && coin(70)) {
        e.fd = *fd;
      } else {
        e.fd = 900 + static_cast<std::int32_t>(below(5));
        if (p.fds.contains(*e.fd)) return;
        e.path = pick(kFiles);
      }
      out.push_back(e);
    } else if (roll < 66) {  // accept/connect, or send on a never-seen socket
      const std::int32_t fd = p.free_fd();
      const int kind = static_cast<int>(below(3));
      RawEvent e = base(p, kind == 0 ? Syscall::accept : kind == 1 ? Syscall::connect : Syscall::send,
                        tid);
      e.fd = fd;
      e.net = pick(kNets);
      e.ret = kind == 0 ? fd : kind == 1 ? 0 : 12;
      if (kind != 2 && coin(10)) {
        e.ret = -111;
      } else {
        p.fds[fd] = true;
      }
      out.push_back(e);
    } else if (roll < 68) {  // shutdown
      auto fd = some_fd(p, 1);
      if (!fd) return;
      RawEvent e = base(p, Syscall::shutdown, tid);
      e.fd = *fd;
      out.push_back(e);
    } else if (roll < 74) {  // new thread
      if (p.threads.size() > 6) return;
      RawEvent e = base(p, Syscall::clone, tid);
      e.thread_flag = true;
      std::uint32_t child = next_tid;
      if (!p.dead_threads.empty() && coin(50)) {
        child = p.dead_threads.back();
        p.dead_threads.pop_back();
      } else {
        ++next_tid;
      }
      e.ret = child;
      out.push_back(e);
      p.threads.push_back(child);
    } else if (roll < 79) {  // thread exit
      if (p.threads.size() < 2) return;
      const std::size_t k = 1 + below(p.threads.size() - 1);
      out.push_back(base(p, Syscall::exit, p.threads[k]));
      p.dead_threads.push_back(p.threads[k]);
      p.threads.erase(p.threads.begin() + static_cast<std::ptrdiff_t>(k));
    } else if (roll < 81) {  // fork
      if (procs.size() < 6) spawn(p.actor.pid);
    } else if (roll < 83) {  // exec
      static const std::vector<std::string> kImages = {"/usr/bin/python3", "/usr/bin/curl",
                                                       "/bin/sh"};
      p.actor.exe = pick(kImages);
      p.actor.args = coin(50) ? "/tmp/exfil.py" : "";
      RawEvent e = base(p, Syscall::execve, tid);
      e.ret = 0;
      out.push_back(e);
    } else if (roll < 85) {  // setuid / setgid
      const bool uid = coin(50);
      RawEvent e = base(p, uid ? Syscall::setuid : Syscall::setgid, tid);
      const std::uint32_t value = coin(30) ? (uid ? p.uid : p.gid) : 33 + static_cast<std::uint32_t>(below(3));
      (uid ? e.uid : e.gid) = value;
      e.ret = coin(15) ? -1 : 0;
      if (e.ret == 0) (uid ? p.uid : p.gid) = value;
      out.push_back(e);
    } else if (roll < 93) {  // file events
      static const std::vector<Syscall> kCalls = {
          Syscall::mkdir, Syscall::rmdir, Syscall::unlink, Syscall::symlink, Syscall::link,
          Syscall::rename, Syscall::chmod, Syscall::chown, Syscall::mount, Syscall::umount};
      const Syscall sc = pick(kCalls);
      const bool dir = sc == Syscall::mkdir || sc == Syscall::rmdir || sc == Syscall::mount ||
                       sc == Syscall::umount;
      RawEvent e = base(p, sc, tid);
      e.path = dir ? pick(kDirs) : pick(kFiles);
      if (sc == Syscall::rename || sc == Syscall::link || sc == Syscall::symlink) {
        e.new_path = pick(kFiles);
      }
      if (coin(10)) e.file_type = FileType::pipe;
      e.ret = coin(15) ? -2 : 0;
      out.push_back(e);
    } else if (roll < 96) {  // bind / listen
      RawEvent e = base(p, coin(50) ? Syscall::bind : Syscall::listen, tid);
      auto fd = some_fd(p, 1);
      if (fd && coin(50)) {
        e.fd = *fd;
      } else {
        e.net = pick(kNets);
        if (coin(50)) {
          e.fd = p.free_fd();
          p.fds[*e.fd] = true;
        }
      }
      out.push_back(e);
    } else {  // process exit
      RawEvent e = base(p, Syscall::exit);
      e.ret = static_cast<std::int64_t>(below(3));
      out.push_back(e);
      dead_pids.push_back(p.actor.pid);
      procs.erase(procs.begin() + static_cast<std::ptrdiff_t>(pi));
    }
  }
};

}  // namespace

std::vector<RawEvent> random_trace(std::uint64_t seed, std::size_t n_events) {
  Sim sim(seed);
  while (sim.out.size() < n_events) sim.step();
  sim.out.resize(n_events);
  return sim.out;
}

std::vector<RawEvent> passwd_reader_trace() {
  const RawActor shell{300, 1, "/bin/bash", ""};
  const RawActor cat{301, 300, "/bin/cat", "/etc/passwd"};
  std::vector<RawEvent> t;
  RawEvent fork = shell.ev(kT0, Syscall::clone);
  fork.ret = 301;
  t.push_back(fork);
  t.push_back(cat.open(kT0 + 1000, "/etc/passwd", 3));
  t.push_back(cat.io(kT0 + 2000, Syscall::read, 3, 2981));
  t.push_back(cat.io(kT0 + 3000, Syscall::read, 3, 0));
  t.push_back(cat.io(kT0 + 4000, Syscall::close, 3, 0));
  RawEvent done = cat.ev(kT0 + 5000, Syscall::exit);
  t.push_back(done);
  return t;
}

std::vector<SfRecord> shell_chain_records() {
  Process bash;
  bash.oid = Oid{1};
  bash.ts = kT0;
  bash.pid = 10;
  bash.exe = "/bin/bash";
  bash.created_ts = kT0;

  Process python = bash;
  python.oid = Oid{2};
  python.parent_oid = bash.oid;
  python.pid = 11;
  python.exe = "/usr/bin/python3";
  python.args = "fetch.py";

  Process curl = python;
  curl.oid = Oid{3};
  curl.parent_oid = python.oid;
  curl.pid = 12;
  curl.exe = "/usr/bin/curl";
  curl.args = "http://198.51.100.7/x";

  NetworkFlow nf;
  nf.proc_oid = curl.oid;
  nf.start_ts = kT0 + kSec;
  nf.end_ts = kT0 + 2 * kSec;
  nf.tid = 12;
  nf.fd = 4;
  nf.net = tcp("172.17.0.5", 43122, "198.51.100.7", 80);
  nf.opflags = Op::Connect | Op::Send | Op::Recv | Op::Close;
  nf.num_sends = 1;
  nf.bytes_sent = 80;
  nf.num_recvs = 2;
  nf.bytes_received = 1024;

  ProcessEvent exec;
  exec.proc_oid = python.oid;
  exec.ts = kT0 + kSec / 2;
  exec.tid = 11;
  exec.opflags = OpFlags::of(Op::Exec);
  exec.args_delta = "fetch.py";

  return {bash, python, curl, exec, nf};
}

}  // namespace sysflow::testing
