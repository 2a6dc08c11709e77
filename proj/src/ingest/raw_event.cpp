#include "sysflow/ingest/raw_event.hpp"

#include <array>
#include <limits>
#include <set>

#include <json.hpp>

namespace sysflow::ingest {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::array<std::string_view, kSyscallCount> kSyscallNames = {
    "clone",  "execve", "exit",    "setuid",  "setgid", "open",     "openat", "read",
    "write",  "close",  "mmap",    "setns",   "mkdir",  "rmdir",    "unlink", "symlink",
    "link",   "rename", "chmod",   "chown",   "mount",  "umount",   "bind",   "listen",
    "accept", "connect", "send",   "recv",    "sendto", "recvfrom", "shutdown",
};

const std::set<std::string_view> kKnownKeys = {
    "ts",     "pid",          "tid",         "ppid",           "exe",
    "args",   "uid",          "gid",         "container_id",   "container_name",
    "container_image",        "container_type", "syscall",     "fd",
    "path",   "new_path",     "file_type",   "net",            "ret",
    "thread_flag",
};

bool needs_fd(Syscall s) {
  switch (s) {
    case Syscall::read:
    case Syscall::write:
    case Syscall::close:
    case Syscall::mmap:
    case Syscall::setns:
    case Syscall::accept:
    case Syscall::connect:
    case Syscall::send:
    case Syscall::recv:
    case Syscall::shutdown:
      return true;
    default:
      return false;
  }
}

bool needs_path(Syscall s) {
  switch (s) {
    case Syscall::open:
    case Syscall::mkdir:
    case Syscall::rmdir:
    case Syscall::unlink:
    case Syscall::symlink:
    case Syscall::link:
    case Syscall::rename:
    case Syscall::chmod:
    case Syscall::chown:
    case Syscall::mount:
    case Syscall::umount:
      return true;
    default:
      return false;
  }
}

bool needs_new_path(Syscall s) {
  return s == Syscall::symlink || s == Syscall::link || s == Syscall::rename;
}

class Fields {
 public:
  explicit Fields(const json& j) : j_(j) {}

  const json* find(const char* key) const {
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  const json& require(const char* key) const {
    const json* v = find(key);
    if (v == nullptr) throw ValidationError(std::string("missing required field \"") + key + "\"");
    return *v;
  }
  static std::uint64_t as_unsigned(const json& v, const char* key, std::uint64_t max) {
    if (!v.is_number_integer()) {
      throw ValidationError(std::string("field \"") + key + "\" must be an integer");
    }
    if (!v.is_number_unsigned() && v.get<std::int64_t>() < 0) {
      throw ValidationError(std::string("field \"") + key + "\" must not be negative");
    }
    const auto u = v.get<std::uint64_t>();
    if (u > max) throw ValidationError(std::string("field \"") + key + "\" out of range");
    return u;
  }
  static std::int64_t as_signed(const json& v, const char* key, std::int64_t lo, std::int64_t hi) {
    if (!v.is_number_integer()) {
      throw ValidationError(std::string("field \"") + key + "\" must be an integer");
    }
    if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(hi)) {
      throw ValidationError(std::string("field \"") + key + "\" out of range");
    }
    const auto s = v.get<std::int64_t>();
    if (s < lo || s > hi) throw ValidationError(std::string("field \"") + key + "\" out of range");
    return s;
  }
  static std::string as_string(const json& v, const char* key) {
    if (!v.is_string()) throw ValidationError(std::string("field \"") + key + "\" must be a string");
    return v.get<std::string>();
  }

  std::uint32_t u32(const char* key, std::uint32_t fallback) const {
    const json* v = find(key);
    return v == nullptr ? fallback
                        : static_cast<std::uint32_t>(as_unsigned(*v, key, UINT32_MAX));
  }
  std::optional<std::string> opt_string(const char* key) const {
    const json* v = find(key);
    if (v == nullptr || v->is_null()) return std::nullopt;
    return as_string(*v, key);
  }

 private:
  const json& j_;
};

NetTuple parse_net(const json& v) {
  if (!v.is_object()) throw ValidationError("field \"net\" must be an object");
  auto ip = [&v](const char* key) {
    const json* f = v.contains(key) ? &v.at(key) : nullptr;
    if (f == nullptr) throw ValidationError(std::string("net: missing \"") + key + "\"");
    const std::string text = Fields::as_string(*f, key);
    auto parsed = parse_ipv4(text);
    if (!parsed) throw ValidationError(std::string("net: bad IPv4 \"") + text + "\"");
    return *parsed;
  };
  auto port = [&v](const char* key) {
    if (!v.contains(key)) throw ValidationError(std::string("net: missing \"") + key + "\"");
    return static_cast<std::uint16_t>(Fields::as_unsigned(v.at(key), key, UINT16_MAX));
  };
  NetTuple n;
  n.sip = ip("sip");
  n.sport = port("sport");
  n.dip = ip("dip");
  n.dport = port("dport");
  if (v.contains("proto")) {
    const std::string text = Fields::as_string(v.at("proto"), "proto");
    auto proto = proto_from_string(text);
    if (!proto) throw ValidationError("net: unknown proto \"" + text + "\"");
    n.proto = *proto;
  }
  for (const auto& [key, value] : v.items()) {
    (void)value;
    if (key != "sip" && key != "sport" && key != "dip" && key != "dport" && key != "proto") {
      throw ValidationError("net: unknown field \"" + key + "\"");
    }
  }
  return n;
}

RawEvent from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!kKnownKeys.contains(key)) throw ValidationError("unknown field \"" + key + "\"");
  }
  Fields f(j);
  RawEvent ev;

  const json& ts = f.require("ts");
  if (ts.is_number_integer() && !ts.is_number_unsigned() && ts.get<std::int64_t>() < 0) {
    throw ValidationError("negative ts");
  }
  ev.ts = Fields::as_unsigned(ts, "ts", UINT64_MAX);
  ev.pid = static_cast<std::uint32_t>(Fields::as_unsigned(f.require("pid"), "pid", UINT32_MAX));
  ev.tid = static_cast<std::uint32_t>(Fields::as_unsigned(f.require("tid"), "tid", UINT32_MAX));
  ev.ppid = f.u32("ppid", 0);

  const std::string name = Fields::as_string(f.require("syscall"), "syscall");
  const auto sc = syscall_from_string(name);
  if (!sc) throw ValidationError("unknown syscall \"" + name + "\"");
  ev.syscall = normalize(*sc);

  ev.exe = Fields::as_string(f.require("exe"), "exe");
  ev.args = f.opt_string("args").value_or("");
  ev.uid = f.u32("uid", 0);
  ev.gid = f.u32("gid", 0);

  if (auto id = f.opt_string("container_id")) {
    if (id->empty()) throw ValidationError("field \"container_id\" must not be empty");
    ContainerInfo c;
    c.id = *id;
    c.name = f.opt_string("container_name").value_or("");
    c.image = f.opt_string("container_image").value_or("");
    if (auto type = f.opt_string("container_type")) {
      auto parsed = container_type_from_string(*type);
      if (!parsed) throw ValidationError("unknown container_type \"" + *type + "\"");
      c.type = *parsed;
    }
    ev.container = std::move(c);
  } else if (f.find("container_name") || f.find("container_image") || f.find("container_type")) {
    throw ValidationError("container fields without \"container_id\"");
  }

  if (const json* fd = f.find("fd"); fd != nullptr && !fd->is_null()) {
    ev.fd = static_cast<std::int32_t>(Fields::as_signed(
        *fd, "fd", std::numeric_limits<std::int32_t>::min(), std::numeric_limits<std::int32_t>::max()));
  }
  ev.path = f.opt_string("path");
  ev.new_path = f.opt_string("new_path");
  if (auto type = f.opt_string("file_type")) {
    auto parsed = file_type_from_string(*type);
    if (!parsed) throw ValidationError("unknown file_type \"" + *type + "\"");
    ev.file_type = *parsed;
  }
  if (const json* net = f.find("net"); net != nullptr && !net->is_null()) {
    ev.net = parse_net(*net);
  }
  if (const json* ret = f.find("ret")) {
    ev.ret = Fields::as_signed(*ret, "ret", INT64_MIN, INT64_MAX);
  }
  if (const json* flag = f.find("thread_flag")) {
    if (!flag->is_boolean()) throw ValidationError("field \"thread_flag\" must be a boolean");
    ev.thread_flag = flag->get<bool>();
  }

  const std::string sc_name(to_string(ev.syscall));
  if (needs_fd(ev.syscall) && !ev.fd) throw ValidationError(sc_name + " requires \"fd\"");
  if (needs_path(ev.syscall) && (!ev.path || ev.path->empty())) {
    throw ValidationError(sc_name + " requires \"path\"");
  }
  if (needs_new_path(ev.syscall) && (!ev.new_path || ev.new_path->empty())) {
    throw ValidationError(sc_name + " requires \"new_path\"");
  }
  if ((ev.syscall == Syscall::accept || ev.syscall == Syscall::connect) && !ev.net) {
    throw ValidationError(sc_name + " requires \"net\"");
  }
  if (ev.thread_flag && ev.syscall != Syscall::clone) {
    throw ValidationError("\"thread_flag\" is only meaningful on clone");
  }
  return ev;
}

}  // namespace

std::string_view to_string(Syscall s) { return kSyscallNames[static_cast<std::size_t>(s)]; }

std::optional<Syscall> syscall_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kSyscallNames.size(); ++i) {
    if (kSyscallNames[i] == name) return static_cast<Syscall>(i);
  }
  return std::nullopt;
}

Syscall normalize(Syscall s) {
  switch (s) {
    case Syscall::openat: return Syscall::open;
    case Syscall::sendto: return Syscall::send;
    case Syscall::recvfrom: return Syscall::recv;
    default: return s;
  }
}

RawParseError::RawParseError(std::size_t line, const std::string& detail)
    : Error("line " + std::to_string(line) + ": " + detail), line_(line) {}

RawEvent parse_raw(std::string_view line, std::size_t line_no) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw RawParseError(line_no, std::string("invalid JSON: ") + e.what());
  }
  try {
    return from_json(j);
  } catch (const ValidationError& e) {
    throw RawParseError(line_no, e.what());
  }
}

std::string to_raw_json(const RawEvent& ev) {
  ordered_json j;
  j["ts"] = ev.ts;
  j["pid"] = ev.pid;
  j["tid"] = ev.tid;
  j["ppid"] = ev.ppid;
  j["syscall"] = to_string(ev.syscall);
  j["exe"] = ev.exe;
  if (!ev.args.empty()) j["args"] = ev.args;
  if (ev.uid != 0) j["uid"] = ev.uid;
  if (ev.gid != 0) j["gid"] = ev.gid;
  if (ev.container) {
    j["container_id"] = ev.container->id;
    j["container_name"] = ev.container->name;
    j["container_image"] = ev.container->image;
    j["container_type"] = to_string(ev.container->type);
  }
  if (ev.fd) j["fd"] = *ev.fd;
  if (ev.path) j["path"] = *ev.path;
  if (ev.new_path) j["new_path"] = *ev.new_path;
  if (ev.file_type) j["file_type"] = to_string(*ev.file_type);
  if (ev.net) {
    ordered_json n;
    n["sip"] = ipv4_to_string(ev.net->sip);
    n["sport"] = ev.net->sport;
    n["dip"] = ipv4_to_string(ev.net->dip);
    n["dport"] = ev.net->dport;
    n["proto"] = to_string(ev.net->proto);
    j["net"] = std::move(n);
  }
  j["ret"] = ev.ret;
  if (ev.thread_flag) j["thread_flag"] = true;
  return j.dump();
}

std::optional<RawEvent> RawTraceReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    RawEvent ev = parse_raw(line, line_no_);
    if (last_ts_ && ev.ts < *last_ts_) {
      throw RawParseError(line_no_, "timestamp " + std::to_string(ev.ts) +
                                        " goes backwards (previous " +
                                        std::to_string(*last_ts_) + ")");
    }
    last_ts_ = ev.ts;
    ++events_;
    return ev;
  }
  if (in_.bad()) throw IoError("read from raw trace failed");
  return std::nullopt;
}

}  // namespace sysflow::ingest
