#include "sysflow/codec/json_lines.hpp"

#include <limits>
#include <sstream>

namespace sysflow::codec {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Field-by-field builder for the output object.
class Out {
 public:
  explicit Out(RecordKind kind) { j_["type"] = kind_name(kind); }

  Out& num(const char* key, std::uint64_t v) {
    j_[key] = v;
    return *this;
  }
  Out& snum(const char* key, std::int64_t v) {
    j_[key] = v;
    return *this;
  }
  Out& oid(const char* key, Oid v) { return num(key, to_u64(v)); }
  Out& str(const char* key, const std::string& v) {
    j_[key] = v;
    return *this;
  }
  Out& ip(const char* key, std::uint32_t v) {
    j_[key] = ipv4_to_string(v);
    return *this;
  }
  Out& net(const NetTuple& n) {
    ip("sip", n.sip);
    num("sport", n.sport);
    ip("dip", n.dip);
    num("dport", n.dport);
    j_["proto"] = to_string(n.proto);
    return *this;
  }
  ordered_json& raw() { return j_; }

 private:
  ordered_json j_;
};

// Typed field access with errors naming the field.
class In {
 public:
  explicit In(const json& j) : j_(j) {}

  const json& field(const char* key) {
    auto it = j_.find(key);
    if (it == j_.end()) throw ValidationError(std::string("missing field \"") + key + "\"");
    ++used_;
    return *it;
  }
  std::uint64_t num(const char* key, std::uint64_t max = UINT64_MAX) {
    const json& v = field(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      throw ValidationError(std::string("field \"") + key + "\" must be a non-negative integer");
    }
    const auto u = v.get<std::uint64_t>();
    if (u > max) throw ValidationError(std::string("field \"") + key + "\" out of range");
    return u;
  }
  std::int64_t snum(const char* key, std::int64_t lo = INT64_MIN, std::int64_t hi = INT64_MAX) {
    const json& v = field(key);
    if (!v.is_number_integer()) {
      throw ValidationError(std::string("field \"") + key + "\" must be an integer");
    }
    if (v.is_number_unsigned() &&
        v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
      throw ValidationError(std::string("field \"") + key + "\" out of range");
    }
    const auto s = v.get<std::int64_t>();
    if (s < lo || s > hi) throw ValidationError(std::string("field \"") + key + "\" out of range");
    return s;
  }
  std::uint32_t u32(const char* key) { return static_cast<std::uint32_t>(num(key, UINT32_MAX)); }
  Oid oid(const char* key) { return static_cast<Oid>(num(key)); }
  std::string str(const char* key) {
    const json& v = field(key);
    if (!v.is_string()) throw ValidationError(std::string("field \"") + key + "\" must be a string");
    return v.get<std::string>();
  }
  std::uint32_t ip(const char* key) {
    const std::string text = str(key);
    auto ip = parse_ipv4(text);
    if (!ip) throw ValidationError(std::string("field \"") + key + "\": bad IPv4 \"" + text + "\"");
    return *ip;
  }
  template <class E, class Parse>
  E enumeration(const char* key, Parse parse) {
    const std::string text = str(key);
    auto v = parse(text);
    if (!v) throw ValidationError(std::string("field \"") + key + "\": unknown value \"" + text + "\"");
    return *v;
  }
  OpFlags flags() { return OpFlags(u32("opflags")); }
  NetTuple net() {
    NetTuple n;
    n.sip = ip("sip");
    n.sport = static_cast<std::uint16_t>(num("sport", UINT16_MAX));
    n.dip = ip("dip");
    n.dport = static_cast<std::uint16_t>(num("dport", UINT16_MAX));
    n.proto = enumeration<Proto>("proto", proto_from_string);
    return n;
  }
  std::size_t used() const { return used_; }

 private:
  const json& j_;
  std::size_t used_ = 0;
};

struct ToJson {
  ordered_json operator()(const Header& h) const {
    Out o(RecordKind::Header);
    o.num("version", h.version)
        .str("hostname", h.hostname)
        .str("distribution", h.distribution)
        .str("kernel_version", h.kernel_version)
        .num("exported_at", h.exported_at);
    return o.raw();
  }
  ordered_json operator()(const Container& c) const {
    Out o(RecordKind::Container);
    o.oid("oid", c.oid).num("ts", c.ts).str("container_id", c.container_id).str("name", c.name);
    o.str("image", c.image).raw()["container_type"] = to_string(c.container_type);
    return o.raw();
  }
  ordered_json operator()(const Process& p) const {
    Out o(RecordKind::Process);
    o.oid("oid", p.oid)
        .num("ts", p.ts)
        .oid("parent_oid", p.parent_oid)
        .oid("container_oid", p.container_oid)
        .num("pid", p.pid)
        .str("exe", p.exe)
        .str("args", p.args)
        .num("uid", p.uid)
        .num("gid", p.gid)
        .num("created_ts", p.created_ts);
    return o.raw();
  }
  ordered_json operator()(const File& f) const {
    Out o(RecordKind::File);
    o.oid("oid", f.oid).num("ts", f.ts).str("path", f.path);
    o.raw()["file_type"] = to_string(f.file_type);
    return o.raw();
  }
  ordered_json operator()(const ProcessEvent& e) const {
    Out o(RecordKind::ProcessEvent);
    o.oid("proc_oid", e.proc_oid).num("ts", e.ts).num("tid", e.tid);
    o.num("opflags", e.opflags.bits()).snum("ret", e.ret);
    if (e.args_delta) {
      o.str("args_delta", *e.args_delta);
    } else {
      o.raw()["args_delta"] = nullptr;
    }
    return o.raw();
  }
  ordered_json operator()(const ProcessFlow& f) const {
    Out o(RecordKind::ProcessFlow);
    o.oid("proc_oid", f.proc_oid)
        .num("start_ts", f.start_ts)
        .num("end_ts", f.end_ts)
        .num("tid", f.tid)
        .num("opflags", f.opflags.bits())
        .num("num_threads_cloned", f.num_threads_cloned)
        .num("num_threads_exited", f.num_threads_exited);
    return o.raw();
  }
  ordered_json operator()(const FileEvent& e) const {
    Out o(RecordKind::FileEvent);
    o.oid("proc_oid", e.proc_oid)
        .oid("file_oid", e.file_oid)
        .num("ts", e.ts)
        .num("tid", e.tid)
        .num("opflags", e.opflags.bits())
        .oid("new_file_oid", e.new_file_oid)
        .snum("ret", e.ret);
    return o.raw();
  }
  ordered_json operator()(const FileFlow& f) const {
    Out o(RecordKind::FileFlow);
    o.oid("proc_oid", f.proc_oid)
        .oid("file_oid", f.file_oid)
        .num("start_ts", f.start_ts)
        .num("end_ts", f.end_ts)
        .num("tid", f.tid)
        .snum("fd", f.fd)
        .num("opflags", f.opflags.bits())
        .num("num_reads", f.num_reads)
        .num("bytes_read", f.bytes_read)
        .num("num_writes", f.num_writes)
        .num("bytes_written", f.bytes_written);
    return o.raw();
  }
  ordered_json operator()(const NetworkEvent& e) const {
    Out o(RecordKind::NetworkEvent);
    o.oid("proc_oid", e.proc_oid).num("ts", e.ts).num("tid", e.tid);
    o.num("opflags", e.opflags.bits()).net(e.net);
    return o.raw();
  }
  ordered_json operator()(const NetworkFlow& f) const {
    Out o(RecordKind::NetworkFlow);
    o.oid("proc_oid", f.proc_oid)
        .num("start_ts", f.start_ts)
        .num("end_ts", f.end_ts)
        .num("tid", f.tid)
        .snum("fd", f.fd)
        .net(f.net)
        .num("opflags", f.opflags.bits())
        .num("num_sends", f.num_sends)
        .num("bytes_sent", f.bytes_sent)
        .num("num_recvs", f.num_recvs)
        .num("bytes_received", f.bytes_received);
    return o.raw();
  }
};

RecordBody body_from_json(RecordKind kind, In& in) {
  const auto i32_min = std::numeric_limits<std::int32_t>::min();
  const auto i32_max = std::numeric_limits<std::int32_t>::max();
  switch (kind) {
    case RecordKind::Header: {
      Header h;
      h.version = in.u32("version");
      h.hostname = in.str("hostname");
      h.distribution = in.str("distribution");
      h.kernel_version = in.str("kernel_version");
      h.exported_at = in.num("exported_at");
      return h;
    }
    case RecordKind::Container: {
      Container c;
      c.oid = in.oid("oid");
      c.ts = in.num("ts");
      c.container_id = in.str("container_id");
      c.name = in.str("name");
      c.image = in.str("image");
      c.container_type =
          in.enumeration<ContainerType>("container_type", container_type_from_string);
      return c;
    }
    case RecordKind::Process: {
      Process p;
      p.oid = in.oid("oid");
      p.ts = in.num("ts");
      p.parent_oid = in.oid("parent_oid");
      p.container_oid = in.oid("container_oid");
      p.pid = in.u32("pid");
      p.exe = in.str("exe");
      p.args = in.str("args");
      p.uid = in.u32("uid");
      p.gid = in.u32("gid");
      p.created_ts = in.num("created_ts");
      return p;
    }
    case RecordKind::File: {
      File f;
      f.oid = in.oid("oid");
      f.ts = in.num("ts");
      f.path = in.str("path");
      f.file_type = in.enumeration<FileType>("file_type", file_type_from_string);
      return f;
    }
    case RecordKind::ProcessEvent: {
      ProcessEvent e;
      e.proc_oid = in.oid("proc_oid");
      e.ts = in.num("ts");
      e.tid = in.u32("tid");
      e.opflags = in.flags();
      e.ret = in.snum("ret");
      const json& delta = in.field("args_delta");
      if (delta.is_string()) {
        e.args_delta = delta.get<std::string>();
      } else if (!delta.is_null()) {
        throw ValidationError("field \"args_delta\" must be a string or null");
      }
      return e;
    }
    case RecordKind::ProcessFlow: {
      ProcessFlow f;
      f.proc_oid = in.oid("proc_oid");
      f.start_ts = in.num("start_ts");
      f.end_ts = in.num("end_ts");
      f.tid = in.u32("tid");
      f.opflags = in.flags();
      f.num_threads_cloned = in.num("num_threads_cloned");
      f.num_threads_exited = in.num("num_threads_exited");
      return f;
    }
    case RecordKind::FileEvent: {
      FileEvent e;
      e.proc_oid = in.oid("proc_oid");
      e.file_oid = in.oid("file_oid");
      e.ts = in.num("ts");
      e.tid = in.u32("tid");
      e.opflags = in.flags();
      e.new_file_oid = in.oid("new_file_oid");
      e.ret = in.snum("ret");
      return e;
    }
    case RecordKind::FileFlow: {
      FileFlow f;
      f.proc_oid = in.oid("proc_oid");
      f.file_oid = in.oid("file_oid");
      f.start_ts = in.num("start_ts");
      f.end_ts = in.num("end_ts");
      f.tid = in.u32("tid");
      f.fd = static_cast<std::int32_t>(in.snum("fd", i32_min, i32_max));
      f.opflags = in.flags();
      f.num_reads = in.num("num_reads");
      f.bytes_read = in.num("bytes_read");
      f.num_writes = in.num("num_writes");
      f.bytes_written = in.num("bytes_written");
      return f;
    }
    case RecordKind::NetworkEvent: {
      NetworkEvent e;
      e.proc_oid = in.oid("proc_oid");
      e.ts = in.num("ts");
      e.tid = in.u32("tid");
      e.opflags = in.flags();
      e.net = in.net();
      return e;
    }
    case RecordKind::NetworkFlow: {
      NetworkFlow f;
      f.proc_oid = in.oid("proc_oid");
      f.start_ts = in.num("start_ts");
      f.end_ts = in.num("end_ts");
      f.tid = in.u32("tid");
      f.fd = static_cast<std::int32_t>(in.snum("fd", i32_min, i32_max));
      f.net = in.net();
      f.opflags = in.flags();
      f.num_sends = in.num("num_sends");
      f.bytes_sent = in.num("bytes_sent");
      f.num_recvs = in.num("num_recvs");
      f.bytes_received = in.num("bytes_received");
      return f;
    }
  }
  throw ValidationError("unknown record type");
}

}  // namespace

JsonLineError::JsonLineError(std::size_t line, const std::string& detail)
    : Error("line " + std::to_string(line) + ": " + detail), line_(line) {}

ordered_json to_json(const SfRecord& rec) {
  ordered_json j = std::visit(ToJson{}, rec.body);
  j["tags"] = rec.tags;
  return j;
}

SfRecord from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("record must be a JSON object");
  In in(j);
  const std::string type = in.str("type");
  const auto kind = kind_from_name(type);
  if (!kind) throw ValidationError("unknown record type \"" + type + "\"");
  SfRecord rec;
  rec.body = body_from_json(*kind, in);
  const json& tags = in.field("tags");
  if (!tags.is_array()) throw ValidationError("field \"tags\" must be an array");
  for (const auto& t : tags) {
    if (!t.is_string()) throw ValidationError("field \"tags\" must hold strings");
    rec.tags.push_back(t.get<std::string>());
  }
  if (in.used() != j.size()) {
    const ordered_json known = to_json(rec);
    for (const auto& [key, value] : j.items()) {
      (void)value;
      if (!known.contains(key)) {
        throw ValidationError("unknown field \"" + key + "\" for " + type);
      }
    }
  }
  validate(rec);
  return rec;
}

std::string to_json_line(const SfRecord& rec) {
  validate(rec);
  return to_json(rec).dump();
}

SfRecord from_json_line(std::string_view text, std::size_t line_no) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw JsonLineError(line_no, std::string("invalid JSON: ") + e.what());
  }
  try {
    return from_json(j);
  } catch (const ValidationError& e) {
    throw JsonLineError(line_no, e.what());
  }
}

JsonLinesWriter::JsonLinesWriter(std::ostream& out, const Header& header) : out_(out) {
  out_ << to_json_line(SfRecord(header)) << '\n';
  if (!out_) throw IoError("write to output stream failed");
}

void JsonLinesWriter::put(const SfRecord& rec) {
  if (rec.kind() == RecordKind::Header) {
    throw ValidationError("record " + std::to_string(count_) +
                          ": a stream carries exactly one header");
  }
  ordering_.check(rec, count_);
  out_ << to_json_line(rec) << '\n';
  if (!out_) throw IoError("write to output stream failed");
  ++count_;
}

void JsonLinesWriter::finish() {
  out_.flush();
  if (!out_) throw IoError("write to output stream failed");
}

JsonLinesReader::JsonLinesReader(std::istream& in) : in_(in) {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    SfRecord rec = from_json_line(line, line_no_);
    const auto* h = rec.get_if<Header>();
    if (h == nullptr) throw JsonLineError(line_no_, "first record must be a Header");
    header_ = *h;
    return;
  }
  if (in_.bad()) throw IoError("read from input stream failed");
  throw JsonLineError(line_no_ + 1, "missing Header line");
}

std::optional<SfRecord> JsonLinesReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    SfRecord rec = from_json_line(line, line_no_);
    if (rec.kind() == RecordKind::Header) throw JsonLineError(line_no_, "second Header record");
    entities_.put(rec);
    return rec;
  }
  if (in_.bad()) throw IoError("read from input stream failed");
  return std::nullopt;
}

std::string to_json_lines(const Header& header, std::span<const SfRecord> records) {
  std::ostringstream out;
  JsonLinesWriter writer(out, header);
  for (const auto& rec : records) writer.put(rec);
  writer.finish();
  return out.str();
}

JsonStream from_json_lines(std::string_view text) {
  std::istringstream in{std::string(text)};
  JsonLinesReader reader(in);
  JsonStream out;
  out.header = reader.header();
  while (auto rec = reader.next()) out.records.push_back(std::move(*rec));
  return out;
}

}  // namespace sysflow::codec
