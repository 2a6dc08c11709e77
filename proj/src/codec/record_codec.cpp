#include "sysflow/codec/record_codec.hpp"

#include <limits>
#include <string>

namespace sysflow::codec {

namespace {

class Encoder {
 public:
  explicit Encoder(std::vector<std::uint8_t>& out) : out_(out) {}

  void i64(std::int64_t v) { append_varint(out_, v); }
  void u64(std::uint64_t v) { append_varint(out_, static_cast<std::int64_t>(v)); }
  void oid(Oid v) { u64(to_u64(v)); }
  void str(std::string_view s) { append_string(out_, s); }
  template <class E>
  void enumeration(E e) {
    u64(static_cast<std::uint64_t>(e));
  }
  void flags(OpFlags f) { u64(f.bits()); }
  void net(const NetTuple& n) {
    u64(n.sip);
    u64(n.sport);
    u64(n.dip);
    u64(n.dport);
    enumeration(n.proto);
  }

  void body(const Header& h) {
    u64(h.version);
    str(h.hostname);
    str(h.distribution);
    str(h.kernel_version);
    u64(h.exported_at);
  }
  void body(const Container& c) {
    oid(c.oid);
    u64(c.ts);
    str(c.container_id);
    str(c.name);
    str(c.image);
    enumeration(c.container_type);
  }
  void body(const Process& p) {
    oid(p.oid);
    u64(p.ts);
    oid(p.parent_oid);
    oid(p.container_oid);
    u64(p.pid);
    str(p.exe);
    str(p.args);
    u64(p.uid);
    u64(p.gid);
    u64(p.created_ts);
  }
  void body(const File& f) {
    oid(f.oid);
    u64(f.ts);
    str(f.path);
    enumeration(f.file_type);
  }
  void body(const ProcessEvent& e) {
    oid(e.proc_oid);
    u64(e.ts);
    u64(e.tid);
    flags(e.opflags);
    i64(e.ret);
    if (e.args_delta) {
      u64(1);
      str(*e.args_delta);
    } else {
      u64(0);
    }
  }
  void body(const ProcessFlow& f) {
    oid(f.proc_oid);
    u64(f.start_ts);
    u64(f.end_ts);
    u64(f.tid);
    flags(f.opflags);
    u64(f.num_threads_cloned);
    u64(f.num_threads_exited);
  }
  void body(const FileEvent& e) {
    oid(e.proc_oid);
    oid(e.file_oid);
    u64(e.ts);
    u64(e.tid);
    flags(e.opflags);
    oid(e.new_file_oid);
    i64(e.ret);
  }
  void body(const FileFlow& f) {
    oid(f.proc_oid);
    oid(f.file_oid);
    u64(f.start_ts);
    u64(f.end_ts);
    u64(f.tid);
    i64(f.fd);
    flags(f.opflags);
    u64(f.num_reads);
    u64(f.bytes_read);
    u64(f.num_writes);
    u64(f.bytes_written);
  }
  void body(const NetworkEvent& e) {
    oid(e.proc_oid);
    u64(e.ts);
    u64(e.tid);
    flags(e.opflags);
    net(e.net);
  }
  void body(const NetworkFlow& f) {
    oid(f.proc_oid);
    u64(f.start_ts);
    u64(f.end_ts);
    u64(f.tid);
    i64(f.fd);
    net(f.net);
    flags(f.opflags);
    u64(f.num_sends);
    u64(f.bytes_sent);
    u64(f.num_recvs);
    u64(f.bytes_received);
  }

 private:
  std::vector<std::uint8_t>& out_;
};

class Decoder {
 public:
  explicit Decoder(ByteReader& r) : r_(r) {}

  std::uint64_t u64() { return r_.read_unsigned(UINT64_MAX, "integer"); }
  std::uint32_t u32(const char* field) {
    return static_cast<std::uint32_t>(r_.read_unsigned(UINT32_MAX, field));
  }
  std::uint16_t u16(const char* field) {
    return static_cast<std::uint16_t>(r_.read_unsigned(UINT16_MAX, field));
  }
  std::int64_t i64() { return r_.read_varint(); }
  std::int32_t i32(const char* field) {
    const std::uint64_t start = r_.offset();
    const std::int64_t v = r_.read_varint();
    if (v < std::numeric_limits<std::int32_t>::min() ||
        v > std::numeric_limits<std::int32_t>::max()) {
      throw DecodeError(DecodeErrorKind::Malformed, start, std::string(field) + " out of range");
    }
    return static_cast<std::int32_t>(v);
  }
  Oid oid() { return static_cast<Oid>(u64()); }
  std::string str() { return r_.read_string(); }
  template <class E>
  E enumeration(std::uint64_t max, const char* field) {
    return static_cast<E>(r_.read_unsigned(max, field));
  }
  OpFlags flags() { return OpFlags(u32("opflags")); }
  NetTuple net() {
    NetTuple n;
    n.sip = u32("sip");
    n.sport = u16("sport");
    n.dip = u32("dip");
    n.dport = u16("dport");
    n.proto = enumeration<Proto>(1, "proto");
    return n;
  }

  SfRecord record() {
    const std::uint64_t tag_offset = r_.offset();
    const std::uint8_t tag = r_.read_byte();
    SfRecord rec;
    switch (static_cast<RecordKind>(tag)) {
      case RecordKind::Header: {
        Header h;
        h.version = u32("version");
        h.hostname = str();
        h.distribution = str();
        h.kernel_version = str();
        h.exported_at = u64();
        rec.body = std::move(h);
        break;
      }
      case RecordKind::Container: {
        Container c;
        c.oid = oid();
        c.ts = u64();
        c.container_id = str();
        c.name = str();
        c.image = str();
        c.container_type = enumeration<ContainerType>(2, "container_type");
        rec.body = std::move(c);
        break;
      }
      case RecordKind::Process: {
        Process p;
        p.oid = oid();
        p.ts = u64();
        p.parent_oid = oid();
        p.container_oid = oid();
        p.pid = u32("pid");
        p.exe = str();
        p.args = str();
        p.uid = u32("uid");
        p.gid = u32("gid");
        p.created_ts = u64();
        rec.body = std::move(p);
        break;
      }
      case RecordKind::File: {
        File f;
        f.oid = oid();
        f.ts = u64();
        f.path = str();
        f.file_type = enumeration<FileType>(4, "file_type");
        rec.body = std::move(f);
        break;
      }
      case RecordKind::ProcessEvent: {
        ProcessEvent e;
        e.proc_oid = oid();
        e.ts = u64();
        e.tid = u32("tid");
        e.opflags = flags();
        e.ret = i64();
        const std::uint64_t branch_offset = r_.offset();
        const std::uint64_t branch = u64();
        if (branch == 1) {
          e.args_delta = str();
        } else if (branch != 0) {
          throw DecodeError(DecodeErrorKind::Malformed, branch_offset, "bad optional marker");
        }
        rec.body = std::move(e);
        break;
      }
      case RecordKind::ProcessFlow: {
        ProcessFlow f;
        f.proc_oid = oid();
        f.start_ts = u64();
        f.end_ts = u64();
        f.tid = u32("tid");
        f.opflags = flags();
        f.num_threads_cloned = u64();
        f.num_threads_exited = u64();
        rec.body = f;
        break;
      }
      case RecordKind::FileEvent: {
        FileEvent e;
        e.proc_oid = oid();
        e.file_oid = oid();
        e.ts = u64();
        e.tid = u32("tid");
        e.opflags = flags();
        e.new_file_oid = oid();
        e.ret = i64();
        rec.body = e;
        break;
      }
      case RecordKind::FileFlow: {
        FileFlow f;
        f.proc_oid = oid();
        f.file_oid = oid();
        f.start_ts = u64();
        f.end_ts = u64();
        f.tid = u32("tid");
        f.fd = i32("fd");
        f.opflags = flags();
        f.num_reads = u64();
        f.bytes_read = u64();
        f.num_writes = u64();
        f.bytes_written = u64();
        rec.body = f;
        break;
      }
      case RecordKind::NetworkEvent: {
        NetworkEvent e;
        e.proc_oid = oid();
        e.ts = u64();
        e.tid = u32("tid");
        e.opflags = flags();
        e.net = net();
        rec.body = e;
        break;
      }
      case RecordKind::NetworkFlow: {
        NetworkFlow f;
        f.proc_oid = oid();
        f.start_ts = u64();
        f.end_ts = u64();
        f.tid = u32("tid");
        f.fd = i32("fd");
        f.net = net();
        f.opflags = flags();
        f.num_sends = u64();
        f.bytes_sent = u64();
        f.num_recvs = u64();
        f.bytes_received = u64();
        rec.body = f;
        break;
      }
      default:
        throw DecodeError(DecodeErrorKind::UnknownTag, tag_offset,
                          "tag " + std::to_string(tag));
    }

    const std::uint64_t count_offset = r_.offset();
    const std::int64_t n_tags = i64();
    if (n_tags < 0) {
      throw DecodeError(DecodeErrorKind::Malformed, count_offset, "negative tag count");
    }
    for (std::int64_t i = 0; i < n_tags; ++i) rec.tags.push_back(str());
    return rec;
  }

 private:
  ByteReader& r_;
};

}  // namespace

void encode_record(const SfRecord& rec, std::vector<std::uint8_t>& out) {
  validate(rec);
  out.push_back(static_cast<std::uint8_t>(rec.kind()));
  Encoder enc(out);
  std::visit([&enc](const auto& body) { enc.body(body); }, rec.body);
  enc.u64(rec.tags.size());
  for (const auto& tag : rec.tags) enc.str(tag);
}

std::vector<std::uint8_t> encode_record(const SfRecord& rec) {
  std::vector<std::uint8_t> out;
  encode_record(rec, out);
  return out;
}

SfRecord decode_record(ByteReader& reader) { return Decoder(reader).record(); }

}  // namespace sysflow::codec
