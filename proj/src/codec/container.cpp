#include "sysflow/codec/container.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cstring>
#include <streambuf>
#include <string>

#include "sysflow/codec/record_codec.hpp"
#include "sysflow/error.hpp"

namespace sysflow::codec {

namespace {

constexpr std::array<std::uint8_t, 4> kSync = {0xFF, 0xFF, 0xFF, 0xFF};
constexpr std::size_t kReadChunk = 64 * 1024;
// Refuse absurd block sizes before allocating for them.
constexpr std::uint64_t kMaxBlockBytes = std::uint64_t{1} << 30;

struct SpanBuf : std::streambuf {
  explicit SpanBuf(std::span<const std::uint8_t> bytes) {
    char* p = const_cast<char*>(reinterpret_cast<const char*>(bytes.data()));
    setg(p, p, p + bytes.size());
  }
};

std::vector<std::uint8_t> preamble(const Header& header) {
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  append_varint(out, kFormatVersion);
  encode_record(SfRecord(header), out);
  return out;
}

}  // namespace

void OstreamByteSink::write(std::span<const std::uint8_t> bytes) {
  out_.write(reinterpret_cast<const char*>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));
  if (!out_) throw IoError("write to output stream failed");
}

std::vector<std::uint8_t> deflate_raw(std::span<const std::uint8_t> data) {
  z_stream zs{};
  if (deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, -15, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
    throw Error("deflateInit2 failed");
  }
  std::vector<std::uint8_t> out(deflateBound(&zs, static_cast<uLong>(data.size())));
  zs.next_in = const_cast<Bytef*>(data.data());
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = deflate(&zs, Z_FINISH);
  out.resize(zs.total_out);
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw Error("deflate failed");
  return out;
}

std::vector<std::uint8_t> inflate_raw(std::span<const std::uint8_t> data,
                                      std::size_t expected_len, std::uint64_t offset) {
  z_stream zs{};
  if (inflateInit2(&zs, -15) != Z_OK) {
    throw DecodeError(DecodeErrorKind::Deflate, offset, "inflateInit2 failed");
  }
  // One spare byte so that an over-long payload is noticed.
  std::vector<std::uint8_t> out(expected_len + 1);
  zs.next_in = const_cast<Bytef*>(data.data());
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  const std::size_t produced = zs.total_out;
  const bool consumed_all = zs.avail_in == 0;
  const std::string msg = zs.msg != nullptr ? zs.msg : "incomplete deflate stream";
  inflateEnd(&zs);
  if (rc != Z_STREAM_END) throw DecodeError(DecodeErrorKind::Deflate, offset, msg);
  if (produced != expected_len || !consumed_all) {
    throw DecodeError(DecodeErrorKind::Deflate, offset,
                      "payload inflates to " + std::to_string(produced) + " bytes, header says " +
                          std::to_string(expected_len));
  }
  out.resize(produced);
  return out;
}

// ---------------------------------------------------------------------------
// Writer

StreamWriter::StreamWriter(ByteSink& sink, const Header& header, WriteOptions opts)
    : sink_(sink), opts_(opts) {
  emit(preamble(header));
}

void StreamWriter::emit(std::span<const std::uint8_t> bytes) {
  sink_.write(bytes);
  stats_.bytes += bytes.size();
}

void StreamWriter::put(const SfRecord& rec) {
  if (finished_) throw Error("put() after finish()");
  if (rec.kind() == RecordKind::Header) {
    throw ValidationError("record " + std::to_string(stats_.records) +
                          ": a stream carries exactly one header");
  }
  ordering_.check(rec, stats_.records);
  encode_record(rec, pending_);
  ++pending_count_;
  ++stats_.records;
  if (pending_.size() >= opts_.block_target_bytes) flush_block();
}

void StreamWriter::flush_block() {
  if (pending_count_ == 0) return;
  std::vector<std::uint8_t> block;
  append_varint(block, static_cast<std::int64_t>(pending_count_));
  append_varint(block, static_cast<std::int64_t>(pending_.size()));
  if (opts_.compression == Compression::deflate) {
    const auto payload = deflate_raw(pending_);
    append_varint(block, static_cast<std::int64_t>(payload.size()));
    block.insert(block.end(), payload.begin(), payload.end());
  } else {
    append_varint(block, 0);
    block.insert(block.end(), pending_.begin(), pending_.end());
  }
  block.insert(block.end(), kSync.begin(), kSync.end());
  emit(block);
  ++stats_.blocks;
  pending_.clear();
  pending_count_ = 0;
}

void StreamWriter::finish() {
  if (finished_) return;
  flush_block();
  const std::array<std::uint8_t, 7> end = {0, 0, 0, 0xFF, 0xFF, 0xFF, 0xFF};
  emit(end);
  finished_ = true;
}

WriteStats write_stream(const Header& header, std::span<const SfRecord> records,
                        ByteSink& sink, WriteOptions opts) {
  StreamWriter writer(sink, header, opts);
  for (const auto& rec : records) writer.put(rec);
  writer.finish();
  return writer.stats();
}

std::vector<std::uint8_t> encode_stream(const Header& header, std::span<const SfRecord> records,
                                        WriteOptions opts) {
  VectorByteSink sink;
  write_stream(header, records, sink, opts);
  return std::move(sink.data);
}

// ---------------------------------------------------------------------------
// Reader

bool StreamReader::fill() {
  if (eof_) return false;
  // Drop consumed bytes before growing.
  if (pos_ > 0) {
    buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(pos_));
    base_ += pos_;
    pos_ = 0;
  }
  const std::size_t old = buf_.size();
  buf_.resize(old + kReadChunk);
  in_.read(reinterpret_cast<char*>(buf_.data() + old), kReadChunk);
  const auto got = static_cast<std::size_t>(in_.gcount());
  buf_.resize(old + got);
  if (in_.bad()) throw IoError("read from input stream failed");
  if (got == 0 || in_.eof()) eof_ = true;
  return got > 0;
}

void StreamReader::require(std::size_t n) {
  while (buf_.size() - pos_ < n) {
    if (!fill()) {
      throw DecodeError(DecodeErrorKind::Truncated, base_ + buf_.size(),
                        "input ends inside a block");
    }
  }
}

// Runs a parser over the buffered bytes, pulling more input whenever it runs
// off the end.
template <class F>
auto StreamReader::parse(F&& f) {
  for (;;) {
    ByteReader reader(std::span<const std::uint8_t>(buf_).subspan(pos_), base_ + pos_);
    try {
      auto value = f(reader);
      pos_ += reader.position();
      return value;
    } catch (const DecodeError& e) {
      if (e.kind() != DecodeErrorKind::Truncated || !fill()) throw;
    }
  }
}

StreamReader::StreamReader(std::istream& in, ReadOptions opts) : in_(in), opts_(opts) {
  while (buf_.size() < 4 && fill()) {
  }
  const std::size_t have = std::min<std::size_t>(buf_.size(), 4);
  const bool prefix_ok = std::equal(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(have),
                                    std::begin(kMagic));
  if (have > 0 && have < 4 && prefix_ok) {
    throw DecodeError(DecodeErrorKind::Truncated, have, "input ends inside the magic");
  }
  if (have < 4 || !prefix_ok) {
    throw DecodeError(DecodeErrorKind::BadMagic, 0, "expected \"SF1\\n\"");
  }
  pos_ = 4;
  const auto version = parse([](ByteReader& r) {
    const std::uint64_t at = r.offset();
    return std::pair(r.read_varint(), at);
  });
  if (version.first != kFormatVersion) {
    throw DecodeError(DecodeErrorKind::UnsupportedVersion, version.second,
                      "version " + std::to_string(version.first));
  }
  const std::uint64_t header_offset = base_ + pos_;
  SfRecord header = parse([](ByteReader& r) { return decode_record(r); });
  const auto* h = header.get_if<Header>();
  if (h == nullptr) {
    throw DecodeError(DecodeErrorKind::Malformed, header_offset,
                      "expected Header record, found " + std::string(kind_name(header.kind())));
  }
  header_ = *h;
}

void StreamReader::read_block() {
  struct BlockHead {
    std::uint64_t count, raw_len, packed_len, offset;
  };
  const BlockHead head = parse([](ByteReader& r) {
    BlockHead b{};
    b.offset = r.offset();
    b.count = r.read_unsigned(UINT64_MAX >> 1, "record_count");
    b.raw_len = r.read_unsigned(UINT64_MAX >> 1, "uncompressed_len");
    b.packed_len = r.read_unsigned(UINT64_MAX >> 1, "compressed_len");
    return b;
  });
  if (head.raw_len > kMaxBlockBytes || head.packed_len > kMaxBlockBytes) {
    throw DecodeError(DecodeErrorKind::Malformed, head.offset, "block length out of range");
  }
  const bool end_block = head.count == 0;
  if (end_block && (head.raw_len != 0 || head.packed_len != 0)) {
    throw DecodeError(DecodeErrorKind::Malformed, head.offset, "empty block with a payload");
  }
  if (!end_block && head.raw_len == 0) {
    throw DecodeError(DecodeErrorKind::Malformed, head.offset, "records without payload");
  }
  const std::size_t stored = head.packed_len == 0 ? head.raw_len : head.packed_len;
  require(stored + kSync.size());
  const std::uint64_t payload_offset = base_ + pos_;
  const auto payload = std::span<const std::uint8_t>(buf_).subspan(pos_, stored);
  if (!std::equal(kSync.begin(), kSync.end(), buf_.begin() + static_cast<std::ptrdiff_t>(pos_ + stored))) {
    throw DecodeError(DecodeErrorKind::Malformed, payload_offset + stored, "missing sync marker");
  }

  if (end_block) {
    pos_ += kSync.size();
    if (pos_ < buf_.size() || fill()) {
      throw DecodeError(DecodeErrorKind::Malformed, base_ + pos_, "data after end block");
    }
    done_ = true;
    return;
  }

  std::vector<std::uint8_t> raw;
  if (head.packed_len == 0) {
    raw.assign(payload.begin(), payload.end());
  } else {
    raw = inflate_raw(payload, head.raw_len, payload_offset);
  }
  pos_ += stored + kSync.size();
  ++blocks_read_;

  // Offsets inside a compressed payload are reported relative to the
  // payload start, which is the best a byte position can do there.
  ByteReader reader(raw, payload_offset);
  std::uint64_t decoded = 0;
  while (!reader.at_end() && decoded < head.count) {
    try {
      queue_.push_back(decode_record(reader));
    } catch (const DecodeError& e) {
      if (e.kind() == DecodeErrorKind::UnknownTag && opts_.lenient) {
        ++blocks_skipped_;
        return;
      }
      throw;
    }
    if (queue_.back().kind() == RecordKind::Header) {
      throw DecodeError(DecodeErrorKind::Malformed, payload_offset, "header record inside a block");
    }
    ++decoded;
  }
  if (decoded != head.count || !reader.at_end()) {
    throw DecodeError(DecodeErrorKind::Malformed, payload_offset,
                      "block declares " + std::to_string(head.count) + " records, payload holds " +
                          (reader.at_end() ? std::to_string(decoded) : "more"));
  }
}

std::optional<SfRecord> StreamReader::next() {
  while (queue_.empty()) {
    if (done_) return std::nullopt;
    read_block();
  }
  SfRecord rec = std::move(queue_.front());
  queue_.pop_front();
  entities_.put(rec);
  return rec;
}

DecodedStream read_stream(std::istream& in, ReadOptions opts) {
  StreamReader reader(in, opts);
  DecodedStream out;
  out.header = reader.header();
  while (auto rec = reader.next()) out.records.push_back(std::move(*rec));
  return out;
}

DecodedStream decode_stream(std::span<const std::uint8_t> bytes, ReadOptions opts) {
  SpanBuf buf(bytes);
  std::istream in(&buf);
  return read_stream(in, opts);
}

}  // namespace sysflow::codec
