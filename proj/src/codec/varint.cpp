#include "sysflow/codec/varint.hpp"

#include <string>

namespace sysflow::codec {

std::string_view to_string(DecodeErrorKind kind) {
  switch (kind) {
    case DecodeErrorKind::BadMagic: return "bad magic";
    case DecodeErrorKind::UnsupportedVersion: return "unsupported version";
    case DecodeErrorKind::Truncated: return "truncated";
    case DecodeErrorKind::Deflate: return "deflate";
    case DecodeErrorKind::UnknownTag: return "unknown record tag";
    case DecodeErrorKind::Malformed: return "malformed";
  }
  return "malformed";
}

DecodeError::DecodeError(DecodeErrorKind kind, std::uint64_t offset, const std::string& detail)
    : Error(std::string(to_string(kind)) + " at byte offset " + std::to_string(offset) +
            (detail.empty() ? "" : ": " + detail)),
      kind_(kind),
      offset_(offset) {}

void append_varint(std::vector<std::uint8_t>& out, std::int64_t n) {
  std::uint64_t z = zigzag_encode(n);
  while (z >= 0x80) {
    out.push_back(static_cast<std::uint8_t>(z | 0x80));
    z >>= 7;
  }
  out.push_back(static_cast<std::uint8_t>(z));
}

std::vector<std::uint8_t> encode_varint_zigzag(std::int64_t n) {
  std::vector<std::uint8_t> out;
  append_varint(out, n);
  return out;
}

void append_string(std::vector<std::uint8_t>& out, std::string_view s) {
  append_varint(out, static_cast<std::int64_t>(s.size()));
  out.insert(out.end(), s.begin(), s.end());
}

std::uint8_t ByteReader::read_byte() {
  if (pos_ >= data_.size()) {
    throw DecodeError(DecodeErrorKind::Truncated, offset(), "unexpected end of data");
  }
  return data_[pos_++];
}

std::int64_t ByteReader::read_varint() {
  const std::uint64_t start = offset();
  std::uint64_t z = 0;
  for (int shift = 0; shift < 70; shift += 7) {
    const std::uint8_t b = read_byte();
    if (shift == 63 && (b & 0x7E) != 0) {
      throw DecodeError(DecodeErrorKind::Malformed, start, "varint overflows 64 bits");
    }
    z |= static_cast<std::uint64_t>(b & 0x7F) << shift;
    if ((b & 0x80) == 0) return zigzag_decode(z);
  }
  throw DecodeError(DecodeErrorKind::Malformed, start, "varint longer than 10 bytes");
}

std::uint64_t ByteReader::read_unsigned(std::uint64_t max, const char* field) {
  const std::uint64_t start = offset();
  const std::int64_t v = read_varint();
  const auto u = static_cast<std::uint64_t>(v);
  if (max != UINT64_MAX && (v < 0 || u > max)) {
    throw DecodeError(DecodeErrorKind::Malformed, start,
                      std::string(field) + " out of range: " + std::to_string(v));
  }
  return u;
}

std::string ByteReader::read_string() {
  const std::uint64_t start = offset();
  const std::int64_t len = read_varint();
  if (len < 0) {
    throw DecodeError(DecodeErrorKind::Malformed, start, "negative string length");
  }
  if (static_cast<std::uint64_t>(len) > data_.size() - pos_) {
    throw DecodeError(DecodeErrorKind::Truncated, start, "string runs past end of data");
  }
  std::string s(reinterpret_cast<const char*>(data_.data() + pos_),
                static_cast<std::size_t>(len));
  pos_ += static_cast<std::size_t>(len);
  return s;
}

std::int64_t decode_varint_zigzag(std::span<const std::uint8_t> bytes) {
  ByteReader reader(bytes);
  const std::int64_t v = reader.read_varint();
  if (!reader.at_end()) {
    throw DecodeError(DecodeErrorKind::Malformed, reader.offset(), "trailing bytes after varint");
  }
  return v;
}

}  // namespace sysflow::codec
