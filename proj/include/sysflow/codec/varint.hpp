#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sysflow/error.hpp"

namespace sysflow::codec {

enum class DecodeErrorKind {
  BadMagic,
  UnsupportedVersion,
  Truncated,
  Deflate,
  UnknownTag,
  Malformed,
};

std::string_view to_string(DecodeErrorKind kind);

/// Failure to decode a binary stream. `offset` is the absolute byte position
/// in the source where decoding stopped.
class DecodeError : public Error {
 public:
  DecodeError(DecodeErrorKind kind, std::uint64_t offset, const std::string& detail);

  DecodeErrorKind kind() const { return kind_; }
  std::uint64_t offset() const { return offset_; }

 private:
  DecodeErrorKind kind_;
  std::uint64_t offset_;
};

constexpr std::uint64_t zigzag_encode(std::int64_t n) {
  return (static_cast<std::uint64_t>(n) << 1) ^ static_cast<std::uint64_t>(n >> 63);
}

constexpr std::int64_t zigzag_decode(std::uint64_t z) {
  return static_cast<std::int64_t>(z >> 1) ^ -static_cast<std::int64_t>(z & 1);
}

/// Zigzag, then little-endian base-128 groups with the continuation bit set on
/// every byte but the last.
void append_varint(std::vector<std::uint8_t>& out, std::int64_t n);
std::vector<std::uint8_t> encode_varint_zigzag(std::int64_t n);

/// Varint length followed by the raw bytes.
void append_string(std::vector<std::uint8_t>& out, std::string_view s);

/// Cursor over an in-memory buffer. Errors report `base_offset + position`.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data, std::uint64_t base_offset = 0)
      : data_(data), base_(base_offset) {}

  std::int64_t read_varint();
  std::uint64_t read_unsigned(std::uint64_t max, const char* field);
  std::string read_string();
  std::uint8_t read_byte();

  bool at_end() const { return pos_ == data_.size(); }
  std::size_t position() const { return pos_; }
  std::uint64_t offset() const { return base_ + pos_; }

 private:
  std::span<const std::uint8_t> data_;
  std::uint64_t base_;
  std::size_t pos_ = 0;
};

/// Inverse of encode_varint_zigzag over a complete buffer; throws DecodeError
/// on truncated, over-long, or trailing input.
std::int64_t decode_varint_zigzag(std::span<const std::uint8_t> bytes);

}  // namespace sysflow::codec
