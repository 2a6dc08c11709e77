#pragma once

// Block container for record streams:
//
//   "SF1\n" | version | header record | block* | end block
//   block     = record_count | uncompressed_len | compressed_len | payload | FF FF FF FF
//   end block = 00 00 00 FF FF FF FF
//
// compressed_len 0 marks a stored (uncompressed) payload of uncompressed_len
// bytes. The end block makes a cut exactly on a block boundary detectable.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "sysflow/codec/varint.hpp"
#include "sysflow/entity_store.hpp"
#include "sysflow/model.hpp"
#include "sysflow/record_sink.hpp"

namespace sysflow::codec {

inline constexpr std::uint8_t kMagic[4] = {0x53, 0x46, 0x31, 0x0A};
inline constexpr std::uint32_t kFormatVersion = 1;
inline constexpr std::size_t kDefaultBlockTarget = 80 * 1024;

enum class Compression { none, deflate };

struct WriteOptions {
  std::size_t block_target_bytes = kDefaultBlockTarget;
  Compression compression = Compression::deflate;
};

struct WriteStats {
  std::uint64_t records = 0;  // header not counted
  std::uint64_t blocks = 0;   // end block not counted
  std::uint64_t bytes = 0;
};

class ByteSink {
 public:
  virtual ~ByteSink() = default;
  virtual void write(std::span<const std::uint8_t> bytes) = 0;
};

class OstreamByteSink : public ByteSink {
 public:
  explicit OstreamByteSink(std::ostream& out) : out_(out) {}
  /// Throws IoError when the stream goes bad.
  void write(std::span<const std::uint8_t> bytes) override;

 private:
  std::ostream& out_;
};

class VectorByteSink : public ByteSink {
 public:
  void write(std::span<const std::uint8_t> bytes) override {
    data.insert(data.end(), bytes.begin(), bytes.end());
  }

  std::vector<std::uint8_t> data;
};

/// Writes the preamble on construction. Records are checked for the entity
/// ordering invariant (OrderingError carries the record index) and validated
/// before being buffered. finish() flushes and writes the end block; the
/// destructor does not, so an abandoned stream stays detectably incomplete.
class StreamWriter : public RecordSink {
 public:
  StreamWriter(ByteSink& sink, const Header& header, WriteOptions opts = {});

  void put(const SfRecord& rec) override;
  void finish() override;

  const WriteStats& stats() const { return stats_; }

 private:
  void flush_block();
  void emit(std::span<const std::uint8_t> bytes);

  ByteSink& sink_;
  WriteOptions opts_;
  OrderingChecker ordering_;
  std::vector<std::uint8_t> pending_;
  std::uint64_t pending_count_ = 0;
  WriteStats stats_;
  bool finished_ = false;
};

WriteStats write_stream(const Header& header, std::span<const SfRecord> records,
                        ByteSink& sink, WriteOptions opts = {});
std::vector<std::uint8_t> encode_stream(const Header& header,
                                        std::span<const SfRecord> records,
                                        WriteOptions opts = {});

/// Raw deflate (no zlib or gzip wrapper).
std::vector<std::uint8_t> deflate_raw(std::span<const std::uint8_t> data);
/// Throws DecodeError(Deflate) at `offset` unless the stream inflates to
/// exactly `expected_len` bytes.
std::vector<std::uint8_t> inflate_raw(std::span<const std::uint8_t> data,
                                      std::size_t expected_len, std::uint64_t offset);

struct ReadOptions {
  /// Skip the remainder of a block after an unknown record tag instead of
  /// failing.
  bool lenient = false;
};

/// Pull reader. Decodes one block at a time and keeps the latest version of
/// every entity seen so far, so events can be flattened as they arrive.
class StreamReader {
 public:
  /// Reads and checks the preamble; throws DecodeError.
  explicit StreamReader(std::istream& in, ReadOptions opts = {});

  const Header& header() const { return header_; }

  /// Next record, or nullopt after the end block.
  std::optional<SfRecord> next();

  /// Entities up to and including the record last returned by next().
  const EntityStore& entities() const { return entities_; }

  std::uint64_t blocks_read() const { return blocks_read_; }
  std::uint64_t blocks_skipped() const { return blocks_skipped_; }

 private:
  bool fill();
  void require(std::size_t n);
  template <class F>
  auto parse(F&& f);
  void read_block();

  std::istream& in_;
  ReadOptions opts_;
  std::vector<std::uint8_t> buf_;
  std::size_t pos_ = 0;
  std::uint64_t base_ = 0;  // absolute offset of buf_[0]
  bool eof_ = false;
  bool done_ = false;
  Header header_;
  std::deque<SfRecord> queue_;
  EntityStore entities_;
  std::uint64_t blocks_read_ = 0;
  std::uint64_t blocks_skipped_ = 0;
};

struct DecodedStream {
  Header header;
  std::vector<SfRecord> records;
};

DecodedStream read_stream(std::istream& in, ReadOptions opts = {});
DecodedStream decode_stream(std::span<const std::uint8_t> bytes, ReadOptions opts = {});

}  // namespace sysflow::codec
