#pragma once

// One JSON object per line: {"type":"FileFlow", <snake_case fields>, "tags":[]}.
// IPv4 addresses are dotted quads, enums are strings, op flags stay a raw
// integer bitmap. The first line of a stream is the Header.

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sysflow/entity_store.hpp"
#include "sysflow/error.hpp"
#include "sysflow/model.hpp"
#include "sysflow/record_sink.hpp"

namespace sysflow::codec {

/// Malformed JSON-lines input. line() is 1-based.
class JsonLineError : public Error {
 public:
  JsonLineError(std::size_t line, const std::string& detail);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

nlohmann::ordered_json to_json(const SfRecord& rec);
/// Throws ValidationError on a bad shape or an invalid record.
SfRecord from_json(const nlohmann::json& j);

std::string to_json_line(const SfRecord& rec);
/// Throws JsonLineError carrying `line_no`.
SfRecord from_json_line(std::string_view text, std::size_t line_no = 1);

/// Writes the header line on construction; checks the ordering invariant.
class JsonLinesWriter : public RecordSink {
 public:
  JsonLinesWriter(std::ostream& out, const Header& header);

  void put(const SfRecord& rec) override;
  void finish() override;

  std::size_t records() const { return count_; }

 private:
  std::ostream& out_;
  OrderingChecker ordering_;
  std::size_t count_ = 0;
};

class JsonLinesReader {
 public:
  /// Reads the header line; throws JsonLineError.
  explicit JsonLinesReader(std::istream& in);

  const Header& header() const { return header_; }
  /// Skips blank lines.
  std::optional<SfRecord> next();
  const EntityStore& entities() const { return entities_; }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
  Header header_;
  EntityStore entities_;
};

std::string to_json_lines(const Header& header, std::span<const SfRecord> records);

struct JsonStream {
  Header header;
  std::vector<SfRecord> records;
};

JsonStream from_json_lines(std::string_view text);

}  // namespace sysflow::codec
