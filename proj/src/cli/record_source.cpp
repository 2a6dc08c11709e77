#include <istream>

#include "sysflow/cli/commands.hpp"
#include "sysflow/codec/json_lines.hpp"

namespace sysflow::cli {

namespace {

class BinarySource : public RecordSource {
 public:
  BinarySource(std::istream& in, bool lenient) : reader_(in, codec::ReadOptions{lenient}) {}

  const Header& header() const override { return reader_.header(); }
  std::optional<SfRecord> next() override { return reader_.next(); }
  const EntityStore& entities() const override { return reader_.entities(); }
  bool binary() const override { return true; }

 private:
  codec::StreamReader reader_;
};

class JsonSource : public RecordSource {
 public:
  explicit JsonSource(std::istream& in) : reader_(in) {}

  const Header& header() const override { return reader_.header(); }
  std::optional<SfRecord> next() override { return reader_.next(); }
  const EntityStore& entities() const override { return reader_.entities(); }
  bool binary() const override { return false; }

 private:
  codec::JsonLinesReader reader_;
};

}  // namespace

std::unique_ptr<RecordSource> RecordSource::open(std::istream& in, bool lenient) {
  const auto magic = std::char_traits<char>::to_int_type(static_cast<char>(codec::kMagic[0]));
  if (in.peek() == magic) return std::make_unique<BinarySource>(in, lenient);
  return std::make_unique<JsonSource>(in);
}

}  // namespace sysflow::cli
