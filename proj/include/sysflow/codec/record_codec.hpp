#pragma once

#include <cstdint>
#include <vector>

#include "sysflow/codec/varint.hpp"
#include "sysflow/model.hpp"

namespace sysflow::codec {

/// Binary form of one record: a one-byte type tag (the RecordKind value),
/// the fields in declaration order, then the tags list. Integers, enums and
/// lengths are zigzag varints. Validates first and throws ValidationError
/// without touching `out`.
void encode_record(const SfRecord& rec, std::vector<std::uint8_t>& out);
std::vector<std::uint8_t> encode_record(const SfRecord& rec);

/// Throws DecodeError (UnknownTag for a bad type byte, Truncated or Malformed
/// for bad fields).
SfRecord decode_record(ByteReader& reader);

}  // namespace sysflow::codec
