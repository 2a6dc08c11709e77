#pragma once

// Joined attribute view over an event or flow, used by the policy engine.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sysflow/entity_store.hpp"
#include "sysflow/model.hpp"

namespace sysflow {

enum class Attr : std::uint8_t {
  Type,
  OpFlags,
  Ts,
  EndTs,
  Ret,
  Fd,
  ProcOid,
  ProcPid,
  ProcTid,
  ProcExe,
  ProcArgs,
  ProcUid,
  ProcGid,
  ProcAchain,
  PprocExe,
  PprocPid,
  FilePath,
  FileType,
  FileNewPath,
  NetSip,
  NetSport,
  NetDip,
  NetDport,
  NetProto,
  FlowRops,
  FlowRbytes,
  FlowWops,
  FlowWbytes,
  FlowThreadsCloned,
  FlowThreadsExited,
  ContainerId,
  ContainerName,
  ContainerImage,
};

enum class AttrType : std::uint8_t { String, Int, StringList };

struct AttrInfo {
  Attr attr;
  std::string_view name;
  AttrType type;
  /// Values name a program: membership tests also accept the basename of the
  /// first word ("/bin/bash -l" is in (bash)).
  bool names_program;
};

std::span<const AttrInfo> all_attributes();
const AttrInfo& attribute_info(Attr attr);
const AttrInfo* find_attribute(std::string_view name);

/// Absent (monostate), integer, string, or string list (achain without k).
using AttrValue =
    std::variant<std::monostate, std::int64_t, std::string, std::vector<std::string>>;

inline bool is_absent(const AttrValue& v) { return std::holds_alternative<std::monostate>(v); }

/// Read-only view joining a record with its process, parent chain, container
/// and file. Holds pointers into the record and the store: both must outlive
/// the view and the store must not change while it is in use.
class FlatRecord {
 public:
  const SfRecord& record() const { return *record_; }
  const Process& process() const { return *proc_; }

  /// Attributes that do not apply to the record type resolve to absent.
  AttrValue get(Attr attr) const;

  /// With k: command line of the k-th ancestor (1 = parent), absent if the
  /// chain is shorter. Without k: every ancestor, nearest first; absent if the
  /// process has no parent. Throws std::invalid_argument for k == 0.
  AttrValue achain(std::optional<std::uint32_t> k) const;

  /// Throws OrderingError if the record references an Oid missing from
  /// `store`, and ValidationError for entity records.
  friend FlatRecord flatten(const SfRecord& rec, const EntityStore& store);

 private:
  FlatRecord() = default;
  const std::vector<std::string>& chain() const;

  const SfRecord* record_ = nullptr;
  const EntityStore* store_ = nullptr;
  const Process* proc_ = nullptr;
  const Process* parent_ = nullptr;
  const Container* container_ = nullptr;
  const File* file_ = nullptr;
  const File* new_file_ = nullptr;
  mutable std::optional<std::vector<std::string>> chain_;
};

FlatRecord flatten(const SfRecord& rec, const EntityStore& store);

}  // namespace sysflow
