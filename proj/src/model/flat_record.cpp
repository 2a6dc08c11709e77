#include "sysflow/flat_record.hpp"

#include <array>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "sysflow/error.hpp"

namespace sysflow {

namespace {

constexpr std::array kAttributes = {
    AttrInfo{Attr::Type, "sf.type", AttrType::String, false},
    AttrInfo{Attr::OpFlags, "sf.opflags", AttrType::String, false},
    AttrInfo{Attr::Ts, "sf.ts", AttrType::Int, false},
    AttrInfo{Attr::EndTs, "sf.endts", AttrType::Int, false},
    AttrInfo{Attr::Ret, "sf.ret", AttrType::Int, false},
    AttrInfo{Attr::Fd, "sf.fd", AttrType::Int, false},
    AttrInfo{Attr::ProcOid, "sf.proc.oid", AttrType::Int, false},
    AttrInfo{Attr::ProcPid, "sf.proc.pid", AttrType::Int, false},
    AttrInfo{Attr::ProcTid, "sf.proc.tid", AttrType::Int, false},
    AttrInfo{Attr::ProcExe, "sf.proc.exe", AttrType::String, true},
    AttrInfo{Attr::ProcArgs, "sf.proc.args", AttrType::String, false},
    AttrInfo{Attr::ProcUid, "sf.proc.uid", AttrType::Int, false},
    AttrInfo{Attr::ProcGid, "sf.proc.gid", AttrType::Int, false},
    AttrInfo{Attr::ProcAchain, "sf.proc.achain", AttrType::StringList, true},
    AttrInfo{Attr::PprocExe, "sf.pproc.exe", AttrType::String, true},
    AttrInfo{Attr::PprocPid, "sf.pproc.pid", AttrType::Int, false},
    AttrInfo{Attr::FilePath, "sf.file.path", AttrType::String, false},
    AttrInfo{Attr::FileType, "sf.file.type", AttrType::String, false},
    AttrInfo{Attr::FileNewPath, "sf.file.newpath", AttrType::String, false},
    AttrInfo{Attr::NetSip, "sf.net.sip", AttrType::String, false},
    AttrInfo{Attr::NetSport, "sf.net.sport", AttrType::Int, false},
    AttrInfo{Attr::NetDip, "sf.net.dip", AttrType::String, false},
    AttrInfo{Attr::NetDport, "sf.net.dport", AttrType::Int, false},
    AttrInfo{Attr::NetProto, "sf.net.proto", AttrType::String, false},
    AttrInfo{Attr::FlowRops, "sf.flow.rops", AttrType::Int, false},
    AttrInfo{Attr::FlowRbytes, "sf.flow.rbytes", AttrType::Int, false},
    AttrInfo{Attr::FlowWops, "sf.flow.wops", AttrType::Int, false},
    AttrInfo{Attr::FlowWbytes, "sf.flow.wbytes", AttrType::Int, false},
    AttrInfo{Attr::FlowThreadsCloned, "sf.flow.tcloned", AttrType::Int, false},
    AttrInfo{Attr::FlowThreadsExited, "sf.flow.texited", AttrType::Int, false},
    AttrInfo{Attr::ContainerId, "sf.container.id", AttrType::String, false},
    AttrInfo{Attr::ContainerName, "sf.container.name", AttrType::String, false},
    AttrInfo{Attr::ContainerImage, "sf.container.image", AttrType::String, false},
};

AttrValue num(std::uint64_t v) { return static_cast<std::int64_t>(v); }

[[noreturn]] void dangling(const SfRecord& rec, Oid oid, const char* role) {
  throw OrderingError(std::string(kind_name(rec.kind())) + " references " + role + " Oid " +
                          std::to_string(to_u64(oid)) + " that was not emitted before it",
                      to_u64(oid), OrderingError::kNoIndex);
}

const NetTuple* net_of(const SfRecord& rec) {
  if (const auto* e = rec.get_if<NetworkEvent>()) return &e->net;
  if (const auto* f = rec.get_if<NetworkFlow>()) return &f->net;
  return nullptr;
}

}  // namespace

std::span<const AttrInfo> all_attributes() { return kAttributes; }

const AttrInfo& attribute_info(Attr attr) {
  for (const auto& info : kAttributes) {
    if (info.attr == attr) return info;
  }
  throw std::logic_error("unregistered attribute");
}

const AttrInfo* find_attribute(std::string_view name) {
  for (const auto& info : kAttributes) {
    if (info.name == name) return &info;
  }
  return nullptr;
}

FlatRecord flatten(const SfRecord& rec, const EntityStore& store) {
  if (is_entity(rec.kind())) {
    throw ValidationError("cannot flatten entity record " + std::string(kind_name(rec.kind())));
  }
  FlatRecord flat;
  flat.record_ = &rec;
  flat.store_ = &store;

  const Oid proc_oid = proc_oid_of(rec);
  flat.proc_ = store.process(proc_oid);
  if (flat.proc_ == nullptr) dangling(rec, proc_oid, "process");

  // Validate the whole ancestry so that achain never fails later.
  std::unordered_set<Oid> visited{proc_oid};
  for (const Process* p = flat.proc_; p->parent_oid != Oid::none;) {
    const Process* parent = store.process(p->parent_oid);
    if (parent == nullptr) dangling(rec, p->parent_oid, "parent process");
    if (!visited.insert(parent->oid).second) break;
    if (p == flat.proc_) flat.parent_ = parent;
    p = parent;
  }

  if (flat.proc_->container_oid != Oid::none) {
    flat.container_ = store.container(flat.proc_->container_oid);
    if (flat.container_ == nullptr) dangling(rec, flat.proc_->container_oid, "container");
  }

  Oid file_oid = Oid::none;
  Oid new_file_oid = Oid::none;
  if (const auto* e = rec.get_if<FileEvent>()) {
    file_oid = e->file_oid;
    new_file_oid = e->new_file_oid;
  } else if (const auto* f = rec.get_if<FileFlow>()) {
    file_oid = f->file_oid;
  }
  if (file_oid != Oid::none) {
    flat.file_ = store.file(file_oid);
    if (flat.file_ == nullptr) dangling(rec, file_oid, "file");
  }
  if (new_file_oid != Oid::none) {
    flat.new_file_ = store.file(new_file_oid);
    if (flat.new_file_ == nullptr) dangling(rec, new_file_oid, "file");
  }
  return flat;
}

const std::vector<std::string>& FlatRecord::chain() const {
  if (!chain_) {
    std::vector<std::string> out;
    std::unordered_set<Oid> visited{proc_->oid};
    for (const Process* p = parent_; p != nullptr && visited.insert(p->oid).second;
         p = p->parent_oid == Oid::none ? nullptr : store_->process(p->parent_oid)) {
      out.push_back(command_line(*p));
    }
    chain_ = std::move(out);
  }
  return *chain_;
}

AttrValue FlatRecord::achain(std::optional<std::uint32_t> k) const {
  if (k && *k == 0) throw std::invalid_argument("achain index must be positive");
  const auto& ancestors = chain();
  if (!k) {
    if (ancestors.empty()) return {};
    return ancestors;
  }
  if (*k > ancestors.size()) return {};
  return ancestors[*k - 1];
}

AttrValue FlatRecord::get(Attr attr) const {
  const SfRecord& rec = *record_;
  const RecordKind kind = rec.kind();
  switch (attr) {
    case Attr::Type:
      return std::string(kind_abbrev(kind));
    case Attr::OpFlags:
      return opflags_names(opflags_of(rec));
    case Attr::Ts:
      return num(start_ts_of(rec));
    case Attr::EndTs:
      if (!is_flow(kind)) return {};
      return num(end_ts_of(rec));
    case Attr::Ret:
      if (const auto* e = rec.get_if<ProcessEvent>()) return e->ret;
      if (const auto* e = rec.get_if<FileEvent>()) return e->ret;
      return {};
    case Attr::Fd:
      if (const auto* f = rec.get_if<FileFlow>()) return std::int64_t{f->fd};
      if (const auto* f = rec.get_if<NetworkFlow>()) return std::int64_t{f->fd};
      return {};
    case Attr::ProcOid:
      return num(to_u64(proc_->oid));
    case Attr::ProcPid:
      return num(proc_->pid);
    case Attr::ProcTid:
      return num(tid_of(rec));
    case Attr::ProcExe:
      return proc_->exe;
    case Attr::ProcArgs:
      return proc_->args;
    case Attr::ProcUid:
      return num(proc_->uid);
    case Attr::ProcGid:
      return num(proc_->gid);
    case Attr::ProcAchain:
      return achain(std::nullopt);
    case Attr::PprocExe:
      if (parent_ == nullptr) return {};
      return parent_->exe;
    case Attr::PprocPid:
      if (parent_ == nullptr) return {};
      return num(parent_->pid);
    case Attr::FilePath:
      if (file_ == nullptr) return {};
      return file_->path;
    case Attr::FileType:
      if (file_ == nullptr) return {};
      return std::string(to_string(file_->file_type));
    case Attr::FileNewPath:
      if (new_file_ == nullptr) return {};
      return new_file_->path;
    case Attr::NetSip:
      if (const auto* n = net_of(rec)) return ipv4_to_string(n->sip);
      return {};
    case Attr::NetSport:
      if (const auto* n = net_of(rec)) return num(n->sport);
      return {};
    case Attr::NetDip:
      if (const auto* n = net_of(rec)) return ipv4_to_string(n->dip);
      return {};
    case Attr::NetDport:
      if (const auto* n = net_of(rec)) return num(n->dport);
      return {};
    case Attr::NetProto:
      if (const auto* n = net_of(rec)) return std::string(to_string(n->proto));
      return {};
    case Attr::FlowRops:
      if (const auto* f = rec.get_if<FileFlow>()) return num(f->num_reads);
      if (const auto* f = rec.get_if<NetworkFlow>()) return num(f->num_recvs);
      return {};
    case Attr::FlowRbytes:
      if (const auto* f = rec.get_if<FileFlow>()) return num(f->bytes_read);
      if (const auto* f = rec.get_if<NetworkFlow>()) return num(f->bytes_received);
      return {};
    case Attr::FlowWops:
      if (const auto* f = rec.get_if<FileFlow>()) return num(f->num_writes);
      if (const auto* f = rec.get_if<NetworkFlow>()) return num(f->num_sends);
      return {};
    case Attr::FlowWbytes:
      if (const auto* f = rec.get_if<FileFlow>()) return num(f->bytes_written);
      if (const auto* f = rec.get_if<NetworkFlow>()) return num(f->bytes_sent);
      return {};
    case Attr::FlowThreadsCloned:
      if (const auto* f = rec.get_if<ProcessFlow>()) return num(f->num_threads_cloned);
      return {};
    case Attr::FlowThreadsExited:
      if (const auto* f = rec.get_if<ProcessFlow>()) return num(f->num_threads_exited);
      return {};
    case Attr::ContainerId:
      if (container_ == nullptr) return {};
      return container_->container_id;
    case Attr::ContainerName:
      if (container_ == nullptr) return {};
      return container_->name;
    case Attr::ContainerImage:
      if (container_ == nullptr) return {};
      return container_->image;
  }
  return {};
}

}  // namespace sysflow
