#include "canonical.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "sysflow/codec/json_lines.hpp"

namespace sysflow::testing {

namespace {

std::string entity_name(const SfRecord& rec) {
  if (const auto* c = rec.get_if<Container>()) return "C/" + c->container_id;
  if (const auto* p = rec.get_if<Process>()) {
    return "P/" + std::to_string(p->pid) + "/" + std::to_string(p->created_ts);
  }
  const auto& f = std::get<File>(rec.body);
  return "F/" + f.path + "/" + std::to_string(f.ts) + "/" + std::string(to_string(f.file_type));
}

Oid own_oid(const SfRecord& rec) {
  return std::visit(
      [](const auto& r) -> Oid {
        if constexpr (requires { r.oid; }) {
          return r.oid;
        } else {
          return Oid::none;
        }
      },
      rec.body);
}

}  // namespace

std::vector<std::string> canonical(std::span<const SfRecord> records) {
  std::map<Oid, std::string> names;
  std::map<std::string, int> minted;
  std::vector<std::string> out;
  out.reserve(records.size());

  for (const auto& rec : records) {
    if (is_entity(rec.kind()) && rec.kind() != RecordKind::Header) {
      const Oid oid = own_oid(rec);
      if (!names.contains(oid)) {
        std::string name = entity_name(rec);
        if (const int n = minted[name]++; n > 0) name += "#" + std::to_string(n);
        names.emplace(oid, std::move(name));
      }
    }
    auto j = codec::to_json(rec);
    for (const char* field :
         {"oid", "proc_oid", "file_oid", "new_file_oid", "parent_oid", "container_oid"}) {
      if (!j.contains(field)) continue;
      const auto oid = static_cast<Oid>(j[field].get<std::uint64_t>());
      if (oid == Oid::none) {
        j[field] = "none";
        continue;
      }
      const auto it = names.find(oid);
      if (it == names.end()) {
        throw std::runtime_error(std::string("reference to unseen oid in ") + field + ": " +
                                 j.dump());
      }
      j[field] = it->second;
    }
    out.push_back(j.dump());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string first_difference(const std::vector<std::string>& a,
                             const std::vector<std::string>& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] != b[i]) return "line " + std::to_string(i) + ":\n  " + a[i] + "\n  " + b[i];
  }
  if (a.size() != b.size()) {
    return "sizes " + std::to_string(a.size()) + " vs " + std::to_string(b.size());
  }
  return "";
}

}  // namespace sysflow::testing
