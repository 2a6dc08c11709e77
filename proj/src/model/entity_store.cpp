#include "sysflow/entity_store.hpp"

#include <string>

#include "sysflow/error.hpp"

namespace sysflow {

void EntityStore::put(const SfRecord& rec) {
  if (const auto* c = rec.get_if<Container>()) {
    put(*c);
  } else if (const auto* p = rec.get_if<Process>()) {
    put(*p);
  } else if (const auto* f = rec.get_if<File>()) {
    put(*f);
  }
}

const Container* EntityStore::container(Oid oid) const {
  auto it = containers_.find(oid);
  return it == containers_.end() ? nullptr : &it->second;
}

const Process* EntityStore::process(Oid oid) const {
  auto it = processes_.find(oid);
  return it == processes_.end() ? nullptr : &it->second;
}

const File* EntityStore::file(Oid oid) const {
  auto it = files_.find(oid);
  return it == files_.end() ? nullptr : &it->second;
}

bool EntityStore::contains(Oid oid) const {
  return containers_.contains(oid) || processes_.contains(oid) || files_.contains(oid);
}

void EntityStore::clear() {
  containers_.clear();
  processes_.clear();
  files_.clear();
}

void OrderingChecker::check(const SfRecord& rec, std::size_t index) {
  for (Oid ref : references_of(rec)) {
    if (!seen_.contains(ref)) {
      throw OrderingError("record " + std::to_string(index) + " (" +
                              std::string(kind_name(rec.kind())) + ") references Oid " +
                              std::to_string(to_u64(ref)) + " before it was emitted",
                          to_u64(ref), index);
    }
  }
  if (const auto* c = rec.get_if<Container>()) seen_.insert(c->oid);
  if (const auto* p = rec.get_if<Process>()) seen_.insert(p->oid);
  if (const auto* f = rec.get_if<File>()) seen_.insert(f->oid);
}

}  // namespace sysflow
