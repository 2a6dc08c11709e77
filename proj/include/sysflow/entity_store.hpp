#pragma once

#include <cstddef>
#include <unordered_map>
#include <unordered_set>

#include "sysflow/model.hpp"

namespace sysflow {

/// Latest version of every entity seen so far in a stream, keyed by Oid.
/// Re-exporting an entity with an existing Oid replaces the previous version,
/// so events and flows resolve against the closest preceding export.
class EntityStore {
 public:
  /// Indexes `rec` if it is a Container, Process or File; ignores anything else.
  void put(const SfRecord& rec);
  void put(const Container& c) { containers_[c.oid] = c; }
  void put(const Process& p) { processes_[p.oid] = p; }
  void put(const File& f) { files_[f.oid] = f; }

  const Container* container(Oid oid) const;
  const Process* process(Oid oid) const;
  const File* file(Oid oid) const;

  bool contains(Oid oid) const;
  std::size_t size() const {
    return containers_.size() + processes_.size() + files_.size();
  }
  void clear();

 private:
  std::unordered_map<Oid, Container> containers_;
  std::unordered_map<Oid, Process> processes_;
  std::unordered_map<Oid, File> files_;
};

/// Single-pass check that every entity appears before the first record that
/// references it.
class OrderingChecker {
 public:
  /// Throws OrderingError naming the dangling Oid and `index`.
  void check(const SfRecord& rec, std::size_t index);
  void reset() { seen_.clear(); }

 private:
  std::unordered_set<Oid> seen_;
};

}  // namespace sysflow
