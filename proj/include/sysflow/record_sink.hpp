#pragma once

#include <vector>

#include "sysflow/model.hpp"

namespace sysflow {

/// Consumer of a record stream (header excluded). Producers call put() once
/// per record in stream order and finish() once at the end.
class RecordSink {
 public:
  virtual ~RecordSink() = default;
  virtual void put(const SfRecord& rec) = 0;
  virtual void finish() {}
};

/// Collects records in memory.
class VectorSink : public RecordSink {
 public:
  void put(const SfRecord& rec) override { records.push_back(rec); }

  std::vector<SfRecord> records;
};

}  // namespace sysflow
