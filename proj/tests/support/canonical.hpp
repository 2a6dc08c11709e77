#pragma once

// Order- and oid-independent rendering of a record stream, for comparing two
// producers that number their entities differently.

#include <span>
#include <string>
#include <vector>

#include "sysflow/model.hpp"

namespace sysflow::testing {

/// One JSON string per record, sorted. Every oid (own and referenced) is
/// replaced by a name derived from the first version of the entity:
/// C/<container id>, P/<pid>/<created_ts>, F/<path>/<ts>/<type>, with a
/// #n suffix when the same name is minted twice. Throws std::runtime_error
/// on a reference to an entity that has not been seen yet.
std::vector<std::string> canonical(std::span<const SfRecord> records);

/// First line that differs between two canonical renderings, for messages.
std::string first_difference(const std::vector<std::string>& a, const std::vector<std::string>& b);

}  // namespace sysflow::testing
