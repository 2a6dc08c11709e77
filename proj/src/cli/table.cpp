#include <algorithm>
#include <array>
#include <ctime>
#include <ostream>
#include <string>
#include <vector>

#include "sysflow/cli/commands.hpp"

namespace sysflow::cli {

namespace {

constexpr std::array<const char*, 12> kColumns = {
    "#", "Type", "Process", "PPID", "PID", "Op Flags",
    "Start Time", "End Time", "Resource", "Reads", "Writes", "Cont ID"};

using Row = std::array<std::string, kColumns.size()>;

std::string ops_bytes(std::uint64_t ops, std::uint64_t bytes) {
  if (ops == 0 && bytes == 0) return ":";
  return std::to_string(ops) + ":" + std::to_string(bytes);
}

std::string file_path(const EntityStore& store, Oid oid) {
  const File* f = store.file(oid);
  return f == nullptr ? "?" : f->path;
}

Row make_row(std::size_t n, const SfRecord& rec, const EntityStore& store) {
  Row row;
  row[0] = std::to_string(n);
  row[1] = kind_abbrev(rec.kind());
  if (const Process* p = store.process(proc_oid_of(rec))) {
    row[2] = command_line(*p);
    if (const Process* parent = store.process(p->parent_oid)) row[3] = std::to_string(parent->pid);
    row[4] = std::to_string(p->pid);
    if (const Container* c = store.container(p->container_oid)) row[11] = c->container_id;
  }
  row[5] = opflags_to_string(opflags_of(rec), rec.kind());
  row[6] = format_ts(start_ts_of(rec));
  if (is_flow(rec.kind())) row[7] = format_ts(end_ts_of(rec));
  row[9] = ":";
  row[10] = ":";

  if (const auto* e = rec.get_if<FileEvent>()) {
    row[8] = file_path(store, e->file_oid);
    if (e->new_file_oid != Oid::none) row[8] += " -> " + file_path(store, e->new_file_oid);
  } else if (const auto* f = rec.get_if<FileFlow>()) {
    row[8] = file_path(store, f->file_oid);
    row[9] = ops_bytes(f->num_reads, f->bytes_read);
    row[10] = ops_bytes(f->num_writes, f->bytes_written);
  } else if (const auto* e = rec.get_if<NetworkEvent>()) {
    row[8] = to_string(e->net);
  } else if (const auto* f = rec.get_if<NetworkFlow>()) {
    row[8] = to_string(f->net);
    row[9] = ops_bytes(f->num_recvs, f->bytes_received);
    row[10] = ops_bytes(f->num_sends, f->bytes_sent);
  } else if (const auto* f = rec.get_if<ProcessFlow>()) {
    row[8] = "threads cloned=" + std::to_string(f->num_threads_cloned) +
             " exited=" + std::to_string(f->num_threads_exited);
  }
  return row;
}

}  // namespace

std::string format_ts(Timestamp ts) {
  const auto secs = static_cast<std::time_t>(ts / 1'000'000'000ULL);
  const auto millis = static_cast<unsigned>((ts / 1'000'000ULL) % 1000);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03u", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, millis);
  return buf;
}

std::size_t print_table(RecordSource& source, std::ostream& out) {
  std::vector<Row> rows;
  while (auto rec = source.next()) {
    if (is_entity(rec->kind())) continue;
    rows.push_back(make_row(rows.size() + 1, *rec, source.entities()));
  }

  std::array<std::size_t, kColumns.size()> width{};
  for (std::size_t c = 0; c < kColumns.size(); ++c) width[c] = std::string_view(kColumns[c]).size();
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }

  auto emit = [&](auto cell) {
    std::string line;
    for (std::size_t c = 0; c < kColumns.size(); ++c) {
      std::string text = cell(c);
      if (c + 1 < kColumns.size()) text.resize(width[c], ' ');
      line += text;
      if (c + 1 < kColumns.size()) line += "  ";
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out << line << '\n';
  };
  emit([](std::size_t c) { return std::string(kColumns[c]); });
  for (const auto& row : rows) emit([&](std::size_t c) { return row[c]; });
  return rows.size();
}

}  // namespace sysflow::cli
