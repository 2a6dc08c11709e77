#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "sysflow/aggregate/pipeline.hpp"
#include "sysflow/gen/generator.hpp"
#include "sysflow/ingest/raw_event.hpp"

namespace sysflow::gen {
namespace {

template <class T>
std::size_t count(const std::vector<SfRecord>& recs) {
  std::size_t n = 0;
  for (const auto& r : recs) n += r.get_if<T>() != nullptr ? 1 : 0;
  return n;
}

TEST(Generator, ProfileNames) {
  for (Profile p : {Profile::attack_table2, Profile::db, Profile::web, Profile::threads}) {
    EXPECT_EQ(profile_from_string(to_string(p)), p);
  }
  EXPECT_FALSE(profile_from_string("cryptominer").has_value());
}

TEST(Generator, Validation) {
  GenOptions o{Profile::db};
  o.n_ops = 0;
  EXPECT_THROW(validate(o), GenError);
  o.n_ops = 10;
  o.duration_secs = -1;
  EXPECT_THROW(validate(o), GenError);
  o.duration_secs = 1e-9;
  EXPECT_THROW(validate(o), GenError);
  GenOptions w{Profile::web};
  w.tid_handoff = 4;
  EXPECT_THROW(validate(w), GenError);
  w.tid_handoff = 0;
  EXPECT_THROW(validate(w), GenError);
  GenOptions t{Profile::threads};
  t.n_threads = 0;
  EXPECT_THROW(validate(t), GenError);
  EXPECT_NO_THROW(validate(GenOptions{}));
}

class EveryProfile : public ::testing::TestWithParam<Profile> {
 protected:
  static GenOptions small(Profile p, std::uint64_t seed) {
    GenOptions o{p, seed};
    o.n_ops = 5000;
    o.n_conns = 100;
    o.n_threads = 100;
    return o;
  }
};

TEST_P(EveryProfile, DeterministicPerSeed) {
  const auto a = generate(small(GetParam(), 7));
  const auto b = generate(small(GetParam(), 7));
  EXPECT_TRUE(a == b);
  std::ostringstream ta, tb;
  write_trace(a, ta);
  write_trace(b, tb);
  EXPECT_EQ(ta.str(), tb.str());
}

TEST_P(EveryProfile, TimestampsNeverDecreaseAndTextRoundTrips) {
  const auto events = generate(small(GetParam(), 3));
  ASSERT_FALSE(events.empty());
  std::ostringstream text;
  write_trace(events, text);
  std::istringstream in(text.str());
  ingest::RawTraceReader reader(in);
  std::size_t i = 0;
  while (auto ev = reader.next()) {
    ASSERT_LT(i, events.size());
    EXPECT_EQ(*ev, events[i]) << "event " << i;
    ++i;
  }
  EXPECT_EQ(i, events.size());
}

INSTANTIATE_TEST_SUITE_P(Profiles, EveryProfile,
                         ::testing::Values(Profile::attack_table2, Profile::db, Profile::web,
                                           Profile::threads),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Generator, SeedsChangeRandomProfilesButNotTheScenario) {
  EXPECT_TRUE(generate({Profile::attack_table2, 1}) == generate({Profile::attack_table2, 2}));
  GenOptions a{Profile::db, 1}, b{Profile::db, 2};
  a.n_ops = b.n_ops = 1000;
  EXPECT_FALSE(generate(a) == generate(b));
}

TEST(Generator, DbProfileShape) {
  GenOptions o{Profile::db, 4};
  o.n_ops = 20'000;
  const auto events = generate(o);
  ASSERT_EQ(events.size(), o.n_ops + 1);  // one open, then the I/O calls
  EXPECT_EQ(events.front().syscall, ingest::Syscall::open);
  std::size_t reads = 0, failed = 0;
  std::set<std::int32_t> fds;
  for (std::size_t i = 1; i < events.size(); ++i) {
    reads += events[i].syscall == ingest::Syscall::read ? 1 : 0;
    failed += events[i].ret < 0 ? 1 : 0;
    fds.insert(*events[i].fd);
  }
  EXPECT_EQ(fds.size(), 1u);
  // 60% reads and 2% failures, within six standard deviations.
  EXPECT_NEAR(static_cast<double>(reads) / o.n_ops, 0.60, 6 * std::sqrt(0.6 * 0.4 / o.n_ops));
  EXPECT_NEAR(static_cast<double>(failed) / o.n_ops, 0.02, 6 * std::sqrt(0.02 * 0.98 / o.n_ops));
  EXPECT_LT(events.back().ts - events.front().ts, 60'000'000'000ULL);
}

TEST(Generator, DbAggregatesToTwoWindows) {
  // 60 s of I/O with a 30 s timeout: the window opened by the open expires
  // once, the continuation is flushed at the end.
  GenOptions o{Profile::db, 9};
  o.n_ops = 30'000;
  const auto recs = aggregate::aggregate_events(generate(o));
  EXPECT_EQ(count<FileFlow>(recs), 2u);
  std::uint64_t ops = 0;
  for (const auto& r : recs) {
    if (const auto* f = r.get_if<FileFlow>()) ops += f->num_reads + f->num_writes;
  }
  EXPECT_EQ(ops, o.n_ops);
}

TEST(Generator, WebFlowsPerConnectionFollowHandoff) {
  for (std::uint32_t handoff = 1; handoff <= 3; ++handoff) {
    GenOptions o{Profile::web, 2};
    o.n_conns = 150;
    o.tid_handoff = handoff;
    const auto recs = aggregate::aggregate_events(generate(o));
    EXPECT_EQ(count<NetworkFlow>(recs), o.n_conns * handoff) << "handoff " << handoff;
    EXPECT_EQ(count<NetworkEvent>(recs), 2u);  // bind, listen
  }
}

TEST(Generator, ThreadsCollapseIntoOneProcessFlow) {
  GenOptions o{Profile::threads, 1};
  o.n_threads = 1000;
  const auto recs = aggregate::aggregate_events(generate(o));
  ASSERT_EQ(count<ProcessFlow>(recs), 1u);
  for (const auto& r : recs) {
    if (const auto* f = r.get_if<ProcessFlow>()) {
      EXPECT_EQ(f->num_threads_cloned, 1000u);
      EXPECT_EQ(f->num_threads_exited, 1000u);
      EXPECT_EQ(f->opflags, Op::Clone | Op::Exit);
    }
  }
}

}  // namespace
}  // namespace sysflow::gen
