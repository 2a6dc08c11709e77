#include <gtest/gtest.h>

#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "support/fixtures.hpp"
#include "sysflow/cli/commands.hpp"
#include "sysflow/gen/generator.hpp"

namespace sysflow::cli {
namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("sysflow_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
    ::unsetenv("SF_FLOW_TIMEOUT_SECS");
  }
  void TearDown() override {
    ::unsetenv("SF_FLOW_TIMEOUT_SECS");
    fs::remove_all(dir_);
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name), std::ios::binary) << text;
  }

  std::string read(const std::string& name) const {
    std::ifstream in(path(name), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  // Runs a command with empty stdin; stdout and stderr are kept.
  template <typename Args, typename F>
  int run(F cmd, const Args& args) {
    std::istringstream in;
    out_.str("");
    err_.str("");
    return cmd(args, Io{in, out_, err_});
  }

  std::string attack_stream(aggregate::OutputFormat format = aggregate::OutputFormat::binary) {
    GenArgs g;
    g.output = path("attack.raw");
    EXPECT_EQ(run(cmd_gen, g), kOk);
    AggregateArgs a;
    a.input = g.output;
    a.output = path(format == aggregate::OutputFormat::binary ? "attack.sf" : "attack.jsonl");
    a.format = format;
    EXPECT_EQ(run(cmd_aggregate, a), kOk) << err_.str();
    return a.output;
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

std::size_t count_lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

TEST_F(Cli, AggregateReportsCompression) {
  attack_stream();
  EXPECT_NE(err_.str().find("raw_events=291 sf_records=25 events_flows=16"), std::string::npos)
      << err_.str();
}

TEST_F(Cli, PrintTableHasOneRowPerEventOrFlow) {
  PrintArgs p;
  p.input = attack_stream();
  ASSERT_EQ(run(cmd_print, p), kOk) << err_.str();
  const std::string table = out_.str();
  EXPECT_EQ(count_lines(table), 17u);  // header + 16 rows
  EXPECT_EQ(table.rfind("#", 0), 0u);
  EXPECT_NE(table.find("apt install pip"), std::string::npos);
  EXPECT_NE(table.find("/tmp/log/app.log"), std::string::npos);
}

TEST_F(Cli, BinaryAndJsonStreamsPrintTheSame) {
  PrintArgs p;
  p.input = attack_stream(aggregate::OutputFormat::binary);
  ASSERT_EQ(run(cmd_print, p), kOk);
  const std::string from_binary = out_.str();
  p.format = PrintFormat::jsonl;
  ASSERT_EQ(run(cmd_print, p), kOk);
  const std::string binary_as_json = out_.str();

  p.input = attack_stream(aggregate::OutputFormat::jsonl);
  p.format = PrintFormat::table;
  ASSERT_EQ(run(cmd_print, p), kOk);
  EXPECT_EQ(out_.str(), from_binary);
  EXPECT_EQ(binary_as_json, read("attack.jsonl"));
  EXPECT_EQ(count_lines(binary_as_json), 26u);  // header + 25 records
}

TEST_F(Cli, StatsCountsRecordTypes) {
  StatsArgs s;
  s.input = attack_stream();
  ASSERT_EQ(run(cmd_stats, s), kOk) << err_.str();
  const auto j = nlohmann::json::parse(out_.str());
  EXPECT_EQ(j["records"], 25);
  EXPECT_EQ(j["by_type"]["PE"], 6);
  EXPECT_EQ(j["by_type"]["FF"], 5);
  EXPECT_EQ(j["by_type"]["FE"], 1);
  EXPECT_EQ(j["by_type"]["NF"], 4);
  EXPECT_EQ(j["by_type"]["P"], 4);  // stub parent, node, exfil.py, apt
  EXPECT_EQ(j["ops"]["EXEC"], 3);
  EXPECT_EQ(j["io"]["file_writes"], 256);  // 250 log writes and 6 to exfil.py
  EXPECT_EQ(j["io"]["file_write_bytes"], 20000 + 4250);
  EXPECT_EQ(j["top_processes"][0]["pid"], 21847);
  s.top = 1;
  ASSERT_EQ(run(cmd_stats, s), kOk);
  EXPECT_EQ(nlohmann::json::parse(out_.str())["top_processes"].size(), 1u);
}

TEST_F(Cli, EmptyTrace) {
  write("empty.raw", "");
  AggregateArgs a;
  a.input = path("empty.raw");
  a.output = path("empty.sf");
  ASSERT_EQ(run(cmd_aggregate, a), kOk) << err_.str();
  PrintArgs p;
  p.input = a.output;
  ASSERT_EQ(run(cmd_print, p), kOk) << err_.str();
  EXPECT_EQ(count_lines(out_.str()), 1u);
  StatsArgs s;
  s.input = a.output;
  ASSERT_EQ(run(cmd_stats, s), kOk);
  EXPECT_EQ(nlohmann::json::parse(out_.str())["records"], 0);
}

TEST_F(Cli, ExitCodes) {
  PrintArgs missing;
  missing.input = path("nope.sf");
  EXPECT_EQ(run(cmd_print, missing), kIoError);
  EXPECT_NE(err_.str().find("cannot open"), std::string::npos);

  testing::RawActor app;
  std::ostringstream trace;
  gen::write_trace(std::vector<ingest::RawEvent>{app.ev(testing::kT0 + 10, ingest::Syscall::execve),
                    app.ev(testing::kT0 + 5, ingest::Syscall::exit)},
                   trace);
  write("backwards.raw", trace.str());
  AggregateArgs a;
  a.input = path("backwards.raw");
  a.output = path("out.sf");
  EXPECT_EQ(run(cmd_aggregate, a), kDataError);

  write("garbage.raw", "{\"ts\": 1, \n");
  a.input = path("garbage.raw");
  EXPECT_EQ(run(cmd_aggregate, a), kDataError);

  a.input = path("absent.raw");
  EXPECT_EQ(run(cmd_aggregate, a), kIoError);

  a.input = attack_stream();  // an encoded stream is not a raw trace
  a.output = path("again.sf");
  EXPECT_EQ(run(cmd_aggregate, a), kDataError);

  GenArgs g;
  g.options.profile = gen::Profile::web;
  g.options.tid_handoff = 9;
  EXPECT_EQ(run(cmd_gen, g), kDataError);

  g = GenArgs{};
  g.output = path("no/such/dir/x.raw");
  EXPECT_EQ(run(cmd_gen, g), kIoError);

  write("bad.sfp", "match sf.nothing = 1\n");
  PolicyArgs pol;
  pol.input = path("attack.sf");
  pol.policy_files = {path("bad.sfp")};
  EXPECT_EQ(run(cmd_policy, pol), kDataError);
  EXPECT_NE(err_.str().find("bad.sfp:1:7"), std::string::npos) << err_.str();

  pol.policy_files = {path("missing.sfp")};
  EXPECT_EQ(run(cmd_policy, pol), kIoError);
}

TEST_F(Cli, TruncatedStreamIsRejected) {
  const std::string full = read(fs::path(attack_stream()).filename().string());
  write("cut.sf", full.substr(0, full.size() - 7));
  PrintArgs p;
  p.input = path("cut.sf");
  EXPECT_EQ(run(cmd_print, p), kDataError);
  StatsArgs s;
  s.input = p.input;
  EXPECT_EQ(run(cmd_stats, s), kDataError);
}

TEST_F(Cli, PolicyFindingsAndTaggedStream) {
  std::ostringstream trace;
  gen::write_trace(testing::passwd_reader_trace(), trace);
  write("passwd.raw", trace.str());
  for (auto format : {aggregate::OutputFormat::binary, aggregate::OutputFormat::jsonl}) {
    AggregateArgs a;
    a.input = path("passwd.raw");
    a.output = path("passwd.sf");
    a.format = format;
    ASSERT_EQ(run(cmd_aggregate, a), kOk) << err_.str();

    PolicyArgs pol;
    pol.input = a.output;
    pol.policy_files = {std::string(SYSFLOW_SOURCE_DIR) + "/policies/mitre.sfp"};
    pol.emit_tagged = path("tagged.sf");
    ASSERT_EQ(run(cmd_policy, pol), kOk) << err_.str();
    const auto finding = nlohmann::json::parse(out_.str());
    EXPECT_EQ(finding["rule"], "account_discovery");
    EXPECT_EQ(finding["tags"], nlohmann::json::array({"T1087"}));

    // Same encoding as the input, tags visible after decoding.
    const std::string tagged = read("tagged.sf");
    EXPECT_EQ(tagged.front() == '{', format == aggregate::OutputFormat::jsonl);
    PrintArgs p;
    p.input = pol.emit_tagged;
    p.format = PrintFormat::jsonl;
    ASSERT_EQ(run(cmd_print, p), kOk) << err_.str();
    EXPECT_NE(out_.str().find("\"T1087\""), std::string::npos);
  }
}

TEST_F(Cli, PolicyDedupAndEveryMatch) {
  write("r3.sfp", "match sf.proc.exe contains exfil.py show sf.proc.achain\n");
  PolicyArgs pol;
  pol.input = attack_stream();
  pol.policy_files = {path("r3.sfp")};
  ASSERT_EQ(run(cmd_policy, pol), kOk);
  EXPECT_EQ(count_lines(out_.str()), 1u);
  EXPECT_NE(out_.str().find("node app.js"), std::string::npos);
  pol.every_match = true;
  ASSERT_EQ(run(cmd_policy, pol), kOk);
  EXPECT_EQ(count_lines(out_.str()), 4u);
  pol.emit_tagged = "-";
  EXPECT_EQ(run(cmd_policy, pol), kDataError);
}

TEST_F(Cli, TimeoutFromEnvironmentAndFlag) {
  GenArgs g;
  g.output = path("attack.raw");
  ASSERT_EQ(run(cmd_gen, g), kOk);
  auto records = [&](std::optional<double> flag) {
    AggregateArgs a;
    a.input = g.output;
    a.output = path("t.sf");
    a.timeout_secs = flag;
    EXPECT_EQ(run(cmd_aggregate, a), kOk) << err_.str();
    StatsArgs s;
    s.input = a.output;
    EXPECT_EQ(run(cmd_stats, s), kOk);
    return nlohmann::json::parse(out_.str())["by_type"]["FF"].get<int>();
  };
  EXPECT_EQ(records(std::nullopt), 5);
  EXPECT_EQ(records(30.0), 5);
  const int short_windows = records(5.0);
  EXPECT_GT(short_windows, 5);
  ::setenv("SF_FLOW_TIMEOUT_SECS", "5", 1);
  EXPECT_EQ(records(std::nullopt), short_windows);
  EXPECT_EQ(records(30.0), 5);  // the flag wins
  ::setenv("SF_FLOW_TIMEOUT_SECS", "soon", 1);
  EXPECT_THROW(timeout_from_env(30), std::invalid_argument);
  AggregateArgs a;
  a.input = g.output;
  a.output = path("t.sf");
  EXPECT_EQ(run(cmd_aggregate, a), kDataError);
  ::setenv("SF_FLOW_TIMEOUT_SECS", "-3", 1);
  EXPECT_THROW(timeout_from_env(30), std::invalid_argument);
  ::unsetenv("SF_FLOW_TIMEOUT_SECS");
  EXPECT_EQ(timeout_from_env(30), 30);
}

TEST(FormatTs, Utc) {
  EXPECT_EQ(format_ts(testing::kT0), "2019-04-10T16:47:00.000");
  EXPECT_EQ(format_ts(testing::kT0 + 1'234'000'000), "2019-04-10T16:47:01.234");
  EXPECT_EQ(format_ts(0), "1970-01-01T00:00:00.000");
}

}  // namespace
}  // namespace sysflow::cli
