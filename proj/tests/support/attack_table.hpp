#pragma once

// The sixteen records of the attack scenario in the order of the reference table.
// Reads/Writes are "ops:bytes"; flows on sockets count receives as reads and
// sends as writes. Resources for network flows are given by their ports, the
// only part of the tuple the table shows for every row.

#include <array>
#include <string_view>

namespace sysflow::testing {

struct AttackRow {
  std::string_view type;
  std::string_view process;
  unsigned ppid;
  unsigned pid;
  std::string_view flags;
  std::string_view resource;
  std::string_view reads;
  std::string_view writes;
};

inline constexpr std::array<AttackRow, 16> kAttackTable = {{
    {"PE", "node app.js", 1887, 21847, "EXEC", "", ":", ":"},
    {"FF", "node app.js", 1887, 21847, "O R C", "/lib/gnu/libc.so", "1:832", ":"},
    {"FE", "node app.js", 1887, 21847, "MKDIR", "/tmp/log", ":", ":"},
    {"FF", "node app.js", 1887, 21847, "O W", "/tmp/log/app.log", ":", "100:8000"},
    {"NF", "node app.js", 1887, 21847, "A SR C", ":3522 -- 172.30.10.2:443", "1:80", "2:980"},
    {"NF", "node app.js", 1887, 21847, "C SR C", "172.30.10.2:8353 -- :2345", "3:4355", "1:94"},
    {"FF", "node app.js", 1887, 21847, "O W C", "/tmp/exfil.py", ":", "6:4250"},
    {"PE", "/tmp/exfil.py", 21847, 21849, "EXEC", "", ":", ":"},
    {"PE", "apt install pip", 21849, 21851, "EXEC", "", ":", ":"},
    {"PE", "apt install pip", 21849, 21851, "EXIT", "", ":", ":"},
    {"NF", "/tmp/exfil.py", 21847, 21849, "C SR C", "172.30.10.2:8356 -- :3000", "2:165", "1:34"},
    {"NF", "/tmp/exfil.py", 21847, 21849, "C SR C", "172.30.10.2:8357 -- :4444", "1:46", "2:188"},
    {"PE", "/tmp/exfil.py", 21847, 21849, "EXIT", "", ":", ":"},
    {"FF", "node app.js", 1887, 21847, "W", "/tmp/log/app.log", ":", "100:8000"},
    {"FF", "node app.js", 1887, 21847, "W C", "/tmp/log/app.log", ":", "50:4000"},
    {"PE", "node app.js", 1887, 21847, "EXIT", "", ":", ":"},
}};

/// The resource column matches when every ':'-separated piece of the
/// expected text appears in the rendered one, so placeholder addresses
/// ("<IP attacker>") may be any concrete address.
inline bool resource_matches(std::string_view expected, std::string_view rendered) {
  if (expected.empty()) return rendered.empty();
  if (expected.find(" -- ") == std::string_view::npos) return expected == rendered;
  const auto sep = rendered.find(" -- ");
  if (sep == std::string_view::npos) return false;
  auto side = [](std::string_view pub, std::string_view got) {
    // pub is either "ip:port" (exact) or ":port" (any ip).
    if (!pub.empty() && pub.front() == ':') {
      return got.size() > pub.size() && got.substr(got.size() - pub.size()) == pub;
    }
    return pub == got;
  };
  const auto want_sep = expected.find(" -- ");
  return side(expected.substr(0, want_sep), rendered.substr(0, sep)) &&
         side(expected.substr(want_sep + 4), rendered.substr(sep + 4));
}

}  // namespace sysflow::testing
