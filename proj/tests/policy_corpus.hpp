#pragma once

// Policy texts shared by the policy suite and the acceptance run.

#include <array>
#include <cstdint>
#include <string_view>

namespace sysflow::testing {

inline constexpr std::string_view kPackageManagerRule = "match sf.proc.exe pmatch (apt, yum, dnf)\n";
inline constexpr std::string_view kAccountDiscoveryRule =
    "tag sf.file.path in (/etc/passwd, /etc/shadow) with [T1087]\n";
inline constexpr std::string_view kAncestryRule =
    "match sf.proc.exe contains exfil.py show sf.proc.achain\n";

inline constexpr std::array<std::string_view, 3> kReferenceRules{kPackageManagerRule, kAccountDiscoveryRule, kAncestryRule};

inline constexpr std::array<std::string_view, 20> kSyntheticPolicies{
    // 1: list and a shell-grandparent rule
    "shell_binaries := (bash, sh, zsh, dash)\n"
    "match sf.proc.achain(2) in shell_binaries\n",
    // 2: macro over a list, used twice
    "pkg := (apt, apt-get, yum, dnf, pip)\n"
    "installer := sf.proc.exe pmatch pkg\n"
    "pkg_exec: match installer and sf.type = PE show sf.proc.exe, sf.proc.args\n"
    "tag installer with [T1072, package]\n",
    // 3: nested not/and/or
    "match not (sf.type = FF or sf.type = FE) and (sf.net.dport = 443 or not sf.net.dport exists)\n",
    // 4: comparisons of every kind
    "match sf.flow.rops >= 10 and sf.flow.rbytes < 4096 and sf.flow.wops <= 3 and "
    "sf.flow.wbytes > 0 and sf.proc.uid != 0\n",
    // 5: macro referencing a macro defined later
    "outbound := sf.type = NF and remote\n"
    "remote := not sf.net.dip startswith 10.\n"
    "match outbound show sf.net.dip, sf.net.dport\n",
    // 6: continuation lines and comments
    "# sensitive files\n"
    "match sf.file.path in (/etc/passwd, \\\n"
    "                      /etc/shadow,\n"
    "                      /etc/sudoers)  # newline inside brackets is fine\n",
    // 7: quoted values that would otherwise be keywords or attributes
    "match sf.proc.args contains \"sf.proc.exe\" or sf.proc.args = \"not\" or "
    "sf.file.path = \"/tmp/a b\"\n",
    // 8: achain of several depths
    "match sf.proc.achain(1) pmatch (node) and sf.proc.achain(3) in (systemd, init)\n",
    // 9: whole-chain membership
    "daemons := (sshd, cron, systemd)\n"
    "match sf.proc.achain in daemons show sf.proc.achain\n",
    // 10: container attributes
    "match sf.container.image startswith node: and sf.container.name != \"\"\n",
    // 11: deep nesting
    "match ((sf.type = NF and (sf.net.sport = 22 or (sf.net.dport = 22))) or "
    "not (not (sf.proc.exe contains ssh)))\n",
    // 12: several tag rules, several labels
    "recon: tag sf.proc.exe pmatch (whoami, id, uname, hostname) with [T1033, T1082]\n"
    "netcfg: tag sf.proc.exe pmatch (ifconfig, ip) with [T1016]\n",
    // 13: exists on several attributes
    "match sf.file.path exists and not sf.net.proto exists and sf.endts exists\n",
    // 14: attribute on both sides
    "match sf.proc.tid != sf.proc.pid and sf.ts < sf.endts\n",
    // 15: file ops
    "writes := sf.opflags contains WRITE\n"
    "etc := sf.file.path startswith /etc/\n"
    "match writes and etc\n"
    "tag writes and etc with [T1098]\n",
    // 16: numeric list
    "match sf.net.dport in (22, 23, 3389, 5900)\n",
    // 17: parent attributes
    "match sf.pproc.exe in (python, python3, perl) and sf.proc.exe pmatch (sh, bash)\n",
    // 18: a single pattern for pmatch and a macro chain
    "a := sf.proc.exe pmatch curl\n"
    "b := a or sf.proc.exe pmatch wget\n"
    "c := b and sf.type = NF\n"
    "match c\n",
    // 19: empty lines and unnamed rules
    "\n\nmatch sf.type = PE\n\n\nmatch sf.type = PF show sf.flow.tcloned, sf.flow.texited\n\n",
    // 20: listen sockets
    "listen_ops := sf.opflags contains LISTEN\n"
    "unusual_listen: tag listen_ops and not sf.net.sport in (80, 443, 8080) with [T1205]\n",
};

/// A malformed policy and the line and column its error must point at.
struct Malformed {
  std::string_view text;
  std::uint32_t line;
  std::uint32_t column;
};

inline constexpr std::array<Malformed, 10> kMalformedPolicies{{
    {"match sf.proc.exe pmatch (apt, yum\n", 1, 26},               // unclosed (
    {"match sf.proc.bogus = 1\n", 1, 7},                            // unknown attribute
    {"match sf.type = PE\nmatch nope\n", 2, 7},                     // unknown macro
    {"a := b\nb := a\nmatch a\n", 1, 1},                            // macro cycle
    {"match sf.proc.achain(0) in (bash)\n", 1, 22},                 // achain arity
    {"match sf.proc.achain(1, 2) in (bash)\n", 1, 23},              // achain arity
    {"match sf.type = \"PE\n", 1, 17},                              // unterminated string
    {"\n  tag sf.type = PE with []\n", 2, 25},                      // no labels
    {"match sf.type = PE and\n", 1, 23},                            // dangling operator
    {"x := (a, b)\nx := (c)\n", 2, 1},                              // duplicate name
}};

}  // namespace sysflow::testing
