#pragma once

#include <span>
#include <string>
#include <string_view>

#include "sysflow/policy/ast.hpp"

namespace sysflow::policy {

/// Parses and checks a policy. Throws PolicyError for lexical and syntax
/// errors, unknown attributes, lists or macros, macro cycles, achain arity
/// errors, duplicate names and operand type mismatches.
///
/// One statement per line; a trailing `\` joins the next line, and newlines
/// inside brackets are ignored. `#` starts a comment. Statements:
///
///   name := (value, ...)                   list
///   name := condition                      macro
///   [name:] match condition [show attr, ...]
///   [name:] tag condition with [label, ...]
///
/// Names may be used before they are defined. Unnamed rules are called
/// "rule<N>" after their 1-based position among all rules. Values that
/// start with "sf." or collide with a keyword or list name must be quoted.
Policy parse_policy(std::string_view text, std::string_view source = "<policy>");

/// Parses each text in order and checks them as one policy, so later files
/// may use lists and macros of earlier ones.
Policy parse_policies(std::span<const std::pair<std::string, std::string>> sources);

/// Reads and parses policy files in order. Throws IoError for unreadable files.
Policy load_policy_files(std::span<const std::string> paths);

}  // namespace sysflow::policy
