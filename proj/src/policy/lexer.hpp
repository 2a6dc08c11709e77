#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sysflow/policy/ast.hpp"

namespace sysflow::policy::detail {

enum class Tok : std::uint8_t {
  Word,      // bare token: names, attributes, keywords, unquoted values
  String,    // "quoted value"
  LParen,
  RParen,
  LBracket,
  RBracket,
  Comma,
  Define,    // :=
  Compare,   // = != < <= > >=
  Newline,   // end of statement
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  Location loc;
};

/// Splits policy text into tokens. Throws PolicyError on unterminated strings,
/// stray characters and unbalanced brackets.
std::vector<Token> tokenize(std::string_view text, const std::string& source);

std::string_view describe(Tok kind);

}  // namespace sysflow::policy::detail
