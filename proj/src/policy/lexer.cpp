#include "lexer.hpp"

#include <cstdint>

namespace sysflow::policy::detail {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }

bool is_delimiter(char c) {
  switch (c) {
    case '(':
    case ')':
    case '[':
    case ']':
    case ',':
    case '"':
    case '#':
    case '=':
    case '!':
    case '<':
    case '>':
    case '\\':
    case '\n':
      return true;
    default:
      return is_space(c);
  }
}

class Lexer {
 public:
  Lexer(std::string_view text, const std::string& source) : text_(text), source_(source) {}

  std::vector<Token> run() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (is_space(c)) {
        advance();
      } else if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (c == '\\') {
        continuation();
      } else if (c == '\n') {
        if (depth_.empty()) push(Tok::Newline, "\n", here());
        advance();
      } else if (c == '"') {
        string();
      } else if (c == '(' || c == '[') {
        depth_.push_back({c, here()});
        push(c == '(' ? Tok::LParen : Tok::LBracket, std::string(1, c), here());
        advance();
      } else if (c == ')' || c == ']') {
        close(c);
      } else if (c == ',') {
        push(Tok::Comma, ",", here());
        advance();
      } else if (c == '=' || c == '!' || c == '<' || c == '>') {
        compare();
      } else if (c == ':' && peek(1) == '=') {
        push(Tok::Define, ":=", here());
        advance();
        advance();
      } else {
        word();
      }
    }
    if (!depth_.empty()) {
      const auto& [open, loc] = depth_.back();
      throw PolicyError(loc, std::string("unclosed '") + open + "'");
    }
    push(Tok::Newline, "\n", here());
    push(Tok::End, "", here());
    return std::move(tokens_);
  }

 private:
  Location here() const { return {source_, line_, column_}; }

  char peek(std::size_t ahead) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void push(Tok kind, std::string text, Location loc) {
    tokens_.push_back(Token{kind, std::move(text), std::move(loc)});
  }

  // A backslash must be the last thing on its line, apart from blanks.
  void continuation() {
    const Location loc = here();
    advance();
    while (pos_ < text_.size() && is_space(text_[pos_])) advance();
    if (pos_ < text_.size() && text_[pos_] == '#') {
      while (pos_ < text_.size() && text_[pos_] != '\n') advance();
    }
    if (pos_ < text_.size() && text_[pos_] != '\n') {
      throw PolicyError(loc, "'\\' must end the line");
    }
    if (pos_ < text_.size()) advance();
  }

  void string() {
    const Location loc = here();
    advance();
    std::string out;
    for (;;) {
      if (pos_ >= text_.size() || text_[pos_] == '\n') {
        throw PolicyError(loc, "unterminated string");
      }
      const char c = text_[pos_];
      if (c == '"') break;
      if (c == '\\') {
        const char next = peek(1);
        if (next != '"' && next != '\\') {
          throw PolicyError(here(), "unknown escape in string");
        }
        advance();
        out.push_back(next);
        advance();
        continue;
      }
      out.push_back(c);
      advance();
    }
    advance();
    push(Tok::String, std::move(out), loc);
  }

  void close(char c) {
    const char want = c == ')' ? '(' : '[';
    if (depth_.empty() || depth_.back().first != want) {
      throw PolicyError(here(), std::string("unexpected '") + c + "'");
    }
    depth_.pop_back();
    push(c == ')' ? Tok::RParen : Tok::RBracket, std::string(1, c), here());
    advance();
  }

  void compare() {
    const Location loc = here();
    const char c = text_[pos_];
    std::string op(1, c);
    advance();
    if (pos_ < text_.size() && text_[pos_] == '=' && c != '=') {
      op.push_back('=');
      advance();
    }
    if (op == "!") throw PolicyError(loc, "expected '!='");
    push(Tok::Compare, std::move(op), loc);
  }

  void word() {
    const Location loc = here();
    std::string out;
    while (pos_ < text_.size() && !is_delimiter(text_[pos_]) &&
           !(text_[pos_] == ':' && peek(1) == '=')) {
      out.push_back(text_[pos_]);
      advance();
    }
    if (out.empty()) throw PolicyError(loc, "unexpected character");
    push(Tok::Word, std::move(out), loc);
  }

  std::string_view text_;
  const std::string& source_;
  std::size_t pos_ = 0;
  std::uint32_t line_ = 1;
  std::uint32_t column_ = 1;
  std::vector<std::pair<char, Location>> depth_;
  std::vector<Token> tokens_;
};

}  // namespace

std::vector<Token> tokenize(std::string_view text, const std::string& source) {
  return Lexer(text, source).run();
}

std::string_view describe(Tok kind) {
  switch (kind) {
    case Tok::Word: return "word";
    case Tok::String: return "string";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Comma: return "','";
    case Tok::Define: return "':='";
    case Tok::Compare: return "comparison";
    case Tok::Newline: return "end of line";
    case Tok::End: return "end of input";
  }
  return "token";
}

}  // namespace sysflow::policy::detail
