#include "sysflow/policy/parser.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "lexer.hpp"

namespace sysflow::policy {

namespace {

using detail::Tok;
using detail::Token;

using Statement = std::vector<Token>;  // ends with a Newline token

bool is_identifier(std::string_view w) {
  if (w.empty()) return false;
  auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  if (!alpha(w[0])) return false;
  for (char c : w) {
    if (!alpha(c) && !(c >= '0' && c <= '9')) return false;
  }
  return true;
}

std::optional<BinaryOp> binary_op(const Token& t) {
  if (t.kind == Tok::Compare) {
    if (t.text == "=") return BinaryOp::Eq;
    if (t.text == "!=") return BinaryOp::Ne;
    if (t.text == "<") return BinaryOp::Lt;
    if (t.text == "<=") return BinaryOp::Le;
    if (t.text == ">") return BinaryOp::Gt;
    if (t.text == ">=") return BinaryOp::Ge;
  }
  if (t.kind == Tok::Word) {
    if (t.text == "in") return BinaryOp::In;
    if (t.text == "pmatch") return BinaryOp::Pmatch;
    if (t.text == "contains") return BinaryOp::Contains;
    if (t.text == "startswith") return BinaryOp::Startswith;
  }
  return std::nullopt;
}

bool is_word(const Token& t, std::string_view text) { return t.kind == Tok::Word && t.text == text; }

std::string show_token(const Token& t) {
  if (t.kind == Tok::Word) return "'" + t.text + "'";
  if (t.kind == Tok::String) return "\"" + t.text + "\"";
  return std::string(detail::describe(t.kind));
}

std::vector<Statement> split_statements(std::vector<Token> tokens) {
  std::vector<Statement> out;
  Statement cur;
  for (auto& t : tokens) {
    if (t.kind == Tok::End) break;
    const bool newline = t.kind == Tok::Newline;
    cur.push_back(std::move(t));
    if (newline) {
      if (cur.size() > 1) out.push_back(std::move(cur));
      cur.clear();
    }
  }
  return out;
}

/// `( value, ... )` or `[ value, ... ]` spanning tokens [from, end of statement).
bool is_value_list(const Statement& s, std::size_t from) {
  if (from >= s.size()) return false;
  const Tok open = s[from].kind;
  if (open != Tok::LParen && open != Tok::LBracket) return false;
  const Tok close = open == Tok::LParen ? Tok::RParen : Tok::RBracket;
  std::size_t i = from + 1;
  if (s[i].kind != close) {
    for (;;) {
      if (s[i].kind != Tok::Word && s[i].kind != Tok::String) return false;
      ++i;
      if (s[i].kind == close) break;
      if (s[i].kind != Tok::Comma) return false;
      ++i;
    }
  }
  return s[i + 1].kind == Tok::Newline;
}

enum class NameKind { List, Macro };

struct Definition {
  NameKind kind;
  Location loc;
};

using Names = std::map<std::string, Definition, std::less<>>;

class StatementParser {
 public:
  StatementParser(const Statement& s, const Names& names) : s_(s), names_(names) {}

  ListDef list_def() {
    ListDef def{s_[0].text, {}, s_[0].loc};
    pos_ = 2;
    def.values = values(next().kind == Tok::LParen ? Tok::RParen : Tok::RBracket);
    expect_end();
    return def;
  }

  MacroDef macro_def() {
    MacroDef def{s_[0].text, {}, s_[0].loc};
    pos_ = 2;
    def.body = condition();
    expect_end();
    return def;
  }

  Rule rule(std::size_t number) {
    Rule r;
    r.loc = peek().loc;
    if (peek().kind == Tok::Word && peek().text.size() > 1 && peek().text.back() == ':') {
      const Token& t = next();
      r.name = t.text.substr(0, t.text.size() - 1);
      if (!is_identifier(r.name) || is_keyword(r.name)) {
        throw PolicyError(t.loc, "invalid rule name '" + r.name + "'");
      }
    } else {
      r.name = "rule" + std::to_string(number);
    }
    const Token& verb = next();
    if (is_word(verb, "match")) {
      r.action = RuleAction::Match;
      r.cond = condition();
      if (is_word(peek(), "show")) {
        next();
        r.show.push_back(attribute(next()));
        while (peek().kind == Tok::Comma) {
          next();
          r.show.push_back(attribute(next()));
        }
      }
    } else if (is_word(verb, "tag")) {
      r.action = RuleAction::Tag;
      r.cond = condition();
      const Token& with = next();
      if (!is_word(with, "with")) {
        throw PolicyError(with.loc, "expected 'with', found " + show_token(with));
      }
      const Token& open = next();
      if (open.kind != Tok::LBracket) {
        throw PolicyError(open.loc, "expected '[' before tag labels");
      }
      r.labels = values(Tok::RBracket);
      if (r.labels.empty()) throw PolicyError(open.loc, "a tag rule needs at least one label");
    } else {
      throw PolicyError(verb.loc, "expected a definition, 'match' or 'tag', found " +
                                      show_token(verb));
    }
    expect_end();
    return r;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return s_[std::min(pos_ + ahead, s_.size() - 1)];
  }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < s_.size() - 1) ++pos_;
    return t;
  }

  void expect_end() {
    if (peek().kind != Tok::Newline) {
      throw PolicyError(peek().loc, "unexpected " + show_token(peek()));
    }
  }

  // After the opening bracket: value (, value)* close.
  std::vector<std::string> values(Tok close) {
    std::vector<std::string> out;
    if (peek().kind == close) {
      next();
      return out;
    }
    for (;;) {
      const Token& t = next();
      if (t.kind != Tok::Word && t.kind != Tok::String) {
        throw PolicyError(t.loc, "expected a value, found " + show_token(t));
      }
      out.push_back(t.text);
      const Token& sep = next();
      if (sep.kind == close) break;
      if (sep.kind != Tok::Comma) {
        throw PolicyError(sep.loc, "expected ',' or closing bracket, found " + show_token(sep));
      }
    }
    return out;
  }

  Condition condition() {
    const Location loc = peek().loc;
    std::vector<Condition> terms{conjunction()};
    while (is_word(peek(), "or")) {
      next();
      terms.push_back(conjunction());
    }
    if (terms.size() == 1) return std::move(terms[0]);
    Condition c = Condition::make_or(std::move(terms));
    c.loc = loc;
    return c;
  }

  Condition conjunction() {
    const Location loc = peek().loc;
    std::vector<Condition> terms{term()};
    while (is_word(peek(), "and")) {
      next();
      terms.push_back(term());
    }
    if (terms.size() == 1) return std::move(terms[0]);
    Condition c = Condition::make_and(std::move(terms));
    c.loc = loc;
    return c;
  }

  Condition term() {
    const Token& t = peek();
    const Location loc = t.loc;
    if (is_word(t, "not")) {
      next();
      Condition c = Condition::make_not(term());
      c.loc = loc;
      return c;
    }
    if (t.kind == Tok::LParen) {
      next();
      Condition inner = condition();
      const Token& close = next();
      if (close.kind != Tok::RParen) {
        throw PolicyError(close.loc, "expected ')', found " + show_token(close));
      }
      return inner;
    }
    if (t.kind == Tok::Word && is_identifier(t.text) && !is_keyword(t.text)) {
      const Token& after = peek(1);
      if (!binary_op(after) && !is_word(after, "exists")) {
        auto it = names_.find(t.text);
        if (it == names_.end()) throw PolicyError(t.loc, "unknown macro '" + t.text + "'");
        if (it->second.kind != NameKind::Macro) {
          throw PolicyError(t.loc, "'" + t.text + "' is a list, not a macro");
        }
        next();
        Condition c = Condition::make_macro(t.text);
        c.loc = loc;
        return c;
      }
    }
    Atom lhs = atom();
    const Token& op = next();
    if (is_word(op, "exists")) {
      const auto* path = std::get_if<AttrPath>(&lhs);
      if (path == nullptr) throw PolicyError(op.loc, "'exists' applies to attributes only");
      Condition c = Condition::make_exists(*path);
      c.loc = loc;
      return c;
    }
    const auto bop = binary_op(op);
    if (!bop) throw PolicyError(op.loc, "expected an operator, found " + show_token(op));
    Atom rhs = atom();
    Condition c = Condition::make_binary(*bop, std::move(lhs), std::move(rhs));
    c.loc = loc;
    return c;
  }

  Atom atom() {
    const Token& t = next();
    switch (t.kind) {
      case Tok::String:
        return Value{t.text};
      case Tok::LParen:
        return ValueList{values(Tok::RParen)};
      case Tok::LBracket:
        return ValueList{values(Tok::RBracket)};
      case Tok::Word:
        break;
      default:
        throw PolicyError(t.loc, "expected a value, found " + show_token(t));
    }
    if (t.text.starts_with("sf.")) return attribute(t);
    if (is_keyword(t.text)) {
      throw PolicyError(t.loc, "expected a value, found keyword '" + t.text + "'");
    }
    if (auto it = names_.find(t.text); it != names_.end()) {
      if (it->second.kind == NameKind::List) return ListRef{t.text};
      throw PolicyError(t.loc, "macro '" + t.text + "' used as a value");
    }
    return Value{t.text};
  }

  AttrPath attribute(const Token& t) {
    if (t.kind != Tok::Word) {
      throw PolicyError(t.loc, "expected an attribute, found " + show_token(t));
    }
    const AttrInfo* info = find_attribute(t.text);
    if (info == nullptr) throw PolicyError(t.loc, "unknown attribute '" + t.text + "'");
    AttrPath path{info->attr, std::nullopt};
    if (peek().kind != Tok::LParen) return path;
    const Token& open = next();
    if (info->attr != Attr::ProcAchain) {
      throw PolicyError(open.loc, "attribute '" + t.text + "' takes no index");
    }
    const Token& k = next();
    const auto value = k.kind == Tok::Word ? integer_value(k.text) : std::nullopt;
    if (!value || *value < 1 || *value > 0xFFFF) {
      throw PolicyError(k.loc, "achain index must be a positive integer");
    }
    const Token& close = next();
    if (close.kind != Tok::RParen) {
      throw PolicyError(close.loc, "achain takes exactly one index");
    }
    path.k = static_cast<std::uint32_t>(*value);
    return path;
  }

  const Statement& s_;
  const Names& names_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Checks on the assembled policy.

enum class Operand { Int, String, StringList, IntLiteral, StringLiteral, List };

class Checker {
 public:
  explicit Checker(const Policy& p) : p_(p) {}

  void run() {
    for (const auto& m : p_.macros) check_cycles(m);
    for (const auto& m : p_.macros) check(m.body);
    for (const auto& r : p_.rules) check(r.cond);
  }

 private:
  Operand operand(const Atom& a) const {
    if (const auto* path = std::get_if<AttrPath>(&a)) {
      if (path->k) return Operand::String;
      switch (attribute_info(path->attr).type) {
        case AttrType::Int: return Operand::Int;
        case AttrType::String: return Operand::String;
        case AttrType::StringList: return Operand::StringList;
      }
    }
    if (const auto* v = std::get_if<Value>(&a)) {
      return integer_value(v->text) ? Operand::IntLiteral : Operand::StringLiteral;
    }
    return Operand::List;
  }

  const std::vector<std::string>& items(const Atom& a) const {
    if (const auto* l = std::get_if<ValueList>(&a)) return l->items;
    return p_.find_list(std::get<ListRef>(a).name)->values;
  }

  static bool stringy(Operand o) {
    return o == Operand::String || o == Operand::StringList || o == Operand::StringLiteral ||
           o == Operand::IntLiteral;
  }
  static bool scalar(Operand o) { return o != Operand::List && o != Operand::StringList; }
  static bool numeric(Operand o) { return o == Operand::Int || o == Operand::IntLiteral; }

  void check(const Condition& c) const {
    switch (c.kind) {
      case CondKind::Or:
      case CondKind::And:
      case CondKind::Not:
        for (const auto& child : c.children) check(child);
        return;
      case CondKind::Exists:
      case CondKind::MacroRef:
        return;
      case CondKind::Binary:
        break;
    }
    const Operand l = operand(c.lhs);
    const Operand r = operand(c.rhs);
    const std::string op(to_string(c.op));
    auto fail = [&](const std::string& why) { throw PolicyError(c.loc, "'" + op + "': " + why); };
    if (l == Operand::List) fail("a list cannot be the left operand");
    switch (c.op) {
      case BinaryOp::In:
        if (r != Operand::List && r != Operand::StringList) {
          fail("right operand must be a list");
        }
        if (l == Operand::Int) {
          if (r == Operand::StringList) fail("cannot look up a number in a string list");
          for (const auto& item : items(c.rhs)) {
            if (!integer_value(item)) fail("list value '" + item + "' is not an integer");
          }
        }
        if (l == Operand::StringList && r == Operand::StringList) {
          fail("both operands are attribute lists");
        }
        return;
      case BinaryOp::Pmatch:
        if (!stringy(l)) fail("left operand must be a string");
        if (r != Operand::List && r != Operand::StringLiteral && r != Operand::IntLiteral) {
          fail("right operand must be a list of patterns or a single pattern");
        }
        return;
      case BinaryOp::Contains:
      case BinaryOp::Startswith:
        if (!stringy(l)) fail("left operand must be a string");
        if (r != Operand::String && r != Operand::StringLiteral && r != Operand::IntLiteral) {
          fail("right operand must be a single string");
        }
        return;
      case BinaryOp::Eq:
      case BinaryOp::Ne:
        if (!scalar(l) || !scalar(r)) fail("operands must be single values");
        if ((l == Operand::Int && r == Operand::String) ||
            (l == Operand::String && r == Operand::Int)) {
          fail("cannot compare a number with a string");
        }
        if ((l == Operand::Int && r == Operand::StringLiteral) ||
            (l == Operand::StringLiteral && r == Operand::Int)) {
          fail("numeric attribute compared with a non-numeric value");
        }
        return;
      case BinaryOp::Lt:
      case BinaryOp::Le:
      case BinaryOp::Gt:
      case BinaryOp::Ge:
        if (!numeric(l) || !numeric(r)) fail("operands must be numeric");
        return;
    }
  }

  void collect_refs(const Condition& c, std::vector<const Condition*>& out) const {
    if (c.kind == CondKind::MacroRef) out.push_back(&c);
    for (const auto& child : c.children) collect_refs(child, out);
  }

  void check_cycles(const MacroDef& start) {
    std::vector<std::string> path;
    visit(start, path);
  }

  void visit(const MacroDef& m, std::vector<std::string>& path) {
    int& color = color_[m.name];
    if (color == 2) return;
    if (color == 1) {
      std::string chain;
      auto it = std::find(path.begin(), path.end(), m.name);
      for (; it != path.end(); ++it) chain += *it + " -> ";
      throw PolicyError(m.loc, "macro cycle: " + chain + m.name);
    }
    color = 1;
    path.push_back(m.name);
    std::vector<const Condition*> refs;
    collect_refs(m.body, refs);
    for (const Condition* ref : refs) visit(*p_.find_macro(ref->macro), path);
    path.pop_back();
    color_[m.name] = 2;
  }

  const Policy& p_;
  std::map<std::string, int> color_;  // 0 unvisited, 1 on stack, 2 done
};

}  // namespace

Policy parse_policies(std::span<const std::pair<std::string, std::string>> sources) {
  std::vector<std::vector<Statement>> files;
  files.reserve(sources.size());
  for (const auto& [source, text] : sources) {
    files.push_back(split_statements(detail::tokenize(text, source)));
  }

  // Collect names first so that references may precede definitions.
  Names names;
  for (const auto& statements : files) {
    for (const auto& s : statements) {
      if (s.size() < 3 || s[1].kind != Tok::Define) continue;
      const Token& name = s[0];
      if (name.kind != Tok::Word || !is_identifier(name.text)) {
        throw PolicyError(name.loc, "invalid name " + show_token(name));
      }
      if (is_keyword(name.text)) {
        throw PolicyError(name.loc, "'" + name.text + "' is a reserved word");
      }
      const NameKind kind = is_value_list(s, 2) ? NameKind::List : NameKind::Macro;
      auto [it, inserted] = names.try_emplace(name.text, Definition{kind, name.loc});
      if (!inserted) {
        throw PolicyError(name.loc, "'" + name.text + "' is already defined at " +
                                        to_string(it->second.loc));
      }
    }
  }

  Policy policy;
  std::size_t rule_number = 0;
  for (const auto& statements : files) {
    for (const auto& s : statements) {
      StatementParser parser(s, names);
      if (s.size() > 1 && s[1].kind == Tok::Define) {
        if (s.size() == 2 || s[2].kind == Tok::Newline) {
          throw PolicyError(s[1].loc, "missing definition after ':='");
        }
        if (names.at(s[0].text).kind == NameKind::List) {
          policy.lists.push_back(parser.list_def());
        } else {
          policy.macros.push_back(parser.macro_def());
        }
      } else {
        policy.rules.push_back(parser.rule(++rule_number));
      }
    }
  }

  std::map<std::string, Location> rule_names;
  for (const auto& r : policy.rules) {
    auto [it, inserted] = rule_names.try_emplace(r.name, r.loc);
    if (!inserted) {
      throw PolicyError(r.loc, "rule '" + r.name + "' is already defined at " +
                                   to_string(it->second));
    }
  }

  Checker(policy).run();
  return policy;
}

Policy parse_policy(std::string_view text, std::string_view source) {
  const std::pair<std::string, std::string> one{std::string(source), std::string(text)};
  return parse_policies(std::span(&one, 1));
}

Policy load_policy_files(std::span<const std::string> paths) {
  std::vector<std::pair<std::string, std::string>> sources;
  for (const auto& path : paths) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open policy file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    if (in.bad()) throw IoError("cannot read policy file '" + path + "'");
    sources.emplace_back(path, text.str());
  }
  return parse_policies(sources);
}

}  // namespace sysflow::policy
