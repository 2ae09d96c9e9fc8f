#include <cctype>
#include <optional>
#include <unordered_set>

#include "sbck/syntax.hpp"

namespace sbck {

namespace {

enum class Tok { Ident, One, Rec, Dot, Plus, OPlus, Bang, Caret, LParen, RParen, End };

std::string_view describe(Tok t) {
  switch (t) {
    case Tok::Ident: return "name";
    case Tok::One: return "'1'";
    case Tok::Rec: return "'rec'";
    case Tok::Dot: return "'.'";
    case Tok::Plus: return "'+'";
    case Tok::OPlus: return "'(+)'";
    case Tok::Bang: return "'!'";
    case Tok::Caret: return "'^'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::End: return "end of input";
  }
  return "token";
}

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t line = 1;
  std::size_t col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    std::size_t l = line;
    std::size_t cl = col;
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      std::string word(src.substr(i, j - i));
      out.push_back({word == "rec" ? Tok::Rec : Tok::Ident, word, l, cl});
      advance(j - i);
      continue;
    }
    if (src.substr(i, 3) == "(+)") {
      out.push_back({Tok::OPlus, "(+)", l, cl});
      advance(3);
      continue;
    }
    Tok kind;
    switch (c) {
      case '1': kind = Tok::One; break;
      case '.': kind = Tok::Dot; break;
      case '+': kind = Tok::Plus; break;
      case '!': kind = Tok::Bang; break;
      case '^': kind = Tok::Caret; break;
      case '(': kind = Tok::LParen; break;
      case ')': kind = Tok::RParen; break;
      default: {
        std::string shown = static_cast<unsigned char>(c) < 0x80 && std::isprint(static_cast<unsigned char>(c))
                                ? std::string(1, c)
                                : "byte 0x" + std::to_string(static_cast<unsigned char>(c));
        throw SyntaxError(ErrorKind::Lexical, "unexpected character '" + shown + "'", l, cl);
      }
    }
    if (kind == Tok::One && i + 1 < src.size() &&
        (std::isalnum(static_cast<unsigned char>(src[i + 1])) || src[i + 1] == '_')) {
      throw SyntaxError(ErrorKind::Lexical, "malformed token starting with '1'", l, cl);
    }
    out.push_back({kind, std::string(1, c), l, cl});
    advance(1);
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

// Top: a full behaviour, where sums may appear unparenthesised.
// Continuation: what may follow `name.`; it never extends over `+`/`(+)`.
enum class Level { Top, Continuation };

class Parser {
public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Behaviour parse_all() {
    Behaviour b = behaviour(Level::Top);
    if (peek().kind != Tok::End) unexpected(peek());
    return b;
  }

private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t at = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[at];
  }
  const Token& take() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  const Token& expect(Tok kind) {
    if (peek().kind != kind) {
      const Token& t = peek();
      throw SyntaxError(ErrorKind::Syntax,
                        "expected " + std::string(describe(kind)) + " but found " + found(t), t.line, t.column);
    }
    return take();
  }

  static std::string found(const Token& t) {
    if (t.kind == Tok::Ident) return "'" + t.text + "'";
    return std::string(describe(t.kind));
  }

  [[noreturn]] static void unexpected(const Token& t) {
    throw SyntaxError(ErrorKind::Syntax, "unexpected " + found(t), t.line, t.column);
  }

  std::optional<std::uint32_t> lookup(const std::string& name) const {
    for (std::size_t k = scope_.size(); k-- > 0;) {
      if (scope_[k] == name) return static_cast<std::uint32_t>(k);
    }
    return std::nullopt;
  }

  bool at_variable() const {
    return peek().kind == Tok::Ident && peek(1).kind != Tok::Dot && lookup(peek().text).has_value();
  }

  bool at_prefix() const { return peek().kind == Tok::Bang || (peek().kind == Tok::Ident && !at_variable()); }

  Behaviour behaviour(Level level) {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::One:
        take();
        return Behaviour::success();
      case Tok::Rec:
        return recursion(level);
      case Tok::Caret:
        return checkpointed(level);
      case Tok::LParen: {
        take();
        Behaviour inner = behaviour(Level::Top);
        expect(Tok::RParen);
        return inner;
      }
      case Tok::Ident:
      case Tok::Bang:
        if (at_variable()) return variable();
        return level == Level::Top ? sum() : singleton();
      default:
        unexpected(t);
    }
  }

  Behaviour recursion(Level level) {
    take();
    const Token& name = expect(Tok::Ident);
    std::string hint = name.text;
    expect(Tok::Dot);
    const Token& body_start = peek();
    scope_.push_back(hint);
    Behaviour body = behaviour(level);
    scope_.pop_back();
    if (body.kind() == Kind::Var) {
      throw SyntaxError(ErrorKind::UnguardedRecursion, "the body of 'rec " + hint + "' is a variable",
                        body_start.line, body_start.column);
    }
    return Behaviour::rec(std::move(hint), std::move(body));
  }

  Behaviour variable() {
    const Token& t = take();
    std::uint32_t binder = *lookup(t.text);
    if (binder >= guard_from_) {
      throw SyntaxError(ErrorKind::UnguardedRecursion,
                        "variable '" + t.text + "' is not guarded by an action prefix", t.line, t.column);
    }
    return Behaviour::var(static_cast<std::uint32_t>(scope_.size()) - 1 - binder);
  }

  Behaviour checkpointed(Level level) {
    const Token& caret = take();
    const Token& t = peek();
    Behaviour target;
    if (t.kind == Tok::LParen) {
      take();
      target = behaviour(Level::Top);
      expect(Tok::RParen);
    } else if (at_prefix()) {
      target = level == Level::Top ? sum() : singleton();
    } else {
      throw SyntaxError(ErrorKind::CheckpointOnNonChoice, "'^' must precede a choice, found " + found(t), t.line,
                        t.column);
    }
    if (!target.is_choice() || target.checkpointed()) {
      throw SyntaxError(ErrorKind::CheckpointOnNonChoice,
                        target.is_choice() ? "choice is already checkpointed" : "'^' must precede a choice",
                        caret.line, caret.column);
    }
    return target.with_checkpoint(true);
  }

  struct Prefix {
    bool output;
    Branch branch;
    std::size_t line;
    std::size_t column;
  };

  Prefix prefix() {
    const Token& start = peek();
    bool output = false;
    if (peek().kind == Tok::Bang) {
      take();
      output = true;
    }
    if (peek().kind != Tok::Ident) {
      const Token& t = peek();
      throw SyntaxError(ErrorKind::Syntax, "expected a name but found " + found(t), t.line, t.column);
    }
    if (!output && at_variable()) {
      const Token& t = peek();
      throw SyntaxError(ErrorKind::Syntax, "variable '" + t.text + "' cannot be a branch of a choice", t.line,
                        t.column);
    }
    std::string name = take().text;
    Behaviour next;
    if (peek().kind == Tok::Dot) {
      take();
      std::uint32_t saved = guard_from_;
      guard_from_ = static_cast<std::uint32_t>(scope_.size());
      next = behaviour(Level::Continuation);
      guard_from_ = saved;
    }
    return {output, {std::move(name), std::move(next)}, start.line, start.column};
  }

  Behaviour singleton() {
    Prefix p = prefix();
    std::vector<Branch> branches;
    branches.push_back(std::move(p.branch));
    return Behaviour::choice(p.output ? Kind::Internal : Kind::External, std::move(branches), false);
  }

  Behaviour sum() {
    std::vector<Prefix> parts;
    parts.push_back(prefix());
    std::optional<Tok> op;
    while (peek().kind == Tok::Plus || peek().kind == Tok::OPlus) {
      const Token& t = peek();
      if (op && *op != t.kind) {
        throw SyntaxError(ErrorKind::MixedChoice, "'+' and '(+)' cannot be mixed in one choice", t.line, t.column);
      }
      op = t.kind;
      take();
      parts.push_back(prefix());
    }
    bool output = op ? *op == Tok::OPlus : parts.front().output;
    std::unordered_set<std::string> seen;
    std::vector<Branch> branches;
    for (auto& p : parts) {
      if (p.output != output) {
        throw SyntaxError(ErrorKind::MixedChoice,
                          output ? "input prefix in an internal choice" : "output prefix in an external choice",
                          p.line, p.column);
      }
      if (!seen.insert(p.branch.label).second) {
        throw SyntaxError(ErrorKind::DuplicateLabel, "label '" + p.branch.label + "' occurs twice in one choice",
                          p.line, p.column);
      }
      branches.push_back(std::move(p.branch));
    }
    return Behaviour::choice(output ? Kind::Internal : Kind::External, std::move(branches), false);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<std::string> scope_;
  // Binders at positions >= guard_from_ have no prefix between them and
  // the current position.
  std::uint32_t guard_from_ = 0;
};

}  // namespace

WellFormedBehaviour parse(std::string_view text) {
  Parser parser(lex(text));
  return WellFormedBehaviour::validate(parser.parse_all());
}

}  // namespace sbck
