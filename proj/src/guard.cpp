#include "fuzzyalign/guard.hpp"

#include <cctype>
#include <optional>

#include "fuzzyalign/error.hpp"
#include "fuzzyalign/model.hpp"

namespace fuzzyalign {

const char* to_string(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "!=";
    case CmpOp::Ge: return ">=";
    case CmpOp::Gt: return ">";
  }
  return "?";
}

CmpOp negate(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return CmpOp::Ge;
    case CmpOp::Le: return CmpOp::Gt;
    case CmpOp::Eq: return CmpOp::Ne;
    case CmpOp::Ne: return CmpOp::Eq;
    case CmpOp::Ge: return CmpOp::Lt;
    case CmpOp::Gt: return CmpOp::Le;
  }
  return op;
}

bool is_inequality(CmpOp op) { return op != CmpOp::Eq && op != CmpOp::Ne; }

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

template <typename T>
bool compare(const T& lhs, CmpOp op, const T& rhs) {
  switch (op) {
    case CmpOp::Lt: return lhs < rhs;
    case CmpOp::Le: return lhs <= rhs;
    case CmpOp::Eq: return lhs == rhs;
    case CmpOp::Ne: return lhs != rhs;
    case CmpOp::Ge: return lhs >= rhs;
    case CmpOp::Gt: return lhs > rhs;
  }
  return false;
}

}  // namespace

std::string Predicate::text() const {
  std::string lit = is_number(constant) ? format_number(std::get<double>(constant))
                                        : quote(std::get<std::string>(constant));
  return variable + (primed ? "'" : "") + " " + to_string(op) + " " + lit;
}

bool Predicate::holds(const Value& value) const {
  if (value.index() != constant.index()) return op == CmpOp::Ne;
  if (const auto* d = std::get_if<double>(&value)) return compare(*d, op, std::get<double>(constant));
  return compare(std::get<std::string>(value), op, std::get<std::string>(constant));
}

GuardExpr GuardExpr::make_atom(Predicate p) {
  GuardExpr g;
  g.kind = Kind::Atom;
  g.source = p.text();
  g.atom = std::move(p);
  return g;
}

GuardExpr GuardExpr::make_not(GuardExpr operand) {
  GuardExpr g;
  g.kind = Kind::Not;
  g.operands.push_back(std::move(operand));
  return g;
}

GuardExpr GuardExpr::make_binary(Kind kind, GuardExpr lhs, GuardExpr rhs) {
  GuardExpr g;
  g.kind = kind;
  g.operands.push_back(std::move(lhs));
  g.operands.push_back(std::move(rhs));
  return g;
}

namespace {

int precedence(GuardExpr::Kind k) {
  switch (k) {
    case GuardExpr::Kind::Or: return 1;
    case GuardExpr::Kind::And: return 2;
    default: return 3;
  }
}

std::string render(const GuardExpr& g, int parent_prec) {
  std::string s;
  switch (g.kind) {
    case GuardExpr::Kind::Atom: return g.atom.text();
    case GuardExpr::Kind::Not: return "NOT " + render(g.operands[0], 3);
    case GuardExpr::Kind::And:
      s = render(g.operands[0], 2) + " AND " + render(g.operands[1], 3);
      break;
    case GuardExpr::Kind::Or:
      s = render(g.operands[0], 1) + " OR " + render(g.operands[1], 2);
      break;
  }
  return precedence(g.kind) < parent_prec ? "(" + s + ")" : s;
}

void collect_atoms(const GuardExpr& g, std::vector<Predicate>& out) {
  if (g.kind == GuardExpr::Kind::Atom) {
    out.push_back(g.atom);
    return;
  }
  for (const auto& op : g.operands) collect_atoms(op, out);
}

}  // namespace

std::string GuardExpr::text() const { return render(*this, 0); }

std::vector<Predicate> GuardExpr::atoms() const {
  std::vector<Predicate> out;
  collect_atoms(*this, out);
  return out;
}

namespace {

struct Token {
  enum class Type { Ident, Prime, LParen, RParen, Cmp, Number, String, End };
  Type type = Type::End;
  std::string text;
  std::size_t column = 0;  // 1-based
  CmpOp op = CmpOp::Eq;
  double number = 0.0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      Token t;
      t.column = pos_ + 1;
      if (pos_ >= src_.size()) {
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
          ++pos_;
        t.type = Token::Type::Ident;
        t.text = std::string(src_.substr(start, pos_ - start));
      } else if (c == '\'') {
        ++pos_;
        t.type = Token::Type::Prime;
      } else if (c == '(') {
        ++pos_;
        t.type = Token::Type::LParen;
      } else if (c == ')') {
        ++pos_;
        t.type = Token::Type::RParen;
      } else if (c == '<' || c == '>' || c == '=' || c == '!') {
        t.type = Token::Type::Cmp;
        bool eq_next = pos_ + 1 < src_.size() && src_[pos_ + 1] == '=';
        if (c == '<') t.op = eq_next ? CmpOp::Le : CmpOp::Lt;
        if (c == '>') t.op = eq_next ? CmpOp::Ge : CmpOp::Gt;
        if (c == '=') t.op = CmpOp::Eq;  // '=' or '=='
        if (c == '!') {
          if (!eq_next) fail("expected '=' after '!'");
          t.op = CmpOp::Ne;
        }
        pos_ += eq_next ? 2 : 1;
      } else if (c == '"') {
        t.type = Token::Type::String;
        ++pos_;
        while (true) {
          if (pos_ >= src_.size()) fail("unterminated string literal");
          char d = src_[pos_++];
          if (d == '"') break;
          if (d == '\\') {
            if (pos_ >= src_.size()) fail("unterminated string literal");
            d = src_[pos_++];
          }
          t.text += d;
        }
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '+') {
        std::size_t start = pos_;
        ++pos_;
        while (pos_ < src_.size()) {
          char d = src_[pos_];
          bool exp_sign = (d == '+' || d == '-') && (src_[pos_ - 1] == 'e' || src_[pos_ - 1] == 'E');
          if (std::isdigit(static_cast<unsigned char>(d)) || d == '.' || d == 'e' || d == 'E' || exp_sign)
            ++pos_;
          else
            break;
        }
        t.text = std::string(src_.substr(start, pos_ - start));
        auto v = parse_decimal(t.text);
        if (!v) fail("malformed number '" + t.text + "'", start);
        t.type = Token::Type::Number;
        t.number = *v;
      } else {
        fail(std::string("unexpected character '") + c + "'");
      }
      out.push_back(std::move(t));
    }
  }

 private:
  [[noreturn]] void fail(const std::string& msg) { fail(msg, pos_); }
  [[noreturn]] void fail(const std::string& msg, std::size_t at) {
    throw Error(ErrorKind::Syntax, "guard syntax error at column " + std::to_string(at + 1) + ": " + msg);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

bool is_keyword(const Token& t, std::string_view kw) {
  return t.type == Token::Type::Ident && t.text == kw;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::span<const VariableDecl> vars)
      : tokens_(std::move(tokens)), vars_(vars) {}

  GuardExpr parse_all() {
    GuardExpr g = parse_or();
    expect_end();
    return g;
  }

  Predicate parse_single_atom() {
    Predicate p = parse_atom();
    expect_end();
    return p;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_++]; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::Syntax,
                "guard syntax error at column " + std::to_string(peek().column) + ": " + msg);
  }

  void expect_end() const {
    if (peek().type != Token::Type::End) fail("unexpected trailing input");
  }

  GuardExpr parse_or() {
    GuardExpr lhs = parse_and();
    while (is_keyword(peek(), "OR")) {
      next();
      lhs = GuardExpr::make_binary(GuardExpr::Kind::Or, std::move(lhs), parse_and());
    }
    return lhs;
  }

  GuardExpr parse_and() {
    GuardExpr lhs = parse_not();
    while (is_keyword(peek(), "AND")) {
      next();
      lhs = GuardExpr::make_binary(GuardExpr::Kind::And, std::move(lhs), parse_not());
    }
    return lhs;
  }

  GuardExpr parse_not() {
    if (is_keyword(peek(), "NOT")) {
      next();
      return GuardExpr::make_not(parse_not());
    }
    if (peek().type == Token::Type::LParen) {
      next();
      GuardExpr inner = parse_or();
      if (peek().type != Token::Type::RParen) fail("expected ')'");
      next();
      return inner;
    }
    return GuardExpr::make_atom(parse_atom());
  }

  Predicate parse_atom() {
    const Token& id = peek();
    if (id.type != Token::Type::Ident || is_keyword(id, "AND") || is_keyword(id, "OR") ||
        is_keyword(id, "NOT"))
      fail("expected a variable name");
    next();
    Predicate p;
    p.variable = id.text;
    if (peek().type == Token::Type::Prime) {
      next();
      p.primed = true;
    }
    if (peek().type != Token::Type::Cmp) fail("expected a comparison operator");
    p.op = next().op;
    const Token& lit = peek();
    if (lit.type == Token::Type::Number)
      p.constant = lit.number;
    else if (lit.type == Token::Type::String)
      p.constant = lit.text;
    else
      fail("expected a number or a quoted string");
    next();
    check(p);
    return p;
  }

  void check(const Predicate& p) const {
    const VariableDecl* decl = nullptr;
    for (const auto& v : vars_)
      if (v.name == p.variable) decl = &v;
    if (decl == nullptr) throw Error(ErrorKind::Semantic, "unknown variable '" + p.variable + "' in guard");
    bool numeric_var = decl->kind != VarKind::String;
    if (numeric_var != is_number(p.constant))
      throw Error(ErrorKind::TypeMismatch, "type mismatch in '" + p.text() + "': variable '" +
                                               p.variable + "' is " + (numeric_var ? "numeric" : "a string"));
    if (!numeric_var && is_inequality(p.op))
      throw Error(ErrorKind::TypeMismatch,
                  "type mismatch in '" + p.text() + "': strings only support = and !=");
    if (numeric_var && decl->interval) {
      double c = std::get<double>(p.constant);
      if (c < decl->interval->first || c > decl->interval->second)
        throw Error(ErrorKind::Semantic,
                    "constant in '" + p.text() + "' lies outside the domain of '" + p.variable + "'");
    }
    if (!numeric_var && !decl->admits(p.constant))
      throw Error(ErrorKind::Semantic,
                  "constant in '" + p.text() + "' is not in the domain of '" + p.variable + "'");
  }

  std::vector<Token> tokens_;
  std::span<const VariableDecl> vars_;
  std::size_t pos_ = 0;
};

}  // namespace

GuardExpr parse_guard(std::string_view text, std::span<const VariableDecl> vars) {
  return Parser(Lexer(text).run(), vars).parse_all();
}

Predicate parse_predicate(std::string_view text, std::span<const VariableDecl> vars) {
  return Parser(Lexer(text).run(), vars).parse_single_atom();
}

bool eval_guard(const GuardExpr& g, const ValueLookup& lookup) {
  switch (g.kind) {
    case GuardExpr::Kind::Atom: {
      const Value* v = lookup(g.atom);
      if (v == nullptr)
        throw Error(ErrorKind::UndefinedVariable,
                    "variable '" + g.atom.variable + "' is undefined when evaluating '" + g.atom.text() + "'");
      return g.atom.holds(*v);
    }
    case GuardExpr::Kind::Not: return !eval_guard(g.operands[0], lookup);
    case GuardExpr::Kind::And: return eval_guard(g.operands[0], lookup) && eval_guard(g.operands[1], lookup);
    case GuardExpr::Kind::Or: return eval_guard(g.operands[0], lookup) || eval_guard(g.operands[1], lookup);
  }
  return false;
}

bool eval_guard(const GuardExpr& g, const std::map<std::string, Value>& values) {
  return eval_guard(g, [&](const Predicate& p) -> const Value* {
    auto it = values.find(p.variable);
    return it == values.end() ? nullptr : &it->second;
  });
}

namespace {

GuardExpr nnf(const GuardExpr& g, bool negated) {
  using K = GuardExpr::Kind;
  switch (g.kind) {
    case K::Atom: {
      if (!negated) return g;
      GuardExpr leaf = g;
      leaf.atom.op = negate(g.atom.op);
      leaf.source = leaf.atom.text();  // an MF on the positive form does not apply
      return leaf;
    }
    case K::Not: return nnf(g.operands[0], !negated);
    case K::And:
    case K::Or: {
      K kind = g.kind;
      if (negated) kind = kind == K::And ? K::Or : K::And;
      return GuardExpr::make_binary(kind, nnf(g.operands[0], negated), nnf(g.operands[1], negated));
    }
  }
  return g;
}

}  // namespace

GuardExpr to_nnf(const GuardExpr& g) { return nnf(g, false); }

}  // namespace fuzzyalign
