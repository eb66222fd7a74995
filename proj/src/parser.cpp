#include "zar/parser.hpp"

#include "zar/error.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <unordered_map>

namespace zar {

namespace {

enum class Tok {
  kEnd,
  kIdent,
  kInt,
  kRat,
  kDecimal,
  kArrow,
  kSemi,
  kLBrace,
  kRBrace,
  kLBracket,
  kRBracket,
  kLParen,
  kRParen,
  kComma,
  kPlus,
  kMinus,
  kStar,
  kSlash,
  kPercent,
  kEq,
  kNe,
  kLt,
  kLe,
  kGt,
  kGe,
  kAnd,
  kOr,
  kNot,
};

struct Token {
  Tok kind = Tok::kEnd;
  std::string text;
  int line = 1;
  int column = 1;
};

const std::unordered_map<std::string_view, Tok>& keyword_ops() {
  static const std::unordered_map<std::string_view, Tok> m = {
      {"and", Tok::kAnd}, {"or", Tok::kOr}, {"not", Tok::kNot}, {"mod", Tok::kPercent}};
  return m;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.line = line_;
      t.column = col_;
      if (pos_ >= src_.size()) {
        out.push_back(t);
        return out;
      }
      lex_one(t);
      out.push_back(std::move(t));
    }
  }

 private:
  [[noreturn]] void fail(const std::string& msg) {
    throw SyntaxError(ErrorKind::kSyntaxError, line_, col_, msg);
  }

  char peek(std::size_t off = 0) const {
    return pos_ + off < src_.size() ? src_[pos_ + off] : '\0';
  }

  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i) {
      if (src_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else if ((static_cast<unsigned char>(src_[pos_]) & 0xC0) != 0x80) {
        ++col_;
      }
      ++pos_;
    }
  }

  bool starts_with(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

  void skip_space() {
    for (;;) {
      char c = peek();
      if (c == '#') {
        while (pos_ < src_.size() && peek() != '\n') advance();
      } else if (c != '\0' && std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  std::string digits() {
    std::string s;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      s += peek();
      advance();
    }
    return s;
  }

  void lex_one(Token& t) {
    char c = peek();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') {
        t.text += peek();
        advance();
      }
      auto it = keyword_ops().find(t.text);
      t.kind = it == keyword_ops().end() ? Tok::kIdent : it->second;
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      t.text = digits();
      t.kind = Tok::kInt;
      if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
        advance();
        t.text += "." + digits();
        t.kind = Tok::kDecimal;
      } else if (peek() == '/' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
        // `3/4` written without spaces is a rational literal.
        advance();
        t.text += "/" + digits();
        t.kind = Tok::kRat;
      }
      return;
    }
    static const std::pair<std::string_view, Tok> kSymbols[] = {
        {"<-", Tok::kArrow}, {"\xE2\x86\x90", Tok::kArrow}, {"<=", Tok::kLe},
        {"\xE2\x89\xA4", Tok::kLe}, {">=", Tok::kGe}, {"\xE2\x89\xA5", Tok::kGe},
        {"!=", Tok::kNe}, {"\xE2\x89\xA0", Tok::kNe}, {"==", Tok::kEq},
        {"&&", Tok::kAnd}, {"\xE2\x88\xA7", Tok::kAnd}, {"||", Tok::kOr},
        {"\xE2\x88\xA8", Tok::kOr}, {"\xC2\xAC", Tok::kNot}, {"\xC3\x97", Tok::kStar},
        {"\xC3\xB7", Tok::kSlash}, {"=", Tok::kEq}, {"<", Tok::kLt}, {">", Tok::kGt},
        {"!", Tok::kNot}, {";", Tok::kSemi}, {"{", Tok::kLBrace}, {"}", Tok::kRBrace},
        {"[", Tok::kLBracket}, {"]", Tok::kRBracket}, {"(", Tok::kLParen},
        {")", Tok::kRParen}, {",", Tok::kComma}, {"+", Tok::kPlus}, {"-", Tok::kMinus},
        {"*", Tok::kStar}, {"/", Tok::kSlash}, {"%", Tok::kPercent},
    };
    for (const auto& [s, kind] : kSymbols) {
      if (starts_with(s)) {
        t.text = std::string(s);
        t.kind = kind;
        advance(s.size());
        return;
      }
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

Rational decimal_to_rational(const std::string& text) {
  auto dot = text.find('.');
  std::string digits = text.substr(0, dot) + text.substr(dot + 1);
  // A leading zero would make cpp_int read the digits as octal.
  digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
  Integer den = 1;
  for (std::size_t i = dot + 1; i < text.size(); ++i) den *= 10;
  return Rational(Integer(digits), den);
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(Lexer(text).run()) {}

  Command program_eof() {
    Command c = program();
    expect(Tok::kEnd, "end of input");
    return c;
  }

  Expr expr_eof() {
    Expr e = expr();
    expect(Tok::kEnd, "end of input");
    return e;
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  bool at(Tok k) const { return cur().kind == k; }
  bool at_word(std::string_view w) const { return at(Tok::kIdent) && cur().text == w; }

  [[noreturn]] void fail(const std::string& msg, ErrorKind kind = ErrorKind::kSyntaxError) const {
    throw SyntaxError(kind, cur().line, cur().column, msg);
  }

  Token take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  bool accept(Tok k) {
    if (!at(k)) return false;
    take();
    return true;
  }

  void expect(Tok k, std::string_view what) {
    if (!accept(k)) {
      fail("expected " + std::string(what) + ", found " +
           (at(Tok::kEnd) ? std::string("end of input") : "'" + cur().text + "'"));
    }
  }

  void expect_word(std::string_view w) {
    if (!at_word(w)) fail("expected '" + std::string(w) + "'");
    take();
  }

  static bool is_keyword(std::string_view w) {
    static const std::set<std::string_view> kWords = {
        "skip", "observe", "if", "else", "choice", "uniform", "as",
        "while", "flip", "true", "false", "then", "do", "end"};
    return kWords.count(w) > 0;
  }

  Symbol ident() {
    if (!at(Tok::kIdent) || is_keyword(cur().text)) fail("expected identifier");
    return Symbol(take().text);
  }

  Command program() {
    std::vector<Command> stmts;
    stmts.push_back(statement());
    while (accept(Tok::kSemi)) {
      if (at(Tok::kRBrace) || at(Tok::kEnd)) break;
      stmts.push_back(statement());
    }
    Command out = stmts.back();
    for (auto it = stmts.rbegin() + 1; it != stmts.rend(); ++it) out = Command::seq(*it, out);
    return out;
  }

  Command block() {
    expect(Tok::kLBrace, "'{'");
    Command c = program();
    expect(Tok::kRBrace, "'}'");
    return c;
  }

  Command statement() {
    if (at(Tok::kLBrace)) {
      Command left = block();
      if (!accept(Tok::kLBracket)) return left;
      Expr p = expr();
      expect(Tok::kRBracket, "']'");
      Command right = block();
      return Command::choice(std::move(p), std::move(left), std::move(right));
    }
    if (!at(Tok::kIdent)) fail("expected a statement");
    const std::string word = cur().text;
    if (word == "skip") {
      take();
      return Command::skip();
    }
    if (word == "observe") {
      take();
      return Command::observe(expr());
    }
    if (word == "if") {
      take();
      Expr g = expr();
      Command then_branch = block();
      Command else_branch = Command::skip();
      if (at_word("else")) {
        take();
        else_branch = at_word("if") ? statement() : block();
      }
      return Command::ite(std::move(g), std::move(then_branch), std::move(else_branch));
    }
    if (word == "choice") {
      take();
      Expr p = expr();
      Command left = block();
      Command right = block();
      return Command::choice(std::move(p), std::move(left), std::move(right));
    }
    if (word == "uniform") {
      take();
      Expr n = expr();
      expect_word("as");
      Symbol x = ident();
      Command body = block();
      return Command::uniform(std::move(n), x, std::move(body));
    }
    if (word == "while") {
      take();
      Expr g = expr();
      return Command::loop(std::move(g), block());
    }
    if (word == "flip") {
      take();
      Symbol x = ident();
      Expr p = expr();
      return Command::choice(std::move(p), Command::assign(x, Expr::boolean(true)),
                             Command::assign(x, Expr::boolean(false)));
    }
    Symbol x = ident();
    expect(Tok::kArrow, "'<-'");
    return Command::assign(x, expr());
  }

  // Precedence, loosest first: or, and, not, comparison, + -, * / mod, unary -.
  Expr expr() { return disjunction(); }

  Expr disjunction() {
    Expr e = conjunction();
    while (accept(Tok::kOr)) e = e || conjunction();
    return e;
  }

  Expr conjunction() {
    Expr e = negation();
    while (accept(Tok::kAnd)) e = e && negation();
    return e;
  }

  Expr negation() {
    if (accept(Tok::kNot)) return !negation();
    return comparison();
  }

  Expr comparison() {
    Expr a = additive();
    switch (cur().kind) {
      case Tok::kEq: take(); return eq(a, additive());
      case Tok::kNe: take(); return !eq(a, additive());
      case Tok::kLt: take(); return lt(a, additive());
      case Tok::kLe: take(); return le(a, additive());
      case Tok::kGt: take(); return lt(additive(), a);
      case Tok::kGe: take(); return le(additive(), a);
      default: return a;
    }
  }

  Expr additive() {
    Expr e = multiplicative();
    for (;;) {
      if (accept(Tok::kPlus)) {
        e = e + multiplicative();
      } else if (accept(Tok::kMinus)) {
        e = e - multiplicative();
      } else {
        return e;
      }
    }
  }

  Expr multiplicative() {
    Expr e = unary();
    for (;;) {
      if (accept(Tok::kStar)) {
        e = e * unary();
      } else if (accept(Tok::kSlash)) {
        e = e / unary();
      } else if (accept(Tok::kPercent)) {
        e = e % unary();
      } else {
        return e;
      }
    }
  }

  Expr unary() {
    if (!accept(Tok::kMinus)) return atom();
    Expr e = unary();
    if (e.op() == Op::kConst && e.constant_value().is_int()) {
      return Expr::constant(Value::integer(-e.constant_value().as_int()));
    }
    if (e.op() == Op::kConst && e.constant_value().is_rat()) {
      return Expr::rational(-e.constant_value().as_rat());
    }
    return Expr::integer(0) - e;
  }

  Expr atom() {
    const Token t = cur();
    switch (t.kind) {
      case Tok::kInt: take(); return Expr::constant(Value::integer(Integer(t.text)));
      case Tok::kRat: {
        take();
        auto slash = t.text.find('/');
        Integer den(t.text.substr(slash + 1));
        if (den == 0) {
          throw SyntaxError(ErrorKind::kSyntaxError, t.line, t.column, "zero denominator in literal");
        }
        return Expr::rational(Rational(Integer(t.text.substr(0, slash)), den));
      }
      case Tok::kDecimal: take(); return Expr::rational(decimal_to_rational(t.text));
      case Tok::kLParen: {
        take();
        Expr e = expr();
        expect(Tok::kRParen, "')'");
        return e;
      }
      case Tok::kIdent: break;
      default: fail("expected an expression");
    }
    if (t.text == "true" || t.text == "false") {
      take();
      return Expr::boolean(t.text == "true");
    }
    static const std::unordered_map<std::string_view, Op> kBuiltins = {
        {"floor", Op::kFloor}, {"abs", Op::kAbs}, {"is_prime", Op::kIsPrime}, {"is_even", Op::kIsEven}};
    auto builtin = kBuiltins.find(t.text);
    if (builtin != kBuiltins.end()) {
      take();
      if (!at(Tok::kLParen)) fail(t.text + " expects one argument", ErrorKind::kArityError);
      take();
      std::vector<Expr> args;
      if (!at(Tok::kRParen)) {
        args.push_back(expr());
        while (accept(Tok::kComma)) args.push_back(expr());
      }
      if (args.size() != 1) {
        throw SyntaxError(ErrorKind::kArityError, t.line, t.column,
                          t.text + " expects 1 argument, got " + std::to_string(args.size()));
      }
      expect(Tok::kRParen, "')'");
      return Expr::unary(builtin->second, args[0]);
    }
    Symbol x = ident();
    if (at(Tok::kLParen)) {
      throw SyntaxError(ErrorKind::kSyntaxError, t.line, t.column, "unknown function '" + t.text + "'");
    }
    return Expr::var(x);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// Printing precedence levels; larger binds tighter.
int level(const Expr& e) {
  switch (e.op()) {
    case Op::kOr: return 1;
    case Op::kAnd: return 2;
    case Op::kNot: return 3;
    case Op::kEq:
    case Op::kLt:
    case Op::kLe: return 4;
    case Op::kAdd:
    case Op::kSub: return 5;
    case Op::kMul:
    case Op::kDiv:
    case Op::kMod: return 6;
    default: return 7;
  }
}

void print_expr(const Expr& e, std::ostream& os);

void print_at(const Expr& e, int min_level, std::ostream& os) {
  if (level(e) < min_level) {
    os << '(';
    print_expr(e, os);
    os << ')';
  } else {
    print_expr(e, os);
  }
}

void print_expr(const Expr& e, std::ostream& os) {
  switch (e.op()) {
    case Op::kConst: os << to_string(e.constant_value()); return;
    case Op::kVar: os << e.variable().name(); return;
    case Op::kFloor: os << "floor("; print_expr(e.lhs(), os); os << ')'; return;
    case Op::kAbs: os << "abs("; print_expr(e.lhs(), os); os << ')'; return;
    case Op::kIsPrime: os << "is_prime("; print_expr(e.lhs(), os); os << ')'; return;
    case Op::kIsEven: os << "is_even("; print_expr(e.lhs(), os); os << ')'; return;
    case Op::kNot: os << "not "; print_at(e.lhs(), 3, os); return;
    default: break;
  }
  static const std::unordered_map<Op, std::string_view> kNames = {
      {Op::kAdd, "+"}, {Op::kSub, "-"}, {Op::kMul, "*"}, {Op::kDiv, "/"}, {Op::kMod, "mod"},
      {Op::kEq, "="}, {Op::kLt, "<"}, {Op::kLe, "<="}, {Op::kAnd, "and"}, {Op::kOr, "or"}};
  const int l = level(e);
  // Comparisons do not chain, so both sides need a tighter operand.
  print_at(e.lhs(), l == 4 ? l + 1 : l, os);
  os << ' ' << kNames.at(e.op()) << ' ';
  print_at(e.rhs(), l + 1, os);
}

bool is_flip(const Command& c) {
  if (c.kind() != CommandKind::kChoice) return false;
  const Command& l = c.first();
  const Command& r = c.second();
  return l.kind() == CommandKind::kAssign && r.kind() == CommandKind::kAssign &&
         l.variable() == r.variable() && l.expr() == Expr::boolean(true) &&
         r.expr() == Expr::boolean(false);
}

class Printer {
 public:
  std::string run(const Command& c) {
    program(c, 0);
    return os_.str();
  }

 private:
  void indent(int depth) {
    for (int i = 0; i < depth; ++i) os_ << "  ";
  }

  void program(const Command& c, int depth) {
    const Command* cur = &c;
    while (cur->kind() == CommandKind::kSeq) {
      indent(depth);
      if (cur->first().kind() == CommandKind::kSeq) {
        // Left-nested sequence needs an explicit block to round-trip.
        os_ << "{\n";
        program(cur->first(), depth + 1);
        os_ << '\n';
        indent(depth);
        os_ << '}';
      } else {
        statement(cur->first(), depth);
      }
      os_ << ";\n";
      cur = &cur->second();
    }
    indent(depth);
    statement(*cur, depth);
  }

  void block(const Command& c, int depth) {
    os_ << "{\n";
    program(c, depth + 1);
    os_ << '\n';
    indent(depth);
    os_ << '}';
  }

  void statement(const Command& c, int depth) {
    switch (c.kind()) {
      case CommandKind::kSkip: os_ << "skip"; return;
      case CommandKind::kAssign:
        os_ << c.variable().name() << " <- ";
        print_expr(c.expr(), os_);
        return;
      case CommandKind::kObserve:
        os_ << "observe ";
        print_expr(c.expr(), os_);
        return;
      case CommandKind::kIte:
        os_ << "if ";
        print_expr(c.expr(), os_);
        os_ << ' ';
        block(c.first(), depth);
        os_ << " else ";
        block(c.second(), depth);
        return;
      case CommandKind::kChoice:
        if (is_flip(c)) {
          os_ << "flip " << c.first().variable().name() << ' ';
          print_expr(c.expr(), os_);
          return;
        }
        os_ << "choice ";
        print_expr(c.expr(), os_);
        os_ << ' ';
        block(c.first(), depth);
        os_ << ' ';
        block(c.second(), depth);
        return;
      case CommandKind::kUniform:
        os_ << "uniform ";
        print_expr(c.expr(), os_);
        os_ << " as " << c.variable().name() << ' ';
        block(c.body(), depth);
        return;
      case CommandKind::kWhile:
        os_ << "while ";
        print_expr(c.expr(), os_);
        os_ << ' ';
        block(c.body(), depth);
        return;
      case CommandKind::kSeq:
        block(c, depth);
        return;
    }
  }

  std::ostringstream os_;
};

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

Value constant_value(std::string_view text) { return eval_expr(parse_expr(text), State{}); }

}  // namespace

Command parse_program(std::string_view text) { return Parser(text).program_eof(); }

Expr parse_expr(std::string_view text) { return Parser(text).expr_eof(); }

std::string pretty_print(const Command& c) { return Printer().run(c); }

std::string pretty_print(const Expr& e) {
  std::ostringstream os;
  print_expr(e, os);
  return os.str();
}

std::pair<Symbol, Value> parse_binding(std::string_view text) {
  auto eq = text.find('=');
  if (eq == std::string_view::npos) {
    throw SyntaxError(ErrorKind::kSyntaxError, 1, 1, "expected name=value, got '" + std::string(text) + "'");
  }
  std::string name = trim(text.substr(0, eq));
  if (name.empty()) throw SyntaxError(ErrorKind::kSyntaxError, 1, 1, "missing parameter name");
  return {Symbol(name), constant_value(text.substr(eq + 1))};
}

SourceFile parse_source(std::string_view text) {
  SourceFile out;
  std::istringstream lines{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    std::string t = trim(line);
    try {
      if (t.rfind("#param", 0) == 0) {
        out.params.push_back(parse_binding(t.substr(6)));
      } else if (t.rfind("#out", 0) == 0) {
        out.out = Symbol(trim(t.substr(4)));
      }
    } catch (const SyntaxError& e) {
      throw SyntaxError(e.kind(), lineno, 1, std::string("bad pragma: ") + e.what());
    }
  }
  out.program = parse_program(text);
  return out;
}

State SourceFile::initial_state(const std::vector<std::pair<Symbol, Value>>& overrides) const {
  State s;
  for (const auto& [x, v] : params) s.set(x, v);
  for (const auto& [x, v] : overrides) s.set(x, v);
  return s;
}

}  // namespace zar
