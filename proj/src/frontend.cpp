#include "pinacolada/frontend.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace pinacolada::frontend {

std::string_view to_string(TokenKind kind) {
  switch (kind) {
  case TokenKind::Keyword: return "keyword";
  case TokenKind::Identifier: return "identifier";
  case TokenKind::IntegerLiteral: return "integer literal";
  case TokenKind::Operator: return "operator";
  case TokenKind::Punctuation: return "punctuation";
  }
  return "?";
}

namespace {

constexpr auto kKeywords = std::to_array<std::string_view>({
    "int", "bool", "void", "if", "else", "while", "assert", "assume",
    "return", "true", "false", "nondet_int", "nondet_bool",
});

// Longest match first.
constexpr auto kOperators = std::to_array<std::string_view>({
    "<<", ">>", "<=", ">=", "==", "!=", "&&", "||",
    "+",  "-",  "*",  "/",  "%",  "<",  ">",  "=",  "!",  "~",
    "&",  "|",  "^",
});

bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool is_digit(char c) { return c >= '0' && c <= '9'; }

} // namespace

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };

  while (i < src.size()) {
    const char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    const int tl = line;
    const int tc = col;
    if (is_ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && (is_ident_start(src[j]) || is_digit(src[j]))) ++j;
      std::string text(src.substr(i, j - i));
      const bool kw = std::find(kKeywords.begin(), kKeywords.end(), text) !=
                      kKeywords.end();
      out.push_back({kw ? TokenKind::Keyword : TokenKind::Identifier,
                     std::move(text), tl, tc});
      advance(j - i);
      continue;
    }
    if (is_digit(c)) {
      std::size_t j = i;
      while (j < src.size() && is_digit(src[j])) ++j;
      out.push_back({TokenKind::IntegerLiteral, std::string(src.substr(i, j - i)),
                     tl, tc});
      advance(j - i);
      continue;
    }
    if (c == '(' || c == ')' || c == '{' || c == '}' || c == ';' || c == ',') {
      out.push_back({TokenKind::Punctuation, std::string(1, c), tl, tc});
      advance(1);
      continue;
    }
    bool matched = false;
    for (auto op : kOperators) {
      if (src.substr(i, op.size()) == op) {
        out.push_back({TokenKind::Operator, std::string(op), tl, tc});
        advance(op.size());
        matched = true;
        break;
      }
    }
    if (matched) continue;

    std::ostringstream msg;
    const auto byte = static_cast<unsigned char>(c);
    if (byte >= 0x20 && byte < 0x7f) {
      msg << "unexpected character '" << c << "'";
    } else {
      msg << "unexpected byte 0x" << std::hex << static_cast<int>(byte);
    }
    throw LexError(tl, tc, msg.str());
  }
  return out;
}

int Ast::find_function(std::string_view name) const {
  for (std::size_t i = 0; i < functions.size(); ++i)
    if (functions[i].name == name) return static_cast<int>(i);
  return -1;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

constexpr int kMaxNesting = 200;

class Parser {
public:
  explicit Parser(const std::vector<Token> &tokens) : toks_(tokens) {
    eof_ = {TokenKind::Punctuation, "", 1, 1};
    if (!toks_.empty()) {
      const Token &last = toks_.back();
      eof_.line = last.line;
      eof_.column = last.column + static_cast<int>(last.text.size());
    }
  }

  Ast run() {
    Ast ast;
    while (!at_end()) {
      const Token &t = peek();
      Type type = parse_type(/*allow_void=*/true);
      const Token &name = expect_kind(TokenKind::Identifier, "identifier");
      if (check_punct("(")) {
        FunctionDecl fn;
        fn.name = name.text;
        fn.return_type = type;
        fn.line = t.line;
        fn.column = t.column;
        expect_punct("(");
        if (!check_punct(")")) {
          do {
            Param p;
            p.type = parse_type(false);
            p.name = expect_kind(TokenKind::Identifier, "parameter name").text;
            fn.params.push_back(std::move(p));
          } while (accept_punct(","));
        }
        expect_punct(")");
        fn.body = parse_block();
        ast.order.push_back({true, ast.functions.size()});
        ast.functions.push_back(std::move(fn));
      } else {
        if (type == Type::Void)
          throw ParseError(t.line, t.column, "'int' or 'bool'", "'void'");
        GlobalDecl g;
        g.name = name.text;
        g.type = type;
        g.line = t.line;
        g.column = t.column;
        if (accept_op("=")) g.init = parse_expr();
        expect_punct(";");
        ast.order.push_back({false, ast.globals.size()});
        ast.globals.push_back(std::move(g));
      }
    }
    return ast;
  }

private:
  const std::vector<Token> &toks_;
  Token eof_;
  std::size_t pos_ = 0;
  int depth_ = 0;

  struct DepthGuard {
    Parser &p;
    explicit DepthGuard(Parser &parser, const Token &at) : p(parser) {
      if (++p.depth_ > kMaxNesting)
        throw ParseError(at.line, at.column, "shallower nesting",
                         "nesting deeper than " + std::to_string(kMaxNesting));
    }
    ~DepthGuard() { --p.depth_; }
  };

  bool at_end() const { return pos_ >= toks_.size(); }
  const Token &peek() const { return at_end() ? eof_ : toks_[pos_]; }
  std::string describe_current() const {
    if (at_end()) return "end of input";
    return "'" + toks_[pos_].text + "'";
  }
  [[noreturn]] void fail(const std::string &expected) const {
    const Token &t = peek();
    throw ParseError(t.line, t.column, expected, describe_current());
  }

  bool check(TokenKind k, std::string_view text) const {
    return !at_end() && toks_[pos_].kind == k && toks_[pos_].text == text;
  }
  bool check_punct(std::string_view p) const { return check(TokenKind::Punctuation, p); }
  bool check_op(std::string_view p) const { return check(TokenKind::Operator, p); }
  bool check_kw(std::string_view p) const { return check(TokenKind::Keyword, p); }
  bool accept_punct(std::string_view p) {
    if (!check_punct(p)) return false;
    ++pos_;
    return true;
  }
  bool accept_op(std::string_view p) {
    if (!check_op(p)) return false;
    ++pos_;
    return true;
  }
  void expect_punct(std::string_view p) {
    if (!accept_punct(p)) fail("'" + std::string(p) + "'");
  }
  const Token &expect_kind(TokenKind k, const std::string &what) {
    if (at_end() || toks_[pos_].kind != k) fail(what);
    return toks_[pos_++];
  }


  Type parse_type(bool allow_void) {
    if (check_kw("int")) { ++pos_; return Type::Int; }
    if (check_kw("bool")) { ++pos_; return Type::Bool; }
    if (allow_void && check_kw("void")) { ++pos_; return Type::Void; }
    fail(allow_void ? "type" : "'int' or 'bool'");
  }

  std::vector<StmtPtr> parse_block() {
    DepthGuard guard(*this, peek());
    expect_punct("{");
    std::vector<StmtPtr> out;
    while (!check_punct("}")) {
      if (at_end()) fail("'}'");
      out.push_back(parse_stmt());
    }
    ++pos_;
    return out;
  }

  StmtPtr make_stmt(Stmt::Kind k, const Token &at) {
    auto s = std::make_unique<Stmt>();
    s->kind = k;
    s->line = at.line;
    s->column = at.column;
    return s;
  }

  StmtPtr parse_stmt() {
    DepthGuard guard(*this, peek());
    const Token t = peek();
    if (check_punct("{")) {
      auto s = make_stmt(Stmt::Kind::Block, t);
      s->body = parse_block();
      return s;
    }
    if (check_kw("int") || check_kw("bool")) {
      auto s = make_stmt(Stmt::Kind::VarDecl, t);
      s->decl_type = parse_type(false);
      s->name = expect_kind(TokenKind::Identifier, "identifier").text;
      if (accept_op("=")) s->expr = parse_expr();
      expect_punct(";");
      return s;
    }
    if (check_kw("void")) fail("statement");
    if (check_kw("if")) {
      ++pos_;
      auto s = make_stmt(Stmt::Kind::If, t);
      expect_punct("(");
      s->expr = parse_expr();
      expect_punct(")");
      s->body = parse_body();
      if (check_kw("else")) {
        ++pos_;
        s->has_else = true;
        s->else_body = parse_body();
      }
      return s;
    }
    if (check_kw("while")) {
      ++pos_;
      auto s = make_stmt(Stmt::Kind::While, t);
      expect_punct("(");
      s->expr = parse_expr();
      expect_punct(")");
      s->body = parse_body();
      return s;
    }
    if (check_kw("assert") || check_kw("assume")) {
      ++pos_;
      auto s = make_stmt(t.text == "assert" ? Stmt::Kind::Assert : Stmt::Kind::Assume, t);
      expect_punct("(");
      s->expr = parse_expr();
      expect_punct(")");
      expect_punct(";");
      return s;
    }
    if (check_kw("return")) {
      ++pos_;
      auto s = make_stmt(Stmt::Kind::Return, t);
      if (!check_punct(";")) s->expr = parse_expr();
      expect_punct(";");
      return s;
    }
    if (!at_end() && t.kind == TokenKind::Identifier) {
      if (pos_ + 1 < toks_.size() && toks_[pos_ + 1].kind == TokenKind::Operator &&
          toks_[pos_ + 1].text == "=") {
        auto s = make_stmt(Stmt::Kind::Assign, t);
        s->name = t.text;
        pos_ += 2;
        s->expr = parse_expr();
        expect_punct(";");
        return s;
      }
      if (pos_ + 1 < toks_.size() && toks_[pos_ + 1].kind == TokenKind::Punctuation &&
          toks_[pos_ + 1].text == "(") {
        auto s = make_stmt(Stmt::Kind::Call, t);
        s->expr = parse_primary();
        expect_punct(";");
        return s;
      }
      ++pos_;
      fail("'=' or '('");
    }
    fail("statement");
  }

  // A branch body is either a braced block or a single statement.
  std::vector<StmtPtr> parse_body() {
    if (check_punct("{")) return parse_block();
    std::vector<StmtPtr> out;
    out.push_back(parse_stmt());
    return out;
  }

  ExprPtr make_expr(Expr::Kind k, const Token &at) {
    auto e = std::make_unique<Expr>();
    e->kind = k;
    e->line = at.line;
    e->column = at.column;
    return e;
  }

  ExprPtr parse_expr() { return parse_binary(0); }

  struct Level {
    std::array<std::string_view, 4> ops;
    std::array<BinaryOp, 4> codes;
    int count;
  };

  static const std::array<Level, 10> &levels() {
    static const std::array<Level, 10> table = {{
        {{"||"}, {BinaryOp::Or}, 1},
        {{"&&"}, {BinaryOp::And}, 1},
        {{"|"}, {BinaryOp::BitOr}, 1},
        {{"^"}, {BinaryOp::BitXor}, 1},
        {{"&"}, {BinaryOp::BitAnd}, 1},
        {{"==", "!="}, {BinaryOp::Eq, BinaryOp::Ne}, 2},
        {{"<", "<=", ">", ">="}, {BinaryOp::Lt, BinaryOp::Le, BinaryOp::Gt, BinaryOp::Ge}, 4},
        {{"<<", ">>"}, {BinaryOp::Shl, BinaryOp::Shr}, 2},
        {{"+", "-"}, {BinaryOp::Add, BinaryOp::Sub}, 2},
        {{"*", "/", "%"}, {BinaryOp::Mul, BinaryOp::Div, BinaryOp::Mod}, 3},
    }};
    return table;
  }

  ExprPtr parse_binary(std::size_t level) {
    if (level == levels().size()) return parse_unary();
    DepthGuard guard(*this, peek());
    ExprPtr lhs = parse_binary(level + 1);
    const Level &lv = levels()[level];
    for (;;) {
      int found = -1;
      for (int k = 0; k < lv.count; ++k)
        if (check_op(lv.ops[k])) found = k;
      if (found < 0) return lhs;
      const Token op = toks_[pos_++];
      auto e = make_expr(Expr::Kind::Binary, op);
      e->binary_op = lv.codes[found];
      e->args.push_back(std::move(lhs));
      e->args.push_back(parse_binary(level + 1));
      lhs = std::move(e);
    }
  }

  ExprPtr parse_unary() {
    DepthGuard guard(*this, peek());
    const Token t = peek();
    if (check_op("-") || check_op("!") || check_op("~")) {
      ++pos_;
      auto e = make_expr(Expr::Kind::Unary, t);
      e->unary_op = t.text == "-" ? UnaryOp::Neg : t.text == "!" ? UnaryOp::Not : UnaryOp::BitNot;
      e->args.push_back(parse_unary());
      return e;
    }
    return parse_primary();
  }

  ExprPtr parse_primary() {
    const Token t = peek();
    if (at_end()) fail("expression");
    if (t.kind == TokenKind::IntegerLiteral) {
      ++pos_;
      auto e = make_expr(Expr::Kind::IntLit, t);
      std::uint64_t v = 0;
      auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
      if (ec != std::errc{} || ptr != t.text.data() + t.text.size())
        throw ParseError(t.line, t.column, "integer literal fitting in 64 bits",
                         "'" + t.text + "'");
      e->value = v;
      return e;
    }
    if (check_kw("true") || check_kw("false")) {
      ++pos_;
      auto e = make_expr(Expr::Kind::BoolLit, t);
      e->type = Type::Bool;
      e->value = t.text == "true";
      return e;
    }
    if (check_kw("nondet_int") || check_kw("nondet_bool")) {
      ++pos_;
      auto e = make_expr(t.text == "nondet_int" ? Expr::Kind::NondetInt : Expr::Kind::NondetBool, t);
      e->type = t.text == "nondet_int" ? Type::Int : Type::Bool;
      expect_punct("(");
      expect_punct(")");
      return e;
    }
    if (t.kind == TokenKind::Identifier) {
      ++pos_;
      if (accept_punct("(")) {
        auto e = make_expr(Expr::Kind::Call, t);
        e->name = t.text;
        if (!check_punct(")")) {
          do {
            e->args.push_back(parse_expr());
          } while (accept_punct(","));
        }
        expect_punct(")");
        return e;
      }
      auto e = make_expr(Expr::Kind::Var, t);
      e->name = t.text;
      return e;
    }
    if (check_punct("(")) {
      ++pos_;
      auto e = parse_expr();
      expect_punct(")");
      return e;
    }
    fail("expression");
  }
};

// ---------------------------------------------------------------------------
// Name resolution and type checking
// ---------------------------------------------------------------------------

std::string type_name(Type t) {
  switch (t) {
  case Type::Int: return "int";
  case Type::Bool: return "bool";
  case Type::Void: return "void";
  }
  return "?";
}

class Checker {
public:
  explicit Checker(Ast &ast) : ast_(ast) {}

  void run() {
    std::set<std::string> fn_names;
    for (auto &fn : ast_.functions) {
      if (!fn_names.insert(fn.name).second)
        throw TypeError(fn.line, fn.column, "redefinition of function '" + fn.name + "'");
    }
    for (auto &g : ast_.globals) {
      if (fn_names.count(g.name))
        throw TypeError(g.line, g.column, "'" + g.name + "' already names a function");
    }
    scopes_.emplace_back(); // file scope
    for (const auto &item : ast_.order) {
      if (item.is_function) {
        check_function(ast_.functions[item.index]);
      } else {
        auto &g = ast_.globals[item.index];
        if (g.init) {
          check_expr(*g.init, /*allow_void=*/false);
          expect_type(*g.init, g.type, "initializer");
        }
        if (scopes_.front().count(g.name))
          throw TypeError(g.line, g.column, "redefinition of '" + g.name + "'");
        g.var = declare(g.name, g.type, true, "", g.line);
        if (g.init) assigned_.insert(g.var);
      }
    }
    const int main_idx = ast_.find_function("main");
    if (main_idx < 0) throw TypeError(1, 1, "missing function 'main'");
    const auto &m = ast_.functions[main_idx];
    if (!m.params.empty())
      throw TypeError(m.line, m.column, "'main' must take no parameters");

    for (const auto &[var, where] : reads_) {
      if (!assigned_.count(var) && !ast_.vars[var].global) {
        ast_.warnings.push_back({where.first, where.second,
                                 "variable '" + ast_.vars[var].name +
                                     "' is read but never assigned; it reads as 0"});
      }
    }
  }

private:
  Ast &ast_;
  std::vector<std::unordered_map<std::string, VarId>> scopes_;
  const FunctionDecl *current_ = nullptr;
  std::set<VarId> assigned_;
  std::map<VarId, std::pair<int, int>> reads_;

  VarId declare(const std::string &name, Type type, bool global,
                const std::string &fn, int line) {
    const auto id = static_cast<VarId>(ast_.vars.size());
    ast_.vars.push_back({name, type, global, fn, line});
    scopes_.back()[name] = id;
    return id;
  }

  VarId lookup(const std::string &name, int line, int column) {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end()) return f->second;
    }
    if (ast_.find_function(name) >= 0)
      throw TypeError(line, column, "'" + name + "' is a function, not a variable");
    throw TypeError(line, column, "use of undeclared identifier '" + name + "'");
  }

  static void expect_type(const Expr &e, Type want, const std::string &what) {
    if (e.type != want)
      throw TypeError(e.line, e.column,
                      what + " must be " + type_name(want) + ", got " + type_name(e.type));
  }

  void check_function(FunctionDecl &fn) {
    current_ = &fn;
    scopes_.emplace_back();
    for (auto &p : fn.params) {
      if (scopes_.back().count(p.name))
        throw TypeError(fn.line, fn.column, "duplicate parameter '" + p.name + "'");
      p.var = declare(p.name, p.type, false, fn.name, fn.line);
      assigned_.insert(p.var);
    }
    check_stmts(fn.body, /*new_scope=*/false);
    scopes_.pop_back();
    current_ = nullptr;
  }

  void check_stmts(std::vector<StmtPtr> &stmts, bool new_scope) {
    if (new_scope) scopes_.emplace_back();
    for (auto &s : stmts) check_stmt(*s);
    if (new_scope) scopes_.pop_back();
  }

  void check_stmt(Stmt &s) {
    switch (s.kind) {
    case Stmt::Kind::Block: check_stmts(s.body, true); return;
    case Stmt::Kind::VarDecl:
      if (s.expr) {
        check_expr(*s.expr, false);
        expect_type(*s.expr, s.decl_type, "initializer of '" + s.name + "'");
      }
      if (scopes_.back().count(s.name))
        throw TypeError(s.line, s.column, "redefinition of '" + s.name + "'");
      s.var = declare(s.name, s.decl_type, false, current_->name, s.line);
      if (s.expr) assigned_.insert(s.var);
      return;
    case Stmt::Kind::Assign: {
      s.var = lookup(s.name, s.line, s.column);
      check_expr(*s.expr, false);
      expect_type(*s.expr, ast_.vars[s.var].type, "value assigned to '" + s.name + "'");
      assigned_.insert(s.var);
      return;
    }
    case Stmt::Kind::If:
      check_expr(*s.expr, false);
      expect_type(*s.expr, Type::Bool, "if condition");
      check_stmts(s.body, true);
      if (s.has_else) check_stmts(s.else_body, true);
      return;
    case Stmt::Kind::While:
      check_expr(*s.expr, false);
      expect_type(*s.expr, Type::Bool, "while condition");
      check_stmts(s.body, true);
      return;
    case Stmt::Kind::Assert:
    case Stmt::Kind::Assume:
      check_expr(*s.expr, false);
      expect_type(*s.expr, Type::Bool,
                  s.kind == Stmt::Kind::Assert ? "assert condition" : "assume condition");
      return;
    case Stmt::Kind::Call: check_expr(*s.expr, /*allow_void=*/true); return;
    case Stmt::Kind::Return:
      if (current_->return_type == Type::Void) {
        if (s.expr)
          throw TypeError(s.line, s.column, "void function '" + current_->name +
                                                "' cannot return a value");
      } else {
        if (!s.expr)
          throw TypeError(s.line, s.column, "function '" + current_->name +
                                                "' must return a value");
        check_expr(*s.expr, false);
        expect_type(*s.expr, current_->return_type, "return value");
      }
      return;
    }
  }

  void check_expr(Expr &e, bool allow_void) {
    switch (e.kind) {
    case Expr::Kind::IntLit: e.type = Type::Int; return;
    case Expr::Kind::BoolLit: e.type = Type::Bool; return;
    case Expr::Kind::NondetInt: e.type = Type::Int; return;
    case Expr::Kind::NondetBool: e.type = Type::Bool; return;
    case Expr::Kind::Var:
      e.var = lookup(e.name, e.line, e.column);
      e.type = ast_.vars[e.var].type;
      reads_.emplace(e.var, std::make_pair(e.line, e.column));
      return;
    case Expr::Kind::Unary:
      check_expr(*e.args[0], false);
      if (e.unary_op == UnaryOp::Not) {
        expect_type(*e.args[0], Type::Bool, "operand of '!'");
        e.type = Type::Bool;
      } else {
        expect_type(*e.args[0], Type::Int,
                    "operand of '" + std::string(to_string(e.unary_op)) + "'");
        e.type = Type::Int;
      }
      return;
    case Expr::Kind::Binary: {
      check_expr(*e.args[0], false);
      check_expr(*e.args[1], false);
      const std::string what = "operand of '" + std::string(to_string(e.binary_op)) + "'";
      if (is_logical(e.binary_op)) {
        expect_type(*e.args[0], Type::Bool, what);
        expect_type(*e.args[1], Type::Bool, what);
        e.type = Type::Bool;
      } else if (e.binary_op == BinaryOp::Eq || e.binary_op == BinaryOp::Ne) {
        expect_type(*e.args[1], e.args[0]->type, what);
        e.type = Type::Bool;
      } else {
        expect_type(*e.args[0], Type::Int, what);
        expect_type(*e.args[1], Type::Int, what);
        e.type = is_comparison(e.binary_op) ? Type::Bool : Type::Int;
      }
      return;
    }
    case Expr::Kind::Call: {
      e.callee = ast_.find_function(e.name);
      if (e.callee < 0) {
        throw TypeError(e.line, e.column, "call to undeclared function '" + e.name + "'");
      }
      const auto &fn = ast_.functions[e.callee];
      if (fn.name == "main")
        throw TypeError(e.line, e.column, "'main' cannot be called");
      if (fn.params.size() != e.args.size())
        throw TypeError(e.line, e.column,
                        "'" + fn.name + "' expects " + std::to_string(fn.params.size()) +
                            " argument(s), got " + std::to_string(e.args.size()));
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        check_expr(*e.args[i], false);
        expect_type(*e.args[i], fn.params[i].type,
                    "argument " + std::to_string(i + 1) + " of '" + fn.name + "'");
      }
      e.type = fn.return_type;
      if (e.type == Type::Void && !allow_void)
        throw TypeError(e.line, e.column, "void function '" + fn.name + "' used as a value");
      return;
    }
    }
  }
};

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

void print_expr(std::ostringstream &os, const Expr &e) {
  switch (e.kind) {
  case Expr::Kind::IntLit: os << e.value; return;
  case Expr::Kind::BoolLit: os << (e.value ? "true" : "false"); return;
  case Expr::Kind::NondetInt: os << "nondet_int()"; return;
  case Expr::Kind::NondetBool: os << "nondet_bool()"; return;
  case Expr::Kind::Var: os << e.name; return;
  case Expr::Kind::Unary:
    os << to_string(e.unary_op) << "(";
    print_expr(os, *e.args[0]);
    os << ")";
    return;
  case Expr::Kind::Binary:
    os << "(";
    print_expr(os, *e.args[0]);
    os << " " << to_string(e.binary_op) << " ";
    print_expr(os, *e.args[1]);
    os << ")";
    return;
  case Expr::Kind::Call:
    os << e.name << "(";
    for (std::size_t i = 0; i < e.args.size(); ++i) {
      if (i) os << ", ";
      print_expr(os, *e.args[i]);
    }
    os << ")";
    return;
  }
}

void print_stmts(std::ostringstream &os, const std::vector<StmtPtr> &stmts, int indent);

void print_stmt(std::ostringstream &os, const Stmt &s, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  switch (s.kind) {
  case Stmt::Kind::Block:
    os << pad << "{\n";
    print_stmts(os, s.body, indent + 1);
    os << pad << "}\n";
    return;
  case Stmt::Kind::VarDecl:
    os << pad << type_name(s.decl_type) << " " << s.name;
    if (s.expr) {
      os << " = ";
      print_expr(os, *s.expr);
    }
    os << ";\n";
    return;
  case Stmt::Kind::Assign:
    os << pad << s.name << " = ";
    print_expr(os, *s.expr);
    os << ";\n";
    return;
  case Stmt::Kind::If:
    os << pad << "if (";
    print_expr(os, *s.expr);
    os << ") {\n";
    print_stmts(os, s.body, indent + 1);
    os << pad << "}";
    if (s.has_else) {
      os << " else {\n";
      print_stmts(os, s.else_body, indent + 1);
      os << pad << "}";
    }
    os << "\n";
    return;
  case Stmt::Kind::While:
    os << pad << "while (";
    print_expr(os, *s.expr);
    os << ") {\n";
    print_stmts(os, s.body, indent + 1);
    os << pad << "}\n";
    return;
  case Stmt::Kind::Assert:
  case Stmt::Kind::Assume:
    os << pad << (s.kind == Stmt::Kind::Assert ? "assert(" : "assume(");
    print_expr(os, *s.expr);
    os << ");\n";
    return;
  case Stmt::Kind::Call:
    os << pad;
    print_expr(os, *s.expr);
    os << ";\n";
    return;
  case Stmt::Kind::Return:
    os << pad << "return";
    if (s.expr) {
      os << " ";
      print_expr(os, *s.expr);
    }
    os << ";\n";
    return;
  }
}

void print_stmts(std::ostringstream &os, const std::vector<StmtPtr> &stmts, int indent) {
  for (const auto &s : stmts) print_stmt(os, *s, indent);
}

} // namespace

Ast parse(const std::vector<Token> &tokens) {
  Ast ast = Parser(tokens).run();
  Checker(ast).run();
  return ast;
}

std::string pretty_print(const Ast &ast) {
  std::ostringstream os;
  for (const auto &item : ast.order) {
    if (!item.is_function) {
      const auto &g = ast.globals[item.index];
      os << type_name(g.type) << " " << g.name;
      if (g.init) {
        os << " = ";
        print_expr(os, *g.init);
      }
      os << ";\n";
      continue;
    }
    const auto &fn = ast.functions[item.index];
    os << type_name(fn.return_type) << " " << fn.name << "(";
    for (std::size_t i = 0; i < fn.params.size(); ++i) {
      if (i) os << ", ";
      os << type_name(fn.params[i].type) << " " << fn.params[i].name;
    }
    os << ") {\n";
    print_stmts(os, fn.body, 1);
    os << "}\n";
  }
  return os.str();
}

} // namespace pinacolada::frontend
