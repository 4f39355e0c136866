#pragma once

// MiniC: a small imperative language with `int`, `bool` and `void`,
// functions (recursion allowed), file-scope variables, `if`/`else`,
// `while`, `assert`, `assume`, and the input sources `nondet_int()` and
// `nondet_bool()`. No pointers, arrays, structs or floats.

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pinacolada/expr.hpp"

namespace pinacolada::frontend {

enum class TokenKind : std::uint8_t {
  Keyword,
  Identifier,
  IntegerLiteral,
  Operator,
  Punctuation,
};

std::string_view to_string(TokenKind kind);

struct Token {
  TokenKind kind;
  std::string text;
  int line = 1;
  int column = 1;

  friend bool operator==(const Token &, const Token &) = default;
};

class FrontendError : public std::runtime_error {
public:
  FrontendError(int line, int column, const std::string &message)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) +
                           ": " + message),
        line_(line), column_(column), message_(message) {}

  int line() const { return line_; }
  int column() const { return column_; }
  const std::string &message() const { return message_; }

private:
  int line_;
  int column_;
  std::string message_;
};

class LexError : public FrontendError {
public:
  using FrontendError::FrontendError;
};

class ParseError : public FrontendError {
public:
  ParseError(int line, int column, std::string expected, std::string found)
      : FrontendError(line, column,
                      "expected " + expected + ", found " + found),
        expected_(std::move(expected)), found_(std::move(found)) {}

  const std::string &expected() const { return expected_; }
  const std::string &found() const { return found_; }

private:
  std::string expected_;
  std::string found_;
};

class TypeError : public FrontendError {
public:
  using FrontendError::FrontendError;
};

/// Splits `source` into tokens. `//` comments and whitespace are dropped;
/// line and column numbers are 1-based.
std::vector<Token> tokenize(std::string_view source);

// ---------------------------------------------------------------------------
// AST
// ---------------------------------------------------------------------------

using VarId = std::uint32_t;
inline constexpr VarId kNoVar = ~VarId{0};

struct VarInfo {
  std::string name;
  Type type = Type::Int;
  bool global = false;
  std::string function; // empty for globals
  int line = 0;
};

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr {
  enum class Kind : std::uint8_t {
    IntLit,
    BoolLit,
    Var,
    Unary,
    Binary,
    Call,
    NondetInt,
    NondetBool,
  };

  Kind kind = Kind::IntLit;
  Type type = Type::Int; // resolved by the checker
  std::uint64_t value = 0;
  std::string name; // variable or callee
  VarId var = kNoVar;
  int callee = -1; // index into Ast::functions
  UnaryOp unary_op = UnaryOp::Neg;
  BinaryOp binary_op = BinaryOp::Add;
  std::vector<ExprPtr> args; // operands or call arguments
  int line = 0;
  int column = 0;
};

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

struct Stmt {
  enum class Kind : std::uint8_t {
    VarDecl,
    Assign,
    If,
    While,
    Assert,
    Assume,
    Call,
    Return,
    Block,
  };

  Kind kind = Kind::Block;
  Type decl_type = Type::Int; // VarDecl
  std::string name;           // VarDecl, Assign
  VarId var = kNoVar;
  ExprPtr expr; // initializer, rhs, condition, call, return value
  std::vector<StmtPtr> body;
  std::vector<StmtPtr> else_body;
  bool has_else = false;
  int line = 0;
  int column = 0;
};

struct Param {
  std::string name;
  Type type = Type::Int;
  VarId var = kNoVar;
};

struct FunctionDecl {
  std::string name;
  std::vector<Param> params;
  Type return_type = Type::Int;
  std::vector<StmtPtr> body;
  int line = 0;
  int column = 0;
};

struct GlobalDecl {
  std::string name;
  Type type = Type::Int;
  VarId var = kNoVar;
  ExprPtr init; // may be null
  int line = 0;
  int column = 0;
};

struct Warning {
  int line = 0;
  int column = 0;
  std::string message;
};

struct Ast {
  struct Item {
    bool is_function = false;
    std::size_t index = 0;
  };

  std::vector<GlobalDecl> globals;
  std::vector<FunctionDecl> functions;
  std::vector<Item> order; // top-level declaration order
  std::vector<VarInfo> vars;
  std::vector<Warning> warnings;

  int find_function(std::string_view name) const;
};

/// Parses and type-checks a token stream.
Ast parse(const std::vector<Token> &tokens);

inline Ast parse_source(std::string_view source) { return parse(tokenize(source)); }

/// Renders `ast` as MiniC source with every binary expression parenthesised.
std::string pretty_print(const Ast &ast);

} // namespace pinacolada::frontend
