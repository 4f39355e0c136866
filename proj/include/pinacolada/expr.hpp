#pragma once

// Immutable expression trees shared by the GOTO IR (leaves are program
// variables) and the symbolic state (leaves are SSA names).

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <utility>

namespace pinacolada {

enum class Type : std::uint8_t { Int, Bool, Void };

enum class UnaryOp : std::uint8_t { Neg, BitNot, Not };

enum class BinaryOp : std::uint8_t {
  Add,
  Sub,
  Mul,
  Div,
  Mod,
  Shl,
  Shr,
  BitAnd,
  BitOr,
  BitXor,
  Lt,
  Le,
  Gt,
  Ge,
  Eq,
  Ne,
  And,
  Or,
};

inline constexpr std::string_view to_string(UnaryOp op) {
  switch (op) {
  case UnaryOp::Neg: return "-";
  case UnaryOp::BitNot: return "~";
  case UnaryOp::Not: return "!";
  }
  return "?";
}

inline constexpr std::string_view to_string(BinaryOp op) {
  switch (op) {
  case BinaryOp::Add: return "+";
  case BinaryOp::Sub: return "-";
  case BinaryOp::Mul: return "*";
  case BinaryOp::Div: return "/";
  case BinaryOp::Mod: return "%";
  case BinaryOp::Shl: return "<<";
  case BinaryOp::Shr: return ">>";
  case BinaryOp::BitAnd: return "&";
  case BinaryOp::BitOr: return "|";
  case BinaryOp::BitXor: return "^";
  case BinaryOp::Lt: return "<";
  case BinaryOp::Le: return "<=";
  case BinaryOp::Gt: return ">";
  case BinaryOp::Ge: return ">=";
  case BinaryOp::Eq: return "==";
  case BinaryOp::Ne: return "!=";
  case BinaryOp::And: return "&&";
  case BinaryOp::Or: return "||";
  }
  return "?";
}

inline constexpr bool is_comparison(BinaryOp op) {
  return op == BinaryOp::Lt || op == BinaryOp::Le || op == BinaryOp::Gt ||
         op == BinaryOp::Ge || op == BinaryOp::Eq || op == BinaryOp::Ne;
}

inline constexpr bool is_logical(BinaryOp op) {
  return op == BinaryOp::And || op == BinaryOp::Or;
}

/// A node of a pure expression tree. Nodes are never mutated after
/// construction, so subtrees can be shared freely between states.
template <class Leaf> struct Term {
  enum class Kind : std::uint8_t { Const, Var, Unary, Binary };
  using Ptr = std::shared_ptr<const Term>;

  Kind kind;
  Type type;
  // Const: raw two's complement bits (truncated to the configured width on
  // use); for Bool, 0 or 1.
  std::uint64_t value = 0;
  Leaf leaf{};
  UnaryOp unary_op = UnaryOp::Neg;
  BinaryOp binary_op = BinaryOp::Add;
  Ptr lhs;
  Ptr rhs;

  static Ptr constant(Type type, std::uint64_t value) {
    auto t = std::make_shared<Term>();
    t->kind = Kind::Const;
    t->type = type;
    t->value = type == Type::Bool ? (value != 0) : value;
    return t;
  }
  static Ptr boolean(bool b) { return constant(Type::Bool, b ? 1 : 0); }
  static Ptr integer(std::int64_t v) {
    return constant(Type::Int, static_cast<std::uint64_t>(v));
  }
  static Ptr variable(Type type, Leaf leaf) {
    auto t = std::make_shared<Term>();
    t->kind = Kind::Var;
    t->type = type;
    t->leaf = std::move(leaf);
    return t;
  }
  static Ptr unary(UnaryOp op, Ptr operand) {
    auto t = std::make_shared<Term>();
    t->kind = Kind::Unary;
    t->type = op == UnaryOp::Not ? Type::Bool : Type::Int;
    t->unary_op = op;
    t->lhs = std::move(operand);
    return t;
  }
  static Ptr binary(BinaryOp op, Ptr a, Ptr b) {
    auto t = std::make_shared<Term>();
    t->kind = Kind::Binary;
    t->type = (is_comparison(op) || is_logical(op)) ? Type::Bool : a->type;
    t->binary_op = op;
    t->lhs = std::move(a);
    t->rhs = std::move(b);
    return t;
  }

  bool is_const() const { return kind == Kind::Const; }
};

/// Rebuilds `e` with every leaf replaced by `f(leaf, type)`.
template <class To, class From, class F>
typename Term<To>::Ptr map_leaves(const typename Term<From>::Ptr &e, F &&f) {
  using Out = Term<To>;
  switch (e->kind) {
  case Term<From>::Kind::Const: return Out::constant(e->type, e->value);
  case Term<From>::Kind::Var: return f(e->leaf, e->type);
  case Term<From>::Kind::Unary:
    return Out::unary(e->unary_op, map_leaves<To, From>(e->lhs, f));
  case Term<From>::Kind::Binary:
    return Out::binary(e->binary_op, map_leaves<To, From>(e->lhs, f),
                       map_leaves<To, From>(e->rhs, f));
  }
  return nullptr;
}

template <class Leaf, class F> void for_each_leaf(const Term<Leaf> &e, F &&f) {
  switch (e.kind) {
  case Term<Leaf>::Kind::Const: return;
  case Term<Leaf>::Kind::Var: f(e.leaf); return;
  case Term<Leaf>::Kind::Unary: for_each_leaf(*e.lhs, f); return;
  case Term<Leaf>::Kind::Binary:
    for_each_leaf(*e.lhs, f);
    for_each_leaf(*e.rhs, f);
    return;
  }
}

template <class Leaf> std::size_t term_size(const Term<Leaf> &e) {
  std::size_t n = 1;
  if (e.lhs) n += term_size(*e.lhs);
  if (e.rhs) n += term_size(*e.rhs);
  return n;
}

/// Fully parenthesised rendering; `leaf_name` renders leaves.
template <class Leaf, class F>
std::string render(const Term<Leaf> &e, F &&leaf_name) {
  switch (e.kind) {
  case Term<Leaf>::Kind::Const:
    if (e.type == Type::Bool) return e.value ? "true" : "false";
    return std::to_string(static_cast<std::int64_t>(e.value));
  case Term<Leaf>::Kind::Var: return leaf_name(e.leaf);
  case Term<Leaf>::Kind::Unary:
    return std::string(to_string(e.unary_op)) + render(*e.lhs, leaf_name);
  case Term<Leaf>::Kind::Binary:
    return "(" + render(*e.lhs, leaf_name) + " " +
           std::string(to_string(e.binary_op)) + " " +
           render(*e.rhs, leaf_name) + ")";
  }
  return "?";
}

} // namespace pinacolada
