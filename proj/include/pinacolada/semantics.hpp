#pragma once

// Fixed-width two's complement value semantics. The concrete oracle, the
// constant folder and the tests all go through these functions; the
// bit-blaster implements the same table independently in CNF.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>

#include "pinacolada/expr.hpp"

namespace pinacolada {

inline constexpr unsigned kMinWidth = 4;
inline constexpr unsigned kMaxWidth = 64;

inline constexpr std::uint64_t width_mask(unsigned width) {
  return width >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << width) - 1);
}

/// Truncates `bits` to `width` and sign-extends the result.
inline constexpr std::int64_t wrap(std::uint64_t bits, unsigned width) {
  bits &= width_mask(width);
  if (width < 64 && (bits >> (width - 1)) & 1) bits |= ~width_mask(width);
  return static_cast<std::int64_t>(bits);
}

inline constexpr std::int64_t min_value(unsigned width) {
  return wrap(std::uint64_t{1} << (width - 1), width);
}
inline constexpr std::int64_t max_value(unsigned width) {
  return wrap((std::uint64_t{1} << (width - 1)) - 1, width);
}

struct DivMod {
  std::int64_t quot;
  std::int64_t rem;
  friend bool operator==(const DivMod &, const DivMod &) = default;
};

/// Truncated signed division; a zero divisor yields (0, 0).
inline constexpr DivMod div_mod_semantics(std::int64_t a, std::int64_t b,
                                          unsigned width) {
  a = wrap(static_cast<std::uint64_t>(a), width);
  b = wrap(static_cast<std::uint64_t>(b), width);
  if (b == 0) return {0, 0};
  if (b == -1) {
    // Avoids INT64_MIN / -1; the quotient wraps like any other overflow.
    return {wrap(0 - static_cast<std::uint64_t>(a), width), 0};
  }
  return {wrap(static_cast<std::uint64_t>(a / b), width),
          wrap(static_cast<std::uint64_t>(a % b), width)};
}

inline constexpr unsigned shift_amount(std::int64_t b, unsigned width) {
  return static_cast<unsigned>((static_cast<std::uint64_t>(b) & width_mask(width)) %
                               width);
}

/// Evaluates an int or bool operator on already-wrapped operands. Bool
/// values are 0/1.
inline constexpr std::int64_t apply_binary(BinaryOp op, std::int64_t a,
                                           std::int64_t b, unsigned width) {
  const auto ua = static_cast<std::uint64_t>(a);
  const auto ub = static_cast<std::uint64_t>(b);
  switch (op) {
  case BinaryOp::Add: return wrap(ua + ub, width);
  case BinaryOp::Sub: return wrap(ua - ub, width);
  case BinaryOp::Mul: return wrap(ua * ub, width);
  case BinaryOp::Div: return div_mod_semantics(a, b, width).quot;
  case BinaryOp::Mod: return div_mod_semantics(a, b, width).rem;
  case BinaryOp::Shl: return wrap(ua << shift_amount(b, width), width);
  case BinaryOp::Shr: return wrap(static_cast<std::uint64_t>(a >> shift_amount(b, width)), width);
  case BinaryOp::BitAnd: return wrap(ua & ub, width);
  case BinaryOp::BitOr: return wrap(ua | ub, width);
  case BinaryOp::BitXor: return wrap(ua ^ ub, width);
  case BinaryOp::Lt: return a < b;
  case BinaryOp::Le: return a <= b;
  case BinaryOp::Gt: return a > b;
  case BinaryOp::Ge: return a >= b;
  case BinaryOp::Eq: return a == b;
  case BinaryOp::Ne: return a != b;
  case BinaryOp::And: return (a != 0) && (b != 0);
  case BinaryOp::Or: return (a != 0) || (b != 0);
  }
  return 0;
}

inline constexpr std::int64_t apply_unary(UnaryOp op, std::int64_t a,
                                          unsigned width) {
  switch (op) {
  case UnaryOp::Neg: return wrap(0 - static_cast<std::uint64_t>(a), width);
  case UnaryOp::BitNot: return wrap(~static_cast<std::uint64_t>(a), width);
  case UnaryOp::Not: return a == 0;
  }
  return 0;
}

/// Normalises a constant node's raw bits to a value of `type` at `width`.
inline constexpr std::int64_t constant_value(Type type, std::uint64_t bits,
                                             unsigned width) {
  return type == Type::Bool ? static_cast<std::int64_t>(bits != 0)
                            : wrap(bits, width);
}

/// Evaluates a term whose leaves are resolved by `lookup(leaf) -> int64`.
template <class Leaf, class Lookup>
std::int64_t evaluate(const Term<Leaf> &e, unsigned width, Lookup &&lookup) {
  using K = typename Term<Leaf>::Kind;
  switch (e.kind) {
  case K::Const: return constant_value(e.type, e.value, width);
  case K::Var: return lookup(e.leaf);
  case K::Unary: return apply_unary(e.unary_op, evaluate(*e.lhs, width, lookup), width);
  case K::Binary: {
    const auto a = evaluate(*e.lhs, width, lookup);
    const auto b = evaluate(*e.rhs, width, lookup);
    return apply_binary(e.binary_op, a, b, width);
  }
  }
  return 0;
}

/// Value of `e` if it contains no leaves at all.
template <class Leaf>
std::optional<std::int64_t> fold_constant(const Term<Leaf> &e, unsigned width) {
  bool has_leaf = false;
  for_each_leaf(e, [&](const Leaf &) { has_leaf = true; });
  if (has_leaf) return std::nullopt;
  return evaluate(e, width, [](const Leaf &) -> std::int64_t { return 0; });
}

} // namespace pinacolada
