#include "pinacolada/bitblast.hpp"

#include <bit>

#include "pinacolada/semantics.hpp"

namespace pinacolada::encode {

void GuardSink::add_clause(std::span<const Lit> lits) {
  buffer_.assign(lits.begin(), lits.end());
  buffer_.push_back(~guard_);
  inner_.add_clause(buffer_);
}

EncodingContext::EncodingContext(ClauseSink &base, unsigned width, bool fold_constants)
    : base_(base), sink_(&base), width_(width), fold_(fold_constants) {
  if (width < kMinWidth || width > kMaxWidth)
    throw UnsupportedWidth("integer width must be between 4 and 64, got " +
                           std::to_string(width));
  true_ = Lit(base_.new_var(), false);
  base_.add_clause({true_});
  ++clauses_;
}

void EncodingContext::emit(std::initializer_list<Lit> lits) {
  emit(std::span<const Lit>(lits.begin(), lits.size()));
}

void EncodingContext::emit(std::span<const Lit> lits) {
  ++clauses_;
  sink_->add_clause(lits);
}

Lit EncodingContext::fresh_lit() { return Lit(sink_->new_var(), false); }

Bits EncodingContext::fresh(unsigned width) {
  Bits out(width);
  for (auto &l : out) l = fresh_lit();
  return out;
}

Bits EncodingContext::constant(std::uint64_t value, unsigned width) const {
  Bits out(width);
  for (unsigned i = 0; i < width; ++i) out[i] = ((value >> i) & 1) ? true_ : ~true_;
  return out;
}

Lit EncodingContext::and2(Lit a, Lit b) {
  if (fold_) {
    if (is_false(a) || is_false(b) || a == ~b) return false_lit();
    if (is_true(a) || a == b) return b;
    if (is_true(b)) return a;
  }
  const Lit o = fresh_lit();
  emit({~o, a});
  emit({~o, b});
  emit({o, ~a, ~b});
  return o;
}

Lit EncodingContext::or2(Lit a, Lit b) { return ~and2(~a, ~b); }

Lit EncodingContext::xor2(Lit a, Lit b) {
  if (fold_) {
    if (is_false(a)) return b;
    if (is_false(b)) return a;
    if (is_true(a)) return ~b;
    if (is_true(b)) return ~a;
    if (a == b) return false_lit();
    if (a == ~b) return true_lit();
  }
  const Lit o = fresh_lit();
  emit({~o, a, b});
  emit({~o, ~a, ~b});
  emit({o, ~a, b});
  emit({o, a, ~b});
  return o;
}

Lit EncodingContext::mux(Lit sel, Lit then_lit, Lit else_lit) {
  if (fold_) {
    if (is_true(sel)) return then_lit;
    if (is_false(sel)) return else_lit;
    if (then_lit == else_lit) return then_lit;
  }
  const Lit o = fresh_lit();
  emit({~sel, ~then_lit, o});
  emit({~sel, then_lit, ~o});
  emit({sel, ~else_lit, o});
  emit({sel, else_lit, ~o});
  emit({~then_lit, ~else_lit, o});
  emit({then_lit, else_lit, ~o});
  return o;
}

Lit EncodingContext::and_all(std::span<const Lit> lits) {
  std::vector<Lit> kept;
  for (Lit l : lits) {
    if (is_true(l)) continue;
    if (is_false(l)) return false_lit();
    kept.push_back(l);
  }
  if (kept.empty()) return true_lit();
  if (kept.size() == 1) return kept[0];
  const Lit o = fresh_lit();
  std::vector<Lit> big{o};
  for (Lit l : kept) {
    emit({~o, l});
    big.push_back(~l);
  }
  emit(big);
  return o;
}

Lit EncodingContext::or_all(std::span<const Lit> lits) {
  std::vector<Lit> neg;
  neg.reserve(lits.size());
  for (Lit l : lits) neg.push_back(~l);
  return ~and_all(neg);
}

Bits EncodingContext::add(const Bits &a, const Bits &b, Lit carry_in, Lit *carry_out) {
  Bits out(a.size());
  Lit c = carry_in;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Lit x = a[i];
    const Lit y = b[i];
    const bool constant_input = fold_ && (is_true(x) || is_false(x) || is_true(y) ||
                                          is_false(y) || is_true(c) || is_false(c));
    if (constant_input) {
      const Lit xy = xor2(x, y);
      out[i] = xor2(xy, c);
      c = or2(and2(x, y), and2(c, xy));
      continue;
    }
    // Full adder cell with direct clauses.
    const Lit s = fresh_lit();
    emit({~x, ~y, ~c, s});
    emit({~x, ~y, c, ~s});
    emit({~x, y, ~c, ~s});
    emit({~x, y, c, s});
    emit({x, ~y, ~c, ~s});
    emit({x, ~y, c, s});
    emit({x, y, ~c, s});
    emit({x, y, c, ~s});
    const Lit k = fresh_lit();
    emit({~x, ~y, k});
    emit({~x, ~c, k});
    emit({~y, ~c, k});
    emit({x, y, ~k});
    emit({x, c, ~k});
    emit({y, c, ~k});
    out[i] = s;
    c = k;
  }
  if (carry_out) *carry_out = c;
  return out;
}

Bits EncodingContext::negate(const Bits &a) {
  Bits inv(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) inv[i] = ~a[i];
  return add(inv, constant(0, static_cast<unsigned>(a.size())), true_lit());
}

Bits EncodingContext::mul(const Bits &a, const Bits &b, unsigned out_width) {
  // Shift-add: row i adds (a << i) masked by b[i].
  Bits acc = constant(0, out_width);
  for (unsigned i = 0; i < out_width && i < b.size(); ++i) {
    if (is_false(b[i])) continue;
    Bits row(out_width, false_lit());
    for (unsigned j = i; j < out_width; ++j)
      if (j - i < a.size()) row[j] = and2(a[j - i], b[i]);
    acc = add(acc, row, false_lit());
  }
  return acc;
}

Bits EncodingContext::select(Lit sel, const Bits &a, const Bits &b) {
  Bits out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = mux(sel, a[i], b[i]);
  return out;
}

Lit EncodingContext::equal(const Bits &a, const Bits &b) {
  std::vector<Lit> same(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) same[i] = ~xor2(a[i], b[i]);
  return and_all(same);
}

Lit EncodingContext::unsigned_less(const Bits &a, const Bits &b) {
  // a < b iff a + ~b + 1 produces no carry out.
  Lit c = true_lit();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Lit x = a[i];
    const Lit y = ~b[i];
    const Lit xy = xor2(x, y);
    c = or2(and2(x, y), and2(c, xy));
  }
  return ~c;
}

Lit EncodingContext::signed_less(const Bits &a, const Bits &b) {
  Bits fa = a;
  Bits fb = b;
  fa.back() = ~fa.back();
  fb.back() = ~fb.back();
  return unsigned_less(fa, fb);
}

void EncodingContext::unsigned_divrem(const Bits &a, const Bits &b, Lit nonzero, Bits &quot,
                                      Bits &rem) {
  const auto w = static_cast<unsigned>(a.size());
  quot = fresh(w);
  rem = fresh(w);
  // A zero divisor pins both results to zero so the model stays unique.
  for (unsigned i = 0; i < w; ++i) {
    emit({nonzero, ~quot[i]});
    emit({nonzero, ~rem[i]});
  }
  auto widen = [&](const Bits &x) {
    Bits out(2 * w, false_lit());
    std::copy(x.begin(), x.end(), out.begin());
    return out;
  };
  const Bits product = mul(widen(b), widen(quot), 2 * w);
  const Bits total = add(product, widen(rem), false_lit());
  for (unsigned i = 0; i < 2 * w; ++i) {
    if (i < w) {
      emit({~nonzero, ~total[i], a[i]});
      emit({~nonzero, total[i], ~a[i]});
    } else {
      emit({~nonzero, ~total[i]});
    }
  }
  emit({~nonzero, unsigned_less(rem, b)});
}

std::pair<Bits, Bits> EncodingContext::signed_divrem(const Bits &a, const Bits &b) {
  const Lit sa = a.back();
  const Lit sb = b.back();
  const Bits ua = select(sa, negate(a), a);
  const Bits ub = select(sb, negate(b), b);
  const Lit nonzero = or_all(b);
  Bits uq;
  Bits ur;
  unsigned_divrem(ua, ub, nonzero, uq, ur);
  // Truncated division: the quotient is negative when the signs differ and
  // the remainder takes the dividend's sign.
  Bits q = select(xor2(sa, sb), negate(uq), uq);
  Bits r = select(sa, negate(ur), ur);
  return {std::move(q), std::move(r)};
}

Bits EncodingContext::shift_amount(const Bits &b) {
  const unsigned stages = static_cast<unsigned>(std::bit_width(width_ - 1));
  if (std::has_single_bit(width_)) return Bits(b.begin(), b.begin() + stages);
  Bits q;
  Bits r;
  unsigned_divrem(b, constant(width_, width_), true_lit(), q, r);
  return Bits(r.begin(), r.begin() + stages);
}

Bits EncodingContext::shift_left(const Bits &a, const Bits &amount) {
  Bits cur = a;
  for (std::size_t k = 0; k < amount.size(); ++k) {
    const std::size_t step = std::size_t{1} << k;
    Bits next(cur.size());
    for (std::size_t i = 0; i < cur.size(); ++i)
      next[i] = mux(amount[k], i >= step ? cur[i - step] : false_lit(), cur[i]);
    cur = std::move(next);
  }
  return cur;
}

Bits EncodingContext::shift_right(const Bits &a, const Bits &amount) {
  Bits cur = a;
  for (std::size_t k = 0; k < amount.size(); ++k) {
    const std::size_t step = std::size_t{1} << k;
    Bits next(cur.size());
    for (std::size_t i = 0; i < cur.size(); ++i)
      next[i] = mux(amount[k], i + step < cur.size() ? cur[i + step] : cur.back(), cur[i]);
    cur = std::move(next);
  }
  return cur;
}

Bits EncodingContext::binary(BinaryOp op, const Bits &a, const Bits &b) {
  auto bitwise = [&](auto gate) {
    Bits out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = gate(a[i], b[i]);
    return out;
  };
  switch (op) {
  case BinaryOp::Add: return add(a, b, false_lit());
  case BinaryOp::Sub: {
    Bits nb(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) nb[i] = ~b[i];
    return add(a, nb, true_lit());
  }
  case BinaryOp::Mul: return mul(a, b, width_);
  case BinaryOp::Div: return signed_divrem(a, b).first;
  case BinaryOp::Mod: return signed_divrem(a, b).second;
  case BinaryOp::Shl: return shift_left(a, shift_amount(b));
  case BinaryOp::Shr: return shift_right(a, shift_amount(b));
  case BinaryOp::BitAnd: return bitwise([&](Lit x, Lit y) { return and2(x, y); });
  case BinaryOp::BitOr: return bitwise([&](Lit x, Lit y) { return or2(x, y); });
  case BinaryOp::BitXor: return bitwise([&](Lit x, Lit y) { return xor2(x, y); });
  case BinaryOp::Lt: return {signed_less(a, b)};
  case BinaryOp::Le: return {~signed_less(b, a)};
  case BinaryOp::Gt: return {signed_less(b, a)};
  case BinaryOp::Ge: return {~signed_less(a, b)};
  case BinaryOp::Eq: return {equal(a, b)};
  case BinaryOp::Ne: return {~equal(a, b)};
  case BinaryOp::And: return {and2(a[0], b[0])};
  case BinaryOp::Or: return {or2(a[0], b[0])};
  }
  throw std::logic_error("unknown binary operator");
}

Bits EncodingContext::encode_expr(const symex::SymExprPtr &e) {
  using K = symex::SymExpr::Kind;
  const unsigned w = e->type == Type::Bool ? 1 : width_;
  switch (e->kind) {
  case K::Const: return constant(e->type == Type::Bool ? (e->value != 0) : e->value, w);
  case K::Var:
    if (e->leaf.def_id == 0) return constant(0, w);
    return bits_of(e->leaf);
  case K::Unary: {
    Bits a = encode_expr(e->lhs);
    if (e->unary_op == UnaryOp::Neg) return negate(a);
    for (auto &l : a) l = ~l;
    return a;
  }
  case K::Binary: {
    const Bits a = encode_expr(e->lhs);
    const Bits b = encode_expr(e->rhs);
    return binary(e->binary_op, a, b);
  }
  }
  throw std::logic_error("unknown expression kind");
}

Lit EncodingContext::encode_bool(const symex::SymExprPtr &e) {
  if (e->type != Type::Bool) throw std::logic_error("encode_bool on a non-bool expression");
  return encode_expr(e)[0];
}

void EncodingContext::encode_def(const symex::Def &def) {
  if (memo_.count(def.id)) return;
  const unsigned w = def.type == Type::Bool ? 1 : width_;
  memo_.emplace(def.id, def.value ? encode_expr(def.value) : fresh(w));
}

const Bits &EncodingContext::bits_of(const symex::SsaRef &ref) {
  auto it = memo_.find(ref.def_id);
  if (it == memo_.end())
    throw std::logic_error("SSA name used before its definition was encoded");
  return it->second;
}

std::int64_t EncodingContext::value_of(const Bits &bits,
                                       const std::function<bool(Lit)> &model) const {
  std::uint64_t raw = 0;
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (model(bits[i])) raw |= std::uint64_t{1} << i;
  if (bits.size() == 1) return static_cast<std::int64_t>(raw);
  return wrap(raw, static_cast<unsigned>(bits.size()));
}

} // namespace pinacolada::encode
