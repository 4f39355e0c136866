#pragma once

// Tseitin bit-blasting of SSA definitions and conditions over W-bit two's
// complement words. Output goes through a ClauseSink so the same encoder
// can feed a solver directly, a plain Cnf, or a guarding wrapper.

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "pinacolada/cnf.hpp"
#include "pinacolada/sat_solver.hpp"
#include "pinacolada/ssa_state.hpp"

namespace pinacolada::encode {

using sat::Lit;
using sat::Var;

class ClauseSink {
public:
  virtual ~ClauseSink() = default;
  virtual Var new_var() = 0;
  virtual void add_clause(std::span<const Lit> lits) = 0;
  void add_clause(std::initializer_list<Lit> lits) {
    add_clause(std::span<const Lit>(lits.begin(), lits.size()));
  }
};

class SolverSink final : public ClauseSink {
public:
  explicit SolverSink(sat::SatSolver &solver) : solver_(solver) {}
  Var new_var() override { return solver_.new_var(); }
  void add_clause(std::span<const Lit> lits) override { solver_.add_clause(lits); }
  using ClauseSink::add_clause;

private:
  sat::SatSolver &solver_;
};

class CnfSink final : public ClauseSink {
public:
  explicit CnfSink(sat::Cnf &cnf) : cnf_(cnf) {}
  Var new_var() override { return cnf_.new_var(); }
  void add_clause(std::span<const Lit> lits) override { cnf_.add_clause(lits); }
  using ClauseSink::add_clause;

private:
  sat::Cnf &cnf_;
};

/// Forwards to `inner` with `¬guard` appended to every clause, so the
/// clauses only bind while `guard` is assumed.
class GuardSink final : public ClauseSink {
public:
  GuardSink(ClauseSink &inner, Lit guard) : inner_(inner), guard_(guard) {}
  Var new_var() override { return inner_.new_var(); }
  void add_clause(std::span<const Lit> lits) override;
  using ClauseSink::add_clause;

private:
  ClauseSink &inner_;
  Lit guard_;
  std::vector<Lit> buffer_;
};

/// LSB first; one literal for a bool.
using Bits = std::vector<Lit>;

class UnsupportedWidth : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class EncodingContext {
public:
  /// Allocates the constant-true literal in `base` immediately.
  EncodingContext(ClauseSink &base, unsigned width, bool fold_constants = true);

  unsigned width() const { return width_; }
  Lit true_lit() const { return true_; }
  Lit false_lit() const { return ~true_; }

  /// Redirects subsequent clauses (e.g. through a GuardSink). Null restores
  /// the base sink.
  void set_sink(ClauseSink *sink) { sink_ = sink ? sink : &base_; }

  /// Encodes `def` once; later calls with the same def id are no-ops.
  void encode_def(const symex::Def &def);
  bool is_encoded(std::uint64_t def_id) const { return def_id == 0 || memo_.count(def_id) != 0; }

  /// Root literal of a bool-typed expression.
  Lit encode_bool(const symex::SymExprPtr &e);
  Bits encode_expr(const symex::SymExprPtr &e);

  const Bits &bits_of(const symex::SsaRef &ref);

  /// Decodes `bits` as a signed value under a model lookup.
  std::int64_t value_of(const Bits &bits, const std::function<bool(Lit)> &model) const;

  std::uint64_t clauses_emitted() const { return clauses_; }

  // Gate helpers, exposed for the encoder tests.
  Lit and2(Lit a, Lit b);
  Lit or2(Lit a, Lit b);
  Lit xor2(Lit a, Lit b);
  Lit mux(Lit sel, Lit then_lit, Lit else_lit);
  Bits constant(std::uint64_t value, unsigned width) const;
  Bits fresh(unsigned width);

private:
  void emit(std::initializer_list<Lit> lits);
  void emit(std::span<const Lit> lits);
  Lit fresh_lit();
  bool is_true(Lit l) const { return fold_ && l == true_; }
  bool is_false(Lit l) const { return fold_ && l == ~true_; }

  Lit and_all(std::span<const Lit> lits);
  Lit or_all(std::span<const Lit> lits);
  Bits add(const Bits &a, const Bits &b, Lit carry_in, Lit *carry_out = nullptr);
  Bits negate(const Bits &a);
  Bits mul(const Bits &a, const Bits &b, unsigned out_width);
  Bits select(Lit sel, const Bits &a, const Bits &b);
  Lit equal(const Bits &a, const Bits &b);
  Lit unsigned_less(const Bits &a, const Bits &b);
  Lit signed_less(const Bits &a, const Bits &b);
  void unsigned_divrem(const Bits &a, const Bits &b, Lit nonzero, Bits &quot, Bits &rem);
  std::pair<Bits, Bits> signed_divrem(const Bits &a, const Bits &b);
  Bits shift_amount(const Bits &b);
  Bits shift_left(const Bits &a, const Bits &amount);
  Bits shift_right(const Bits &a, const Bits &amount);
  Bits binary(BinaryOp op, const Bits &a, const Bits &b);

  ClauseSink &base_;
  ClauseSink *sink_;
  unsigned width_;
  bool fold_;
  Lit true_;
  std::unordered_map<std::uint64_t, Bits> memo_;
  std::uint64_t clauses_ = 0;
};

} // namespace pinacolada::encode
