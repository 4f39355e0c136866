#pragma once

#include <algorithm>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pinacolada::sat {

using Var = std::uint32_t;

/// A propositional literal. Variables are numbered from 1, as in DIMACS.
class Lit {
public:
  constexpr Lit() = default;
  constexpr Lit(Var var, bool negated) : code_(var * 2 + (negated ? 1 : 0)) {}

  static constexpr Lit from_dimacs(std::int64_t v) {
    return v < 0 ? Lit(static_cast<Var>(-v), true) : Lit(static_cast<Var>(v), false);
  }
  static constexpr Lit from_code(std::uint32_t code) {
    Lit l;
    l.code_ = code;
    return l;
  }

  constexpr Var var() const { return code_ >> 1; }
  constexpr bool negated() const { return (code_ & 1) != 0; }
  constexpr std::uint32_t code() const { return code_; }
  constexpr bool valid() const { return var() != 0; }
  constexpr std::int64_t to_dimacs() const {
    return negated() ? -static_cast<std::int64_t>(var()) : static_cast<std::int64_t>(var());
  }

  constexpr Lit operator~() const { return from_code(code_ ^ 1); }
  constexpr Lit operator^(bool flip) const { return from_code(code_ ^ (flip ? 1u : 0u)); }

  friend constexpr bool operator==(Lit a, Lit b) { return a.code_ == b.code_; }
  friend constexpr auto operator<=>(Lit a, Lit b) { return a.code_ <=> b.code_; }

private:
  std::uint32_t code_ = 0;
};

inline constexpr Lit kUndefLit{};

using Clause = std::vector<Lit>;

/// A clause set with an explicit variable count.
struct Cnf {
  Var var_count = 0;
  std::vector<Clause> clauses;

  Var new_var() { return ++var_count; }

  /// Adds `lits` with duplicates removed; tautologies are dropped.
  /// Returns false if the clause was a tautology.
  bool add_clause(std::span<const Lit> lits);
  bool add_clause(std::initializer_list<Lit> lits) {
    return add_clause(std::span<const Lit>(lits.begin(), lits.size()));
  }
};

/// Sorted, deduplicated copy of `lits`. Sets `tautology` when the clause
/// contains a literal and its negation.
inline Clause normalize_clause(std::span<const Lit> lits, bool &tautology) {
  Clause c(lits.begin(), lits.end());
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  tautology = false;
  for (std::size_t i = 1; i < c.size(); ++i)
    if (c[i].var() == c[i - 1].var()) tautology = true;
  return c;
}

inline bool Cnf::add_clause(std::span<const Lit> lits) {
  bool taut = false;
  Clause c = normalize_clause(lits, taut);
  if (taut) return false;
  for (Lit l : c) var_count = std::max(var_count, l.var());
  clauses.push_back(std::move(c));
  return true;
}

class DimacsError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Reads `p cnf V C` followed by 0-terminated clauses; `c` lines are
/// comments.
Cnf read_dimacs(std::istream &in);
void write_dimacs(std::ostream &out, Var var_count, const std::vector<Clause> &clauses);

} // namespace pinacolada::sat
