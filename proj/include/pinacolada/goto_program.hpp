#pragma once

// Flat, branch-explicit instruction lists, one per function. Calls stay
// symbolic (CALL) so the explorer can inline them as it goes.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "pinacolada/expr.hpp"
#include "pinacolada/frontend.hpp"

namespace pinacolada::ir {

using frontend::VarId;

struct Variable {
  std::string name;    // unique within its owner (renamed on shadowing)
  std::string display; // source-level name used in witnesses
  Type type = Type::Int;
  bool global = false;
  int function = -1; // owner; -1 for globals
  bool temporary = false;
};

using Expr = Term<VarId>;
using ExprPtr = Expr::Ptr;

struct Assign {
  VarId var;
  ExprPtr value;
};
struct Branch {
  ExprPtr cond;
  std::size_t if_true;
  std::size_t if_false;
};
struct Goto {
  std::size_t target;
};
struct Assert {
  ExprPtr cond;
};
struct Assume {
  ExprPtr cond;
};
struct Call {
  std::optional<VarId> dest;
  int callee;
  std::vector<ExprPtr> args;
};
struct Return {
  ExprPtr value; // null for `return;` or falling off the end
};
struct Halt {};
struct Nondet {
  VarId var;
  Type kind;
};

using Op = std::variant<Assign, Branch, Goto, Assert, Assume, Call, Return, Halt, Nondet>;

struct Instruction {
  Op op;
  int line = 0;
  bool implicit = false; // synthesised by lowering, not from a source statement

  template <class T> bool is() const { return std::holds_alternative<T>(op); }
  template <class T> const T &as() const { return std::get<T>(op); }
};

struct GotoFunction {
  std::string name;
  std::vector<VarId> params;
  std::vector<VarId> locals;
  Type return_type = Type::Int;
  std::vector<Instruction> body;
  std::set<std::size_t> loop_heads;
};

struct GotoProgram {
  std::vector<GotoFunction> functions;
  std::vector<Variable> vars;
  std::vector<VarId> globals;
  int main_function = -1;

  int find_function(const std::string &name) const;
  const GotoFunction &main() const { return functions.at(static_cast<std::size_t>(main_function)); }
  std::string var_name(VarId v) const { return vars.at(v).name; }
};

struct Location {
  int function = -1;
  std::size_t index = 0;
  friend auto operator<=>(const Location &, const Location &) = default;
};

/// Compiles structured control flow into BRANCH/GOTO form. `&&` and `||`
/// become nested branches; every nondet call becomes a NONDET into a fresh
/// temporary; global initialisers run at the start of `main`.
GotoProgram lower(const frontend::Ast &ast);

/// Recomputes `loop_heads` from the back-edges of `fn`.
void compute_loop_heads(GotoFunction &fn);

struct Warning {
  int function = -1;
  std::size_t index = 0;
  int line = 0;
  std::string message;
};

/// Reports source instructions with no path from the function entry.
/// Branches on a literal constant only follow their taken edge.
std::vector<Warning> reachable_check(const GotoProgram &p);

/// Successor indices of instruction `i` in the intra-procedural graph.
std::vector<std::size_t> successors(const GotoFunction &fn, std::size_t i);

std::string render(const GotoProgram &p, const ExprPtr &e);
std::string render_instruction(const GotoProgram &p, const Instruction &ins);

/// `idx: OPCODE operands`, one function block after another.
std::string dump(const GotoProgram &p);

} // namespace pinacolada::ir
