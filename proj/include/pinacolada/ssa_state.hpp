#pragma once

// One unmerged symbolic execution path: SSA renaming, call stack, loop
// counters and the trace of committed decisions. Straight-line code is
// executed here without any solver contact; the explorer takes over at
// query points (BRANCH, ASSUME, ASSERT).

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pinacolada/goto_program.hpp"

namespace pinacolada::symex {

using ir::VarId;

struct SsaName {
  VarId var = 0;
  std::uint32_t frame = 0;
  std::uint32_t version = 0;
  friend auto operator<=>(const SsaName &, const SsaName &) = default;
};

/// Reference to an SSA value. `def_id` identifies the defining entry
/// across the whole exploration (0 for the initial version, which reads
/// as zero); the encoder memoises on it.
struct SsaRef {
  SsaName name;
  std::uint64_t def_id = 0;
  friend bool operator==(const SsaRef &a, const SsaRef &b) { return a.name == b.name; }
};

using SymExpr = Term<SsaRef>;
using SymExprPtr = SymExpr::Ptr;

struct Def {
  SsaName name;
  std::uint64_t id = 0;
  Type type = Type::Int;
  SymExprPtr value;      // null for a fresh nondet input
  int nondet_ordinal = -1; // position in nondet_inputs when value is null
};

/// Append-only list with structurally shared prefixes.
template <class T> class PersistentList {
  struct Node {
    T value;
    mutable std::shared_ptr<const Node> prev; // moved out on release only
    std::size_t size;
  };

public:
  PersistentList() = default;
  PersistentList(const PersistentList &) = default;
  PersistentList(PersistentList &&) noexcept = default;
  PersistentList &operator=(PersistentList other) noexcept {
    std::swap(head_, other.head_);
    return *this;
  }
  // Unlinks unshared nodes one by one; the default recursive release
  // overflows the stack on paths with millions of entries.
  ~PersistentList() {
    std::shared_ptr<const Node> n = std::move(head_);
    while (n && n.use_count() == 1) {
      std::shared_ptr<const Node> prev = std::move(n->prev);
      n = std::move(prev);
    }
  }

  std::size_t size() const { return head_ ? head_->size : 0; }
  bool empty() const { return size() == 0; }

  void push_back(T v) {
    head_ = std::make_shared<const Node>(Node{std::move(v), head_, size() + 1});
  }
  const T &back() const { return head_->value; }

  /// Elements with index in [from, size()) in order.
  std::vector<const T *> suffix(std::size_t from) const {
    std::vector<const T *> out;
    for (const Node *n = head_.get(); n && n->size > from; n = n->prev.get())
      out.push_back(&n->value);
    return {out.rbegin(), out.rend()};
  }
  std::vector<const T *> all() const { return suffix(0); }

private:
  std::shared_ptr<const Node> head_;
};

struct PathEvent {
  enum class Kind : std::uint8_t { Branch, Assume, Assert, Call, Return, Nondet };
  Kind kind = Kind::Branch;
  ir::Location at;
  bool direction = false; // meaningful for Branch only
  SymExprPtr cond;        // Branch/Assume/Assert: the committed condition
  std::string detail;     // callee name, nondet variable
};

struct Frame {
  int function = 0;
  std::size_t return_pc = 0;
  std::optional<VarId> dest;
  std::uint32_t ordinal = 0;
};

struct LoopKey {
  int function;
  std::size_t head;
  std::uint32_t frame;
  friend auto operator<=>(const LoopKey &, const LoopKey &) = default;
};

struct SymbolicState {
  int function = 0;
  std::size_t pc = 0;
  std::vector<Frame> frames;
  std::uint32_t next_frame = 1;
  // (var, frame) -> latest reference; absent means version 0.
  std::map<std::pair<VarId, std::uint32_t>, SsaRef> versions;
  PersistentList<Def> defs;
  PersistentList<PathEvent> trace;
  std::map<LoopKey, std::uint32_t> loop_counters;
  std::vector<SsaRef> nondet_inputs;
  bool truncated = false;
  bool finished = false;

  std::uint32_t frame() const { return frames.back().ordinal; }
  ir::Location location() const { return {function, pc}; }
};

class CallDepthExceeded : public std::runtime_error {
public:
  explicit CallDepthExceeded(std::size_t depth)
      : std::runtime_error("call depth exceeded " + std::to_string(depth) + " frames") {}
};

/// Shared by every state of one exploration: the program, the limits and
/// the def-id source.
class SsaContext {
public:
  explicit SsaContext(const ir::GotoProgram &program, std::optional<std::uint32_t> unwind = {},
                      std::size_t max_call_depth = 4096)
      : program_(program), unwind_(unwind), max_call_depth_(max_call_depth) {}

  const ir::GotoProgram &program() const { return program_; }
  std::optional<std::uint32_t> unwind_limit() const { return unwind_; }
  std::size_t max_call_depth() const { return max_call_depth_; }
  std::uint64_t next_def_id() { return next_id_++; }

private:
  const ir::GotoProgram &program_;
  std::optional<std::uint32_t> unwind_;
  std::size_t max_call_depth_;
  std::uint64_t next_id_ = 1;
};

SymbolicState initial_state(const ir::GotoProgram &p);

/// Current SSA reference of `var` in the active frame (globals live in
/// frame 0).
SsaRef current(const SsaContext &ctx, const SymbolicState &s, VarId var);

/// Rewrites a program expression over the current SSA names.
SymExprPtr rewrite(const SsaContext &ctx, const SymbolicState &s, const ir::ExprPtr &e);

void assign(SsaContext &ctx, SymbolicState &s, VarId var, const ir::ExprPtr &value);
void assign_nondet(SsaContext &ctx, SymbolicState &s, VarId var, Type kind);

/// Moves control to `target` in the current function, maintaining loop
/// counters. Sets `truncated` when a back-edge exceeds the unwind limit.
void jump(const SsaContext &ctx, SymbolicState &s, std::size_t target);

/// Two children of a BRANCH at `s.pc`, with the branch recorded in their
/// traces. Feasibility is not considered here.
std::pair<SymbolicState, SymbolicState> fork(const SsaContext &ctx, const SymbolicState &s,
                                             const SymExprPtr &cond);

/// Takes one direction of the BRANCH at `s.pc` in place.
void take_branch(const SsaContext &ctx, SymbolicState &s, const SymExprPtr &cond, bool direction);

/// Records a passed ASSUME/ASSERT at `s.pc` and moves past it.
void commit_condition(const SsaContext &ctx, SymbolicState &s, PathEvent::Kind kind,
                      const SymExprPtr &cond);

void enter_call(SsaContext &ctx, SymbolicState &s, const ir::Call &call);
void exit_call(SsaContext &ctx, SymbolicState &s, const ir::Return &ret);

enum class Stop : std::uint8_t { QueryPoint, Finished, Truncated };

/// Executes straight-line instructions until the next query point or the
/// end of the path.
Stop advance(SsaContext &ctx, SymbolicState &s);

/// Rebuilds a state from the initial state by following the decisions
/// recorded in `trace`.
SymbolicState replay(SsaContext &ctx, const std::vector<const PathEvent *> &trace);

/// State equality modulo def ids.
bool equivalent(const SymbolicState &a, const SymbolicState &b);

std::string render(const ir::GotoProgram &p, const SsaName &n);
std::string render(const ir::GotoProgram &p, const SymExprPtr &e);

} // namespace pinacolada::symex
