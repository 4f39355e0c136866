#pragma once

// Brute-force concrete interpreter over the GOTO program. Shares only the
// value semantics (semantics.hpp) with the symbolic side.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pinacolada/goto_program.hpp"
#include "pinacolada/witness.hpp"

namespace pinacolada::oracle {

inline constexpr std::uint64_t kDefaultStepLimit = 1'000'000;

class InputExhausted : public std::runtime_error {
public:
  explicit InputExhausted(std::size_t needed)
      : std::runtime_error("nondet input #" + std::to_string(needed) + " requested but not supplied"),
        needed(needed) {}
  std::size_t needed;
};

class EnumerationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct RunResult {
  enum class Outcome : std::uint8_t { Violation, Exit, StepLimit };
  Outcome outcome = Outcome::Exit;
  ir::Location at;   // violated assertion, or where the run stopped
  int line = 0;
  std::size_t inputs_used = 0;
  std::uint64_t steps = 0;
  std::optional<std::int64_t> return_value; // of main
  /// Globals and main's locals at the end of the run, by variable name.
  std::map<std::string, std::int64_t> final_env;
};

struct RunOptions {
  unsigned width = 32;
  std::uint64_t step_limit = kDefaultStepLimit;
  std::size_t max_call_depth = 4096;
};

/// Runs `p` with nondet values taken from `inputs` in execution order.
/// Bool inputs are true when nonzero.
RunResult run_concrete(const ir::GotoProgram &p, std::span<const std::int64_t> inputs,
                       const RunOptions &opts = {});

struct OracleVerdict {
  enum class Outcome : std::uint8_t { Safe, Unsafe, StepLimit };
  Outcome outcome = Outcome::Safe;
  std::vector<std::int64_t> inputs; // first violating tuple (the used prefix)
  ir::Location at;
  int line = 0;
  std::uint64_t runs = 0;
};

std::string to_string(OracleVerdict::Outcome o);

/// Runs every input tuple in lexicographic order of signed values, skipping
/// tuples that only differ in slots a run never read. Throws
/// EnumerationError when a run needs more than `max_inputs` values.
OracleVerdict enumerate_verdict(const ir::GotoProgram &p, unsigned width, std::size_t max_inputs,
                                std::uint64_t step_limit = kDefaultStepLimit);

/// True iff feeding the witness values reproduces a violation of the
/// recorded assertion.
bool replay_witness(const ir::GotoProgram &p, const Witness &w, unsigned width,
                    std::uint64_t step_limit = kDefaultStepLimit);

std::string to_json(const ir::GotoProgram &p, const OracleVerdict &v);

} // namespace pinacolada::oracle
