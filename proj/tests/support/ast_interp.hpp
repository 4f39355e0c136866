#pragma once

// Tree-walking interpreter over the checked AST. It shares nothing with the
// library's semantics header: arithmetic is redone here from scratch so it
// can serve as an independent reference for lowering and the oracle.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "pinacolada/frontend.hpp"

namespace testsupport {

struct OutOfInputs : std::runtime_error {
  OutOfInputs() : std::runtime_error("out of inputs") {}
};

struct AstRun {
  enum class Outcome { Violation, Exit, StepLimit };
  Outcome outcome = Outcome::Exit;
  int line = 0; // of the violated assert
  bool assume_failed = false;
  std::size_t inputs_used = 0;
  std::optional<std::int64_t> return_value;
  /// Globals and main's locals by AST variable id, at a normal exit.
  std::map<pinacolada::frontend::VarId, std::int64_t> env;
};

AstRun run_ast(const pinacolada::frontend::Ast &ast, std::span<const std::int64_t> inputs,
               unsigned width, std::uint64_t step_limit = 200000, std::size_t max_depth = 256);

/// Reference arithmetic, also used by the encoder tests as the native side.
std::int64_t ref_sext(std::uint64_t bits, unsigned width);
std::int64_t ref_binary(pinacolada::BinaryOp op, std::int64_t a, std::int64_t b, unsigned width);
std::int64_t ref_unary(pinacolada::UnaryOp op, std::int64_t a, unsigned width);

} // namespace testsupport
