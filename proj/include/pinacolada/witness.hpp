#pragma once

// Violation witnesses and run reports, with JSON and simplified GraphML
// serialisation.

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace pinacolada {

inline constexpr const char *kToolVersion = "pinacolada 0.1";

struct WitnessInput {
  int ordinal = 0;
  std::string variable; // source-level base name
  std::string value;    // decimal
  int line = 0;
  std::size_t step = 0; // position among all witness steps
  friend bool operator==(const WitnessInput &, const WitnessInput &) = default;
};

struct WitnessBranch {
  std::string function;
  std::size_t index = 0;
  int line = 0;
  bool direction = false;
  std::size_t step = 0;
  friend bool operator==(const WitnessBranch &, const WitnessBranch &) = default;
};

struct Witness {
  std::string function; // of the violated assertion
  std::size_t index = 0;
  int line = 0;
  std::vector<WitnessInput> nondet_inputs;
  std::vector<WitnessBranch> branch_trace;
  std::string tool_version = kToolVersion;
  std::map<std::string, std::string> config;
  friend bool operator==(const Witness &, const Witness &) = default;
};

struct ExploreStats {
  std::uint64_t states_explored = 0;
  std::uint64_t solver_queries = 0;
  std::uint64_t solver_instances_created = 0;
  std::uint64_t max_live_instances = 0;
  std::uint64_t max_frontier_size = 0;
  std::uint64_t clauses_added = 0;
  std::uint64_t folded_decisions = 0;
  std::uint64_t pruned_successors = 0;
  std::uint64_t paths_completed = 0;
  std::uint64_t paths_truncated = 0;
  std::uint64_t paths_infeasible = 0;
  friend bool operator==(const ExploreStats &, const ExploreStats &) = default;
};

struct RunReport {
  std::string outcome; // SAFE, UNSAFE or RESOURCE_LIMIT
  bool bounded = false;
  std::optional<Witness> witness;
  ExploreStats stats;
  double wall_time_sec = 0;
  std::string mode;
  std::string strategy;
  unsigned int_width = 32;
  std::optional<std::uint32_t> unwind;
  std::string limit_reason;
  std::vector<std::string> warnings;
  friend bool operator==(const RunReport &, const RunReport &) = default;
};

std::string to_json(const Witness &w);
std::string to_json(const RunReport &r);
Witness witness_from_json(const std::string &text);
RunReport report_from_json(const std::string &text);

/// A chain of nodes, one per input assignment or branch, ending in a
/// violation node.
void emit_graphml(std::ostream &out, const Witness &w, const std::string &program_file);
/// Metadata-only graph for a SAFE verdict.
void emit_graphml_stub(std::ostream &out, const std::string &program_file,
                       const std::map<std::string, std::string> &config);

} // namespace pinacolada
