#include "pinacolada/witness.hpp"

#include <algorithm>
#include <json.hpp>

namespace pinacolada {

using nlohmann::ordered_json;

namespace {

ordered_json witness_json(const Witness &w) {
  ordered_json j;
  j["kind"] = "violation";
  j["assert_location"] = {{"function", w.function}, {"index", w.index}, {"line", w.line}};
  ordered_json inputs = ordered_json::array();
  for (const auto &in : w.nondet_inputs) {
    inputs.push_back({{"ordinal", in.ordinal},
                      {"variable", in.variable},
                      {"value", in.value},
                      {"line", in.line},
                      {"step", in.step}});
  }
  j["nondet_inputs"] = inputs;
  ordered_json trace = ordered_json::array();
  for (const auto &b : w.branch_trace) {
    trace.push_back({{"function", b.function},
                     {"index", b.index},
                     {"line", b.line},
                     {"direction", b.direction},
                     {"step", b.step}});
  }
  j["branch_trace"] = trace;
  j["tool_version"] = w.tool_version;
  j["config"] = w.config;
  return j;
}

Witness witness_from(const ordered_json &j) {
  Witness w;
  const auto &loc = j.at("assert_location");
  w.function = loc.at("function").get<std::string>();
  w.index = loc.at("index").get<std::size_t>();
  w.line = loc.at("line").get<int>();
  for (const auto &in : j.at("nondet_inputs")) {
    w.nondet_inputs.push_back({in.at("ordinal").get<int>(), in.at("variable").get<std::string>(),
                               in.at("value").get<std::string>(), in.at("line").get<int>(),
                               in.at("step").get<std::size_t>()});
  }
  for (const auto &b : j.at("branch_trace")) {
    w.branch_trace.push_back({b.at("function").get<std::string>(), b.at("index").get<std::size_t>(),
                              b.at("line").get<int>(), b.at("direction").get<bool>(),
                              b.at("step").get<std::size_t>()});
  }
  w.tool_version = j.at("tool_version").get<std::string>();
  w.config = j.at("config").get<std::map<std::string, std::string>>();
  return w;
}

std::string xml_escape(const std::string &s) {
  std::string out;
  for (char c : s) {
    switch (c) {
    case '&': out += "&amp;"; break;
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '"': out += "&quot;"; break;
    case '\'': out += "&apos;"; break;
    default: out += c;
    }
  }
  return out;
}

void graphml_header(std::ostream &out, const std::string &type, const std::string &program_file,
                    const std::map<std::string, std::string> &config) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
      << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      << "  <key id=\"witness-type\" for=\"graph\" attr.name=\"witness-type\" attr.type=\"string\"/>\n"
      << "  <key id=\"producer\" for=\"graph\" attr.name=\"producer\" attr.type=\"string\"/>\n"
      << "  <key id=\"programfile\" for=\"graph\" attr.name=\"programfile\" attr.type=\"string\"/>\n"
      << "  <key id=\"config\" for=\"graph\" attr.name=\"config\" attr.type=\"string\"/>\n"
      << "  <key id=\"entry\" for=\"node\" attr.name=\"isEntryNode\" attr.type=\"boolean\">"
         "<default>false</default></key>\n"
      << "  <key id=\"violation\" for=\"node\" attr.name=\"isViolationNode\" attr.type=\"boolean\">"
         "<default>false</default></key>\n"
      << "  <key id=\"assumption\" for=\"edge\" attr.name=\"assumption\" attr.type=\"string\"/>\n"
      << "  <key id=\"startline\" for=\"edge\" attr.name=\"startline\" attr.type=\"int\"/>\n"
      << "  <key id=\"control\" for=\"edge\" attr.name=\"control\" attr.type=\"string\"/>\n"
      << "  <graph edgedefault=\"directed\">\n"
      << "    <data key=\"witness-type\">" << type << "</data>\n"
      << "    <data key=\"producer\">" << xml_escape(kToolVersion) << "</data>\n"
      << "    <data key=\"programfile\">" << xml_escape(program_file) << "</data>\n";
  std::string echo;
  for (const auto &[k, v] : config) echo += (echo.empty() ? "" : " ") + k + "=" + v;
  out << "    <data key=\"config\">" << xml_escape(echo) << "</data>\n";
}

} // namespace

std::string to_json(const Witness &w) { return witness_json(w).dump(2); }

std::string to_json(const RunReport &r) {
  ordered_json j;
  j["outcome"] = r.outcome;
  j["bounded"] = r.bounded;
  j["witness"] = r.witness ? witness_json(*r.witness) : ordered_json(nullptr);
  const auto &s = r.stats;
  j["stats"] = {{"states_explored", s.states_explored},
                {"solver_queries", s.solver_queries},
                {"solver_instances_created", s.solver_instances_created},
                {"max_live_instances", s.max_live_instances},
                {"max_frontier_size", s.max_frontier_size},
                {"clauses_added", s.clauses_added},
                {"folded_decisions", s.folded_decisions},
                {"pruned_successors", s.pruned_successors},
                {"paths_completed", s.paths_completed},
                {"paths_truncated", s.paths_truncated},
                {"paths_infeasible", s.paths_infeasible}};
  j["wall_time_sec"] = r.wall_time_sec;
  j["mode"] = r.mode;
  j["strategy"] = r.strategy;
  j["int_width"] = r.int_width;
  j["unwind"] = r.unwind ? ordered_json(*r.unwind) : ordered_json(nullptr);
  j["limit_reason"] = r.limit_reason;
  j["warnings"] = r.warnings;
  return j.dump(2);
}

Witness witness_from_json(const std::string &text) {
  return witness_from(ordered_json::parse(text));
}

RunReport report_from_json(const std::string &text) {
  const auto j = ordered_json::parse(text);
  RunReport r;
  r.outcome = j.at("outcome").get<std::string>();
  r.bounded = j.at("bounded").get<bool>();
  if (!j.at("witness").is_null()) r.witness = witness_from(j.at("witness"));
  const auto &s = j.at("stats");
  auto &o = r.stats;
  o.states_explored = s.at("states_explored").get<std::uint64_t>();
  o.solver_queries = s.at("solver_queries").get<std::uint64_t>();
  o.solver_instances_created = s.at("solver_instances_created").get<std::uint64_t>();
  o.max_live_instances = s.at("max_live_instances").get<std::uint64_t>();
  o.max_frontier_size = s.at("max_frontier_size").get<std::uint64_t>();
  o.clauses_added = s.at("clauses_added").get<std::uint64_t>();
  o.folded_decisions = s.at("folded_decisions").get<std::uint64_t>();
  o.pruned_successors = s.at("pruned_successors").get<std::uint64_t>();
  o.paths_completed = s.at("paths_completed").get<std::uint64_t>();
  o.paths_truncated = s.at("paths_truncated").get<std::uint64_t>();
  o.paths_infeasible = s.at("paths_infeasible").get<std::uint64_t>();
  r.wall_time_sec = j.at("wall_time_sec").get<double>();
  r.mode = j.at("mode").get<std::string>();
  r.strategy = j.at("strategy").get<std::string>();
  r.int_width = j.at("int_width").get<unsigned>();
  if (!j.at("unwind").is_null()) r.unwind = j.at("unwind").get<std::uint32_t>();
  r.limit_reason = j.at("limit_reason").get<std::string>();
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  return r;
}

void emit_graphml(std::ostream &out, const Witness &w, const std::string &program_file) {
  graphml_header(out, "violation_witness", program_file, w.config);

  struct Step {
    std::size_t order;
    int line;
    std::string assumption;
    std::string control;
  };
  std::vector<Step> steps;
  for (const auto &in : w.nondet_inputs)
    steps.push_back({in.step, in.line, in.variable + " == " + in.value, ""});
  for (const auto &br : w.branch_trace)
    steps.push_back({br.step, br.line, "", br.direction ? "condition-true" : "condition-false"});
  std::stable_sort(steps.begin(), steps.end(),
                   [](const Step &a, const Step &b) { return a.order < b.order; });

  out << "    <node id=\"N0\"><data key=\"entry\">true</data></node>\n";
  for (std::size_t i = 0; i < steps.size(); ++i) out << "    <node id=\"N" << (i + 1) << "\"/>\n";
  const std::size_t last = steps.size() + 1;
  out << "    <node id=\"N" << last << "\"><data key=\"violation\">true</data></node>\n";
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto &s = steps[i];
    out << "    <edge source=\"N" << i << "\" target=\"N" << (i + 1) << "\">";
    if (!s.assumption.empty())
      out << "<data key=\"assumption\">" << xml_escape(s.assumption) << "</data>";
    out << "<data key=\"startline\">" << s.line << "</data>";
    if (!s.control.empty()) out << "<data key=\"control\">" << s.control << "</data>";
    out << "</edge>\n";
  }
  out << "    <edge source=\"N" << steps.size() << "\" target=\"N" << last << "\">"
      << "<data key=\"startline\">" << w.line << "</data></edge>\n";
  out << "  </graph>\n</graphml>\n";
}

void emit_graphml_stub(std::ostream &out, const std::string &program_file,
                       const std::map<std::string, std::string> &config) {
  graphml_header(out, "correctness_witness", program_file, config);
  out << "    <node id=\"N0\"><data key=\"entry\">true</data></node>\n";
  out << "  </graph>\n</graphml>\n";
}

} // namespace pinacolada
