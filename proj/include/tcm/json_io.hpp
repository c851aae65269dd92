#pragma once

#include "json.hpp"
#include "tcm/causal.hpp"
#include "tcm/graph.hpp"
#include "tcm/logic.hpp"

namespace tcm {

using Json = nlohmann::ordered_json;

// One JSON document per object, discriminated by a top-level "kind":
//   finset, finfunction, category, diagram, presheaf, graph, scm, topology,
//   formula, neighborhood
// Formulas carry their own ambient ("over" a model, graph, or presheaf) plus
// named predicate definitions.

struct PredicateSpec {
  std::string name;
  std::string kind;  // observational | outcome | subgraph | subpresheaf
  std::string var, value;
  std::map<std::string, std::string> clamp;                 // outcome
  std::vector<std::string> vertices, edges;                 // subgraph
  std::map<std::string, std::vector<std::string>> members;  // subpresheaf
};

struct FormulaEntry {
  std::string name;
  std::string var;        // the free variable
  std::string type_name;  // its type, as written in the text
  std::string over_kind;  // model | graph | presheaf
  std::string over_name;
  std::string text;
  std::vector<PredicateSpec> predicates;
};

struct Workspace {
  std::map<std::string, FinSet> sets;
  std::map<std::string, FinFunction> functions;
  std::map<std::string, FinCategory> categories;
  std::map<std::string, SetDiagram> diagrams;
  std::map<std::string, Presheaf> presheaves;
  std::map<std::string, FinGraph> graphs;
  std::map<std::string, CausalModel> models;
  std::map<std::string, GrothendieckTopology> topologies;
  std::map<std::string, FormulaEntry> formulas;
  std::map<std::string, NeighborhoodSystem> neighborhoods;

  // Stock bases resolve by name: interval, one, graph, parallel, cospan,
  // span, chain3, opens2; loaded categories shadow nothing.
  FinCategory category(const std::string& name) const;
  const FinSet& finset(const std::string& name) const;
  const FinFunction& finfunction(const std::string& name) const;
  const Presheaf& presheaf(const std::string& name) const;
  const FinGraph& graph(const std::string& name) const;
  const CausalModel& model(const std::string& name) const;
  const SetDiagram& diagram(const std::string& name) const;
  const GrothendieckTopology& topology(const std::string& name) const;
  const FormulaEntry& formula(const std::string& name) const;
  const NeighborhoodSystem& neighborhood(const std::string& name) const;
};

// Loading validates every object and collects failures per document.
Workspace load_workspace(const std::vector<std::string>& paths);
void load_document(Workspace& ws, const Json& doc);

Json workspace_to_json(const Workspace& ws);  // deterministic serialization

Json finset_to_json(const FinSet& s);
Json finfunction_to_json(const std::string& name, const FinFunction& f, const std::string& dom,
                         const std::string& cod);
Json category_to_json(const FinCategory& c);
Json diagram_to_json(const std::string& name, const SetDiagram& d);
Json graph_to_json(const std::string& name, const FinGraph& g);
Json scm_to_json(const CausalModel& m);
Json presheaf_to_json(const std::string& name, const std::string& base, const Presheaf& p);
Json topology_to_json(const std::string& name, const std::string& base,
                      const GrothendieckTopology& j);
Json formula_to_json(const FormulaEntry& f);
Json neighborhood_to_json(const std::string& name, const NeighborhoodSystem& n);

// The ambient topos of a formula, with its type and predicates registered.
ToposContext build_context(const Workspace& ws, const FormulaEntry& f, const Limits& lim = {});

// The JSON AST form of a term; formula documents may carry "ast" instead of
// (or alongside) "text".
Json term_to_json(const TermPtr& t);
TermPtr term_from_json(const Json& j, const std::map<std::string, TypeExpr>& free_vars = {});

Json trace_to_json(const TraceNode& t);

// A command report; serializes with stable key order. Timing is emitted only
// when requested so that identical inputs give byte-identical reports.
struct Report {
  std::string command;
  Json inputs = Json::object();
  Json result = Json::object();
  Json trace;  // null unless the command produced one
  double timing_ms = -1;
  bool failed = false;  // validation-style failure (exit code 2)

  Json to_json() const;
};

}  // namespace tcm
