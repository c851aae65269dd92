#include "tcm/commands.hpp"

#include <chrono>

namespace tcm {

const std::string& CommandArgs::get(const std::string& key) const {
  auto it = values.find(key);
  if (it == values.end()) fail(Err::parse_error, "missing required option --" + key);
  return it->second;
}

std::string CommandArgs::get_or(const std::string& key, const std::string& fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

Intervention parse_do(const std::string& literal) {
  Intervention i;
  if (literal.empty()) return i;
  for (const auto& part : split_top(literal, ',')) {
    auto eq = part.find('=');
    if (eq == std::string::npos) fail(Err::parse_error, "intervention literal needs var=value: " + part);
    i.assignments[part.substr(0, eq)] = part.substr(eq + 1);
  }
  return i;
}

namespace {

Json function_table(const FinFunction& f) {
  Json out = Json::object();
  for (const auto& x : f.dom().elements()) out[x] = f(x);
  return out;
}

Json cone_to_json(const Cone& c) {
  Json legs = Json::object();
  for (const auto& [obj, leg] : c.legs) legs[obj] = function_table(leg);
  return Json{{"apex", c.apex.elements()}, {"legs", legs}};
}

Report cmd_limit(const CommandArgs& args, const Workspace& ws, bool colimits) {
  Report rep;
  rep.command = colimits ? "colimit" : "limit";
  std::string name = args.get("diagram");
  rep.inputs["diagram"] = name;
  const SetDiagram& d = ws.diagram(name);
  Cone cone = colimits ? colimit(d) : limit(d, args.limits);
  rep.result = cone_to_json(cone);
  rep.result["universal"] = is_universal_cone(cone, args.limits);
  return rep;
}

Json classification_to_json(const SubmodelClassification& c) {
  const ArrowOmega& om = arrow_omega();
  Json psi = Json::object(), chi = Json::object();
  for (const auto& u : c.psi.dom().elements()) psi[u] = om.alias(c.psi(u));
  for (const auto& v : c.chi.dom().elements()) chi[v] = om.alias(c.chi(v));
  return Json{{"psi", psi}, {"chi", chi}};
}

Report cmd_intervene(const CommandArgs& args, const Workspace& ws) {
  Report rep;
  rep.command = "intervene";
  std::string name = args.get("model");
  Intervention i = parse_do(args.get_or("do", ""));
  rep.inputs["model"] = name;
  rep.inputs["do"] = i.label();
  TcmObject m = solve(ws.model(name));
  InterventionResult r = intervene(m, i);
  rep.result["global"] = function_table(r.intervened.global);
  rep.result["submodel"] = Json{{"exogenous", r.square.h.dom().elements()},
                                {"endogenous", r.square.k.dom().elements()}};
  rep.result["classification"] = classification_to_json(classify_submodel(r.square));
  return rep;
}

Report cmd_outcome(const CommandArgs& args, const Workspace& ws) {
  Report rep;
  rep.command = "outcome";
  std::string name = args.get("model");
  Intervention i = parse_do(args.get_or("do", ""));
  std::string var = args.get("var");
  std::string u = args.get("u");
  rep.inputs = Json{{"model", name}, {"var", var}, {"do", i.label()}, {"u", u}};
  rep.result["value"] = potential_outcome(solve(ws.model(name)), var, i, u);
  return rep;
}

Report cmd_classify(const CommandArgs& args, const Workspace& ws) {
  Report rep;
  rep.command = "classify";
  if (args.has("model")) {
    std::string name = args.get("model");
    Intervention i = parse_do(args.get_or("do", ""));
    rep.inputs = Json{{"model", name}, {"do", i.label()}};
    InterventionResult r = intervene(solve(ws.model(name)), i);
    rep.result = classification_to_json(classify_submodel(r.square));
    return rep;
  }
  std::string name = args.get("graph");
  const FinGraph& g = ws.graph(name);
  SubGraph s{g, {}, {}};
  for (const auto& v : split_top(args.get_or("vertices", ""), ','))
    if (!v.empty()) s.vertex_members.insert(v);
  for (const auto& e : split_top(args.get_or("edges", ""), ','))
    if (!e.empty()) s.edge_members.insert(e);
  rep.inputs = Json{{"graph", name},
                    {"vertices", std::vector<std::string>(s.vertex_members.begin(), s.vertex_members.end())},
                    {"edges", std::vector<std::string>(s.edge_members.begin(), s.edge_members.end())}};
  if (!s.closed()) fail(Err::validation, "not a subgraph: an edge leaves the vertex set");
  GraphMorphism chi = classify_subgraph(s);
  rep.result["vertices"] = function_table(chi.vmap);
  rep.result["edges"] = function_table(chi.emap);
  rep.result["dot"] = to_dot(chi.cod);
  return rep;
}

Report cmd_force(const CommandArgs& args, const Workspace& ws) {
  Report rep;
  rep.command = "force";
  std::string name = args.get("formula");
  std::string stage = args.get("stage");
  std::string elem = args.get("elem");
  rep.inputs = Json{{"formula", name}, {"stage", stage}, {"elem", elem}};
  const FormulaEntry& fe = ws.formula(name);
  ToposContext ctx = build_context(ws, fe, args.limits);
  TypeExpr type = TypeExpr::named(fe.type_name);
  std::map<std::string, TypeExpr> declared{{fe.var, type}};
  TypedTerm formula = typecheck(ctx, parse_term(fe.text, declared), declared);
  ForcingContext fc = forcing_at(ctx, type, stage, elem);
  ClauseOptions opts;
  GrothendieckTopology topo;
  if (args.has("topology")) {
    topo = ws.topology(args.get("topology"));
    opts.topology = &topo;
    rep.inputs["topology"] = args.get("topology");
  }
  ForcingResult clauses = forces_by_clauses(ctx, fc, formula, opts);
  rep.result["forced"] = clauses.forced;
  if (!opts.topology) rep.result["image_containment"] = forces(ctx, fc, formula);
  rep.trace = trace_to_json(clauses.trace);
  return rep;
}

Report cmd_omega(const CommandArgs& args, const Workspace& ws) {
  Report rep;
  rep.command = "omega";
  std::string base_name = args.get("base");
  rep.inputs["base"] = base_name;
  FinCategory base = ws.category(base_name);
  Omega om = omega(base);
  Json per_object = Json::object();
  for (const auto& obj : base.objects()) {
    per_object[obj] = Json{{"count", om.psh.at(obj).size()},
                           {"sieves", om.psh.at(obj).elements()},
                           {"true", om.truth(obj)}};
  }
  Json restrictions = Json::object();
  for (const auto& a : base.arrows()) {
    if (base.is_identity(a.id)) continue;
    restrictions[a.id] = function_table(om.psh.restriction(a.id));
  }
  rep.result = Json{{"omega", per_object}, {"restrictions", restrictions}};
  if (base_name == "graph") rep.result["dot"] = to_dot(graph_omega().graph);
  return rep;
}

Report cmd_sheaf_check(const CommandArgs& args, const Workspace& ws) {
  Report rep;
  rep.command = "sheaf-check";
  std::string pname = args.get("presheaf");
  std::string jname = args.get("topology");
  rep.inputs = Json{{"presheaf", pname}, {"topology", jname}};
  SheafReport sr = is_sheaf(ws.presheaf(pname), ws.topology(jname));
  rep.result["sheaf"] = sr.sheaf;
  if (!sr.sheaf) {
    rep.result["detail"] = sr.detail;
    rep.failed = true;
  }
  return rep;
}

void push_check(Json& checks, bool& all_ok, const std::string& axiom, bool pass,
                const std::string& detail = "") {
  Json c{{"axiom", axiom}, {"pass", pass}};
  if (!detail.empty()) c["detail"] = detail;
  checks.push_back(c);
  all_ok = all_ok && pass;
}

void axiom_check_presheaf(const Presheaf& p, const Limits& lim, Json& checks, bool& ok) {
  auto rep = p.validate();
  push_check(checks, ok, "contravariant functoriality", rep.ok(),
             rep.ok() ? "" : rep.violations.front());
  Omega om = omega(p.base());
  auto subs = subobjects(p, lim);
  auto homs = all_morphisms(p, om.psh, lim);
  push_check(checks, ok, "classifier bijection |Sub(X)| = |Hom(X,Omega)|", subs.size() == homs.size(),
             std::to_string(subs.size()) + " subobjects, " + std::to_string(homs.size()) + " morphisms");
  bool roundtrip = true;
  for (const auto& s : subs) roundtrip = roundtrip && truepoint_pullback(classify(s)) == s;
  push_check(checks, ok, "classify/pullback round-trip", roundtrip);
  bool adjunction = true;
  for (const auto& z : subs)
    for (const auto& x : subs)
      for (const auto& y : subs)
        adjunction = adjunction && (sub_leq(z, heyting(HeytingOp::implies, x, y)) ==
                                    sub_leq(heyting(HeytingOp::meet, z, x), y));
  push_check(checks, ok, "Heyting adjunction", adjunction);
  bool inflation = true;
  for (const auto& s : subs) inflation = inflation && sub_leq(s, heyting_not(heyting_not(s)));
  push_check(checks, ok, "double negation inflationary", inflation);
  try {
    ProductPresheaf pp = psh_product(p, p);
    ExpPresheaf op = psh_exponential(p, om.psh, lim);
    push_check(checks, ok, "exponential count |Hom(XxX,Omega)| = |Hom(X,Omega^X)|",
               all_morphisms(pp.psh, om.psh, lim).size() == all_morphisms(p, op.psh, lim).size());
  } catch (const Error& e) {
    if (e.code() != Err::size_limit) throw;
    push_check(checks, ok, "exponential count |Hom(XxX,Omega)| = |Hom(X,Omega^X)|", false,
               "enumeration cap exceeded; rerun with a larger --max-enum");
  }
}

void axiom_check_scm(const CausalModel& m, Json& checks, bool& ok) {
  auto rep = m.validate();
  push_check(checks, ok, "model validation", rep.ok(), rep.ok() ? "" : rep.violations.front());
  if (!rep.ok()) return;
  TcmObject obj = solve(m);
  bool idem = true, classified = true;
  for (const auto& v : m.endogenous())
    for (const auto& val : v.domain.elements()) {
      Intervention i{{{v.name, val}}};
      auto r1 = intervene(obj, i);
      auto r2 = intervene(r1.intervened, i);
      idem = idem && r1.intervened.global == r2.intervened.global;
      SubPresheaf sub = square_as_subpresheaf(r1.square);
      classified = classified && truepoint_pullback(classify(sub)) == sub;
    }
  push_check(checks, ok, "intervention idempotence", idem);
  push_check(checks, ok, "classification square round-trip", classified);
  bool composition = true;
  for (const auto& v : m.endogenous())
    for (const auto& w : m.endogenous()) {
      if (v.name == w.name) continue;
      Intervention iv{{{v.name, v.domain.at(0)}}};
      Intervention iw{{{w.name, w.domain.at(0)}}};
      Intervention both{{{v.name, v.domain.at(0)}, {w.name, w.domain.at(0)}}};
      composition = composition && intervene(intervene(obj, iv).intervened, iw).intervened.global ==
                                       intervene(obj, both).intervened.global;
    }
  push_check(checks, ok, "disjoint interventions compose", composition);
}

void axiom_check_graph(const FinGraph& g, const Limits& lim, Json& checks, bool& ok) {
  auto subs = subgraphs(g, lim);
  std::size_t homs = 0;
  OmegaGraph og = graph_omega();
  for (const auto& vm : all_functions(g.vertices, og.graph.vertices, lim))
    for (const auto& em : all_functions(g.edges, og.graph.edges, lim))
      if (GraphMorphism{g, og.graph, vm, em}.homomorphic()) ++homs;
  push_check(checks, ok, "classifier bijection |SubG| = |Hom(G,Omega)|", subs.size() == homs,
             std::to_string(subs.size()) + " subgraphs, " + std::to_string(homs) + " homomorphisms");
  bool roundtrip = true;
  for (const auto& s : subs) {
    SubGraph back = subgraph_from_classifier(classify_subgraph(s));
    roundtrip = roundtrip && back.vertex_members == s.vertex_members && back.edge_members == s.edge_members;
  }
  push_check(checks, ok, "subobject round-trip", roundtrip);
}

void axiom_check_diagram(const SetDiagram& d, const Limits& lim, Json& checks, bool& ok) {
  auto rep = d.validate();
  push_check(checks, ok, "functoriality", rep.ok(), rep.ok() ? "" : rep.violations.front());
  if (!rep.ok()) return;
  push_check(checks, ok, "limit cone universal", is_universal_cone(limit(d, lim), lim));
  push_check(checks, ok, "colimit cone universal", is_universal_cone(colimit(d), lim));
}

Report cmd_axiom_check(const CommandArgs& args, const Workspace& ws) {
  Report rep;
  rep.command = "axiom-check";
  std::string name = args.get("object");
  rep.inputs["object"] = name;
  Json checks = Json::array();
  bool ok = true;
  if (ws.presheaves.count(name)) {
    axiom_check_presheaf(ws.presheaf(name), args.limits, checks, ok);
  } else if (ws.models.count(name)) {
    axiom_check_scm(ws.model(name), checks, ok);
  } else if (ws.graphs.count(name)) {
    axiom_check_graph(ws.graph(name), args.limits, checks, ok);
  } else if (ws.diagrams.count(name)) {
    axiom_check_diagram(ws.diagram(name), args.limits, checks, ok);
  } else if (ws.topologies.count(name)) {
    auto trep = check_topology(ws.topology(name));
    push_check(checks, ok, "topology axioms", trep.ok(), trep.ok() ? "" : trep.violations.front());
  } else if (ws.categories.count(name)) {
    auto crep = ws.category(name).validate();
    push_check(checks, ok, "category axioms", crep.ok(), crep.ok() ? "" : crep.violations.front());
  } else {
    fail(Err::unknown_object, "axiom-check: no loaded object named '" + name + "'");
  }
  rep.result = Json{{"checks", checks}, {"pass", ok}};
  rep.failed = !ok;
  return rep;
}

}  // namespace

Report run_command(const std::string& command, const CommandArgs& args, const Workspace& ws) {
  auto started = std::chrono::steady_clock::now();
  Report rep;
  if (command == "limit")
    rep = cmd_limit(args, ws, false);
  else if (command == "colimit")
    rep = cmd_limit(args, ws, true);
  else if (command == "intervene")
    rep = cmd_intervene(args, ws);
  else if (command == "outcome")
    rep = cmd_outcome(args, ws);
  else if (command == "classify")
    rep = cmd_classify(args, ws);
  else if (command == "force")
    rep = cmd_force(args, ws);
  else if (command == "omega")
    rep = cmd_omega(args, ws);
  else if (command == "sheaf-check")
    rep = cmd_sheaf_check(args, ws);
  else if (command == "axiom-check")
    rep = cmd_axiom_check(args, ws);
  else
    fail(Err::unknown_command, "unknown command '" + command + "'");
  if (args.timing) {
    auto elapsed = std::chrono::steady_clock::now() - started;
    rep.timing_ms = std::chrono::duration<double, std::milli>(elapsed).count();
  }
  return rep;
}

}  // namespace tcm
