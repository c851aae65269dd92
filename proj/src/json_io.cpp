#include "tcm/json_io.hpp"

#include <algorithm>
#include <fstream>
#include <functional>

namespace tcm {

// ---- workspace lookups -------------------------------------------------------

FinCategory Workspace::category(const std::string& name) const {
  auto it = categories.find(name);
  if (it != categories.end()) return it->second;
  if (name == "interval") return interval_base();
  if (name == "one") return one_object_category();
  if (name == "graph") return graph_base();
  if (name == "parallel") return parallel_pair_category();
  if (name == "cospan") return cospan_category();
  if (name == "span") return span_category();
  if (name == "chain3") return chain3_category();
  if (name == "opens2") return poset_square_category();
  fail(Err::unknown_object, "no category named '" + name + "'");
}

namespace {

template <typename M>
const typename M::mapped_type& lookup(const M& m, const std::string& name, const char* what) {
  auto it = m.find(name);
  if (it == m.end()) fail(Err::unknown_object, std::string("no ") + what + " named '" + name + "'");
  return it->second;
}

}  // namespace

const FinSet& Workspace::finset(const std::string& name) const { return lookup(sets, name, "finset"); }
const FinFunction& Workspace::finfunction(const std::string& name) const {
  return lookup(functions, name, "finfunction");
}
const Presheaf& Workspace::presheaf(const std::string& name) const {
  return lookup(presheaves, name, "presheaf");
}
const FinGraph& Workspace::graph(const std::string& name) const { return lookup(graphs, name, "graph"); }
const CausalModel& Workspace::model(const std::string& name) const { return lookup(models, name, "scm"); }
const SetDiagram& Workspace::diagram(const std::string& name) const {
  return lookup(diagrams, name, "diagram");
}
const GrothendieckTopology& Workspace::topology(const std::string& name) const {
  return lookup(topologies, name, "topology");
}
const FormulaEntry& Workspace::formula(const std::string& name) const {
  return lookup(formulas, name, "formula");
}
const NeighborhoodSystem& Workspace::neighborhood(const std::string& name) const {
  return lookup(neighborhoods, name, "neighborhood system");
}

// ---- loading -------------------------------------------------------------------

namespace {

std::string str_field(const Json& doc, const std::string& key) {
  if (!doc.contains(key) || !doc[key].is_string())
    fail(Err::parse_error, "missing string field '" + key + "'");
  return doc[key].get<std::string>();
}

std::vector<std::string> str_list(const Json& j) {
  std::vector<std::string> out;
  for (const auto& e : j) out.push_back(e.get<std::string>());
  return out;
}

std::map<std::string, std::string> str_map(const Json& j) {
  std::map<std::string, std::string> out;
  for (auto it = j.begin(); it != j.end(); ++it) out.emplace(it.key(), it.value().get<std::string>());
  return out;
}

FinFunction function_from(const Json& table, const FinSet& dom, const FinSet& cod) {
  return FinFunction(dom, cod, str_map(table));
}

void load_finset(Workspace& ws, const Json& doc) {
  // primitive sets are canonically sorted
  ws.sets.insert_or_assign(str_field(doc, "name"),
                           FinSet::lex(str_field(doc, "name"), str_list(doc.at("elements"))));
}

void load_finfunction(Workspace& ws, const Json& doc) {
  const FinSet& dom = ws.finset(str_field(doc, "dom"));
  const FinSet& cod = ws.finset(str_field(doc, "cod"));
  ws.functions.insert_or_assign(str_field(doc, "name"), function_from(doc.at("table"), dom, cod));
}

void load_category(Workspace& ws, const Json& doc) {
  std::string name = str_field(doc, "name");
  std::vector<std::string> objects = str_list(doc.at("objects"));
  std::vector<Arrow> arrows;
  if (doc.contains("arrows"))
    for (const auto& a : doc["arrows"])
      arrows.push_back({a.at("id").get<std::string>(), a.at("src").get<std::string>(),
                        a.at("tgt").get<std::string>()});
  FinCategory cat;
  if (doc.value("free", false)) {
    cat = free_category(name, objects, arrows);
  } else {
    FinCategoryBuilder b(name);
    for (const auto& o : objects) b.object(o);
    for (const auto& a : arrows) b.arrow(a.id, a.src, a.tgt);
    if (doc.contains("compose"))
      for (const auto& r : doc["compose"])
        b.compose_rule(r.at(0).get<std::string>(), r.at(1).get<std::string>(), r.at(2).get<std::string>());
    cat = b.build();
  }
  auto rep = cat.validate();
  if (!rep.ok()) fail(Err::validation, "category '" + name + "': " + rep.violations.front());
  ws.categories.insert_or_assign(name, std::move(cat));
}

void load_diagram(Workspace& ws, const Json& doc) {
  std::string name = str_field(doc, "name");
  FinCategory shape = ws.category(str_field(doc, "shape"));
  std::map<std::string, FinSet> objects;
  for (auto it = doc.at("sets").begin(); it != doc.at("sets").end(); ++it)
    objects.emplace(it.key(), ws.finset(it.value().get<std::string>()));
  std::map<std::string, FinFunction> arrows;
  if (doc.contains("functions"))
    for (auto it = doc.at("functions").begin(); it != doc.at("functions").end(); ++it) {
      if (it.value().is_string()) {
        arrows.emplace(it.key(), ws.finfunction(it.value().get<std::string>()));
      } else {
        const Arrow& a = shape.arrow(it.key());
        arrows.emplace(it.key(), function_from(it.value(), objects.at(a.src), objects.at(a.tgt)));
      }
    }
  SetDiagram d(std::move(shape), std::move(objects), std::move(arrows));
  auto rep = d.validate();
  if (!rep.ok()) fail(Err::validation, "diagram '" + name + "': " + rep.violations.front());
  ws.diagrams.insert_or_assign(name, std::move(d));
}

void load_presheaf(Workspace& ws, const Json& doc) {
  std::string name = str_field(doc, "name");
  FinCategory base = ws.category(str_field(doc, "base"));
  std::map<std::string, FinSet> at;
  for (auto it = doc.at("at").begin(); it != doc.at("at").end(); ++it)
    at.emplace(it.key(), FinSet(name + "(" + it.key() + ")", str_list(it.value())));
  std::map<std::string, FinFunction> restrict;
  if (doc.contains("restrict"))
    for (auto it = doc.at("restrict").begin(); it != doc.at("restrict").end(); ++it) {
      const Arrow& a = base.arrow(it.key());
      restrict.emplace(it.key(), function_from(it.value(), at.at(a.tgt), at.at(a.src)));
    }
  Presheaf p(std::move(base), std::move(at), std::move(restrict));
  auto rep = p.validate();
  if (!rep.ok()) fail(Err::validation, "presheaf '" + name + "': " + rep.violations.front());
  ws.presheaves.insert_or_assign(name, std::move(p));
}

void load_graph(Workspace& ws, const Json& doc) {
  std::string name = str_field(doc, "name");
  std::vector<std::array<std::string, 3>> edges;
  if (doc.contains("edges"))
    for (const auto& e : doc["edges"])
      edges.push_back({e.at(0).get<std::string>(), e.at(1).get<std::string>(), e.at(2).get<std::string>()});
  std::vector<std::string> vertices = str_list(doc.at("vertices"));
  std::sort(vertices.begin(), vertices.end());
  ws.graphs.insert_or_assign(name, make_graph(name, std::move(vertices), std::move(edges)));
}

void load_scm(Workspace& ws, const Json& doc) {
  std::string name = str_field(doc, "name");
  auto read_vars = [&](const char* key) {
    std::vector<Variable> out;
    if (!doc.contains(key)) return out;
    for (const auto& v : doc[key])
      out.push_back({v.at("name").get<std::string>(),
                     FinSet::lex(v.at("name").get<std::string>(), str_list(v.at("domain")))});
    return out;
  };
  std::vector<Variable> exogenous = read_vars("exogenous");
  std::vector<Variable> endogenous = read_vars("endogenous");
  auto domain_of = [&](const std::string& var) -> const FinSet& {
    for (const auto& v : exogenous)
      if (v.name == var) return v.domain;
    for (const auto& v : endogenous)
      if (v.name == var) return v.domain;
    fail(Err::unknown_variable, "mechanism parent '" + var + "' is not a variable of '" + name + "'");
  };
  std::map<std::string, Mechanism> mechanisms;
  if (doc.contains("mechanisms"))
    for (auto it = doc.at("mechanisms").begin(); it != doc.at("mechanisms").end(); ++it) {
      std::vector<std::string> parents = str_list(it.value().at("parents"));
      std::vector<FinSet> pdoms;
      for (const auto& p : parents) pdoms.push_back(domain_of(p));
      FinSet dom = tuple_product("parents(" + it.key() + ")", pdoms).set;
      mechanisms.emplace(it.key(),
                         Mechanism{parents, function_from(it.value().at("table"), dom, domain_of(it.key()))});
    }
  CausalModel m(name, std::move(exogenous), std::move(endogenous), std::move(mechanisms));
  auto rep = m.validate();
  if (!rep.ok()) fail(Err::validation, "scm '" + name + "': " + rep.violations.front());
  ws.models.insert_or_assign(name, std::move(m));
}

void load_topology(Workspace& ws, const Json& doc) {
  std::string name = str_field(doc, "name");
  GrothendieckTopology j;
  j.base = ws.category(str_field(doc, "base"));
  if (doc.contains("covers"))
    for (auto it = doc.at("covers").begin(); it != doc.at("covers").end(); ++it)
      for (const auto& arrows : it.value()) {
        Sieve s;
        s.on = it.key();
        for (const auto& a : arrows) s.arrows.insert(a.get<std::string>());
        j.covers[it.key()].push_back(std::move(s));
      }
  auto rep = check_topology(j);
  if (!rep.ok()) fail(Err::validation, "topology '" + name + "': " + rep.violations.front());
  ws.topologies.insert_or_assign(name, std::move(j));
}

void load_formula(Workspace& ws, const Json& doc) {
  FormulaEntry f;
  f.name = str_field(doc, "name");
  f.var = str_field(doc, "var");
  f.type_name = str_field(doc, "type");
  if (doc.contains("text")) {
    f.text = str_field(doc, "text");
  } else if (doc.contains("ast")) {
    f.text = term_to_text(term_from_json(doc["ast"], {{f.var, parse_type(f.type_name)}}));
  } else {
    fail(Err::parse_error, "formula '" + f.name + "' needs a text or ast field");
  }
  const Json& over = doc.at("over");
  if (over.contains("model")) {
    f.over_kind = "model";
    f.over_name = over["model"].get<std::string>();
  } else if (over.contains("graph")) {
    f.over_kind = "graph";
    f.over_name = over["graph"].get<std::string>();
  } else if (over.contains("presheaf")) {
    f.over_kind = "presheaf";
    f.over_name = over["presheaf"].get<std::string>();
  } else {
    fail(Err::parse_error, "formula '" + f.name + "' needs over.model, over.graph or over.presheaf");
  }
  if (doc.contains("predicates"))
    for (const auto& p : doc["predicates"]) {
      PredicateSpec ps;
      ps.name = p.at("name").get<std::string>();
      ps.kind = p.at("kind").get<std::string>();
      if (p.contains("var")) ps.var = p["var"].get<std::string>();
      if (p.contains("value")) ps.value = p["value"].get<std::string>();
      if (p.contains("do")) ps.clamp = str_map(p["do"]);
      if (p.contains("vertices")) ps.vertices = str_list(p["vertices"]);
      if (p.contains("edges")) ps.edges = str_list(p["edges"]);
      if (p.contains("members"))
        for (auto it = p.at("members").begin(); it != p.at("members").end(); ++it)
          ps.members.emplace(it.key(), str_list(it.value()));
      f.predicates.push_back(std::move(ps));
    }
  // parse now so syntax errors surface at load time
  parse_term(f.text, {{f.var, parse_type(f.type_name)}});
  ws.formulas.insert_or_assign(f.name, std::move(f));
}

void load_neighborhood(Workspace& ws, const Json& doc) {
  NeighborhoodSystem n;
  std::string name = str_field(doc, "name");
  n.worlds = FinSet::lex(name, str_list(doc.at("worlds")));
  if (doc.contains("neighborhoods"))
    for (auto it = doc.at("neighborhoods").begin(); it != doc.at("neighborhoods").end(); ++it)
      for (const auto& hood : it.value()) {
        std::set<std::string> h;
        for (const auto& w : hood) {
          n.worlds.index_or_throw(w.get<std::string>());
          h.insert(w.get<std::string>());
        }
        n.neighborhoods[it.key()].push_back(std::move(h));
      }
  if (doc.contains("valuation"))
    for (auto it = doc.at("valuation").begin(); it != doc.at("valuation").end(); ++it) {
      auto worlds = str_list(it.value());
      n.valuation.emplace(it.key(), std::set<std::string>(worlds.begin(), worlds.end()));
    }
  ws.neighborhoods.insert_or_assign(name, std::move(n));
}

}  // namespace

void load_document(Workspace& ws, const Json& doc) {
  std::string kind = str_field(doc, "kind");
  if (kind == "finset") return load_finset(ws, doc);
  if (kind == "finfunction") return load_finfunction(ws, doc);
  if (kind == "category") return load_category(ws, doc);
  if (kind == "diagram") return load_diagram(ws, doc);
  if (kind == "presheaf") return load_presheaf(ws, doc);
  if (kind == "graph") return load_graph(ws, doc);
  if (kind == "scm") return load_scm(ws, doc);
  if (kind == "topology") return load_topology(ws, doc);
  if (kind == "formula") return load_formula(ws, doc);
  if (kind == "neighborhood") return load_neighborhood(ws, doc);
  fail(Err::parse_error, "unknown document kind '" + kind + "'");
}

Workspace load_workspace(const std::vector<std::string>& paths) {
  Workspace ws;
  std::vector<std::string> failures;
  for (const auto& path : paths) {
    std::ifstream in(path);
    if (!in) fail(Err::parse_error, "cannot open '" + path + "'");
    Json doc;
    try {
      doc = Json::parse(in);
    } catch (const std::exception& e) {
      fail(Err::parse_error, "'" + path + "': " + e.what());
    }
    try {
      if (doc.is_array())
        for (const auto& d : doc) load_document(ws, d);
      else
        load_document(ws, doc);
    } catch (const Error& e) {
      if (e.code() == Err::parse_error || e.code() == Err::size_limit) throw;
      failures.push_back("'" + path + "': " + e.what());
    }
  }
  if (!failures.empty()) fail(Err::validation, join(failures, "; "));
  return ws;
}

// ---- serialization -----------------------------------------------------------------

Json finset_to_json(const FinSet& s) {
  return Json{{"kind", "finset"}, {"name", s.name()}, {"elements", s.elements()}};
}

Json finfunction_to_json(const std::string& name, const FinFunction& f, const std::string& dom,
                         const std::string& cod) {
  Json table = Json::object();
  for (const auto& x : f.dom().elements()) table[x] = f(x);
  return Json{{"kind", "finfunction"}, {"name", name}, {"dom", dom}, {"cod", cod}, {"table", table}};
}

Json category_to_json(const FinCategory& c) {
  Json arrows = Json::array();
  Json compose = Json::array();
  for (const auto& a : c.arrows()) {
    if (c.is_identity(a.id)) continue;
    arrows.push_back(Json{{"id", a.id}, {"src", a.src}, {"tgt", a.tgt}});
  }
  for (const auto& g : c.arrows())
    for (const auto& f : c.arrows()) {
      if (c.is_identity(g.id) || c.is_identity(f.id) || f.tgt != g.src) continue;
      compose.push_back(Json::array({g.id, f.id, c.compose_ids(g.id, f.id)}));
    }
  return Json{{"kind", "category"},
              {"name", c.name()},
              {"objects", c.objects()},
              {"arrows", arrows},
              {"compose", compose}};
}

Json graph_to_json(const std::string& name, const FinGraph& g) {
  Json edges = Json::array();
  for (const auto& e : g.edges.elements()) edges.push_back(Json::array({e, g.src(e), g.tgt(e)}));
  return Json{{"kind", "graph"}, {"name", name}, {"vertices", g.vertices.elements()}, {"edges", edges}};
}

Json scm_to_json(const CausalModel& m) {
  auto vars = [](const std::vector<Variable>& vs) {
    Json out = Json::array();
    for (const auto& v : vs) out.push_back(Json{{"name", v.name}, {"domain", v.domain.elements()}});
    return out;
  };
  Json mechanisms = Json::object();
  for (const auto& v : m.endogenous()) {
    const Mechanism& mech = m.mechanism(v.name);
    Json table = Json::object();
    for (const auto& key : mech.table.dom().elements()) table[key] = mech.table(key);
    mechanisms[v.name] = Json{{"parents", mech.parents}, {"table", table}};
  }
  return Json{{"kind", "scm"},
              {"name", m.name()},
              {"exogenous", vars(m.exogenous())},
              {"endogenous", vars(m.endogenous())},
              {"mechanisms", mechanisms}};
}

Json presheaf_to_json(const std::string& name, const std::string& base, const Presheaf& p) {
  Json at = Json::object();
  for (const auto& obj : p.base().objects()) at[obj] = p.at(obj).elements();
  Json restrict = Json::object();
  for (const auto& a : p.base().arrows()) {
    if (p.base().is_identity(a.id)) continue;
    Json table = Json::object();
    for (const auto& e : p.at(a.tgt).elements()) table[e] = p.restrict_elem(a.id, e);
    restrict[a.id] = table;
  }
  return Json{{"kind", "presheaf"}, {"name", name}, {"base", base}, {"at", at}, {"restrict", restrict}};
}

Json topology_to_json(const std::string& name, const std::string& base,
                      const GrothendieckTopology& j) {
  Json covers = Json::object();
  for (const auto& [obj, sieves] : j.covers) {
    Json list = Json::array();
    for (const auto& s : sieves) list.push_back(std::vector<std::string>(s.arrows.begin(), s.arrows.end()));
    covers[obj] = list;
  }
  return Json{{"kind", "topology"}, {"name", name}, {"base", base}, {"covers", covers}};
}

Json diagram_to_json(const std::string& name, const SetDiagram& d) {
  Json sets = Json::object();
  for (const auto& obj : d.shape().objects()) sets[obj] = d.at(obj).name();
  Json functions = Json::object();
  for (const auto& a : d.shape().arrows()) {
    if (d.shape().is_identity(a.id)) continue;
    Json table = Json::object();
    for (const auto& x : d.at(a.src).elements()) table[x] = d.on(a.id)(x);
    functions[a.id] = table;
  }
  return Json{{"kind", "diagram"},
              {"name", name},
              {"shape", d.shape().name()},
              {"sets", sets},
              {"functions", functions}};
}

Json formula_to_json(const FormulaEntry& f) {
  Json out{{"kind", "formula"}, {"name", f.name}, {"var", f.var}, {"type", f.type_name}};
  out["over"] = Json{{f.over_kind, f.over_name}};
  out["text"] = f.text;
  Json preds = Json::array();
  for (const auto& p : f.predicates) {
    Json pj{{"name", p.name}, {"kind", p.kind}};
    if (!p.var.empty()) pj["var"] = p.var;
    if (!p.value.empty()) pj["value"] = p.value;
    if (!p.clamp.empty()) pj["do"] = p.clamp;
    if (p.kind == "subgraph") {
      pj["vertices"] = p.vertices;
      pj["edges"] = p.edges;
    }
    if (!p.members.empty()) pj["members"] = p.members;
    preds.push_back(pj);
  }
  if (!preds.empty()) out["predicates"] = preds;
  return out;
}

Json neighborhood_to_json(const std::string& name, const NeighborhoodSystem& n) {
  Json hoods = Json::object();
  for (const auto& [world, fam] : n.neighborhoods) {
    Json list = Json::array();
    for (const auto& h : fam) list.push_back(std::vector<std::string>(h.begin(), h.end()));
    hoods[world] = list;
  }
  Json valuation = Json::object();
  for (const auto& [atom, worlds] : n.valuation)
    valuation[atom] = std::vector<std::string>(worlds.begin(), worlds.end());
  return Json{{"kind", "neighborhood"},
              {"name", name},
              {"worlds", n.worlds.elements()},
              {"neighborhoods", hoods},
              {"valuation", valuation}};
}

Json workspace_to_json(const Workspace& ws) {
  Json out = Json::array();
  for (const auto& [name, s] : ws.sets) out.push_back(finset_to_json(s));
  for (const auto& [name, f] : ws.functions)
    out.push_back(finfunction_to_json(name, f, f.dom().name(), f.cod().name()));
  for (const auto& [name, c] : ws.categories) out.push_back(category_to_json(c));
  for (const auto& [name, d] : ws.diagrams) out.push_back(diagram_to_json(name, d));
  for (const auto& [name, p] : ws.presheaves) out.push_back(presheaf_to_json(name, p.base().name(), p));
  for (const auto& [name, g] : ws.graphs) out.push_back(graph_to_json(name, g));
  for (const auto& [name, m] : ws.models) out.push_back(scm_to_json(m));
  for (const auto& [name, j] : ws.topologies) out.push_back(topology_to_json(name, j.base.name(), j));
  for (const auto& [name, f] : ws.formulas) out.push_back(formula_to_json(f));
  for (const auto& [name, n] : ws.neighborhoods) out.push_back(neighborhood_to_json(name, n));
  return out;
}

// ---- formula contexts ----------------------------------------------------------------

ToposContext build_context(const Workspace& ws, const FormulaEntry& f, const Limits& lim) {
  Presheaf carrier;
  std::optional<TcmObject> solved;
  FinCategory base;
  if (f.over_kind == "model") {
    solved = solve(ws.model(f.over_name));
    carrier = as_presheaf(*solved);
    base = interval_base();
  } else if (f.over_kind == "graph") {
    carrier = as_presheaf(ws.graph(f.over_name));
    base = graph_base();
  } else {
    carrier = ws.presheaf(f.over_name);
    base = carrier.base();
  }
  ToposContext ctx(base, lim);
  ctx.register_type(f.type_name, carrier);
  TypeExpr type = TypeExpr::named(f.type_name);
  for (const auto& p : f.predicates) {
    if (p.kind == "observational") {
      if (!solved) fail(Err::validation, "predicate '" + p.name + "' needs a model ambient");
      ctx.register_predicate(p.name, type, observational_predicate(*solved, p.var, p.value));
    } else if (p.kind == "outcome") {
      if (!solved) fail(Err::validation, "predicate '" + p.name + "' needs a model ambient");
      Intervention i;
      i.assignments = p.clamp;
      ctx.register_predicate(p.name, type, outcome_predicate(*solved, p.var, i, p.value));
    } else if (p.kind == "subgraph") {
      SubGraph s{ws.graph(f.over_name), std::set<std::string>(p.vertices.begin(), p.vertices.end()),
                 std::set<std::string>(p.edges.begin(), p.edges.end())};
      if (!s.closed()) fail(Err::validation, "predicate '" + p.name + "' is not a subgraph");
      ctx.register_predicate(p.name, type, as_subpresheaf(s));
    } else if (p.kind == "subpresheaf") {
      std::map<std::string, std::set<std::string>> members;
      for (const auto& [obj, elems] : p.members)
        members.emplace(obj, std::set<std::string>(elems.begin(), elems.end()));
      ctx.register_predicate(p.name, type, SubPresheaf(carrier, std::move(members)));
    } else {
      fail(Err::parse_error, "unknown predicate kind '" + p.kind + "'");
    }
  }
  return ctx;
}

// ---- term AST ------------------------------------------------------------------------

Json term_to_json(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::var:
      return Json{{"op", "var"}, {"name", t->name}};
    case TermKind::star:
      return Json{{"op", "star"}};
    case TermKind::truth:
      return Json{{"op", "true"}};
    case TermKind::falsity:
      return Json{{"op", "false"}};
    case TermKind::pair:
      return Json{{"op", "pair"}, {"args", Json::array({term_to_json(t->t1), term_to_json(t->t2)})}};
    case TermKind::proj1:
      return Json{{"op", "proj1"}, {"arg", term_to_json(t->t1)}};
    case TermKind::proj2:
      return Json{{"op", "proj2"}, {"arg", term_to_json(t->t1)}};
    case TermKind::eq:
      return Json{{"op", "="}, {"args", Json::array({term_to_json(t->t1), term_to_json(t->t2)})}};
    case TermKind::apply_arrow:
      return Json{{"op", "apply"}, {"name", t->name}, {"arg", term_to_json(t->t1)}};
    case TermKind::eval_exp:
      return Json{{"op", "eval"}, {"args", Json::array({term_to_json(t->t1), term_to_json(t->t2)})}};
    case TermKind::member:
      return Json{{"op", "in"}, {"args", Json::array({term_to_json(t->t1), term_to_json(t->t2)})}};
    case TermKind::lambda:
      return Json{{"op", "lambda"}, {"var", t->name}, {"type", t->binder.key()}, {"body", term_to_json(t->t1)}};
    case TermKind::comprehension:
      return Json{{"op", "set"}, {"var", t->name}, {"type", t->binder.key()}, {"body", term_to_json(t->t1)}};
    case TermKind::conj:
      return Json{{"op", "and"}, {"args", Json::array({term_to_json(t->t1), term_to_json(t->t2)})}};
    case TermKind::disj:
      return Json{{"op", "or"}, {"args", Json::array({term_to_json(t->t1), term_to_json(t->t2)})}};
    case TermKind::impl:
      return Json{{"op", "implies"}, {"args", Json::array({term_to_json(t->t1), term_to_json(t->t2)})}};
    case TermKind::neg:
      return Json{{"op", "not"}, {"arg", term_to_json(t->t1)}};
    case TermKind::forall:
      return Json{{"op", "forall"}, {"var", t->name}, {"type", t->binder.key()}, {"body", term_to_json(t->t1)}};
    case TermKind::exists:
      return Json{{"op", "exists"}, {"var", t->name}, {"type", t->binder.key()}, {"body", term_to_json(t->t1)}};
    case TermKind::pred:
      return Json{{"op", "pred"}, {"name", t->name}, {"arg", term_to_json(t->t1)}};
  }
  fail(Err::validation, "unknown term kind");
}

namespace {

TermPtr term_from_json_scoped(const Json& j, std::map<std::string, TypeExpr>& scope) {
  std::string op = j.at("op").get<std::string>();
  auto arg = [&](const char* key) { return term_from_json_scoped(j.at(key), scope); };
  auto args = [&](std::size_t i) { return term_from_json_scoped(j.at("args").at(i), scope); };
  auto binder = [&](const std::function<TermPtr(std::string, TypeExpr, TermPtr)>& mk) {
    std::string var = j.at("var").get<std::string>();
    TypeExpr type = parse_type(j.at("type").get<std::string>());
    if (scope.count(var)) fail(Err::parse_error, "variable '" + var + "' shadows an outer binding");
    scope.emplace(var, type);
    TermPtr body = term_from_json_scoped(j.at("body"), scope);
    scope.erase(var);
    return mk(var, type, body);
  };
  if (op == "var") {
    std::string name = j.at("name").get<std::string>();
    auto it = scope.find(name);
    if (it == scope.end()) fail(Err::parse_error, "undeclared variable '" + name + "' in formula ast");
    return Term::mk_var(name, it->second);
  }
  if (op == "star") return Term::mk_star();
  if (op == "true") return Term::mk_true();
  if (op == "false") return Term::mk_false();
  if (op == "pair") return Term::mk_pair(args(0), args(1));
  if (op == "proj1") return Term::mk_proj1(arg("arg"));
  if (op == "proj2") return Term::mk_proj2(arg("arg"));
  if (op == "=") return Term::mk_eq(args(0), args(1));
  if (op == "apply") return Term::mk_apply(j.at("name").get<std::string>(), arg("arg"));
  if (op == "eval") return Term::mk_eval(args(0), args(1));
  if (op == "in") return Term::mk_member(args(0), args(1));
  if (op == "lambda") return binder(Term::mk_lambda);
  if (op == "set") return binder(Term::mk_set);
  if (op == "and") return Term::mk_and(args(0), args(1));
  if (op == "or") return Term::mk_or(args(0), args(1));
  if (op == "implies") return Term::mk_implies(args(0), args(1));
  if (op == "not") return Term::mk_not(arg("arg"));
  if (op == "forall") return binder(Term::mk_forall);
  if (op == "exists") return binder(Term::mk_exists);
  if (op == "pred") return Term::mk_pred(j.at("name").get<std::string>(), arg("arg"));
  fail(Err::parse_error, "unknown term op '" + op + "'");
}

}  // namespace

TermPtr term_from_json(const Json& j, const std::map<std::string, TypeExpr>& free_vars) {
  std::map<std::string, TypeExpr> scope = free_vars;
  return term_from_json_scoped(j, scope);
}

Json trace_to_json(const TraceNode& t) {
  Json out{{"rule", t.rule}, {"stage", t.stage}, {"result", t.result}};
  if (!t.detail.empty()) out["detail"] = t.detail;
  if (!t.children.empty()) {
    Json kids = Json::array();
    for (const auto& c : t.children) kids.push_back(trace_to_json(c));
    out["children"] = kids;
  }
  return out;
}

Json Report::to_json() const {
  Json out{{"command", command}, {"inputs", inputs}, {"result", result}};
  if (!trace.is_null()) out["trace"] = trace;
  if (timing_ms >= 0) out["timing_ms"] = timing_ms;
  return out;
}

}  // namespace tcm
