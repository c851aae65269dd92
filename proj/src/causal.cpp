#include "tcm/causal.hpp"

#include <algorithm>

namespace tcm {

// ---- CausalModel ------------------------------------------------------------

CausalModel::CausalModel(std::string name, std::vector<Variable> exogenous,
                         std::vector<Variable> endogenous, std::map<std::string, Mechanism> mechanisms)
    : name_(std::move(name)),
      exogenous_(std::move(exogenous)),
      endogenous_(std::move(endogenous)),
      mechanisms_(std::move(mechanisms)) {}

const Mechanism& CausalModel::mechanism(const std::string& var) const {
  auto it = mechanisms_.find(var);
  if (it == mechanisms_.end()) fail(Err::unknown_variable, "no mechanism for variable '" + var + "'");
  return it->second;
}

bool CausalModel::is_exogenous(const std::string& var) const {
  return std::any_of(exogenous_.begin(), exogenous_.end(), [&](const Variable& v) { return v.name == var; });
}

bool CausalModel::is_endogenous(const std::string& var) const {
  return std::any_of(endogenous_.begin(), endogenous_.end(), [&](const Variable& v) { return v.name == var; });
}

const FinSet& CausalModel::domain_of(const std::string& var) const {
  for (const auto& v : exogenous_)
    if (v.name == var) return v.domain;
  for (const auto& v : endogenous_)
    if (v.name == var) return v.domain;
  fail(Err::unknown_variable, "unknown variable '" + var + "' in model '" + name_ + "'");
}

int CausalModel::endogenous_index(const std::string& var) const {
  for (std::size_t i = 0; i < endogenous_.size(); ++i)
    if (endogenous_[i].name == var) return static_cast<int>(i);
  fail(Err::unknown_variable, "'" + var + "' is not an endogenous variable of '" + name_ + "'");
}

CausalModel::Report CausalModel::validate() const {
  Report rep;
  for (const auto& v : endogenous_) {
    auto it = mechanisms_.find(v.name);
    if (it == mechanisms_.end()) {
      rep.violations.push_back("endogenous variable " + v.name + " has no mechanism");
      continue;
    }
    const Mechanism& m = it->second;
    std::vector<FinSet> parent_domains;
    for (const auto& p : m.parents) {
      if (p == v.name) rep.violations.push_back(v.name + " lists itself as a parent");
      if (!is_exogenous(p) && !is_endogenous(p)) {
        rep.violations.push_back(v.name + " has unknown parent " + p);
        continue;
      }
      parent_domains.push_back(domain_of(p));
    }
    if (parent_domains.size() == m.parents.size()) {
      FinSet want = tuple_product("parents(" + v.name + ")", parent_domains).set;
      if (!m.table.dom().same_elements(want))
        rep.violations.push_back("mechanism table for " + v.name + " is not keyed by its parent tuples");
      if (!m.table.cod().same_elements(v.domain))
        rep.violations.push_back("mechanism table for " + v.name + " does not land in its domain");
    }
  }
  for (const auto& [var, mech] : mechanisms_) {
    (void)mech;
    if (!is_endogenous(var)) rep.violations.push_back("mechanism given for non-endogenous variable " + var);
  }
  if (rep.ok()) {
    try {
      topological_order();
    } catch (const Error& e) {
      rep.violations.push_back(e.what());
    }
  }
  return rep;
}

std::vector<std::string> CausalModel::topological_order() const {
  // Kahn over endogenous-to-endogenous edges; exogenous parents are free.
  std::map<std::string, std::vector<std::string>> children;
  std::map<std::string, int> indegree;
  for (const auto& v : endogenous_) indegree[v.name] = 0;
  for (const auto& v : endogenous_)
    for (const auto& p : mechanism(v.name).parents)
      if (is_endogenous(p)) {
        children[p].push_back(v.name);
        ++indegree[v.name];
      }
  std::vector<std::string> order;
  std::vector<std::string> ready;
  for (const auto& v : endogenous_)
    if (indegree[v.name] == 0) ready.push_back(v.name);
  while (!ready.empty()) {
    std::string v = ready.front();
    ready.erase(ready.begin());
    order.push_back(v);
    for (const auto& c : children[v])
      if (--indegree[c] == 0) ready.push_back(c);
  }
  if (order.size() != endogenous_.size()) {
    // extract one cycle as the witness
    std::vector<std::string> stuck;
    for (const auto& v : endogenous_)
      if (indegree[v.name] > 0) stuck.push_back(v.name);
    std::string cur = stuck.front();
    std::vector<std::string> path{cur};
    while (true) {
      for (const auto& p : mechanism(cur).parents)
        if (is_endogenous(p) && indegree[p] > 0) {
          cur = p;
          break;
        }
      auto hit = std::find(path.begin(), path.end(), cur);
      if (hit != path.end()) {
        std::vector<std::string> cycle(hit, path.end());
        cycle.push_back(cur);
        fail(Err::cyclic_model, "model '" + name_ + "' is cyclic: " + join(cycle, " -> "));
      }
      path.push_back(cur);
    }
  }
  return order;
}

FinSet CausalModel::exogenous_tuple_set() const {
  std::vector<FinSet> domains;
  for (const auto& v : exogenous_) domains.push_back(v.domain);
  return tuple_product("U(" + name_ + ")", domains).set;
}

FinSet CausalModel::endogenous_tuple_set() const {
  std::vector<FinSet> domains;
  for (const auto& v : endogenous_) domains.push_back(v.domain);
  return tuple_product("V(" + name_ + ")", domains).set;
}

// ---- solving -------------------------------------------------------------------

TcmObject solve(const CausalModel& model) {
  auto rep = model.validate();
  if (!rep.ok()) {
    // a cycle surfaces as its own error kind, witness included
    try {
      model.topological_order();
    } catch (const Error& e) {
      if (e.code() == Err::cyclic_model) throw;
    }
    fail(Err::validation, "model '" + model.name() + "': " + rep.violations.front());
  }
  std::vector<std::string> order = model.topological_order();
  FinSet u_set = model.exogenous_tuple_set();
  FinSet v_set = model.endogenous_tuple_set();
  auto global = FinFunction::tabulate(u_set, v_set, [&](const std::string& u_atom) {
    std::map<std::string, std::string> env;
    auto u_parts = tuple_parts(u_atom);
    for (std::size_t i = 0; i < model.exogenous().size(); ++i) env[model.exogenous()[i].name] = u_parts[i];
    for (const auto& var : order) {
      const Mechanism& mech = model.mechanism(var);
      std::vector<std::string> parent_vals;
      for (const auto& p : mech.parents) parent_vals.push_back(env.at(p));
      env[var] = mech.table(tuple_atom(parent_vals));
    }
    std::vector<std::string> v_parts;
    for (const auto& v : model.endogenous()) v_parts.push_back(env.at(v.name));
    return tuple_atom(v_parts);
  });
  return {model, std::move(global)};
}

// ---- squares ---------------------------------------------------------------------

bool TcmSquare::commutes() const {
  if (!h.dom().same_elements(src.exo()) || !h.cod().same_elements(dst.exo())) return false;
  if (!k.dom().same_elements(src.endo()) || !k.cod().same_elements(dst.endo())) return false;
  return compose(k, src.global) == compose(dst.global, h);
}

std::string Intervention::label() const {
  std::vector<std::string> parts;
  for (const auto& [var, val] : assignments) parts.push_back(var + "=" + val);
  return "do(" + join(parts, ",") + ")";
}

namespace {

// Does this endogenous tuple agree with the clamped values?
bool tuple_matches(const CausalModel& model, const Intervention& i, const std::string& v_atom) {
  auto parts = tuple_parts(v_atom);
  for (const auto& [var, val] : i.assignments)
    if (parts[static_cast<std::size_t>(model.endogenous_index(var))] != val) return false;
  return true;
}

}  // namespace

InterventionResult intervene(const TcmObject& m, const Intervention& i) {
  if (!m.model) fail(Err::validation, "intervene needs a solved causal model, not a bare arrow object");
  const CausalModel& model = *m.model;
  for (const auto& [var, val] : i.assignments) {
    if (!model.is_endogenous(var))
      fail(Err::unknown_variable, "intervention target '" + var + "' is not endogenous");
    model.domain_of(var).index_or_throw(val);
  }
  // F_x: replace each target's mechanism by the constant
  std::map<std::string, Mechanism> mechanisms;
  for (const auto& v : model.endogenous()) {
    auto it = i.assignments.find(v.name);
    if (it == i.assignments.end()) {
      mechanisms.emplace(v.name, model.mechanism(v.name));
    } else {
      FinSet unit = tuple_product("()", {}).set;
      mechanisms.emplace(v.name, Mechanism{{}, FinFunction::constant(unit, v.domain, it->second)});
    }
  }
  CausalModel clamped(model.name() + "|" + i.label(), model.exogenous(), model.endogenous(),
                      std::move(mechanisms));
  TcmObject intervened = solve(clamped);

  // The consistent fragment of M: worlds whose observed solution already
  // satisfies X = x, and the X = x slice of the endogenous tuples. On that
  // fragment M and M_x agree, and the label inclusions form a monic square.
  std::vector<int> u_members, v_members;
  for (std::size_t idx = 0; idx < m.exo().size(); ++idx)
    if (tuple_matches(model, i, m.endo().at(static_cast<std::size_t>(m.global.apply_index(static_cast<int>(idx))))))
      u_members.push_back(static_cast<int>(idx));
  for (std::size_t idx = 0; idx < m.endo().size(); ++idx)
    if (tuple_matches(model, i, m.endo().at(idx))) v_members.push_back(static_cast<int>(idx));

  SubSet u_sub(m.exo(), u_members), v_sub(m.endo(), v_members);
  FinSet u_src = u_sub.as_finset("U(" + clamped.name() + ")");
  FinSet v_src = v_sub.as_finset("V(" + clamped.name() + ")");
  auto fragment_global = FinFunction::tabulate(u_src, v_src, [&](const std::string& u) { return m.global(u); });

  TcmSquare square;
  square.src = TcmObject{std::nullopt, std::move(fragment_global)};
  square.dst = m;
  square.h = FinFunction(u_src, m.exo(), std::vector<int>(u_members.begin(), u_members.end()));
  square.k = FinFunction(v_src, m.endo(), std::vector<int>(v_members.begin(), v_members.end()));
  return {std::move(intervened), std::move(square)};
}

std::string potential_outcome(const TcmObject& m, const std::string& y, const Intervention& i,
                              const std::string& u) {
  if (!m.model) fail(Err::validation, "potential_outcome needs a solved causal model");
  int yi = m.model->endogenous_index(y);
  if (m.exo().index_of(u) < 0) fail(Err::unknown_tuple, "'" + u + "' is not an exogenous tuple of '" + m.model->name() + "'");
  InterventionResult r = intervene(m, i);
  return tuple_parts(r.intervened.global(u))[static_cast<std::size_t>(yi)];
}

// ---- classification -----------------------------------------------------------------

const ArrowOmega& arrow_omega() {
  static const ArrowOmega om = [] {
    Omega o = omega(interval_base());
    ArrowOmega a;
    a.psi_values = o.psh.at("a");
    a.chi_values = o.psh.at("b");
    a.t = o.psh.restriction("u");
    a.psi_zero = Sieve{"a", {}}.atom();
    a.psi_half = Sieve{"a", {"u"}}.atom();
    a.psi_one = o.truth("a");
    a.chi_zero = Sieve{"b", {}}.atom();
    a.chi_one = o.truth("b");
    return a;
  }();
  return om;
}

const std::string& ArrowOmega::alias(const std::string& atom) const {
  static const std::string zero = "0", half = "1/2", one = "1";
  if (atom == psi_zero || atom == chi_zero) return zero;
  if (atom == psi_half) return half;
  if (atom == psi_one || atom == chi_one) return one;
  fail(Err::unknown_object, "not a truth value atom: " + atom);
}

SubmodelClassification classify_submodel(const TcmSquare& square) {
  if (!morphism_class(square.h).monic || !morphism_class(square.k).monic)
    fail(Err::not_monic, "classify_submodel requires a monic square");
  if (!square.commutes()) fail(Err::validation, "classify_submodel: square does not commute");
  const ArrowOmega& om = arrow_omega();
  std::set<std::string> im_h, im_k;
  for (const auto& x : square.h.dom().elements()) im_h.insert(square.h(x));
  for (const auto& x : square.k.dom().elements()) im_k.insert(square.k(x));
  auto psi = FinFunction::tabulate(square.dst.exo(), om.psi_values, [&](const std::string& x) {
    if (im_h.count(x)) return om.psi_one;
    if (im_k.count(square.dst.global(x))) return om.psi_half;
    return om.psi_zero;
  });
  auto chi = FinFunction::tabulate(square.dst.endo(), om.chi_values, [&](const std::string& v) {
    return im_k.count(v) ? om.chi_one : om.chi_zero;
  });
  return {std::move(psi), std::move(chi)};
}

// ---- pullbacks and exponentials -------------------------------------------------------

TcmPullback tcm_pullback(const TcmSquare& sq1, const TcmSquare& sq2) {
  if (!(sq1.dst.global == sq2.dst.global))
    fail(Err::codomain_mismatch, "tcm_pullback requires squares into the same object");
  if (!sq1.commutes() || !sq2.commutes()) fail(Err::validation, "tcm_pullback: input square does not commute");
  auto pu = pullback(sq1.h, sq2.h);
  auto pv = pullback(sq1.k, sq2.k);
  auto global = FinFunction::tabulate(pu.set, pv.set, [&](const std::string& pair) {
    auto parts = tuple_parts(pair);
    return tuple_atom({sq1.src.global(parts[0]), sq2.src.global(parts[1])});
  });
  TcmPullback out;
  out.apex = TcmObject{std::nullopt, std::move(global)};
  out.into_src1 = TcmSquare{out.apex, sq1.src, pu.p1, pv.p1};
  out.into_src2 = TcmSquare{out.apex, sq2.src, pu.p2, pv.p2};
  return out;
}

TcmObject tcm_exponential(const TcmObject& f, const TcmObject& g, const Limits& lim) {
  // codomain side: every function V_f -> V_g, positionally encoded
  auto exp_v = exponential(f.endo(), g.endo(), lim);
  auto encode = [](const FinFunction& fn) {
    std::vector<std::string> vals;
    for (std::size_t i = 0; i < fn.dom().size(); ++i)
      vals.push_back(fn.cod().at(static_cast<std::size_t>(fn.apply_index(static_cast<int>(i)))));
    return bracket_atom(vals);
  };
  // domain side: commuting pairs <h,k> from f to g
  std::vector<std::string> pairs;
  std::vector<int> to_k;
  for (const auto& h : all_functions(f.exo(), g.exo(), lim))
    for (const auto& k : all_functions(f.endo(), g.endo(), lim))
      if (compose(g.global, h) == compose(k, f.global)) {
        pairs.push_back(tuple_atom({encode(h), encode(k)}));
        to_k.push_back(exp_v.set.index_or_throw(encode(k)));
      }
  FinSet dom("Arr(" + f.global.dom().name() + "," + g.global.dom().name() + ")", std::move(pairs));
  return {std::nullopt, FinFunction(dom, exp_v.set, std::move(to_k))};
}

// ---- presheaf bridge ---------------------------------------------------------------------

Presheaf as_presheaf(const TcmObject& m) {
  std::map<std::string, FinSet> at{{"a", m.exo()}, {"b", m.endo()}};
  std::map<std::string, FinFunction> restrict{{"u", m.global}};
  return Presheaf(interval_base(), std::move(at), std::move(restrict));
}

SubPresheaf square_as_subpresheaf(const TcmSquare& square) {
  std::set<std::string> im_h, im_k;
  for (const auto& x : square.h.dom().elements()) im_h.insert(square.h(x));
  for (const auto& x : square.k.dom().elements()) im_k.insert(square.k(x));
  return SubPresheaf(as_presheaf(square.dst), {{"a", im_h}, {"b", im_k}});
}

SubPresheaf observational_predicate(const TcmObject& m, const std::string& var,
                                    const std::string& value) {
  if (!m.model) fail(Err::validation, "causal predicates need a solved model");
  int idx = m.model->endogenous_index(var);
  m.model->domain_of(var).index_or_throw(value);
  std::set<std::string> at_b, at_a;
  for (const auto& v : m.endo().elements())
    if (tuple_parts(v)[static_cast<std::size_t>(idx)] == value) at_b.insert(v);
  for (const auto& u : m.exo().elements())
    if (at_b.count(m.global(u))) at_a.insert(u);
  return SubPresheaf(as_presheaf(m), {{"a", at_a}, {"b", at_b}});
}

SubPresheaf outcome_predicate(const TcmObject& m, const std::string& var, const Intervention& i,
                              const std::string& value) {
  if (!m.model) fail(Err::validation, "causal predicates need a solved model");
  int idx = m.model->endogenous_index(var);
  m.model->domain_of(var).index_or_throw(value);
  TcmObject clamped = intervene(m, i).intervened;
  std::set<std::string> at_a, at_b;
  for (const auto& u : m.exo().elements())
    if (tuple_parts(clamped.global(u))[static_cast<std::size_t>(idx)] == value) at_a.insert(u);
  for (const auto& u : at_a) at_b.insert(m.global(u));
  return SubPresheaf(as_presheaf(m), {{"a", at_a}, {"b", at_b}});
}

}  // namespace tcm
