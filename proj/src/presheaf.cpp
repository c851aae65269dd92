#include "tcm/presheaf.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace tcm {

// ---- Presheaf ---------------------------------------------------------------

Presheaf::Presheaf(FinCategory base, std::map<std::string, FinSet> at,
                   std::map<std::string, FinFunction> restrict)
    : base_(std::move(base)), at_(std::move(at)), restrict_(std::move(restrict)) {
  for (const auto& obj : base_.objects()) {
    if (!at_.count(obj)) fail(Err::invalid_shape, "presheaf missing stalk at '" + obj + "'");
    const std::string& id = base_.identity_of(obj);
    if (!restrict_.count(id)) restrict_.emplace(id, FinFunction::identity(at_.at(obj)));
  }
  for (const auto& a : base_.arrows())
    if (!restrict_.count(a.id)) fail(Err::invalid_shape, "presheaf missing restriction along '" + a.id + "'");
}

const FinSet& Presheaf::at(const std::string& obj) const {
  auto it = at_.find(obj);
  if (it == at_.end()) fail(Err::unknown_object, "presheaf has no stalk at '" + obj + "'");
  return it->second;
}

const FinFunction& Presheaf::restriction(const std::string& arrow_id) const {
  auto it = restrict_.find(arrow_id);
  if (it == restrict_.end()) fail(Err::unknown_arrow, "presheaf has no restriction along '" + arrow_id + "'");
  return it->second;
}

const std::string& Presheaf::restrict_elem(const std::string& arrow_id, const std::string& elem) const {
  return restriction(arrow_id)(elem);
}

Presheaf::Report Presheaf::validate() const {
  Report rep;
  for (const auto& a : base_.arrows()) {
    const FinFunction& r = restriction(a.id);
    if (!r.dom().same_elements(at(a.tgt)) || !r.cod().same_elements(at(a.src)))
      rep.violations.push_back("restriction along " + a.id + " does not run at(" + a.tgt + ") -> at(" + a.src + ")");
  }
  if (!rep.ok()) return rep;
  for (const auto& obj : base_.objects())
    if (!(restriction(base_.identity_of(obj)) == FinFunction::identity(at(obj))))
      rep.violations.push_back("restriction along id_" + obj + " is not the identity");
  for (const auto& g : base_.arrows())
    for (const auto& f : base_.arrows()) {
      if (f.tgt != g.src) continue;
      // contravariance: restrict(g∘f) = restrict(f) ∘ restrict(g)
      const std::string& gf = base_.compose_ids(g.id, f.id);
      if (!(restriction(gf) == compose(restriction(f.id), restriction(g.id))))
        rep.violations.push_back("contravariant functoriality fails for " + g.id + " after " + f.id);
    }
  return rep;
}

bool presheaves_equal(const Presheaf& a, const Presheaf& b) {
  if (a.base().objects() != b.base().objects()) return false;
  for (const auto& o : a.base().objects())
    if (!a.at(o).same_elements(b.at(o))) return false;
  for (const auto& ar : a.base().arrows()) {
    if (!b.base().has_arrow(ar.id)) return false;
    if (!(a.restriction(ar.id) == b.restriction(ar.id))) return false;
  }
  return true;
}

// ---- sieves -----------------------------------------------------------------

std::string Sieve::atom() const {
  return brace_atom(std::vector<std::string>(arrows.begin(), arrows.end()));
}

Sieve sieve_from_atom(const std::string& obj, const std::string& atom) {
  Sieve s;
  s.on = obj;
  for (const auto& id : brace_parts(atom)) s.arrows.insert(id);
  return s;
}

bool sieve_closed(const FinCategory& c, const Sieve& s) {
  for (const auto& fid : s.arrows) {
    const Arrow& f = c.arrow(fid);
    if (f.tgt != s.on) return false;
    for (const auto& g : c.arrows())
      if (g.tgt == f.src && !s.arrows.count(c.compose_ids(fid, g.id))) return false;
  }
  return true;
}

Sieve maximal_sieve(const FinCategory& c, const std::string& obj) {
  Sieve s;
  s.on = obj;
  for (const auto& id : c.arrows_into(obj)) s.arrows.insert(id);
  return s;
}

std::vector<Sieve> sieves_on(const FinCategory& c, const std::string& x) {
  if (!c.has_object(x)) fail(Err::unknown_object, "sieves_on: unknown object '" + x + "'");
  std::vector<std::string> into = c.arrows_into(x);
  std::sort(into.begin(), into.end());
  if (into.size() > 20) fail(Err::size_limit, "too many arrows into '" + x + "' to enumerate sieves");
  std::vector<Sieve> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << into.size()); ++mask) {
    Sieve s;
    s.on = x;
    for (std::size_t i = 0; i < into.size(); ++i)
      if (mask & (std::size_t{1} << i)) s.arrows.insert(into[i]);
    if (sieve_closed(c, s)) out.push_back(std::move(s));
  }
  return out;
}

Sieve sieve_pullback(const FinCategory& c, const std::string& arrow_id, const Sieve& s) {
  const Arrow& h = c.arrow(arrow_id);
  if (h.tgt != s.on)
    fail(Err::codomain_mismatch, "sieve_pullback: '" + arrow_id + "' does not land on '" + s.on + "'");
  Sieve out;
  out.on = h.src;
  for (const auto& gid : c.arrows_into(h.src))
    if (s.arrows.count(c.compose_ids(arrow_id, gid))) out.arrows.insert(gid);
  return out;
}

Omega omega(const FinCategory& c) {
  std::map<std::string, FinSet> at;
  std::map<std::string, FinFunction> restrict;
  std::map<std::string, std::string> truth;
  for (const auto& obj : c.objects()) {
    std::vector<std::string> atoms;
    for (const auto& s : sieves_on(c, obj)) atoms.push_back(s.atom());
    at.emplace(obj, FinSet("Omega(" + obj + ")", atoms));
    truth.emplace(obj, maximal_sieve(c, obj).atom());
  }
  for (const auto& a : c.arrows()) {
    const FinSet& dom = at.at(a.tgt);
    const FinSet& cod = at.at(a.src);
    restrict.emplace(a.id, FinFunction::tabulate(dom, cod, [&](const std::string& atom) {
      return sieve_pullback(c, a.id, sieve_from_atom(a.tgt, atom)).atom();
    }));
  }
  return {Presheaf(c, std::move(at), std::move(restrict)), std::move(truth)};
}

// ---- subpresheaves ------------------------------------------------------------

SubPresheaf::SubPresheaf(Presheaf parent, std::map<std::string, std::set<std::string>> members)
    : parent_(std::move(parent)), members_(std::move(members)) {
  for (const auto& obj : parent_.base().objects()) {
    auto it = members_.find(obj);
    if (it == members_.end()) {
      members_.emplace(obj, std::set<std::string>{});
      continue;
    }
    for (const auto& e : it->second)
      if (!parent_.at(obj).contains(e))
        fail(Err::validation, "subpresheaf member '" + e + "' is not in the stalk at '" + obj + "'");
  }
}

const std::set<std::string>& SubPresheaf::members(const std::string& obj) const {
  auto it = members_.find(obj);
  if (it == members_.end()) fail(Err::unknown_object, "subpresheaf has no component at '" + obj + "'");
  return it->second;
}

bool SubPresheaf::contains(const std::string& obj, const std::string& elem) const {
  return members(obj).count(elem) > 0;
}

bool SubPresheaf::closed() const {
  for (const auto& a : parent_.base().arrows())
    for (const auto& e : members(a.tgt))
      if (!contains(a.src, parent_.restrict_elem(a.id, e))) return false;
  return true;
}

bool PshMorphism::natural() const {
  for (const auto& obj : src.base().objects()) {
    auto it = components.find(obj);
    if (it == components.end()) return false;
    if (!it->second.dom().same_elements(src.at(obj)) || !it->second.cod().same_elements(dst.at(obj)))
      return false;
  }
  for (const auto& a : src.base().arrows())
    if (!(compose(components.at(a.src), src.restriction(a.id)) ==
          compose(dst.restriction(a.id), components.at(a.tgt))))
      return false;
  return true;
}

PshMorphism psh_compose(const PshMorphism& g, const PshMorphism& f) {
  PshMorphism out;
  out.src = f.src;
  out.dst = g.dst;
  for (const auto& obj : f.src.base().objects())
    out.components.emplace(obj, compose(g.at(obj), f.at(obj)));
  return out;
}

// ---- classifier -----------------------------------------------------------------

PshMorphism classify(const SubPresheaf& s) {
  const Presheaf& parent = s.parent();
  const FinCategory& base = parent.base();
  Omega om = omega(base);
  PshMorphism chi;
  chi.src = parent;
  chi.dst = om.psh;
  for (const auto& obj : base.objects()) {
    chi.components.emplace(obj, FinFunction::tabulate(parent.at(obj), om.psh.at(obj), [&](const std::string& e) {
      Sieve sv;
      sv.on = obj;
      for (const auto& fid : base.arrows_into(obj)) {
        const Arrow& f = base.arrow(fid);
        if (s.contains(f.src, parent.restrict_elem(fid, e))) sv.arrows.insert(fid);
      }
      return sv.atom();
    }));
  }
  return chi;
}

SubPresheaf truepoint_pullback(const PshMorphism& chi) {
  Omega om = omega(chi.src.base());
  std::map<std::string, std::set<std::string>> members;
  for (const auto& obj : chi.src.base().objects()) {
    const std::string& truth = om.truth(obj);
    std::set<std::string> ms;
    for (const auto& e : chi.src.at(obj).elements())
      if (chi.at(obj)(e) == truth) ms.insert(e);
    members.emplace(obj, std::move(ms));
  }
  return SubPresheaf(chi.src, std::move(members));
}

std::vector<SubPresheaf> subobjects(const Presheaf& x, const Limits& lim) {
  const auto& objs = x.base().objects();
  double combos = 1;
  for (const auto& o : objs) combos *= std::pow(2.0, static_cast<double>(x.at(o).size()));
  if (combos > static_cast<double>(lim.max_enum)) fail(Err::size_limit, "subobject lattice exceeds enumeration cap");
  std::vector<SubPresheaf> out;
  std::vector<std::size_t> masks(objs.size(), 0);
  while (true) {
    std::map<std::string, std::set<std::string>> members;
    for (std::size_t k = 0; k < objs.size(); ++k) {
      std::set<std::string> ms;
      const FinSet& stalk = x.at(objs[k]);
      for (std::size_t i = 0; i < stalk.size(); ++i)
        if (masks[k] & (std::size_t{1} << i)) ms.insert(stalk.at(i));
      members.emplace(objs[k], std::move(ms));
    }
    SubPresheaf cand(x, std::move(members));
    if (cand.closed()) out.push_back(std::move(cand));
    std::size_t k = objs.size();
    bool done = objs.empty();
    while (k-- > 0) {
      if (++masks[k] < (std::size_t{1} << x.at(objs[k]).size())) break;
      masks[k] = 0;
      if (k == 0) done = true;
    }
    if (done) break;
  }
  return out;
}

// ---- Heyting algebra of subobjects ------------------------------------------------

namespace {

void require_same_parent(const SubPresheaf& a, const SubPresheaf& b) {
  if (!presheaves_equal(a.parent(), b.parent()))
    fail(Err::parent_mismatch, "heyting operands live in different subobject lattices");
}

}  // namespace

SubPresheaf full_sub(const Presheaf& p) {
  std::map<std::string, std::set<std::string>> members;
  for (const auto& obj : p.base().objects()) {
    const auto& es = p.at(obj).elements();
    members.emplace(obj, std::set<std::string>(es.begin(), es.end()));
  }
  return SubPresheaf(p, std::move(members));
}

SubPresheaf empty_sub(const Presheaf& p) { return SubPresheaf(p, {}); }

SubPresheaf heyting(HeytingOp op, const SubPresheaf& a, const SubPresheaf& b) {
  if (op == HeytingOp::complement) return heyting_not(a);
  require_same_parent(a, b);
  const Presheaf& parent = a.parent();
  std::map<std::string, std::set<std::string>> members;
  for (const auto& obj : parent.base().objects()) {
    std::set<std::string> ms;
    switch (op) {
      case HeytingOp::meet:
        for (const auto& e : a.members(obj))
          if (b.contains(obj, e)) ms.insert(e);
        break;
      case HeytingOp::join:
        ms = a.members(obj);
        ms.insert(b.members(obj).begin(), b.members(obj).end());
        break;
      case HeytingOp::implies:
        for (const auto& e : parent.at(obj).elements()) {
          bool ok = true;
          for (const auto& fid : parent.base().arrows_into(obj)) {
            const Arrow& f = parent.base().arrow(fid);
            const std::string& r = parent.restrict_elem(fid, e);
            if (a.contains(f.src, r) && !b.contains(f.src, r)) {
              ok = false;
              break;
            }
          }
          if (ok) ms.insert(e);
        }
        break;
      case HeytingOp::complement:
        break;
    }
    members.emplace(obj, std::move(ms));
  }
  return SubPresheaf(parent, std::move(members));
}

SubPresheaf heyting_not(const SubPresheaf& a) {
  return heyting(HeytingOp::implies, a, empty_sub(a.parent()));
}

bool sub_leq(const SubPresheaf& a, const SubPresheaf& b) {
  for (const auto& obj : a.parent().base().objects())
    for (const auto& e : a.members(obj))
      if (!b.contains(obj, e)) return false;
  return true;
}

// ---- yoneda ---------------------------------------------------------------------

Presheaf yoneda(const FinCategory& c, const std::string& x) {
  if (!c.has_object(x)) fail(Err::unknown_object, "yoneda: unknown object '" + x + "'");
  std::map<std::string, FinSet> at;
  for (const auto& d : c.objects()) {
    std::vector<std::string> homs;
    for (const auto& a : c.arrows())
      if (a.src == d && a.tgt == x) homs.push_back(a.id);
    at.emplace(d, FinSet("Hom(" + d + "," + x + ")", homs));
  }
  std::map<std::string, FinFunction> restrict;
  for (const auto& f : c.arrows())
    restrict.emplace(f.id, FinFunction::tabulate(at.at(f.tgt), at.at(f.src), [&](const std::string& g) {
      return c.compose_ids(g, f.id);  // precomposition
    }));
  return Presheaf(c, std::move(at), std::move(restrict));
}

PshMorphism yoneda_morphism(const Presheaf& m, const std::string& c, const std::string& elem) {
  Presheaf yc = yoneda(m.base(), c);
  m.at(c).index_or_throw(elem);
  PshMorphism out;
  out.src = yc;
  out.dst = m;
  for (const auto& d : m.base().objects())
    out.components.emplace(d, FinFunction::tabulate(yc.at(d), m.at(d), [&](const std::string& f) {
      return m.restrict_elem(f, elem);
    }));
  return out;
}

Presheaf sub_as_presheaf(const SubPresheaf& s) {
  const Presheaf& p = s.parent();
  std::map<std::string, FinSet> at;
  std::map<std::string, FinFunction> restrict;
  for (const auto& obj : p.base().objects()) {
    std::vector<std::string> elems;  // parent stalk order
    for (const auto& e : p.at(obj).elements())
      if (s.contains(obj, e)) elems.push_back(e);
    at.emplace(obj, FinSet(p.at(obj).name() + "|sub", std::move(elems)));
  }
  for (const auto& a : p.base().arrows())
    restrict.emplace(a.id, FinFunction::tabulate(at.at(a.tgt), at.at(a.src), [&](const std::string& e) {
      return p.restrict_elem(a.id, e);
    }));
  return Presheaf(p.base(), std::move(at), std::move(restrict));
}

PshMorphism sub_inclusion(const SubPresheaf& s) {
  Presheaf sub = sub_as_presheaf(s);
  PshMorphism out;
  out.src = sub;
  out.dst = s.parent();
  for (const auto& obj : s.parent().base().objects())
    out.components.emplace(obj, FinFunction::tabulate(sub.at(obj), s.parent().at(obj),
                                                      [](const std::string& e) { return e; }));
  return out;
}

SubPresheaf image_sub(const PshMorphism& alpha) {
  std::map<std::string, std::set<std::string>> members;
  for (const auto& obj : alpha.dst.base().objects()) {
    std::set<std::string> ms;
    for (const auto& e : alpha.src.at(obj).elements()) ms.insert(alpha.at(obj)(e));
    members.emplace(obj, std::move(ms));
  }
  return SubPresheaf(alpha.dst, std::move(members));
}

// ---- exponentials ------------------------------------------------------------------

std::map<std::string, std::vector<std::string>> family_sections(const std::string& family_atom) {
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& sec : brace_parts(family_atom, ';')) {
    auto eq = sec.find('=');
    if (eq == std::string::npos) fail(Err::parse_error, "malformed family atom: " + family_atom);
    out.emplace(sec.substr(0, eq), bracket_parts(sec.substr(eq + 1)));
  }
  return out;
}

std::string family_atom_from_sections(const std::map<std::string, std::vector<std::string>>& sections) {
  std::vector<std::string> parts;
  for (const auto& [arrow, values] : sections) parts.push_back(arrow + "=" + bracket_atom(values));
  return brace_atom(parts, ';');
}

std::string family_restrict(const FinCategory& base, const std::string& stage,
                            const std::string& family_atom, const std::string& arrow_id) {
  const Arrow& g = base.arrow(arrow_id);
  if (g.tgt != stage) fail(Err::codomain_mismatch, "family_restrict: arrow does not land on the stage");
  auto sections = family_sections(family_atom);
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& fid : base.arrows_into(g.src))
    out.emplace(fid, sections.at(base.compose_ids(arrow_id, fid)));
  return family_atom_from_sections(out);
}

ExpPresheaf psh_exponential(const Presheaf& f, const Presheaf& g, const Limits& lim) {
  const FinCategory& base = f.base();
  if (base.objects() != g.base().objects())
    fail(Err::parent_mismatch, "psh_exponential requires presheaves over the same base");
  std::map<std::string, FinSet> at;
  for (const auto& c : base.objects()) {
    std::vector<std::string> into = base.arrows_into(c);
    std::sort(into.begin(), into.end());
    // raw candidate count: prod over arrows of |G(dom)|^|F(dom)|
    double count = 1;
    for (const auto& fid : into) {
      const Arrow& a = base.arrow(fid);
      count *= std::pow(static_cast<double>(g.at(a.src).size()), static_cast<double>(f.at(a.src).size()));
      if (count > static_cast<double>(lim.max_enum))
        fail(Err::size_limit, "exponential family space exceeds enumeration cap at '" + c + "'");
    }
    std::vector<std::vector<FinFunction>> choices;
    for (const auto& fid : into) {
      const Arrow& a = base.arrow(fid);
      choices.push_back(all_functions(f.at(a.src), g.at(a.src), lim));
    }
    std::vector<std::string> elems;
    bool any_empty = std::any_of(choices.begin(), choices.end(), [](const auto& v) { return v.empty(); });
    if (!any_empty) {
      std::vector<std::size_t> odo(into.size(), 0);
      while (true) {
        // naturality: section(f∘g) ∘ F|g = G|g ∘ section(f)
        bool natural = true;
        for (std::size_t i = 0; i < into.size() && natural; ++i) {
          const Arrow& fa = base.arrow(into[i]);
          for (const auto& gb : base.arrows()) {
            if (gb.tgt != fa.src) continue;
            const std::string& comp = base.compose_ids(into[i], gb.id);
            std::size_t j = static_cast<std::size_t>(
                std::find(into.begin(), into.end(), comp) - into.begin());
            if (!(compose(choices[j][odo[j]], f.restriction(gb.id)) ==
                  compose(g.restriction(gb.id), choices[i][odo[i]]))) {
              natural = false;
              break;
            }
          }
        }
        if (natural) {
          std::map<std::string, std::vector<std::string>> sections;
          for (std::size_t i = 0; i < into.size(); ++i) {
            const FinFunction& fn = choices[i][odo[i]];
            std::vector<std::string> values;
            for (std::size_t k = 0; k < fn.dom().size(); ++k)
              values.push_back(fn.cod().at(static_cast<std::size_t>(fn.apply_index(static_cast<int>(k)))));
            sections.emplace(into[i], std::move(values));
          }
          elems.push_back(family_atom_from_sections(sections));
        }
        std::size_t k = into.size();
        bool done = into.empty();
        while (k-- > 0) {
          if (++odo[k] < choices[k].size()) break;
          odo[k] = 0;
          if (k == 0) done = true;
        }
        if (done) break;
      }
    }
    // the empty family (no arrows into c is impossible: identities exist);
    // any_empty means some hom-set has no functions, so no families either
    at.emplace(c, FinSet("(" + c + ")exp", elems));
  }
  std::map<std::string, FinFunction> restrict;
  for (const auto& a : base.arrows())
    restrict.emplace(a.id, FinFunction::tabulate(at.at(a.tgt), at.at(a.src), [&](const std::string& fam) {
      return family_restrict(base, a.tgt, fam, a.id);
    }));
  ExpPresheaf out;
  out.psh = Presheaf(base, std::move(at), std::move(restrict));
  out.arg = f;
  out.res = g;
  return out;
}

std::string ExpPresheaf::apply(const std::string& stage, const std::string& family_atom,
                               const std::string& x) const {
  auto sections = family_sections(family_atom);
  const auto& values = sections.at(psh.base().identity_of(stage));
  int i = arg.at(stage).index_or_throw(x);
  return values[static_cast<std::size_t>(i)];
}

// ---- topologies and sheaves ----------------------------------------------------------

bool GrothendieckTopology::contains(const Sieve& s) const {
  auto it = covers.find(s.on);
  if (it == covers.end()) return false;
  return std::find(it->second.begin(), it->second.end(), s) != it->second.end();
}

GrothendieckTopology trivial_topology(const FinCategory& c) {
  GrothendieckTopology j;
  j.base = c;
  for (const auto& obj : c.objects()) j.covers[obj] = {maximal_sieve(c, obj)};
  return j;
}

TopologyReport check_topology(const GrothendieckTopology& j) {
  TopologyReport rep;
  const FinCategory& c = j.base;
  for (const auto& obj : c.objects()) {
    auto it = j.covers.find(obj);
    const std::vector<Sieve> sieves = it == j.covers.end() ? std::vector<Sieve>{} : it->second;
    for (const auto& s : sieves) {
      if (s.on != obj) rep.violations.push_back("cover listed under '" + obj + "' is a sieve on '" + s.on + "'");
      if (!sieve_closed(c, s)) rep.violations.push_back("cover " + s.atom() + " on '" + obj + "' is not a sieve");
    }
    // axiom 1: maximal sieve present
    if (std::find(sieves.begin(), sieves.end(), maximal_sieve(c, obj)) == sieves.end())
      rep.violations.push_back("axiom 1: maximal sieve missing from J(" + obj + ")");
    // axiom 2: pullback stability
    for (const auto& s : sieves)
      for (const auto& a : c.arrows())
        if (a.tgt == obj && !j.contains(sieve_pullback(c, a.id, s)))
          rep.violations.push_back("axiom 2: pullback of " + s.atom() + " along '" + a.id + "' not in J(" + a.src + ")");
    // axiom 3 (transitivity): S covering, R a sieve with h*(R) covering for all h in S => R covering
    for (const auto& s : sieves)
      for (const auto& r : sieves_on(c, obj)) {
        if (j.contains(r)) continue;
        bool all_covered = true;
        for (const auto& hid : s.arrows)
          if (!j.contains(sieve_pullback(c, hid, r))) {
            all_covered = false;
            break;
          }
        if (all_covered)
          rep.violations.push_back("axiom 3: sieve " + r.atom() + " on '" + obj + "' is locally covering via " +
                                   s.atom() + " but not in J(" + obj + ")");
      }
  }
  return rep;
}

SheafReport is_sheaf(const Presheaf& f, const GrothendieckTopology& j) {
  const FinCategory& c = f.base();
  for (const auto& obj : c.objects()) {
    auto it = j.covers.find(obj);
    if (it == j.covers.end()) continue;
    for (const auto& s : it->second) {
      std::vector<std::string> arrows(s.arrows.begin(), s.arrows.end());
      // composition constraints inside the sieve: x_{f∘g} = x_f · g
      struct Constraint {
        std::size_t from, to;  // x_to = restrict(g)(x_from)
        std::string g;
      };
      std::vector<Constraint> constraints;
      for (std::size_t i = 0; i < arrows.size(); ++i) {
        const Arrow& fa = c.arrow(arrows[i]);
        for (const auto& gb : c.arrows()) {
          if (gb.tgt != fa.src) continue;
          const std::string& comp = c.compose_ids(arrows[i], gb.id);
          std::size_t k = static_cast<std::size_t>(std::find(arrows.begin(), arrows.end(), comp) - arrows.begin());
          constraints.push_back({i, k, gb.id});
        }
      }
      // enumerate matching families by DFS with pruning
      std::vector<int> assign(arrows.size(), -1);
      std::vector<std::vector<int>> families;
      std::function<void(std::size_t)> dfs = [&](std::size_t i) {
        if (i == arrows.size()) {
          families.push_back(assign);
          return;
        }
        const FinSet& stalk = f.at(c.arrow(arrows[i]).src);
        for (std::size_t v = 0; v < stalk.size(); ++v) {
          assign[i] = static_cast<int>(v);
          bool ok = true;
          for (const auto& con : constraints) {
            if (con.from > i || con.to > i) continue;
            if (assign[con.from] < 0 || assign[con.to] < 0) continue;
            const FinSet& from_stalk = f.at(c.arrow(arrows[con.from]).src);
            if (f.restrict_elem(con.g, from_stalk.at(static_cast<std::size_t>(assign[con.from]))) !=
                f.at(c.arrow(arrows[con.to]).src).at(static_cast<std::size_t>(assign[con.to]))) {
              ok = false;
              break;
            }
          }
          if (ok) dfs(i + 1);
        }
        assign[i] = -1;
      };
      dfs(0);
      for (const auto& fam : families) {
        std::size_t amalgamations = 0;
        std::string first, second;
        for (const auto& y : f.at(obj).elements()) {
          bool matches = true;
          for (std::size_t i = 0; i < arrows.size(); ++i)
            if (f.restrict_elem(arrows[i], y) !=
                f.at(c.arrow(arrows[i]).src).at(static_cast<std::size_t>(fam[i]))) {
              matches = false;
              break;
            }
          if (matches) {
            ++amalgamations;
            (amalgamations == 1 ? first : second) = y;
          }
        }
        if (amalgamations != 1) {
          SheafReport rep;
          rep.sheaf = false;
          std::vector<std::string> parts;
          for (std::size_t i = 0; i < arrows.size(); ++i)
            parts.push_back(arrows[i] + ":" + f.at(c.arrow(arrows[i]).src).at(static_cast<std::size_t>(fam[i])));
          rep.detail = "cover " + s.atom() + " on '" + obj + "', family {" + join(parts, ", ") + "} has " +
                       std::to_string(amalgamations) + " amalgamations" +
                       (amalgamations > 1 ? " (e.g. '" + first + "' and '" + second + "')" : "");
          return rep;
        }
      }
    }
  }
  return {};
}

// ---- plumbing -----------------------------------------------------------------------

Presheaf terminal_presheaf(const FinCategory& c) {
  std::map<std::string, FinSet> at;
  std::map<std::string, FinFunction> restrict;
  FinSet one("1", {"*"});
  for (const auto& obj : c.objects()) at.emplace(obj, one.renamed("1(" + obj + ")"));
  for (const auto& a : c.arrows())
    restrict.emplace(a.id, FinFunction(at.at(a.tgt), at.at(a.src), std::vector<int>{0}));
  return Presheaf(c, std::move(at), std::move(restrict));
}

Presheaf empty_presheaf(const FinCategory& c) {
  std::map<std::string, FinSet> at;
  std::map<std::string, FinFunction> restrict;
  for (const auto& obj : c.objects()) at.emplace(obj, FinSet("0(" + obj + ")", {}));
  for (const auto& a : c.arrows())
    restrict.emplace(a.id, FinFunction(at.at(a.tgt), at.at(a.src), std::vector<int>{}));
  return Presheaf(c, std::move(at), std::move(restrict));
}

ProductPresheaf psh_product(const Presheaf& f, const Presheaf& g) {
  std::map<std::string, FinSet> at;
  std::map<std::string, FinFunction> restrict;
  for (const auto& obj : f.base().objects()) at.emplace(obj, product(f.at(obj), g.at(obj)).set);
  for (const auto& a : f.base().arrows())
    restrict.emplace(a.id, FinFunction::tabulate(at.at(a.tgt), at.at(a.src), [&](const std::string& pr) {
      auto parts = tuple_parts(pr);
      return tuple_atom({f.restrict_elem(a.id, parts[0]), g.restrict_elem(a.id, parts[1])});
    }));
  ProductPresheaf out;
  out.psh = Presheaf(f.base(), std::move(at), std::move(restrict));
  out.left = f;
  out.right = g;
  return out;
}

std::vector<PshMorphism> all_morphisms(const Presheaf& f, const Presheaf& g, const Limits& lim) {
  const auto& objs = f.base().objects();
  double count = 1;
  for (const auto& o : objs) {
    if (f.at(o).empty()) continue;
    if (g.at(o).empty()) return {};
    count *= std::pow(static_cast<double>(g.at(o).size()), static_cast<double>(f.at(o).size()));
    if (count > static_cast<double>(lim.max_enum)) fail(Err::size_limit, "hom-set exceeds enumeration cap");
  }
  std::vector<std::vector<FinFunction>> choices;
  for (const auto& o : objs) choices.push_back(all_functions(f.at(o), g.at(o), lim));
  std::vector<PshMorphism> out;
  std::vector<std::size_t> odo(objs.size(), 0);
  while (true) {
    PshMorphism m;
    m.src = f;
    m.dst = g;
    for (std::size_t k = 0; k < objs.size(); ++k) m.components.emplace(objs[k], choices[k][odo[k]]);
    if (m.natural()) out.push_back(std::move(m));
    std::size_t k = objs.size();
    bool done = objs.empty();
    while (k-- > 0) {
      if (++odo[k] < choices[k].size()) break;
      odo[k] = 0;
      if (k == 0) done = true;
    }
    if (done) break;
  }
  return out;
}

}  // namespace tcm
