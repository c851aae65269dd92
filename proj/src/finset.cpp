#include "tcm/finset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tcm {

// ---- FinSet --------------------------------------------------------------

FinSet::FinSet() : FinSet("", {}) {}

FinSet::FinSet(std::string name, std::vector<std::string> elements) {
  auto rep = std::make_shared<Rep>();
  rep->name = std::move(name);
  rep->elements = std::move(elements);
  for (std::size_t i = 0; i < rep->elements.size(); ++i) {
    auto [it, fresh] = rep->index.emplace(rep->elements[i], static_cast<int>(i));
    if (!fresh)
      fail(Err::validation, "duplicate element '" + rep->elements[i] + "' in set '" + rep->name + "'");
  }
  rep_ = std::move(rep);
}

FinSet FinSet::lex(std::string name, std::vector<std::string> elements) {
  std::sort(elements.begin(), elements.end());
  return FinSet(std::move(name), std::move(elements));
}

bool FinSet::contains(const std::string& atom) const { return rep_->index.count(atom) > 0; }

int FinSet::index_of(const std::string& atom) const {
  auto it = rep_->index.find(atom);
  return it == rep_->index.end() ? -1 : it->second;
}

int FinSet::index_or_throw(const std::string& atom) const {
  int i = index_of(atom);
  if (i < 0) fail(Err::value_out_of_domain, "'" + atom + "' is not an element of set '" + name() + "'");
  return i;
}

bool FinSet::same_elements(const FinSet& other) const {
  return rep_ == other.rep_ || rep_->elements == other.rep_->elements;
}

FinSet FinSet::renamed(std::string name) const { return FinSet(std::move(name), rep_->elements); }

// ---- FinFunction ----------------------------------------------------------

FinFunction::FinFunction() = default;

FinFunction::FinFunction(FinSet dom, FinSet cod, std::vector<int> table)
    : dom_(std::move(dom)), cod_(std::move(cod)), table_(std::move(table)) {
  if (table_.size() != dom_.size())
    fail(Err::validation, "function table size does not match domain '" + dom_.name() + "'");
  for (int v : table_)
    if (v < 0 || static_cast<std::size_t>(v) >= cod_.size())
      fail(Err::validation, "function table image outside codomain '" + cod_.name() + "'");
}

FinFunction::FinFunction(FinSet dom, FinSet cod, const std::map<std::string, std::string>& table) {
  std::vector<int> t;
  t.reserve(dom.size());
  for (const auto& x : dom.elements()) {
    auto it = table.find(x);
    if (it == table.end())
      fail(Err::validation, "function table not total: missing '" + x + "' in domain '" + dom.name() + "'");
    t.push_back(cod.index_or_throw(it->second));
  }
  if (table.size() != dom.size())
    fail(Err::validation, "function table has entries outside domain '" + dom.name() + "'");
  *this = FinFunction(std::move(dom), std::move(cod), std::move(t));
}

FinFunction FinFunction::identity(const FinSet& s) {
  std::vector<int> t(s.size());
  std::iota(t.begin(), t.end(), 0);
  return FinFunction(s, s, std::move(t));
}

FinFunction FinFunction::constant(const FinSet& dom, const FinSet& cod, const std::string& value) {
  int v = cod.index_or_throw(value);
  return FinFunction(dom, cod, std::vector<int>(dom.size(), v));
}

const std::string& FinFunction::operator()(const std::string& x) const {
  return cod_.at(static_cast<std::size_t>(table_[static_cast<std::size_t>(dom_.index_or_throw(x))]));
}

bool FinFunction::operator==(const FinFunction& other) const {
  return dom_.same_elements(other.dom_) && cod_.same_elements(other.cod_) && table_ == other.table_;
}

// ---- SubSet ----------------------------------------------------------------

SubSet::SubSet(FinSet parent, const std::vector<std::string>& members) : parent_(std::move(parent)) {
  for (const auto& m : members) members_.push_back(parent_.index_or_throw(m));
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

SubSet::SubSet(FinSet parent, std::vector<int> member_indices)
    : parent_(std::move(parent)), members_(std::move(member_indices)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  for (int i : members_)
    if (i < 0 || static_cast<std::size_t>(i) >= parent_.size())
      fail(Err::validation, "subset member index out of range");
}

std::vector<std::string> SubSet::members() const {
  std::vector<std::string> out;
  out.reserve(members_.size());
  for (int i : members_) out.push_back(parent_.at(static_cast<std::size_t>(i)));
  return out;
}

bool SubSet::contains(const std::string& atom) const {
  int i = parent_.index_of(atom);
  return i >= 0 && std::binary_search(members_.begin(), members_.end(), i);
}

FinSet SubSet::as_finset(const std::string& name) const { return FinSet(name, members()); }

FinFunction SubSet::include() const {
  return FinFunction(as_finset(parent_.name() + "|sub"), parent_, std::vector<int>(members_.begin(), members_.end()));
}

// ---- operations -------------------------------------------------------------

FinFunction compose(const FinFunction& g, const FinFunction& f) {
  if (!f.cod().same_elements(g.dom()))
    fail(Err::domain_mismatch, "compose: cod of '" + f.cod().name() + "' differs from dom '" + g.dom().name() + "'");
  std::vector<int> t;
  t.reserve(f.dom().size());
  for (std::size_t i = 0; i < f.dom().size(); ++i) t.push_back(g.apply_index(f.apply_index(static_cast<int>(i))));
  return FinFunction(f.dom(), g.cod(), std::move(t));
}

MorphismClass morphism_class(const FinFunction& f) {
  MorphismClass mc;
  std::vector<char> hit(f.cod().size(), 0);
  bool injective = true;
  for (std::size_t i = 0; i < f.dom().size(); ++i) {
    int v = f.apply_index(static_cast<int>(i));
    if (hit[static_cast<std::size_t>(v)]) injective = false;
    hit[static_cast<std::size_t>(v)] = 1;
  }
  mc.monic = injective;
  mc.epic = std::all_of(hit.begin(), hit.end(), [](char c) { return c != 0; });
  mc.iso = mc.monic && mc.epic;
  return mc;
}

ProductResult product(const FinSet& a, const FinSet& b) {
  std::vector<std::string> elems;
  std::vector<int> t1, t2;
  elems.reserve(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      elems.push_back(tuple_atom({a.at(i), b.at(j)}));
      t1.push_back(static_cast<int>(i));
      t2.push_back(static_cast<int>(j));
    }
  FinSet p("(" + a.name() + "x" + b.name() + ")", std::move(elems));
  return {p, FinFunction(p, a, std::move(t1)), FinFunction(p, b, std::move(t2))};
}

TupleProductResult tuple_product(const std::string& name, const std::vector<FinSet>& factors,
                                 const Limits& lim) {
  std::size_t total = 1;
  for (const auto& f : factors) {
    if (f.empty()) {
      total = 0;
      break;
    }
    if (total > lim.max_enum / f.size())
      fail(Err::size_limit, "tuple_product exceeds enumeration cap");
    total *= f.size();
  }
  std::vector<std::string> elems;
  std::vector<std::vector<int>> proj_tables(factors.size());
  if (total > 0) {
    std::vector<std::size_t> odo(factors.size(), 0);
    for (std::size_t n = 0; n < total; ++n) {
      std::vector<std::string> parts;
      parts.reserve(factors.size());
      for (std::size_t k = 0; k < factors.size(); ++k) {
        parts.push_back(factors[k].at(odo[k]));
        proj_tables[k].push_back(static_cast<int>(odo[k]));
      }
      elems.push_back(tuple_atom(parts));
      // increment last-coordinate-fastest (lexicographic on component order)
      for (std::size_t k = factors.size(); k-- > 0;) {
        if (++odo[k] < factors[k].size()) break;
        odo[k] = 0;
      }
    }
  }
  TupleProductResult out;
  out.set = FinSet(name, std::move(elems));
  for (std::size_t k = 0; k < factors.size(); ++k)
    out.projections.emplace_back(out.set, factors[k], std::move(proj_tables[k]));
  return out;
}

CoproductResult coproduct(const FinSet& a, const FinSet& b) {
  std::vector<std::string> elems;
  std::vector<int> t1, t2;
  for (std::size_t i = 0; i < a.size(); ++i) {
    elems.push_back("L:" + a.at(i));
    t1.push_back(static_cast<int>(i));
  }
  for (std::size_t j = 0; j < b.size(); ++j) {
    elems.push_back("R:" + b.at(j));
    t2.push_back(static_cast<int>(a.size() + j));
  }
  FinSet s("(" + a.name() + "+" + b.name() + ")", std::move(elems));
  return {s, FinFunction(a, s, std::move(t1)), FinFunction(b, s, std::move(t2))};
}

EqualizerResult equalizer(const FinFunction& f, const FinFunction& g) {
  if (!f.dom().same_elements(g.dom()) || !f.cod().same_elements(g.cod()))
    fail(Err::not_parallel, "equalizer requires parallel functions");
  std::vector<int> members;
  for (std::size_t i = 0; i < f.dom().size(); ++i)
    if (f.apply_index(static_cast<int>(i)) == g.apply_index(static_cast<int>(i)))
      members.push_back(static_cast<int>(i));
  SubSet sub(f.dom(), std::move(members));
  return {sub, sub.include()};
}

namespace {

// Plain union-find over codomain indices; classes named "q:<minimal member>".
struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }
};

CoequalizerResult quotient_by(const FinSet& cod, UnionFind& uf, const std::string& name) {
  // Class representative = smallest member index; class order = representative order.
  std::vector<int> reps;
  std::vector<int> class_of(cod.size(), -1);
  for (std::size_t i = 0; i < cod.size(); ++i) {
    int r = uf.find(static_cast<int>(i));
    if (class_of[static_cast<std::size_t>(r)] < 0) {
      class_of[static_cast<std::size_t>(r)] = static_cast<int>(reps.size());
      reps.push_back(r);
    }
  }
  std::vector<std::string> elems;
  elems.reserve(reps.size());
  for (int r : reps) elems.push_back("q:" + cod.at(static_cast<std::size_t>(r)));
  FinSet q(name, std::move(elems));
  std::vector<int> t(cod.size());
  for (std::size_t i = 0; i < cod.size(); ++i)
    t[i] = class_of[static_cast<std::size_t>(uf.find(static_cast<int>(i)))];
  return {q, FinFunction(cod, q, std::move(t))};
}

}  // namespace

CoequalizerResult coequalizer(const FinFunction& f, const FinFunction& g) {
  if (!f.dom().same_elements(g.dom()) || !f.cod().same_elements(g.cod()))
    fail(Err::not_parallel, "coequalizer requires parallel functions");
  UnionFind uf(f.cod().size());
  for (std::size_t i = 0; i < f.dom().size(); ++i)
    uf.unite(f.apply_index(static_cast<int>(i)), g.apply_index(static_cast<int>(i)));
  return quotient_by(f.cod(), uf, f.cod().name() + "/~");
}

PullbackResult pullback(const FinFunction& f, const FinFunction& g) {
  if (!f.cod().same_elements(g.cod()))
    fail(Err::codomain_mismatch, "pullback requires a shared codomain");
  std::vector<std::string> elems;
  std::vector<int> t1, t2;
  for (std::size_t i = 0; i < f.dom().size(); ++i)
    for (std::size_t j = 0; j < g.dom().size(); ++j)
      if (f.apply_index(static_cast<int>(i)) == g.apply_index(static_cast<int>(j))) {
        elems.push_back(tuple_atom({f.dom().at(i), g.dom().at(j)}));
        t1.push_back(static_cast<int>(i));
        t2.push_back(static_cast<int>(j));
      }
  FinSet p("(" + f.dom().name() + "x_" + f.cod().name() + " " + g.dom().name() + ")", std::move(elems));
  return {p, FinFunction(p, f.dom(), std::move(t1)), FinFunction(p, g.dom(), std::move(t2))};
}

PushoutResult pushout(const FinFunction& f, const FinFunction& g) {
  if (!f.dom().same_elements(g.dom()))
    fail(Err::domain_mismatch, "pushout requires a shared domain");
  CoproductResult cp = coproduct(f.cod(), g.cod());
  UnionFind uf(cp.set.size());
  for (std::size_t i = 0; i < f.dom().size(); ++i)
    uf.unite(cp.inj1.apply_index(f.apply_index(static_cast<int>(i))),
             cp.inj2.apply_index(g.apply_index(static_cast<int>(i))));
  CoequalizerResult q = quotient_by(cp.set, uf, "(" + f.cod().name() + "+_" + f.dom().name() + " " + g.cod().name() + ")");
  return {q.set, compose(q.quotient_map, cp.inj1), compose(q.quotient_map, cp.inj2)};
}

std::vector<FinFunction> all_functions(const FinSet& dom, const FinSet& cod, const Limits& lim) {
  std::vector<FinFunction> out;
  if (dom.empty()) {
    out.push_back(FinFunction(dom, cod, std::vector<int>{}));
    return out;
  }
  if (cod.empty()) return out;  // no total functions
  double count = std::pow(static_cast<double>(cod.size()), static_cast<double>(dom.size()));
  if (count > static_cast<double>(lim.max_enum)) fail(Err::size_limit, "function space exceeds enumeration cap");
  std::vector<int> t(dom.size(), 0);
  while (true) {
    out.push_back(FinFunction(dom, cod, t));
    std::size_t k = dom.size();
    while (k-- > 0) {
      if (++t[k] < static_cast<int>(cod.size())) break;
      t[k] = 0;
      if (k == 0) return out;
    }
  }
}

ExponentialResult exponential(const FinSet& a, const FinSet& b, const Limits& lim) {
  std::vector<FinFunction> fns = all_functions(a, b, lim);
  std::vector<std::string> elems;
  elems.reserve(fns.size());
  for (const auto& fn : fns) {
    std::vector<std::string> vals;
    vals.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) vals.push_back(b.at(static_cast<std::size_t>(fn.apply_index(static_cast<int>(i)))));
    elems.push_back(bracket_atom(vals));
  }
  FinSet exp("(" + b.name() + "^" + a.name() + ")", std::move(elems));
  ProductResult prod = product(exp, a);
  std::vector<int> ev;
  ev.reserve(prod.set.size());
  for (const auto& pair : prod.set.elements()) {
    auto parts = tuple_parts(pair);
    int fi = exp.index_or_throw(parts[0]);
    int ai = a.index_or_throw(parts[1]);
    ev.push_back(fns[static_cast<std::size_t>(fi)].apply_index(ai));
  }
  return {exp, prod.set, FinFunction(prod.set, b, std::move(ev))};
}

FinFunction decode_function(const FinSet& dom, const FinSet& cod, const std::string& atom) {
  auto vals = bracket_parts(atom);
  if (vals.size() != dom.size()) fail(Err::parse_error, "encoded function arity mismatch: " + atom);
  std::vector<int> t;
  t.reserve(vals.size());
  for (const auto& v : vals) t.push_back(cod.index_or_throw(v));
  return FinFunction(dom, cod, std::move(t));
}

const FinSet& two_point_set() {
  static const FinSet two("2", {"0", "1"});
  return two;
}

FinFunction characteristic(const SubSet& s) {
  std::vector<int> t(s.parent().size(), 0);
  for (int i : s.member_indices()) t[static_cast<std::size_t>(i)] = 1;
  return FinFunction(s.parent(), two_point_set(), std::move(t));
}

}  // namespace tcm
