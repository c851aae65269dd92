#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tcm/core.hpp"

namespace tcm {

// A named finite set of distinct atom strings. Element order is canonical:
// it defines iteration and serialization. Immutable; copies share storage.
class FinSet {
 public:
  FinSet();  // empty unnamed set
  FinSet(std::string name, std::vector<std::string> elements);

  // Sorts the elements lexicographically (the canonical order for primitive
  // sets; derived constructions order by component instead).
  static FinSet lex(std::string name, std::vector<std::string> elements);

  const std::string& name() const { return rep_->name; }
  const std::vector<std::string>& elements() const { return rep_->elements; }
  std::size_t size() const { return rep_->elements.size(); }
  bool empty() const { return rep_->elements.empty(); }
  const std::string& at(std::size_t i) const { return rep_->elements[i]; }
  bool contains(const std::string& atom) const;
  int index_of(const std::string& atom) const;  // -1 when absent
  int index_or_throw(const std::string& atom) const;

  // Identity of carriers: same element list in the same order (names are
  // labels, not identity).
  bool same_elements(const FinSet& other) const;

  FinSet renamed(std::string name) const;

 private:
  struct Rep {
    std::string name;
    std::vector<std::string> elements;
    std::map<std::string, int> index;
  };
  std::shared_ptr<const Rep> rep_;
};

// A total tabulated function between finite sets.
class FinFunction {
 public:
  FinFunction();  // empty -> empty
  FinFunction(FinSet dom, FinSet cod, std::vector<int> table);
  FinFunction(FinSet dom, FinSet cod, const std::map<std::string, std::string>& table);

  static FinFunction identity(const FinSet& s);
  static FinFunction constant(const FinSet& dom, const FinSet& cod, const std::string& value);
  // Build from a callable atom -> atom.
  template <typename F>
  static FinFunction tabulate(FinSet dom, FinSet cod, F&& f) {
    std::vector<int> t;
    t.reserve(dom.size());
    for (const auto& x : dom.elements()) t.push_back(cod.index_or_throw(f(x)));
    return FinFunction(std::move(dom), std::move(cod), std::move(t));
  }

  const FinSet& dom() const { return dom_; }
  const FinSet& cod() const { return cod_; }
  const std::string& operator()(const std::string& x) const;
  int apply_index(int i) const { return table_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& table() const { return table_; }

  bool operator==(const FinFunction& other) const;

 private:
  FinSet dom_, cod_;
  std::vector<int> table_;  // dom index -> cod index
};

// A subset of a parent set; members kept in parent order.
class SubSet {
 public:
  SubSet(FinSet parent, const std::vector<std::string>& members);
  SubSet(FinSet parent, std::vector<int> member_indices);

  const FinSet& parent() const { return parent_; }
  const std::vector<int>& member_indices() const { return members_; }
  std::vector<std::string> members() const;
  bool contains(const std::string& atom) const;
  std::size_t size() const { return members_.size(); }

  FinSet as_finset(const std::string& name) const;
  FinFunction include() const;  // monic inclusion into parent

 private:
  FinSet parent_;
  std::vector<int> members_;  // sorted parent indices
};

struct MorphismClass {
  bool monic = false;
  bool epic = false;
  bool iso = false;
};

struct ProductResult {
  FinSet set;
  FinFunction proj1, proj2;
};

struct TupleProductResult {
  FinSet set;
  std::vector<FinFunction> projections;
  // component atoms -> tuple atom (canonical encode)
  std::string atom(const std::vector<std::string>& parts) const { return tuple_atom(parts); }
};

struct CoproductResult {
  FinSet set;
  FinFunction inj1, inj2;
};

struct EqualizerResult {
  SubSet sub;
  FinFunction include;
};

struct CoequalizerResult {
  FinSet set;
  FinFunction quotient_map;
};

struct PullbackResult {
  FinSet set;
  FinFunction p1, p2;
};

struct PushoutResult {
  FinSet set;
  FinFunction i1, i2;
};

struct ExponentialResult {
  FinSet set;           // atoms "[v1,v2,...]" positional over A's order
  FinSet product;       // B^A x A
  FinFunction eval;     // B^A x A -> B
};

FinFunction compose(const FinFunction& g, const FinFunction& f);
MorphismClass morphism_class(const FinFunction& f);

ProductResult product(const FinSet& a, const FinSet& b);
TupleProductResult tuple_product(const std::string& name, const std::vector<FinSet>& factors,
                                 const Limits& lim = {});
CoproductResult coproduct(const FinSet& a, const FinSet& b);
EqualizerResult equalizer(const FinFunction& f, const FinFunction& g);
CoequalizerResult coequalizer(const FinFunction& f, const FinFunction& g);
PullbackResult pullback(const FinFunction& f, const FinFunction& g);
PushoutResult pushout(const FinFunction& f, const FinFunction& g);
ExponentialResult exponential(const FinSet& a, const FinSet& b, const Limits& lim = {});

// The two-point truth-value set {0,1} and characteristic maps into it.
const FinSet& two_point_set();
FinFunction characteristic(const SubSet& s);

// All functions dom -> cod, in canonical (odometer) order.
std::vector<FinFunction> all_functions(const FinSet& dom, const FinSet& cod, const Limits& lim = {});

// Decode an exponential element "[v1,...]" into the function it encodes.
FinFunction decode_function(const FinSet& dom, const FinSet& cod, const std::string& atom);

}  // namespace tcm
