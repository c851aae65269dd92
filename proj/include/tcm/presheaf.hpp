#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "tcm/fincat.hpp"

namespace tcm {

// A presheaf on a finite base category: a contravariant set-valued functor.
// For an arrow f: c -> d the restriction runs at(d) -> at(c).
class Presheaf {
 public:
  Presheaf() = default;
  Presheaf(FinCategory base, std::map<std::string, FinSet> at,
           std::map<std::string, FinFunction> restrict);

  const FinCategory& base() const { return base_; }
  const FinSet& at(const std::string& obj) const;
  const FinFunction& restriction(const std::string& arrow_id) const;
  // restrict an element of at(cod f) along f
  const std::string& restrict_elem(const std::string& arrow_id, const std::string& elem) const;

  struct Report {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
  };
  Report validate() const;

 private:
  FinCategory base_;
  std::map<std::string, FinSet> at_;
  std::map<std::string, FinFunction> restrict_;
};

bool presheaves_equal(const Presheaf& a, const Presheaf& b);

// A set of arrows into one object, closed under precomposition.
struct Sieve {
  std::string on;
  std::set<std::string> arrows;

  std::string atom() const;  // "{f,g}" with ids sorted
  bool operator==(const Sieve& other) const { return on == other.on && arrows == other.arrows; }
  bool operator<(const Sieve& other) const {
    return on != other.on ? on < other.on : arrows < other.arrows;
  }
};

bool sieve_closed(const FinCategory& c, const Sieve& s);
Sieve maximal_sieve(const FinCategory& c, const std::string& obj);
Sieve sieve_from_atom(const std::string& obj, const std::string& atom);

// A pointwise subset of a presheaf, closed under restriction.
class SubPresheaf {
 public:
  SubPresheaf() = default;
  SubPresheaf(Presheaf parent, std::map<std::string, std::set<std::string>> members);

  const Presheaf& parent() const { return parent_; }
  const std::set<std::string>& members(const std::string& obj) const;
  bool contains(const std::string& obj, const std::string& elem) const;
  bool closed() const;  // restriction closure

  bool operator==(const SubPresheaf& other) const { return members_ == other.members_; }
  bool operator<(const SubPresheaf& other) const { return members_ < other.members_; }

 private:
  Presheaf parent_;
  std::map<std::string, std::set<std::string>> members_;
};

// A morphism of presheaves over the same base.
struct PshMorphism {
  Presheaf src, dst;
  std::map<std::string, FinFunction> components;

  const FinFunction& at(const std::string& obj) const { return components.at(obj); }
  bool natural() const;
};

PshMorphism psh_compose(const PshMorphism& g, const PshMorphism& f);

struct GrothendieckTopology {
  FinCategory base;
  std::map<std::string, std::vector<Sieve>> covers;

  bool contains(const Sieve& s) const;
};

GrothendieckTopology trivial_topology(const FinCategory& c);

struct Omega {
  Presheaf psh;
  std::map<std::string, std::string> true_point;  // object -> maximal sieve atom

  const std::string& truth(const std::string& obj) const { return true_point.at(obj); }
};

struct TopologyReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

struct SheafReport {
  bool sheaf = true;
  std::string detail;  // first failing cover and witness family, when not a sheaf
};

Presheaf yoneda(const FinCategory& c, const std::string& x);
std::vector<Sieve> sieves_on(const FinCategory& c, const std::string& x);
Sieve sieve_pullback(const FinCategory& c, const std::string& arrow_id, const Sieve& s);
Omega omega(const FinCategory& c);

PshMorphism classify(const SubPresheaf& s);
// Pull the true point back along chi: X -> Omega; inverse of classify.
SubPresheaf truepoint_pullback(const PshMorphism& chi);

std::vector<SubPresheaf> subobjects(const Presheaf& x, const Limits& lim = {});

enum class HeytingOp { meet, join, implies, complement };
SubPresheaf heyting(HeytingOp op, const SubPresheaf& a, const SubPresheaf& b);
SubPresheaf heyting_not(const SubPresheaf& a);
bool sub_leq(const SubPresheaf& a, const SubPresheaf& b);
SubPresheaf full_sub(const Presheaf& p);
SubPresheaf empty_sub(const Presheaf& p);

// Exponential presheaf G^F. Stalk elements are encoded natural families
// "{f=[..];g=[..]}": one section per arrow into the stage, positional over
// F's stalk at the arrow's domain.
struct ExpPresheaf {
  Presheaf psh;
  Presheaf arg, res;  // F and G

  // apply the family at its own stage (the section at the identity)
  std::string apply(const std::string& stage, const std::string& family_atom,
                    const std::string& x) const;
};

ExpPresheaf psh_exponential(const Presheaf& f, const Presheaf& g, const Limits& lim = {});

// Encode/restrict helpers shared with the term evaluator.
std::string family_restrict(const FinCategory& base, const std::string& stage,
                            const std::string& family_atom, const std::string& arrow_id);
std::map<std::string, std::vector<std::string>> family_sections(const std::string& family_atom);
std::string family_atom_from_sections(const std::map<std::string, std::vector<std::string>>& sections);

TopologyReport check_topology(const GrothendieckTopology& j);
SheafReport is_sheaf(const Presheaf& f, const GrothendieckTopology& j);

// Plumbing shared by the logic layer and the test suites.
Presheaf terminal_presheaf(const FinCategory& c);
Presheaf empty_presheaf(const FinCategory& c);
struct ProductPresheaf {
  Presheaf psh;
  Presheaf left, right;
};
ProductPresheaf psh_product(const Presheaf& f, const Presheaf& g);

// All natural transformations F -> G (brute force; used for classifier counts).
std::vector<PshMorphism> all_morphisms(const Presheaf& f, const Presheaf& g, const Limits& lim = {});

// The Yoneda correspondence: an element of M(c) as a morphism y(c) -> M.
PshMorphism yoneda_morphism(const Presheaf& m, const std::string& c, const std::string& elem);

// Pointwise image of a morphism as a subobject of its codomain.
SubPresheaf image_sub(const PshMorphism& alpha);

// A subobject as a presheaf in its own right, with its inclusion.
Presheaf sub_as_presheaf(const SubPresheaf& s);
PshMorphism sub_inclusion(const SubPresheaf& s);

}  // namespace tcm
