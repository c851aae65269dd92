#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tcm/finset.hpp"

namespace tcm {

struct Arrow {
  std::string id, src, tgt;
};

// A finite category with an explicitly tabulated composition. Identities are
// named "id_<object>" and added automatically by the builder.
class FinCategory {
 public:
  const std::string& name() const { return name_; }
  const std::vector<std::string>& objects() const { return objects_; }
  const std::vector<Arrow>& arrows() const { return arrows_; }

  bool has_object(const std::string& obj) const { return obj_index_.count(obj) > 0; }
  bool has_arrow(const std::string& id) const { return arrow_index_.count(id) > 0; }
  const Arrow& arrow(const std::string& id) const;
  const std::string& identity_of(const std::string& obj) const;
  bool is_identity(const std::string& id) const;

  // g after f; Err::unknown_arrow if the pair is not composable or the table
  // has no entry for it.
  const std::string& compose_ids(const std::string& g, const std::string& f) const;
  bool composable(const std::string& g, const std::string& f) const;

  std::vector<std::string> arrows_into(const std::string& obj) const;
  std::vector<std::string> arrows_from(const std::string& obj) const;

  struct Report {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
  };
  Report validate() const;

  FinCategory opposite() const;

  friend class FinCategoryBuilder;

 private:
  std::string name_;
  std::vector<std::string> objects_;
  std::vector<Arrow> arrows_;
  std::map<std::string, int> obj_index_, arrow_index_;
  std::vector<int> identity_;            // object -> arrow index
  std::vector<std::vector<int>> comp_;   // comp_[g][f] = g∘f, -1 if absent
};

class FinCategoryBuilder {
 public:
  explicit FinCategoryBuilder(std::string name);
  FinCategoryBuilder& object(const std::string& obj);
  FinCategoryBuilder& arrow(const std::string& id, const std::string& src, const std::string& tgt);
  FinCategoryBuilder& compose_rule(const std::string& g, const std::string& f, const std::string& gf);
  // Adds identities and all identity composites, then freezes. Does not
  // validate; call FinCategory::validate for a report.
  FinCategory build();

 private:
  std::string name_;
  std::vector<std::string> objects_;
  std::vector<Arrow> arrows_;
  std::vector<std::array<std::string, 3>> rules_;
};

// The free category on a graph: saturates composites ("(g.f)") until closure.
// Errs with Err::cyclic_model when saturation does not terminate under the cap.
FinCategory free_category(const std::string& name, const std::vector<std::string>& objects,
                          const std::vector<Arrow>& generators, std::size_t arrow_cap = 512);

// Stock shapes and bases.
FinCategory one_object_category();
FinCategory discrete_category(const std::string& name, const std::vector<std::string>& objects);
FinCategory interval_category(const std::string& src, const std::string& tgt, const std::string& arrow);
// Canonical interval base: objects {a,b}, u: b -> a (three sieves on a).
const FinCategory& interval_base();
FinCategory parallel_pair_category();  // x ⇉ y with arrows f,g
FinCategory cospan_category();         // x -f-> z <-g- y (pullback shape)
FinCategory span_category();           // x <-f- z -g-> y (pushout shape)
FinCategory chain3_category();         // a -> b -> c with composite
// Poset of opens of the two-point discrete space: ∅, U, V, X with inclusions.
FinCategory poset_square_category();

// A set-valued diagram: a functor shape -> FinSet.
class SetDiagram {
 public:
  SetDiagram() = default;
  SetDiagram(FinCategory shape, std::map<std::string, FinSet> objects,
             std::map<std::string, FinFunction> arrows);

  const FinCategory& shape() const { return shape_; }
  const FinSet& at(const std::string& obj) const;
  const FinFunction& on(const std::string& arrow_id) const;

  struct Report {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
  };
  Report validate() const;  // Err::invalid_shape if the shape itself is broken

 private:
  FinCategory shape_;
  std::map<std::string, FinSet> objects_;
  std::map<std::string, FinFunction> arrows_;
};

enum class ConeDirection { over, under };

// A (co)cone: apex with one leg per shape object. For an over-cone the legs
// run apex -> D(j); for an under-cone D(j) -> nadir.
struct Cone {
  SetDiagram diagram;
  FinSet apex;
  std::map<std::string, FinFunction> legs;
  ConeDirection direction = ConeDirection::over;

  bool commutes() const;
};

// A natural transformation between parallel set-valued diagrams.
struct NatTransformation {
  SetDiagram source, target;
  std::map<std::string, FinFunction> components;

  bool natural() const;
};

Cone limit(const SetDiagram& d, const Limits& lim = {});
Cone colimit(const SetDiagram& d);

// The unique factorization of `candidate` through `universal`.
FinFunction mediating_morphism(const Cone& universal, const Cone& candidate);

// Exhaustive check of the universal property over candidate apexes of size
// <= lim.apex_bound.
bool is_universal_cone(const Cone& c, const Limits& lim = {});

// Number of mediating morphisms candidate -> universal (over) or
// universal -> candidate (under); used by the universality check.
std::size_t mediator_count(const Cone& universal, const Cone& candidate);

// Diagram constructors for the stock shapes.
SetDiagram cospan_diagram(const FinFunction& f, const FinFunction& g);    // f: X->Z, g: Y->Z
SetDiagram span_diagram(const FinFunction& f, const FinFunction& g);      // f: Z->X, g: Z->Y
SetDiagram parallel_diagram(const FinFunction& f, const FinFunction& g);  // f,g: X->Y
SetDiagram discrete_diagram(const std::vector<FinSet>& sets);

}  // namespace tcm
