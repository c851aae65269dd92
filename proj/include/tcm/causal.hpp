#pragma once

#include <optional>

#include "tcm/presheaf.hpp"

namespace tcm {

struct Variable {
  std::string name;
  FinSet domain;
};

// One autonomous mechanism: the value of a variable as a tabulated function
// of its parents. The table's domain is the tuple set of the parent domains
// in parent order ("()" for constants).
struct Mechanism {
  std::vector<std::string> parents;
  FinFunction table;
};

class CausalModel {
 public:
  CausalModel() = default;
  CausalModel(std::string name, std::vector<Variable> exogenous, std::vector<Variable> endogenous,
              std::map<std::string, Mechanism> mechanisms);

  const std::string& name() const { return name_; }
  const std::vector<Variable>& exogenous() const { return exogenous_; }
  const std::vector<Variable>& endogenous() const { return endogenous_; }
  const Mechanism& mechanism(const std::string& var) const;

  bool is_exogenous(const std::string& var) const;
  bool is_endogenous(const std::string& var) const;
  const FinSet& domain_of(const std::string& var) const;

  struct Report {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
  };
  Report validate() const;

  // Evaluation order of the endogenous dependency graph;
  // Err::cyclic_model (with the cycle spelled out) when none exists.
  std::vector<std::string> topological_order() const;

  FinSet exogenous_tuple_set() const;   // atoms "(u1,u2,...)"
  FinSet endogenous_tuple_set() const;  // atoms "(v1,v2,...)"
  int endogenous_index(const std::string& var) const;

 private:
  std::string name_;
  std::vector<Variable> exogenous_, endogenous_;
  std::map<std::string, Mechanism> mechanisms_;
};

// An object of the arrow category: a total function from exogenous tuples to
// endogenous tuples. Solved models carry their CausalModel; derived objects
// (pullbacks, exponentials) do not.
struct TcmObject {
  std::optional<CausalModel> model;
  FinFunction global;

  const FinSet& exo() const { return global.dom(); }
  const FinSet& endo() const { return global.cod(); }
};

// A commuting square between two arrow-category objects.
struct TcmSquare {
  TcmObject src, dst;
  FinFunction h;  // exogenous side
  FinFunction k;  // endogenous side

  bool commutes() const;
};

struct Intervention {
  // target -> clamped value, keyed so composites are order-independent
  std::map<std::string, std::string> assignments;

  bool empty() const { return assignments.empty(); }
  std::string label() const;  // "do(B=1,C=0)"
};

struct InterventionResult {
  TcmObject intervened;  // the full submodel M_x on the same tuple sets
  TcmSquare square;      // the monic embedding of the consistent fragment into M
};

TcmObject solve(const CausalModel& model);
InterventionResult intervene(const TcmObject& m, const Intervention& i);
std::string potential_outcome(const TcmObject& m, const std::string& y, const Intervention& i,
                              const std::string& u);

// The arrow-category classifier: psi lands in the three sieves on the
// interval base ("0" | "1/2" | "1"); chi in the two ("0" | "1").
struct ArrowOmega {
  FinSet psi_values;  // Omega(a): {}, {u}, {id_a,u}
  FinSet chi_values;  // Omega(b): {}, {id_b}
  FinFunction t;      // the structure map Omega(a) -> Omega(b)
  std::string psi_zero, psi_half, psi_one;
  std::string chi_zero, chi_one;

  const std::string& alias(const std::string& atom) const;  // "0" / "1/2" / "1"
};
const ArrowOmega& arrow_omega();

struct SubmodelClassification {
  FinFunction psi;  // dst exogenous tuples -> Omega(a)
  FinFunction chi;  // dst endogenous tuples -> Omega(b)
};

SubmodelClassification classify_submodel(const TcmSquare& square);

struct TcmPullback {
  TcmObject apex;
  TcmSquare into_src1, into_src2;
};

TcmPullback tcm_pullback(const TcmSquare& sq1, const TcmSquare& sq2);
TcmObject tcm_exponential(const TcmObject& f, const TcmObject& g, const Limits& lim = {});

// Bridges into the presheaf layer over the canonical interval base
// (u: b -> a; exogenous tuples live at a, endogenous at b).
Presheaf as_presheaf(const TcmObject& m);
SubPresheaf square_as_subpresheaf(const TcmSquare& square);

// Atomic causal predicates as subobjects of as_presheaf(m).
// "var = value": the endogenous slice and its preimage under the solution.
SubPresheaf observational_predicate(const TcmObject& m, const std::string& var,
                                    const std::string& value);
// "var = value under do(i)": the worlds with that potential outcome; the
// endogenous side is the image of those worlds (the smallest closure).
SubPresheaf outcome_predicate(const TcmObject& m, const std::string& var, const Intervention& i,
                              const std::string& value);

}  // namespace tcm
