#pragma once

#include <memory>

#include "tcm/presheaf.hpp"

namespace tcm {

// ---- types of the internal language --------------------------------------
//
// Types are objects of the ambient topos: named presheaves, the unit, the
// classifier, and products/exponentials of types. P(A) is sugar for Omega^A.
struct TypeExpr {
  enum class Kind { named, unit, omega, prod, exp };
  Kind kind = Kind::unit;
  std::string name;                  // named
  std::shared_ptr<TypeExpr> a, b;    // prod: a x b, exp: res^arg with a=arg, b=res

  static TypeExpr named(std::string n);
  static TypeExpr unit();
  static TypeExpr omega();
  static TypeExpr prod(const TypeExpr& a, const TypeExpr& b);
  static TypeExpr exp(const TypeExpr& arg, const TypeExpr& res);
  static TypeExpr power(const TypeExpr& a) { return exp(a, omega()); }

  std::string key() const;  // canonical: "M", "1", "Omega", "(AxB)", "(B^A)"
  bool operator==(const TypeExpr& o) const { return key() == o.key(); }
  bool operator!=(const TypeExpr& o) const { return !(*this == o); }
};

TypeExpr parse_type(const std::string& text);

// ---- terms -----------------------------------------------------------------

enum class TermKind {
  var,
  star,
  truth,
  falsity,
  pair,
  proj1,
  proj2,
  eq,
  apply_arrow,
  eval_exp,
  member,
  lambda,
  comprehension,
  conj,
  disj,
  impl,
  neg,
  forall,
  exists,
  pred,
};

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  TermKind kind = TermKind::star;
  std::string name;     // var name, arrow name, or predicate name
  TypeExpr binder;      // type of var / bound variable
  TermPtr t1, t2;

  static TermPtr mk_var(std::string name, TypeExpr type);
  static TermPtr mk_star();
  static TermPtr mk_true();
  static TermPtr mk_false();
  static TermPtr mk_pair(TermPtr a, TermPtr b);
  static TermPtr mk_proj1(TermPtr t);
  static TermPtr mk_proj2(TermPtr t);
  static TermPtr mk_eq(TermPtr a, TermPtr b);
  static TermPtr mk_apply(std::string arrow, TermPtr t);
  static TermPtr mk_eval(TermPtr fn, TermPtr arg);
  static TermPtr mk_member(TermPtr elem, TermPtr set);
  static TermPtr mk_lambda(std::string var, TypeExpr type, TermPtr body);
  static TermPtr mk_set(std::string var, TypeExpr type, TermPtr body);  // {x | phi}
  static TermPtr mk_and(TermPtr a, TermPtr b);
  static TermPtr mk_or(TermPtr a, TermPtr b);
  static TermPtr mk_implies(TermPtr a, TermPtr b);
  static TermPtr mk_not(TermPtr t);
  static TermPtr mk_forall(std::string var, TypeExpr type, TermPtr body);
  static TermPtr mk_exists(std::string var, TypeExpr type, TermPtr body);
  static TermPtr mk_pred(std::string pred, TermPtr t);
};

// Parenthesized prefix syntax, e.g. "(forall x:M (implies (pred S x) (= x x)))".
// Free variables must be declared; bound ones pick up their binder's type.
TermPtr parse_term(const std::string& text, const std::map<std::string, TypeExpr>& free_vars = {});
std::string term_to_text(const TermPtr& t);

// ---- the ambient topos -------------------------------------------------------

struct TypedTerm;

class ToposContext {
 public:
  explicit ToposContext(FinCategory base, Limits lim = {});

  const FinCategory& base() const { return base_; }
  const Limits& limits() const { return lim_; }

  void register_type(const std::string& name, Presheaf p);
  void register_arrow(const std::string& name, TypeExpr dom, TypeExpr cod, PshMorphism m);
  void register_predicate(const std::string& name, TypeExpr of, SubPresheaf s);

  bool has_type(const std::string& name) const { return named_.count(name) > 0; }
  const Presheaf& presheaf_of(const TypeExpr& t) const;
  const std::vector<std::string>& stalk(const TypeExpr& t, const std::string& obj) const;
  std::string restrict_value(const TypeExpr& t, const std::string& stage, const std::string& arrow_id,
                             const std::string& value) const;

  struct NamedArrow {
    TypeExpr dom, cod;
    PshMorphism morphism;
  };
  struct NamedPredicate {
    TypeExpr of;
    SubPresheaf sub;
  };
  const NamedArrow& arrow(const std::string& name) const;
  const NamedPredicate& predicate(const std::string& name) const;
  const Omega& omega_data() const { return omega_; }

 private:
  FinCategory base_;
  Limits lim_;
  Omega omega_;
  std::map<std::string, Presheaf> named_;
  std::map<std::string, NamedArrow> arrows_;
  std::map<std::string, NamedPredicate> predicates_;
  mutable std::map<std::string, Presheaf> interned_;        // by type key
  mutable std::map<std::string, std::string> eval_cache_;  // (term,stage,env) -> value

  friend std::string eval_term_cached(const ToposContext&, const TypedTerm&, const Term*,
                                      const std::string&, const std::map<std::string, std::string>&);
};

// ---- typechecking and interpretation ----------------------------------------------

struct TypedTerm {
  TermPtr root;
  TypeExpr type;
  std::map<const Term*, TypeExpr> types;      // every subterm
  std::map<std::string, TypeExpr> free_vars;  // name -> type
  std::map<std::string, TypeExpr> var_types;  // free and bound (shadowing is rejected)
  std::uint64_t id = 0;                       // evaluation cache namespace

  bool is_formula() const { return type == TypeExpr::omega(); }
};

// `context` declares free variables up front (a formula-in-context), so a
// formula may be closed yet still classify a subobject of a declared type.
TypedTerm typecheck(const ToposContext& ctx, const TermPtr& t,
                    const std::map<std::string, TypeExpr>& context = {});

// The interpretation of a typed term as a presheaf morphism from the product
// of its free-variable types (sorted by name; the terminal object when
// closed) to its type.
PshMorphism interpret(const ToposContext& ctx, const TypedTerm& t);

// {x | phi}: the subobject of the free variable's type classified by phi.
SubPresheaf comprehension(const ToposContext& ctx, const TypedTerm& formula);

// Direct evaluation of a term at a stage under an environment; Omega-typed
// terms evaluate to sieve atoms.
std::string eval_term(const ToposContext& ctx, const TypedTerm& t, const std::string& stage,
                      const std::map<std::string, std::string>& env);

// ---- forcing ----------------------------------------------------------------------

struct ForcingContext {
  Presheaf stage;     // N
  PshMorphism alpha;  // N -> M, M the type of the formula's free variable
};

ForcingContext forcing_at(const ToposContext& ctx, const TypeExpr& type, const std::string& base_obj,
                          const std::string& elem);

// N forces phi(alpha) iff Im(alpha) <= {x | phi}.
bool forces(const ToposContext& ctx, const ForcingContext& fc, const TypedTerm& formula);

struct TraceNode {
  std::string rule;
  std::string stage;
  std::string detail;
  bool result = false;
  std::vector<TraceNode> children;
};

struct ClauseOptions {
  const GrothendieckTopology* topology = nullptr;  // site form when given
  bool epi_search = false;                         // genuine epi decomposition for v at general stages
};

struct ForcingResult {
  bool forced = false;
  TraceNode trace;
};

ForcingResult forces_by_clauses(const ToposContext& ctx, const ForcingContext& fc,
                                const TypedTerm& formula, const ClauseOptions& opts = {});

// ---- local set theory ---------------------------------------------------------------

// Expand the connective encodings: true as *=*, ∧ via pairing with
// <true,true>, ⇒ as (a∧b)⇔a, ∀ as {x|a}={x|true}, false as ∀w.w, ¬ as ⇒false,
// ∨ and ∃ via their second-order forms.
TermPtr desugar_lst(const TermPtr& t);

// ---- Lewis counterfactuals ------------------------------------------------------------

struct NeighborhoodSystem {
  FinSet worlds;
  std::map<std::string, std::vector<std::set<std::string>>> neighborhoods;
  std::map<std::string, std::set<std::string>> valuation;  // atom -> worlds where it holds
};

// world-level classical satisfaction of a propositional formula (pred atoms
// read from the valuation; quantifiers are rejected)
bool holds_at(const NeighborhoodSystem& w, const std::string& world, const TermPtr& formula);

// a []-> b at u: either no reachable world satisfies a, or some neighborhood
// has an a-world and satisfies a => b throughout.
bool lewis_counterfactual(const NeighborhoodSystem& w, const std::string& world, const TermPtr& a,
                          const TermPtr& b);

}  // namespace tcm
