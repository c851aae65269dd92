#include "tcm/logic.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <sstream>

namespace tcm {

// ---- TypeExpr -----------------------------------------------------------------

TypeExpr TypeExpr::named(std::string n) {
  TypeExpr t;
  t.kind = Kind::named;
  t.name = std::move(n);
  return t;
}
TypeExpr TypeExpr::unit() {
  TypeExpr t;
  t.kind = Kind::unit;
  return t;
}
TypeExpr TypeExpr::omega() {
  TypeExpr t;
  t.kind = Kind::omega;
  return t;
}
TypeExpr TypeExpr::prod(const TypeExpr& a, const TypeExpr& b) {
  TypeExpr t;
  t.kind = Kind::prod;
  t.a = std::make_shared<TypeExpr>(a);
  t.b = std::make_shared<TypeExpr>(b);
  return t;
}
TypeExpr TypeExpr::exp(const TypeExpr& arg, const TypeExpr& res) {
  TypeExpr t;
  t.kind = Kind::exp;
  t.a = std::make_shared<TypeExpr>(arg);
  t.b = std::make_shared<TypeExpr>(res);
  return t;
}

std::string TypeExpr::key() const {
  switch (kind) {
    case Kind::named:
      return name;
    case Kind::unit:
      return "1";
    case Kind::omega:
      return "Omega";
    case Kind::prod:
      return "(" + a->key() + "x" + b->key() + ")";
    case Kind::exp:
      return "(" + b->key() + "^" + a->key() + ")";
  }
  return "?";
}

TypeExpr parse_type(const std::string& text) {
  if (text.empty()) fail(Err::parse_error, "empty type");
  if (text == "1") return TypeExpr::unit();
  if (text == "Omega") return TypeExpr::omega();
  if (text.size() > 2 && text.substr(0, 2) == "P(" && text.back() == ')')
    return TypeExpr::power(parse_type(text.substr(2, text.size() - 3)));
  if (text.front() == '(' && text.back() == ')') {
    std::string body = text.substr(1, text.size() - 2);
    int depth = 0;
    for (std::size_t i = 0; i < body.size(); ++i) {
      char c = body[i];
      if (c == '(') ++depth;
      if (c == ')') --depth;
      if (depth == 0 && (c == 'x' || c == '^')) {
        TypeExpr left = parse_type(body.substr(0, i));
        TypeExpr right = parse_type(body.substr(i + 1));
        return c == 'x' ? TypeExpr::prod(left, right) : TypeExpr::exp(right, left);
      }
    }
    fail(Err::parse_error, "cannot parse type: " + text);
  }
  return TypeExpr::named(text);
}

// ---- term constructors -----------------------------------------------------------

namespace {

TermPtr node(TermKind k, std::string name, TypeExpr binder, TermPtr a, TermPtr b) {
  auto t = std::make_shared<Term>();
  t->kind = k;
  t->name = std::move(name);
  t->binder = std::move(binder);
  t->t1 = std::move(a);
  t->t2 = std::move(b);
  return t;
}

}  // namespace

TermPtr Term::mk_var(std::string name, TypeExpr type) { return node(TermKind::var, std::move(name), std::move(type), nullptr, nullptr); }
TermPtr Term::mk_star() { return node(TermKind::star, "", {}, nullptr, nullptr); }
TermPtr Term::mk_true() { return node(TermKind::truth, "", {}, nullptr, nullptr); }
TermPtr Term::mk_false() { return node(TermKind::falsity, "", {}, nullptr, nullptr); }
TermPtr Term::mk_pair(TermPtr a, TermPtr b) { return node(TermKind::pair, "", {}, std::move(a), std::move(b)); }
TermPtr Term::mk_proj1(TermPtr t) { return node(TermKind::proj1, "", {}, std::move(t), nullptr); }
TermPtr Term::mk_proj2(TermPtr t) { return node(TermKind::proj2, "", {}, std::move(t), nullptr); }
TermPtr Term::mk_eq(TermPtr a, TermPtr b) { return node(TermKind::eq, "", {}, std::move(a), std::move(b)); }
TermPtr Term::mk_apply(std::string arrow, TermPtr t) { return node(TermKind::apply_arrow, std::move(arrow), {}, std::move(t), nullptr); }
TermPtr Term::mk_eval(TermPtr fn, TermPtr arg) { return node(TermKind::eval_exp, "", {}, std::move(fn), std::move(arg)); }
TermPtr Term::mk_member(TermPtr elem, TermPtr set) { return node(TermKind::member, "", {}, std::move(elem), std::move(set)); }
TermPtr Term::mk_lambda(std::string var, TypeExpr type, TermPtr body) { return node(TermKind::lambda, std::move(var), std::move(type), std::move(body), nullptr); }
TermPtr Term::mk_set(std::string var, TypeExpr type, TermPtr body) { return node(TermKind::comprehension, std::move(var), std::move(type), std::move(body), nullptr); }
TermPtr Term::mk_and(TermPtr a, TermPtr b) { return node(TermKind::conj, "", {}, std::move(a), std::move(b)); }
TermPtr Term::mk_or(TermPtr a, TermPtr b) { return node(TermKind::disj, "", {}, std::move(a), std::move(b)); }
TermPtr Term::mk_implies(TermPtr a, TermPtr b) { return node(TermKind::impl, "", {}, std::move(a), std::move(b)); }
TermPtr Term::mk_not(TermPtr t) { return node(TermKind::neg, "", {}, std::move(t), nullptr); }
TermPtr Term::mk_forall(std::string var, TypeExpr type, TermPtr body) { return node(TermKind::forall, std::move(var), std::move(type), std::move(body), nullptr); }
TermPtr Term::mk_exists(std::string var, TypeExpr type, TermPtr body) { return node(TermKind::exists, std::move(var), std::move(type), std::move(body), nullptr); }
TermPtr Term::mk_pred(std::string pred, TermPtr t) { return node(TermKind::pred, std::move(pred), {}, std::move(t), nullptr); }

// ---- parser -------------------------------------------------------------------------

namespace {

struct Parser {
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  std::map<std::string, TypeExpr> scope;

  explicit Parser(const std::string& text, const std::map<std::string, TypeExpr>& free_vars)
      : scope(free_vars) {
    std::string cur;
    for (char c : text) {
      if (c == '(' || c == ')') {
        if (!cur.empty()) tokens.push_back(cur), cur.clear();
        tokens.push_back(std::string(1, c));
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        if (!cur.empty()) tokens.push_back(cur), cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    if (!cur.empty()) tokens.push_back(cur);
  }

  const std::string& peek() {
    if (pos >= tokens.size()) fail(Err::parse_error, "unexpected end of formula");
    return tokens[pos];
  }
  std::string next() {
    const std::string& t = peek();
    ++pos;
    return t;
  }
  void expect(const std::string& t) {
    if (next() != t) fail(Err::parse_error, "expected '" + t + "' in formula");
  }

  std::pair<std::string, TypeExpr> binder() {
    std::string tok = next();
    auto colon = tok.find(':');
    if (colon == std::string::npos) fail(Err::parse_error, "binder '" + tok + "' needs a type, e.g. x:M");
    return {tok.substr(0, colon), parse_type(tok.substr(colon + 1))};
  }

  TermPtr parse() {
    std::string tok = next();
    if (tok != "(") {
      if (tok == "star") return Term::mk_star();
      if (tok == "true") return Term::mk_true();
      if (tok == "false") return Term::mk_false();
      auto it = scope.find(tok);
      if (it == scope.end()) fail(Err::parse_error, "undeclared variable '" + tok + "'");
      return Term::mk_var(tok, it->second);
    }
    std::string op = next();
    TermPtr out;
    if (op == "and" || op == "or" || op == "implies" || op == "=" || op == "in" || op == "pair" ||
        op == "eval") {
      TermPtr a = parse();
      TermPtr b = parse();
      if (op == "and") out = Term::mk_and(a, b);
      else if (op == "or") out = Term::mk_or(a, b);
      else if (op == "implies") out = Term::mk_implies(a, b);
      else if (op == "=") out = Term::mk_eq(a, b);
      else if (op == "in") out = Term::mk_member(a, b);
      else if (op == "pair") out = Term::mk_pair(a, b);
      else out = Term::mk_eval(a, b);
    } else if (op == "not" || op == "proj1" || op == "proj2") {
      TermPtr a = parse();
      if (op == "not") out = Term::mk_not(a);
      else if (op == "proj1") out = Term::mk_proj1(a);
      else out = Term::mk_proj2(a);
    } else if (op == "forall" || op == "exists" || op == "lambda" || op == "set") {
      auto [var, type] = binder();
      if (scope.count(var)) fail(Err::parse_error, "variable '" + var + "' shadows an outer binding");
      scope.emplace(var, type);
      TermPtr body = parse();
      scope.erase(var);
      if (op == "forall") out = Term::mk_forall(var, type, body);
      else if (op == "exists") out = Term::mk_exists(var, type, body);
      else if (op == "lambda") out = Term::mk_lambda(var, type, body);
      else out = Term::mk_set(var, type, body);
    } else if (op == "apply" || op == "pred") {
      std::string name = next();
      TermPtr a = parse();
      out = op == "apply" ? Term::mk_apply(name, a) : Term::mk_pred(name, a);
    } else {
      fail(Err::parse_error, "unknown operator '" + op + "'");
    }
    expect(")");
    return out;
  }
};

}  // namespace

TermPtr parse_term(const std::string& text, const std::map<std::string, TypeExpr>& free_vars) {
  Parser p(text, free_vars);
  TermPtr t = p.parse();
  if (p.pos != p.tokens.size()) fail(Err::parse_error, "trailing tokens after formula");
  return t;
}

std::string term_to_text(const TermPtr& t) {
  if (!t) return "?";
  switch (t->kind) {
    case TermKind::var:
      return t->name;
    case TermKind::star:
      return "star";
    case TermKind::truth:
      return "true";
    case TermKind::falsity:
      return "false";
    case TermKind::pair:
      return "(pair " + term_to_text(t->t1) + " " + term_to_text(t->t2) + ")";
    case TermKind::proj1:
      return "(proj1 " + term_to_text(t->t1) + ")";
    case TermKind::proj2:
      return "(proj2 " + term_to_text(t->t1) + ")";
    case TermKind::eq:
      return "(= " + term_to_text(t->t1) + " " + term_to_text(t->t2) + ")";
    case TermKind::apply_arrow:
      return "(apply " + t->name + " " + term_to_text(t->t1) + ")";
    case TermKind::eval_exp:
      return "(eval " + term_to_text(t->t1) + " " + term_to_text(t->t2) + ")";
    case TermKind::member:
      return "(in " + term_to_text(t->t1) + " " + term_to_text(t->t2) + ")";
    case TermKind::lambda:
      return "(lambda " + t->name + ":" + t->binder.key() + " " + term_to_text(t->t1) + ")";
    case TermKind::comprehension:
      return "(set " + t->name + ":" + t->binder.key() + " " + term_to_text(t->t1) + ")";
    case TermKind::conj:
      return "(and " + term_to_text(t->t1) + " " + term_to_text(t->t2) + ")";
    case TermKind::disj:
      return "(or " + term_to_text(t->t1) + " " + term_to_text(t->t2) + ")";
    case TermKind::impl:
      return "(implies " + term_to_text(t->t1) + " " + term_to_text(t->t2) + ")";
    case TermKind::neg:
      return "(not " + term_to_text(t->t1) + ")";
    case TermKind::forall:
      return "(forall " + t->name + ":" + t->binder.key() + " " + term_to_text(t->t1) + ")";
    case TermKind::exists:
      return "(exists " + t->name + ":" + t->binder.key() + " " + term_to_text(t->t1) + ")";
    case TermKind::pred:
      return "(pred " + t->name + " " + term_to_text(t->t1) + ")";
  }
  return "?";
}

// ---- ToposContext ---------------------------------------------------------------------

ToposContext::ToposContext(FinCategory base, Limits lim)
    : base_(std::move(base)), lim_(lim), omega_(omega(base_)) {}

void ToposContext::register_type(const std::string& name, Presheaf p) {
  auto rep = p.validate();
  if (!rep.ok()) fail(Err::validation, "type '" + name + "': " + rep.violations.front());
  named_.insert_or_assign(name, std::move(p));
}

void ToposContext::register_arrow(const std::string& name, TypeExpr dom, TypeExpr cod, PshMorphism m) {
  if (!m.natural()) fail(Err::validation, "arrow '" + name + "' is not natural");
  arrows_.insert_or_assign(name, NamedArrow{std::move(dom), std::move(cod), std::move(m)});
}

void ToposContext::register_predicate(const std::string& name, TypeExpr of, SubPresheaf s) {
  if (!s.closed()) fail(Err::validation, "predicate '" + name + "' is not restriction-closed");
  predicates_.insert_or_assign(name, NamedPredicate{std::move(of), std::move(s)});
}

const ToposContext::NamedArrow& ToposContext::arrow(const std::string& name) const {
  auto it = arrows_.find(name);
  if (it == arrows_.end()) fail(Err::unknown_arrow, "no registered arrow '" + name + "'");
  return it->second;
}

const ToposContext::NamedPredicate& ToposContext::predicate(const std::string& name) const {
  auto it = predicates_.find(name);
  if (it == predicates_.end()) fail(Err::unknown_object, "no registered predicate '" + name + "'");
  return it->second;
}

const Presheaf& ToposContext::presheaf_of(const TypeExpr& t) const {
  if (t.kind == TypeExpr::Kind::named) {
    auto it = named_.find(t.name);
    if (it == named_.end()) fail(Err::unknown_object, "no registered type '" + t.name + "'");
    return it->second;
  }
  if (t.kind == TypeExpr::Kind::omega) return omega_.psh;
  std::string key = t.key();
  auto it = interned_.find(key);
  if (it != interned_.end()) return it->second;
  Presheaf built;
  switch (t.kind) {
    case TypeExpr::Kind::unit:
      built = terminal_presheaf(base_);
      break;
    case TypeExpr::Kind::prod:
      built = psh_product(presheaf_of(*t.a), presheaf_of(*t.b)).psh;
      break;
    case TypeExpr::Kind::exp:
      built = psh_exponential(presheaf_of(*t.a), presheaf_of(*t.b), lim_).psh;
      break;
    default:
      break;
  }
  return interned_.emplace(key, std::move(built)).first->second;
}

const std::vector<std::string>& ToposContext::stalk(const TypeExpr& t, const std::string& obj) const {
  return presheaf_of(t).at(obj).elements();
}

std::string ToposContext::restrict_value(const TypeExpr& t, const std::string& stage,
                                         const std::string& arrow_id, const std::string& value) const {
  switch (t.kind) {
    case TypeExpr::Kind::named:
      return presheaf_of(t).restrict_elem(arrow_id, value);
    case TypeExpr::Kind::unit:
      return "*";
    case TypeExpr::Kind::omega:
      return sieve_pullback(base_, arrow_id, sieve_from_atom(stage, value)).atom();
    case TypeExpr::Kind::prod: {
      auto parts = tuple_parts(value);
      return tuple_atom({restrict_value(*t.a, stage, arrow_id, parts[0]),
                         restrict_value(*t.b, stage, arrow_id, parts[1])});
    }
    case TypeExpr::Kind::exp:
      return family_restrict(base_, stage, value, arrow_id);
  }
  fail(Err::type_mismatch, "unknown type kind");
}

// ---- typecheck ---------------------------------------------------------------------------

namespace {

struct Checker {
  const ToposContext& ctx;
  TypedTerm& out;
  std::map<std::string, TypeExpr> scope;

  TypeExpr check(const TermPtr& t) {
    TypeExpr ty = derive(t);
    out.types.emplace(t.get(), ty);
    return ty;
  }

  [[noreturn]] void mismatch(const TermPtr& t, const std::string& what) {
    fail(Err::type_mismatch, "in " + term_to_text(t) + ": " + what);
  }

  void bind(const TermPtr& t, const std::string& var, const TypeExpr& type) {
    if (scope.count(var)) mismatch(t, "variable '" + var + "' shadows an outer binding");
    scope.emplace(var, type);
    auto it = out.var_types.find(var);
    if (it != out.var_types.end() && it->second != type)
      mismatch(t, "variable '" + var + "' is reused at a different type");
    out.var_types.emplace(var, type);
  }

  TypeExpr derive(const TermPtr& t) {
    switch (t->kind) {
      case TermKind::var: {
        auto it = scope.find(t->name);
        if (it != scope.end()) {
          if (it->second != t->binder && t->binder.key() != "1")
            mismatch(t, "variable type disagrees with its binder");
          return it->second;
        }
        auto fv = out.free_vars.find(t->name);
        if (fv != out.free_vars.end()) {
          if (fv->second != t->binder) mismatch(t, "free variable used at two types");
        } else {
          out.free_vars.emplace(t->name, t->binder);
          out.var_types.emplace(t->name, t->binder);
        }
        return t->binder;
      }
      case TermKind::star:
        return TypeExpr::unit();
      case TermKind::truth:
      case TermKind::falsity:
        return TypeExpr::omega();
      case TermKind::pair:
        return TypeExpr::prod(check(t->t1), check(t->t2));
      case TermKind::proj1: {
        TypeExpr p = check(t->t1);
        if (p.kind != TypeExpr::Kind::prod) mismatch(t, "proj1 of a non-product");
        return *p.a;
      }
      case TermKind::proj2: {
        TypeExpr p = check(t->t1);
        if (p.kind != TypeExpr::Kind::prod) mismatch(t, "proj2 of a non-product");
        return *p.b;
      }
      case TermKind::eq: {
        TypeExpr a = check(t->t1), b = check(t->t2);
        if (a != b) mismatch(t, "equality between types " + a.key() + " and " + b.key());
        return TypeExpr::omega();
      }
      case TermKind::apply_arrow: {
        const auto& ar = ctx.arrow(t->name);
        TypeExpr a = check(t->t1);
        if (a != ar.dom) mismatch(t, "arrow '" + t->name + "' expects " + ar.dom.key() + ", got " + a.key());
        return ar.cod;
      }
      case TermKind::eval_exp: {
        TypeExpr f = check(t->t1), a = check(t->t2);
        if (f.kind != TypeExpr::Kind::exp) mismatch(t, "eval of a non-exponential");
        if (*f.a != a) mismatch(t, "eval argument has type " + a.key() + ", expected " + f.a->key());
        return *f.b;
      }
      case TermKind::member: {
        TypeExpr a = check(t->t1), p = check(t->t2);
        if (p.kind != TypeExpr::Kind::exp || !(*p.b == TypeExpr::omega()))
          mismatch(t, "membership in a non-power type " + p.key());
        if (*p.a != a) mismatch(t, "element type " + a.key() + " does not match power type " + p.key());
        return TypeExpr::omega();
      }
      case TermKind::lambda: {
        bind(t, t->name, t->binder);
        TypeExpr body = check(t->t1);
        scope.erase(t->name);
        return TypeExpr::exp(t->binder, body);
      }
      case TermKind::comprehension: {
        bind(t, t->name, t->binder);
        TypeExpr body = check(t->t1);
        scope.erase(t->name);
        if (!(body == TypeExpr::omega())) mismatch(t, "comprehension body must be a formula");
        return TypeExpr::power(t->binder);
      }
      case TermKind::conj:
      case TermKind::disj:
      case TermKind::impl: {
        TypeExpr a = check(t->t1), b = check(t->t2);
        if (!(a == TypeExpr::omega()) || !(b == TypeExpr::omega()))
          mismatch(t, "connective applied to non-formulas");
        return TypeExpr::omega();
      }
      case TermKind::neg: {
        if (!(check(t->t1) == TypeExpr::omega())) mismatch(t, "negation of a non-formula");
        return TypeExpr::omega();
      }
      case TermKind::forall:
      case TermKind::exists: {
        bind(t, t->name, t->binder);
        TypeExpr body = check(t->t1);
        scope.erase(t->name);
        if (!(body == TypeExpr::omega())) mismatch(t, "quantifier body must be a formula");
        return TypeExpr::omega();
      }
      case TermKind::pred: {
        const auto& pr = ctx.predicate(t->name);
        TypeExpr a = check(t->t1);
        if (a != pr.of) mismatch(t, "predicate '" + t->name + "' expects " + pr.of.key() + ", got " + a.key());
        return TypeExpr::omega();
      }
    }
    fail(Err::type_mismatch, "unknown term kind");
  }
};

std::atomic<std::uint64_t> next_typed_id{1};

}  // namespace

TypedTerm typecheck(const ToposContext& ctx, const TermPtr& t,
                    const std::map<std::string, TypeExpr>& context) {
  TypedTerm out;
  out.root = t;
  out.id = next_typed_id.fetch_add(1);
  out.free_vars = context;
  out.var_types = context;
  Checker ck{ctx, out, {}};
  out.type = ck.check(t);
  return out;
}

// ---- evaluation ---------------------------------------------------------------------------

namespace {

using Env = std::map<std::string, std::string>;

std::string env_key(const Env& env) {
  std::string s;
  for (const auto& [k, v] : env) s += k + "=" + v + ";";
  return s;
}

struct Evaluator {
  const ToposContext& ctx;
  const TypedTerm& tt;
  std::map<std::string, std::string>& cache;

  const TypeExpr& type_of(const Term* t) const { return tt.types.at(t); }

  Env restrict_env(const Env& env, const std::string& stage, const std::string& arrow) const {
    Env out;
    for (const auto& [var, val] : env)
      out.emplace(var, ctx.restrict_value(tt.var_types.at(var), stage, arrow, val));
    return out;
  }

  std::string eval(const Term* t, const std::string& stage, const Env& env) {
    std::string key = std::to_string(tt.id) + "#" + std::to_string(reinterpret_cast<std::uintptr_t>(t)) +
                      "@" + stage + "|" + env_key(env);
    auto hit = cache.find(key);
    if (hit != cache.end()) return hit->second;
    std::string v = compute(t, stage, env);
    cache.emplace(std::move(key), v);
    return v;
  }

  Sieve eval_sieve(const Term* t, const std::string& stage, const Env& env) {
    return sieve_from_atom(stage, eval(t, stage, env));
  }

  std::string compute(const Term* t, const std::string& stage, const Env& env) {
    const FinCategory& base = ctx.base();
    switch (t->kind) {
      case TermKind::var: {
        auto it = env.find(t->name);
        if (it == env.end()) fail(Err::validation, "unbound variable '" + t->name + "' during evaluation");
        return it->second;
      }
      case TermKind::star:
        return "*";
      case TermKind::truth:
        return ctx.omega_data().truth(stage);
      case TermKind::falsity:
        return Sieve{stage, {}}.atom();
      case TermKind::pair:
        return tuple_atom({eval(t->t1.get(), stage, env), eval(t->t2.get(), stage, env)});
      case TermKind::proj1:
        return tuple_parts(eval(t->t1.get(), stage, env))[0];
      case TermKind::proj2:
        return tuple_parts(eval(t->t1.get(), stage, env))[1];
      case TermKind::eq: {
        const TypeExpr& ty = type_of(t->t1.get());
        std::string v1 = eval(t->t1.get(), stage, env), v2 = eval(t->t2.get(), stage, env);
        Sieve s{stage, {}};
        for (const auto& fid : base.arrows_into(stage))
          if (ctx.restrict_value(ty, stage, fid, v1) == ctx.restrict_value(ty, stage, fid, v2))
            s.arrows.insert(fid);
        return s.atom();
      }
      case TermKind::apply_arrow:
        return ctx.arrow(t->name).morphism.at(stage)(eval(t->t1.get(), stage, env));
      case TermKind::eval_exp:
      case TermKind::member: {
        const Term* fn = t->kind == TermKind::eval_exp ? t->t1.get() : t->t2.get();
        const Term* arg = t->kind == TermKind::eval_exp ? t->t2.get() : t->t1.get();
        const TypeExpr& fnty = type_of(fn);
        std::string fam = eval(fn, stage, env);
        std::string x = eval(arg, stage, env);
        auto sections = family_sections(fam);
        const auto& values = sections.at(base.identity_of(stage));
        const auto& elems = ctx.stalk(*fnty.a, stage);
        auto it = std::find(elems.begin(), elems.end(), x);
        if (it == elems.end()) fail(Err::value_out_of_domain, "evaluation argument outside the stalk");
        return values[static_cast<std::size_t>(it - elems.begin())];
      }
      case TermKind::lambda:
      case TermKind::comprehension: {
        std::map<std::string, std::vector<std::string>> sections;
        for (const auto& fid : base.arrows_into(stage)) {
          const Arrow& f = base.arrow(fid);
          Env env_d = restrict_env(env, stage, fid);
          std::vector<std::string> values;
          for (const auto& x0 : ctx.stalk(t->binder, f.src)) {
            Env env_x = env_d;
            env_x[t->name] = x0;
            values.push_back(eval(t->t1.get(), f.src, env_x));
          }
          sections.emplace(fid, std::move(values));
        }
        return family_atom_from_sections(sections);
      }
      case TermKind::conj: {
        Sieve a = eval_sieve(t->t1.get(), stage, env), b = eval_sieve(t->t2.get(), stage, env);
        Sieve out{stage, {}};
        std::set_intersection(a.arrows.begin(), a.arrows.end(), b.arrows.begin(), b.arrows.end(),
                              std::inserter(out.arrows, out.arrows.begin()));
        return out.atom();
      }
      case TermKind::disj: {
        Sieve a = eval_sieve(t->t1.get(), stage, env), b = eval_sieve(t->t2.get(), stage, env);
        a.arrows.insert(b.arrows.begin(), b.arrows.end());
        return a.atom();
      }
      case TermKind::impl:
      case TermKind::neg: {
        Sieve a = eval_sieve(t->t1.get(), stage, env);
        Sieve b = t->kind == TermKind::impl ? eval_sieve(t->t2.get(), stage, env) : Sieve{stage, {}};
        Sieve out{stage, {}};
        for (const auto& fid : base.arrows_into(stage)) {
          const Arrow& f = base.arrow(fid);
          bool ok = true;
          for (const auto& gid : base.arrows_into(f.src)) {
            const std::string& comp = base.compose_ids(fid, gid);
            if (a.arrows.count(comp) && !b.arrows.count(comp)) {
              ok = false;
              break;
            }
          }
          if (ok) out.arrows.insert(fid);
        }
        return out.atom();
      }
      case TermKind::forall: {
        Sieve out{stage, {}};
        for (const auto& fid : base.arrows_into(stage)) {
          const Arrow& f = base.arrow(fid);
          bool ok = true;
          for (const auto& gid : base.arrows_into(f.src)) {
            const std::string& comp = base.compose_ids(fid, gid);
            const Arrow& g = base.arrow(comp);
            Env env_e = restrict_env(env, stage, comp);
            for (const auto& x0 : ctx.stalk(t->binder, g.src)) {
              Env env_x = env_e;
              env_x[t->name] = x0;
              if (eval(t->t1.get(), g.src, env_x) != ctx.omega_data().truth(g.src)) {
                ok = false;
                break;
              }
            }
            if (!ok) break;
          }
          if (ok) out.arrows.insert(fid);
        }
        return out.atom();
      }
      case TermKind::exists: {
        Sieve out{stage, {}};
        for (const auto& fid : base.arrows_into(stage)) {
          const Arrow& f = base.arrow(fid);
          Env env_d = restrict_env(env, stage, fid);
          bool found = false;
          for (const auto& x0 : ctx.stalk(t->binder, f.src)) {
            Env env_x = env_d;
            env_x[t->name] = x0;
            if (eval(t->t1.get(), f.src, env_x) == ctx.omega_data().truth(f.src)) {
              found = true;
              break;
            }
          }
          if (found) out.arrows.insert(fid);
        }
        return out.atom();
      }
      case TermKind::pred: {
        const auto& pr = ctx.predicate(t->name);
        const TypeExpr& ty = type_of(t->t1.get());
        std::string v = eval(t->t1.get(), stage, env);
        Sieve s{stage, {}};
        for (const auto& fid : base.arrows_into(stage)) {
          const Arrow& f = base.arrow(fid);
          if (pr.sub.contains(f.src, ctx.restrict_value(ty, stage, fid, v))) s.arrows.insert(fid);
        }
        return s.atom();
      }
    }
    fail(Err::validation, "unknown term kind during evaluation");
  }
};

}  // namespace

std::string eval_term_cached(const ToposContext& ctx, const TypedTerm& tt, const Term* t,
                             const std::string& stage, const std::map<std::string, std::string>& env) {
  Evaluator ev{ctx, tt, ctx.eval_cache_};
  return ev.eval(t, stage, env);
}

std::string eval_term(const ToposContext& ctx, const TypedTerm& t, const std::string& stage,
                      const std::map<std::string, std::string>& env) {
  return eval_term_cached(ctx, t, t.root.get(), stage, env);
}

// ---- interpretation and comprehension ----------------------------------------------------

PshMorphism interpret(const ToposContext& ctx, const TypedTerm& t) {
  std::vector<std::pair<std::string, TypeExpr>> vars(t.free_vars.begin(), t.free_vars.end());
  // context object: terminal when closed, the variable's type when unary,
  // left-nested products otherwise
  TypeExpr dom_type = TypeExpr::unit();
  if (!vars.empty()) {
    dom_type = vars[0].second;
    for (std::size_t i = 1; i < vars.size(); ++i) dom_type = TypeExpr::prod(dom_type, vars[i].second);
  }
  const Presheaf& dom = ctx.presheaf_of(dom_type);
  const Presheaf& cod = ctx.presheaf_of(t.type);
  PshMorphism out;
  out.src = dom;
  out.dst = cod;
  for (const auto& obj : ctx.base().objects()) {
    out.components.emplace(obj, FinFunction::tabulate(dom.at(obj), cod.at(obj), [&](const std::string& w) {
      std::map<std::string, std::string> env;
      if (!vars.empty()) {
        // peel the left-nested pair encoding
        std::string rest = w;
        for (std::size_t i = vars.size(); i-- > 1;) {
          auto parts = tuple_parts(rest);
          env[vars[i].first] = parts[1];
          rest = parts[0];
        }
        env[vars[0].first] = rest;
      }
      return eval_term_cached(ctx, t, t.root.get(), obj, env);
    }));
  }
  return out;
}

SubPresheaf comprehension(const ToposContext& ctx, const TypedTerm& formula) {
  if (!formula.is_formula()) fail(Err::type_mismatch, "comprehension needs a formula");
  if (formula.free_vars.size() != 1)
    fail(Err::multiple_free_vars, "comprehension needs exactly one free variable, found " +
                                      std::to_string(formula.free_vars.size()));
  const auto& [var, type] = *formula.free_vars.begin();
  const Presheaf& m = ctx.presheaf_of(type);
  std::map<std::string, std::set<std::string>> members;
  for (const auto& obj : ctx.base().objects()) {
    std::set<std::string> ms;
    for (const auto& e : m.at(obj).elements())
      if (eval_term_cached(ctx, formula, formula.root.get(), obj, {{var, e}}) ==
          ctx.omega_data().truth(obj))
        ms.insert(e);
    members.emplace(obj, std::move(ms));
  }
  return SubPresheaf(m, std::move(members));
}

// ---- forcing -------------------------------------------------------------------------------

ForcingContext forcing_at(const ToposContext& ctx, const TypeExpr& type, const std::string& base_obj,
                          const std::string& elem) {
  const Presheaf& m = ctx.presheaf_of(type);
  ForcingContext fc;
  fc.alpha = yoneda_morphism(m, base_obj, elem);
  fc.stage = fc.alpha.src;
  return fc;
}

bool forces(const ToposContext& ctx, const ForcingContext& fc, const TypedTerm& formula) {
  if (formula.free_vars.size() != 1)
    fail(Err::multiple_free_vars, "forcing needs a formula with exactly one free variable");
  const TypeExpr& type = formula.free_vars.begin()->second;
  if (!presheaves_equal(fc.alpha.dst, ctx.presheaf_of(type)))
    fail(Err::type_mismatch, "generalized element does not land in the free variable's type");
  SubPresheaf comp = comprehension(ctx, formula);
  for (const auto& obj : ctx.base().objects())
    for (const auto& e : fc.stage.at(obj).elements())
      if (!comp.contains(obj, fc.alpha.at(obj)(e))) return false;
  return true;
}

namespace {

Env restrict_env_vals(const ToposContext& ctx, const TypedTerm& tt, const Env& env,
                      const std::string& stage, const std::string& arrow) {
  Env out;
  for (const auto& [var, val] : env)
    out.emplace(var, ctx.restrict_value(tt.var_types.at(var), stage, arrow, val));
  return out;
}

struct ClauseEvaluator {
  const ToposContext& ctx;
  const TypedTerm& tt;
  const ClauseOptions& opts;

  bool covering(const std::string& obj, const Sieve& s, std::string& why) const {
    if (opts.topology) {
      bool in = opts.topology->contains(s);
      why = "sieve " + s.atom() + (in ? " covers in J" : " is not a J-cover");
      return in;
    }
    bool in = s.arrows.count(ctx.base().identity_of(obj)) > 0;
    why = in ? "sieve contains the identity" : "sieve misses the identity";
    return in;
  }

  bool empty_covers(const std::string& obj) const {
    return opts.topology && opts.topology->contains(Sieve{obj, {}});
  }

  Env renv(const Env& env, const std::string& stage, const std::string& arrow) const {
    return restrict_env_vals(ctx, tt, env, stage, arrow);
  }

  bool rep(const std::string& c, const Env& env, const Term* t, TraceNode& node) {
    const FinCategory& base = ctx.base();
    node.stage = c;
    switch (t->kind) {
      case TermKind::conj: {
        node.rule = "and";
        TraceNode l, r;
        bool a = rep(c, env, t->t1.get(), l);
        bool b = rep(c, env, t->t2.get(), r);
        node.children = {std::move(l), std::move(r)};
        return node.result = a && b;
      }
      case TermKind::disj: {
        node.rule = "or";
        Sieve s{c, {}};
        for (const auto& fid : base.arrows_into(c)) {
          const Arrow& f = base.arrow(fid);
          Env env_d = renv(env, c, fid);
          TraceNode l, r;
          bool a = rep(f.src, env_d, t->t1.get(), l);
          bool b = !a && rep(f.src, env_d, t->t2.get(), r);
          if (a || b) s.arrows.insert(fid);
          if (fid == base.identity_of(c)) {
            node.children.push_back(std::move(l));
            if (!a) node.children.push_back(std::move(r));
          }
        }
        node.result = covering(c, s, node.detail);
        return node.result;
      }
      case TermKind::impl: {
        node.rule = "implies";
        for (const auto& fid : base.arrows_into(c)) {
          const Arrow& f = base.arrow(fid);
          Env env_d = renv(env, c, fid);
          TraceNode ante;
          if (!rep(f.src, env_d, t->t1.get(), ante)) continue;
          TraceNode cons;
          if (!rep(f.src, env_d, t->t2.get(), cons)) {
            node.detail = "fails after '" + fid + "'";
            return node.result = false;
          }
        }
        return node.result = true;
      }
      case TermKind::neg: {
        node.rule = "not";
        for (const auto& fid : base.arrows_into(c)) {
          const Arrow& f = base.arrow(fid);
          Env env_d = renv(env, c, fid);
          TraceNode sub;
          if (rep(f.src, env_d, t->t1.get(), sub) && !empty_covers(f.src)) {
            node.detail = "refuted after '" + fid + "'";
            return node.result = false;
          }
        }
        return node.result = true;
      }
      case TermKind::forall: {
        node.rule = "forall " + t->name;
        for (const auto& fid : base.arrows_into(c)) {
          const Arrow& f = base.arrow(fid);
          Env env_d = renv(env, c, fid);
          for (const auto& x0 : ctx.stalk(t->binder, f.src)) {
            Env env_x = env_d;
            env_x[t->name] = x0;
            TraceNode sub;
            if (!rep(f.src, env_x, t->t1.get(), sub)) {
              node.detail = "fails at '" + x0 + "' after '" + fid + "'";
              return node.result = false;
            }
          }
        }
        return node.result = true;
      }
      case TermKind::exists: {
        node.rule = "exists " + t->name;
        Sieve s{c, {}};
        for (const auto& fid : base.arrows_into(c)) {
          const Arrow& f = base.arrow(fid);
          Env env_d = renv(env, c, fid);
          for (const auto& x0 : ctx.stalk(t->binder, f.src)) {
            Env env_x = env_d;
            env_x[t->name] = x0;
            TraceNode sub;
            if (rep(f.src, env_x, t->t1.get(), sub)) {
              s.arrows.insert(fid);
              if (fid == base.identity_of(c)) node.detail = "witness '" + x0 + "'";
              break;
            }
          }
        }
        std::string why;
        node.result = covering(c, s, why);
        if (node.detail.empty()) node.detail = why;
        return node.result;
      }
      default: {
        node.rule = "atomic";
        std::string v = eval_term_cached(ctx, tt, t, c, env);
        node.detail = term_to_text(std::make_shared<Term>(*t)) + " = " + v;
        return node.result = v == ctx.omega_data().truth(c);
      }
    }
  }

};

}  // namespace

ForcingResult forces_by_clauses(const ToposContext& ctx, const ForcingContext& fc,
                                const TypedTerm& formula, const ClauseOptions& opts) {
  if (formula.free_vars.size() != 1)
    fail(Err::multiple_free_vars, "forcing needs a formula with exactly one free variable");
  const auto& [var, type] = *formula.free_vars.begin();
  if (!presheaves_equal(fc.alpha.dst, ctx.presheaf_of(type)))
    fail(Err::type_mismatch, "generalized element does not land in the free variable's type");
  if (opts.topology) {
    auto rep = check_topology(*opts.topology);
    if (!rep.ok()) fail(Err::validation, "site clauses need a valid topology: " + rep.violations.front());
  }

  ForcingResult out;
  out.trace.rule = "stage";
  out.trace.stage = "N";
  out.forced = true;

  // v at a general stage, searched as a genuine epi decomposition (falls back
  // to the pointwise form when a disjunct does not mention the free variable)
  if (opts.epi_search && formula.root->kind == TermKind::disj) {
    TypedTerm lt = typecheck(ctx, formula.root->t1, formula.free_vars);
    TypedTerm rt = typecheck(ctx, formula.root->t2, formula.free_vars);
    if (lt.free_vars.size() == 1 && rt.free_vars.size() == 1) {
      ClauseOptions plain = opts;
      plain.epi_search = false;
      auto restrict_fc = [&](const SubPresheaf& part) {
        ForcingContext sub_fc;
        PshMorphism incl = sub_inclusion(part);
        sub_fc.stage = incl.src;
        sub_fc.alpha = psh_compose(fc.alpha, incl);
        return sub_fc;
      };
      auto subs = subobjects(fc.stage, ctx.limits());
      out.trace.rule = "or (epi decomposition)";
      for (const auto& left : subs)
        for (const auto& right : subs) {
          bool covers = true;
          for (const auto& obj : ctx.base().objects())
            for (const auto& e : fc.stage.at(obj).elements())
              if (!left.contains(obj, e) && !right.contains(obj, e)) covers = false;
          if (!covers) continue;
          if (forces_by_clauses(ctx, restrict_fc(left), lt, plain).forced &&
              forces_by_clauses(ctx, restrict_fc(right), rt, plain).forced) {
            out.trace.result = true;
            return out;
          }
        }
      out.trace.result = false;
      out.forced = false;
      return out;
    }
  }

  ClauseEvaluator ce{ctx, formula, opts};
  for (const auto& obj : ctx.base().objects()) {
    for (const auto& e : fc.stage.at(obj).elements()) {
      TraceNode sub;
      sub.detail = "element '" + e + "' of stage at " + obj;
      bool ok = ce.rep(obj, {{var, fc.alpha.at(obj)(e)}}, formula.root.get(), sub);
      out.trace.children.push_back(std::move(sub));
      if (!ok) out.forced = false;
    }
  }
  out.trace.result = out.forced;
  return out;
}

// ---- LST desugaring --------------------------------------------------------------------------

namespace {

void collect_names(const TermPtr& t, std::set<std::string>& out) {
  if (!t) return;
  if (t->kind == TermKind::var || t->kind == TermKind::lambda || t->kind == TermKind::comprehension ||
      t->kind == TermKind::forall || t->kind == TermKind::exists)
    out.insert(t->name);
  collect_names(t->t1, out);
  collect_names(t->t2, out);
}

struct Desugarer {
  int fresh = 0;
  std::set<std::string> taken;

  std::string fresh_name() {
    std::string w;
    do {
      w = "w" + std::to_string(fresh++);
    } while (taken.count(w));
    return w;
  }

  TermPtr truth() { return Term::mk_eq(Term::mk_star(), Term::mk_star()); }

  TermPtr conj(TermPtr a, TermPtr b) {
    return Term::mk_eq(Term::mk_pair(a, b), Term::mk_pair(truth(), truth()));
  }

  TermPtr implies(TermPtr a, TermPtr b) { return Term::mk_eq(conj(a, b), a); }

  TermPtr forall(const std::string& var, const TypeExpr& ty, TermPtr body) {
    return Term::mk_eq(Term::mk_set(var, ty, body), Term::mk_set(var, ty, truth()));
  }

  TermPtr falsity() {
    std::string w = fresh_name();
    return forall(w, TypeExpr::omega(), Term::mk_var(w, TypeExpr::omega()));
  }

  TermPtr go(const TermPtr& t) {
    switch (t->kind) {
      case TermKind::truth:
        return truth();
      case TermKind::falsity:
        return falsity();
      case TermKind::conj:
        return conj(go(t->t1), go(t->t2));
      case TermKind::impl:
        return implies(go(t->t1), go(t->t2));
      case TermKind::neg:
        return implies(go(t->t1), falsity());
      case TermKind::forall:
        return forall(t->name, t->binder, go(t->t1));
      case TermKind::disj: {
        std::string w = fresh_name();
        TermPtr omega_var = Term::mk_var(w, TypeExpr::omega());
        TermPtr body = implies(conj(implies(go(t->t1), omega_var), implies(go(t->t2), omega_var)),
                               omega_var);
        return forall(w, TypeExpr::omega(), body);
      }
      case TermKind::exists: {
        std::string w = fresh_name();
        TermPtr omega_var = Term::mk_var(w, TypeExpr::omega());
        TermPtr inner = forall(t->name, t->binder, implies(go(t->t1), omega_var));
        return forall(w, TypeExpr::omega(), implies(inner, omega_var));
      }
      case TermKind::var:
      case TermKind::star:
        return t;
      case TermKind::pair:
        return Term::mk_pair(go(t->t1), go(t->t2));
      case TermKind::proj1:
        return Term::mk_proj1(go(t->t1));
      case TermKind::proj2:
        return Term::mk_proj2(go(t->t1));
      case TermKind::eq:
        return Term::mk_eq(go(t->t1), go(t->t2));
      case TermKind::apply_arrow:
        return Term::mk_apply(t->name, go(t->t1));
      case TermKind::eval_exp:
        return Term::mk_eval(go(t->t1), go(t->t2));
      case TermKind::member:
        return Term::mk_member(go(t->t1), go(t->t2));
      case TermKind::lambda:
        return Term::mk_lambda(t->name, t->binder, go(t->t1));
      case TermKind::comprehension:
        return Term::mk_set(t->name, t->binder, go(t->t1));
      case TermKind::pred:
        return Term::mk_pred(t->name, go(t->t1));
    }
    return t;
  }
};

}  // namespace

TermPtr desugar_lst(const TermPtr& t) {
  Desugarer d;
  collect_names(t, d.taken);
  return d.go(t);
}

// ---- Lewis counterfactuals ---------------------------------------------------------------------

bool holds_at(const NeighborhoodSystem& w, const std::string& world, const TermPtr& formula) {
  switch (formula->kind) {
    case TermKind::truth:
      return true;
    case TermKind::falsity:
      return false;
    case TermKind::pred: {
      auto it = w.valuation.find(formula->name);
      if (it == w.valuation.end()) fail(Err::unknown_object, "no valuation for atom '" + formula->name + "'");
      return it->second.count(world) > 0;
    }
    case TermKind::conj:
      return holds_at(w, world, formula->t1) && holds_at(w, world, formula->t2);
    case TermKind::disj:
      return holds_at(w, world, formula->t1) || holds_at(w, world, formula->t2);
    case TermKind::impl:
      return !holds_at(w, world, formula->t1) || holds_at(w, world, formula->t2);
    case TermKind::neg:
      return !holds_at(w, world, formula->t1);
    default:
      fail(Err::validation, "world-level formulas are propositional: " + term_to_text(formula));
  }
}

bool lewis_counterfactual(const NeighborhoodSystem& w, const std::string& world, const TermPtr& a,
                          const TermPtr& b) {
  if (!w.worlds.contains(world)) fail(Err::unknown_world, "unknown world '" + world + "'");
  auto it = w.neighborhoods.find(world);
  const std::vector<std::set<std::string>> hoods =
      it == w.neighborhoods.end() ? std::vector<std::set<std::string>>{} : it->second;
  // first disjunct: the antecedent holds nowhere in any neighborhood of u
  bool vacuous = true;
  for (const auto& n : hoods)
    for (const auto& v : n)
      if (holds_at(w, v, a)) vacuous = false;
  if (vacuous) return true;
  // second disjunct: some neighborhood has an antecedent world and satisfies
  // a => b throughout
  for (const auto& n : hoods) {
    bool has_a = false, all_implies = true;
    for (const auto& v : n) {
      if (holds_at(w, v, a)) has_a = true;
      if (holds_at(w, v, a) && !holds_at(w, v, b)) all_implies = false;
    }
    if (has_a && all_implies) return true;
  }
  return false;
}

}  // namespace tcm
