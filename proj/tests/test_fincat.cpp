#include "doctest.h"
#include "tcm/fincat.hpp"

#include <algorithm>

using namespace tcm;

namespace {

FinSet mk(const std::string& name, std::vector<std::string> elems) { return FinSet(name, std::move(elems)); }

FinFunction fn(const FinSet& dom, const FinSet& cod, std::map<std::string, std::string> table) {
  return FinFunction(dom, cod, table);
}

}  // namespace

TEST_SUITE("fincat") {

TEST_CASE("validate_category") {
  CHECK(one_object_category().validate().ok());
  CHECK(interval_category("a", "b", "u").validate().ok());
  CHECK(chain3_category().validate().ok());
  CHECK(poset_square_category().validate().ok());
  CHECK(parallel_pair_category().validate().ok());

  // missing composition entry for a composable pair
  auto broken = FinCategoryBuilder("broken")
                    .object("a")
                    .object("b")
                    .object("c")
                    .arrow("f", "a", "b")
                    .arrow("g", "b", "c")
                    .build();  // no rule for g after f
  auto rep = broken.validate();
  CHECK_FALSE(rep.ok());
  CHECK(rep.violations.front().find("closure") != std::string::npos);

  // associativity violation: x∘(x∘y) = id while (x∘x)∘y = y
  auto assoc = FinCategoryBuilder("assoc")
                   .object("a")
                   .arrow("x", "a", "a")
                   .arrow("y", "a", "a")
                   .compose_rule("x", "x", "id_a")
                   .compose_rule("x", "y", "x")
                   .compose_rule("y", "x", "y")
                   .compose_rule("y", "y", "y")
                   .build();
  auto arep = assoc.validate();
  CHECK_FALSE(arep.ok());
  bool found = false;
  for (const auto& v : arep.violations) found = found || v.find("associativity") != std::string::npos;
  CHECK(found);
}

TEST_CASE("free category saturates composites and rejects cycles") {
  auto c = free_category("free", {"a", "b", "c"}, {{"f", "a", "b"}, {"g", "b", "c"}});
  CHECK(c.validate().ok());
  CHECK(c.has_arrow("g.f"));
  CHECK(c.compose_ids("g", "f") == "g.f");

  CHECK_THROWS_AS(free_category("loop", {"a"}, {{"e", "a", "a"}}), Error);
}

TEST_CASE("validate_diagram") {
  FinSet one = mk("one", {"*"});
  SetDiagram constant(one_object_category(), {{"*", one}}, {});
  CHECK(constant.validate().ok());

  FinSet A = mk("A", {"a", "b"}), Z = mk("Z", {"z"});
  auto d = cospan_diagram(fn(A, Z, {{"a", "z"}, {"b", "z"}}), fn(A, Z, {{"a", "z"}, {"b", "z"}}));
  CHECK(d.validate().ok());

  // wrong composite over chain3
  FinSet B = mk("B", {"p", "q"});
  auto f = fn(A, B, {{"a", "p"}, {"b", "q"}});
  auto g = fn(B, A, {{"p", "a"}, {"q", "b"}});
  auto wrong = FinFunction::constant(A, A, "a");  // should be g∘f = id
  SetDiagram bad(chain3_category(), {{"a", A}, {"b", B}, {"c", A}}, {{"f", f}, {"g", g}, {"g.f", wrong}});
  auto rep = bad.validate();
  CHECK_FALSE(rep.ok());
  CHECK(rep.violations.front().find("functoriality") != std::string::npos);
}

TEST_CASE("limit over stock shapes") {
  FinSet A = mk("A", {"a", "b"}), P = mk("P", {"p", "q"});

  // discrete: Cartesian product
  auto prod = limit(discrete_diagram({A, P}));
  CHECK(prod.apex.size() == 4);
  CHECK(prod.commutes());

  // cospan with constant legs: the full product survives the filter
  FinSet Z = mk("Z", {"z"});
  auto d = cospan_diagram(FinFunction::constant(A, Z, "z"), FinFunction::constant(A, Z, "z"));
  auto pb = limit(d);
  CHECK(pb.apex.size() == 4);

  // empty shape: terminal singleton
  SetDiagram empty(discrete_category("empty", {}), {}, {});
  auto term = limit(empty);
  CHECK(term.apex.size() == 1);

  // oracle: filtered tuples, counted independently
  FinSet B = mk("B", {"x", "y"});
  auto f = fn(A, B, {{"a", "x"}, {"b", "y"}});
  auto g = fn(P, B, {{"p", "x"}, {"q", "x"}});
  auto lim2 = limit(cospan_diagram(f, g));
  std::size_t expect = 0;
  for (const auto& xa : A.elements())
    for (const auto& xp : P.elements())
      if (f(xa) == g(xp)) ++expect;
  CHECK(lim2.apex.size() == expect);
}

TEST_CASE("limit agrees with finset pullback and equalizer") {
  FinSet A = mk("A", {"a", "b"}), B = mk("B", {"x", "y"}), P = mk("P", {"p", "q", "r"});
  for (const auto& f : all_functions(A, B))
    for (const auto& g : all_functions(P, B)) {
      auto cone = limit(cospan_diagram(f, g));
      auto pb = pullback(f, g);
      CHECK(cone.apex.size() == pb.set.size());
      // elementwise: strip the z-component of each limit tuple
      std::vector<std::string> got;
      for (const auto& e : cone.apex.elements()) {
        auto parts = tuple_parts(e);  // (x, y, z) in shape object order
        got.push_back(tuple_atom({parts[0], parts[1]}));
      }
      CHECK(got == pb.set.elements());
    }
  for (const auto& f : all_functions(A, B))
    for (const auto& g : all_functions(A, B)) {
      auto cone = limit(parallel_diagram(f, g));
      auto eq = equalizer(f, g);
      CHECK(cone.apex.size() == eq.sub.size());
    }
}

TEST_CASE("colimit over stock shapes") {
  FinSet A = mk("A", {"a", "b"}), P = mk("P", {"p"});

  auto cop = colimit(discrete_diagram({A, P}));
  CHECK(cop.apex.size() == 3);
  CHECK(cop.commutes());

  SetDiagram empty(discrete_category("empty", {}), {}, {});
  CHECK(colimit(empty).apex.empty());

  // coequalizer shape matches finset.coequalizer
  FinSet C = mk("C", {"p", "q", "r"});
  for (const auto& f : all_functions(A, C))
    for (const auto& g : all_functions(A, C)) {
      auto cone = colimit(parallel_diagram(f, g));
      auto coeq = coequalizer(f, g);
      CHECK(cone.apex.size() == coeq.set.size());
      for (const auto& c1 : C.elements())
        for (const auto& c2 : C.elements())
          CHECK((cone.legs.at("y")(c1) == cone.legs.at("y")(c2)) ==
                (coeq.quotient_map(c1) == coeq.quotient_map(c2)));
    }
}

TEST_CASE("colimit agrees with finset pushout") {
  FinSet Z = mk("Z", {"s", "t"}), X = mk("X", {"a", "b"}), Y = mk("Y", {"p", "q"});
  for (const auto& f : all_functions(Z, X))
    for (const auto& g : all_functions(Z, Y)) {
      auto cone = colimit(span_diagram(f, g));
      auto po = pushout(f, g);
      CHECK(cone.apex.size() == po.set.size());
      for (const auto& x : X.elements())
        for (const auto& y : Y.elements())
          CHECK((cone.legs.at("x")(x) == cone.legs.at("y")(y)) == (po.i1(x) == po.i2(y)));
    }
}

TEST_CASE("mediating morphism") {
  FinSet A = mk("A", {"a", "b"}), B = mk("B", {"x", "y"});
  auto f = fn(A, B, {{"a", "x"}, {"b", "y"}});
  auto g = fn(A, B, {{"a", "x"}, {"b", "x"}});
  auto d = cospan_diagram(f, g);
  auto uni = limit(d);

  // candidate = universal: the mediator is the identity
  auto k = mediating_morphism(uni, uni);
  CHECK(k == FinFunction::identity(uni.apex));

  // singleton candidate picking one compatible tuple: constant mediator
  REQUIRE(uni.apex.size() > 0);
  std::string pick = uni.apex.at(0);
  auto parts = tuple_parts(pick);
  FinSet one = mk("T", {"t"});
  Cone cand;
  cand.diagram = d;
  cand.direction = ConeDirection::over;
  cand.apex = one;
  cand.legs.emplace("x", FinFunction::constant(one, A, parts[0]));
  cand.legs.emplace("y", FinFunction::constant(one, A, parts[1]));
  cand.legs.emplace("z", FinFunction::constant(one, B, parts[2]));
  REQUIRE(cand.commutes());
  auto med = mediating_morphism(uni, cand);
  CHECK(med("t") == pick);
  CHECK(mediator_count(uni, cand) == 1);
  CHECK(mediator_count(uni, uni) == 1);
  // oracle: brute-force search finds exactly that one
  std::size_t found = 0;
  for (const auto& cm : all_functions(one, uni.apex)) {
    bool works = true;
    for (const auto& obj : d.shape().objects())
      if (!(compose(uni.legs.at(obj), cm) == cand.legs.at(obj))) works = false;
    if (works) {
      ++found;
      CHECK(cm == med);
    }
  }
  CHECK(found == 1);

  // empty candidate: the empty mediator
  FinSet none = mk("none", {});
  Cone empty_cand;
  empty_cand.diagram = d;
  empty_cand.direction = ConeDirection::over;
  empty_cand.apex = none;
  empty_cand.legs.emplace("x", FinFunction(none, A, std::vector<int>{}));
  empty_cand.legs.emplace("y", FinFunction(none, A, std::vector<int>{}));
  empty_cand.legs.emplace("z", FinFunction(none, B, std::vector<int>{}));
  CHECK(mediating_morphism(uni, empty_cand).dom().empty());

  // a non-cone is rejected
  Cone bent = cand;
  bent.legs.at("z") = FinFunction::constant(one, B, f(parts[0]) == "x" ? "y" : "x");
  CHECK_THROWS_AS(mediating_morphism(uni, bent), Error);
}

TEST_CASE("is_universal_cone distinguishes the limit from damaged cones") {
  FinSet A = mk("A", {"a", "b"}), B = mk("B", {"x", "y"});
  auto f = fn(A, B, {{"a", "x"}, {"b", "y"}});
  auto g = fn(A, B, {{"a", "x"}, {"b", "x"}});
  auto d = cospan_diagram(f, g);
  auto uni = limit(d);
  CHECK(is_universal_cone(uni));

  // duplicate one compatible tuple: two mediators exist for some candidate
  {
    std::vector<std::string> elems = uni.apex.elements();
    elems.push_back("dup");
    FinSet apex2("lim+", elems);
    Cone dup = uni;
    dup.apex = apex2;
    for (auto& [obj, leg] : dup.legs) {
      std::vector<int> t = leg.table();
      t.push_back(leg.table().front());  // same image as element 0
      dup.legs.at(obj) = FinFunction(apex2, leg.cod(), std::move(t));
    }
    REQUIRE(dup.commutes());
    CHECK_FALSE(is_universal_cone(dup));
  }

  // drop one compatible tuple: some cone has no mediator
  {
    REQUIRE(uni.apex.size() >= 2);
    std::vector<std::string> elems(uni.apex.elements().begin() + 1, uni.apex.elements().end());
    FinSet apex2("lim-", elems);
    Cone chopped = uni;
    chopped.apex = apex2;
    for (auto& [obj, leg] : chopped.legs) {
      std::vector<int> t(leg.table().begin() + 1, leg.table().end());
      chopped.legs.at(obj) = FinFunction(apex2, leg.cod(), std::move(t));
    }
    REQUIRE(chopped.commutes());
    CHECK_FALSE(is_universal_cone(chopped));
  }

  // colimits are universal under-cones
  auto co = colimit(span_diagram(fn(A, B, {{"a", "x"}, {"b", "x"}}), FinFunction::identity(A)));
  CHECK(is_universal_cone(co));
}

TEST_CASE("limit equals the product-equalizer decomposition") {
  // lim D = equalizer of s,t : Prod_j D(j) -> Prod_{arrows f} D(cod f)
  // where s picks the target component and t applies D(f) to the source one.
  auto check_decomposition = [](const SetDiagram& d) {
    const auto& objs = d.shape().objects();
    std::vector<FinSet> carriers;
    for (const auto& o : objs) carriers.push_back(d.at(o));
    auto prod = tuple_product("prod", carriers);

    std::vector<const Arrow*> arrows;
    for (const auto& a : d.shape().arrows()) arrows.push_back(&a);
    std::vector<FinSet> targets;
    for (const auto* a : arrows) targets.push_back(d.at(a->tgt));
    auto tgt_prod = tuple_product("tgt", targets);
    if (prod.set.empty() || tgt_prod.set.empty()) return;

    auto pos = [&](const std::string& o) {
      return static_cast<std::size_t>(std::find(objs.begin(), objs.end(), o) - objs.begin());
    };
    auto s = FinFunction::tabulate(prod.set, tgt_prod.set, [&](const std::string& tup) {
      auto parts = tuple_parts(tup);
      std::vector<std::string> out;
      for (const auto* a : arrows) out.push_back(parts[pos(a->tgt)]);
      return tuple_atom(out);
    });
    auto t = FinFunction::tabulate(prod.set, tgt_prod.set, [&](const std::string& tup) {
      auto parts = tuple_parts(tup);
      std::vector<std::string> out;
      for (const auto* a : arrows) out.push_back(d.on(a->id)(parts[pos(a->src)]));
      return tuple_atom(out);
    });
    auto eq = equalizer(s, t);
    auto direct = limit(d);
    CHECK(eq.sub.members() == direct.apex.elements());
  };

  FinSet A = mk("A", {"a", "b"}), B = mk("B", {"x", "y"}), C = mk("C", {"p", "q", "r"});
  check_decomposition(cospan_diagram(fn(A, B, {{"a", "x"}, {"b", "y"}}), fn(C, B, {{"p", "x"}, {"q", "y"}, {"r", "y"}})));
  check_decomposition(parallel_diagram(fn(A, C, {{"a", "p"}, {"b", "q"}}), fn(A, C, {{"a", "p"}, {"b", "r"}})));
  check_decomposition(discrete_diagram({A, B, C}));
  SetDiagram chain(chain3_category(), {{"a", A}, {"b", B}, {"c", C}},
                   {{"f", fn(A, B, {{"a", "x"}, {"b", "x"}})},
                    {"g", fn(B, C, {{"x", "p"}, {"y", "q"}})},
                    {"g.f", fn(A, C, {{"a", "p"}, {"b", "p"}})}});
  REQUIRE(chain.validate().ok());
  check_decomposition(chain);

  // a four-object commuting square
  FinSet O = mk("O", {"o1", "o2"});
  auto ou = fn(O, A, {{"o1", "a"}, {"o2", "b"}});
  auto ov = fn(O, B, {{"o1", "x"}, {"o2", "y"}});
  auto ux = fn(A, C, {{"a", "p"}, {"b", "q"}});
  auto vx = fn(B, C, {{"x", "p"}, {"y", "q"}});
  auto ox = compose(ux, ou);
  SetDiagram square(poset_square_category(), {{"o", O}, {"u", A}, {"v", B}, {"x", C}},
                    {{"ou", ou}, {"ov", ov}, {"ux", ux}, {"vx", vx}, {"ox", ox}});
  REQUIRE(square.validate().ok());
  check_decomposition(square);
  CHECK(is_universal_cone(limit(square)));
}

TEST_CASE("natural transformations validate the commuting square") {
  FinSet A = mk("A", {"a", "b"}), B = mk("B", {"x", "y"});
  auto f = fn(A, B, {{"a", "x"}, {"b", "y"}});
  auto d1 = parallel_diagram(f, f);
  auto d2 = parallel_diagram(FinFunction::identity(A), FinFunction::identity(A));

  NatTransformation nat;
  nat.source = d2;
  nat.target = d1;
  nat.components.emplace("x", FinFunction::identity(A));
  nat.components.emplace("y", f);
  CHECK(nat.natural());

  nat.components.at("y") = FinFunction::constant(A, B, "x");
  CHECK_FALSE(nat.natural());
}

TEST_CASE("opposite category") {
  auto op = chain3_category().opposite();
  CHECK(op.validate().ok());
  CHECK(op.arrow("f").src == "b");
  CHECK(op.arrow("f").tgt == "a");
  CHECK(op.compose_ids("f", "g") == "g.f");
}

TEST_CASE("limit SizeLimit guard") {
  FinSet big = mk("big", {"1", "2", "3", "4", "5", "6", "7", "8", "9", "10"});
  Limits small;
  small.max_enum = 50;
  CHECK_THROWS_AS(limit(discrete_diagram({big, big}), small), Error);
}

}  // TEST_SUITE
