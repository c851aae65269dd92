#include "doctest.h"
#include "tcm/graph.hpp"

#include <algorithm>

using namespace tcm;

namespace {

FinGraph single_edge() { return make_graph("edge", {"a", "b"}, {{"e", "a", "b"}}); }

// independent oracle: enumerate all graph homomorphisms by brute force
std::size_t count_graph_homs(const FinGraph& g, const FinGraph& h) {
  std::size_t count = 0;
  for (const auto& vm : all_functions(g.vertices, h.vertices))
    for (const auto& em : all_functions(g.edges, h.edges)) {
      GraphMorphism m{g, h, vm, em};
      if (m.homomorphic()) ++count;
    }
  return count;
}

}  // namespace

TEST_SUITE("graph") {

TEST_CASE("as_presheaf round-trips") {
  FinGraph empty = make_graph("none", {}, {});
  CHECK(as_presheaf(empty).at("V").empty());
  CHECK(as_presheaf(empty).at("E").empty());

  FinGraph loop = make_graph("loop", {"v"}, {{"e", "v", "v"}});
  Presheaf lp = as_presheaf(loop);
  CHECK(lp.validate().ok());
  CHECK(lp.at("V").size() == 1);
  CHECK(lp.at("E").size() == 1);
  FinGraph back = from_presheaf(lp, "loop2");
  CHECK(back.src == loop.src);
  CHECK(back.tgt == loop.tgt);

  // the one-edge graph has five subobjects, matching |Omega(E)|
  CHECK(subobjects(as_presheaf(single_edge())).size() == 5);

  // the covariant reading is a valid set-valued diagram
  CHECK(as_diagram(single_edge()).validate().ok());
}

TEST_CASE("graph_omega matches the presheaf classifier") {
  OmegaGraph og = graph_omega();
  CHECK(og.graph.vertices.size() == 2);
  CHECK(og.graph.edges.size() == 5);
  CHECK(og.true_vertex == "V");
  CHECK(og.true_edge == "1_E");

  // the canonical relabeling sieve -> case label is an isomorphism
  Omega om = omega(graph_base());
  FinGraph from_om = from_presheaf(om.psh, "Om");
  std::map<std::string, std::string> vlabel{{"{}", "0_V"}, {om.truth("V"), "V"}};
  std::map<std::string, std::string> elabel{{"{}", "0_E"},
                                            {"{s}", "s"},
                                            {"{t}", "t"},
                                            {"{s,t}", "st"},
                                            {om.truth("E"), "1_E"}};
  REQUIRE(from_om.vertices.size() == 2);
  REQUIRE(from_om.edges.size() == 5);
  for (const auto& e : from_om.edges.elements()) {
    CHECK(og.graph.src(elabel.at(e)) == vlabel.at(from_om.src(e)));
    CHECK(og.graph.tgt(elabel.at(e)) == vlabel.at(from_om.tgt(e)));
  }
}

TEST_CASE("classify_subgraph covers the five edge cases") {
  FinGraph g = single_edge();
  OmegaGraph og = graph_omega();

  SubGraph whole{g, {"a", "b"}, {"e"}};
  GraphMorphism chi = classify_subgraph(whole);
  CHECK(chi.homomorphic());
  CHECK(chi.vmap("a") == "V");
  CHECK(chi.vmap("b") == "V");
  CHECK(chi.emap("e") == "1_E");

  SubGraph none{g, {}, {}};
  chi = classify_subgraph(none);
  CHECK(chi.vmap("a") == "0_V");
  CHECK(chi.emap("e") == "0_E");

  SubGraph src_only{g, {"a"}, {}};
  CHECK(classify_subgraph(src_only).emap("e") == "s");

  SubGraph tgt_only{g, {"b"}, {}};
  CHECK(classify_subgraph(tgt_only).emap("e") == "t");

  SubGraph both_no_edge{g, {"a", "b"}, {}};
  CHECK(classify_subgraph(both_no_edge).emap("e") == "st");

  // an edge without its endpoints is not a subgraph
  SubGraph broken{g, {}, {"e"}};
  CHECK_FALSE(broken.closed());
  CHECK_THROWS_AS(classify_subgraph(broken), Error);
}

TEST_CASE("subgraph classification round-trips on every small graph") {
  // all graphs with <= 2 vertices and <= 2 edges (the acceptance suite
  // pushes this to 3x3)
  std::vector<FinGraph> corpus;
  for (std::size_t nv = 0; nv <= 2; ++nv) {
    std::vector<std::string> vs;
    for (std::size_t i = 0; i < nv; ++i) vs.push_back("v" + std::to_string(i));
    std::size_t combos = nv * nv;
    for (std::size_t ne = 0; ne <= 2; ++ne) {
      if (ne > 0 && nv == 0) continue;
      std::vector<std::size_t> odo(ne, 0);
      while (true) {
        std::vector<std::array<std::string, 3>> edges;
        for (std::size_t k = 0; k < ne; ++k)
          edges.push_back({"e" + std::to_string(k), vs[odo[k] / nv], vs[odo[k] % nv]});
        corpus.push_back(make_graph("g", vs, edges));
        std::size_t k = ne;
        bool done = ne == 0;
        while (k-- > 0) {
          if (++odo[k] < combos) break;
          odo[k] = 0;
          if (k == 0) done = true;
        }
        if (done) break;
      }
    }
  }
  CHECK(corpus.size() > 20);
  for (const auto& g : corpus) {
    auto subs = subgraphs(g);
    // classifier bijection against the brute-force hom count
    CHECK(subs.size() == count_graph_homs(g, graph_omega().graph));
    for (const auto& s : subs) {
      GraphMorphism chi = classify_subgraph(s);
      CHECK(chi.homomorphic());
      SubGraph back = subgraph_from_classifier(chi);
      CHECK(back.vertex_members == s.vertex_members);
      CHECK(back.edge_members == s.edge_members);
    }
  }
}

TEST_CASE("excluded middle fails for one endpoint of an edge") {
  FinGraph g = single_edge();
  SubPresheaf s = as_subpresheaf(SubGraph{g, {"a"}, {}});
  SubPresheaf lem = heyting(HeytingOp::join, s, heyting_not(s));
  CHECK_FALSE(lem == full_sub(as_presheaf(g)));
}

TEST_CASE("graph limits and colimits are componentwise") {
  FinGraph g = single_edge();

  // product with itself: 4 vertices, a single aligned edge pair
  GraphDiagram prod;
  prod.shape = discrete_category("two", {"l", "r"});
  prod.objects = {{"l", g}, {"r", g}};
  FinGraph p = graph_limit(prod);
  CHECK(p.vertices.size() == 4);
  CHECK(p.edges.size() == 1);
  CHECK(p.src(p.edges.at(0)) == "(a,a)");
  CHECK(p.tgt(p.edges.at(0)) == "(b,b)");

  // coproduct: the disjoint union
  FinGraph cp = graph_colimit(prod);
  CHECK(cp.vertices.size() == 4);
  CHECK(cp.edges.size() == 2);

  // pullback over the terminal graph (one loop) is the product
  FinGraph terminal = make_graph("pt", {"v"}, {{"l", "v", "v"}});
  GraphMorphism to_term{g, terminal, FinFunction::constant(g.vertices, terminal.vertices, "v"),
                        FinFunction::constant(g.edges, terminal.edges, "l")};
  REQUIRE(to_term.homomorphic());
  GraphDiagram pb;
  pb.shape = cospan_category();
  pb.objects = {{"x", g}, {"y", g}, {"z", terminal}};
  pb.arrows = {{"f", to_term}, {"g", to_term}};
  FinGraph pbg = graph_limit(pb);
  CHECK(pbg.vertices.size() == p.vertices.size());
  CHECK(pbg.edges.size() == p.edges.size());

  // pushout: gluing two edges along a shared vertex gives a path
  FinGraph pt = make_graph("v", {"m"}, {});
  GraphMorphism to_b{pt, g, FinFunction::constant(pt.vertices, g.vertices, "b"),
                     FinFunction(pt.edges, g.edges, std::vector<int>{})};
  GraphMorphism to_a{pt, g, FinFunction::constant(pt.vertices, g.vertices, "a"),
                     FinFunction(pt.edges, g.edges, std::vector<int>{})};
  GraphDiagram po;
  po.shape = span_category();
  po.objects = {{"x", g}, {"y", g}, {"z", pt}};
  po.arrows = {{"f", to_b}, {"g", to_a}};
  FinGraph path = graph_colimit(po);
  CHECK(path.vertices.size() == 3);
  CHECK(path.edges.size() == 2);
}

TEST_CASE("dot export") {
  std::string dot = to_dot(single_edge());
  CHECK(dot.find("digraph") != std::string::npos);
  CHECK(dot.find("\"a\" -> \"b\"") != std::string::npos);
}

}  // TEST_SUITE
