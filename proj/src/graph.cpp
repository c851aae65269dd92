#include "tcm/graph.hpp"

#include <algorithm>
#include <sstream>

namespace tcm {

FinGraph make_graph(const std::string& name, std::vector<std::string> vertices,
                    std::vector<std::array<std::string, 3>> edges) {
  FinSet vs(name + ".V", std::move(vertices));
  std::vector<std::string> eids;
  std::vector<int> st, tt;
  for (const auto& e : edges) {
    eids.push_back(e[0]);
    st.push_back(vs.index_or_throw(e[1]));
    tt.push_back(vs.index_or_throw(e[2]));
  }
  FinSet es(name + ".E", std::move(eids));
  return {vs, es, FinFunction(es, vs, std::move(st)), FinFunction(es, vs, std::move(tt))};
}

const FinCategory& graph_base() {
  static const FinCategory c = FinCategoryBuilder("graph")
                                   .object("V")
                                   .object("E")
                                   .arrow("s", "V", "E")
                                   .arrow("t", "V", "E")
                                   .build();
  return c;
}

bool SubGraph::closed() const {
  for (const auto& e : edge_members) {
    if (!parent.edges.contains(e)) return false;
    if (!vertex_members.count(parent.src(e)) || !vertex_members.count(parent.tgt(e))) return false;
  }
  for (const auto& v : vertex_members)
    if (!parent.vertices.contains(v)) return false;
  return true;
}

Presheaf as_presheaf(const FinGraph& g) {
  std::map<std::string, FinSet> at{{"V", g.vertices}, {"E", g.edges}};
  std::map<std::string, FinFunction> restrict{{"s", g.src}, {"t", g.tgt}};
  return Presheaf(graph_base(), std::move(at), std::move(restrict));
}

FinGraph from_presheaf(const Presheaf& p, const std::string& name) {
  return {p.at("V").renamed(name + ".V"), p.at("E").renamed(name + ".E"), p.restriction("s"),
          p.restriction("t")};
}

SetDiagram as_diagram(const FinGraph& g) {
  static const FinCategory shape = graph_base().opposite();
  return SetDiagram(shape, {{"V", g.vertices}, {"E", g.edges}}, {{"s", g.src}, {"t", g.tgt}});
}

bool GraphMorphism::homomorphic() const {
  if (!vmap.dom().same_elements(dom.vertices) || !vmap.cod().same_elements(cod.vertices)) return false;
  if (!emap.dom().same_elements(dom.edges) || !emap.cod().same_elements(cod.edges)) return false;
  return compose(cod.src, emap) == compose(vmap, dom.src) && compose(cod.tgt, emap) == compose(vmap, dom.tgt);
}

OmegaGraph graph_omega() {
  // vertex truth values {0_V, V}; edge truth values by which endpoints land
  // in the subgraph and whether the edge itself does
  OmegaGraph og;
  og.graph = make_graph("Omega",
                        {"0_V", "V"},
                        {{"0_E", "0_V", "0_V"},
                         {"s", "V", "0_V"},
                         {"t", "0_V", "V"},
                         {"st", "V", "V"},
                         {"1_E", "V", "V"}});
  og.true_vertex = "V";
  og.true_edge = "1_E";
  return og;
}

GraphMorphism classify_subgraph(const SubGraph& s) {
  if (!s.closed()) fail(Err::validation, "classify_subgraph: not a subgraph (an edge leaves the vertex set)");
  OmegaGraph og = graph_omega();
  const FinGraph& g = s.parent;
  auto vmap = FinFunction::tabulate(g.vertices, og.graph.vertices, [&](const std::string& v) {
    return s.vertex_members.count(v) ? "V" : "0_V";
  });
  auto emap = FinFunction::tabulate(g.edges, og.graph.edges, [&](const std::string& e) -> std::string {
    if (s.edge_members.count(e)) return "1_E";
    bool src_in = s.vertex_members.count(g.src(e)) > 0;
    bool tgt_in = s.vertex_members.count(g.tgt(e)) > 0;
    if (src_in && tgt_in) return "st";
    if (src_in) return "s";
    if (tgt_in) return "t";
    return "0_E";
  });
  return {g, og.graph, std::move(vmap), std::move(emap)};
}

SubGraph subgraph_from_classifier(const GraphMorphism& chi) {
  SubGraph s;
  s.parent = chi.dom;
  for (const auto& v : chi.dom.vertices.elements())
    if (chi.vmap(v) == "V") s.vertex_members.insert(v);
  for (const auto& e : chi.dom.edges.elements())
    if (chi.emap(e) == "1_E") s.edge_members.insert(e);
  return s;
}

SubPresheaf as_subpresheaf(const SubGraph& s) {
  return SubPresheaf(as_presheaf(s.parent), {{"V", s.vertex_members}, {"E", s.edge_members}});
}

SubGraph subgraph_from_subpresheaf(const SubPresheaf& sp, const FinGraph& parent) {
  SubGraph s;
  s.parent = parent;
  s.vertex_members = sp.members("V");
  s.edge_members = sp.members("E");
  return s;
}

std::vector<SubGraph> subgraphs(const FinGraph& g, const Limits& lim) {
  std::vector<SubGraph> out;
  for (const auto& sp : subobjects(as_presheaf(g), lim)) out.push_back(subgraph_from_subpresheaf(sp, g));
  return out;
}

namespace {

SetDiagram component_diagram(const GraphDiagram& d, bool vertices) {
  std::map<std::string, FinSet> objs;
  std::map<std::string, FinFunction> arrows;
  for (const auto& [obj, g] : d.objects) objs.emplace(obj, vertices ? g.vertices : g.edges);
  for (const auto& [id, m] : d.arrows) arrows.emplace(id, vertices ? m.vmap : m.emap);
  return SetDiagram(d.shape, std::move(objs), std::move(arrows));
}

}  // namespace

FinGraph graph_limit(const GraphDiagram& d, const Limits& lim) {
  for (const auto& [id, m] : d.arrows)
    if (!m.homomorphic()) fail(Err::validation, "graph diagram arrow '" + id + "' is not a homomorphism");
  Cone vc = limit(component_diagram(d, true), lim);
  Cone ec = limit(component_diagram(d, false), lim);
  const auto& objs = d.shape.objects();
  // src/tgt act componentwise on compatible tuples
  auto induced = [&](bool source) {
    return FinFunction::tabulate(ec.apex, vc.apex, [&](const std::string& etup) {
      auto parts = tuple_parts(etup);
      std::vector<std::string> vparts;
      for (std::size_t k = 0; k < objs.size(); ++k) {
        const FinGraph& g = d.objects.at(objs[k]);
        vparts.push_back(source ? g.src(parts[k]) : g.tgt(parts[k]));
      }
      return tuple_atom(vparts);
    });
  };
  return {vc.apex.renamed("lim.V"), ec.apex.renamed("lim.E"), induced(true), induced(false)};
}

FinGraph graph_colimit(const GraphDiagram& d) {
  for (const auto& [id, m] : d.arrows)
    if (!m.homomorphic()) fail(Err::validation, "graph diagram arrow '" + id + "' is not a homomorphism");
  Cone vc = colimit(component_diagram(d, true));
  Cone ec = colimit(component_diagram(d, false));
  const auto& objs = d.shape.objects();
  auto induced = [&](bool source) {
    std::vector<int> table(ec.apex.size(), -1);
    for (const auto& obj : objs) {
      const FinGraph& g = d.objects.at(obj);
      for (const auto& e : g.edges.elements()) {
        int cls = ec.apex.index_or_throw(ec.legs.at(obj)(e));
        int v = vc.apex.index_or_throw(vc.legs.at(obj)(source ? g.src(e) : g.tgt(e)));
        // well-defined: identified edges have identified endpoints
        if (table[static_cast<std::size_t>(cls)] >= 0 && table[static_cast<std::size_t>(cls)] != v)
          fail(Err::validation, "colimit endpoints are not well-defined");
        table[static_cast<std::size_t>(cls)] = v;
      }
    }
    return FinFunction(ec.apex, vc.apex, std::move(table));
  };
  return {vc.apex.renamed("colim.V"), ec.apex.renamed("colim.E"), induced(true), induced(false)};
}

std::string to_dot(const FinGraph& g) {
  std::ostringstream os;
  os << "digraph {\n";
  for (const auto& v : g.vertices.elements()) os << "  \"" << v << "\";\n";
  for (const auto& e : g.edges.elements())
    os << "  \"" << g.src(e) << "\" -> \"" << g.tgt(e) << "\" [label=\"" << e << "\"];\n";
  os << "}\n";
  return os.str();
}

}  // namespace tcm
