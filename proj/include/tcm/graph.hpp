#pragma once

#include "tcm/presheaf.hpp"

namespace tcm {

// A finite directed graph (parallel edges and loops allowed).
struct FinGraph {
  FinSet vertices, edges;
  FinFunction src, tgt;  // edges -> vertices
};

FinGraph make_graph(const std::string& name, std::vector<std::string> vertices,
                    std::vector<std::array<std::string, 3>> edges);  // (id, src, tgt)

// The two-object base category of the graph topos, presheaf convention:
// arrows s,t: V -> E so that restriction sends edges to vertices.
const FinCategory& graph_base();

struct SubGraph {
  FinGraph parent;
  std::set<std::string> vertex_members, edge_members;

  bool closed() const;  // both endpoints of every member edge are members
};

Presheaf as_presheaf(const FinGraph& g);
FinGraph from_presheaf(const Presheaf& p, const std::string& name);

// The covariant reading: the same graph as a set-valued diagram over the
// opposite base (s,t: E -> V).
SetDiagram as_diagram(const FinGraph& g);

struct GraphMorphism {
  FinGraph dom, cod;
  FinFunction vmap, emap;

  bool homomorphic() const;  // src/tgt squares commute
};

// The classifier graph: two vertex truth values and five edge truth values.
struct OmegaGraph {
  FinGraph graph;
  std::string true_vertex;  // "V"
  std::string true_edge;    // "1_E"
};

OmegaGraph graph_omega();

GraphMorphism classify_subgraph(const SubGraph& s);
SubGraph subgraph_from_classifier(const GraphMorphism& chi);

SubPresheaf as_subpresheaf(const SubGraph& s);
SubGraph subgraph_from_subpresheaf(const SubPresheaf& s, const FinGraph& parent);

std::vector<SubGraph> subgraphs(const FinGraph& g, const Limits& lim = {});

struct GraphDiagram {
  FinCategory shape;
  std::map<std::string, FinGraph> objects;
  std::map<std::string, GraphMorphism> arrows;
};

FinGraph graph_limit(const GraphDiagram& d, const Limits& lim = {});
FinGraph graph_colimit(const GraphDiagram& d);

std::string to_dot(const FinGraph& g);

}  // namespace tcm
