#include "tcm/fincat.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace tcm {

// ---- FinCategory -----------------------------------------------------------

const Arrow& FinCategory::arrow(const std::string& id) const {
  auto it = arrow_index_.find(id);
  if (it == arrow_index_.end()) fail(Err::unknown_arrow, "unknown arrow '" + id + "' in category '" + name_ + "'");
  return arrows_[static_cast<std::size_t>(it->second)];
}

const std::string& FinCategory::identity_of(const std::string& obj) const {
  auto it = obj_index_.find(obj);
  if (it == obj_index_.end()) fail(Err::unknown_object, "unknown object '" + obj + "' in category '" + name_ + "'");
  return arrows_[static_cast<std::size_t>(identity_[static_cast<std::size_t>(it->second)])].id;
}

bool FinCategory::is_identity(const std::string& id) const {
  const Arrow& a = arrow(id);
  return identity_of(a.src) == id;
}

bool FinCategory::composable(const std::string& g, const std::string& f) const {
  return arrow(f).tgt == arrow(g).src;
}

const std::string& FinCategory::compose_ids(const std::string& g, const std::string& f) const {
  int gi = arrow_index_.at(g), fi = arrow_index_.at(f);
  if (arrows_[static_cast<std::size_t>(fi)].tgt != arrows_[static_cast<std::size_t>(gi)].src)
    fail(Err::unknown_arrow, "arrows '" + g + "' and '" + f + "' are not composable");
  int c = comp_[static_cast<std::size_t>(gi)][static_cast<std::size_t>(fi)];
  if (c < 0) fail(Err::unknown_arrow, "no composition entry for '" + g + "' after '" + f + "'");
  return arrows_[static_cast<std::size_t>(c)].id;
}

std::vector<std::string> FinCategory::arrows_into(const std::string& obj) const {
  if (!has_object(obj)) fail(Err::unknown_object, "unknown object '" + obj + "'");
  std::vector<std::string> out;
  for (const auto& a : arrows_)
    if (a.tgt == obj) out.push_back(a.id);
  return out;
}

std::vector<std::string> FinCategory::arrows_from(const std::string& obj) const {
  if (!has_object(obj)) fail(Err::unknown_object, "unknown object '" + obj + "'");
  std::vector<std::string> out;
  for (const auto& a : arrows_)
    if (a.src == obj) out.push_back(a.id);
  return out;
}

FinCategory::Report FinCategory::validate() const {
  Report rep;
  // closure: every composable pair has an entry
  for (const auto& g : arrows_)
    for (const auto& f : arrows_)
      if (f.tgt == g.src) {
        int c = comp_[static_cast<std::size_t>(arrow_index_.at(g.id))][static_cast<std::size_t>(arrow_index_.at(f.id))];
        if (c < 0) {
          rep.violations.push_back("closure: missing entry for " + g.id + " after " + f.id);
        } else {
          const Arrow& gf = arrows_[static_cast<std::size_t>(c)];
          if (gf.src != f.src || gf.tgt != g.tgt)
            rep.violations.push_back("closure: " + g.id + " after " + f.id + " lands at a wrong hom-set");
        }
      }
  if (!rep.ok()) return rep;  // laws below assume closure
  // identity laws
  for (const auto& f : arrows_) {
    if (compose_ids(identity_of(f.tgt), f.id) != f.id)
      rep.violations.push_back("identity: id_" + f.tgt + " after " + f.id + " != " + f.id);
    if (compose_ids(f.id, identity_of(f.src)) != f.id)
      rep.violations.push_back("identity: " + f.id + " after id_" + f.src + " != " + f.id);
  }
  // associativity on all composable triples
  for (const auto& h : arrows_)
    for (const auto& g : arrows_)
      for (const auto& f : arrows_) {
        if (f.tgt != g.src || g.tgt != h.src) continue;
        const std::string& left = compose_ids(h.id, compose_ids(g.id, f.id));
        const std::string& right = compose_ids(compose_ids(h.id, g.id), f.id);
        if (left != right)
          rep.violations.push_back("associativity: (" + h.id + "," + g.id + "," + f.id + ")");
      }
  return rep;
}

FinCategory FinCategory::opposite() const {
  FinCategoryBuilder b(name_ + "^op");
  for (const auto& o : objects_) b.object(o);
  for (const auto& a : arrows_)
    if (!is_identity(a.id)) b.arrow(a.id, a.tgt, a.src);
  for (const auto& g : arrows_)
    for (const auto& f : arrows_) {
      if (is_identity(g.id) || is_identity(f.id)) continue;
      if (f.tgt != g.src) continue;
      // g∘f in C becomes f∘g in C^op
      const std::string& gf = compose_ids(g.id, f.id);
      if (!is_identity(gf)) b.compose_rule(f.id, g.id, gf);
    }
  return b.build();
}

// ---- builder ---------------------------------------------------------------

FinCategoryBuilder::FinCategoryBuilder(std::string name) : name_(std::move(name)) {}

FinCategoryBuilder& FinCategoryBuilder::object(const std::string& obj) {
  objects_.push_back(obj);
  return *this;
}

FinCategoryBuilder& FinCategoryBuilder::arrow(const std::string& id, const std::string& src, const std::string& tgt) {
  arrows_.push_back({id, src, tgt});
  return *this;
}

FinCategoryBuilder& FinCategoryBuilder::compose_rule(const std::string& g, const std::string& f, const std::string& gf) {
  rules_.push_back({g, f, gf});
  return *this;
}

FinCategory FinCategoryBuilder::build() {
  FinCategory c;
  c.name_ = name_;
  c.objects_ = objects_;
  for (std::size_t i = 0; i < objects_.size(); ++i) {
    if (!c.obj_index_.emplace(objects_[i], static_cast<int>(i)).second)
      fail(Err::validation, "duplicate object '" + objects_[i] + "'");
  }
  // identities first, then declared arrows
  for (const auto& o : objects_) c.arrows_.push_back({"id_" + o, o, o});
  for (const auto& a : arrows_) {
    if (!c.obj_index_.count(a.src) || !c.obj_index_.count(a.tgt))
      fail(Err::unknown_object, "arrow '" + a.id + "' references an unknown object");
    c.arrows_.push_back(a);
  }
  for (std::size_t i = 0; i < c.arrows_.size(); ++i)
    if (!c.arrow_index_.emplace(c.arrows_[i].id, static_cast<int>(i)).second)
      fail(Err::validation, "duplicate arrow id '" + c.arrows_[i].id + "'");
  c.identity_.resize(objects_.size());
  for (std::size_t i = 0; i < objects_.size(); ++i) c.identity_[i] = c.arrow_index_.at("id_" + objects_[i]);
  c.comp_.assign(c.arrows_.size(), std::vector<int>(c.arrows_.size(), -1));
  auto set_entry = [&](int g, int f, int gf) { c.comp_[static_cast<std::size_t>(g)][static_cast<std::size_t>(f)] = gf; };
  // identity composites
  for (std::size_t i = 0; i < c.arrows_.size(); ++i) {
    const Arrow& a = c.arrows_[i];
    int ai = static_cast<int>(i);
    set_entry(c.identity_[static_cast<std::size_t>(c.obj_index_.at(a.tgt))], ai, ai);
    set_entry(ai, c.identity_[static_cast<std::size_t>(c.obj_index_.at(a.src))], ai);
  }
  for (const auto& r : rules_) {
    for (const auto& id : r)
      if (!c.arrow_index_.count(id)) fail(Err::unknown_arrow, "composition rule references unknown arrow '" + id + "'");
    const Arrow& g = c.arrows_[static_cast<std::size_t>(c.arrow_index_.at(r[0]))];
    const Arrow& f = c.arrows_[static_cast<std::size_t>(c.arrow_index_.at(r[1]))];
    if (f.tgt != g.src) fail(Err::validation, "composition rule for non-composable pair " + r[0] + " after " + r[1]);
    set_entry(c.arrow_index_.at(r[0]), c.arrow_index_.at(r[1]), c.arrow_index_.at(r[2]));
  }
  return c;
}

// ---- free category ----------------------------------------------------------

FinCategory free_category(const std::string& name, const std::vector<std::string>& objects,
                          const std::vector<Arrow>& generators, std::size_t arrow_cap) {
  // Arrows are generator paths; composition is concatenation.
  struct Path {
    std::vector<std::string> gens;  // [g, f] means g∘f
    std::string src, tgt;
  };
  auto path_name = [](const Path& p) { return join(p.gens, "."); };
  std::vector<Path> paths;
  std::map<std::string, int> by_name;
  for (const auto& g : generators) {
    Path p{{g.id}, g.src, g.tgt};
    if (!by_name.emplace(path_name(p), static_cast<int>(paths.size())).second)
      fail(Err::validation, "duplicate generator '" + g.id + "'");
    paths.push_back(p);
  }
  bool grew = true;
  while (grew) {
    grew = false;
    std::size_t n = paths.size();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (paths[j].tgt != paths[i].src) continue;
        Path comp;
        comp.gens = paths[i].gens;
        comp.gens.insert(comp.gens.end(), paths[j].gens.begin(), paths[j].gens.end());
        comp.src = paths[j].src;
        comp.tgt = paths[i].tgt;
        std::string nm = path_name(comp);
        if (by_name.count(nm)) continue;
        if (paths.size() >= arrow_cap)
          fail(Err::cyclic_model, "free category saturation does not terminate (cycle through '" + nm + "')");
        by_name.emplace(nm, static_cast<int>(paths.size()));
        paths.push_back(comp);
        grew = true;
      }
  }
  FinCategoryBuilder b(name);
  for (const auto& o : objects) b.object(o);
  for (const auto& p : paths) b.arrow(path_name(p), p.src, p.tgt);
  for (const auto& pi : paths)
    for (const auto& pj : paths) {
      if (pj.tgt != pi.src) continue;
      Path comp;
      comp.gens = pi.gens;
      comp.gens.insert(comp.gens.end(), pj.gens.begin(), pj.gens.end());
      b.compose_rule(path_name(pi), path_name(pj), join(comp.gens, "."));
    }
  return b.build();
}

// ---- stock categories --------------------------------------------------------

FinCategory one_object_category() { return FinCategoryBuilder("1").object("*").build(); }

FinCategory discrete_category(const std::string& name, const std::vector<std::string>& objects) {
  FinCategoryBuilder b(name);
  for (const auto& o : objects) b.object(o);
  return b.build();
}

FinCategory interval_category(const std::string& src, const std::string& tgt, const std::string& arrow) {
  return FinCategoryBuilder("interval").object(src).object(tgt).arrow(arrow, src, tgt).build();
}

const FinCategory& interval_base() {
  static const FinCategory c = interval_category("b", "a", "u");
  return c;
}

FinCategory parallel_pair_category() {
  return FinCategoryBuilder("parallel").object("x").object("y").arrow("f", "x", "y").arrow("g", "x", "y").build();
}

FinCategory cospan_category() {
  return FinCategoryBuilder("cospan").object("x").object("y").object("z").arrow("f", "x", "z").arrow("g", "y", "z").build();
}

FinCategory span_category() {
  return FinCategoryBuilder("span").object("x").object("y").object("z").arrow("f", "z", "x").arrow("g", "z", "y").build();
}

FinCategory chain3_category() {
  return FinCategoryBuilder("chain3")
      .object("a")
      .object("b")
      .object("c")
      .arrow("f", "a", "b")
      .arrow("g", "b", "c")
      .arrow("g.f", "a", "c")
      .compose_rule("g", "f", "g.f")
      .build();
}

FinCategory poset_square_category() {
  // opens of the discrete two-point space: o (empty), u, v, x (whole)
  return FinCategoryBuilder("opens2")
      .object("o")
      .object("u")
      .object("v")
      .object("x")
      .arrow("ou", "o", "u")
      .arrow("ov", "o", "v")
      .arrow("ux", "u", "x")
      .arrow("vx", "v", "x")
      .arrow("ox", "o", "x")
      .compose_rule("ux", "ou", "ox")
      .compose_rule("vx", "ov", "ox")
      .build();
}

// ---- SetDiagram ---------------------------------------------------------------

SetDiagram::SetDiagram(FinCategory shape, std::map<std::string, FinSet> objects,
                       std::map<std::string, FinFunction> arrows)
    : shape_(std::move(shape)), objects_(std::move(objects)), arrows_(std::move(arrows)) {
  // identities are implicit; fill any the caller omitted
  for (const auto& obj : shape_.objects()) {
    auto it = objects_.find(obj);
    if (it == objects_.end()) fail(Err::invalid_shape, "diagram missing carrier for object '" + obj + "'");
    const std::string& idarr = shape_.identity_of(obj);
    if (!arrows_.count(idarr)) arrows_.emplace(idarr, FinFunction::identity(it->second));
  }
}

const FinSet& SetDiagram::at(const std::string& obj) const {
  auto it = objects_.find(obj);
  if (it == objects_.end()) fail(Err::unknown_object, "diagram has no carrier for '" + obj + "'");
  return it->second;
}

const FinFunction& SetDiagram::on(const std::string& arrow_id) const {
  auto it = arrows_.find(arrow_id);
  if (it == arrows_.end()) fail(Err::unknown_arrow, "diagram has no function for arrow '" + arrow_id + "'");
  return it->second;
}

SetDiagram::Report SetDiagram::validate() const {
  auto shape_rep = shape_.validate();
  if (!shape_rep.ok()) fail(Err::invalid_shape, "diagram shape fails category axioms: " + shape_rep.violations.front());
  Report rep;
  for (const auto& a : shape_.arrows()) {
    auto it = arrows_.find(a.id);
    if (it == arrows_.end()) {
      rep.violations.push_back("missing function for arrow " + a.id);
      continue;
    }
    if (!it->second.dom().same_elements(at(a.src)) || !it->second.cod().same_elements(at(a.tgt)))
      rep.violations.push_back("function for " + a.id + " does not match its endpoints");
  }
  if (!rep.ok()) return rep;
  for (const auto& obj : shape_.objects())
    if (!(on(shape_.identity_of(obj)) == FinFunction::identity(at(obj))))
      rep.violations.push_back("functoriality: id_" + obj + " is not mapped to the identity");
  for (const auto& g : shape_.arrows())
    for (const auto& f : shape_.arrows()) {
      if (f.tgt != g.src) continue;
      const std::string& gf = shape_.compose_ids(g.id, f.id);
      if (!(on(gf) == compose(on(g.id), on(f.id))))
        rep.violations.push_back("functoriality: image of " + gf + " differs from composite " + g.id + " after " + f.id);
    }
  return rep;
}

// ---- cones ---------------------------------------------------------------------

bool Cone::commutes() const {
  for (const auto& obj : diagram.shape().objects()) {
    auto it = legs.find(obj);
    if (it == legs.end()) return false;
    if (direction == ConeDirection::over) {
      if (!it->second.dom().same_elements(apex) || !it->second.cod().same_elements(diagram.at(obj))) return false;
    } else {
      if (!it->second.dom().same_elements(diagram.at(obj)) || !it->second.cod().same_elements(apex)) return false;
    }
  }
  for (const auto& a : diagram.shape().arrows()) {
    if (direction == ConeDirection::over) {
      if (!(compose(diagram.on(a.id), legs.at(a.src)) == legs.at(a.tgt))) return false;
    } else {
      if (!(compose(legs.at(a.tgt), diagram.on(a.id)) == legs.at(a.src))) return false;
    }
  }
  return true;
}

bool NatTransformation::natural() const {
  if (!(source.shape().objects() == target.shape().objects())) return false;
  for (const auto& obj : source.shape().objects()) {
    auto it = components.find(obj);
    if (it == components.end()) return false;
    if (!it->second.dom().same_elements(source.at(obj)) || !it->second.cod().same_elements(target.at(obj)))
      return false;
  }
  for (const auto& a : source.shape().arrows())
    if (!(compose(components.at(a.tgt), source.on(a.id)) == compose(target.on(a.id), components.at(a.src))))
      return false;
  return true;
}

Cone limit(const SetDiagram& d, const Limits& lim) {
  auto rep = d.validate();
  if (!rep.ok()) fail(Err::invalid_shape, "limit of an invalid diagram: " + rep.violations.front());
  const auto& objs = d.shape().objects();
  std::size_t total = 1;
  for (const auto& o : objs) {
    std::size_t n = d.at(o).size();
    if (n == 0) {
      total = 0;
      break;
    }
    if (total > lim.max_enum / n) fail(Err::size_limit, "limit tuple space exceeds enumeration cap");
    total *= n;
  }
  // precompute, per arrow, the positions of its endpoints and its table
  struct Constraint {
    std::size_t src, tgt;
    const FinFunction* fn;
  };
  std::vector<Constraint> constraints;
  for (const auto& a : d.shape().arrows()) {
    std::size_t si = static_cast<std::size_t>(std::find(objs.begin(), objs.end(), a.src) - objs.begin());
    std::size_t ti = static_cast<std::size_t>(std::find(objs.begin(), objs.end(), a.tgt) - objs.begin());
    constraints.push_back({si, ti, &d.on(a.id)});
  }
  std::vector<std::string> elems;
  std::vector<std::vector<int>> proj(objs.size());
  if (total > 0) {
    std::vector<std::size_t> odo(objs.size(), 0);
    for (std::size_t n = 0;; ++n) {
      bool compatible = true;
      for (const auto& con : constraints) {
        if (con.fn->apply_index(static_cast<int>(odo[con.src])) != static_cast<int>(odo[con.tgt])) {
          compatible = false;
          break;
        }
      }
      if (compatible) {
        std::vector<std::string> parts;
        for (std::size_t k = 0; k < objs.size(); ++k) {
          parts.push_back(d.at(objs[k]).at(odo[k]));
          proj[k].push_back(static_cast<int>(odo[k]));
        }
        elems.push_back(tuple_atom(parts));
      }
      if (n + 1 >= total) break;
      for (std::size_t k = objs.size(); k-- > 0;) {
        if (++odo[k] < d.at(objs[k]).size()) break;
        odo[k] = 0;
      }
    }
  } else if (objs.empty()) {
    elems.push_back(tuple_atom({}));  // empty diagram: terminal singleton
  }
  Cone cone;
  cone.diagram = d;
  cone.direction = ConeDirection::over;
  cone.apex = FinSet("lim", std::move(elems));
  for (std::size_t k = 0; k < objs.size(); ++k)
    cone.legs.emplace(objs[k], FinFunction(cone.apex, d.at(objs[k]), std::move(proj[k])));
  return cone;
}

Cone colimit(const SetDiagram& d) {
  auto rep = d.validate();
  if (!rep.ok()) fail(Err::invalid_shape, "colimit of an invalid diagram: " + rep.violations.front());
  const auto& objs = d.shape().objects();
  std::vector<std::string> tagged;
  std::vector<std::size_t> offset(objs.size(), 0);
  for (std::size_t k = 0; k < objs.size(); ++k) {
    offset[k] = tagged.size();
    for (const auto& e : d.at(objs[k]).elements()) tagged.push_back(objs[k] + ":" + e);
  }
  std::vector<int> parent(tagged.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
  std::function<int(int)> find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    return x;
  };
  auto unite = [&](int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  };
  for (const auto& a : d.shape().arrows()) {
    std::size_t si = static_cast<std::size_t>(std::find(objs.begin(), objs.end(), a.src) - objs.begin());
    std::size_t ti = static_cast<std::size_t>(std::find(objs.begin(), objs.end(), a.tgt) - objs.begin());
    for (std::size_t i = 0; i < d.at(a.src).size(); ++i)
      unite(static_cast<int>(offset[si] + i),
            static_cast<int>(offset[ti] + static_cast<std::size_t>(d.on(a.id).apply_index(static_cast<int>(i)))));
  }
  std::vector<int> reps;
  std::vector<int> class_of(tagged.size(), -1);
  for (std::size_t i = 0; i < tagged.size(); ++i) {
    int r = find(static_cast<int>(i));
    if (class_of[static_cast<std::size_t>(r)] < 0) {
      class_of[static_cast<std::size_t>(r)] = static_cast<int>(reps.size());
      reps.push_back(r);
    }
  }
  std::vector<std::string> elems;
  for (int r : reps) elems.push_back("q:" + tagged[static_cast<std::size_t>(r)]);
  Cone cone;
  cone.diagram = d;
  cone.direction = ConeDirection::under;
  cone.apex = FinSet("colim", std::move(elems));
  for (std::size_t k = 0; k < objs.size(); ++k) {
    std::vector<int> t;
    t.reserve(d.at(objs[k]).size());
    for (std::size_t i = 0; i < d.at(objs[k]).size(); ++i)
      t.push_back(class_of[static_cast<std::size_t>(find(static_cast<int>(offset[k] + i)))]);
    cone.legs.emplace(objs[k], FinFunction(d.at(objs[k]), cone.apex, std::move(t)));
  }
  return cone;
}

namespace {

bool diagrams_equal(const SetDiagram& a, const SetDiagram& b) {
  if (a.shape().objects() != b.shape().objects()) return false;
  for (const auto& o : a.shape().objects())
    if (!a.at(o).same_elements(b.at(o))) return false;
  for (const auto& ar : a.shape().arrows()) {
    if (!b.shape().has_arrow(ar.id)) return false;
    if (!(a.on(ar.id) == b.on(ar.id))) return false;
  }
  return true;
}

}  // namespace

std::size_t mediator_count(const Cone& universal, const Cone& candidate) {
  const auto& objs = universal.diagram.shape().objects();
  if (universal.direction == ConeDirection::over) {
    std::size_t count = 1;
    for (const auto& z : candidate.apex.elements()) {
      std::size_t fiber = 0;
      for (const auto& w : universal.apex.elements()) {
        bool match = true;
        for (const auto& o : objs)
          if (universal.legs.at(o)(w) != candidate.legs.at(o)(z)) {
            match = false;
            break;
          }
        if (match) ++fiber;
      }
      count *= fiber;
      if (count == 0) return 0;
    }
    return count;
  }
  // under: assignments on the images are forced; off-image classes are free
  std::vector<int> forced(universal.apex.size(), -1);
  for (const auto& o : objs) {
    const FinFunction& lu = universal.legs.at(o);
    const FinFunction& lc = candidate.legs.at(o);
    for (std::size_t i = 0; i < lu.dom().size(); ++i) {
      int tgt = lu.apply_index(static_cast<int>(i));
      int want = lc.apply_index(static_cast<int>(i));
      if (forced[static_cast<std::size_t>(tgt)] >= 0 && forced[static_cast<std::size_t>(tgt)] != want) return 0;
      forced[static_cast<std::size_t>(tgt)] = want;
    }
  }
  std::size_t count = 1;
  for (int v : forced)
    if (v < 0) count *= candidate.apex.size();
  return count;
}

FinFunction mediating_morphism(const Cone& universal, const Cone& candidate) {
  if (universal.direction != candidate.direction)
    fail(Err::not_a_cone, "mediating_morphism requires cones of the same direction");
  if (!diagrams_equal(universal.diagram, candidate.diagram))
    fail(Err::not_a_cone, "mediating_morphism requires cones over the same diagram");
  if (!universal.commutes() || !candidate.commutes())
    fail(Err::not_a_cone, "legs do not commute with the diagram");
  const auto& objs = universal.diagram.shape().objects();
  if (universal.direction == ConeDirection::over) {
    std::vector<int> t;
    t.reserve(candidate.apex.size());
    for (const auto& z : candidate.apex.elements()) {
      int found = -1;
      for (std::size_t wi = 0; wi < universal.apex.size(); ++wi) {
        bool match = true;
        for (const auto& o : objs)
          if (universal.legs.at(o)(universal.apex.at(wi)) != candidate.legs.at(o)(z)) {
            match = false;
            break;
          }
        if (match) {
          if (found >= 0) fail(Err::no_factorization, "ambiguous factorization through the given cone");
          found = static_cast<int>(wi);
        }
      }
      if (found < 0) fail(Err::no_factorization, "no factorization for apex element '" + z + "'");
      t.push_back(found);
    }
    return FinFunction(candidate.apex, universal.apex, std::move(t));
  }
  std::vector<int> t(universal.apex.size(), -1);
  for (const auto& o : objs) {
    const FinFunction& lu = universal.legs.at(o);
    const FinFunction& lc = candidate.legs.at(o);
    for (std::size_t i = 0; i < lu.dom().size(); ++i) {
      int tgt = lu.apply_index(static_cast<int>(i));
      int want = lc.apply_index(static_cast<int>(i));
      if (t[static_cast<std::size_t>(tgt)] >= 0 && t[static_cast<std::size_t>(tgt)] != want)
        fail(Err::no_factorization, "no factorization: conflicting leg images");
      t[static_cast<std::size_t>(tgt)] = want;
    }
  }
  for (int& v : t) {
    if (v < 0) {
      if (candidate.apex.size() != 1)
        fail(Err::no_factorization, "ambiguous factorization: nadir element not covered by any leg");
      v = 0;
    }
  }
  return FinFunction(universal.apex, candidate.apex, std::move(t));
}

namespace {

// All tables dom_size -> {0..cod_size-1} in odometer order; {} when the
// space is empty (nonempty domain, empty codomain).
std::vector<std::vector<int>> all_tables(std::size_t dom_size, std::size_t cod_size, const Limits& lim) {
  std::vector<std::vector<int>> out;
  if (dom_size == 0) {
    out.push_back({});
    return out;
  }
  if (cod_size == 0) return out;
  double count = std::pow(static_cast<double>(cod_size), static_cast<double>(dom_size));
  if (count > static_cast<double>(lim.max_enum)) fail(Err::size_limit, "function space exceeds enumeration cap");
  std::vector<int> t(dom_size, 0);
  while (true) {
    out.push_back(t);
    std::size_t k = dom_size;
    while (k-- > 0) {
      if (++t[k] < static_cast<int>(cod_size)) break;
      t[k] = 0;
      if (k == 0) return out;
    }
  }
}

}  // namespace

bool is_universal_cone(const Cone& c, const Limits& lim) {
  if (!c.commutes()) fail(Err::not_a_cone, "is_universal_cone: input legs do not commute");
  const auto& objs = c.diagram.shape().objects();
  const std::size_t nobj = objs.size();
  const bool over = c.direction == ConeDirection::over;

  // flatten the diagram: carriers, arrows and the universal legs as raw tables
  std::vector<std::size_t> carrier_size(nobj);
  std::vector<const std::vector<int>*> uni_legs(nobj);
  for (std::size_t k = 0; k < nobj; ++k) {
    carrier_size[k] = c.diagram.at(objs[k]).size();
    uni_legs[k] = &c.legs.at(objs[k]).table();
  }
  struct FlatArrow {
    std::size_t src, tgt;
    const std::vector<int>* table;
  };
  std::vector<FlatArrow> arrows;
  for (const auto& a : c.diagram.shape().arrows()) {
    std::size_t si = static_cast<std::size_t>(std::find(objs.begin(), objs.end(), a.src) - objs.begin());
    std::size_t ti = static_cast<std::size_t>(std::find(objs.begin(), objs.end(), a.tgt) - objs.begin());
    arrows.push_back({si, ti, &c.diagram.on(a.id).table()});
  }
  const std::size_t uni_size = c.apex.size();

  for (std::size_t size = 0; size <= lim.apex_bound; ++size) {
    std::vector<std::vector<std::vector<int>>> choices(nobj);
    bool impossible = false;
    for (std::size_t k = 0; k < nobj; ++k) {
      choices[k] = over ? all_tables(size, carrier_size[k], lim) : all_tables(carrier_size[k], size, lim);
      if (choices[k].empty()) impossible = true;
    }
    if (impossible) continue;  // no candidate cone with this apex

    std::vector<std::size_t> odo(nobj, 0);
    std::vector<const std::vector<int>*> legs(nobj);
    std::vector<int> forced(uni_size);
    while (true) {
      for (std::size_t k = 0; k < nobj; ++k) legs[k] = &choices[k][odo[k]];
      // cone condition
      bool commutes = true;
      for (const auto& a : arrows) {
        if (over) {
          // D(a) ∘ leg_src = leg_tgt on the candidate apex
          for (std::size_t z = 0; z < size && commutes; ++z)
            commutes = (*a.table)[static_cast<std::size_t>((*legs[a.src])[z])] == (*legs[a.tgt])[z];
        } else {
          // leg_tgt ∘ D(a) = leg_src on the carrier
          for (std::size_t x = 0; x < carrier_size[a.src] && commutes; ++x)
            commutes = (*legs[a.tgt])[static_cast<std::size_t>((*a.table)[x])] == (*legs[a.src])[x];
        }
        if (!commutes) break;
      }
      if (commutes) {
        // mediator count must be exactly one
        if (over) {
          for (std::size_t z = 0; z < size; ++z) {
            std::size_t fiber = 0;
            for (std::size_t w = 0; w < uni_size; ++w) {
              bool match = true;
              for (std::size_t k = 0; k < nobj && match; ++k)
                match = (*uni_legs[k])[w] == (*legs[k])[z];
              if (match && ++fiber > 1) break;
            }
            if (fiber != 1) return false;
          }
        } else {
          std::fill(forced.begin(), forced.end(), -1);
          bool consistent = true;
          for (std::size_t k = 0; k < nobj && consistent; ++k)
            for (std::size_t x = 0; x < carrier_size[k]; ++x) {
              int tgt = (*uni_legs[k])[x];
              int want = (*legs[k])[x];
              if (forced[static_cast<std::size_t>(tgt)] >= 0 && forced[static_cast<std::size_t>(tgt)] != want) {
                consistent = false;
                break;
              }
              forced[static_cast<std::size_t>(tgt)] = want;
            }
          if (!consistent) return false;  // zero mediators
          for (int v : forced)
            if (v < 0 && size != 1) return false;  // uncovered nadir element: 0 or many
        }
      }
      std::size_t k = nobj;
      bool done = nobj == 0;
      while (k-- > 0) {
        if (++odo[k] < choices[k].size()) break;
        odo[k] = 0;
        if (k == 0) done = true;
      }
      if (done) break;
    }
  }
  return true;
}

// ---- diagram constructors -------------------------------------------------------

SetDiagram cospan_diagram(const FinFunction& f, const FinFunction& g) {
  if (!f.cod().same_elements(g.cod())) fail(Err::codomain_mismatch, "cospan needs a shared codomain");
  return SetDiagram(cospan_category(), {{"x", f.dom()}, {"y", g.dom()}, {"z", f.cod()}},
                    {{"f", f}, {"g", g}});
}

SetDiagram span_diagram(const FinFunction& f, const FinFunction& g) {
  if (!f.dom().same_elements(g.dom())) fail(Err::domain_mismatch, "span needs a shared domain");
  return SetDiagram(span_category(), {{"x", f.cod()}, {"y", g.cod()}, {"z", f.dom()}},
                    {{"f", f}, {"g", g}});
}

SetDiagram parallel_diagram(const FinFunction& f, const FinFunction& g) {
  if (!f.dom().same_elements(g.dom()) || !f.cod().same_elements(g.cod()))
    fail(Err::not_parallel, "parallel diagram needs parallel functions");
  return SetDiagram(parallel_pair_category(), {{"x", f.dom()}, {"y", f.cod()}}, {{"f", f}, {"g", g}});
}

SetDiagram discrete_diagram(const std::vector<FinSet>& sets) {
  std::vector<std::string> objs;
  std::map<std::string, FinSet> carriers;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    objs.push_back("d" + std::to_string(i));
    carriers.emplace(objs.back(), sets[i]);
  }
  return SetDiagram(discrete_category("discrete" + std::to_string(sets.size()), objs), carriers, {});
}

}  // namespace tcm
