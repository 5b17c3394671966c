#pragma once

// Isolation graphs over a lattice of modular curves above one j-invariant.
//
// A vertex is a closed point. An edge x -> y means "x isolated implies y
// isolated" and comes from an inclusion morphism f : X_H -> X_H' of degree d:
//   pullback     x -> f(x)   when deg x = d * deg f(x)
//   pushforward  f(x) -> x   when deg x = deg f(x)
// Only maximal inclusions are used. The quotient graph identifies points that
// differ by a conjugation isomorphism; its vertices are pairs (R, N_R g G)
// with R a class representative and N_R its normalizer.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "modcurve/curves.hpp"
#include "modcurve/gl_index.hpp"
#include "modcurve/group.hpp"
#include "modcurve/lattice.hpp"
#include "modcurve/parallel.hpp"
#include "modcurve/rational.hpp"

namespace modcurve {

enum EdgeKind : std::uint8_t { kPullback = 1, kPushforward = 2 };

// Dedupe keeps one edge per ordered vertex pair and records the union of
// kinds; Multi keeps one edge per (inclusion, point) witness.
enum class EdgeMode { Dedupe, Multi };

inline const char* to_string(EdgeMode mode) { return mode == EdgeMode::Dedupe ? "dedupe" : "multi"; }

struct Vertex {
  std::size_t subgroup_id = 0;  // lattice index
  MatrixGroup subgroup;
  ZMatrix coset_key;  // minimal representative of H g G (full) or N_H g G (quotient)
  std::size_t degree = 1;
  std::size_t components = 1;
  std::size_t genus = 0;
  std::size_t multiplicity = 1;  // points of X_H merged into this vertex
};

struct Edge {
  std::size_t source = 0;
  std::size_t target = 0;
  std::uint8_t kinds = 0;
  Inclusion via{};  // (H, H') of the first witnessing inclusion
};

struct IsolationGraph {
  Modulus level = 1;
  Rational j_invariant;
  bool quotient = false;
  EdgeMode mode = EdgeMode::Dedupe;
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;  // sorted by (source, target)
  std::vector<bool> pruned;

  std::size_t pruned_count() const { return static_cast<std::size_t>(std::count(pruned.begin(), pruned.end(), true)); }
};

struct GraphOptions {
  EdgeMode mode = EdgeMode::Dedupe;
  unsigned jobs = 1;
  Rational j_invariant = 0;
  std::size_t j_field_degree = 1;
};

namespace detail {

// Closed points of every lattice subgroup: double-coset labels over GLIndex
// and the degree of each coset.
struct PointTables {
  std::shared_ptr<const GLIndex> space;
  std::vector<std::vector<std::uint32_t>> label;         // [subgroup][element]
  std::vector<std::vector<ElementIndex>> representative;  // [subgroup][coset]
  std::vector<std::vector<std::size_t>> degree;           // [subgroup][coset]
  std::vector<CurveInvariants> invariants;                // [subgroup]
};

inline std::vector<ElementIndex> indices_of(const GLIndex& space, const MatrixGroup& h) {
  return to_indices(space, h);
}

inline std::size_t indexed_point_degree(const GLIndex& space, const ElementSet& h, const std::vector<ElementIndex>& g,
                                        const std::vector<ElementIndex>& a, ElementIndex x) {
  const ElementIndex x_inv = space.inverse(x);
  std::size_t stabilizer = 0;
  for (ElementIndex y : g) {
    for (ElementIndex z : a) {
      if (h.contains(space.mul(space.mul(x, space.mul(z, y)), x_inv))) {
        ++stabilizer;
        break;
      }
    }
  }
  return g.size() / stabilizer;
}

inline PointTables point_tables(const SubgroupLattice& lattice, const MatrixGroup& g, const MatrixGroup& a,
                                const GraphOptions& options) {
  check_automorphism_group(g, a);
  PointTables t;
  t.space = gl_index(lattice.modulus());
  const GLIndex& space = *t.space;
  const std::size_t count = lattice.size();
  t.label.resize(count);
  t.representative.resize(count);
  t.degree.resize(count);
  t.invariants.resize(count);
  const auto gs = indices_of(space, g);
  const auto as = indices_of(space, a);
  parallel_for(count, options.jobs, [&](std::size_t s) {
    const MatrixGroup& h = lattice.subgroup(s);
    if (h.modulus() != g.modulus()) throw ModulusMismatch(h.modulus(), g.modulus());
    auto part = double_coset_partition(h, g);
    ElementSet members(space.size());
    for (ElementIndex i : indices_of(space, h)) members.insert(i);
    for (const auto& c : part.cosets) {
      const ElementIndex x = space.index_of(c.representative);
      t.representative[s].push_back(x);
      t.degree[s].push_back(options.j_field_degree * indexed_point_degree(space, members, gs, as, x));
    }
    t.label[s] = std::move(part.label);
    t.invariants[s] = genus(h);
  });
  return t;
}

class EdgeCollector {
 public:
  explicit EdgeCollector(EdgeMode mode) : mode_(mode) {}

  void add(std::size_t source, std::size_t target, std::uint8_t kind, Inclusion via) {
    edges_.push_back({source, target, kind, via});
  }

  // Sorted by (source, target, via, kinds) so the result is independent of
  // the order in which edges were discovered.
  std::vector<Edge> finish() {
    std::sort(edges_.begin(), edges_.end(), [](const Edge& x, const Edge& y) {
      return std::tie(x.source, x.target, x.via, x.kinds) < std::tie(y.source, y.target, y.via, y.kinds);
    });
    if (mode_ == EdgeMode::Multi) return std::move(edges_);
    std::vector<Edge> out;
    for (const Edge& e : edges_) {
      if (!out.empty() && out.back().source == e.source && out.back().target == e.target) {
        out.back().kinds |= e.kinds;
      } else {
        out.push_back(e);
      }
    }
    return out;
  }

  void append(const EdgeCollector& other) { edges_.insert(edges_.end(), other.edges_.begin(), other.edges_.end()); }

 private:
  EdgeMode mode_;
  std::vector<Edge> edges_;
};

inline Vertex make_vertex(const SubgroupLattice& lattice, const PointTables& t, std::size_t s, ElementIndex key,
                          std::size_t degree, std::size_t multiplicity) {
  Vertex v;
  v.subgroup_id = s;
  v.subgroup = lattice.subgroup(s);
  v.coset_key = t.space->element(key);
  v.degree = degree;
  v.components = t.invariants[s].components;
  v.genus = t.invariants[s].genus;
  v.multiplicity = multiplicity;
  return v;
}

inline std::size_t inclusion_degree_in(const SubgroupLattice& lattice, Inclusion inc) {
  return lattice.subgroup(inc.second).order() / lattice.subgroup(inc.first).order();
}

}  // namespace detail

inline IsolationGraph build_full_graph(const SubgroupLattice& lattice, const MatrixGroup& g, const MatrixGroup& a,
                                       const GraphOptions& options = {}) {
  const auto t = detail::point_tables(lattice, g, a, options);
  IsolationGraph graph;
  graph.level = lattice.modulus();
  graph.j_invariant = options.j_invariant;
  graph.mode = options.mode;

  std::vector<std::size_t> offset(lattice.size() + 1, 0);
  for (std::size_t s = 0; s < lattice.size(); ++s) offset[s + 1] = offset[s] + t.representative[s].size();
  graph.vertices.reserve(offset.back());
  for (std::size_t s = 0; s < lattice.size(); ++s) {
    for (std::size_t c = 0; c < t.representative[s].size(); ++c) {
      graph.vertices.push_back(detail::make_vertex(lattice, t, s, t.representative[s][c], t.degree[s][c], 1));
    }
  }

  const auto& inclusions = lattice.maximal_inclusions();
  std::vector<detail::EdgeCollector> found(inclusions.size(), detail::EdgeCollector(options.mode));
  parallel_for(inclusions.size(), options.jobs, [&](std::size_t k) {
    const auto [sub, super] = inclusions[k];
    const std::size_t d = detail::inclusion_degree_in(lattice, inclusions[k]);
    for (std::size_t c = 0; c < t.representative[sub].size(); ++c) {
      const std::size_t image = t.label[super][t.representative[sub][c]];
      const std::size_t p = offset[sub] + c;
      const std::size_t q = offset[super] + image;
      const std::size_t deg_p = t.degree[sub][c];
      const std::size_t deg_q = t.degree[super][image];
      if (deg_p == d * deg_q) found[k].add(p, q, kPullback, inclusions[k]);
      if (deg_p == deg_q) found[k].add(q, p, kPushforward, inclusions[k]);
    }
  });
  detail::EdgeCollector all(options.mode);
  for (const auto& f : found) all.append(f);
  graph.edges = all.finish();
  graph.pruned.assign(graph.vertices.size(), false);
  return graph;
}

// Maps closed points (subgroup, element) to quotient-graph vertices.
class QuotientProjector {
 public:
  QuotientProjector(const SubgroupLattice& lattice, const MatrixGroup& g, unsigned jobs = 1)
      : lattice_(&lattice), space_(gl_index(lattice.modulus())) {
    const auto& classes = lattice.classes();
    label_.resize(classes.size());
    representative_.resize(classes.size());
    parallel_for(classes.size(), jobs, [&](std::size_t c) {
      auto part = double_coset_partition(classes[c].normalizer, g);
      for (const auto& coset : part.cosets) representative_[c].push_back(space_->index_of(coset.representative));
      label_[c] = std::move(part.label);
    });
    offset_.assign(classes.size() + 1, 0);
    for (std::size_t c = 0; c < classes.size(); ++c) offset_[c + 1] = offset_[c] + representative_[c].size();
    conjugator_inverse_.resize(lattice.size());
    for (std::size_t s = 0; s < lattice.size(); ++s) {
      conjugator_inverse_[s] = space_->inverse(space_->index_of(lattice.conjugator(s)));
    }
  }

  std::size_t vertex_count() const { return offset_.back(); }
  std::size_t class_offset(std::size_t c) const { return offset_[c]; }
  const std::vector<ElementIndex>& representatives(std::size_t c) const { return representative_[c]; }

  // Vertex of the point (H_s, H_s x G): conjugate by c^-1 where c R c^-1 = H_s.
  std::size_t project(std::size_t s, ElementIndex x) const {
    return project_with(s, conjugator_inverse_[s], x);
  }

  // Same, with an explicit c^-1; any conjugator onto H_s must give the same vertex.
  std::size_t project_with(std::size_t s, ElementIndex c_inv, ElementIndex x) const {
    const std::size_t cls = lattice_->class_of(s);
    return offset_[cls] + label_[cls][space_->mul(c_inv, x)];
  }

 private:
  const SubgroupLattice* lattice_;
  std::shared_ptr<const GLIndex> space_;
  std::vector<std::vector<std::uint32_t>> label_;
  std::vector<std::vector<ElementIndex>> representative_;
  std::vector<std::size_t> offset_;
  std::vector<ElementIndex> conjugator_inverse_;
};

inline IsolationGraph build_quotient_graph(const SubgroupLattice& lattice, const MatrixGroup& g, const MatrixGroup& a,
                                           const GraphOptions& options = {}) {
  const auto t = detail::point_tables(lattice, g, a, options);
  const QuotientProjector proj(lattice, g, options.jobs);
  const GLIndex& space = *t.space;
  const auto& classes = lattice.classes();

  IsolationGraph graph;
  graph.level = lattice.modulus();
  graph.j_invariant = options.j_invariant;
  graph.quotient = true;
  graph.mode = options.mode;
  graph.vertices.reserve(proj.vertex_count());
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const std::size_t r = classes[c].representative;
    std::vector<std::size_t> multiplicity(proj.representatives(c).size(), 0);
    for (ElementIndex x : t.representative[r]) ++multiplicity[proj.project(r, x) - proj.class_offset(c)];
    for (std::size_t k = 0; k < proj.representatives(c).size(); ++k) {
      const ElementIndex key = proj.representatives(c)[k];
      const std::size_t degree = t.degree[r][t.label[r][key]];
      graph.vertices.push_back(detail::make_vertex(lattice, t, r, key, degree, multiplicity[k]));
    }
  }

  std::vector<detail::EdgeCollector> found(graph.vertices.size(), detail::EdgeCollector(options.mode));
  parallel_for(graph.vertices.size(), options.jobs, [&](std::size_t v) {
    const std::size_t r = graph.vertices[v].subgroup_id;
    const ElementIndex x = space.index_of(graph.vertices[v].coset_key);
    const std::size_t deg_x = graph.vertices[v].degree;
    for (std::size_t super : lattice.maximal_supergroups(r)) {
      const std::size_t d = detail::inclusion_degree_in(lattice, {r, super});
      const std::size_t image = t.label[super][x];
      if (deg_x == d * t.degree[super][image]) found[v].add(v, proj.project(super, x), kPullback, {r, super});
    }
    const std::uint32_t own = t.label[r][x];
    for (std::size_t sub : lattice.maximal_subgroups(r)) {
      for (std::size_t c = 0; c < t.representative[sub].size(); ++c) {
        const ElementIndex y = t.representative[sub][c];
        if (t.label[r][y] != own || t.degree[sub][c] != deg_x) continue;
        found[v].add(v, proj.project(sub, y), kPushforward, {sub, r});
      }
    }
  });
  detail::EdgeCollector all(options.mode);
  for (const auto& f : found) all.append(f);
  graph.edges = all.finish();
  graph.pruned.assign(graph.vertices.size(), false);
  return graph;
}

// A point with deg > r * g is P1-parametrized, hence not isolated.
inline IsolationGraph prune_riemann_roch(IsolationGraph g) {
  g.pruned.assign(g.vertices.size(), false);
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    const Vertex& x = g.vertices[v];
    g.pruned[v] = x.degree > x.components * x.genus;
  }
  return g;
}

// Kahn's algorithm, always taking the smallest available vertex.
inline std::optional<std::vector<std::size_t>> topological_order(const IsolationGraph& g) {
  const std::size_t n = g.vertices.size();
  std::vector<std::size_t> indegree(n, 0);
  std::vector<std::vector<std::size_t>> out(n);
  for (const Edge& e : g.edges) {
    ++indegree[e.target];
    out[e.source].push_back(e.target);
  }
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t v = 0; v < n; ++v)
    if (indegree[v] == 0) ready.push(v);
  std::vector<std::size_t> order;
  order.reserve(n);
  while (!ready.empty()) {
    const std::size_t v = ready.top();
    ready.pop();
    order.push_back(v);
    for (std::size_t w : out[v])
      if (--indegree[w] == 0) ready.push(w);
  }
  if (order.size() != n) return std::nullopt;
  return order;
}

// Longest-path layer of each vertex; requires an acyclic graph.
inline std::optional<std::vector<std::size_t>> topological_layers(const IsolationGraph& g) {
  const auto order = topological_order(g);
  if (!order) return std::nullopt;
  std::vector<std::vector<std::size_t>> out(g.vertices.size());
  for (const Edge& e : g.edges) out[e.source].push_back(e.target);
  std::vector<std::size_t> layer(g.vertices.size(), 0);
  for (std::size_t v : *order)
    for (std::size_t w : out[v]) layer[w] = std::max(layer[w], layer[v] + 1);
  return layer;
}

struct SurvivorReport {
  std::vector<std::size_t> survivors;                // vertex ids, increasing
  std::vector<std::vector<std::size_t>> components;  // weak components of the survivor subgraph
  std::vector<std::size_t> initial;                  // survivors without incoming survivor edges
  bool unique_initial_reaches_all = false;
};

inline SurvivorReport survivors_analysis(const IsolationGraph& g) {
  SurvivorReport report;
  const std::size_t n = g.vertices.size();
  std::vector<bool> alive(n, false);
  for (std::size_t v = 0; v < n; ++v) {
    if (g.pruned.empty() || !g.pruned[v]) {
      alive[v] = true;
      report.survivors.push_back(v);
    }
  }
  if (report.survivors.empty()) return report;

  std::vector<std::vector<std::size_t>> out(n), undirected(n);
  std::vector<bool> has_incoming(n, false);
  for (const Edge& e : g.edges) {
    if (!alive[e.source] || !alive[e.target]) continue;
    out[e.source].push_back(e.target);
    undirected[e.source].push_back(e.target);
    undirected[e.target].push_back(e.source);
    if (e.source != e.target) has_incoming[e.target] = true;
  }
  std::vector<bool> seen(n, false);
  for (std::size_t v : report.survivors) {
    if (!has_incoming[v]) report.initial.push_back(v);
    if (seen[v]) continue;
    std::vector<std::size_t> component, stack{v};
    seen[v] = true;
    while (!stack.empty()) {
      const std::size_t x = stack.back();
      stack.pop_back();
      component.push_back(x);
      for (std::size_t y : undirected[x]) {
        if (!seen[y]) {
          seen[y] = true;
          stack.push_back(y);
        }
      }
    }
    std::sort(component.begin(), component.end());
    report.components.push_back(std::move(component));
  }
  if (report.initial.size() == 1) {
    std::vector<bool> reached(n, false);
    std::vector<std::size_t> stack{report.initial.front()};
    reached[report.initial.front()] = true;
    std::size_t count = 0;
    while (!stack.empty()) {
      const std::size_t x = stack.back();
      stack.pop_back();
      ++count;
      for (std::size_t y : out[x]) {
        if (!reached[y]) {
          reached[y] = true;
          stack.push_back(y);
        }
      }
    }
    report.unique_initial_reaches_all = count == report.survivors.size();
  }
  return report;
}

// Tarjan's algorithm, iterative. Components are numbered by their smallest
// member, so the numbering depends only on the graph.
inline std::vector<std::size_t> strongly_connected_components(const IsolationGraph& g) {
  const std::size_t n = g.vertices.size();
  constexpr std::size_t kUnvisited = ~std::size_t{0};
  std::vector<std::vector<std::size_t>> out(n);
  for (const Edge& e : g.edges) out[e.source].push_back(e.target);
  std::vector<std::size_t> index(n, kUnvisited), low(n, 0), component(n, kUnvisited), stack;
  std::vector<bool> on_stack(n, false);
  std::size_t counter = 0, found = 0;
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    std::vector<std::pair<std::size_t, std::size_t>> call{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      auto& [v, next] = call.back();
      if (next < out[v].size()) {
        const std::size_t w = out[v][next++];
        if (index[w] == kUnvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          component[w] = found;
        } while (w != v);
        ++found;
      }
      const std::size_t done = v;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
    }
  }
  std::vector<std::size_t> first(found, n);
  for (std::size_t v = 0; v < n; ++v) first[component[v]] = std::min(first[component[v]], v);
  std::vector<std::size_t> order(found);
  for (std::size_t c = 0; c < found; ++c) order[c] = c;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return first[x] < first[y]; });
  std::vector<std::size_t> renumber(found);
  for (std::size_t k = 0; k < found; ++k) renumber[order[k]] = k;
  for (auto& c : component) c = renumber[c];
  return component;
}

// Each strongly connected component becomes one vertex, carrying the data of
// its smallest member and the summed multiplicity. A component is pruned if
// any member is: a cycle forces all its points to share isolatedness.
inline IsolationGraph condense_scc(const IsolationGraph& g) {
  const auto component = strongly_connected_components(g);
  const std::size_t count = component.empty() ? 0 : *std::max_element(component.begin(), component.end()) + 1;
  IsolationGraph out;
  out.level = g.level;
  out.j_invariant = g.j_invariant;
  out.quotient = g.quotient;
  out.mode = EdgeMode::Dedupe;
  out.vertices.resize(count);
  out.pruned.assign(count, false);
  std::vector<bool> filled(count, false);
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    const std::size_t c = component[v];
    if (!filled[c]) {
      out.vertices[c] = g.vertices[v];
      filled[c] = true;
    } else {
      out.vertices[c].multiplicity += g.vertices[v].multiplicity;
    }
    if (!g.pruned.empty() && g.pruned[v]) out.pruned[c] = true;
  }
  detail::EdgeCollector edges(EdgeMode::Dedupe);
  for (const Edge& e : g.edges) {
    if (component[e.source] != component[e.target]) edges.add(component[e.source], component[e.target], e.kinds, e.via);
  }
  out.edges = edges.finish();
  return out;
}

namespace detail {

inline const char* genus_color(std::size_t genus) {
  static const char* palette[] = {"#9ecae1", "#a1d99b", "#fdae6b", "#fc9272", "#bcbddc", "#fdd0a2"};
  return palette[std::min<std::size_t>(genus, std::size(palette) - 1)];
}

}  // namespace detail

// Deterministic DOT text. Vertices are grouped into rank rows by topological
// layer, sized by degree and colored by genus; pruned vertices are gray and
// the survivor subgraph is drawn with heavy red outlines.
inline std::string export_dot(const IsolationGraph& g) {
  std::ostringstream out;
  out << "digraph isolation {\n";
  out << "  rankdir=TB;\n";
  out << "  node [shape=circle, style=filled, fontsize=10];\n";
  if (const auto layers = topological_layers(g)) {
    std::map<std::size_t, std::vector<std::size_t>> rows;
    for (std::size_t v = 0; v < g.vertices.size(); ++v) rows[(*layers)[v]].push_back(v);
    for (const auto& [layer, members] : rows) {
      out << "  { rank=same;";
      for (std::size_t v : members) out << " v" << v << ";";
      out << " }\n";
    }
  }
  auto alive = [&](std::size_t v) { return g.pruned.empty() || !g.pruned[v]; };
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    const Vertex& x = g.vertices[v];
    char width[16];
    std::snprintf(width, sizeof width, "%.2f", 0.3 + 0.15 * std::log2(static_cast<double>(x.degree) + 1.0));
    out << "  v" << v << " [label=\"" << x.degree << "\", width=" << width << ", fillcolor=\""
        << (alive(v) ? detail::genus_color(x.genus) : "#d9d9d9") << "\"";
    if (alive(v)) out << ", color=\"#cb181d\", penwidth=3";
    out << ", tooltip=\"H" << x.subgroup_id << " |H|=" << x.subgroup.order() << " g=" << x.genus
        << " r=" << x.components << " n=" << x.multiplicity << "\"];\n";
  }
  for (const Edge& e : g.edges) {
    out << "  v" << e.source << " -> v" << e.target << " [style="
        << (e.kinds == kPushforward ? "dashed" : e.kinds == kPullback ? "solid" : "bold");
    if (alive(e.source) && alive(e.target)) out << ", color=\"#cb181d\"";
    out << "];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace modcurve
