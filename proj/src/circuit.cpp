// Copyright 2026 The circuitbo Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "circuitbo/circuit.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "circuitbo/errors.hpp"

namespace circuitbo::sim {
namespace {

constexpr double kResidualLimit = 1e-9;

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t i) {
    while (parent_[i] != i) i = parent_[i] = parent_[parent_[i]];
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

struct SplitPoint {
  double coordinate;  // distance along a trace axis, or an angle on a ring
  NodeId node;
  Point position;

  bool operator<(const SplitPoint& o) const {
    return coordinate != o.coordinate ? coordinate < o.coordinate : node < o.node;
  }
};

double piece_length(const Edge& e) {
  if (const auto* s = std::get_if<SegmentPiece>(&e.shape)) return distance(s->p0, s->p1);
  if (const auto* a = std::get_if<ArcPiece>(&e.shape)) return a->radius * a->sweep;
  return 0.0;
}

// Nearest point on a trace piece to `target`, as (distance, fraction along
// the piece from endpoint a, position).
struct Nearest {
  double dist = std::numeric_limits<double>::infinity();
  double fraction = 0.0;
  Point position;
};

Nearest nearest_on(const Edge& e, Point target) {
  Nearest out;
  if (const auto* s = std::get_if<SegmentPiece>(&e.shape)) {
    const double dx = s->p1.x - s->p0.x;
    const double dy = s->p1.y - s->p0.y;
    const double len2 = dx * dx + dy * dy;
    double t = ((target.x - s->p0.x) * dx + (target.y - s->p0.y) * dy) / len2;
    t = std::clamp(t, 0.0, 1.0);
    out.fraction = t;
    out.position = {s->p0.x + t * dx, s->p0.y + t * dy};
  } else if (const auto* a = std::get_if<ArcPiece>(&e.shape)) {
    const double rx = target.x - a->center.x;
    const double ry = target.y - a->center.y;
    double f = 0.0;
    if (std::hypot(rx, ry) > kMergeToleranceMm) {
      double rel = std::atan2(ry, rx) - a->start_angle;
      rel = std::fmod(rel, 2.0 * std::numbers::pi);
      if (rel < 0.0) rel += 2.0 * std::numbers::pi;
      if (rel <= a->sweep) {
        f = rel / a->sweep;
      } else {
        // Outside the arc: pick whichever end is angularly closer.
        f = (rel - a->sweep) < (2.0 * std::numbers::pi - rel) ? 1.0 : 0.0;
      }
    }
    const double theta = a->start_angle + f * a->sweep;
    out.fraction = f;
    out.position = {a->center.x + a->radius * std::cos(theta),
                    a->center.y + a->radius * std::sin(theta)};
  }
  out.dist = distance(out.position, target);
  return out;
}

std::pair<Edge, Edge> split_edge(const Edge& e, double fraction, NodeId mid, Point at) {
  Edge first = e;
  Edge second = e;
  first.b = mid;
  second.a = mid;
  first.ohms = e.ohms * fraction;
  second.ohms = e.ohms * (1.0 - fraction);
  if (const auto* s = std::get_if<SegmentPiece>(&e.shape)) {
    first.shape = SegmentPiece{s->p0, at};
    second.shape = SegmentPiece{at, s->p1};
  } else if (const auto* a = std::get_if<ArcPiece>(&e.shape)) {
    first.shape = ArcPiece{a->center, a->radius, a->start_angle, a->sweep * fraction};
    second.shape = ArcPiece{a->center, a->radius, a->start_angle + a->sweep * fraction,
                            a->sweep * (1.0 - fraction)};
  }
  return {first, second};
}

std::vector<bool> reachable(const CircuitGraph& g, NodeId start, bool traces_only,
                            const std::vector<bool>& stop_at) {
  std::vector<std::vector<std::size_t>> adjacency(g.nodes.size());
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    if (traces_only && g.edges[i].kind != EdgeKind::Trace) continue;
    adjacency[g.edges[i].a].push_back(i);
    adjacency[g.edges[i].b].push_back(i);
  }
  std::vector<bool> seen(g.nodes.size(), false);
  std::deque<NodeId> queue{start};
  seen[start] = true;
  while (!queue.empty()) {
    const NodeId n = queue.front();
    queue.pop_front();
    if (n != start && stop_at[n]) continue;
    for (std::size_t ei : adjacency[n]) {
      const Edge& e = g.edges[ei];
      const NodeId other = e.a == n ? e.b : e.a;
      if (!seen[other]) {
        seen[other] = true;
        queue.push_back(other);
      }
    }
  }
  return seen;
}

// Solves for node potentials with Dirichlet values at `fixed` nodes. Only
// nodes reachable from the first fixed node (without passing through another
// fixed node) are unknowns; every other free node is reported at 0 V.
std::vector<double> solve_potentials(const CircuitGraph& g, bool traces_only,
                                     const std::vector<std::pair<NodeId, double>>& fixed) {
  const std::size_t n = g.nodes.size();
  std::vector<double> potential(n, 0.0);
  std::vector<bool> is_fixed(n, false);
  for (const auto& [node, volts] : fixed) {
    is_fixed[node] = true;
    potential[node] = volts;
  }
  const std::vector<bool> seen = reachable(g, fixed.front().first, traces_only, is_fixed);

  std::vector<std::ptrdiff_t> unknown(n, -1);
  std::ptrdiff_t m = 0;
  for (NodeId i = 0; i < n; ++i)
    if (seen[i] && !is_fixed[i]) unknown[i] = m++;
  if (m == 0) return potential;

  Eigen::MatrixXd conductance = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd injected = Eigen::VectorXd::Zero(m);
  for (const Edge& e : g.edges) {
    if (traces_only && e.kind != EdgeKind::Trace) continue;
    const double gval = 1.0 / e.ohms;
    const std::ptrdiff_t ia = unknown[e.a];
    const std::ptrdiff_t ib = unknown[e.b];
    if (ia >= 0) {
      conductance(ia, ia) += gval;
      if (ib >= 0) conductance(ia, ib) -= gval;
      else injected(ia) += gval * potential[e.b];
    }
    if (ib >= 0) {
      conductance(ib, ib) += gval;
      if (ia >= 0) conductance(ib, ia) -= gval;
      else injected(ib) += gval * potential[e.a];
    }
  }

  const Eigen::LLT<Eigen::MatrixXd> llt(conductance);
  if (llt.info() != Eigen::Success)
    throw NumericalError("nodal conductance matrix is not positive definite");
  const Eigen::VectorXd v = llt.solve(injected);
  const double residual = (conductance * v - injected).lpNorm<Eigen::Infinity>();
  if (!(residual <= kResidualLimit))
    throw NumericalError("nodal solve residual " + std::to_string(residual) + " A exceeds 1e-9");
  for (NodeId i = 0; i < n; ++i)
    if (unknown[i] >= 0) potential[i] = v(unknown[i]);
  return potential;
}

}  // namespace

void validate(const Bench& bench) {
  if (!(bench.source_volts > 0.0)) throw InvalidArgument("source voltage must be positive");
  if (!(bench.load_ohms > 0.0)) throw InvalidArgument("load resistance must be positive");
  if (bench.obstacle_ohms && !(*bench.obstacle_ohms > 0.0))
    throw InvalidArgument("obstacle resistance must be positive");
}

CircuitGraph build_netlist(std::span<const Conductor> conductors,
                           std::span<const Junction> junctions, const NetlistOptions& options) {
  for (const Conductor& c : conductors) validate(c);
  if (!(options.load_ohms > 0.0)) throw InvalidArgument("load resistance must be positive");

  const std::size_t count = conductors.size();
  UnionFind traces(count);
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = i + 1; j < count; ++j)
      if (conductors[i].is_segment() && conductors[j].is_segment() &&
          conductors[i].ohms_per_mm == conductors[j].ohms_per_mm &&
          collinear_overlap(std::get<Segment>(conductors[i].geometry),
                            std::get<Segment>(conductors[j].geometry)))
        traces.unite(i, j);

  CircuitGraph g;
  g.nodes = {{NodeRole::Ground, {}},
             {NodeRole::Source, {0.0, kMidlineYMm}},
             {NodeRole::Load, {kWorkspaceWidthMm, kMidlineYMm}}};
  const Terminals& t = g.terminals;

  std::vector<NodeId> node_of(junctions.size());
  bool source_placed = false;
  bool load_placed = false;
  for (std::size_t j = 0; j < junctions.size(); ++j) {
    const Junction& jn = junctions[j];
    if (jn.touches({ObjectKind::SourceBar, 0})) {
      node_of[j] = t.source;
      if (!source_placed) g.nodes[t.source].position = jn.position;
      source_placed = true;
    } else if (jn.touches({ObjectKind::LoadBar, 0})) {
      node_of[j] = t.load;
      if (!load_placed) g.nodes[t.load].position = jn.position;
      load_placed = true;
    } else {
      node_of[j] = g.nodes.size();
      g.nodes.push_back({NodeRole::Junction, jn.position});
    }
  }

  std::vector<Edge> edges;
  auto emit = [&](NodeId a, NodeId b, double ohms, auto shape) {
    if (a == b) return;  // a closed loop on one node carries no current
    if (!(ohms > 0.0) || !std::isfinite(ohms))
      throw NumericalError("trace piece between nodes " + std::to_string(a) + " and " +
                           std::to_string(b) + " has non-positive resistance");
    edges.push_back({a, b, ohms, EdgeKind::Trace, shape});
  };

  // Fused straight traces.
  for (std::size_t root = 0; root < count; ++root) {
    if (!conductors[root].is_segment() || traces.find(root) != root) continue;
    const Segment& axis = std::get<Segment>(conductors[root].geometry);
    const double len = axis.length();
    const Point u{(axis.p1.x - axis.p0.x) / len, (axis.p1.y - axis.p0.y) / len};
    auto in_trace = [&](const ObjectRef& r) {
      return r.kind == ObjectKind::Conductor && traces.find(r.index) == root;
    };
    std::vector<SplitPoint> splits;
    for (std::size_t j = 0; j < junctions.size(); ++j) {
      const auto& members = junctions[j].members;
      const bool on_trace = std::any_of(members.begin(), members.end(), in_trace);
      const bool external = !std::all_of(members.begin(), members.end(), in_trace);
      if (!on_trace || !external) continue;
      const Point p = junctions[j].position;
      const double along = (p.x - axis.p0.x) * u.x + (p.y - axis.p0.y) * u.y;
      splits.push_back({along, node_of[j], {axis.p0.x + along * u.x, axis.p0.y + along * u.y}});
    }
    std::sort(splits.begin(), splits.end());
    const double rho = conductors[root].ohms_per_mm;
    for (std::size_t k = 0; k + 1 < splits.size(); ++k)
      emit(splits[k].node, splits[k + 1].node,
           rho * (splits[k + 1].coordinate - splits[k].coordinate),
           SegmentPiece{splits[k].position, splits[k + 1].position});
  }

  // Rings: arcs between consecutive junction angles.
  for (std::size_t i = 0; i < count; ++i) {
    if (!conductors[i].is_ring()) continue;
    const Ring& ring = std::get<Ring>(conductors[i].geometry);
    std::vector<SplitPoint> splits;
    for (std::size_t j = 0; j < junctions.size(); ++j) {
      if (!junctions[j].touches({ObjectKind::Conductor, i})) continue;
      const Point p = junctions[j].position;
      splits.push_back(
          {std::atan2(p.y - ring.center.y, p.x - ring.center.x), node_of[j], p});
    }
    if (splits.size() < 2) continue;
    std::sort(splits.begin(), splits.end());
    const double rho = conductors[i].ohms_per_mm;
    for (std::size_t k = 0; k < splits.size(); ++k) {
      const SplitPoint& from = splits[k];
      const bool wrap = k + 1 == splits.size();
      const SplitPoint& to = splits[wrap ? 0 : k + 1];
      const double sweep =
          to.coordinate - from.coordinate + (wrap ? 2.0 * std::numbers::pi : 0.0);
      emit(from.node, to.node, rho * ring.radius * sweep,
           ArcPiece{ring.center, ring.radius, from.coordinate, sweep});
    }
  }

  // Prune dead ends: non-terminal nodes with a single incident trace.
  std::vector<bool> alive(edges.size(), true);
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<std::size_t> degree(g.nodes.size(), 0);
    for (std::size_t i = 0; i < edges.size(); ++i)
      if (alive[i]) ++degree[edges[i].a], ++degree[edges[i].b];
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (!alive[i]) continue;
      for (NodeId n : {edges[i].a, edges[i].b}) {
        if (n != t.source && n != t.load && degree[n] <= 1) {
          alive[i] = false;
          changed = true;
        }
      }
    }
  }

  // Compact: terminals keep ids 0..2, surviving junction nodes follow.
  std::vector<NodeId> remap(g.nodes.size(), SIZE_MAX);
  std::vector<Node> kept(g.nodes.begin(), g.nodes.begin() + 3);
  for (NodeId n = 0; n < 3; ++n) remap[n] = n;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!alive[i]) continue;
    for (NodeId n : {edges[i].a, edges[i].b}) {
      if (remap[n] == SIZE_MAX) {
        remap[n] = kept.size();
        kept.push_back(g.nodes[n]);
      }
    }
  }
  g.nodes = std::move(kept);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!alive[i]) continue;
    Edge e = edges[i];
    e.a = remap[e.a];
    e.b = remap[e.b];
    g.edges.push_back(e);
  }

  const std::vector<bool> none(g.nodes.size(), false);
  const std::vector<bool> from_source = reachable(g, t.source, true, none);
  g.connected = from_source[t.load];

  g.edges.push_back({t.load, t.ground, options.load_ohms, EdgeKind::Load, std::monostate{}});

  if (options.obstacle_ohms && g.connected) {
    if (!(*options.obstacle_ohms > 0.0))
      throw InvalidArgument("obstacle resistance must be positive");
    std::size_t best = SIZE_MAX;
    Nearest nearest;
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
      const Edge& e = g.edges[i];
      if (e.kind != EdgeKind::Trace || !from_source[e.a]) continue;
      const Nearest cand = nearest_on(e, options.obstacle_point);
      if (cand.dist < nearest.dist) {
        nearest = cand;
        best = i;
      }
    }
    const Edge target = g.edges[best];
    const double len = piece_length(target);
    NodeId attach;
    if (nearest.fraction * len <= kMergeToleranceMm) {
      attach = target.a;
    } else if ((1.0 - nearest.fraction) * len <= kMergeToleranceMm) {
      attach = target.b;
    } else {
      attach = g.nodes.size();
      g.nodes.push_back({NodeRole::Obstacle, nearest.position});
      auto [first, second] = split_edge(target, nearest.fraction, attach, nearest.position);
      g.edges[best] = first;
      g.edges.insert(g.edges.begin() + static_cast<std::ptrdiff_t>(best) + 1, second);
    }
    g.terminals.obstacle = attach;
    g.edges.push_back(
        {attach, t.ground, *options.obstacle_ohms, EdgeKind::Obstacle, std::monostate{}});
  }
  return g;
}

SolveResult solve_network(const CircuitGraph& graph, double source_volts) {
  const Terminals& t = graph.terminals;
  SolveResult result;
  result.node_potentials.assign(graph.nodes.size(), 0.0);
  result.branch_currents.assign(graph.edges.size(), 0.0);
  result.node_potentials[t.source] = source_volts;
  result.connected = graph.connected;
  if (!graph.connected) return result;

  result.node_potentials =
      solve_potentials(graph, false, {{t.source, source_volts}, {t.ground, 0.0}});
  for (std::size_t i = 0; i < graph.edges.size(); ++i) {
    const Edge& e = graph.edges[i];
    result.branch_currents[i] =
        (result.node_potentials[e.a] - result.node_potentials[e.b]) / e.ohms;
  }
  result.load_voltage = result.node_potentials[t.load];
  return result;
}

double connection_resistance(const CircuitGraph& graph) {
  const Terminals& t = graph.terminals;
  if (!graph.connected) return std::numeric_limits<double>::infinity();
  const std::vector<double> v = solve_potentials(graph, true, {{t.source, 1.0}, {t.load, 0.0}});
  double current = 0.0;
  for (const Edge& e : graph.edges) {
    if (e.kind != EdgeKind::Trace) continue;
    if (e.a == t.source) current += (v[e.a] - v[e.b]) / e.ohms;
    if (e.b == t.source) current += (v[e.b] - v[e.a]) / e.ohms;
  }
  return 1.0 / current;
}

std::vector<double> node_current_residuals(const CircuitGraph& graph, const SolveResult& result) {
  std::vector<double> net(graph.nodes.size(), 0.0);
  for (std::size_t i = 0; i < graph.edges.size(); ++i) {
    net[graph.edges[i].a] += result.branch_currents[i];
    net[graph.edges[i].b] -= result.branch_currents[i];
  }
  return net;
}

bool obstacle_contact(const Pattern& pattern) {
  return pattern.offsets[0] >= 0.0 || pattern.offsets[2] <= 0.0 ||
         pattern.shapes[2] == ShapeKind::Circle;
}

namespace {

CircuitGraph graph_for(const std::vector<Conductor>& conductors,
                       const std::vector<Junction>& junctions, const Pattern& pattern,
                       const Bench& bench) {
  NetlistOptions options;
  options.load_ohms = bench.load_ohms;
  options.obstacle_point = bench.obstacle_point;
  if (bench.obstacle_ohms && obstacle_contact(pattern)) options.obstacle_ohms = bench.obstacle_ohms;
  return build_netlist(conductors, junctions, options);
}

}  // namespace

Evaluation evaluate(const Pattern& pattern, const Bench& bench) {
  validate(bench);
  Evaluation ev;
  ev.conductors = shape_geometry(pattern);
  ev.junctions = find_junctions(ev.conductors);
  ev.graph = graph_for(ev.conductors, ev.junctions, pattern, bench);
  ev.solution = solve_network(ev.graph, bench.source_volts);
  ev.connection_ohms = connection_resistance(ev.graph);
  ev.obstacle_contact = obstacle_contact(pattern);
  return ev;
}

double load_voltage(const Pattern& pattern, const Bench& bench) {
  validate(bench);
  const auto conductors = shape_geometry(pattern);
  const auto junctions = find_junctions(conductors);
  return solve_network(graph_for(conductors, junctions, pattern, bench), bench.source_volts)
      .load_voltage;
}

}  // namespace circuitbo::sim
