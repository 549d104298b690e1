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

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "circuitbo/geometry.hpp"

namespace circuitbo::sim {

// Electrical bench around the drawn pattern: supply, load, and the optional
// parasitic obstacle that shunts the circuit to ground on contact.
struct Bench {
  double source_volts = 30.0;
  double load_ohms = 45.0;
  std::optional<double> obstacle_ohms;  // set only for the obstacle experiment
  Point obstacle_point{kWorkspaceWidthMm / 2.0, kMidlineYMm};
};

// Throws InvalidArgument on non-positive voltages or resistances.
void validate(const Bench& bench);

using NodeId = std::size_t;

enum class NodeRole : std::uint8_t { Ground, Source, Load, Junction, Obstacle };

struct Node {
  NodeRole role = NodeRole::Junction;
  Point position;  // meaningless for ground
};

struct SegmentPiece {
  Point p0;
  Point p1;
};

struct ArcPiece {
  Point center;
  double radius = 0.0;
  double start_angle = 0.0;  // radians
  double sweep = 0.0;        // radians, positive (counter-clockwise)
};

enum class EdgeKind : std::uint8_t { Trace, Load, Obstacle };

struct Edge {
  NodeId a = 0;
  NodeId b = 0;
  double ohms = 0.0;
  EdgeKind kind = EdgeKind::Trace;
  std::variant<std::monostate, SegmentPiece, ArcPiece> shape;  // traces only
};

struct Terminals {
  NodeId ground = 0;
  NodeId source = 1;
  NodeId load = 2;
  std::optional<NodeId> obstacle;
};

// Resistor network for one drawn pattern. Every edge has positive resistance
// and distinct endpoints; the bars are single nodes.
struct CircuitGraph {
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  Terminals terminals;
  bool connected = false;  // a trace path joins source and load
};

struct NetlistOptions {
  double load_ohms = 45.0;
  // When set, a shunt of this many ohms to ground is attached at the point of
  // the connected circuit nearest `obstacle_point`.
  std::optional<double> obstacle_ohms;
  Point obstacle_point{kWorkspaceWidthMm / 2.0, kMidlineYMm};
};

// Splits conductors at their junctions into resistive edges. Collinear
// overlapping segments fuse into one trace. Dead-end branches are pruned.
// Throws NumericalError if an edge ends up with non-positive resistance.
CircuitGraph build_netlist(std::span<const Conductor> conductors,
                           std::span<const Junction> junctions, const NetlistOptions& options);

struct SolveResult {
  std::vector<double> node_potentials;  // volts, indexed by NodeId
  std::vector<double> branch_currents;  // amperes a -> b, indexed like edges
  double load_voltage = 0.0;
  bool connected = false;
};

// Nodal analysis with ground at 0 V and the source node at `source_volts`.
// Throws NumericalError if the solve residual exceeds 1e-9.
SolveResult solve_network(const CircuitGraph& graph, double source_volts);

// Equivalent resistance between source and load through the trace edges only
// (load and obstacle resistors excluded). +infinity when disconnected.
double connection_resistance(const CircuitGraph& graph);

// Net current leaving each node through graph edges (amperes).
std::vector<double> node_current_residuals(const CircuitGraph& graph, const SolveResult& result);

// Contact rule for the obstacle placed at the middle of the workspace:
// x1 >= 0, or x3 <= 0, or the middle shape is a circle.
bool obstacle_contact(const Pattern& pattern);

struct Evaluation {
  std::vector<Conductor> conductors;
  std::vector<Junction> junctions;
  CircuitGraph graph;
  SolveResult solution;
  double connection_ohms = 0.0;
  bool obstacle_contact = false;
};

// Full pipeline with intermediate products, for reports and tests.
Evaluation evaluate(const Pattern& pattern, const Bench& bench);

// The simulated objective: volts across the load for `pattern`.
double load_voltage(const Pattern& pattern, const Bench& bench);

}  // namespace circuitbo::sim
