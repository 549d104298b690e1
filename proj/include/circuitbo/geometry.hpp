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

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace circuitbo::sim {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

double distance(Point a, Point b);

// Drawn shape category. The numeric values are the categorical encoding used
// by the optimizer and in history files.
enum class ShapeKind : std::uint8_t { Line = 0, Circle = 1 };

inline constexpr std::size_t kShapeCount = 5;
inline constexpr std::size_t kOffsetCount = 3;

// Workspace and drawing constants, millimetres and ohms.
inline constexpr double kWorkspaceWidthMm = 380.0;
inline constexpr double kWorkspaceHeightMm = 100.0;
inline constexpr double kMidlineYMm = 50.0;
inline constexpr double kShapeSizeMm = 100.0;  // line length and circle diameter
inline constexpr double kMaxOffsetMm = 20.0;
inline constexpr double kOhmsPerMm = 0.2;
inline constexpr std::array<double, kShapeCount> kNominalCentersMm{50.0, 120.0, 190.0, 260.0,
                                                                   330.0};

// Points closer than this are the same electrical junction; tangency is
// detected within the same distance.
inline constexpr double kMergeToleranceMm = 1e-3;

// Five shape categories (left to right) plus the horizontal displacement of
// the three interior shapes. The outer two shapes never move.
struct Pattern {
  std::array<ShapeKind, kShapeCount> shapes{};
  std::array<double, kOffsetCount> offsets{};

  std::size_t circle_count() const;

  friend bool operator==(const Pattern&, const Pattern&) = default;
};

// Throws InvalidArgument when an offset is outside [-20, 20] mm or not finite.
void validate(const Pattern& pattern);

// "LLCLL" style string, one character per shape.
std::string shapes_to_string(const Pattern& pattern);

// Parses `[LC]{5}` plus "x1,x2,x3". Throws InvalidArgument on malformed text
// or out-of-range offsets.
Pattern parse_pattern(std::string_view shapes, std::string_view offsets);

struct Segment {
  Point p0;
  Point p1;

  double length() const { return distance(p0, p1); }
};

struct Ring {
  Point center;
  double radius = 0.0;
};

struct Conductor {
  std::variant<Segment, Ring> geometry;
  double ohms_per_mm = kOhmsPerMm;

  bool is_segment() const { return std::holds_alternative<Segment>(geometry); }
  bool is_ring() const { return std::holds_alternative<Ring>(geometry); }
};

// Throws InvalidArgument for zero-length segments, non-positive radii or
// non-positive resistivity.
void validate(const Conductor& conductor);

// Metal bars the pattern must bridge. Both are perfect conductors.
struct TerminalBars {
  Segment source{{0.0, 0.0}, {0.0, kWorkspaceHeightMm}};
  Segment load{{kWorkspaceWidthMm, 0.0}, {kWorkspaceWidthMm, kWorkspaceHeightMm}};
};

enum class ObjectKind : std::uint8_t { Conductor, SourceBar, LoadBar };

// Identifies one electrical object taking part in a junction.
struct ObjectRef {
  ObjectKind kind = ObjectKind::Conductor;
  std::size_t index = 0;  // conductor index; 0 for bars

  friend auto operator<=>(const ObjectRef&, const ObjectRef&) = default;
};

struct Junction {
  Point position;
  std::vector<ObjectRef> members;  // sorted, unique, size >= 2

  bool touches(ObjectRef ref) const;
};

// The five drawn conductors for a pattern, in drawing order.
std::vector<Conductor> shape_geometry(const Pattern& pattern);

// All pairwise contacts between conductors and with the bars. Raw contact
// points closer than kMergeToleranceMm are unified into one junction.
// Collinear overlapping segments contribute the end points of their overlap.
std::vector<Junction> find_junctions(std::span<const Conductor> conductors,
                                     const TerminalBars& bars = {});

// Low-level intersection routines, exposed for testing.
std::vector<Point> intersect(const Ring& a, const Ring& b, double tol = kMergeToleranceMm);
std::vector<Point> intersect(const Segment& s, const Ring& c, double tol = kMergeToleranceMm);
std::vector<Point> intersect(const Segment& a, const Segment& b, double tol = kMergeToleranceMm);

// True when both segments lie on one line and share at least one point.
bool collinear_overlap(const Segment& a, const Segment& b, double tol = kMergeToleranceMm);

}  // namespace circuitbo::sim
