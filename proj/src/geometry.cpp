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

#include "circuitbo/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <string>

#include "circuitbo/errors.hpp"

namespace circuitbo::sim {
namespace {

Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
double norm(Point a) { return std::hypot(a.x, a.y); }

// Parameter range of a segment widened by `tol` millimetres at both ends.
bool within_segment(double t, double length, double tol) {
  const double slack = tol / length;
  return t >= -slack && t <= 1.0 + slack;
}

Point at(const Segment& s, double t) {
  t = std::clamp(t, 0.0, 1.0);
  return s.p0 + t * (s.p1 - s.p0);
}

struct RawContact {
  Point position;
  ObjectRef a;
  ObjectRef b;
};

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }

  // The smaller root wins so cluster representatives are the earliest member.
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

void collect(std::vector<RawContact>& out, const std::vector<Point>& points, ObjectRef a,
             ObjectRef b) {
  for (const Point& p : points) out.push_back({p, a, b});
}

std::vector<Point> intersect_conductors(const Conductor& a, const Conductor& b) {
  if (a.is_segment() && b.is_segment())
    return intersect(std::get<Segment>(a.geometry), std::get<Segment>(b.geometry));
  if (a.is_ring() && b.is_ring())
    return intersect(std::get<Ring>(a.geometry), std::get<Ring>(b.geometry));
  if (a.is_segment())
    return intersect(std::get<Segment>(a.geometry), std::get<Ring>(b.geometry));
  return intersect(std::get<Segment>(b.geometry), std::get<Ring>(a.geometry));
}

std::vector<Point> intersect_bar(const Conductor& c, const Segment& bar) {
  if (c.is_segment()) return intersect(std::get<Segment>(c.geometry), bar);
  return intersect(bar, std::get<Ring>(c.geometry));
}

double parse_offset(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc{} || ptr != end)
    throw InvalidArgument("offset '" + std::string(text) + "' is not a number");
  return value;
}

}  // namespace

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::size_t Pattern::circle_count() const {
  return static_cast<std::size_t>(
      std::count(shapes.begin(), shapes.end(), ShapeKind::Circle));
}

void validate(const Pattern& pattern) {
  for (std::size_t i = 0; i < kOffsetCount; ++i) {
    const double x = pattern.offsets[i];
    if (!std::isfinite(x) || x < -kMaxOffsetMm || x > kMaxOffsetMm)
      throw InvalidArgument("offset x" + std::to_string(i + 1) + " = " + std::to_string(x) +
                            " mm is outside [-20, 20]");
  }
  for (ShapeKind s : pattern.shapes)
    if (s != ShapeKind::Line && s != ShapeKind::Circle)
      throw InvalidArgument("unknown shape kind");
}

std::string shapes_to_string(const Pattern& pattern) {
  std::string out;
  for (ShapeKind s : pattern.shapes) out.push_back(s == ShapeKind::Circle ? 'C' : 'L');
  return out;
}

Pattern parse_pattern(std::string_view shapes, std::string_view offsets) {
  if (shapes.size() != kShapeCount)
    throw InvalidArgument("shape string must have exactly 5 characters from {L, C}");
  Pattern pattern;
  for (std::size_t i = 0; i < kShapeCount; ++i) {
    switch (shapes[i]) {
      case 'L': pattern.shapes[i] = ShapeKind::Line; break;
      case 'C': pattern.shapes[i] = ShapeKind::Circle; break;
      default:
        throw InvalidArgument(std::string("invalid shape character '") + shapes[i] +
                              "', expected L or C");
    }
  }
  std::size_t field = 0;
  while (true) {
    const auto comma = offsets.find(',');
    if (field >= kOffsetCount) throw InvalidArgument("expected exactly 3 comma-separated offsets");
    pattern.offsets[field++] = parse_offset(offsets.substr(0, comma));
    if (comma == std::string_view::npos) break;
    offsets.remove_prefix(comma + 1);
  }
  if (field != kOffsetCount) throw InvalidArgument("expected exactly 3 comma-separated offsets");
  validate(pattern);
  return pattern;
}

void validate(const Conductor& conductor) {
  if (!(conductor.ohms_per_mm > 0.0) || !std::isfinite(conductor.ohms_per_mm))
    throw InvalidArgument("conductor resistivity must be positive");
  if (conductor.is_segment()) {
    if (!(std::get<Segment>(conductor.geometry).length() > 0.0))
      throw InvalidArgument("segment must have positive length");
  } else if (!(std::get<Ring>(conductor.geometry).radius > 0.0)) {
    throw InvalidArgument("ring must have positive radius");
  }
}

bool Junction::touches(ObjectRef ref) const {
  return std::binary_search(members.begin(), members.end(), ref);
}

std::vector<Conductor> shape_geometry(const Pattern& pattern) {
  validate(pattern);
  const double half = kShapeSizeMm / 2.0;
  std::vector<Conductor> conductors;
  conductors.reserve(kShapeCount);
  for (std::size_t i = 0; i < kShapeCount; ++i) {
    double cx = kNominalCentersMm[i];
    if (i >= 1 && i <= kOffsetCount) cx += pattern.offsets[i - 1];
    if (pattern.shapes[i] == ShapeKind::Line) {
      conductors.push_back({Segment{{cx - half, kMidlineYMm}, {cx + half, kMidlineYMm}}, kOhmsPerMm});
    } else {
      conductors.push_back({Ring{{cx, kMidlineYMm}, half}, kOhmsPerMm});
    }
  }
  return conductors;
}

std::vector<Point> intersect(const Ring& a, const Ring& b, double tol) {
  const Point delta = b.center - a.center;
  const double d = norm(delta);
  if (d <= tol) return {};  // concentric: no isolated contact points
  const double ra = a.radius;
  const double rb = b.radius;
  if (d > ra + rb + tol || d < std::abs(ra - rb) - tol) return {};
  const Point u = (1.0 / d) * delta;
  const Point perp{-u.y, u.x};
  if (std::abs(d - (ra + rb)) <= tol) return {a.center + ra * u};
  if (std::abs(d - std::abs(ra - rb)) <= tol) return {a.center + (ra >= rb ? ra : -ra) * u};
  const double along = (d * d + ra * ra - rb * rb) / (2.0 * d);
  const double h = std::sqrt(std::max(0.0, ra * ra - along * along));
  const Point base = a.center + along * u;
  return {base + h * perp, base - h * perp};
}

std::vector<Point> intersect(const Segment& s, const Ring& c, double tol) {
  const Point d = s.p1 - s.p0;
  const double len = norm(d);
  const double t0 = dot(c.center - s.p0, d) / (len * len);
  const Point foot = s.p0 + t0 * d;
  const double h = distance(foot, c.center);
  if (h > c.radius + tol) return {};
  if (std::abs(h - c.radius) <= tol) {
    if (within_segment(t0, len, tol)) return {at(s, t0)};
    return {};
  }
  const double half_chord = std::sqrt(c.radius * c.radius - h * h) / len;
  std::vector<Point> out;
  for (double t : {t0 - half_chord, t0 + half_chord})
    if (within_segment(t, len, tol)) out.push_back(at(s, t));
  return out;
}

std::vector<Point> intersect(const Segment& a, const Segment& b, double tol) {
  const Point da = a.p1 - a.p0;
  const Point db = b.p1 - b.p0;
  const double la = norm(da);
  const double lb = norm(db);
  const double denom = cross(da, db);
  if (std::abs(denom) <= 1e-12 * la * lb) {
    if (!collinear_overlap(a, b, tol)) return {};
    const Point u = (1.0 / la) * da;
    const double tb0 = dot(b.p0 - a.p0, u);
    const double tb1 = dot(b.p1 - a.p0, u);
    const double lo = std::max(0.0, std::min(tb0, tb1));
    const double hi = std::min(la, std::max(tb0, tb1));
    if (hi - lo <= tol) return {a.p0 + (0.5 * (lo + hi)) * u};
    return {a.p0 + lo * u, a.p0 + hi * u};
  }
  const Point w = b.p0 - a.p0;
  const double t = cross(w, db) / denom;
  const double s = cross(w, da) / denom;
  if (!within_segment(t, la, tol) || !within_segment(s, lb, tol)) return {};
  return {at(a, t)};
}

bool collinear_overlap(const Segment& a, const Segment& b, double tol) {
  const Point da = a.p1 - a.p0;
  const Point db = b.p1 - b.p0;
  const double la = norm(da);
  const double lb = norm(db);
  if (std::abs(cross(da, db)) > 1e-12 * la * lb) return false;
  const Point u = (1.0 / la) * da;
  if (std::abs(cross(u, b.p0 - a.p0)) > tol) return false;
  const double tb0 = dot(b.p0 - a.p0, u);
  const double tb1 = dot(b.p1 - a.p0, u);
  return std::min(la, std::max(tb0, tb1)) - std::max(0.0, std::min(tb0, tb1)) >= -tol;
}

std::vector<Junction> find_junctions(std::span<const Conductor> conductors,
                                     const TerminalBars& bars) {
  for (const Conductor& c : conductors) validate(c);

  std::vector<RawContact> raw;
  for (std::size_t i = 0; i < conductors.size(); ++i) {
    const ObjectRef ri{ObjectKind::Conductor, i};
    for (std::size_t j = i + 1; j < conductors.size(); ++j)
      collect(raw, intersect_conductors(conductors[i], conductors[j]), ri,
              {ObjectKind::Conductor, j});
    collect(raw, intersect_bar(conductors[i], bars.source), ri, {ObjectKind::SourceBar, 0});
    collect(raw, intersect_bar(conductors[i], bars.load), ri, {ObjectKind::LoadBar, 0});
  }

  DisjointSets sets(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i)
    for (std::size_t j = i + 1; j < raw.size(); ++j)
      if (distance(raw[i].position, raw[j].position) <= kMergeToleranceMm) sets.unite(i, j);

  std::vector<Junction> junctions;
  std::vector<std::size_t> slot(raw.size(), SIZE_MAX);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const std::size_t root = sets.find(i);
    if (slot[root] == SIZE_MAX) {
      slot[root] = junctions.size();
      junctions.push_back({raw[root].position, {}});
    }
    auto& members = junctions[slot[root]].members;
    members.push_back(raw[i].a);
    members.push_back(raw[i].b);
  }
  for (Junction& j : junctions) {
    std::sort(j.members.begin(), j.members.end());
    j.members.erase(std::unique(j.members.begin(), j.members.end()), j.members.end());
  }
  return junctions;
}

}  // namespace circuitbo::sim
