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

// Independent reference for resistor networks: hand-built netlists from
// closed-form geometry, solved by plain Gaussian elimination. Shares no code
// with the library's geometry, netlist or solver.

#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

struct Resistor {
  std::size_t a;
  std::size_t b;
  double ohms;
};

// Solves A x = b in place with partial pivoting.
inline std::vector<double> gauss_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (a[pivot][col] == 0.0) throw std::runtime_error("singular system");
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return x;
}

// Node potentials with `ground` held at 0 V and 1 A injected at `source`.
inline std::vector<double> potentials_for_unit_current(std::size_t nodes,
                                                       const std::vector<Resistor>& rs,
                                                       std::size_t source, std::size_t ground) {
  std::vector<std::size_t> index(nodes, nodes);
  std::size_t m = 0;
  for (std::size_t i = 0; i < nodes; ++i)
    if (i != ground) index[i] = m++;
  std::vector<std::vector<double>> g(m, std::vector<double>(m, 0.0));
  for (const Resistor& r : rs) {
    const double c = 1.0 / r.ohms;
    const std::size_t ia = index[r.a];
    const std::size_t ib = index[r.b];
    if (ia < m) g[ia][ia] += c;
    if (ib < m) g[ib][ib] += c;
    if (ia < m && ib < m) {
      g[ia][ib] -= c;
      g[ib][ia] -= c;
    }
  }
  std::vector<double> rhs(m, 0.0);
  rhs[index[source]] = 1.0;
  const std::vector<double> x = gauss_solve(g, rhs);
  std::vector<double> v(nodes, 0.0);
  for (std::size_t i = 0; i < nodes; ++i)
    if (i != ground) v[i] = x[index[i]];
  return v;
}

inline double effective_resistance(std::size_t nodes, const std::vector<Resistor>& rs,
                                   std::size_t a, std::size_t b) {
  return potentials_for_unit_current(nodes, rs, a, b)[a];
}

// Chain of `count` rings of radius 50 mm, 0.2 ohm/mm, centers 70 mm apart
// on one line; the first ring touches the source bar at its leftmost point
// and the last touches the load bar at its rightmost point.
// Node 0: source, node 1: load, then upper/lower junction of each adjacent
// pair: 2 + 2k (upper), 3 + 2k (lower).
struct RingChain {
  std::size_t nodes = 0;
  std::vector<Resistor> resistors;
};

inline RingChain ring_chain(std::size_t count, double spacing = 70.0, double radius = 50.0,
                            double ohms_per_mm = 0.2) {
  const double pi = std::numbers::pi;
  const double phi = std::acos((spacing / 2.0) / radius);  // junction half-angle
  const double per_rad = ohms_per_mm * radius;
  RingChain chain;
  chain.nodes = 2 + 2 * (count - 1);
  auto upper = [](std::size_t k) { return 2 + 2 * k; };
  auto lower = [](std::size_t k) { return 3 + 2 * k; };
  for (std::size_t k = 0; k < count; ++k) {
    const bool first = k == 0;
    const bool last = k + 1 == count;
    if (first) {
      chain.resistors.push_back({0, upper(0), per_rad * (pi - phi)});
      chain.resistors.push_back({0, lower(0), per_rad * (pi - phi)});
    } else {
      chain.resistors.push_back({upper(k - 1), lower(k - 1), per_rad * 2.0 * phi});
    }
    if (last) {
      chain.resistors.push_back({upper(k - 1), 1, per_rad * (pi - phi)});
      chain.resistors.push_back({lower(k - 1), 1, per_rad * (pi - phi)});
    } else {
      chain.resistors.push_back({upper(k), lower(k), per_rad * 2.0 * phi});
      if (!first) {
        chain.resistors.push_back({upper(k - 1), upper(k), per_rad * (pi - 2.0 * phi)});
        chain.resistors.push_back({lower(k - 1), lower(k), per_rad * (pi - 2.0 * phi)});
      }
    }
  }
  return chain;
}

}  // namespace oracle
