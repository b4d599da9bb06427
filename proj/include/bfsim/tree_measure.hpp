// Copyright 2026 The bfsim Authors
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

#ifndef BFSIM_TREE_MEASURE_HPP_
#define BFSIM_TREE_MEASURE_HPP_

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bfsim/trajectory.hpp"
#include "bfsim/trees.hpp"

namespace bfsim {

// Component-density integrals mu_H^0(t) of small forests H in the
// continuous-time limit, and the densities rho_k(t) = k * mu_k^0(t) derived
// from them.
//
// For an arrival-time vector (t_1, ..., t_l), one time per edge of H, the
// integrand is prod_j g_j(t_j) * exp(-F(t_1..t_l)). Its form depends on the
// trajectory mode:
//   Bohman-Frieze: g_j = 2 (alpha_j - rho1(t_j)^2), alpha_j = 2 when both
//                  ends of edge j are still isolated at its arrival, else 1;
//                  F = 2k A(t) + 2 sum_v B(t_v), t_v the first arrival at v
//                  (t when v has no edge).
//   Erdos-Renyi:   g_j = 2, F = 2 k t.

enum class MuMethod { kMonteCarlo, kQuadrature, kClosedFormEr };

const char* MuMethodName(MuMethod method);

struct ArrivalTimes {
  std::vector<double> times;  // one entry per edge, in edge order
};

struct MuEstimate {
  double value = 0.0;
  double std_error = 0.0;  // 0 for deterministic methods
  MuMethod method = MuMethod::kQuadrature;
  std::uint64_t samples = 0;
};

// prod_j g_j(t_j), replaying edges by arrival time (ties by edge index).
double GProduct(const LabeledForest& h, const ArrivalTimes& arrivals,
                const Trajectory& traj);

// F(t_1..t_l) at horizon t; every arrival must lie in [0, t].
double FHat(const LabeledForest& h, const ArrivalTimes& arrivals,
            const Trajectory& traj, double t);

// Plain Monte Carlo over the cube [0, t]^l.
MuEstimate MuGraphMc(const LabeledForest& h, double t, const Trajectory& traj,
                     std::uint64_t samples, std::uint64_t seed);

struct QuadOptions {
  int nodes = 64;     // Gauss-Legendre nodes per dimension
  int max_edges = 4;  // larger forests raise kUnsupportedSize
};

// Sum over the l! arrival orders of the iterated integral over the ordered
// simplex 0 < t_1 < ... < t_l < t. The order-specific integrand factorises
// into one-dimensional terms, so each order is integrated by repeated
// spectral integration on the Gauss-Legendre nodes of [0, t].
MuEstimate MuGraphQuad(const LabeledForest& h, double t, const Trajectory& traj,
                       const QuadOptions& options = {});

struct MuOptions {
  MuMethod method = MuMethod::kQuadrature;
  std::uint64_t samples = 1'000'000;  // per isomorphism class (Monte Carlo)
  std::uint64_t seed = 1;
  QuadOptions quad;
  int k_max = kDefaultMaxTreeSize;
};

// (1/k!) sum over labeled trees on k vertices of mu_T^0, evaluated once per
// isomorphism class and weighted by class size.
MuEstimate MuK0(int k, double t, const Trajectory& traj,
                const MuOptions& options = {});

// k * MuK0; the standard error scales with it.
MuEstimate RhoK(int k, double t, const Trajectory& traj,
                const MuOptions& options = {});

// Memoises per-class integrals keyed by (canonical form, t, method) for one
// trajectory and option set. Not thread-safe; use one instance per thread.
class TreeMeasure {
 public:
  TreeMeasure(const Trajectory& traj, MuOptions options)
      : traj_(traj), options_(options) {}

  MuEstimate MuK0(int k, double t);
  MuEstimate RhoK(int k, double t);

  const MuOptions& options() const { return options_; }

 private:
  struct Key {
    std::string canonical;
    double t;
    MuMethod method;
    friend auto operator<=>(const Key&, const Key&) = default;
  };

  const Trajectory& traj_;
  MuOptions options_;
  std::map<Key, MuEstimate> cache_;
};

// k^{k-2} (2t)^{k-1} e^{-2kt} / k!
double ErModeMuClosedForm(int k, double t);

}  // namespace bfsim

#endif  // BFSIM_TREE_MEASURE_HPP_
