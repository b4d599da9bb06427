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


#ifndef BFSIM_HARNESS_HPP_
#define BFSIM_HARNESS_HPP_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "bfsim/criticality.hpp"
#include "bfsim/process.hpp"
#include "bfsim/trajectory.hpp"
#include "json.hpp"

namespace bfsim {

struct RegimeGuards {
  double eps = 0.0;
  double eps_guard = 0.0;  // |eps| n^{1/4} (log n)^{-1/2}
  double eps6n = 0.0;      // eps^6 n
  double eps3n = 0.0;      // |eps|^3 n
  double sqrt_n_over_omega_k = 0.0;
  bool eps_guard_large = false;
  bool eps6n_large = false;
  bool k_small = false;
  // Scaling window left but the asymptotic regime condition not met.
  bool outside_proven_regime = false;

  nlohmann::json ToJson() const;
};

// A guard counts as "large" when it is at least `large`.
RegimeGuards EvaluateGuards(double n, double eps, double omega, double k,
                            double large = 10.0);

struct ExperimentConfig {
  std::uint64_t n = 100000;
  std::vector<double> t;        // snapshot times, m = floor(t n)
  std::vector<std::uint64_t> m; // explicit snapshot steps; overrides t
  RuleSpec rule = RuleSpec::BohmanFrieze();
  int replicas = 1;
  std::uint64_t master_seed = 1;
  double omega = 10.0;
  std::uint64_t K = 0;  // 0 selects floor(sqrt(n) / omega^2)
  std::uint64_t K1 = 0;
  std::uint64_t K2 = 0;
  std::vector<double> x_grid;
  // I_m is tracked up to floor(trace_t_max n); 0 disables tracking.
  double trace_t_max = 0.0;
  std::uint64_t trace_stride = 0;  // 0 selects max(1, n / 1000)
  std::size_t num_largest = 8;
  int threads = 1;
  std::optional<double> tc;  // used only for regime guards

  std::vector<std::uint64_t> SnapshotSteps() const;
  std::uint64_t ResolvedK() const;
  std::uint64_t ResolvedStride() const;
  std::uint64_t SeedFor(int replica) const;

  nlohmann::json ToJson() const;
  // Unknown keys are rejected.
  static ExperimentConfig FromJson(const nlohmann::json& j);
};

struct ReplicaResult {
  std::uint64_t seed = 0;
  std::vector<ComponentCensus> snapshots;
  std::vector<std::uint64_t> isolated_trace;  // I at m = 0, stride, 2 stride, ...
  // sup_m |I_m / n - rho1(m / n)| sqrt(n) over the traced range; negative
  // when no trajectory was supplied.
  double max_scaled_deviation = -1.0;
};

struct ReplicaResults {
  ExperimentConfig config;
  std::vector<ReplicaResult> replicas;

  // Per-replica value at one snapshot.
  template <class Fn>
  std::vector<double> Collect(std::size_t snapshot, Fn&& fn) const {
    std::vector<double> out;
    out.reserve(replicas.size());
    for (const auto& r : replicas) out.push_back(static_cast<double>(fn(r.snapshots.at(snapshot))));
    return out;
  }
};

ReplicaResults RunReplicas(const ExperimentConfig& config,
                           const Trajectory* traj = nullptr);

// One JSON object per replica and line.
void WriteNdjson(const ReplicaResults& results, std::ostream& os);

struct CheckReport {
  std::string name;
  bool passed = false;
  double statistic = 0.0;
  double threshold = 0.0;
  std::string comparison = "<=";
  std::uint64_t seed = 0;
  nlohmann::json details = nlohmann::json::object();
  nlohmann::json guards = nlohmann::json::object();
  std::vector<std::string> warnings;

  nlohmann::json ToJson() const;
};

CheckReport CheckConcentration(const ReplicaResults& results, double omega,
                               double min_fraction = 0.99);

// Empirical mean of T_k against n rho_k / k; the table's standard errors
// enter the z denominator alongside the replica spread.
CheckReport CheckTreeCounts(const ReplicaResults& results, std::size_t snapshot,
                            const RhoTable& rho, double max_z = 3.0);

// mu holds mu_k^0 per k.
CheckReport CheckPairFactorization(const ReplicaResults& results, std::size_t snapshot,
                                   const RhoTable& mu,
                                   const std::vector<std::pair<int, int>>& pairs,
                                   double max_z = 3.0);

CheckReport CheckPoissonWindow(const ReplicaResults& results, std::size_t snapshot,
                               std::uint64_t K1, std::uint64_t K2, double lambda,
                               double max_gap = 0.05, double min_y_zero = 0.99);

CheckReport CheckNontreeScarcity(const ReplicaResults& results, std::size_t snapshot,
                                 const std::vector<int>& ks, double constant = 20.0);

CheckReport CheckGap(const ReplicaResults& results, std::size_t snapshot,
                     std::uint64_t K, double max_fraction = 0.0);

CheckReport CheckSmallVertexMass(const ReplicaResults& results, std::size_t snapshot,
                                 std::uint64_t K, double rho_giant, double eps,
                                 double band_constant = 10.0,
                                 double min_fraction = 0.95);

CheckReport CheckGiant(const ReplicaResults& results, std::size_t snapshot,
                       std::uint64_t K, double rho_giant, double eps,
                       double band_constant = 10.0, double min_band_fraction = 0.95,
                       double min_single_fraction = 0.99);

// N_k / n against rho_k, z-scored against the replica spread plus the
// table's standard error.
CheckReport CheckDensities(const ReplicaResults& results, std::size_t snapshot,
                           const RhoTable& rho, double max_z = 3.0);

// Subcritical (eps < 0) uses L1, supercritical uses L2. When `densities` is
// given, the details also carry the finite-n comparison
// P(L <= l) ~ exp(-lambda_{l+1}) with lambda from those densities (fitted
// form beyond the table).
CheckReport ExtremeValueExperiment(const ReplicaResults& results, std::size_t snapshot,
                                   const FitResult& fit, double eps,
                                   double max_ks = 0.15,
                                   const RhoTable* densities = nullptr);

struct EdgeFrequencyConfig {
  std::uint64_t n = 30;
  RuleSpec rule = RuleSpec::BohmanFrieze();
  std::uint64_t seed = 1;
  std::uint64_t prefix_steps = 0;  // graph is frozen after this many steps
  std::uint64_t trials = 10'000'000;
  double max_z = 3.0;
};

// Exact probability that each unordered pair is the chosen edge at the
// next step of `state`, indexed like PairIndex.
std::vector<double> ExactEdgeProbabilities(const ProcessState& state);

std::size_t PairIndex(std::uint64_t n, Vertex a, Vertex b);

CheckReport CheckConditionalEdgeFrequencies(const EdgeFrequencyConfig& config);

// N_k / n over replicas: mean and standard error, for k in [k_lo, k_hi].
RhoTable SimulatedRho(const ReplicaResults& results, std::size_t snapshot,
                      int k_lo, int k_hi);

}  // namespace bfsim

#endif  // BFSIM_HARNESS_HPP_
