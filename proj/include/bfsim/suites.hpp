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


#ifndef BFSIM_SUITES_HPP_
#define BFSIM_SUITES_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "bfsim/harness.hpp"
#include "json.hpp"

namespace bfsim {

// Scales, replica counts and thresholds of the named verification suites.
// Defaults are the desk-scale reference configuration.
struct SuiteOptions {
  std::uint64_t seed = 20261016;
  int threads = 1;
  double omega = 10.0;
  std::uint64_t n_large = 1'000'000;
  std::uint64_t n_medium = 100'000;
  double eps = 0.1;  // distance from tc of the off-critical BF snapshots
  double gap_t_sub = 0.2;

  int replicas_medium = 200;
  int replicas_concentration = 100;
  int replicas_gap = 100;
  int replicas_poisson = 400;
  int replicas_extreme = 300;
  int pilot_sub = 600;
  int pilot_super = 60;
  int tc_replicas = 100;
  std::uint64_t mc_samples = 1'000'000;
  std::uint64_t edge_trials = 10'000'000;

  double max_z = 3.0;
  double ode_identity_tol = 1e-8;
  double ode_ratio_lo = 12.0;
  double ode_ratio_hi = 20.0;
  double er_quad_tol = 1e-6;
  double er_tc_tol = 0.01;
  double concentration_fraction = 0.99;
  double concentration_c = 1.5;
  double nontree_constant = 20.0;
  double poisson_gap = 0.05;
  double poisson_y_zero = 0.99;
  double gap_fraction = 0.0;
  double ks_max = 0.15;
  double giant_band_constant = 10.0;
  double giant_band_fraction = 0.95;
  double giant_single_fraction = 0.99;
  double fd_tol = 1e-4;
  double mult_tol = 1e-9;

  std::function<void(const std::string&)> progress;

  nlohmann::json ToJson() const;
  // Overrides from a JSON object; unknown keys are rejected.
  void Merge(const nlohmann::json& j);
};

// Density fit at an off-critical time: quadrature densities for k <= 8
// joined with simulated densities (pilot replicas at size n) for
// 8 < k <= k_fit_max, fitted over [5, k_fit_max].
struct OffCriticalFit {
  FitResult fit;
  RhoTable joined;
  RhoTable simulated;  // pilot N_k / n for 1 <= k <= 2000
  ReplicaResults pilot;
};

OffCriticalFit FitOffCritical(const RuleSpec& rule, double t, std::uint64_t n,
                              int pilot_replicas, std::uint64_t seed, int threads,
                              const Trajectory& traj, int k_fit_max = 40);

struct SuiteReport {
  std::string name;
  bool passed = false;
  std::vector<CheckReport> checks;
  nlohmann::json context = nlohmann::json::object();

  nlohmann::json ToJson() const;
};

// Runs named suites, sharing expensive simulations between them.
class VerifyContext {
 public:
  explicit VerifyContext(SuiteOptions options);
  ~VerifyContext();

  static const std::vector<std::string>& SuiteNames();

  SuiteReport Run(const std::string& suite);

  const SuiteOptions& options() const { return options_; }

  struct State;  // cached simulations, defined in the implementation

 private:
  SuiteOptions options_;
  std::unique_ptr<State> state_;
};

}  // namespace bfsim

#endif  // BFSIM_SUITES_HPP_
