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


#ifndef BFSIM_CRITICALITY_HPP_
#define BFSIM_CRITICALITY_HPP_

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "bfsim/process.hpp"
#include "json.hpp"

namespace bfsim {

struct RhoPoint {
  double value = 0.0;
  double std_error = 0.0;
};

// k -> rho_k(t) with its standard error.
using RhoTable = std::map<int, RhoPoint>;

// Fit of rho_k ~ gamma k^{-3/2} e^{-delta k}.
struct FitResult {
  double t = 0.0;
  double delta = 0.0;
  double gamma = 0.0;
  double delta_se = 0.0;
  double log_gamma_se = 0.0;
  int k_min = 0;
  int k_max = 0;
  double residual = 0.0;  // weighted RMS in log space

  nlohmann::json ToJson() const;
};

struct FitOptions {
  // Relative errors are floored here before weighting, so entries with a
  // zero standard error (deterministic quadrature) do not swamp the fit.
  double rel_error_floor = 1e-3;
};

FitResult FitDeltaGamma(const RhoTable& rho, double t, int k_min, int k_max,
                        const FitOptions& options = {});

// gamma k^{-3/2} e^{-delta k}
double FittedRho(const FitResult& fit, double k);

struct LambdaOptions {
  // rho_source is used below k_switch, the fitted form from k_switch on.
  int k_switch = std::numeric_limits<int>::max();
  // Summation stops here (or earlier once the fitted terms are negligible).
  std::int64_t k_limit = 1'000'000;
  // Exclusive upper window edge; unbounded by default.
  std::int64_t k_end = std::numeric_limits<std::int64_t>::max();
};

// sum_{K <= k < k_end} n rho_k / k.
double LambdaK(std::int64_t K, double n, const std::function<double(int)>& rho,
               const std::optional<FitResult>& tail_fit,
               const LambdaOptions& options = {});

// n alpha K^{-5/2} e^{-delta K}, alpha = gamma / (1 - e^{-delta}).
double LambdaKAsymptotic(std::int64_t K, double n, const FitResult& fit);

double COfT(const FitResult& fit, double eps);

// delta^{-1} (log(|eps|^3 n) - 5/2 log log(|eps|^3 n) + c + x)
double PredictLQuantile(double n, double eps, const FitResult& fit, double x);

// The centring term subtracted from delta * L to obtain the Gumbel variable.
double GumbelCentre(double n, double eps, const FitResult& fit);

struct GiantEstimate {
  double value = 0.0;
  double truncation = 0.0;  // fitted tail mass beyond k_cut
};

GiantEstimate RhoGiant(int k_cut, const std::function<double(int)>& rho,
                       const std::optional<FitResult>& tail_fit);

struct TcSweepConfig {
  RuleSpec rule = RuleSpec::BohmanFrieze();
  std::vector<double> t_grid;
  std::vector<std::uint64_t> n_ladder;
  int replicas = 20;
  std::uint64_t seed = 1;
  int xi_window = 10;
  int bootstrap = 400;
  double confidence = 0.95;
  int threads = 1;

  nlohmann::json ToJson() const;
};

struct SusceptibilityPeak {
  std::uint64_t n = 0;
  double t_peak = 0.0;
  double chi_peak = 0.0;
};

struct CriticalityReport {
  double tc = 0.0;
  double tc_lo = 0.0;
  double tc_hi = 0.0;
  double xi = 0.0;
  double xi_se = 0.0;
  std::vector<SusceptibilityPeak> peaks;
  std::vector<FitResult> fits;
  TcSweepConfig config;

  nlohmann::json ToJson() const;
};

CriticalityReport EstimateTc(const TcSweepConfig& config);

}  // namespace bfsim

#endif  // BFSIM_CRITICALITY_HPP_
