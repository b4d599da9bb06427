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


#include "bfsim/criticality.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bfsim/error.hpp"
#include "bfsim/parallel.hpp"
#include "bfsim/rng.hpp"
#include "bfsim/stats.hpp"

namespace bfsim {

nlohmann::json FitResult::ToJson() const {
  return {{"t", t},
          {"delta", delta},
          {"gamma", gamma},
          {"delta_se", delta_se},
          {"log_gamma_se", log_gamma_se},
          {"k_range", {k_min, k_max}},
          {"residual", residual}};
}

FitResult FitDeltaGamma(const RhoTable& rho, double t, int k_min, int k_max,
                        const FitOptions& options) {
  Require(k_min >= 3, ErrorCode::kInvalidArgument, "k_min must be at least 3");
  Require(k_max - k_min >= 2, ErrorCode::kInvalidArgument,
          "degenerate design: need k_max - k_min >= 2");
  std::vector<double> x, y, w;
  for (int k = k_min; k <= k_max; ++k) {
    const auto it = rho.find(k);
    Require(it != rho.end(), ErrorCode::kInvalidInput,
            "rho table has no entry for k=" + std::to_string(k));
    const RhoPoint& p = it->second;
    Require(p.value > 0.0 && std::isfinite(p.value), ErrorCode::kInvalidInput,
            "nonpositive rho at k=" + std::to_string(k));
    const double rel = std::max(p.std_error / p.value, options.rel_error_floor);
    x.push_back(k);
    y.push_back(std::log(p.value) + 1.5 * std::log(static_cast<double>(k)));
    w.push_back(1.0 / (rel * rel));
  }
  const LineFit line = FitLine(x, y, w);
  FitResult f;
  f.t = t;
  f.delta = -line.slope;
  f.gamma = std::exp(line.intercept);
  f.delta_se = line.slope_se;
  f.log_gamma_se = line.intercept_se;
  f.k_min = k_min;
  f.k_max = k_max;
  f.residual = line.weighted_rms;
  // Noiseless data can land a hair below zero at the critical point.
  if (f.delta < 0.0 && f.delta > -1e-12) f.delta = 0.0;
  Require(f.delta >= 0.0, ErrorCode::kInvalidInput,
          "fitted decay rate is negative; densities grow with k");
  return f;
}

double FittedRho(const FitResult& fit, double k) {
  return fit.gamma * std::pow(k, -1.5) * std::exp(-fit.delta * k);
}

namespace {

// sum_{k >= k0} gamma k^{-p} e^{-delta k}, with an integral bound for what
// lies past k_limit.
double FittedTail(const FitResult& fit, std::int64_t k0, std::int64_t k_end,
                  std::int64_t k_limit, double p) {
  double sum = 0.0;
  std::int64_t k = k0;
  for (; k < k_end && k <= k_limit; ++k) {
    const double kd = static_cast<double>(k);
    const double term = fit.gamma * std::pow(kd, -p) * std::exp(-fit.delta * kd);
    sum += term;
    if (term < 1e-17 * sum) return sum;
  }
  if (k < k_end) {
    const double kd = static_cast<double>(k);
    sum += fit.gamma * std::pow(kd, 1.0 - p) / (p - 1.0) *
           std::exp(-fit.delta * kd);
  }
  return sum;
}

}  // namespace

double LambdaK(std::int64_t K, double n, const std::function<double(int)>& rho,
               const std::optional<FitResult>& tail_fit,
               const LambdaOptions& options) {
  Require(K >= 1, ErrorCode::kInvalidArgument, "K must be at least 1");
  Require(n >= 1.0, ErrorCode::kInvalidArgument, "n must be at least 1");
  double sum = 0.0;
  const std::int64_t direct_end =
      std::min({options.k_end, static_cast<std::int64_t>(options.k_switch),
                options.k_limit + 1});
  for (std::int64_t k = K; k < direct_end; ++k) {
    sum += rho(static_cast<int>(k)) / static_cast<double>(k);
  }
  const std::int64_t tail_start = std::max<std::int64_t>(K, options.k_switch);
  if (tail_start < options.k_end && tail_start <= options.k_limit) {
    if (!tail_fit) {
      Fail(ErrorCode::kInvalidState, "tail of lambda_K needs a fitted (delta, gamma)");
    }
    sum += FittedTail(*tail_fit, tail_start, options.k_end, options.k_limit, 2.5);
  }
  return n * sum;
}

double LambdaKAsymptotic(std::int64_t K, double n, const FitResult& fit) {
  Require(K >= 1, ErrorCode::kInvalidArgument, "K must be at least 1");
  if (!(fit.delta > 0.0)) Fail(ErrorCode::kSingularInput, "delta must be positive");
  const double alpha = fit.gamma / (1.0 - std::exp(-fit.delta));
  const double kd = static_cast<double>(K);
  return n * alpha * std::pow(kd, -2.5) * std::exp(-fit.delta * kd);
}

double COfT(const FitResult& fit, double eps) {
  if (!(fit.delta > 0.0)) Fail(ErrorCode::kSingularInput, "delta must be positive");
  Require(eps != 0.0, ErrorCode::kInvalidArgument, "eps must be nonzero");
  Require(fit.gamma > 0.0, ErrorCode::kInvalidArgument, "gamma must be positive");
  return std::log(fit.gamma) + 2.5 * std::log(fit.delta) -
         std::log1p(-std::exp(-fit.delta)) - 3.0 * std::log(std::fabs(eps));
}

double GumbelCentre(double n, double eps, const FitResult& fit) {
  const double scale = std::pow(std::fabs(eps), 3) * n;
  if (!(scale > std::exp(1.0))) {
    Fail(ErrorCode::kOutOfRegime,
         "|eps|^3 n = " + std::to_string(scale) + " is not above e");
  }
  const double ls = std::log(scale);
  return ls - 2.5 * std::log(ls) + COfT(fit, eps);
}

double PredictLQuantile(double n, double eps, const FitResult& fit, double x) {
  return (GumbelCentre(n, eps, fit) + x) / fit.delta;
}

GiantEstimate RhoGiant(int k_cut, const std::function<double(int)>& rho,
                       const std::optional<FitResult>& tail_fit) {
  Require(k_cut >= 1, ErrorCode::kInvalidArgument, "k_cut must be at least 1");
  double small = 0.0;
  for (int k = 1; k <= k_cut; ++k) small += rho(k);
  GiantEstimate g;
  if (tail_fit) {
    g.truncation = FittedTail(*tail_fit, static_cast<std::int64_t>(k_cut) + 1,
                              std::numeric_limits<std::int64_t>::max(),
                              10'000'000, 1.5);
  }
  g.value = 1.0 - small - g.truncation;
  return g;
}

nlohmann::json TcSweepConfig::ToJson() const {
  return {{"rule", rule.ToJson()},   {"t_grid", t_grid},
          {"n_ladder", n_ladder},    {"replicas", replicas},
          {"seed", seed},            {"xi_window", xi_window},
          {"bootstrap", bootstrap},  {"confidence", confidence}};
}

nlohmann::json CriticalityReport::ToJson() const {
  nlohmann::json peaks_json = nlohmann::json::array();
  for (const auto& p : peaks) {
    peaks_json.push_back({{"n", p.n}, {"t_peak", p.t_peak}, {"chi_peak", p.chi_peak}});
  }
  nlohmann::json fits_json = nlohmann::json::array();
  for (const auto& f : fits) fits_json.push_back(f.ToJson());
  return {{"schema", "bfsim.critical/1"},
          {"tc", tc},
          {"tc_ci", {tc_lo, tc_hi}},
          {"xi", xi},
          {"xi_se", xi_se},
          {"peaks", peaks_json},
          {"fits", fits_json},
          {"config", config.ToJson()}};
}

namespace {

struct Peak {
  double t = 0.0;
  double chi = 0.0;
  bool at_edge = false;
};

Peak LocatePeak(const std::vector<double>& t, const std::vector<double>& chi) {
  const auto i = static_cast<std::size_t>(
      std::max_element(chi.begin(), chi.end()) - chi.begin());
  Peak p{t[i], chi[i], i == 0 || i + 1 == chi.size()};
  if (p.at_edge) return p;
  // Vertex of the parabola through the three points around the maximum.
  const double x0 = t[i - 1], x1 = t[i], x2 = t[i + 1];
  const double y0 = chi[i - 1], y1 = chi[i], y2 = chi[i + 1];
  const double denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
  const double a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
  const double b =
      (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
  if (a < 0.0) p.t = std::clamp(-b / (2.0 * a), x0, x2);
  return p;
}

double Extrapolate(const std::vector<std::uint64_t>& ns,
                   const std::vector<double>& t_peak) {
  if (ns.size() == 1) return t_peak[0];
  std::vector<double> x;
  for (auto n : ns) x.push_back(std::cbrt(1.0 / static_cast<double>(n)));
  return FitLine(x, t_peak).intercept;
}

}  // namespace

CriticalityReport EstimateTc(const TcSweepConfig& config) {
  const auto& grid = config.t_grid;
  Require(grid.size() >= 3, ErrorCode::kInvalidArgument,
          "t grid needs at least three points");
  Require(grid.front() >= 0.0, ErrorCode::kInvalidArgument, "t grid must be nonnegative");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    Require(grid[i] > grid[i - 1], ErrorCode::kInvalidArgument,
            "t grid must be strictly increasing");
  }
  Require(!config.n_ladder.empty(), ErrorCode::kInvalidArgument, "empty n ladder");
  Require(config.replicas >= 2, ErrorCode::kInvalidArgument,
          "need at least two replicas for an interval");
  Require(config.bootstrap >= 10, ErrorCode::kInvalidArgument,
          "need at least 10 bootstrap resamples");
  Require(config.confidence > 0.0 && config.confidence < 1.0,
          ErrorCode::kInvalidArgument, "confidence must lie in (0, 1)");
  Require(config.xi_window >= 2, ErrorCode::kInvalidArgument, "xi window needs >= 2 points");

  const std::size_t na = config.n_ladder.size();
  const auto nr = static_cast<std::size_t>(config.replicas);
  const std::size_t ng = grid.size();
  // [a][r][g]
  std::vector<std::vector<std::vector<double>>> chi(
      na, std::vector<std::vector<double>>(nr, std::vector<double>(ng)));
  auto giant = chi;

  ParallelFor(na * nr, config.threads, [&](std::size_t job) {
    const std::size_t a = job / nr, r = job % nr;
    const std::uint64_t n = config.n_ladder[a];
    ProcessState ps(n, config.rule, Rng::DeriveSeed(Rng::DeriveSeed(config.seed, a), r));
    const double nd = static_cast<double>(n);
    for (std::size_t g = 0; g < ng; ++g) {
      ps.RunUntil(static_cast<std::uint64_t>(std::floor(grid[g] * nd)));
      const double l1 = static_cast<double>(ps.largest());
      chi[a][r][g] = (static_cast<double>(ps.sum_sq_sizes()) - l1 * l1) / nd;
      giant[a][r][g] = l1 / nd;
    }
  });

  auto mean_curve = [&](const std::vector<std::vector<double>>& curves,
                        const std::vector<std::size_t>& pick) {
    std::vector<double> m(ng, 0.0);
    for (auto r : pick) {
      for (std::size_t g = 0; g < ng; ++g) m[g] += curves[r][g];
    }
    for (auto& v : m) v /= static_cast<double>(pick.size());
    return m;
  };

  CriticalityReport rep;
  rep.config = config;
  std::vector<std::size_t> all(nr);
  for (std::size_t r = 0; r < nr; ++r) all[r] = r;
  std::vector<double> t_peak(na);
  for (std::size_t a = 0; a < na; ++a) {
    const Peak p = LocatePeak(grid, mean_curve(chi[a], all));
    if (p.at_edge) {
      Fail(ErrorCode::kOutOfRange,
           "susceptibility peaks at the grid edge for n=" +
               std::to_string(config.n_ladder[a]) + "; grid does not bracket takeoff");
    }
    t_peak[a] = p.t;
    rep.peaks.push_back({config.n_ladder[a], p.t, p.chi});
  }
  rep.tc = Extrapolate(config.n_ladder, t_peak);

  Rng rng(Rng::DeriveSeed(config.seed, 0xB0075742ULL));
  std::vector<double> boot;
  std::vector<std::size_t> pick(nr);
  for (int b = 0; b < config.bootstrap; ++b) {
    std::vector<double> tb(na);
    for (std::size_t a = 0; a < na; ++a) {
      for (auto& r : pick) r = rng.Below(nr);
      tb[a] = LocatePeak(grid, mean_curve(chi[a], pick)).t;
    }
    boot.push_back(Extrapolate(config.n_ladder, tb));
  }
  const double tail = 0.5 * (1.0 - config.confidence);
  rep.tc_lo = Quantile(boot, tail);
  rep.tc_hi = Quantile(boot, 1.0 - tail);

  // Slope of the giant fraction just above tc, at the largest n.
  const std::size_t top = static_cast<std::size_t>(
      std::max_element(config.n_ladder.begin(), config.n_ladder.end()) -
      config.n_ladder.begin());
  const std::vector<double> rho = mean_curve(giant[top], all);
  std::vector<double> x, y;
  for (std::size_t g = 0; g < ng && static_cast<int>(x.size()) < config.xi_window; ++g) {
    if (grid[g] > rep.tc) {
      x.push_back(grid[g] - rep.tc);
      y.push_back(rho[g]);
    }
  }
  if (x.size() < 2) {
    Fail(ErrorCode::kOutOfRange, "grid has fewer than two points above the estimated tc");
  }
  const LineFit xi = FitLine(x, y);
  rep.xi = xi.slope;
  rep.xi_se = xi.slope_se;
  return rep;
}

}  // namespace bfsim
