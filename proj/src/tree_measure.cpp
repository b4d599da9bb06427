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

#include "bfsim/tree_measure.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <string>

#include "bfsim/error.hpp"
#include "bfsim/rng.hpp"

namespace bfsim {

namespace {

struct GaussRule {
  std::vector<double> x;  // nodes on [-1, 1]
  std::vector<double> w;
  // integral[i * n + j]: weight of f(x_j) in int_{-1}^{x_i} of the degree
  // n - 1 interpolant of f through the nodes.
  std::vector<double> integral;
};

// Legendre P_0..P_{count-1} at x.
void LegendreValues(double x, int count, std::vector<double>& p) {
  p.assign(count, 0.0);
  p[0] = 1.0;
  if (count > 1) p[1] = x;
  for (int m = 1; m + 1 < count; ++m) {
    p[m + 1] = ((2.0 * m + 1.0) * x * p[m] - m * p[m - 1]) / (m + 1.0);
  }
}

std::unique_ptr<GaussRule> BuildGaussRule(int n) {
  auto rule = std::make_unique<GaussRule>();
  rule->x.resize(n);
  rule->w.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int m = 2; m <= n; ++m) {
        const double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule->x[n - 1 - i] = x;
    rule->w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  std::vector<std::vector<double>> p(n);
  for (int i = 0; i < n; ++i) LegendreValues(rule->x[i], n + 1, p[i]);
  rule->integral.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double s = 0.5 * (rule->x[i] + 1.0);
      for (int m = 1; m < n; ++m) {
        s += 0.5 * p[j][m] * (p[i][m + 1] - p[i][m - 1]);
      }
      rule->integral[static_cast<std::size_t>(i) * n + j] = rule->w[j] * s;
    }
  }
  return rule;
}

const GaussRule& GetGaussRule(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = BuildGaussRule(n);
  return *slot;
}

bool IsEr(const Trajectory& traj) { return traj.mode() == TrajectoryMode::kEr; }

double GFactor(const Trajectory& traj, int alpha, double s) {
  if (IsEr(traj)) return 2.0;
  const double r = traj.Rho1At(s);
  return 2.0 * (alpha - r * r);
}

// Shared replay of one arrival vector; buffers are reused across samples.
class Integrand {
 public:
  explicit Integrand(const LabeledForest& h)
      : h_(h), order_(h.num_edges()), isolated_(h.k()), first_(h.k()) {}

  double G(const std::vector<double>& times, const Trajectory& traj) {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      return times[a] < times[b] || (times[a] == times[b] && a < b);
    });
    std::fill(isolated_.begin(), isolated_.end(), 1);
    double prod = 1.0;
    for (std::size_t j : order_) {
      const Edge& e = h_.edges()[j];
      const int alpha = isolated_[e.u] && isolated_[e.v] ? 2 : 1;
      prod *= GFactor(traj, alpha, times[j]);
      isolated_[e.u] = isolated_[e.v] = 0;
    }
    return prod;
  }

  double F(const std::vector<double>& times, const Trajectory& traj, double t) {
    const int k = h_.k();
    if (IsEr(traj)) return 2.0 * k * t;
    std::fill(first_.begin(), first_.end(), t);
    for (std::size_t j = 0; j < times.size(); ++j) {
      const Edge& e = h_.edges()[j];
      first_[e.u] = std::min(first_[e.u], times[j]);
      first_[e.v] = std::min(first_[e.v], times[j]);
    }
    double f = 2.0 * k * traj.IntegralsAt(t).A;
    for (double tv : first_) f += 2.0 * traj.IntegralsAt(tv).B;
    return f;
  }

 private:
  const LabeledForest& h_;
  std::vector<std::size_t> order_;
  std::vector<char> isolated_;
  std::vector<double> first_;
};

void CheckArrivals(const LabeledForest& h, const ArrivalTimes& arrivals) {
  Require(arrivals.times.size() == h.num_edges(), ErrorCode::kInvalidArgument,
          "need exactly one arrival time per edge");
  for (double s : arrivals.times) {
    Require(s >= 0.0 && std::isfinite(s), ErrorCode::kInvalidArgument,
            "arrival times must be non-negative");
  }
}

double Factorial(int k) { return std::tgamma(k + 1.0); }

}  // namespace

const char* MuMethodName(MuMethod method) {
  switch (method) {
    case MuMethod::kMonteCarlo:
      return "mc";
    case MuMethod::kQuadrature:
      return "quad";
    case MuMethod::kClosedFormEr:
      return "closed_form_er";
  }
  return "unknown";
}

double GProduct(const LabeledForest& h, const ArrivalTimes& arrivals,
                const Trajectory& traj) {
  CheckArrivals(h, arrivals);
  return Integrand(h).G(arrivals.times, traj);
}

double FHat(const LabeledForest& h, const ArrivalTimes& arrivals,
            const Trajectory& traj, double t) {
  CheckArrivals(h, arrivals);
  for (double s : arrivals.times) {
    Require(s <= t, ErrorCode::kInvalidArgument,
            "arrival times must not exceed the horizon");
  }
  return Integrand(h).F(arrivals.times, traj, t);
}

MuEstimate MuGraphMc(const LabeledForest& h, double t, const Trajectory& traj,
                     std::uint64_t samples, std::uint64_t seed) {
  Require(samples >= 1, ErrorCode::kInvalidArgument, "samples must be >= 1");
  Require(t >= 0.0 && t <= traj.t_max(), ErrorCode::kInvalidArgument,
          "t outside the trajectory horizon");
  const std::size_t dims = h.num_edges();
  Integrand integrand(h);
  std::vector<double> times(dims);
  MuEstimate est;
  est.method = MuMethod::kMonteCarlo;
  est.samples = samples;
  if (dims == 0) {
    est.value = std::exp(-integrand.F(times, traj, t));
    return est;
  }
  Rng rng(seed);
  double mean = 0.0;
  double m2 = 0.0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    for (auto& s : times) s = t * rng.Uniform();
    const double y =
        integrand.G(times, traj) * std::exp(-integrand.F(times, traj, t));
    const double delta = y - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (y - mean);
  }
  const double volume = std::pow(t, static_cast<double>(dims));
  est.value = volume * mean;
  est.std_error =
      samples > 1 ? volume * std::sqrt(m2 / static_cast<double>(samples - 1) /
                                       static_cast<double>(samples))
                  : 0.0;
  return est;
}

MuEstimate MuGraphQuad(const LabeledForest& h, double t, const Trajectory& traj,
                       const QuadOptions& options) {
  const int ell = static_cast<int>(h.num_edges());
  Require(ell <= options.max_edges, ErrorCode::kUnsupportedSize,
          "quadrature supports at most " + std::to_string(options.max_edges) +
              " edges, got " + std::to_string(ell));
  Require(options.nodes >= 2 && options.nodes <= 512,
          ErrorCode::kInvalidArgument, "quadrature nodes must lie in [2, 512]");
  Require(t >= 0.0 && t <= traj.t_max(), ErrorCode::kInvalidArgument,
          "t outside the trajectory horizon");

  const int k = h.k();
  int bare = k;  // vertices with no edge in h
  {
    std::vector<char> touched(k, 0);
    for (const auto& e : h.edges()) touched[e.u] = touched[e.v] = 1;
    for (char c : touched) bare -= c;
  }
  double log_const;
  if (IsEr(traj)) {
    log_const = -2.0 * k * t;
  } else {
    const auto at = traj.IntegralsAt(t);
    log_const = -2.0 * k * at.A - 2.0 * bare * at.B;
  }
  MuEstimate est;
  est.method = MuMethod::kQuadrature;
  if (ell == 0) {
    est.value = std::exp(log_const);
    return est;
  }

  const GaussRule& rule = GetGaussRule(options.nodes);
  const int n = options.nodes;
  const double half = 0.5 * t;
  // phi[c][i]: one-dimensional factor at node i for an edge that de-isolates
  // c of its endpoints, g(alpha) * exp(-2 c B(s)).
  std::vector<double> phi[3];
  for (int c = 0; c < 3; ++c) {
    phi[c].resize(n);
    for (int i = 0; i < n; ++i) {
      const double s = half * (rule.x[i] + 1.0);
      const int alpha = c == 2 ? 2 : 1;
      double v = GFactor(traj, alpha, s);
      if (!IsEr(traj)) v *= std::exp(-2.0 * c * traj.IntegralsAt(s).B);
      phi[c][i] = v;
    }
  }

  auto ordered_integral = [&](const std::vector<int>& signature) {
    std::vector<double> g(n, 1.0);
    std::vector<double> tmp(n);
    for (int j = 0; j + 1 < ell; ++j) {
      for (int i = 0; i < n; ++i) tmp[i] = phi[signature[j]][i] * g[i];
      for (int i = 0; i < n; ++i) {
        const double* row = &rule.integral[static_cast<std::size_t>(i) * n];
        double acc = 0.0;
        for (int q = 0; q < n; ++q) acc += row[q] * tmp[q];
        g[i] = half * acc;
      }
    }
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += rule.w[i] * phi[signature[ell - 1]][i] * g[i];
    return half * acc;
  };

  std::map<std::vector<int>, double> memo;
  std::vector<int> perm(ell);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<char> isolated(k);
  std::vector<int> signature(ell);
  double total = 0.0;
  do {
    std::fill(isolated.begin(), isolated.end(), 1);
    for (int j = 0; j < ell; ++j) {
      const Edge& e = h.edges()[perm[j]];
      signature[j] = isolated[e.u] + isolated[e.v];
      isolated[e.u] = isolated[e.v] = 0;
    }
    auto it = memo.find(signature);
    if (it == memo.end()) {
      it = memo.emplace(signature, ordered_integral(signature)).first;
    }
    total += it->second;
  } while (std::next_permutation(perm.begin(), perm.end()));

  est.value = std::exp(log_const) * total;
  return est;
}

double ErModeMuClosedForm(int k, double t) {
  Require(k >= 1, ErrorCode::kInvalidArgument, "k must be >= 1");
  Require(t >= 0.0, ErrorCode::kInvalidArgument, "t must be >= 0");
  if (k == 1) return std::exp(-2.0 * t);
  if (t == 0.0) return 0.0;
  return std::exp((k - 2) * std::log(static_cast<double>(k)) +
                  (k - 1) * std::log(2.0 * t) - 2.0 * k * t -
                  std::lgamma(k + 1.0));
}

MuEstimate TreeMeasure::MuK0(int k, double t) {
  Require(k >= 1 && k <= options_.k_max, ErrorCode::kInvalidArgument,
          "k outside [1, k_max]");
  if (options_.method == MuMethod::kClosedFormEr) {
    Require(IsEr(traj_), ErrorCode::kInvalidArgument,
            "closed form applies to Erdos-Renyi trajectories only");
    return {ErModeMuClosedForm(k, t), 0.0, MuMethod::kClosedFormEr, 0};
  }
  const auto& classes = TreeClasses(k, options_.k_max);
  double value = 0.0;
  double var = 0.0;
  std::uint64_t samples = 0;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const Key key{classes[c].canonical, t, options_.method};
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      MuEstimate e =
          options_.method == MuMethod::kQuadrature
              ? MuGraphQuad(classes[c].representative, t, traj_, options_.quad)
              : MuGraphMc(classes[c].representative, t, traj_, options_.samples,
                          Rng::DeriveSeed(options_.seed,
                                          static_cast<std::uint64_t>(k) * 1000 + c));
      it = cache_.emplace(key, e).first;
    }
    const double w = static_cast<double>(classes[c].count);
    value += w * it->second.value;
    var += w * w * it->second.std_error * it->second.std_error;
    samples += it->second.samples;
  }
  const double norm = Factorial(k);
  return {value / norm, std::sqrt(var) / norm, options_.method, samples};
}

MuEstimate TreeMeasure::RhoK(int k, double t) {
  MuEstimate e = MuK0(k, t);
  e.value *= k;
  e.std_error *= k;
  return e;
}

MuEstimate MuK0(int k, double t, const Trajectory& traj,
                const MuOptions& options) {
  return TreeMeasure(traj, options).MuK0(k, t);
}

MuEstimate RhoK(int k, double t, const Trajectory& traj,
                const MuOptions& options) {
  return TreeMeasure(traj, options).RhoK(k, t);
}

}  // namespace bfsim
