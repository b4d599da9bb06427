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


#include "bfsim/harness.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "bfsim/error.hpp"
#include "bfsim/parallel.hpp"
#include "bfsim/rng.hpp"
#include "bfsim/stats.hpp"

namespace bfsim {

nlohmann::json RegimeGuards::ToJson() const {
  return {{"eps", eps},
          {"eps_n_quarter_over_sqrt_log_n", eps_guard},
          {"eps6_n", eps6n},
          {"eps3_n", eps3n},
          {"sqrt_n_over_omega_k", sqrt_n_over_omega_k},
          {"eps_guard_large", eps_guard_large},
          {"eps6n_large", eps6n_large},
          {"k_small", k_small},
          {"outside_proven_regime", outside_proven_regime}};
}

RegimeGuards EvaluateGuards(double n, double eps, double omega, double k,
                            double large) {
  RegimeGuards g;
  g.eps = eps;
  const double ae = std::fabs(eps);
  g.eps_guard = ae * std::pow(n, 0.25) / std::sqrt(std::log(n));
  g.eps6n = std::pow(ae, 6) * n;
  g.eps3n = std::pow(ae, 3) * n;
  g.sqrt_n_over_omega_k = k > 0 ? std::sqrt(n) / (omega * k) : 0.0;
  g.eps_guard_large = g.eps_guard >= large;
  g.eps6n_large = g.eps6n >= large;
  g.k_small = g.sqrt_n_over_omega_k >= large;
  g.outside_proven_regime = g.eps3n >= large && !g.eps_guard_large;
  return g;
}

std::vector<std::uint64_t> ExperimentConfig::SnapshotSteps() const {
  if (!m.empty()) return m;
  std::vector<std::uint64_t> steps;
  for (double ti : t) {
    steps.push_back(static_cast<std::uint64_t>(std::floor(ti * static_cast<double>(n))));
  }
  return steps;
}

std::uint64_t ExperimentConfig::ResolvedK() const {
  if (K != 0) return K;
  const double k = std::floor(std::sqrt(static_cast<double>(n)) / (omega * omega));
  return static_cast<std::uint64_t>(std::max(k, 1.0));
}

std::uint64_t ExperimentConfig::ResolvedStride() const {
  return trace_stride != 0 ? trace_stride : std::max<std::uint64_t>(1, n / 1000);
}

std::uint64_t ExperimentConfig::SeedFor(int replica) const {
  return Rng::DeriveSeed(master_seed, static_cast<std::uint64_t>(replica));
}

nlohmann::json ExperimentConfig::ToJson() const {
  nlohmann::json j = {{"n", n},
                      {"t", t},
                      {"m", SnapshotSteps()},
                      {"rule", rule.ToJson()},
                      {"replicas", replicas},
                      {"seed", master_seed},
                      {"omega", omega},
                      {"K", ResolvedK()},
                      {"K1", K1},
                      {"K2", K2},
                      {"x_grid", x_grid},
                      {"trace_t_max", trace_t_max},
                      {"trace_stride", ResolvedStride()},
                      {"num_largest", num_largest},
                      {"threads", threads}};
  if (tc) j["tc"] = *tc;
  return j;
}

namespace {

template <class T>
std::vector<T> OneOrMany(const nlohmann::json& v) {
  if (v.is_array()) return v.get<std::vector<T>>();
  return {v.get<T>()};
}

}  // namespace

ExperimentConfig ExperimentConfig::FromJson(const nlohmann::json& j) {
  static const std::set<std::string> kKeys = {
      "n",     "t",     "m",           "rule",         "replicas",    "seed",
      "omega", "K",     "K1",          "K2",           "x_grid",      "trace_t_max",
      "trace_stride",   "num_largest", "threads",      "tc"};
  Require(j.is_object(), ErrorCode::kInvalidInput, "experiment config must be an object");
  for (const auto& [key, _] : j.items()) {
    Require(kKeys.count(key) > 0, ErrorCode::kInvalidInput, "unknown config key '" + key + "'");
  }
  ExperimentConfig c;
  try {
    if (j.contains("n")) c.n = j["n"].get<std::uint64_t>();
    if (j.contains("t")) c.t = OneOrMany<double>(j["t"]);
    // "m" echoes resolved steps; it only applies when no times are given.
    if (j.contains("m") && c.t.empty()) c.m = OneOrMany<std::uint64_t>(j["m"]);
    if (j.contains("rule")) {
      const auto& r = j["rule"];
      c.rule = r.is_string() ? RuleSpec::FromJson({{"mode", r.get<std::string>()}})
                             : RuleSpec::FromJson(r);
    }
    if (j.contains("replicas")) c.replicas = j["replicas"].get<int>();
    if (j.contains("seed")) c.master_seed = j["seed"].get<std::uint64_t>();
    if (j.contains("omega")) c.omega = j["omega"].get<double>();
    if (j.contains("K")) c.K = j["K"].get<std::uint64_t>();
    if (j.contains("K1")) c.K1 = j["K1"].get<std::uint64_t>();
    if (j.contains("K2")) c.K2 = j["K2"].get<std::uint64_t>();
    if (j.contains("x_grid")) c.x_grid = j["x_grid"].get<std::vector<double>>();
    if (j.contains("trace_t_max")) c.trace_t_max = j["trace_t_max"].get<double>();
    if (j.contains("trace_stride")) c.trace_stride = j["trace_stride"].get<std::uint64_t>();
    if (j.contains("num_largest")) c.num_largest = j["num_largest"].get<std::size_t>();
    if (j.contains("threads")) c.threads = j["threads"].get<int>();
    if (j.contains("tc") && !j["tc"].is_null()) c.tc = j["tc"].get<double>();
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kInvalidInput, std::string("bad experiment config: ") + e.what());
  }
  return c;
}

ReplicaResults RunReplicas(const ExperimentConfig& config, const Trajectory* traj) {
  Require(config.replicas >= 1, ErrorCode::kInvalidArgument, "replicas must be >= 1");
  Require(config.n >= 2, ErrorCode::kInvalidArgument, "n must be >= 2");
  Require(config.omega > 0.0, ErrorCode::kInvalidArgument, "omega must be positive");
  Require(config.num_largest >= 2, ErrorCode::kInvalidArgument, "num_largest must be >= 2");
  const auto steps = config.SnapshotSteps();
  for (std::size_t i = 1; i < steps.size(); ++i) {
    Require(steps[i] >= steps[i - 1], ErrorCode::kInvalidArgument,
            "snapshot times must be nondecreasing");
  }
  Require(config.trace_t_max >= 0.0, ErrorCode::kInvalidArgument, "trace_t_max must be >= 0");
  if (traj != nullptr) {
    Require(config.trace_t_max <= traj->t_max(), ErrorCode::kInvalidArgument,
            "trajectory does not cover the traced range");
  }
  // Each running replica holds parent, size and edge arrays.
  const double workers = std::min(config.threads, config.replicas);
  const double bytes = std::max(workers, 1.0) * static_cast<double>(config.n) * 16.0;
  if (bytes > 4.0 * (1ULL << 30)) {
    Fail(ErrorCode::kResourceLimit, "replica working set exceeds 4 GiB");
  }

  const double nd = static_cast<double>(config.n);
  const auto m_trace = static_cast<std::uint64_t>(std::floor(config.trace_t_max * nd));
  const std::uint64_t stride = config.ResolvedStride();
  const double sqrt_n = std::sqrt(nd);

  ReplicaResults out;
  out.config = config;
  out.replicas.resize(static_cast<std::size_t>(config.replicas));
  ParallelFor(out.replicas.size(), config.threads, [&](std::size_t r) {
    ReplicaResult& res = out.replicas[r];
    res.seed = config.SeedFor(static_cast<int>(r));
    ProcessState ps(config.n, config.rule, res.seed);
    const bool tracing = config.trace_t_max > 0.0;
    double dev = 0.0;
    if (tracing) res.isolated_trace.push_back(ps.isolated());
    auto observer = [&](const ProcessState& s) {
      const std::uint64_t m = s.steps();
      if (m > m_trace) return;
      if (traj != nullptr) {
        const double d = std::fabs(static_cast<double>(s.isolated()) / nd -
                                   traj->Rho1At(static_cast<double>(m) / nd));
        dev = std::max(dev, d);
      }
      if (m % stride == 0) res.isolated_trace.push_back(s.isolated());
    };
    for (std::uint64_t target : steps) {
      if (tracing && ps.steps() < m_trace) {
        ps.RunUntil(std::min(target, m_trace), observer);
      }
      ps.RunUntil(target);
      res.snapshots.push_back(ps.Census(config.num_largest));
    }
    if (tracing && ps.steps() < m_trace) ps.RunUntil(m_trace, observer);
    if (tracing && traj != nullptr) res.max_scaled_deviation = dev * sqrt_n;
  });
  return out;
}

void WriteNdjson(const ReplicaResults& results, std::ostream& os) {
  for (std::size_t r = 0; r < results.replicas.size(); ++r) {
    const auto& rep = results.replicas[r];
    nlohmann::json snaps = nlohmann::json::array();
    for (const auto& c : rep.snapshots) snaps.push_back(c.ToJson(rep.seed, results.config.rule));
    nlohmann::json line = {{"replica", r}, {"seed", rep.seed}, {"snapshots", snaps}};
    if (rep.max_scaled_deviation >= 0.0) line["max_scaled_deviation"] = rep.max_scaled_deviation;
    os << line.dump() << '\n';
  }
}

nlohmann::json CheckReport::ToJson() const {
  return {{"name", name},           {"passed", passed},
          {"statistic", statistic}, {"threshold", threshold},
          {"comparison", comparison}, {"seed", seed},
          {"details", details},     {"guards", guards},
          {"warnings", warnings}};
}

namespace {

CheckReport NewReport(const char* name, const ReplicaResults& results) {
  CheckReport rep;
  rep.name = name;
  rep.seed = results.config.master_seed;
  return rep;
}

void Finish(CheckReport& rep) {
  if (!std::isfinite(rep.statistic)) {
    rep.passed = false;
    return;
  }
  rep.passed = rep.comparison == "<=" ? rep.statistic <= rep.threshold
                                      : rep.statistic >= rep.threshold;
}

// Attaches regime guards when the critical time is known.
void AttachGuards(CheckReport& rep, const ReplicaResults& results, std::size_t snapshot,
                  double k) {
  const auto& cfg = results.config;
  if (!cfg.tc) return;
  const double nd = static_cast<double>(cfg.n);
  const double t = static_cast<double>(cfg.SnapshotSteps().at(snapshot)) / nd;
  const RegimeGuards g = EvaluateGuards(nd, t - *cfg.tc, cfg.omega, k);
  rep.guards = g.ToJson();
  if (!g.eps_guard_large) {
    rep.warnings.push_back("|eps| n^{1/4} (log n)^{-1/2} is not large at this scale");
  }
  if (!g.eps6n_large) rep.warnings.push_back("eps^6 n is not large at this scale");
  if (!g.k_small) rep.warnings.push_back("sqrt(n)/(omega k) is not large at this scale");
  if (g.outside_proven_regime) rep.warnings.push_back("outside proven regime");
}

double ZScore(double diff, double se) {
  if (se > 0.0) return diff / se;
  return diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff);
}

std::uint64_t CountInRange(const ComponentCensus& c, std::uint64_t lo, std::uint64_t hi,
                           bool trees) {
  const auto& counts = trees ? c.tree_counts : c.nontree_counts;
  std::uint64_t total = 0;
  for (auto it = counts.lower_bound(lo); it != counts.end() && it->first < hi; ++it) {
    total += it->second;
  }
  return total;
}

// Survival function of the chi-square law with three degrees of freedom.
double ChiSquare3Sf(double x) {
  if (x <= 0.0) return 1.0;
  return std::erfc(std::sqrt(x / 2.0)) +
         std::sqrt(2.0 * x / std::numbers::pi) * std::exp(-x / 2.0);
}

}  // namespace

CheckReport CheckConcentration(const ReplicaResults& results, double omega,
                               double min_fraction) {
  CheckReport rep = NewReport("concentration", results);
  std::vector<double> devs;
  for (const auto& r : results.replicas) {
    Require(r.max_scaled_deviation >= 0.0, ErrorCode::kInvalidState,
            "replicas were run without a trajectory");
    devs.push_back(r.max_scaled_deviation);
  }
  const auto within = std::count_if(devs.begin(), devs.end(),
                                    [&](double d) { return d <= omega; });
  rep.statistic = static_cast<double>(within) / static_cast<double>(devs.size());
  rep.threshold = min_fraction;
  rep.comparison = ">=";
  rep.details = {{"omega", omega},
                 {"trace_t_max", results.config.trace_t_max},
                 {"max", *std::max_element(devs.begin(), devs.end())},
                 {"median", Quantile(devs, 0.5)},
                 {"q99", Quantile(devs, 0.99)},
                 {"mean", Summarize(devs).mean},
                 {"exceeding", static_cast<std::int64_t>(devs.size()) - within}};
  Finish(rep);
  return rep;
}

CheckReport CheckTreeCounts(const ReplicaResults& results, std::size_t snapshot,
                            const RhoTable& rho, double max_z) {
  CheckReport rep = NewReport("tree_counts", results);
  const double nd = static_cast<double>(results.config.n);
  double worst = 0.0;
  nlohmann::json per_k = nlohmann::json::array();
  for (const auto& [k, p] : rho) {
    const auto ku = static_cast<std::uint64_t>(k);
    const Summary s = Summarize(results.Collect(snapshot, [&](const ComponentCensus& c) {
      return c.Trees(ku);
    }));
    const double expected = nd * p.value / k;
    const double se = std::hypot(s.std_error, nd * p.std_error / k);
    const double z = ZScore(s.mean - expected, se);
    worst = std::max(worst, std::fabs(z));
    per_k.push_back({{"k", k}, {"mean", s.mean}, {"expected", expected},
                     {"se", se}, {"z", z}});
  }
  rep.statistic = worst;
  rep.threshold = max_z;
  rep.details = {{"per_k", per_k}, {"replicas", results.replicas.size()}};
  AttachGuards(rep, results, snapshot, rho.empty() ? 1.0 : rho.rbegin()->first);
  Finish(rep);
  return rep;
}

CheckReport CheckPairFactorization(const ReplicaResults& results, std::size_t snapshot,
                                   const RhoTable& mu,
                                   const std::vector<std::pair<int, int>>& pairs,
                                   double max_z) {
  CheckReport rep = NewReport("pair_factorization", results);
  const double nd = static_cast<double>(results.config.n);
  double worst = 0.0;
  nlohmann::json per_pair = nlohmann::json::array();
  for (auto [k1, k2] : pairs) {
    const auto a = mu.find(k1), b = mu.find(k2);
    Require(a != mu.end() && b != mu.end(), ErrorCode::kInvalidInput,
            "mu table lacks a requested size");
    const Summary s = Summarize(results.Collect(snapshot, [&](const ComponentCensus& c) {
      const double t1 = static_cast<double>(c.Trees(static_cast<std::uint64_t>(k1)));
      const double t2 = static_cast<double>(c.Trees(static_cast<std::uint64_t>(k2)));
      return t1 * t2 - (k1 == k2 ? t1 : 0.0);
    }));
    const double m1 = a->second.value, m2 = b->second.value;
    const double expected = nd * nd * m1 * m2;
    const double se_theory =
        nd * nd * std::hypot(m2 * a->second.std_error, m1 * b->second.std_error);
    const double se = std::hypot(s.std_error, se_theory);
    const double z = ZScore(s.mean - expected, se);
    worst = std::max(worst, std::fabs(z));
    per_pair.push_back({{"k1", k1}, {"k2", k2}, {"mean", s.mean},
                        {"expected", expected}, {"se", se}, {"z", z}});
  }
  rep.statistic = worst;
  rep.threshold = max_z;
  rep.details = {{"per_pair", per_pair}};
  AttachGuards(rep, results, snapshot, 1.0);
  Finish(rep);
  return rep;
}

CheckReport CheckPoissonWindow(const ReplicaResults& results, std::size_t snapshot,
                               std::uint64_t K1, std::uint64_t K2, double lambda,
                               double max_gap, double min_y_zero) {
  Require(K1 >= 1 && K2 > K1, ErrorCode::kInvalidArgument, "window needs 1 <= K1 < K2");
  Require(lambda >= 0.0, ErrorCode::kInvalidArgument, "lambda must be nonnegative");
  CheckReport rep = NewReport("poisson_window", results);
  std::array<double, 4> observed{};
  std::size_t y_zero = 0;
  for (const auto& r : results.replicas) {
    const ComponentCensus& c = r.snapshots.at(snapshot);
    const std::uint64_t x = CountInRange(c, K1, K2, true);
    observed[std::min<std::uint64_t>(x, 3)] += 1.0;
    y_zero += CountInRange(c, K1, K2, false) == 0;
  }
  const double reps = static_cast<double>(results.replicas.size());
  const double p0_hat = observed[0] / reps;
  const double p0 = std::exp(-lambda);
  std::array<double, 4> expected{};
  double chi2 = 0.0;
  for (int j = 0; j < 3; ++j) expected[j] = reps * PoissonPmf(j, lambda);
  expected[3] = reps - expected[0] - expected[1] - expected[2];
  for (int j = 0; j < 4; ++j) {
    if (expected[j] > 0.0) chi2 += (observed[j] - expected[j]) * (observed[j] - expected[j]) / expected[j];
  }
  const double y_frac = static_cast<double>(y_zero) / reps;
  rep.statistic = std::fabs(p0_hat - p0);
  rep.threshold = max_gap;
  rep.details = {{"K1", K1},
                 {"K2", K2},
                 {"lambda", lambda},
                 {"p0_hat", p0_hat},
                 {"p0_poisson", p0},
                 {"observed", observed},
                 {"expected", expected},
                 {"chi_square", chi2},
                 {"chi_square_p", ChiSquare3Sf(chi2)},
                 {"y_zero_fraction", y_frac},
                 {"y_zero_threshold", min_y_zero}};
  if (lambda < 0.5 || lambda > 2.0) {
    rep.warnings.push_back("lambda is far from order one");
  }
  AttachGuards(rep, results, snapshot, static_cast<double>(K2));
  Finish(rep);
  rep.passed = rep.passed && y_frac >= min_y_zero;
  return rep;
}

CheckReport CheckNontreeScarcity(const ReplicaResults& results, std::size_t snapshot,
                                 const std::vector<int>& ks, double constant) {
  CheckReport rep = NewReport("nontree_scarcity", results);
  const double nd = static_cast<double>(results.config.n);
  double worst = 0.0;
  nlohmann::json per_k = nlohmann::json::array();
  for (int k : ks) {
    const auto ku = static_cast<std::uint64_t>(k);
    const double mc = Summarize(results.Collect(snapshot, [&](const ComponentCensus& c) {
                        return c.NonTrees(ku);
                      })).mean;
    const double mt = Summarize(results.Collect(snapshot, [&](const ComponentCensus& c) {
                        return c.Trees(ku);
                      })).mean;
    if (mt == 0.0) {
      rep.warnings.push_back("no tree components of size " + std::to_string(k));
      continue;
    }
    const double ratio = mc / mt;
    const double implied = ratio / (k * k / nd);
    worst = std::max(worst, implied);
    per_k.push_back({{"k", k}, {"mean_nontree", mc}, {"mean_tree", mt},
                     {"ratio", ratio}, {"bound", constant * k * k / nd},
                     {"implied_constant", implied}});
  }
  rep.statistic = worst;
  rep.threshold = constant;
  rep.details = {{"per_k", per_k}};
  Finish(rep);
  return rep;
}

CheckReport CheckGap(const ReplicaResults& results, std::size_t snapshot,
                     std::uint64_t K, double max_fraction) {
  Require(K >= 1, ErrorCode::kInvalidArgument, "K must be >= 1");
  CheckReport rep = NewReport("gap", results);
  std::size_t violations = 0;
  std::vector<std::uint64_t> offending;
  for (const auto& r : results.replicas) {
    const std::uint64_t hits = r.snapshots.at(snapshot).ComponentsInRange(K, 3 * K);
    if (hits > 0) {
      ++violations;
      offending.push_back(hits);
    }
  }
  rep.statistic = static_cast<double>(violations) / static_cast<double>(results.replicas.size());
  rep.threshold = max_fraction;
  rep.details = {{"K", K},
                 {"window", {K, 3 * K}},
                 {"violations", violations},
                 {"replicas", results.replicas.size()},
                 {"components_in_window_per_violation", offending}};
  AttachGuards(rep, results, snapshot, static_cast<double>(3 * K));
  Finish(rep);
  return rep;
}

CheckReport CheckSmallVertexMass(const ReplicaResults& results, std::size_t snapshot,
                                 std::uint64_t K, double rho_giant, double eps,
                                 double band_constant, double min_fraction) {
  Require(eps != 0.0, ErrorCode::kInvalidArgument, "eps must be nonzero");
  CheckReport rep = NewReport("small_vertex_mass", results);
  const double nd = static_cast<double>(results.config.n);
  const double band = band_constant * std::pow(std::fabs(eps), -0.5) * std::pow(nd, 0.75);
  std::vector<double> st, sc, big;
  std::size_t within = 0;
  bool partition_ok = true;
  for (const auto& r : results.replicas) {
    const ComponentCensus& c = r.snapshots.at(snapshot);
    std::uint64_t s_t = 0, s_c = 0, n_big = 0;
    for (auto [k, cnt] : c.tree_counts) (k <= K ? s_t : n_big) += k * cnt;
    for (auto [k, cnt] : c.nontree_counts) (k <= K ? s_c : n_big) += k * cnt;
    partition_ok = partition_ok && s_t + s_c + n_big == c.n;
    st.push_back(static_cast<double>(s_t));
    sc.push_back(static_cast<double>(s_c));
    big.push_back(static_cast<double>(n_big));
    within += std::fabs(static_cast<double>(n_big) - rho_giant * nd) <= band;
  }
  const double reps = static_cast<double>(results.replicas.size());
  const Summary sb = Summarize(big);
  rep.statistic = static_cast<double>(within) / reps;
  rep.threshold = min_fraction;
  rep.comparison = ">=";
  rep.details = {{"K", K},
                 {"partition_identity_holds", partition_ok},
                 {"mean_S_T", Summarize(st).mean},
                 {"mean_S_C", Summarize(sc).mean},
                 {"mean_N_gt_K", sb.mean},
                 {"sd_N_gt_K", sb.sd},
                 {"predicted_N_gt_K", rho_giant * nd},
                 {"predicted_S_T", (1.0 - rho_giant) * nd},
                 {"mean_fraction_gap", std::fabs(sb.mean / nd - rho_giant)},
                 {"band", band},
                 {"normalized_mean_deviation", (sb.mean - rho_giant * nd) / band}};
  AttachGuards(rep, results, snapshot, static_cast<double>(K));
  Finish(rep);
  rep.passed = rep.passed && partition_ok;
  return rep;
}

CheckReport CheckGiant(const ReplicaResults& results, std::size_t snapshot,
                       std::uint64_t K, double rho_giant, double eps,
                       double band_constant, double min_band_fraction,
                       double min_single_fraction) {
  Require(eps != 0.0, ErrorCode::kInvalidArgument, "eps must be nonzero");
  CheckReport rep = NewReport("giant", results);
  const double nd = static_cast<double>(results.config.n);
  const double band = band_constant * std::pow(std::fabs(eps), -0.5) * std::pow(nd, 0.75);
  std::size_t within = 0, single = 0;
  std::vector<double> l1;
  for (const auto& r : results.replicas) {
    const ComponentCensus& c = r.snapshots.at(snapshot);
    const double l = static_cast<double>(c.L1());
    l1.push_back(l);
    within += std::fabs(l - rho_giant * nd) <= band;
    single += c.ComponentsInRange(3 * K + 1, c.n) == 1;
  }
  const double reps = static_cast<double>(results.replicas.size());
  const double single_frac = static_cast<double>(single) / reps;
  const Summary s = Summarize(l1);
  rep.statistic = static_cast<double>(within) / reps;
  rep.threshold = min_band_fraction;
  rep.comparison = ">=";
  rep.details = {{"rho_giant", rho_giant},
                 {"predicted_L1", rho_giant * nd},
                 {"mean_L1", s.mean},
                 {"sd_L1", s.sd},
                 {"band", band},
                 {"single_large_fraction", single_frac},
                 {"single_large_threshold", min_single_fraction},
                 {"large_cutoff", 3 * K}};
  AttachGuards(rep, results, snapshot, static_cast<double>(K));
  Finish(rep);
  rep.passed = rep.passed && single_frac >= min_single_fraction;
  return rep;
}

CheckReport CheckDensities(const ReplicaResults& results, std::size_t snapshot,
                           const RhoTable& rho, double max_z) {
  CheckReport rep = NewReport("densities", results);
  const RhoTable sim =
      SimulatedRho(results, snapshot, rho.empty() ? 1 : rho.begin()->first,
                   rho.empty() ? 1 : rho.rbegin()->first);
  double worst = 0.0;
  nlohmann::json per_k = nlohmann::json::array();
  for (const auto& [k, p] : rho) {
    const RhoPoint& s = sim.at(k);
    const double se = std::hypot(s.std_error, p.std_error);
    const double z = ZScore(s.value - p.value, se);
    worst = std::max(worst, std::fabs(z));
    per_k.push_back({{"k", k}, {"mean", s.value}, {"expected", p.value},
                     {"se", se}, {"z", z}});
  }
  rep.statistic = worst;
  rep.threshold = max_z;
  rep.details = {{"per_k", per_k}, {"replicas", results.replicas.size()}};
  Finish(rep);
  return rep;
}

CheckReport ExtremeValueExperiment(const ReplicaResults& results, std::size_t snapshot,
                                   const FitResult& fit, double eps, double max_ks,
                                   const RhoTable* densities) {
  CheckReport rep = NewReport("extreme_value", results);
  const double nd = static_cast<double>(results.config.n);
  // Throws out-of-regime when |eps|^3 n <= e.
  const double centre = GumbelCentre(nd, eps, fit);
  const bool sub = eps < 0.0;
  const std::vector<double> ls = results.Collect(snapshot, [&](const ComponentCensus& c) {
    return sub ? c.L1() : c.L2();
  });
  std::vector<double> xs;
  for (double l : ls) xs.push_back(fit.delta * l - centre);
  const double q0 = PredictLQuantile(nd, eps, fit, 0.0);
  const double below = static_cast<double>(std::count_if(
                           ls.begin(), ls.end(), [&](double l) { return l <= q0; })) /
                       static_cast<double>(ls.size());
  rep.statistic = KsDistance(xs, GumbelCdf);
  rep.threshold = max_ks;
  const Summary sx = Summarize(xs);
  rep.details = {{"statistic_of", sub ? "L1" : "L2"},
                 {"eps", eps},
                 {"delta", fit.delta},
                 {"gamma", fit.gamma},
                 {"c", COfT(fit, eps)},
                 {"centre", centre},
                 {"quantile_x0", q0},
                 {"fraction_below_x0", below},
                 {"gumbel_at_0", GumbelCdf(0.0)},
                 {"mean_x", sx.mean},
                 {"sd_x", sx.sd},
                 {"gumbel_mean", std::numbers::egamma},
                 {"gumbel_sd", std::numbers::pi / std::sqrt(6.0)},
                 {"mean_statistic", Summarize(ls).mean}};
  if (densities != nullptr && !densities->empty()) {
    const int k_top = densities->rbegin()->first;
    auto rho = [&](int k) {
      const auto it = densities->find(k);
      return it != densities->end() ? it->second.value : FittedRho(fit, k);
    };
    const auto [lo_it, hi_it] = std::minmax_element(ls.begin(), ls.end());
    const auto lo = static_cast<std::int64_t>(*lo_it), hi = static_cast<std::int64_t>(*hi_it);
    // lambda_{l+1} for l from lo - 1 upward, accumulated downward from hi + 1.
    LambdaOptions opt;
    opt.k_switch = k_top + 1;
    double lambda = LambdaK(hi + 1, nd, rho, fit, opt);
    std::vector<double> sorted = ls;
    std::sort(sorted.begin(), sorted.end());
    double worst = 0.0;
    for (std::int64_t l = hi; l >= std::max<std::int64_t>(lo - 1, 0); --l) {
      const double below = static_cast<double>(
          std::upper_bound(sorted.begin(), sorted.end(), static_cast<double>(l)) -
          sorted.begin()) / static_cast<double>(sorted.size());
      worst = std::max(worst, std::fabs(below - std::exp(-lambda)));
      if (l >= 1) lambda += nd * rho(static_cast<int>(l)) / static_cast<double>(l);
    }
    rep.details["finite_n_poisson_ks"] = worst;
  }
  AttachGuards(rep, results, snapshot, q0);
  Finish(rep);
  return rep;
}

std::size_t PairIndex(std::uint64_t n, Vertex a, Vertex b) {
  if (a > b) std::swap(a, b);
  // Row-major over a < b.
  const std::uint64_t row = static_cast<std::uint64_t>(a);
  return static_cast<std::size_t>(row * (2 * n - row - 1) / 2 + (b - a - 1));
}

std::vector<double> ExactEdgeProbabilities(const ProcessState& state) {
  const std::uint64_t n = state.n();
  const RuleSpec& rule = state.rule();
  const std::uint64_t pairs = n * (n - 1) / 2;
  std::vector<std::uint32_t> cap(n);
  for (Vertex v = 0; v < n; ++v) cap[v] = rule.Cap(state.RootSize(state.FindRoot(v)));
  const std::uint32_t classes = static_cast<std::uint32_t>(rule.cutoff) + 2;
  // Pair counts per ordered capped class (cap of a, cap of b) with a < b.
  std::vector<double> class_count(classes * classes, 0.0);
  for (Vertex a = 0; a < n; ++a) {
    for (Vertex b = a + 1; b < n; ++b) class_count[cap[a] * classes + cap[b]] += 1.0;
  }
  const double np = static_cast<double>(pairs);
  // take_first[c] / take_second[c]: probability, over a uniform partner pair,
  // that a pair of class c is chosen when drawn first / second.
  std::vector<double> take_first(classes * classes, 0.0), take_second(classes * classes, 0.0);
  for (std::uint32_t c1 = 0; c1 < classes * classes; ++c1) {
    if (class_count[c1] == 0.0) continue;
    for (std::uint32_t c2 = 0; c2 < classes * classes; ++c2) {
      if (class_count[c2] == 0.0) continue;
      const std::array<std::uint32_t, 4> first_then{c1 / classes, c1 % classes,
                                                     c2 / classes, c2 % classes};
      const std::array<std::uint32_t, 4> second_then{c2 / classes, c2 % classes,
                                                      c1 / classes, c1 % classes};
      if (Decide(rule, first_then) == Choice::kFirstEdge) take_first[c1] += class_count[c2];
      if (Decide(rule, second_then) == Choice::kSecondEdge) take_second[c1] += class_count[c2];
    }
  }
  std::vector<double> p(pairs);
  for (Vertex a = 0; a < n; ++a) {
    for (Vertex b = a + 1; b < n; ++b) {
      const std::uint32_t c = cap[a] * classes + cap[b];
      p[PairIndex(n, a, b)] = (take_first[c] + take_second[c]) / (np * np);
    }
  }
  return p;
}

CheckReport CheckConditionalEdgeFrequencies(const EdgeFrequencyConfig& config) {
  if (config.n > 200) {
    Fail(ErrorCode::kUnsupportedSize, "exhaustive pair tracking is limited to n <= 200");
  }
  Require(config.n >= 2, ErrorCode::kInvalidArgument, "n must be >= 2");
  Require(config.trials >= 1, ErrorCode::kInvalidArgument, "trials must be >= 1");
  CheckReport rep;
  rep.name = "edge_frequencies";
  rep.seed = config.seed;
  ProcessState ps(config.n, config.rule, config.seed);
  ps.RunUntil(config.prefix_steps);
  const std::vector<double> p = ExactEdgeProbabilities(ps);
  std::vector<std::uint64_t> hits(p.size(), 0);
  for (std::uint64_t i = 0; i < config.trials; ++i) {
    const VertexPair e = ps.Propose();
    ++hits[PairIndex(config.n, e.a, e.b)];
  }
  const double trials = static_cast<double>(config.trials);
  double p_iso = 0.0, p_other = 0.0, h_iso = 0.0, h_other = 0.0, chi2 = 0.0, total = 0.0;
  std::size_t iso_pairs = 0;
  for (Vertex a = 0; a < config.n; ++a) {
    for (Vertex b = a + 1; b < config.n; ++b) {
      const std::size_t i = PairIndex(config.n, a, b);
      const bool iso = ps.IsIsolated(a) && ps.IsIsolated(b);
      (iso ? p_iso : p_other) += p[i];
      (iso ? h_iso : h_other) += static_cast<double>(hits[i]);
      iso_pairs += iso;
      total += p[i];
      if (p[i] > 0.0) {
        const double e = trials * p[i];
        chi2 += (static_cast<double>(hits[i]) - e) * (static_cast<double>(hits[i]) - e) / e;
      }
    }
  }
  auto z_of = [&](double h, double q) {
    // Rounding can push a certain class slightly past 1.
    if (q < 1e-12) q = 0.0;
    if (q > 1.0 - 1e-12) q = 1.0;
    return ZScore(h - trials * q, std::sqrt(trials * q * (1.0 - q)));
  };
  const double z_iso = z_of(h_iso, p_iso);
  const double z_other = z_of(h_other, p_other);
  const double dof = static_cast<double>(p.size() - 1);
  const double nd = static_cast<double>(config.n);
  const double frac = static_cast<double>(ps.isolated()) / nd;
  const double chi2_z = (chi2 - dof) / std::sqrt(2.0 * dof);
  rep.statistic = std::max({std::fabs(z_iso), std::fabs(z_other), std::fabs(chi2_z)});
  rep.threshold = config.max_z;
  rep.details = {
      {"n", config.n},
      {"isolated", ps.isolated()},
      {"trials", config.trials},
      {"isolated_pairs", iso_pairs},
      {"exact_isolated_class_probability", p_iso},
      {"empirical_isolated_class_frequency", h_iso / trials},
      {"z_isolated", z_iso},
      {"exact_other_class_probability", p_other},
      {"empirical_other_class_frequency", h_other / trials},
      {"z_other", z_other},
      {"probability_total", total},
      {"per_pair_chi_square", chi2},
      {"per_pair_chi_square_z", chi2_z},
      {"asymptotic_isolated_pair", 2.0 / (nd * nd) * (2.0 - frac * frac)},
      {"asymptotic_other_pair", 2.0 / (nd * nd) * (1.0 - frac * frac)}};
  Finish(rep);
  return rep;
}

RhoTable SimulatedRho(const ReplicaResults& results, std::size_t snapshot, int k_lo,
                      int k_hi) {
  Require(k_lo >= 1 && k_hi >= k_lo, ErrorCode::kInvalidArgument, "bad k range");
  const double nd = static_cast<double>(results.config.n);
  RhoTable out;
  for (int k = k_lo; k <= k_hi; ++k) {
    const auto ku = static_cast<std::uint64_t>(k);
    const Summary s = Summarize(results.Collect(snapshot, [&](const ComponentCensus& c) {
      return static_cast<double>(ku * (c.Trees(ku) + c.NonTrees(ku))) / nd;
    }));
    out[k] = {s.mean, s.std_error};
  }
  return out;
}

}  // namespace bfsim
