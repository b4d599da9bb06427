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


#include "bfsim/suites.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>

#include "bfsim/criticality.hpp"
#include "bfsim/error.hpp"
#include "bfsim/rng.hpp"
#include "bfsim/stats.hpp"
#include "bfsim/tree_measure.hpp"
#include "bfsim/trees.hpp"

namespace bfsim {

namespace {

// Seed stream tags; one per independent simulation.
enum SeedTag : std::uint64_t {
  kTagErDensities = 1,
  kTagErTc,
  kTagErMc,
  kTagConcentration,
  kTagMediumBf,
  kTagBfTc,
  kTagPilotSub,
  kTagPilotSuper,
  kTagRunsSub,
  kTagRunsSuper,
  kTagGapSub,
  kTagGapSuper,
  kTagNumericsMc,
  kTagEdgeEmpty,
  kTagEdgePrefix,
};

#define BFSIM_OPTION_FIELDS(X)                                                  \
  X(seed) X(threads) X(omega) X(n_large) X(n_medium) X(eps) X(gap_t_sub)        \
  X(replicas_medium) X(replicas_concentration) X(replicas_gap)                  \
  X(replicas_poisson) X(replicas_extreme) X(pilot_sub) X(pilot_super)           \
  X(tc_replicas) X(mc_samples) X(edge_trials) X(max_z) X(ode_identity_tol)      \
  X(ode_ratio_lo) X(ode_ratio_hi) X(er_quad_tol) X(er_tc_tol)                   \
  X(concentration_fraction) X(concentration_c) X(nontree_constant)              \
  X(poisson_gap) X(poisson_y_zero) X(gap_fraction) X(ks_max)                    \
  X(giant_band_constant) X(giant_band_fraction) X(giant_single_fraction)        \
  X(fd_tol) X(mult_tol)

// A check built directly from a statistic.
CheckReport Simple(const char* name, double statistic, double threshold,
                   std::uint64_t seed, nlohmann::json details,
                   const char* comparison = "<=") {
  CheckReport rep;
  rep.name = name;
  rep.statistic = statistic;
  rep.threshold = threshold;
  rep.comparison = comparison;
  rep.seed = seed;
  rep.details = std::move(details);
  rep.passed = std::isfinite(statistic) &&
               (rep.comparison == "<=" ? statistic <= threshold : statistic >= threshold);
  return rep;
}

// Number of endpoints whose first incident edge (by arrival) is edge j.
std::vector<int> NewlyTouched(const LabeledForest& h, const std::vector<double>& times) {
  std::vector<int> first(static_cast<std::size_t>(h.k()), -1);
  for (std::size_t j = 0; j < h.edges().size(); ++j) {
    for (int v : {h.edges()[j].u, h.edges()[j].v}) {
      int& f = first[static_cast<std::size_t>(v)];
      if (f < 0 || times[j] < times[static_cast<std::size_t>(f)]) f = static_cast<int>(j);
    }
  }
  std::vector<int> count(h.edges().size(), 0);
  for (int f : first) {
    if (f >= 0) ++count[static_cast<std::size_t>(f)];
  }
  return count;
}

}  // namespace

nlohmann::json SuiteOptions::ToJson() const {
  nlohmann::json j;
#define BFSIM_TO_JSON(f) j[#f] = f;
  BFSIM_OPTION_FIELDS(BFSIM_TO_JSON)
#undef BFSIM_TO_JSON
  return j;
}

void SuiteOptions::Merge(const nlohmann::json& j) {
  Require(j.is_object(), ErrorCode::kInvalidInput, "suite options must be an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    try {
#define BFSIM_FROM_JSON(f)                 \
  if (key == #f) {                         \
    f = value.get<decltype(f)>();          \
    known = true;                          \
  }
      BFSIM_OPTION_FIELDS(BFSIM_FROM_JSON)
#undef BFSIM_FROM_JSON
    } catch (const nlohmann::json::exception& e) {
      Fail(ErrorCode::kInvalidInput, "bad value for '" + key + "': " + e.what());
    }
    Require(known, ErrorCode::kInvalidInput, "unknown suite option '" + key + "'");
  }
}

OffCriticalFit FitOffCritical(const RuleSpec& rule, double t, std::uint64_t n,
                              int pilot_replicas, std::uint64_t seed, int threads,
                              const Trajectory& traj, int k_fit_max) {
  Require(k_fit_max > 8, ErrorCode::kInvalidArgument, "fit range must extend past k=8");
  OffCriticalFit out;
  ExperimentConfig pc;
  pc.n = n;
  pc.t = {t};
  pc.rule = rule;
  pc.replicas = pilot_replicas;
  pc.master_seed = seed;
  pc.threads = threads;
  out.pilot = RunReplicas(pc);
  out.simulated = SimulatedRho(out.pilot, 0, 1, 2000);
  MuOptions mo;
  mo.quad.max_edges = 7;
  TreeMeasure tm(traj, mo);
  for (int k = 1; k <= 8; ++k) out.joined[k] = {tm.RhoK(k, t).value, 0.0};
  for (int k = 9; k <= k_fit_max; ++k) out.joined[k] = out.simulated.at(k);
  out.fit = FitDeltaGamma(out.joined, t, 5, k_fit_max);
  return out;
}

nlohmann::json SuiteReport::ToJson() const {
  nlohmann::json checks_json = nlohmann::json::array();
  for (const auto& c : checks) checks_json.push_back(c.ToJson());
  return {{"suite", name}, {"passed", passed}, {"checks", checks_json}, {"context", context}};
}

// Off-critical BF snapshot with its pilot-based density table and fit.
struct Side {
  double t = 0.0;
  double eps = 0.0;
  ReplicaResults pilot;
  RhoTable joined;     // quadrature for k <= 8, pilot beyond
  RhoTable densities;  // pilot, trimmed where counts thin out
  FitResult fit;
  ReplicaResults runs;
};

struct VerifyContext::State {
  std::optional<Trajectory> bf_traj;
  std::optional<Trajectory> er_traj;
  std::optional<CriticalityReport> bf_tc;
  std::optional<ReplicaResults> medium_bf;
  std::optional<Side> sub;
  std::optional<Side> super;
};

VerifyContext::VerifyContext(SuiteOptions options)
    : options_(std::move(options)), state_(std::make_unique<State>()) {}

VerifyContext::~VerifyContext() = default;

const std::vector<std::string>& VerifyContext::SuiteNames() {
  static const std::vector<std::string> kNames = {
      "ode",     "er-oracle", "concentration", "tree-counts", "pair",     "nontree",
      "poisson", "gap",       "extreme",       "giant",       "numerics", "edge-frequencies"};
  return kNames;
}

namespace {

class Runner {
 public:
  Runner(const SuiteOptions& o, VerifyContext::State& s) : o_(o), s_(s) {}

  std::uint64_t Seed(SeedTag tag) const { return Rng::DeriveSeed(o_.seed, tag); }

  void Log(const std::string& msg) const {
    if (o_.progress) o_.progress(msg);
  }

  const Trajectory& Bf() {
    if (!s_.bf_traj) s_.bf_traj = Trajectory::Solve(2.5, 1e-4);
    return *s_.bf_traj;
  }

  const Trajectory& Er() {
    if (!s_.er_traj) s_.er_traj = Trajectory::Solve(2.5, 1e-4, TrajectoryMode::kEr);
    return *s_.er_traj;
  }

  ExperimentConfig Config(RuleSpec rule, std::uint64_t n, std::vector<double> t,
                          int replicas, SeedTag tag) const {
    ExperimentConfig c;
    c.n = n;
    c.t = std::move(t);
    c.rule = std::move(rule);
    c.replicas = replicas;
    c.master_seed = Seed(tag);
    c.omega = o_.omega;
    c.threads = o_.threads;
    return c;
  }

  const CriticalityReport& BfTc() {
    if (!s_.bf_tc) {
      Log("estimating the BF critical time");
      TcSweepConfig cfg;
      cfg.rule = RuleSpec::BohmanFrieze();
      for (int i = 0; i <= 45; ++i) cfg.t_grid.push_back(0.50 + 0.004 * i);
      cfg.n_ladder = {o_.n_large / 100, o_.n_large / 10, o_.n_large};
      cfg.replicas = o_.tc_replicas;
      cfg.seed = Seed(kTagBfTc);
      cfg.threads = o_.threads;
      s_.bf_tc = EstimateTc(cfg);
    }
    return *s_.bf_tc;
  }

  const ReplicaResults& MediumBf() {
    if (!s_.medium_bf) {
      Log("running BF replicas at t=0.5");
      s_.medium_bf = RunReplicas(Config(RuleSpec::BohmanFrieze(), o_.n_medium, {0.5},
                                        o_.replicas_medium, kTagMediumBf));
    }
    return *s_.medium_bf;
  }

  Side& Off(bool subcritical) {
    std::optional<Side>& slot = subcritical ? s_.sub : s_.super;
    if (slot) return *slot;
    const double tc = BfTc().tc;
    Side side;
    side.eps = subcritical ? -o_.eps : o_.eps;
    side.t = tc + side.eps;
    Log(std::string("pilot runs at ") + (subcritical ? "tc - eps" : "tc + eps"));
    OffCriticalFit ofit =
        FitOffCritical(RuleSpec::BohmanFrieze(), side.t, o_.n_large, subcritical ? o_.pilot_sub : o_.pilot_super,
                       Seed(subcritical ? kTagPilotSub : kTagPilotSuper), o_.threads, Bf());
    side.pilot = std::move(ofit.pilot);
    side.pilot.config.tc = tc;
    side.joined = std::move(ofit.joined);
    side.fit = ofit.fit;
    const RhoTable& sim = ofit.simulated;
    // Keep pilot densities while at least 50 pilot components lie at or
    // above k; beyond that the fitted form takes over.
    double above = 0.0;
    int k_top = 2000;
    for (int k = 2000; k >= 1; --k) {
      above += sim.at(k).value * static_cast<double>(o_.n_large) / k *
               static_cast<double>(side.pilot.replicas.size());
      if (above >= 50.0) {
        k_top = k;
        break;
      }
    }
    for (int k = 1; k <= k_top; ++k) side.densities[k] = sim.at(k);
    Log(std::string("experiment runs at ") + (subcritical ? "tc - eps" : "tc + eps"));
    const int reps = subcritical ? std::max(o_.replicas_poisson, o_.replicas_extreme)
                                 : o_.replicas_extreme;
    ExperimentConfig ec = Config(RuleSpec::BohmanFrieze(), o_.n_large, {side.t}, reps,
                                 subcritical ? kTagRunsSub : kTagRunsSuper);
    ec.tc = tc;
    side.runs = RunReplicas(ec);
    slot = std::move(side);
    return *slot;
  }

  nlohmann::json SideContext(const Side& s) {
    return {{"tc", BfTc().tc},
            {"tc_ci", {BfTc().tc_lo, BfTc().tc_hi}},
            {"t", s.t},
            {"eps", s.eps},
            {"fit", s.fit.ToJson()},
            {"pilot_replicas", s.pilot.replicas.size()},
            {"pilot_seed", s.pilot.config.master_seed},
            {"replicas", s.runs.replicas.size()},
            {"runs_seed", s.runs.config.master_seed},
            {"n", s.runs.config.n}};
  }

  SuiteReport Ode() {
    SuiteReport rep;
    const Trajectory& traj = Bf();
    double worst = 0.0;
    nlohmann::json at = nlohmann::json::array();
    for (double t : {0.25, 0.5, 1.0}) {
      const auto in = traj.IntegralsAt(t);
      const double err = std::fabs(std::exp(-2.0 * in.A - 2.0 * in.B) - traj.Rho1At(t));
      worst = std::max(worst, err);
      at.push_back({{"t", t}, {"abs_error", err}});
    }
    rep.checks.push_back(Simple("log_identity", worst, o_.ode_identity_tol, 0, {{"points", at}}));
    // Successive differences at t=1 shrink by 2^4 per halving of dt.
    const double r1 = Trajectory::Solve(1.0, 0.1).rho1(10);
    const double r2 = Trajectory::Solve(1.0, 0.05).rho1(20);
    const double r3 = Trajectory::Solve(1.0, 0.025).rho1(40);
    const double ratio = std::fabs(r1 - r2) / std::fabs(r2 - r3);
    CheckReport rc = Simple("rk4_refinement_ratio", ratio, o_.ode_ratio_lo, 0,
                            {{"dt", {0.1, 0.05, 0.025}},
                             {"rho1", {r1, r2, r3}},
                             {"range", {o_.ode_ratio_lo, o_.ode_ratio_hi}}},
                            "in");
    char band[64];
    std::snprintf(band, sizeof band, "in [%g, %g]", o_.ode_ratio_lo, o_.ode_ratio_hi);
    rc.comparison = band;
    rc.passed = ratio >= o_.ode_ratio_lo && ratio <= o_.ode_ratio_hi;
    rep.checks.push_back(rc);
    return rep;
  }

  SuiteReport ErOracle() {
    SuiteReport rep;
    const Trajectory& er = Er();
    double worst = 0.0;
    nlohmann::json quad = nlohmann::json::array();
    for (double t : {0.25, 0.5, 1.0}) {
      for (int k = 1; k <= 4; ++k) {
        const double q = MuK0(k, t, er).value;
        const double c = ErModeMuClosedForm(k, t);
        worst = std::max(worst, std::fabs(q - c));
        quad.push_back({{"k", k}, {"t", t}, {"quad", q}, {"closed", c}});
      }
    }
    rep.checks.push_back(Simple("er_quadrature", worst, o_.er_quad_tol, 0, {{"values", quad}}));

    MuOptions mc;
    mc.method = MuMethod::kMonteCarlo;
    mc.samples = o_.mc_samples / 5;
    mc.seed = Seed(kTagErMc);
    double worst_z = 0.0;
    nlohmann::json mcj = nlohmann::json::array();
    for (int k = 1; k <= 6; ++k) {
      const double t = 0.5;
      const MuEstimate e = MuK0(k, t, er, mc);
      const double c = ErModeMuClosedForm(k, t);
      // The er-mode integrand is constant on its support, so the spread can
      // vanish; a relative rounding floor keeps z finite.
      const double se = std::max(e.std_error, 1e-12 * std::fabs(c));
      const double z = (e.value - c) / se;
      worst_z = std::max(worst_z, std::fabs(z));
      mcj.push_back({{"k", k}, {"t", t}, {"mc", e.value}, {"se", e.std_error},
                     {"closed", c}, {"z", z}});
    }
    rep.checks.push_back(Simple("er_monte_carlo", worst_z, o_.max_z, mc.seed, {{"values", mcj}}));

    Log("running er replicas");
    const ReplicaResults r = RunReplicas(Config(RuleSpec::ErAlwaysSecond(), o_.n_medium,
                                                {0.3, 0.75}, o_.replicas_medium,
                                                kTagErDensities));
    for (std::size_t s = 0; s < 2; ++s) {
      const double t = s == 0 ? 0.3 : 0.75;
      RhoTable rho;
      for (int k = 1; k <= 5; ++k) rho[k] = {k * ErModeMuClosedForm(k, t), 0.0};
      CheckReport c = CheckDensities(r, s, rho, o_.max_z);
      c.name = s == 0 ? "er_densities_t0.3" : "er_densities_t0.75";
      rep.checks.push_back(c);
    }

    Log("estimating the er critical time");
    TcSweepConfig cfg;
    cfg.rule = RuleSpec::ErAlwaysSecond();
    for (int i = 0; i <= 40; ++i) cfg.t_grid.push_back(0.42 + 0.004 * i);
    cfg.n_ladder = {o_.n_large / 100, o_.n_large / 10, o_.n_large};
    cfg.replicas = o_.tc_replicas;
    cfg.seed = Seed(kTagErTc);
    cfg.threads = o_.threads;
    const CriticalityReport tc = EstimateTc(cfg);
    rep.checks.push_back(Simple("er_critical_time", std::fabs(tc.tc - 0.5), o_.er_tc_tol,
                                cfg.seed, tc.ToJson()));
    return rep;
  }

  SuiteReport Concentration() {
    SuiteReport rep;
    Log("running concentration replicas");
    ExperimentConfig c = Config(RuleSpec::BohmanFrieze(), o_.n_medium, {},
                                o_.replicas_concentration, kTagConcentration);
    c.trace_t_max = o_.concentration_c;
    const ReplicaResults r = RunReplicas(c, &Bf());
    rep.checks.push_back(CheckConcentration(r, o_.omega, o_.concentration_fraction));
    return rep;
  }

  SuiteReport TreeCounts() {
    SuiteReport rep;
    const ReplicaResults& r = MediumBf();
    TreeMeasure tm(Bf(), {});
    RhoTable rho;
    for (int k = 1; k <= 5; ++k) rho[k] = {tm.RhoK(k, 0.5).value, 0.0};
    rep.checks.push_back(CheckTreeCounts(r, 0, rho, o_.max_z));
    return rep;
  }

  SuiteReport Pair() {
    SuiteReport rep;
    const ReplicaResults& r = MediumBf();
    TreeMeasure tm(Bf(), {});
    RhoTable mu;
    for (int k = 2; k <= 3; ++k) mu[k] = {tm.MuK0(k, 0.5).value, 0.0};
    rep.checks.push_back(CheckPairFactorization(r, 0, mu, {{2, 2}, {2, 3}, {3, 3}}, o_.max_z));
    return rep;
  }

  SuiteReport Nontree() {
    SuiteReport rep;
    rep.checks.push_back(
        CheckNontreeScarcity(MediumBf(), 0, {1, 2, 3, 4, 5}, o_.nontree_constant));
    return rep;
  }

  SuiteReport Poisson() {
    SuiteReport rep;
    Side& s = Off(true);
    const double n = static_cast<double>(o_.n_large);
    // Window [K1, 3 K1) with K1 the smallest size whose pilot-estimated
    // window count is at most one.
    auto pilot_rho = [&](int k) {
      const auto it = s.densities.find(k);
      return it != s.densities.end() ? it->second.value : FittedRho(s.fit, k);
    };
    auto window = [&](std::int64_t k1, const std::function<double(int)>& rho) {
      LambdaOptions lo;
      lo.k_end = 3 * k1;
      lo.k_switch = s.densities.rbegin()->first + 1;
      return LambdaK(k1, n, rho, s.fit, lo);
    };
    std::int64_t k1 = 2;
    while (window(k1, pilot_rho) > 1.0) ++k1;
    const double lambda = window(k1, pilot_rho);
    LambdaOptions fit_only;
    fit_only.k_end = 3 * k1;
    fit_only.k_switch = 1;
    const double lambda_fit = LambdaK(k1, n, nullptr, s.fit, fit_only);
    CheckReport c = CheckPoissonWindow(s.runs, 0, static_cast<std::uint64_t>(k1),
                                       static_cast<std::uint64_t>(3 * k1), lambda,
                                       o_.poisson_gap, o_.poisson_y_zero);
    c.details["lambda_source"] = "pilot densities";
    c.details["lambda_fitted_form"] = lambda_fit;
    c.details["p0_fitted_form"] = std::exp(-lambda_fit);
    rep.checks.push_back(c);
    rep.context = SideContext(s);
    return rep;
  }

  SuiteReport Gap() {
    SuiteReport rep;
    const double tc = BfTc().tc;
    const double t_sub = o_.gap_t_sub;
    const double t_super = 2.0 * tc - t_sub;
    nlohmann::json sensitivity = nlohmann::json::array();
    for (int side = 0; side < 2; ++side) {
      const double t = side == 0 ? t_sub : t_super;
      Log(std::string("gap replicas at t=") + std::to_string(t));
      ExperimentConfig c = Config(RuleSpec::BohmanFrieze(), o_.n_large, {t}, o_.replicas_gap,
                                  side == 0 ? kTagGapSub : kTagGapSuper);
      c.tc = tc;
      const ReplicaResults r = RunReplicas(c);
      CheckReport g = CheckGap(r, 0, c.ResolvedK(), o_.gap_fraction);
      g.name = side == 0 ? "gap_subcritical" : "gap_supercritical";
      g.details["t"] = t;
      g.details["omega"] = o_.omega;
      rep.checks.push_back(g);
      for (double w : {5.0, 10.0, 20.0}) {
        ExperimentConfig cw = c;
        cw.omega = w;
        const CheckReport gw = CheckGap(r, 0, cw.ResolvedK(), o_.gap_fraction);
        sensitivity.push_back({{"t", t}, {"omega", w}, {"K", cw.ResolvedK()},
                               {"violation_fraction", gw.statistic}});
      }
    }
    rep.context = {{"tc", tc}, {"omega_sensitivity", sensitivity}};
    return rep;
  }

  SuiteReport Extreme() {
    SuiteReport rep;
    nlohmann::json ctx = nlohmann::json::object();
    for (bool sub : {true, false}) {
      Side& s = Off(sub);
      ReplicaResults runs = s.runs;
      runs.replicas.resize(std::min<std::size_t>(runs.replicas.size(),
                                                 static_cast<std::size_t>(o_.replicas_extreme)));
      CheckReport c = ExtremeValueExperiment(runs, 0, s.fit, s.eps, o_.ks_max, &s.densities);
      c.name = sub ? "extreme_subcritical_L1" : "extreme_supercritical_L2";
      rep.checks.push_back(c);
      ctx[sub ? "subcritical" : "supercritical"] = SideContext(s);
    }
    rep.context = ctx;
    return rep;
  }

  SuiteReport Giant() {
    SuiteReport rep;
    Side& s = Off(false);
    const GiantEstimate g = RhoGiant(40, [&](int k) { return s.joined.at(k).value; }, s.fit);
    const std::uint64_t K = s.runs.config.ResolvedK();
    CheckReport c = CheckGiant(s.runs, 0, K, g.value, s.eps, o_.giant_band_constant,
                               o_.giant_band_fraction, o_.giant_single_fraction);
    c.details["rho_truncation"] = g.truncation;
    nlohmann::json sensitivity = nlohmann::json::array();
    for (double w : {5.0, 10.0, 20.0}) {
      ExperimentConfig cw = s.runs.config;
      cw.omega = w;
      const CheckReport gw = CheckGiant(s.runs, 0, cw.ResolvedK(), g.value, s.eps);
      sensitivity.push_back({{"omega", w}, {"K", cw.ResolvedK()},
                             {"single_large_fraction", gw.details["single_large_fraction"]}});
    }
    c.details["omega_sensitivity"] = sensitivity;
    rep.checks.push_back(c);
    rep.checks.push_back(CheckSmallVertexMass(s.runs, 0, K, g.value, s.eps,
                                              o_.giant_band_constant, o_.giant_band_fraction));
    rep.context = SideContext(s);
    rep.context["rho_giant"] = g.value;
    return rep;
  }

  SuiteReport Numerics() {
    SuiteReport rep;
    const Trajectory& traj = Bf();
    // Gradient of F-hat with respect to each arrival time.
    const std::vector<std::pair<LabeledForest, std::vector<double>>> cases = {
        {LabeledForest(4, {{0, 1}, {1, 2}, {2, 3}}), {0.5, 0.2, 0.7}},
        {LabeledForest(4, {{0, 1}, {0, 2}, {0, 3}}), {0.3, 0.6, 0.1}},
        {LabeledForest(5, {{0, 1}, {2, 3}, {3, 4}}), {0.8, 0.4, 0.25}},
        {LabeledForest(6, {{0, 1}, {1, 2}, {1, 3}, {3, 4}, {4, 5}}), {0.9, 0.15, 0.5, 0.33, 0.71}},
    };
    const double t = 1.0, h = 1e-6;
    double worst = 0.0;
    for (const auto& [forest, base] : cases) {
      const std::vector<int> touched = NewlyTouched(forest, base);
      for (std::size_t j = 0; j < base.size(); ++j) {
        auto up = base, down = base;
        up[j] += h;
        down[j] -= h;
        const double fd =
            (FHat(forest, {up}, traj, t) - FHat(forest, {down}, traj, t)) / (2.0 * h);
        worst = std::max(worst, std::fabs(fd - 2.0 * touched[j] * traj.Rho1At(base[j])));
      }
    }
    rep.checks.push_back(Simple("fhat_gradient", worst, o_.fd_tol, 0, {{"t", t}, {"h", h}}));

    // Multiplicativity over disjoint unions.
    const LabeledForest vertex(1, {});
    const LabeledForest edge(2, {{0, 1}});
    const LabeledForest path(3, {{0, 1}, {1, 2}});
    const LabeledForest star(4, {{0, 1}, {0, 2}, {0, 3}});
    const std::vector<std::pair<const LabeledForest*, const LabeledForest*>> pairs = {
        {&edge, &edge}, {&path, &edge}, {&star, &vertex}, {&path, &path}};
    double worst_rel = 0.0;
    for (double tt : {0.5, 1.0}) {
      for (auto [a, b] : pairs) {
        const double joint =
            MuGraphQuad(LabeledForest::DisjointUnion(*a, *b), tt, traj).value;
        const double prod =
            MuGraphQuad(*a, tt, traj).value * MuGraphQuad(*b, tt, traj).value;
        worst_rel = std::max(worst_rel, std::fabs(joint / prod - 1.0));
      }
    }
    rep.checks.push_back(Simple("multiplicativity", worst_rel, o_.mult_tol, 0, {}));

    // Cube Monte Carlo against ordered-simplex quadrature for up to 3 edges.
    const std::vector<LabeledForest> shapes = {
        edge, path, star, LabeledForest(4, {{0, 1}, {1, 2}, {2, 3}}),
        LabeledForest(5, {{0, 1}, {2, 3}, {3, 4}})};
    double worst_z = 0.0;
    nlohmann::json vals = nlohmann::json::array();
    std::uint64_t idx = 0;
    for (const auto& f : shapes) {
      for (double tt : {0.5, 1.1}) {
        const double q = MuGraphQuad(f, tt, traj).value;
        const MuEstimate m =
            MuGraphMc(f, tt, traj, o_.mc_samples, Rng::DeriveSeed(Seed(kTagNumericsMc), idx++));
        const double z = (m.value - q) / m.std_error;
        worst_z = std::max(worst_z, std::fabs(z));
        vals.push_back({{"edges", f.num_edges()}, {"t", tt}, {"quad", q}, {"mc", m.value},
                        {"se", m.std_error}, {"z", z}});
      }
    }
    rep.checks.push_back(
        Simple("quad_vs_mc", worst_z, o_.max_z, Seed(kTagNumericsMc), {{"values", vals}}));
    return rep;
  }

  SuiteReport EdgeFrequencies() {
    SuiteReport rep;
    for (std::uint64_t prefix : {0, 12}) {
      EdgeFrequencyConfig c;
      c.n = 30;
      c.prefix_steps = prefix;
      c.trials = o_.edge_trials;
      c.seed = Seed(prefix == 0 ? kTagEdgeEmpty : kTagEdgePrefix);
      c.max_z = o_.max_z;
      CheckReport r = CheckConditionalEdgeFrequencies(c);
      r.name = prefix == 0 ? "edge_frequencies_empty" : "edge_frequencies_prefix12";
      rep.checks.push_back(r);
    }
    return rep;
  }

 private:
  const SuiteOptions& o_;
  VerifyContext::State& s_;
};

}  // namespace

SuiteReport VerifyContext::Run(const std::string& suite) {
  Runner run(options_, *state_);
  SuiteReport rep;
  if (suite == "ode") {
    rep = run.Ode();
  } else if (suite == "er-oracle") {
    rep = run.ErOracle();
  } else if (suite == "concentration") {
    rep = run.Concentration();
  } else if (suite == "tree-counts") {
    rep = run.TreeCounts();
  } else if (suite == "pair") {
    rep = run.Pair();
  } else if (suite == "nontree") {
    rep = run.Nontree();
  } else if (suite == "poisson") {
    rep = run.Poisson();
  } else if (suite == "gap") {
    rep = run.Gap();
  } else if (suite == "extreme") {
    rep = run.Extreme();
  } else if (suite == "giant") {
    rep = run.Giant();
  } else if (suite == "numerics") {
    rep = run.Numerics();
  } else if (suite == "edge-frequencies") {
    rep = run.EdgeFrequencies();
  } else {
    Fail(ErrorCode::kInvalidArgument, "unknown suite '" + suite + "'");
  }
  rep.name = suite;
  rep.passed = std::all_of(rep.checks.begin(), rep.checks.end(),
                           [](const CheckReport& c) { return c.passed; });
  return rep;
}

}  // namespace bfsim
