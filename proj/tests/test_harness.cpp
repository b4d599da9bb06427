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


#include <cmath>
#include <sstream>

#include "bfsim/error.hpp"
#include "bfsim/harness.hpp"
#include "bfsim/tree_measure.hpp"
#include "doctest.h"

using namespace bfsim;

namespace {

ExperimentConfig Small(RuleSpec rule, std::uint64_t n, std::vector<double> t, int reps,
                       std::uint64_t seed) {
  ExperimentConfig c;
  c.n = n;
  c.t = std::move(t);
  c.rule = std::move(rule);
  c.replicas = reps;
  c.master_seed = seed;
  return c;
}

std::string Dump(const ReplicaResults& r) {
  std::ostringstream os;
  WriteNdjson(r, os);
  return os.str();
}

double ErGiantFixedPoint(double c) {
  double lo = 1e-9, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (1.0 - mid - std::exp(-c * mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("single replica reproduces a direct run") {
  const ExperimentConfig c = Small(RuleSpec::BohmanFrieze(), 5000, {0.3, 0.7}, 1, 99);
  const ReplicaResults r = RunReplicas(c);
  ProcessState ps(5000, RuleSpec::BohmanFrieze(), c.SeedFor(0));
  ps.RunUntil(1500);
  CHECK(r.replicas[0].snapshots[0].ToJson(0, c.rule) == ps.Census().ToJson(0, c.rule));
  ps.RunUntil(3500);
  CHECK(r.replicas[0].snapshots[1].ToJson(0, c.rule) == ps.Census().ToJson(0, c.rule));
}

TEST_CASE("replica results are deterministic and thread independent") {
  ExperimentConfig c = Small(RuleSpec::BohmanFrieze(), 3000, {0.5}, 7, 5);
  c.trace_t_max = 0.8;
  const Trajectory traj = Trajectory::Solve(1.0, 1e-4);
  const std::string a = Dump(RunReplicas(c, &traj));
  CHECK(a == Dump(RunReplicas(c, &traj)));
  c.threads = 3;
  CHECK(a == Dump(RunReplicas(c, &traj)));
  c.master_seed = 6;
  CHECK(a != Dump(RunReplicas(c, &traj)));
}

TEST_CASE("config json round trip and validation") {
  ExperimentConfig c = Small(RuleSpec::ErAlwaysSecond(), 1000, {0.25, 0.5}, 3, 4);
  c.tc = 0.5;
  const ExperimentConfig d = ExperimentConfig::FromJson(c.ToJson());
  CHECK(d.ToJson() == c.ToJson());
  CHECK(d.ResolvedK() == 1);  // floor(sqrt(1000)/100) = 0, clamped
  CHECK(Small(RuleSpec::BohmanFrieze(), 1000000, {}, 1, 1).ResolvedK() == 10);
  CHECK_THROWS_AS(ExperimentConfig::FromJson({{"n", 10}, {"bogus", 1}}), Error);
  const ExperimentConfig e = ExperimentConfig::FromJson({{"n", 200}, {"m", 17}, {"rule", "er"}});
  CHECK(e.SnapshotSteps() == std::vector<std::uint64_t>{17});
  CHECK(e.rule.mode == RuleMode::kErAlwaysSecond);
  c.replicas = 0;
  CHECK_THROWS_AS(RunReplicas(c), Error);
}

TEST_CASE("regime guards") {
  const RegimeGuards g = EvaluateGuards(1e6, -0.1, 10.0, 10.0);
  CHECK(g.eps_guard == doctest::Approx(0.1 * std::pow(1e6, 0.25) / std::sqrt(std::log(1e6))));
  CHECK(g.eps6n == doctest::Approx(1.0));
  CHECK(g.eps3n == doctest::Approx(1000.0));
  CHECK(g.sqrt_n_over_omega_k == doctest::Approx(10.0));
  CHECK_FALSE(g.eps_guard_large);
  CHECK(g.outside_proven_regime);
}

TEST_CASE("concentration") {
  const Trajectory traj = Trajectory::Solve(2.0, 1e-4);
  ExperimentConfig c = Small(RuleSpec::BohmanFrieze(), 20000, {}, 1, 3);
  c.trace_t_max = 1.0 / 20000;  // the trace covers m = 0 and m = 1 only
  ReplicaResults r = RunReplicas(c, &traj);
  CHECK(r.replicas[0].isolated_trace.front() == 20000);
  CHECK(r.replicas[0].max_scaled_deviation < 0.05);

  c.trace_t_max = 1.5;
  c.replicas = 20;
  r = RunReplicas(c, &traj);
  const CheckReport rep = CheckConcentration(r, 10.0);
  CHECK(rep.passed);
  CHECK(rep.details["max"].get<double>() < 10.0);
  CHECK(r.replicas[0].isolated_trace.size() == 1501);
}

TEST_CASE("tree counts match the tree measure") {
  const Trajectory traj = Trajectory::Solve(1.0, 1e-4);
  const double t = 0.5;
  const ReplicaResults r = RunReplicas(Small(RuleSpec::BohmanFrieze(), 20000, {t}, 60, 21));
  MuOptions opt;
  TreeMeasure tm(traj, opt);
  RhoTable rho{{1, {traj.Rho1At(t), 0.0}}};
  RhoTable mu{{1, {traj.Rho1At(t), 0.0}}};
  for (int k = 2; k <= 5; ++k) {
    rho[k] = {tm.RhoK(k, t).value, 0.0};
    mu[k] = {tm.MuK0(k, t).value, 0.0};
  }
  const CheckReport tc = CheckTreeCounts(r, 0, rho);
  CHECK(tc.passed);
  const CheckReport pf = CheckPairFactorization(r, 0, mu, {{2, 2}, {2, 3}, {3, 3}});
  CHECK(pf.passed);
  const CheckReport nt = CheckNontreeScarcity(r, 0, {2, 3, 4, 5});
  CHECK(nt.passed);
}

TEST_CASE("er tree counts match closed forms") {
  const double t = 0.4;
  const ReplicaResults r = RunReplicas(Small(RuleSpec::ErAlwaysSecond(), 20000, {t}, 60, 8));
  RhoTable rho, mu;
  for (int k = 1; k <= 5; ++k) {
    rho[k] = {k * ErModeMuClosedForm(k, t), 0.0};
    mu[k] = {ErModeMuClosedForm(k, t), 0.0};
  }
  CHECK(CheckTreeCounts(r, 0, rho).passed);
  CHECK(CheckPairFactorization(r, 0, mu, {{1, 2}, {2, 3}}).passed);
}

TEST_CASE("degenerate snapshot at t = 0") {
  const std::uint64_t n = 1000;
  const ReplicaResults r = RunReplicas(Small(RuleSpec::BohmanFrieze(), n, {0.0}, 2, 1));
  const CheckReport pf = CheckPairFactorization(r, 0, {{1, {1.0, 0.0}}}, {{1, 1}});
  const double mean = pf.details["per_pair"][0]["mean"];
  CHECK(mean == static_cast<double>(n * (n - 1)));
  CHECK(std::fabs(mean / (n * n) - 1.0) == doctest::Approx(1.0 / n));
  CHECK(CheckNontreeScarcity(r, 0, {1}).statistic == 0.0);
  CHECK(CheckGap(r, 0, 2).statistic == 0.0);
  const CheckReport mass = CheckSmallVertexMass(r, 0, 1, 0.0, 0.1);
  CHECK(mass.details["partition_identity_holds"].get<bool>());
}

TEST_CASE("poisson window with vanishing lambda") {
  const ReplicaResults r = RunReplicas(Small(RuleSpec::BohmanFrieze(), 10000, {0.2}, 20, 2));
  const CheckReport rep = CheckPoissonWindow(r, 0, 200, 400, 1e-9);
  CHECK(rep.details["p0_hat"].get<double>() == 1.0);
  CHECK(rep.passed);
  CHECK_FALSE(rep.warnings.empty());
  CHECK_THROWS_AS(CheckPoissonWindow(r, 0, 10, 10, 1.0), Error);
}

TEST_CASE("er giant and vertex mass partition") {
  const double t = 0.75;
  ExperimentConfig c = Small(RuleSpec::ErAlwaysSecond(), 1000000, {t}, 3, 12);
  c.K = 40;
  const ReplicaResults r = RunReplicas(c);
  const double rho = ErGiantFixedPoint(2 * t);
  const CheckReport mass = CheckSmallVertexMass(r, 0, c.K, rho, 0.25);
  CHECK(mass.details["partition_identity_holds"].get<bool>());
  CHECK(mass.details["mean_fraction_gap"].get<double>() < 0.01);
  CHECK(mass.passed);
  const CheckReport giant = CheckGiant(r, 0, c.K, rho, 0.25);
  CHECK(giant.passed);
}

TEST_CASE("extreme value refuses the scaling window") {
  const ReplicaResults r = RunReplicas(Small(RuleSpec::BohmanFrieze(), 1000, {0.5}, 2, 2));
  FitResult fit;
  fit.delta = 0.1;
  fit.gamma = 1.0;
  try {
    ExtremeValueExperiment(r, 0, fit, -0.1);  // |eps|^3 n = 1
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kOutOfRegime);
  }
}

TEST_CASE("exact edge probabilities") {
  const std::uint64_t n = 30;
  const double pairs = n * (n - 1) / 2.0;
  ProcessState empty(n, RuleSpec::BohmanFrieze(), 1);
  const auto p = ExactEdgeProbabilities(empty);
  // Every pair is isolated: (1/N)(1 + 1 - C(I,2)/C(n,2)) with I = n.
  for (double v : p) CHECK(v == doctest::Approx(1.0 / pairs).epsilon(1e-14));

  // A graph without isolated vertices: uniform second draws.
  ProcessState full(n, RuleSpec::BohmanFrieze(), 1);
  for (Vertex v = 0; v + 1 < n; v += 2) full.AddEdge(VertexPair::Of(v, v + 1));
  CHECK(full.isolated() == 0);
  for (double v : ExactEdgeProbabilities(full)) CHECK(v == doctest::Approx(1.0 / pairs));

  ProcessState mid(n, RuleSpec::BohmanFrieze(), 1);
  for (Vertex v = 0; v < 10; v += 2) mid.AddEdge(VertexPair::Of(v, v + 1));
  const auto q = ExactEdgeProbabilities(mid);
  double total = 0.0;
  for (double v : q) total += v;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
  const double iso = 20.0 * 19.0 / 2.0 / pairs;
  CHECK(q[PairIndex(n, 20, 21)] == doctest::Approx((2.0 - iso) / pairs).epsilon(1e-13));
  CHECK(q[PairIndex(n, 0, 21)] == doctest::Approx((1.0 - iso) / pairs).epsilon(1e-13));

  // A custom table equal to BF gives the same probabilities.
  ProcessState custom(n, RuleSpec::Custom(1, {{1, 1, 1, 1}, {1, 1, 1, 2}, {1, 1, 2, 1},
                                               {1, 1, 2, 2}}), 1);
  for (Vertex v = 0; v < 10; v += 2) custom.AddEdge(VertexPair::Of(v, v + 1));
  const auto cq = ExactEdgeProbabilities(custom);
  for (std::size_t i = 0; i < q.size(); ++i) CHECK(cq[i] == doctest::Approx(q[i]).epsilon(1e-14));
}

TEST_CASE("conditional edge frequencies") {
  EdgeFrequencyConfig c;
  c.trials = 2'000'000;
  c.prefix_steps = 6;
  const CheckReport rep = CheckConditionalEdgeFrequencies(c);
  CHECK(rep.passed);
  CHECK(rep.details["probability_total"].get<double>() == doctest::Approx(1.0));
  CHECK(std::fabs(rep.details["per_pair_chi_square_z"].get<double>()) < 4.0);
  c.n = 201;
  CHECK_THROWS_AS(CheckConditionalEdgeFrequencies(c), Error);
}

TEST_CASE("simulated densities") {
  const ReplicaResults r = RunReplicas(Small(RuleSpec::BohmanFrieze(), 10000, {0.0, 0.3}, 4, 2));
  const RhoTable at0 = SimulatedRho(r, 0, 1, 3);
  CHECK(at0.at(1).value == 1.0);
  CHECK(at0.at(2).value == 0.0);
  const RhoTable at3 = SimulatedRho(r, 1, 1, 60);
  double total = 0.0;
  for (const auto& [k, p] : at3) total += p.value;
  CHECK(total > 0.99);
  CHECK(total <= 1.0);
}
