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

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numeric>
#include <vector>

#include "bfsim/error.hpp"
#include "bfsim/tree_measure.hpp"
#include "doctest.h"

using namespace bfsim;

namespace {

const Trajectory& Bf() {
  static const Trajectory traj = Trajectory::Solve(2.0, 1e-4);
  return traj;
}

const Trajectory& Er() {
  static const Trajectory traj = Trajectory::Solve(2.0, 1e-4, TrajectoryMode::kEr);
  return traj;
}

double Sq(double x) { return x * x; }

bool Within(const MuEstimate& e, double expected, double z = 3.0) {
  // Rounding floor for zero-variance integrands.
  return std::abs(e.value - expected) <= z * e.std_error + 1e-12 * std::abs(expected);
}

}  // namespace

TEST_CASE("g product examples") {
  const auto& traj = Bf();
  const LabeledForest edge(2, {{0, 1}});
  CHECK(GProduct(edge, {{0.3}}, traj) ==
        doctest::Approx(2 * (2 - Sq(traj.Rho1At(0.3)))).epsilon(1e-14));

  const LabeledForest path(3, {{0, 1}, {1, 2}});
  const double expected =
      2 * (2 - Sq(traj.Rho1At(0.1))) * 2 * (1 - Sq(traj.Rho1At(0.2)));
  CHECK(GProduct(path, {{0.1, 0.2}}, traj) ==
        doctest::Approx(expected).epsilon(1e-14));
  // Ties resolve by edge index.
  CHECK(GProduct(path, {{0.2, 0.2}}, traj) ==
        doctest::Approx(2 * (2 - Sq(traj.Rho1At(0.2))) * 2 *
                        (1 - Sq(traj.Rho1At(0.2))))
            .epsilon(1e-14));
}

TEST_CASE("star g product agrees with per-order evaluation over all 3! orders") {
  // Star centred at 0. The first edge to arrive meets two isolated ends
  // (alpha = 2); later edges meet the non-isolated centre (alpha = 1).
  const auto& traj = Bf();
  const LabeledForest star(4, {{0, 1}, {0, 2}, {0, 3}});
  const std::vector<double> slot_times = {0.15, 0.4, 0.75};
  std::vector<int> perm = {0, 1, 2};
  do {
    std::vector<double> times(3);
    for (int e = 0; e < 3; ++e) times[e] = slot_times[perm[e]];
    double direct = 1.0;
    for (int pos = 0; pos < 3; ++pos) {
      const double s = slot_times[pos];
      direct *= 2 * ((pos == 0 ? 2 : 1) - Sq(traj.Rho1At(s)));
    }
    CHECK(GProduct(star, {times}, traj) == doctest::Approx(direct).epsilon(1e-14));
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST_CASE("f hat examples and gradient") {
  const auto& traj = Bf();
  const double t = 0.9;
  const auto at = traj.IntegralsAt(t);
  CHECK(FHat(LabeledForest(1, {}), {{}}, traj, t) ==
        doctest::Approx(2 * at.A + 2 * at.B).epsilon(1e-14));
  CHECK(FHat(LabeledForest(2, {{0, 1}}), {{0.4}}, traj, t) ==
        doctest::Approx(4 * at.A + 4 * traj.IntegralsAt(0.4).B).epsilon(1e-14));
  CHECK_THROWS_AS(FHat(LabeledForest(2, {{0, 1}}), {{1.0}}, traj, t), Error);

  // Path 0-1-2-3 with arrivals (0.5, 0.2, 0.7): edge 1 de-isolates {1,2},
  // edge 0 de-isolates {0}, edge 2 de-isolates {3}.
  const LabeledForest path(4, {{0, 1}, {1, 2}, {2, 3}});
  const std::vector<double> base = {0.5, 0.2, 0.7};
  const int newly[] = {1, 2, 1};
  const double h = 1e-6;
  for (int j = 0; j < 3; ++j) {
    auto up = base;
    auto down = base;
    up[j] += h;
    down[j] -= h;
    const double fd = (FHat(path, {up}, traj, t) - FHat(path, {down}, traj, t)) / (2 * h);
    CHECK(std::abs(fd - 2.0 * newly[j] * traj.Rho1At(base[j])) <= 1e-4);
  }
}

TEST_CASE("single vertex density equals rho1") {
  for (double t : {0.25, 0.5, 1.0}) {
    const auto mc = MuGraphMc(LabeledForest(1, {}), t, Bf(), 10, 1);
    CHECK(mc.std_error == 0.0);
    CHECK(std::abs(mc.value - Bf().Rho1At(t)) <= 1e-8);
    CHECK(std::abs(MuK0(1, t, Bf()).value - Bf().Rho1At(t)) <= 1e-8);
    CHECK(std::abs(RhoK(1, t, Bf()).value - Bf().Rho1At(t)) <= 1e-8);
  }
}

TEST_CASE("two-vertex quadrature against adaptive Gauss-Kronrod") {
  const auto& traj = Bf();
  for (double t : {0.5, 1.2}) {
    const double a = traj.IntegralsAt(t).A;
    auto f = [&](double s) {
      return 2 * (2 - Sq(traj.Rho1At(s))) *
             std::exp(-4 * a - 4 * traj.IntegralsAt(s).B);
    };
    const double oracle =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, t, 15, 1e-14);
    const auto quad = MuGraphQuad(LabeledForest(2, {{0, 1}}), t, traj);
    CHECK(quad.std_error == 0.0);
    CHECK(std::abs(quad.value - oracle) <= 1e-10);
  }
  const auto mc = MuGraphMc(LabeledForest(2, {{0, 1}}), 0.5, traj, 200000, 5);
  CHECK(Within(mc, MuGraphQuad(LabeledForest(2, {{0, 1}}), 0.5, traj).value));
}

TEST_CASE("erdos-renyi closed forms") {
  CHECK(ErModeMuClosedForm(1, 0.7) == doctest::Approx(std::exp(-1.4)));
  CHECK(ErModeMuClosedForm(2, 0.5) == doctest::Approx(std::exp(-2.0) / 2));
  const double t = 0.4;
  const LabeledForest path3(3, {{0, 1}, {1, 2}});
  CHECK(std::abs(MuGraphQuad(path3, t, Er()).value - Sq(2 * t) * std::exp(-6 * t)) <= 1e-8);
  for (int k = 1; k <= 5; ++k) {
    const auto& rep = TreeClasses(k).back().representative;
    const double per_tree = std::pow(2 * t, k - 1) * std::exp(-2.0 * k * t);
    CHECK(Within(MuGraphMc(rep, t, Er(), 20000, 40 + k), per_tree));
    if (k <= 5) {
      CHECK(std::abs(MuK0(k, t, Er()).value - ErModeMuClosedForm(k, t)) <= 1e-6);
    }
    const double classical =
        std::pow(k, k - 1) * std::pow(2 * t, k - 1) * std::exp(-2.0 * k * t) /
        std::tgamma(k + 1.0);
    CHECK(std::abs(RhoK(k, t, Er()).value - classical) <= 1e-9);
  }
  MuOptions mc;
  mc.method = MuMethod::kMonteCarlo;
  mc.samples = 20000;
  for (int k = 1; k <= 6; ++k) {
    CHECK(Within(MuK0(k, t, Er(), mc), ErModeMuClosedForm(k, t)));
  }
  MuOptions closed;
  closed.method = MuMethod::kClosedFormEr;
  CHECK(MuK0(4, t, Er(), closed).value == ErModeMuClosedForm(4, t));
  CHECK_THROWS_AS(MuK0(4, t, Bf(), closed), Error);
}

TEST_CASE("multiplicativity over disjoint components") {
  const auto& traj = Bf();
  const double t = 0.8;
  const LabeledForest edge(2, {{0, 1}});
  const auto two = LabeledForest::DisjointUnion(edge, edge);
  const double single = MuGraphQuad(edge, t, traj).value;
  const double joint = MuGraphQuad(two, t, traj).value;
  CHECK(std::abs(joint - single * single) <= 1e-10 * single * single + 1e-14);

  // Brute-force tensor Simpson rule over the square [0, t]^2 using the raw
  // integrand; both edges are disjoint so it is smooth.
  const int panels = 400;
  const double h = t / panels;
  double acc = 0.0;
  for (int i = 0; i <= panels; ++i) {
    const double wi = (i == 0 || i == panels) ? 1 : (i % 2 ? 4 : 2);
    for (int j = 0; j <= panels; ++j) {
      const double wj = (j == 0 || j == panels) ? 1 : (j % 2 ? 4 : 2);
      const ArrivalTimes at{{i * h, j * h}};
      acc += wi * wj * GProduct(two, at, traj) * std::exp(-FHat(two, at, traj, t));
    }
  }
  const double brute = acc * h * h / 9.0;
  CHECK(std::abs(brute - joint) <= 1e-9);

  const LabeledForest path(3, {{0, 1}, {1, 2}});
  const auto mixed = LabeledForest::DisjointUnion(path, LabeledForest(1, {}));
  CHECK(MuGraphQuad(mixed, t, traj).value ==
        doctest::Approx(MuGraphQuad(path, t, traj).value * traj.Rho1At(t))
            .epsilon(1e-10));
}

TEST_CASE("cube Monte Carlo agrees with ordered-simplex quadrature") {
  const auto& traj = Bf();
  const std::vector<LabeledForest> shapes = {
      LabeledForest(2, {{0, 1}}),
      LabeledForest(3, {{0, 1}, {1, 2}}),
      LabeledForest(4, {{0, 1}, {1, 2}, {2, 3}}),
      LabeledForest(4, {{0, 1}, {0, 2}, {0, 3}}),
      LabeledForest(5, {{0, 1}, {2, 3}, {3, 4}}),
  };
  int idx = 0;
  for (const auto& h : shapes) {
    for (double t : {0.5, 1.1}) {
      const auto quad = MuGraphQuad(h, t, traj);
      const auto mc = MuGraphMc(h, t, traj, 200000, 100 + idx++);
      CHECK(Within(mc, quad.value));
    }
  }
  MuOptions mc;
  mc.method = MuMethod::kMonteCarlo;
  mc.samples = 200000;
  const auto a = MuK0(3, 0.5, traj, mc);
  const auto b = MuK0(3, 0.5, traj);
  CHECK(Within(a, b.value));
}

TEST_CASE("quadrature node count convergence and size cap") {
  const auto& traj = Bf();
  const LabeledForest star(4, {{0, 1}, {0, 2}, {0, 3}});
  QuadOptions coarse;
  coarse.nodes = 24;
  CHECK(MuGraphQuad(star, 1.0, traj, coarse).value ==
        doctest::Approx(MuGraphQuad(star, 1.0, traj).value).epsilon(1e-10));
  const LabeledForest path6(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}});
  try {
    MuGraphQuad(path6, 0.5, traj);
    FAIL("expected unsupported size");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnsupportedSize);
  }
  QuadOptions wide;
  wide.max_edges = 7;
  CHECK(MuGraphQuad(path6, 0.5, traj, wide).value > 0.0);
}

TEST_CASE("density bounds and subcritical mass") {
  const auto& traj = Bf();
  MuOptions opts;
  opts.quad.max_edges = 7;
  TreeMeasure tm(traj, opts);
  for (double t : {0.3, 0.6, 0.9}) {
    double mass = 0.0;
    for (int k = 1; k <= 8; ++k) {
      const auto mu = tm.MuK0(k, t);
      CHECK(mu.value >= 0.0);
      CHECK(mu.value <= std::pow(4.0 * t, k - 1));
      mass += tm.RhoK(k, t).value;
    }
    CHECK(mass <= 1.0);
    if (t == 0.3) CHECK(mass > 0.99);
  }
  CHECK(TreeClasses(7).size() == 11);
}
