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

#include "bfsim/trajectory.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>

#include "bfsim/error.hpp"

namespace bfsim {

namespace {

// Cubic Hermite on one interval of width h with Fritsch-Carlson slope
// limiting, evaluated at fraction s in [0, 1].
double MonotoneHermite(double y0, double y1, double d0, double d1, double h,
                       double s) {
  const double secant = (y1 - y0) / h;
  if (secant == 0.0) {
    d0 = d1 = 0.0;
  } else {
    double a = d0 / secant;
    double b = d1 / secant;
    if (a < 0.0) a = 0.0;
    if (b < 0.0) b = 0.0;
    const double r2 = a * a + b * b;
    if (r2 > 9.0) {
      const double tau = 3.0 / std::sqrt(r2);
      a *= tau;
      b *= tau;
    }
    d0 = a * secant;
    d1 = b * secant;
  }
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  return h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
}

}  // namespace

Trajectory Trajectory::Solve(double t_max, double dt, TrajectoryMode mode) {
  Require(t_max > 0.0 && std::isfinite(t_max), ErrorCode::kInvalidArgument,
          "t_max must be positive");
  Require(dt > 0.0 && std::isfinite(dt), ErrorCode::kInvalidArgument,
          "dt must be positive");
  const double steps = std::ceil(t_max / dt - 1e-9);
  Require(steps <= 5e8, ErrorCode::kResourceLimit, "trajectory grid too fine");
  const auto intervals = static_cast<std::size_t>(std::max(1.0, steps));

  Trajectory traj;
  traj.mode_ = mode;
  traj.t_max_ = t_max;
  traj.dt_ = t_max / static_cast<double>(intervals);
  traj.rho1_.resize(intervals + 1);
  traj.A_.resize(intervals + 1);
  traj.B_.resize(intervals + 1);

  if (mode == TrajectoryMode::kEr) {
    for (std::size_t i = 0; i <= intervals; ++i) {
      const double t = traj.TimeAt(i);
      traj.rho1_[i] = std::exp(-2.0 * t);
      traj.A_[i] = t - (1.0 - std::exp(-4.0 * t)) / 4.0;
      traj.B_[i] = (1.0 - std::exp(-2.0 * t)) / 2.0;
    }
    return traj;
  }

  const double h = traj.dt_;
  double rho = 1.0;
  double a = 0.0;
  double b = 0.0;
  traj.rho1_[0] = rho;
  traj.A_[0] = a;
  traj.B_[0] = b;
  for (std::size_t i = 1; i <= intervals; ++i) {
    const double r1 = rho;
    const double k1 = Rho1Slope(r1);
    const double r2 = rho + 0.5 * h * k1;
    const double k2 = Rho1Slope(r2);
    const double r3 = rho + 0.5 * h * k2;
    const double k3 = Rho1Slope(r3);
    const double r4 = rho + h * k3;
    const double k4 = Rho1Slope(r4);
    rho += h / 6.0 * (k1 + 2.0 * (k2 + k3) + k4);
    a += h / 6.0 *
         ((1 - r1 * r1) + 2.0 * ((1 - r2 * r2) + (1 - r3 * r3)) + (1 - r4 * r4));
    b += h / 6.0 * (r1 + 2.0 * (r2 + r3) + r4);
    traj.rho1_[i] = rho;
    traj.A_[i] = a;
    traj.B_[i] = b;
  }
  return traj;
}

double Trajectory::TimeAt(std::size_t i) const {
  return i + 1 == rho1_.size() ? t_max_ : static_cast<double>(i) * dt_;
}

std::size_t Trajectory::Locate(double t, double* frac) const {
  if (!(t >= 0.0 && t <= t_max_)) {
    Fail(ErrorCode::kInvalidArgument, "time " + std::to_string(t) +
                                          " outside [0, " +
                                          std::to_string(t_max_) + "]");
  }
  const std::size_t last = rho1_.size() - 1;
  auto i = static_cast<std::size_t>(t / dt_);
  if (i >= last) i = last - 1;
  *frac = std::clamp((t - static_cast<double>(i) * dt_) / dt_, 0.0, 1.0);
  return i;
}

double Trajectory::Rho1At(double t) const {
  double s = 0.0;
  const std::size_t i = Locate(t, &s);
  if (mode_ == TrajectoryMode::kEr) return std::exp(-2.0 * t);
  if (s == 0.0) return rho1_[i];
  if (s == 1.0) return rho1_[i + 1];
  return MonotoneHermite(rho1_[i], rho1_[i + 1], Rho1Slope(rho1_[i]),
                         Rho1Slope(rho1_[i + 1]), dt_, s);
}

Trajectory::Integrals Trajectory::IntegralsAt(double t) const {
  double s = 0.0;
  const std::size_t i = Locate(t, &s);
  if (mode_ == TrajectoryMode::kEr) {
    return {t - (1.0 - std::exp(-4.0 * t)) / 4.0,
            (1.0 - std::exp(-2.0 * t)) / 2.0};
  }
  if (s == 0.0) return {A_[i], B_[i]};
  if (s == 1.0) return {A_[i + 1], B_[i + 1]};
  const double r0 = rho1_[i];
  const double r1 = rho1_[i + 1];
  return {MonotoneHermite(A_[i], A_[i + 1], 1 - r0 * r0, 1 - r1 * r1, dt_, s),
          MonotoneHermite(B_[i], B_[i + 1], r0, r1, dt_, s)};
}

void Trajectory::WriteCsv(std::ostream& os, std::size_t stride) const {
  stride = std::max<std::size_t>(stride, 1);
  os << "t,rho1,A,B\n";
  // Shortest representation that round-trips.
  char buf[32];
  auto put = [&](double v, char sep) {
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    os.write(buf, r.ptr - buf);
    os.put(sep);
  };
  for (std::size_t i = 0; i < rho1_.size(); i += stride) {
    put(TimeAt(i), ',');
    put(rho1_[i], ',');
    put(A_[i], ',');
    put(B_[i], '\n');
  }
}

}  // namespace bfsim
