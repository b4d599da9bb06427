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

#ifndef BFSIM_TRAJECTORY_HPP_
#define BFSIM_TRAJECTORY_HPP_

#include <cstddef>
#include <ostream>
#include <vector>

namespace bfsim {

enum class TrajectoryMode { kBohmanFrieze, kEr };

// Limiting isolated-vertex density rho1(t) of the process with the two
// cumulative integrals used by the component-density integrands:
//   A(t) = int_0^t (1 - rho1^2),   B(t) = int_0^t rho1.
// Immutable after construction.
class Trajectory {
 public:
  struct Integrals {
    double A = 0.0;
    double B = 0.0;
  };

  // Classical RK4 on the augmented system (rho1, A, B); the cumulative
  // integrals reuse the rho1 stage values. The grid has ceil(t_max / dt)
  // uniform intervals ending exactly at t_max. In kEr mode rho1 = e^{-2t}
  // and A, B are filled from their closed forms.
  static Trajectory Solve(double t_max = 2.0, double dt = 1e-4,
                          TrajectoryMode mode = TrajectoryMode::kBohmanFrieze);

  // d rho1 / dt = -2 rho1^2 - 2 (1 - rho1^2) rho1
  static double Rho1Slope(double rho1) {
    return -2.0 * rho1 * rho1 - 2.0 * (1.0 - rho1 * rho1) * rho1;
  }

  // Monotone cubic Hermite interpolation; exact at grid points.
  double Rho1At(double t) const;
  Integrals IntegralsAt(double t) const;

  TrajectoryMode mode() const { return mode_; }
  double t_max() const { return t_max_; }
  double dt() const { return dt_; }
  std::size_t size() const { return rho1_.size(); }
  double TimeAt(std::size_t i) const;
  double rho1(std::size_t i) const { return rho1_[i]; }
  double A(std::size_t i) const { return A_[i]; }
  double B(std::size_t i) const { return B_[i]; }

  // "t,rho1,A,B" header followed by every `stride`-th grid row.
  void WriteCsv(std::ostream& os, std::size_t stride = 1) const;

 private:
  Trajectory() = default;
  std::size_t Locate(double t, double* frac) const;

  TrajectoryMode mode_ = TrajectoryMode::kBohmanFrieze;
  double t_max_ = 0.0;
  double dt_ = 0.0;
  std::vector<double> rho1_;
  std::vector<double> A_;
  std::vector<double> B_;
};

}  // namespace bfsim

#endif  // BFSIM_TRAJECTORY_HPP_
