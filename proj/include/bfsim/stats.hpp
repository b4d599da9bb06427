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


#ifndef BFSIM_STATS_HPP_
#define BFSIM_STATS_HPP_

#include <cstddef>
#include <functional>
#include <vector>

namespace bfsim {

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double sd = 0.0;         // sample standard deviation
  double std_error = 0.0;  // sd / sqrt(count)
};

Summary Summarize(const std::vector<double>& xs);

double GumbelCdf(double x);

// Sup-distance between the empirical CDF of `sample` and `cdf`.
double KsDistance(std::vector<double> sample,
                  const std::function<double(double)>& cdf);

double PoissonPmf(int j, double lambda);

// Weighted least squares for y = a + b x.
struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double intercept_se = 0.0;
  double slope_se = 0.0;
  double weighted_rms = 0.0;  // sqrt(sum w r^2 / sum w)
};

LineFit FitLine(const std::vector<double>& x, const std::vector<double>& y,
                const std::vector<double>& w = {});

// Linear-interpolated empirical quantile, q in [0, 1].
double Quantile(std::vector<double> xs, double q);

}  // namespace bfsim

#endif  // BFSIM_STATS_HPP_
