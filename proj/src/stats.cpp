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


#include "bfsim/stats.hpp"

#include <algorithm>
#include <cmath>

#include "bfsim/error.hpp"

namespace bfsim {

Summary Summarize(const std::vector<double>& xs) {
  Summary s;
  s.count = xs.size();
  if (xs.empty()) return s;
  // Welford
  double mean = 0.0, m2 = 0.0;
  std::size_t i = 0;
  for (double x : xs) {
    ++i;
    const double d = x - mean;
    mean += d / static_cast<double>(i);
    m2 += d * (x - mean);
  }
  s.mean = mean;
  if (xs.size() > 1) {
    s.sd = std::sqrt(m2 / static_cast<double>(xs.size() - 1));
    s.std_error = s.sd / std::sqrt(static_cast<double>(xs.size()));
  }
  return s;
}

double GumbelCdf(double x) { return std::exp(-std::exp(-x)); }

double KsDistance(std::vector<double> sample,
                  const std::function<double(double)>& cdf) {
  Require(!sample.empty(), ErrorCode::kInvalidArgument, "empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f,
                  f - static_cast<double>(i) / n});
  }
  return d;
}

double PoissonPmf(int j, double lambda) {
  if (j < 0) return 0.0;
  if (lambda == 0.0) return j == 0 ? 1.0 : 0.0;
  return std::exp(j * std::log(lambda) - lambda - std::lgamma(j + 1.0));
}

LineFit FitLine(const std::vector<double>& x, const std::vector<double>& y,
                const std::vector<double>& w) {
  Require(x.size() == y.size() && x.size() >= 2, ErrorCode::kInvalidArgument,
          "line fit needs at least two paired points");
  Require(w.empty() || w.size() == x.size(), ErrorCode::kInvalidArgument,
          "weight vector length mismatch");
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    sw += wi;
    sx += wi * x[i];
    sy += wi * y[i];
  }
  const double xm = sx / sw, ym = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    sxx += wi * (x[i] - xm) * (x[i] - xm);
    sxy += wi * (x[i] - xm) * (y[i] - ym);
  }
  if (!(sxx > 0.0)) Fail(ErrorCode::kInvalidArgument, "degenerate design");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = ym - f.slope * xm;
  double ssr = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    const double r = y[i] - f.intercept - f.slope * x[i];
    ssr += wi * r * r;
  }
  f.weighted_rms = std::sqrt(ssr / sw);
  if (x.size() > 2) {
    // Scale by the residual variance so unnormalised weights still give
    // sensible standard errors.
    const double s2 = ssr / static_cast<double>(x.size() - 2);
    f.slope_se = std::sqrt(s2 / sxx);
    f.intercept_se = std::sqrt(s2 * (1.0 / sw + xm * xm / sxx));
  }
  return f;
}

double Quantile(std::vector<double> xs, double q) {
  Require(!xs.empty(), ErrorCode::kInvalidArgument, "empty sample");
  std::sort(xs.begin(), xs.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

}  // namespace bfsim
