/*
 * Copyright 2026 The Coughscreen Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "coughscreen/dsp/features.h"
#include "coughscreen/error.h"

namespace coughscreen::dsp {
namespace {

// Neumaier-compensated sum.
class CompensatedSum {
 public:
  void Add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

struct QuantilePosition {
  std::size_t lower;
  double fraction;
};

QuantilePosition Locate(std::size_t n, double p) {
  const double h = (n - 1) * p;
  const auto lower = static_cast<std::size_t>(std::floor(h));
  return {lower, h - lower};
}

}  // namespace

BinStatistics ComputeBinStatistics(std::span<const double> row) {
  const std::size_t n = row.size();
  if (n == 0) throw Error(ErrorKind::kEmptyInput, "bin_statistics: empty row");

  BinStatistics s;
  const auto [lo, hi] = std::minmax_element(row.begin(), row.end());
  s.min = *lo;
  s.max = *hi;

  CompensatedSum total;
  CompensatedSum squares;
  for (double x : row) {
    total.Add(x);
    squares.Add(x * x);
  }
  s.l2 = std::sqrt(squares.value());

  if (s.min == s.max) {
    // Constant row: take the value itself so rounding in the sum cannot leak
    // a spurious variance into the higher moments.
    s.mean = s.median = s.q1 = s.q3 = s.min;
    return s;
  }

  s.mean = total.value() / n;
  CompensatedSum m2, m3, m4;
  for (double x : row) {
    const double d = x - s.mean;
    const double d2 = d * d;
    m2.Add(d2);
    m3.Add(d2 * d);
    m4.Add(d2 * d2);
  }
  const double var = m2.value() / n;
  s.std = std::sqrt(var);
  if (var > 0.0) {
    s.skew = (m3.value() / n) / std::pow(var, 1.5);
    s.kurtosis = (m4.value() / n) / (var * var) - 3.0;
  }

  // Order statistics via successive partial partitions over the ranks that
  // the three interpolated quantiles touch.
  const std::array<QuantilePosition, 3> quantiles = {
      Locate(n, 0.25), Locate(n, 0.5), Locate(n, 0.75)};
  std::set<std::size_t> ranks;
  for (const auto& q : quantiles) {
    ranks.insert(q.lower);
    if (q.lower + 1 < n) ranks.insert(q.lower + 1);
  }
  std::vector<double> work(row.begin(), row.end());
  auto first = work.begin();
  for (std::size_t r : ranks) {
    std::nth_element(first, work.begin() + r, work.end());
    first = work.begin() + r + 1;
  }
  auto at = [&](const QuantilePosition& q) {
    const double a = work[q.lower];
    if (q.fraction == 0.0) return a;
    const double b = work[q.lower + 1];
    return a + q.fraction * (b - a);
  };
  s.q1 = at(quantiles[0]);
  s.median = at(quantiles[1]);
  s.q3 = at(quantiles[2]);
  s.iqr = s.q3 - s.q1;
  return s;
}

}  // namespace coughscreen::dsp
