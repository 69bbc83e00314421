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

#include "coughscreen/evaluation/grid_search.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "coughscreen/error.h"

namespace coughscreen::evaluation {
namespace {

struct Item {
  std::array<double, 4> branch;
  int label;
};

// Scores are the unscaled integer-weighted sums; dividing by the number of
// divisions would not change their order.
inline double Combine(const Item& it, const GridUnits& u) {
  return u[0] * it.branch[0] + u[1] * it.branch[1] + u[2] * it.branch[2] +
         u[3] * it.branch[3];
}

std::vector<Item> AlignBranches(const BranchScores& branches) {
  const std::size_t n = branches[0].size();
  for (std::size_t b = 0; b < 4; ++b) {
    branches[b].Validate();
    if (branches[b].size() != n || branches[b].labels != branches[0].labels) {
      throw Error(ErrorKind::kInvalidArgument,
                  "grid search: branch " + std::to_string(b) +
                      " is not aligned with branch 0");
    }
  }
  std::vector<Item> items(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t b = 0; b < 4; ++b) items[i].branch[b] = branches[b].scores[i];
    items[i].label = branches[0].labels[i];
  }
  return items;
}

// Positives and negatives are kept separately in ascending score order
// across successive grid points. Neighbouring points barely reorder the
// items, so insertion sort runs in close to linear time, and swaps within a
// class never touch the statistic.
class IncrementalAuc {
 public:
  explicit IncrementalAuc(const std::vector<Item>& items) : items_(items) {
    for (std::uint32_t i = 0; i < items.size(); ++i) {
      (items[i].label == 1 ? pos_ : neg_).push_back({0.0, i});
    }
  }

  std::uint64_t TwiceU(const GridUnits& u) {
    Rescore(pos_, u);
    Rescore(neg_, u);
    // For each positive, negatives strictly below count twice and ties once.
    std::uint64_t twice_u = 0;
    std::size_t below = 0;
    std::size_t not_above = 0;
    for (const Ranked& p : pos_) {
      while (below < neg_.size() && neg_[below].score < p.score) ++below;
      if (not_above < below) not_above = below;
      while (not_above < neg_.size() && neg_[not_above].score <= p.score) ++not_above;
      twice_u += below + not_above;
    }
    return twice_u;
  }

 private:
  struct Ranked {
    double score;
    std::uint32_t item;
  };

  void Rescore(std::vector<Ranked>& v, const GridUnits& u) {
    for (auto& r : v) r.score = Combine(items_[r.item], u);
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (!(v[i].score < v[i - 1].score)) continue;
      const Ranked moving = v[i];
      std::size_t j = i;
      while (j > 0 && moving.score < v[j - 1].score) {
        v[j] = v[j - 1];
        --j;
      }
      v[j] = moving;
    }
  }

  const std::vector<Item>& items_;
  std::vector<Ranked> pos_;
  std::vector<Ranked> neg_;
};

double MccAt(const std::vector<Item>& items, const GridUnits& u, double cut) {
  ConfusionCounts c;
  for (const auto& it : items) {
    const bool predicted = Combine(it, u) >= cut;
    if (predicted && it.label == 1) ++c.tp;
    else if (predicted) ++c.fp;
    else if (it.label == 1) ++c.fn;
    else ++c.tn;
  }
  return Mcc(c);
}

struct Candidate {
  double metric = -1.0;
  std::uint64_t twice_u = 0;
  GridUnits units{};
  bool set = false;
  std::size_t points = 0;
};

// True when (metric, units) should replace `best`: a larger metric, or an
// equal one at lexicographically smaller weights.
bool Better(const Candidate& best, GridMetric metric, std::uint64_t twice_u,
            double value, const GridUnits& units) {
  if (!best.set) return true;
  if (metric == GridMetric::kAuc) {
    if (twice_u != best.twice_u) return twice_u > best.twice_u;
  } else if (value != best.metric) {
    return value > best.metric;
  }
  return units < best.units;
}

Candidate SearchSlice(const std::vector<Item>& items, int divisions,
                      const GridSearchOptions& options, std::size_t worker,
                      std::size_t workers, double pairs) {
  Candidate best;
  std::size_t points = 0;
  IncrementalAuc auc(items);
  const double cut = options.mcc_threshold * divisions;
  bool reverse = false;
  for (int t = static_cast<int>(worker); t <= divisions;
       t += static_cast<int>(workers)) {
    for (int x = 0; x <= divisions - t; ++x) {
      // Alternate the sweep direction of the innermost axis so that
      // consecutive points stay neighbours.
      const int span = divisions - t - x;
      for (int s = 0; s <= span; ++s) {
        const int y = reverse ? span - s : s;
        const GridUnits u = {t, x, y, divisions - t - x - y};
        ++points;
        if (options.metric == GridMetric::kAuc) {
          const std::uint64_t tu = auc.TwiceU(u);
          if (Better(best, options.metric, tu, 0.0, u)) {
            best = {static_cast<double>(tu) / (2.0 * pairs), tu, u, true, 0};
          }
        } else {
          const double m = MccAt(items, u, cut);
          if (Better(best, options.metric, 0, m, u)) {
            best = {m, 0, u, true, 0};
          }
        }
      }
      reverse = !reverse;
    }
  }
  best.points = points;
  return best;
}

}  // namespace

std::string_view GridMetricName(GridMetric metric) {
  return metric == GridMetric::kAuc ? "auc" : "mcc";
}

int GridDivisions(double step) {
  if (!(step > 0.0 && step <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "grid step must lie in (0, 1]");
  }
  const double n = std::round(1.0 / step);
  if (std::abs(n * step - 1.0) > 1e-9) {
    throw Error(ErrorKind::kInvalidArgument,
                "grid step " + std::to_string(step) + " does not divide 1");
  }
  return static_cast<int>(n);
}

double EvaluateGridPoint(const BranchScores& branches, const GridUnits& units,
                         int divisions, GridMetric metric, double mcc_threshold) {
  const auto items = AlignBranches(branches);
  if (metric == GridMetric::kMcc) return MccAt(items, units, mcc_threshold * divisions);
  LabeledScores combined;
  for (const auto& it : items) {
    combined.scores.push_back(Combine(it, units));
    combined.labels.push_back(it.label);
  }
  return RocAuc(combined);
}

GridSearchResult GridSearchWeights(const BranchScores& branches,
                                   const GridSearchOptions& options) {
  const int divisions = GridDivisions(options.step);
  const auto items = AlignBranches(branches);
  const std::size_t pos = branches[0].positives();
  if (options.metric == GridMetric::kAuc && (pos == 0 || pos == items.size())) {
    throw Error(ErrorKind::kUndefined, "grid search: AUC needs both classes");
  }
  const double pairs =
      static_cast<double>(pos) * static_cast<double>(items.size() - pos);

  std::size_t workers = options.threads;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<std::size_t>(workers, static_cast<std::size_t>(divisions) + 1);

  std::vector<Candidate> partial(workers);
  if (workers == 1) {
    partial[0] = SearchSlice(items, divisions, options, 0, 1, pairs);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        partial[w] = SearchSlice(items, divisions, options, w, workers, pairs);
      });
    }
    for (auto& th : pool) th.join();
  }

  Candidate best;
  std::size_t points = 0;
  for (const auto& c : partial) {
    points += c.points;
    if (c.set && Better(best, options.metric, c.twice_u, c.metric, c.units)) best = c;
  }
  GridSearchResult result;
  result.units = best.units;
  result.metric = best.metric;
  result.points_evaluated = points;
  const double d = divisions;
  result.weights = {best.units[0] / d, best.units[1] / d, best.units[2] / d,
                    best.units[3] / d};
  return result;
}

}  // namespace coughscreen::evaluation
