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

// Exhaustive search for stacking weights over the simplex grid.

#ifndef COUGHSCREEN_EVALUATION_GRID_SEARCH_H_
#define COUGHSCREEN_EVALUATION_GRID_SEARCH_H_

#include <array>
#include <cstddef>
#include <string_view>

#include "coughscreen/evaluation/metrics.h"
#include "coughscreen/screening/screening.h"

namespace coughscreen::evaluation {

enum class GridMetric { kAuc, kMcc };
std::string_view GridMetricName(GridMetric metric);

inline constexpr double kDefaultGridStep = 0.004;

struct GridSearchOptions {
  GridMetric metric = GridMetric::kAuc;
  double step = kDefaultGridStep;
  double mcc_threshold = 0.5;
  // 0 picks the hardware concurrency.
  std::size_t threads = 0;
};

// Branch order matches the stacking weights: spectrogram network (t), cough
// (x), breath (y) and voice (z) ensembles.
using BranchScores = std::array<LabeledScores, 4>;

// A grid point as integer multiples of the step; units sum to 1/step.
using GridUnits = std::array<int, 4>;

struct GridSearchResult {
  screening::StackingWeights weights;
  GridUnits units{};
  double metric = 0.0;
  std::size_t points_evaluated = 0;
};

// Number of grid divisions, round(1/step). Error{kInvalidArgument} unless
// the step divides 1 (to 1e-9).
int GridDivisions(double step);

// Metric of the stack at one grid point, computed exactly the way the search
// computes it.
double EvaluateGridPoint(const BranchScores& branches, const GridUnits& units,
                         int divisions, GridMetric metric,
                         double mcc_threshold = 0.5);

// Maximizes the metric over every (t,x,y,z) on the grid with t+x+y+z = 1.
// Among equal maxima the lexicographically smallest (t,x,y,z) wins,
// independent of thread count. Error{kInvalidArgument} when the branches
// are not aligned on identical items and labels.
GridSearchResult GridSearchWeights(const BranchScores& branches,
                                   const GridSearchOptions& options = {});

}  // namespace coughscreen::evaluation

#endif  // COUGHSCREEN_EVALUATION_GRID_SEARCH_H_
