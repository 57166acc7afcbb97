#pragma once

#include <functional>
#include <span>
#include <vector>

#include "srf/attack.hpp"
#include "srf/dataset.hpp"
#include "srf/metric.hpp"

namespace srf::detail {

struct PointSearchOutcome {
  double best_obj = 0.0;
  std::vector<double> best_x;
  std::size_t evals = 0;
};

// Seeded maximization of `objective` over the eps-ball around x0. When train
// is given, candidates include node-0 edge toggles against it at `threshold`
// and refinement steps aim at the nearest edge boundary; without it the
// search is purely random directions. Serial, deterministic per seed; stops
// as soon as early_stop is reached.
PointSearchOutcome search_point(std::span<const double> x0,
                                const std::function<double(std::span<const double>)>& objective,
                                double eps, MetricKind metric, const Dataset* train,
                                double threshold, const AttackBudget& budget, double early_stop);

}
