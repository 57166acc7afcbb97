#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "srf/dataset.hpp"
#include "srf/features.hpp"
#include "srf/graph.hpp"

namespace srf {

struct AttackBudget {
  std::size_t trials = 10000;
  std::size_t refinement_steps = 20;
  std::uint64_t seed = 0;
  unsigned jobs = 0;  // 0: library default; never affects the result bytes
};

struct AttackResult {
  double displacement = 0.0;      // objective at the best candidate found
  Matrix best_perturbed;          // dataset rows, or a single row for a point
  std::size_t trials_used = 0;    // candidate evaluations performed
  bool within_ball = true;        // every candidate is projected into the ball
};

// Seeded search for a perturbed dataset X' (every point within eps of its
// original) maximizing the sign-aligned displacement of the second
// eigenvector. Candidates: random per-point directions at radius exactly eps,
// single and multi edge toggles (pairs whose distance sits within 2 eps of
// the threshold), then greedy refinement moving single points toward or away
// from the nearest threshold boundary. Fixed seed means identical results,
// independent of the worker count.
AttackResult attack_dataset_feature(const Dataset& ds, double threshold, double eps,
                                    MetricKind metric, const AttackBudget& budget,
                                    LaplacianVariant variant = LaplacianVariant::Unnormalized);

// Same search over a single held-out point x against a fixed training set,
// maximizing |f(x) - f(x')| of the extended second-eigenvector feature.
AttackResult attack_pointwise_feature(const Dataset& train, std::span<const double> x,
                                      double threshold, double eps, MetricKind metric,
                                      const AttackBudget& budget);

// Scalar map under attack, plus optional training-set context that lets the
// search aim for node-0 edge toggles.
struct ScalarTarget {
  std::function<double(std::span<const double>)> value;
  const Dataset* train = nullptr;
  double threshold = 0.0;
  MetricKind metric = MetricKind::L2;
};

// Fraction of test points where the search found x' in the eps-ball with
// |f(x) - f(x')| >= delta. A lower bound on the true attackable fraction;
// eps = 0 tries nothing and returns 0.
double estimate_robustness(const Dataset& test, const ScalarTarget& target, double eps,
                           double delta, const AttackBudget& budget);

// Exact smallest-move analysis for a linear head w . x + b: the optimal
// perturbation is along +/- w / ||w||; the label flips iff |w . x + b| <=
// eps ||w||. Returns the flipped point when a flip is possible.
struct LinearAttack {
  bool flipped = false;
  std::vector<double> x_prime;
  double margin = 0.0;  // |w . x + b| / ||w||
};

LinearAttack attack_linear_exact(std::span<const double> w, double b, std::span<const double> x,
                                 double eps);

}
