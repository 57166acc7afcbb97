#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

#include "srf/attack.hpp"
#include "srf/dataset.hpp"
#include "srf/linalg.hpp"

namespace srf {

// Two concentric spheres in R^d: N points on the unit sphere (label 0), N on
// the radius-R sphere (label 1). eps and the graph threshold are derived from
// R so that, with high probability in d, the threshold graph splits into the
// inner clique plus isolated outer points and survives any eps perturbation.
struct SpheresConfig {
  std::size_t n_per_sphere = 50;
  std::size_t d = 500;
  double radius = 1.3;
  std::uint64_t seed = 0;

  double eps() const { return (radius - 1.0) / 8.0; }
  double threshold() const { return 1.4142135623730950488 + 2.0 * eps(); }  // sqrt(2) + 2 eps
};

// Inner rows first, then outer rows. Deterministic per seed.
Dataset sample_spheres(const SpheresConfig& cfg);

struct SpheresStructure {
  bool inner_tight = false;      // all inner-inner distances <= sqrt(2) + eps
  bool others_far = false;       // all remaining pairs > sqrt(2) + 3 eps
  std::size_t isolated_count = 0;
  bool inner_one_component = false;
  double min_margin = 0.0;  // slack of the binding distance condition

  bool passes() const { return inner_tight && others_far; }
};

SpheresStructure verify_structure(const Dataset& spheres, const SpheresConfig& cfg);

// End-to-end check of the extended feature map on fresh test points: features
// must collapse to one value per sphere, stay separated across spheres, and
// ignore eps-ball attacks entirely.
struct SpheresFeatureReport {
  Matrix inner_features;   // one row per inner test point (k+1 columns)
  Matrix outer_features;
  double inner_spread = 0.0;   // max pairwise L2 within the inner rows
  double outer_spread = 0.0;
  double separation = 0.0;     // min cross-pair L2 distance
  std::size_t exceptional_count = 0;  // test points with unexpected attachment
  double max_attack_displacement = 0.0;
  std::size_t attacked_points = 0;
};

SpheresFeatureReport spheres_feature_test(const Dataset& train, const SpheresConfig& cfg,
                                          std::size_t test_per_sphere, std::uint64_t test_seed,
                                          const AttackBudget& attack_budget,
                                          std::size_t attack_points_per_sphere);

// Monte-Carlo check of distance concentration between two spheres: fraction
// of sampled pairs (a on radius r1, b on radius r2) with
// | ||a-b||^2 - (r1^2 + r2^2) | > tol. Shrinks exponentially in d.
double concentration_check(double r1, double r2, std::size_t d, std::size_t samples, double tol,
                           std::uint64_t seed);

}
