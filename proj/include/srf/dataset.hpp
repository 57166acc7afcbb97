#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "srf/linalg.hpp"

namespace srf {

// Point set with optional integer labels. Invariants (checked by validate):
// n >= 2, d >= 1, all coordinates finite, labels (if present) have length n.
struct Dataset {
  Matrix points;  // n x d
  std::optional<std::vector<int>> labels;
  std::string name;

  std::size_t size() const { return points.rows(); }
  std::size_t dim() const { return points.cols(); }
  std::span<const double> point(std::size_t i) const { return points.row(i); }
};

void validate(const Dataset& ds);

Dataset make_dataset(Matrix points, std::optional<std::vector<int>> labels = std::nullopt,
                     std::string name = "");

}
