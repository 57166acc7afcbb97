#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>

namespace srf {

enum class MetricKind { L2, L1, LInf };

inline double point_distance(std::span<const double> a, std::span<const double> b,
                             MetricKind metric) {
  if (a.size() != b.size()) throw std::invalid_argument("point_distance: dimension mismatch");
  switch (metric) {
    case MetricKind::L2: {
      double s = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
      }
      return std::sqrt(s);
    }
    case MetricKind::L1: {
      double s = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
      return s;
    }
    case MetricKind::LInf: {
      double s = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
      return s;
    }
  }
  throw std::invalid_argument("point_distance: unknown metric");
}

inline std::string metric_name(MetricKind m) {
  switch (m) {
    case MetricKind::L2: return "l2";
    case MetricKind::L1: return "l1";
    case MetricKind::LInf: return "linf";
  }
  return "?";
}

inline MetricKind metric_from_name(const std::string& s) {
  if (s == "l2") return MetricKind::L2;
  if (s == "l1") return MetricKind::L1;
  if (s == "linf") return MetricKind::LInf;
  throw std::invalid_argument("unknown metric '" + s + "' (expected l2, l1, or linf)");
}

}
