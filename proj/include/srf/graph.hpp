#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "srf/dataset.hpp"
#include "srf/linalg.hpp"
#include "srf/metric.hpp"

namespace srf {

// Symmetric matrix of pairwise point distances, zero diagonal.
struct DistanceMatrix {
  Matrix d;  // n x n
  MetricKind metric = MetricKind::L2;

  std::size_t size() const { return d.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return d(i, j); }
};

DistanceMatrix pairwise_distances(const Dataset& ds, MetricKind metric, unsigned jobs = 0);

// Small process-wide cache keyed by the dataset bytes and the metric, so
// certificates, features, and attacks working on one dataset share a single
// distance computation. Hits are verified by full data comparison.
std::shared_ptr<const DistanceMatrix> cached_distances(const Dataset& ds, MetricKind metric);

enum class GraphKind { Threshold, Gaussian, PointwiseThreshold };

// Undirected weighted graph as a symmetric weight matrix with zero diagonal.
// Threshold kinds carry 0/1 weights exactly.
struct Graph {
  Matrix weights;  // n x n
  GraphKind kind = GraphKind::Threshold;
  double threshold = 0.0;  // Threshold / PointwiseThreshold
  double gamma = 0.0;      // Gaussian
  double eps = 0.0;        // PointwiseThreshold
  int shift = 0;           // PointwiseThreshold: -1, 0, +1 on node-0 edges

  std::size_t size() const { return weights.rows(); }
  std::vector<double> degrees() const;
};

// Edge iff distance <= T (inclusive), no self loops.
Graph threshold_graph(const DistanceMatrix& dm, double threshold);

struct ShiftedGraphs {
  Graph minus;  // threshold T - 2 eps (clamped at 0)
  Graph base;   // threshold T
  Graph plus;   // threshold T + 2 eps
  bool clipped = false;  // T - 2 eps fell below 0
};

// Dataset-level comparison graphs: every pairwise distance moves by at most
// 2 eps when each point moves by at most eps, so edges of `minus` survive any
// such perturbation and no edge outside `plus` can appear.
ShiftedGraphs shifted_graphs(const DistanceMatrix& dm, double threshold, double eps);

struct PointwiseGraphs {
  Graph minus;  // node-0 edges at T - eps
  Graph base;   // node-0 edges at T
  Graph plus;   // node-0 edges at T + eps
};

// Graphs on {x} U X with x as node 0. Only node-0 edges shift (the training
// points never move in the pointwise threat model); training-pair edges use
// threshold T in all three graphs.
PointwiseGraphs pointwise_graphs(const Dataset& train, std::span<const double> x,
                                 double threshold, double eps, MetricKind metric);

// Complete weighted graph, w_ij = exp(-gamma * d_ij^2) off the diagonal.
Graph gaussian_graph(const DistanceMatrix& dm, double gamma);

enum class LaplacianVariant { Unnormalized, Scaled };

struct LaplacianMatrix {
  Matrix m;
  LaplacianVariant variant = LaplacianVariant::Unnormalized;
  GraphKind source_kind = GraphKind::Threshold;
};

// Unnormalized: D - A. Scaled: I - D^{-1/2} A D^{-1/2}, with the row and
// column of any isolated vertex set to the identity row.
LaplacianMatrix laplacian(const Graph& g, LaplacianVariant variant);

// Largest vertex degree of an unweighted graph; rejects weighted kinds.
std::size_t max_degree(const Graph& g);

// Edge list dump, one "i j weight" line per edge, i < j, lexicographic order.
void write_edge_list(const Graph& g, std::ostream& out);

}
