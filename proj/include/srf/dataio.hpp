#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "srf/dataset.hpp"

namespace srf {

// CSV: one row per point, numeric cells, no header unless has_header is set.
// label_column (0-based) moves that column into integer labels.
Dataset load_csv(const std::string& path, std::optional<std::size_t> label_column = std::nullopt,
                 bool has_header = false);

// IDX image/label pair (big-endian, magics 0x00000803 / 0x00000801); pixels
// are scaled to [0,1]. limit keeps only the first `limit` records.
Dataset load_idx_pair(const std::string& images_path, const std::string& labels_path,
                      std::optional<std::size_t> limit = std::nullopt);

// Two clusters of n_per points each, drawn uniformly from L-inf balls of
// radius `spread` centered at the origin and at separation * e1. Labels are
// the cluster indices; cluster 0 rows come first. Identical output for a
// given seed on every platform.
Dataset gen_two_clusters(std::size_t n_per, std::size_t d, double separation, double spread,
                         std::uint64_t seed);

}
