#include "srf/dataio.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "srf/parallel.hpp"
#include "srf/rng.hpp"

namespace srf {

unsigned& default_jobs() {
  static unsigned jobs = std::thread::hardware_concurrency();
  return jobs;
}

void validate(const Dataset& ds) {
  if (ds.size() < 2) throw std::invalid_argument("dataset needs at least 2 points");
  if (ds.dim() < 1) throw std::invalid_argument("dataset needs at least 1 dimension");
  for (std::size_t i = 0; i < ds.size(); ++i)
    for (double v : ds.point(i))
      if (!std::isfinite(v))
        throw std::invalid_argument("dataset contains a non-finite coordinate in row " +
                                    std::to_string(i));
  if (ds.labels && ds.labels->size() != ds.size())
    throw std::invalid_argument("label count does not match point count");
}

Dataset make_dataset(Matrix points, std::optional<std::vector<int>> labels, std::string name) {
  Dataset ds{std::move(points), std::move(labels), std::move(name)};
  validate(ds);
  return ds;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  while (end && *end == ' ') ++end;
  if (end == begin || (end && *end != '\0'))
    throw std::runtime_error("non-numeric cell at row " + std::to_string(row) + ", column " +
                             std::to_string(col) + ": '" + cell + "'");
  return v;
}

}  // namespace

Dataset load_csv(const std::string& path, std::optional<std::size_t> label_column,
                 bool has_header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::string line;
  std::size_t lineno = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (has_header && lineno == 1) continue;
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (width == 0) {
      width = cells.size();
      if (label_column && *label_column >= width)
        throw std::runtime_error("label column " + std::to_string(*label_column) +
                                 " out of range for " + std::to_string(width) + " columns");
    } else if (cells.size() != width) {
      throw std::runtime_error("ragged row at line " + std::to_string(lineno) + ": expected " +
                               std::to_string(width) + " cells, got " +
                               std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(width);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = parse_cell(cells[c], lineno, c);
      if (label_column && c == *label_column) {
        double r = std::round(v);
        if (std::abs(v - r) > 1e-9)
          throw std::runtime_error("label at line " + std::to_string(lineno) +
                                   " is not an integer: '" + cells[c] + "'");
        labels.push_back(static_cast<int>(r));
      } else {
        row.push_back(v);
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error(path + " has no data rows");
  Matrix pts(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) pts(i, j) = rows[i][j];
  std::optional<std::vector<int>> lab;
  if (label_column) lab = std::move(labels);
  return make_dataset(std::move(pts), std::move(lab), path);
}

namespace {

std::uint32_t read_be32(std::istream& in, const std::string& path) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw std::runtime_error("unexpected end of file in " + path);
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) | (std::uint32_t(b[2]) << 8) |
         std::uint32_t(b[3]);
}

}  // namespace

Dataset load_idx_pair(const std::string& images_path, const std::string& labels_path,
                      std::optional<std::size_t> limit) {
  std::ifstream img(images_path, std::ios::binary);
  if (!img) throw std::runtime_error("cannot open " + images_path);
  std::uint32_t magic = read_be32(img, images_path);
  if (magic != 0x00000803)
    throw std::runtime_error(images_path + ": bad image magic (expected 0x00000803)");
  std::uint32_t count = read_be32(img, images_path);
  std::uint32_t rows = read_be32(img, images_path);
  std::uint32_t cols = read_be32(img, images_path);

  std::ifstream lab(labels_path, std::ios::binary);
  if (!lab) throw std::runtime_error("cannot open " + labels_path);
  std::uint32_t lmagic = read_be32(lab, labels_path);
  if (lmagic != 0x00000801)
    throw std::runtime_error(labels_path + ": bad label magic (expected 0x00000801)");
  std::uint32_t lcount = read_be32(lab, labels_path);
  if (lcount != count)
    throw std::runtime_error("image/label count mismatch: " + std::to_string(count) + " vs " +
                             std::to_string(lcount));

  std::size_t n = count;
  if (limit && *limit < n) n = *limit;
  std::size_t dim = std::size_t(rows) * cols;
  if (dim == 0) throw std::runtime_error(images_path + ": zero-sized images");

  Matrix pts(n, dim);
  std::vector<unsigned char> buf(dim);
  for (std::size_t i = 0; i < n; ++i) {
    img.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(dim));
    if (!img) throw std::runtime_error("unexpected end of file in " + images_path);
    for (std::size_t j = 0; j < dim; ++j) pts(i, j) = buf[j] / 255.0;
  }
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    unsigned char b;
    lab.read(reinterpret_cast<char*>(&b), 1);
    if (!lab) throw std::runtime_error("unexpected end of file in " + labels_path);
    labels[i] = b;
  }
  return make_dataset(std::move(pts), std::move(labels), images_path);
}

Dataset gen_two_clusters(std::size_t n_per, std::size_t d, double separation, double spread,
                         std::uint64_t seed) {
  if (n_per < 1 || d < 1) throw std::invalid_argument("gen_two_clusters: n_per and d must be >= 1");
  if (spread < 0 || separation < 0)
    throw std::invalid_argument("gen_two_clusters: negative separation or spread");
  SplitMix64 g(seed);
  Matrix pts(2 * n_per, d);
  std::vector<int> labels(2 * n_per);
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t i = 0; i < n_per; ++i) {
      std::size_t row = c * n_per + i;
      labels[row] = static_cast<int>(c);
      for (std::size_t j = 0; j < d; ++j)
        pts(row, j) = g.uniform(-spread, spread) + (c == 1 && j == 0 ? separation : 0.0);
    }
  return make_dataset(std::move(pts), std::move(labels), "two-clusters");
}

}
