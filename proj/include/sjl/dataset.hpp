#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

// Point clouds and the per-pair norms that drive the sparsity thresholds.

namespace sjl {

// Norms of the difference x_i - x_j.
struct PairNorms {
  std::size_t i = 0, j = 0;
  double l2sq = 0.0;    // ||x_i - x_j||_2^2
  double l4p4 = 0.0;    // ||x_i - x_j||_4^4
  double linfsq = 0.0;  // ||x_i - x_j||_inf^2
};

class DataSet {
 public:
  DataSet() = default;
  // values is row-major, n * p entries.
  DataSet(std::size_t n, std::size_t p, std::vector<double> values);

  std::size_t n() const { return n_; }
  std::size_t p() const { return p_; }
  const std::vector<double>& values() const { return values_; }
  const double* row(std::size_t i) const { return values_.data() + i * p_; }
  double at(std::size_t i, std::size_t k) const { return values_[i * p_ + k]; }

  // All n(n-1)/2 pairs i < j, computed on first use and cached.
  const std::vector<PairNorms>& pair_norms() const;

  // Pairs with ||x_i - x_j|| = 0; these carry no distortion information.
  std::vector<std::pair<std::size_t, std::size_t>> zero_distance_pairs() const;

  bool operator==(const DataSet& o) const { return n_ == o.n_ && p_ == o.p_ && values_ == o.values_; }

 private:
  std::size_t n_ = 0, p_ = 0;
  std::vector<double> values_;
  mutable std::vector<PairNorms> pair_cache_;
  mutable bool pair_cache_ready_ = false;
};

// One point per line, comma separated. A first line that does not parse as
// numbers is treated as a header. Throws std::runtime_error naming the line
// on ragged or malformed input.
DataSet load_csv(const std::string& path);
DataSet parse_csv(std::istream& in, const std::string& name);

// Header c0,...,c{p-1}, then one row per point, %.17g (round-trip exact).
void save_csv(const DataSet& data, const std::string& path);
void write_csv(const DataSet& data, std::ostream& out);

}  // namespace sjl
