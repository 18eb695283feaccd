#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "sjl/dataset.hpp"
#include "sjl/projection.hpp"

// Empirical checks on realized matrices: pairwise distortion, the Bernstein
// mask event, the sub-Gaussian row MGF, and spectral statistics.

namespace sjl::verify {

struct PairRatio {
  std::size_t i = 0, j = 0;
  double ratio = 0.0;  // ||A(x_i - x_j)||^2 / ||x_i - x_j||^2
};

struct DistortionReport {
  std::size_t pairs = 0;  // pairs with nonzero original distance
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double admissible_eps = 0.0;  // max(1 - min_ratio, max_ratio - 1)
  std::pair<std::size_t, std::size_t> argmin{0, 0};
  std::pair<std::size_t, std::size_t> argmax{0, 0};
  std::vector<std::pair<std::size_t, std::size_t>> skipped;  // zero-distance pairs
  std::vector<PairRatio> ratios;

  std::vector<PairRatio> violations(double eps) const;
  // Columns i,j,ratio; %.17g.
  void write_ratios_csv(std::ostream& out) const;
};

// Applies A to every difference x_i - x_j. Throws if every pair has zero
// distance (nothing to certify).
DistortionReport distortion_report(const ProjectionMatrix& A, const DataSet& data);

// Same report from precomputed images (row i of projected = A x_i). Agrees
// with distortion_report to floating-point reshuffling, and is much cheaper
// when one matrix serves many pairs.
DistortionReport distortion_report_from_points(const DataSet& data, const DataSet& projected);

struct MaskEventReport {
  std::size_t rows = 0;
  std::size_t failures = 0;
  bool all_hold = false;
  double worst_dev = 0.0;  // max over rows of |S_i / ||y||^2 - 1|
  double eps = 0.0;
  std::vector<std::uint8_t> row_ok;
};

// Row i holds when (1 - eps/3) ||y||^2 <= sum_k (y_k^2 / q) zeta_ik
// <= (1 + eps/3) ||y||^2. mask is row-major rows x p with 0/1 entries.
MaskEventReport mask_event_check(const std::vector<std::uint8_t>& mask, std::size_t rows,
                                 const std::vector<double>& y, double q, double eps);

// Default grid for the row MGF check: [-2, 2] in steps of 0.25, zero
// excluded. Wider lambdas need far more samples than they are worth.
std::vector<double> default_row_check_grid();

// Draws `trials` fresh matrices with the same meta as A (seeds derived from
// seed), pools the d * trials normalized row images Z = sqrt(d) (A y)_i /
// ||y||, and returns min over the grid of exp(lambda^2/2) - mean exp(lambda Z).
// Positive means the Gaussian MGF dominated the empirical one everywhere on
// the grid. A Monte Carlo diagnostic: sample noise enters with both signs.
double subgaussian_row_check(const ProjectionMatrix& A, const std::vector<double>& y,
                             std::size_t trials, std::uint64_t seed,
                             const std::vector<double>& lambda_grid = default_row_check_grid());

struct MatrixStats {
  double trace = 0.0;
  double frob_sq = 0.0;
  double op_norm = 0.0;
};

// trace, squared Frobenius norm, and operator norm of a symmetric matrix
// (row-major n x n; asymmetry beyond 1e-10 is an error). The operator norm
// comes from power iteration with a fixed start vector, tolerance 1e-10,
// capped at 10^4 iterations; ties between eigenvalues are harmless since
// only the largest magnitude is wanted.
MatrixStats matrix_stats(const std::vector<double>& S, std::size_t n);

}  // namespace sjl::verify
