#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sjl/dataset.hpp"

// Closed-form thresholds: embedding dimensions, sparsity floors, tail and
// MGF bounds for quadratic forms. Everything here is a calculator; no
// randomness, no matrices.

namespace sjl::bounds {

enum class Kind {
  dim_classical,
  dim_sparse_positive,
  dim_sparse_highprob,
  qmin_thm2,
  qmin_thm3,
  chernoff_tail,
  rate_function,
  hw_tail,
};

std::string kind_name(Kind k);

struct BoundResult {
  Kind kind = Kind::dim_classical;
  std::vector<std::pair<std::string, double>> inputs;  // insertion order kept in JSON
  double value = 0.0;
  bool feasible = true;
};

// {"kind", "inputs", "value", "feasible"}; integral dimension values are
// emitted as JSON integers.
nlohmann::ordered_json to_json(const BoundResult& r);

// Smallest d with union-bound success probability over all n^2 pairs at
// least 1/2: d >= 8 ln n / (eps^2 - eps^3). n >= 2, eps in (0, 1).
BoundResult dim_classical(std::size_t n, double eps);

// Failure probability at most delta: d >= 4 ln(n^2 / delta) / (eps^2 - eps^3).
BoundResult dim_classical_delta(std::size_t n, double delta, double eps);

// Dimension floor accompanying the masked-matrix guarantee with positive
// success probability: d >= 36 ln(2 n^2) / (eps^2 - eps^3).
BoundResult dim_sparse_positive(std::size_t n, double eps);

// Chernoff rate of ||Ay||^2 for 1-sub-Gaussian entries at deviation eps,
// I(eps) = (eps - log(1 + eps)) / 2, with its two closed-form lower bounds.
// On (0, 1) the chain value >= pollard_lb >= cubic_lb holds and is verified.
struct RateFunction {
  double eps = 0.0;
  double value = 0.0;
  double pollard_lb = 0.0;  // eps^2 / (4 (1 + eps/3)^2)
  double cubic_lb = 0.0;    // (eps^2 - eps^3) / 4
};
RateFunction rate_function(double eps);

// Two-sided tail 2 exp(-d (eps^2 - eps^3) / 4), d >= 1, eps in (0, 1).
double chernoff_tail(std::size_t d, double eps);

// Mask level that keeps the Bernstein event likely for every pair at the
// given d: max over pairs of
//   (18 ||v||_4^4 + 2 ||v||_inf^2 ||v||_2^2) / (eps^2 ||v||_2^4) * ln(2d),
// v = x_i - x_j. feasible iff the value is at most 1. Throws on a
// zero-distance pair, naming it.
BoundResult qmin_thm2(const DataSet& data, double eps, std::size_t d);

// Mask level under which no single coordinate dominates any difference:
// max over pairs of ||v||_inf^2 / ||v||_2^2. Always at most 1.
BoundResult qmin_thm3(const DataSet& data);

// Smallest d satisfying the self-referential high-probability requirement
//   d >= (12 / eps^2) ln(3n / delta) (1 + sqrt(4 L) + 2 L)^2,  L = ln(n d / delta),
// found by fixed-point iteration from dim_classical and verified minimal.
// Gives up (feasible = false) past 2^40.
BoundResult dim_sparse_highprob(std::size_t n, double delta, double eps);

// (kappa, kappa_prime, s)-fullness of a unit-norm direction: no coordinate
// exceeds kappa_prime / s in squared value and at least s coordinates reach
// kappa / s. kappa = kappa_prime = 1 is the extreme flat case, so the
// constraint is 0 < kappa <= kappa_prime <= 1.
struct FullnessCertificate {
  bool holds = false;
  bool linf_ok = false;
  std::size_t witness_count = 0;
  double q_sufficient = 0.0;  // mask levels q >= (kappa_prime / kappa) / s suffice
  double kappa = 0.0, kappa_prime = 0.0;
  std::size_t s = 0;
};
FullnessCertificate fullness_check(const std::vector<double>& v, double kappa,
                                   double kappa_prime, std::size_t s);

// Deviation bound for a nonnegative quadratic form X^T S X of a standard
// Gaussian vector: with probability 1 - delta,
//   X^T S X <= trace + sqrt(4 frob_sq ln(1/delta)) + 2 op_norm ln(1/delta).
double hw_tail(double trace, double frob_sq, double op_norm, double delta);

// Whether the three statistics can come from one PSD matrix
// (op_norm^2 <= frob_sq and frob_sq <= trace * op_norm, up to rounding).
// hw_tail accepts inconsistent stats; callers may want to surface this.
bool hw_stats_consistent(double trace, double frob_sq, double op_norm);

// MGF bound for the same form: E exp(ell X^T S X) <=
// exp(ell trace + ell^2 frob_sq / (1 - 2 ell op_norm)), 0 <= ell < 1/(2 op_norm).
double hw_mgf_bound(double trace, double frob_sq, double op_norm, double ell);

}  // namespace sjl::bounds
