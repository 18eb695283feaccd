#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sjl/rng.hpp"

// Entry laws for projection matrices. Every law here has mean zero and unit
// variance, so a d x p matrix of iid entries scaled by 1/sqrt(d) is an
// unbiased estimator of squared norms.

namespace sjl {

enum class Family { gaussian, rademacher, uniform_sqrt3, three_point };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

// three_point(q): mass q/2 at +-1/sqrt(q), mass 1-q at 0. q = 1 is the
// Rademacher law; q below 1/3 loses 1-sub-Gaussianity (see
// is_one_subgaussian).
struct DistributionSpec {
  Family family = Family::gaussian;
  double q = 1.0;         // three_point atom mass; fixed at 1 for the others
  double variance = 1.0;  // unit by construction, kept explicit for the wire format

  bool discrete() const { return family == Family::rademacher || family == Family::three_point; }

  // Mass off zero: q for three_point, 1 otherwise.
  double p_nonzero() const { return family == Family::three_point ? q : 1.0; }

  double m4() const;
  double mgf(double lambda) const;

  // Discrete families only; throws std::logic_error for continuous ones.
  std::vector<double> support() const;
  std::vector<double> probabilities() const;

  // One variate as a pure function of (generator, index).
  double sample(const rng::Counter& gen, std::uint64_t index) const;

  bool operator==(const DistributionSpec&) const = default;
};

// Throws std::invalid_argument if q is supplied for a family that does not
// take it, is missing for three_point, or lies outside (0, 1].
DistributionSpec make_distribution(Family family, std::optional<double> q = std::nullopt);

// Whether E exp(lambda X) <= exp(lambda^2 / 2) for all real lambda. For
// three_point this reduces to q^(k-1) >= 2^k k! / (2k)! for every k >= 1,
// decided here in exact rational arithmetic for k up to 64 (the condition is
// monotone enough that k = 2, i.e. q >= 1/3, is the binding case). A q equal
// to the double nearest 1/3 is treated as the exact boundary value, so the
// boundary itself passes.
bool is_one_subgaussian(const DistributionSpec& spec);

// count iid draws; draw j depends only on (seed, j).
std::vector<double> sample_entries(const DistributionSpec& spec, std::size_t count,
                                   std::uint64_t seed);

struct MomentSummary {
  double m2 = 1.0;
  double m4 = 0.0;
  // min over the grid of exp(lambda^2/2) - E exp(lambda X); negative means
  // the Gaussian MGF fails to dominate somewhere on the grid.
  double mgf_margin = 0.0;
};

// Symmetric grid on [-10, 10], step 0.01.
std::vector<double> default_lambda_grid();

MomentSummary moment_summary(const DistributionSpec& spec,
                             const std::vector<double>& lambda_grid = default_lambda_grid());

// Wire format: {"family": ..., "q": ..., "variance": ...}.
void to_json(nlohmann::ordered_json& j, const DistributionSpec& spec);
void from_json(const nlohmann::json& j, DistributionSpec& spec);

}  // namespace sjl
