#include "sjl/distribution.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sjl {

std::string family_name(Family f) {
  switch (f) {
    case Family::gaussian: return "gaussian";
    case Family::rademacher: return "rademacher";
    case Family::uniform_sqrt3: return "uniform_sqrt3";
    case Family::three_point: return "three_point";
  }
  throw std::logic_error("unknown family");
}

Family family_from_name(const std::string& name) {
  if (name == "gaussian") return Family::gaussian;
  if (name == "rademacher") return Family::rademacher;
  if (name == "uniform_sqrt3") return Family::uniform_sqrt3;
  if (name == "three_point") return Family::three_point;
  throw std::invalid_argument("unknown distribution family: " + name);
}

DistributionSpec make_distribution(Family family, std::optional<double> q) {
  DistributionSpec spec;
  spec.family = family;
  if (family == Family::three_point) {
    if (!q) throw std::invalid_argument("three_point requires q");
    if (!(*q > 0.0 && *q <= 1.0)) throw std::invalid_argument("three_point q must lie in (0, 1]");
    spec.q = *q;
  } else if (q && *q != 1.0) {
    throw std::invalid_argument("q is only meaningful for three_point");
  }
  return spec;
}

double DistributionSpec::m4() const {
  switch (family) {
    case Family::gaussian: return 3.0;
    case Family::rademacher: return 1.0;
    case Family::uniform_sqrt3: return 9.0 / 5.0;
    case Family::three_point: return 1.0 / q;
  }
  throw std::logic_error("unknown family");
}

namespace {

// sinh(x)/x with a series fallback near zero.
double sinhc(double x) {
  if (std::fabs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 + x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sinh(x) / x;
}

}  // namespace

double DistributionSpec::mgf(double lambda) const {
  switch (family) {
    case Family::gaussian: return std::exp(0.5 * lambda * lambda);
    case Family::rademacher: return std::cosh(lambda);
    case Family::uniform_sqrt3: return sinhc(std::sqrt(3.0) * lambda);
    case Family::three_point: return 1.0 - q + q * std::cosh(lambda / std::sqrt(q));
  }
  throw std::logic_error("unknown family");
}

std::vector<double> DistributionSpec::support() const {
  switch (family) {
    case Family::rademacher: return {-1.0, 1.0};
    case Family::three_point: {
      const double r = 1.0 / std::sqrt(q);
      return {-r, 0.0, r};
    }
    default: throw std::logic_error("support() requires a discrete family");
  }
}

std::vector<double> DistributionSpec::probabilities() const {
  switch (family) {
    case Family::rademacher: return {0.5, 0.5};
    case Family::three_point: return {q / 2.0, 1.0 - q, q / 2.0};
    default: throw std::logic_error("probabilities() requires a discrete family");
  }
}

double DistributionSpec::sample(const rng::Counter& gen, std::uint64_t index) const {
  switch (family) {
    case Family::gaussian: return gen.normal(index);
    case Family::rademacher: return (gen.bits(index) & 1) ? 1.0 : -1.0;
    case Family::uniform_sqrt3: return std::sqrt(3.0) * (2.0 * gen.u01(index) - 1.0);
    case Family::three_point: {
      const double u = gen.u01(index);
      if (u >= q) return 0.0;
      const double r = 1.0 / std::sqrt(q);
      return u < q / 2.0 ? -r : r;
    }
  }
  throw std::logic_error("unknown family");
}

namespace {

using boost::multiprecision::cpp_int;

// Exact rational q = num / den recovered from the double. The double nearest
// 1/3 is mapped to the rational 1/3: the boundary law is 1-sub-Gaussian, and
// callers writing make_distribution(three_point, 1.0 / 3.0) mean exactly that
// boundary, not the slightly smaller binary neighbour.
void exact_ratio(double q, cpp_int& num, cpp_int& den) {
  if (q == 1.0 / 3.0) {
    num = 1;
    den = 3;
    return;
  }
  int e = 0;
  const double m = std::frexp(q, &e);  // q = m * 2^e, m in [0.5, 1)
  num = static_cast<std::int64_t>(std::ldexp(m, 53));
  den = cpp_int(1) << (53 - e);
}

}  // namespace

bool is_one_subgaussian(const DistributionSpec& spec) {
  // The Gaussian dominates itself; Rademacher and the centered uniform with
  // unit variance satisfy E X^(2k) <= (2k)! / (2^k k!) termwise.
  if (spec.family != Family::three_point) return true;

  cpp_int num, den;
  exact_ratio(spec.q, num, den);

  // Condition at order k: q^(k-1) * (2k)! >= 2^k * k! * den^(k-1), cleared of
  // denominators. k = 2 (q >= 1/3) is the binding order; larger k are checked
  // anyway up to 64, well past where the factorial ratio takes over.
  cpp_int num_pow = 1, den_pow = 1, fact_k = 1, fact_2k = 1, two_k = 1;
  for (int k = 1; k <= 64; ++k) {
    fact_k *= k;
    fact_2k *= 2 * k - 1;
    fact_2k *= 2 * k;
    two_k *= 2;
    if (k > 1) {
      num_pow *= num;
      den_pow *= den;
    }
    if (num_pow * fact_2k < two_k * fact_k * den_pow) return false;
  }
  return true;
}

std::vector<double> sample_entries(const DistributionSpec& spec, std::size_t count,
                                   std::uint64_t seed) {
  rng::Counter gen(seed, rng::Stream::entry_sample);
  std::vector<double> out(count);
  for (std::size_t j = 0; j < count; ++j) out[j] = spec.sample(gen, j);
  return out;
}

std::vector<double> default_lambda_grid() {
  std::vector<double> grid;
  grid.reserve(2001);
  for (int i = -1000; i <= 1000; ++i) grid.push_back(i * 0.01);
  return grid;
}

MomentSummary moment_summary(const DistributionSpec& spec, const std::vector<double>& lambda_grid) {
  if (lambda_grid.empty()) throw std::invalid_argument("lambda grid must be nonempty");
  MomentSummary s;
  s.m2 = 1.0;
  s.m4 = spec.m4();
  double margin = std::numeric_limits<double>::infinity();
  for (double l : lambda_grid) {
    margin = std::min(margin, std::exp(0.5 * l * l) - spec.mgf(l));
  }
  s.mgf_margin = margin;
  return s;
}

void to_json(nlohmann::ordered_json& j, const DistributionSpec& spec) {
  j = nlohmann::ordered_json{
      {"family", family_name(spec.family)}, {"q", spec.q}, {"variance", spec.variance}};
}

void from_json(const nlohmann::json& j, DistributionSpec& spec) {
  const Family family = family_from_name(j.at("family").get<std::string>());
  spec = make_distribution(family, j.at("q").get<double>());
  if (j.contains("variance")) {
    const double v = j.at("variance").get<double>();
    if (v != 1.0) throw std::invalid_argument("only unit-variance laws are supported");
  }
}

}  // namespace sjl
