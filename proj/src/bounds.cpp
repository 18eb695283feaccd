#include "sjl/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sjl::bounds {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

double eps_denom(double eps) {
  require(eps > 0.0 && eps < 1.0, "eps must lie in (0, 1)");
  return eps * eps - eps * eps * eps;
}

bool integral_kind(Kind k) {
  return k == Kind::dim_classical || k == Kind::dim_sparse_positive ||
         k == Kind::dim_sparse_highprob;
}

}  // namespace

std::string kind_name(Kind k) {
  switch (k) {
    case Kind::dim_classical: return "dim_classical";
    case Kind::dim_sparse_positive: return "dim_sparse_positive";
    case Kind::dim_sparse_highprob: return "dim_sparse_highprob";
    case Kind::qmin_thm2: return "qmin_thm2";
    case Kind::qmin_thm3: return "qmin_thm3";
    case Kind::chernoff_tail: return "chernoff_tail";
    case Kind::rate_function: return "rate_function";
    case Kind::hw_tail: return "hw_tail";
  }
  throw std::logic_error("unknown bound kind");
}

nlohmann::ordered_json to_json(const BoundResult& r) {
  nlohmann::ordered_json inputs;
  for (const auto& [k, v] : r.inputs) inputs[k] = v;
  nlohmann::ordered_json j;
  j["kind"] = kind_name(r.kind);
  j["inputs"] = inputs;
  if (integral_kind(r.kind) && r.value == std::floor(r.value) &&
      r.value <= 9.007199254740992e15) {
    j["value"] = static_cast<std::int64_t>(r.value);
  } else {
    j["value"] = r.value;
  }
  j["feasible"] = r.feasible;
  return j;
}

BoundResult dim_classical(std::size_t n, double eps) {
  require(n >= 2, "n must be at least 2");
  const double denom = eps_denom(eps);
  BoundResult r;
  r.kind = Kind::dim_classical;
  r.inputs = {{"n", static_cast<double>(n)}, {"eps", eps}};
  r.value = std::ceil(8.0 * std::log(static_cast<double>(n)) / denom);
  return r;
}

BoundResult dim_classical_delta(std::size_t n, double delta, double eps) {
  require(n >= 2, "n must be at least 2");
  // delta = 1 is allowed: the bound degenerates to dim_classical exactly.
  require(delta > 0.0 && delta <= 1.0, "delta must lie in (0, 1]");
  const double denom = eps_denom(eps);
  BoundResult r;
  r.kind = Kind::dim_classical;
  r.inputs = {{"n", static_cast<double>(n)}, {"delta", delta}, {"eps", eps}};
  r.value = std::ceil(4.0 * (2.0 * std::log(static_cast<double>(n)) - std::log(delta)) / denom);
  return r;
}

BoundResult dim_sparse_positive(std::size_t n, double eps) {
  require(n >= 2, "n must be at least 2");
  const double denom = eps_denom(eps);
  BoundResult r;
  r.kind = Kind::dim_sparse_positive;
  r.inputs = {{"n", static_cast<double>(n)}, {"eps", eps}};
  r.value = std::ceil(36.0 * (std::log(2.0) + 2.0 * std::log(static_cast<double>(n))) / denom);
  return r;
}

RateFunction rate_function(double eps) {
  require(eps > 0.0, "eps must be positive");
  RateFunction r;
  r.eps = eps;
  r.value = 0.5 * (eps - std::log1p(eps));
  const double c = 1.0 + eps / 3.0;
  r.pollard_lb = eps * eps / (4.0 * c * c);
  r.cubic_lb = (eps * eps - eps * eps * eps) / 4.0;
  if (eps < 1.0 && !(r.value >= r.pollard_lb && r.pollard_lb >= r.cubic_lb)) {
    throw std::logic_error("rate function ordering violated; check the arithmetic");
  }
  return r;
}

double chernoff_tail(std::size_t d, double eps) {
  require(d >= 1, "d must be at least 1");
  const double denom = eps_denom(eps);
  return 2.0 * std::exp(-static_cast<double>(d) * denom / 4.0);
}

BoundResult qmin_thm2(const DataSet& data, double eps, std::size_t d) {
  require(eps > 0.0 && eps < 1.0, "eps must lie in (0, 1)");
  require(d >= 1, "d must be at least 1");
  require(data.n() >= 2, "need at least two points");
  const double logterm = std::log(2.0 * static_cast<double>(d));
  double worst = 0.0;
  for (const PairNorms& pn : data.pair_norms()) {
    if (pn.l2sq == 0.0) {
      throw std::invalid_argument("points " + std::to_string(pn.i) + " and " +
                                  std::to_string(pn.j) + " coincide; no scale to preserve");
    }
    const double num = 18.0 * pn.l4p4 + 2.0 * pn.linfsq * pn.l2sq;
    worst = std::max(worst, num / (eps * eps * pn.l2sq * pn.l2sq));
  }
  BoundResult r;
  r.kind = Kind::qmin_thm2;
  r.inputs = {{"n", static_cast<double>(data.n())},
              {"p", static_cast<double>(data.p())},
              {"d", static_cast<double>(d)},
              {"eps", eps}};
  r.value = worst * logterm;
  r.feasible = r.value <= 1.0;
  return r;
}

BoundResult qmin_thm3(const DataSet& data) {
  require(data.n() >= 2, "need at least two points");
  double worst = 0.0;
  for (const PairNorms& pn : data.pair_norms()) {
    if (pn.l2sq == 0.0) {
      throw std::invalid_argument("points " + std::to_string(pn.i) + " and " +
                                  std::to_string(pn.j) + " coincide; no scale to preserve");
    }
    worst = std::max(worst, pn.linfsq / pn.l2sq);
  }
  BoundResult r;
  r.kind = Kind::qmin_thm3;
  r.inputs = {{"n", static_cast<double>(data.n())}, {"p", static_cast<double>(data.p())}};
  r.value = worst;
  r.feasible = true;
  return r;
}

namespace {

double highprob_rhs(std::size_t n, double delta, double eps, double d) {
  const double L = std::log(static_cast<double>(n) * d / delta);
  const double poly = 1.0 + std::sqrt(4.0 * L) + 2.0 * L;
  return 12.0 / (eps * eps) * std::log(3.0 * static_cast<double>(n) / delta) * poly * poly;
}

}  // namespace

BoundResult dim_sparse_highprob(std::size_t n, double delta, double eps) {
  require(n >= 2, "n must be at least 2");
  require(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
  require(eps > 0.0 && eps < 1.0, "eps must lie in (0, 1)");

  const double cap = 1099511627776.0;  // 2^40
  double d = dim_classical(n, eps).value;
  bool converged = false;
  std::size_t iterations = 0;
  for (; iterations < 200; ++iterations) {
    const double next = std::ceil(highprob_rhs(n, delta, eps, d));
    if (next > cap) break;
    if (next == d) {
      converged = true;
      break;
    }
    d = next;
  }
  BoundResult r;
  r.kind = Kind::dim_sparse_highprob;
  r.inputs = {{"n", static_cast<double>(n)}, {"delta", delta}, {"eps", eps}};
  if (!converged) {
    r.value = cap;
    r.feasible = false;
    return r;
  }
  // The iteration lands on a fixed point; walk down to the least d with
  // d >= rhs(d) in case several integers qualify below it.
  while (d > 1.0 && d - 1.0 >= highprob_rhs(n, delta, eps, d - 1.0)) d -= 1.0;
  r.inputs.emplace_back("iterations", static_cast<double>(iterations));
  r.value = d;
  return r;
}

FullnessCertificate fullness_check(const std::vector<double>& v, double kappa,
                                   double kappa_prime, std::size_t s) {
  require(kappa > 0.0 && kappa <= kappa_prime && kappa_prime <= 1.0,
          "need 0 < kappa <= kappa_prime <= 1");
  require(s >= 1 && s <= v.size(), "s must lie in [1, p]");
  FullnessCertificate cert;
  cert.kappa = kappa;
  cert.kappa_prime = kappa_prime;
  cert.s = s;
  cert.q_sufficient = (kappa_prime / kappa) / static_cast<double>(s);
  const double hi = kappa_prime / static_cast<double>(s);
  const double lo = kappa / static_cast<double>(s);
  cert.linf_ok = true;
  for (double x : v) {
    const double x2 = x * x;
    if (x2 > hi) cert.linf_ok = false;
    if (x2 >= lo) ++cert.witness_count;
  }
  cert.holds = cert.linf_ok && cert.witness_count >= s;
  return cert;
}

double hw_tail(double trace, double frob_sq, double op_norm, double delta) {
  require(trace >= 0.0 && frob_sq >= 0.0 && op_norm >= 0.0, "matrix statistics must be nonnegative");
  require(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
  const double log_term = std::log(1.0 / delta);
  return trace + std::sqrt(4.0 * frob_sq * log_term) + 2.0 * op_norm * log_term;
}

bool hw_stats_consistent(double trace, double frob_sq, double op_norm) {
  const double tol = 1e-9 * std::max(1.0, std::max(trace, frob_sq));
  return op_norm * op_norm <= frob_sq + tol && frob_sq <= trace * op_norm + tol;
}

double hw_mgf_bound(double trace, double frob_sq, double op_norm, double ell) {
  require(trace >= 0.0 && frob_sq >= 0.0 && op_norm >= 0.0, "matrix statistics must be nonnegative");
  require(ell >= 0.0, "ell must be nonnegative");
  require(2.0 * ell * op_norm < 1.0, "ell must stay below 1 / (2 op_norm)");
  return std::exp(ell * trace + ell * ell * frob_sq / (1.0 - 2.0 * ell * op_norm));
}

}  // namespace sjl::bounds
