#include "sjl/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "sjl/rng.hpp"

namespace sjl::verify {

std::vector<PairRatio> DistortionReport::violations(double eps) const {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  std::vector<PairRatio> out;
  for (const PairRatio& r : ratios) {
    if (r.ratio < 1.0 - eps || r.ratio > 1.0 + eps) out.push_back(r);
  }
  return out;
}

void DistortionReport::write_ratios_csv(std::ostream& out) const {
  out << "i,j,ratio\n";
  char buf[32];
  for (const PairRatio& r : ratios) {
    std::snprintf(buf, sizeof(buf), "%.17g", r.ratio);
    out << r.i << ',' << r.j << ',' << buf << '\n';
  }
}

namespace {

double squared_norm(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return acc;
}

DistortionReport finalize(std::vector<PairRatio> ratios,
                          std::vector<std::pair<std::size_t, std::size_t>> skipped) {
  if (ratios.empty()) {
    throw std::invalid_argument("all pairs have zero distance; distortion is undefined");
  }
  DistortionReport rep;
  rep.pairs = ratios.size();
  rep.skipped = std::move(skipped);
  rep.min_ratio = ratios.front().ratio;
  rep.max_ratio = ratios.front().ratio;
  rep.argmin = {ratios.front().i, ratios.front().j};
  rep.argmax = {ratios.front().i, ratios.front().j};
  for (const PairRatio& r : ratios) {
    if (r.ratio < rep.min_ratio) {
      rep.min_ratio = r.ratio;
      rep.argmin = {r.i, r.j};
    }
    if (r.ratio > rep.max_ratio) {
      rep.max_ratio = r.ratio;
      rep.argmax = {r.i, r.j};
    }
  }
  rep.admissible_eps = std::max(1.0 - rep.min_ratio, rep.max_ratio - 1.0);
  rep.admissible_eps = std::max(rep.admissible_eps, 0.0);
  rep.ratios = std::move(ratios);
  return rep;
}

}  // namespace

DistortionReport distortion_report(const ProjectionMatrix& A, const DataSet& data) {
  if (data.p() != A.p()) throw std::invalid_argument("point dimension does not match p");
  if (data.n() < 2) throw std::invalid_argument("need at least two points");
  std::vector<PairRatio> ratios;
  std::vector<std::pair<std::size_t, std::size_t>> skipped;
  std::vector<double> diff(data.p());
  for (std::size_t i = 0; i < data.n(); ++i) {
    for (std::size_t j = i + 1; j < data.n(); ++j) {
      const double* a = data.row(i);
      const double* b = data.row(j);
      double orig = 0.0;
      for (std::size_t k = 0; k < data.p(); ++k) {
        diff[k] = a[k] - b[k];
        orig += diff[k] * diff[k];
      }
      if (orig == 0.0) {
        skipped.emplace_back(i, j);
        continue;
      }
      const double img = squared_norm(A.apply(diff));
      ratios.push_back({i, j, img / orig});
    }
  }
  return finalize(std::move(ratios), std::move(skipped));
}

DistortionReport distortion_report_from_points(const DataSet& data, const DataSet& projected) {
  if (data.n() != projected.n()) throw std::invalid_argument("point counts differ");
  if (data.n() < 2) throw std::invalid_argument("need at least two points");
  const std::vector<PairNorms>& orig = data.pair_norms();
  const std::vector<PairNorms>& img = projected.pair_norms();
  std::vector<PairRatio> ratios;
  std::vector<std::pair<std::size_t, std::size_t>> skipped;
  ratios.reserve(orig.size());
  for (std::size_t t = 0; t < orig.size(); ++t) {
    if (orig[t].l2sq == 0.0) {
      skipped.emplace_back(orig[t].i, orig[t].j);
      continue;
    }
    ratios.push_back({orig[t].i, orig[t].j, img[t].l2sq / orig[t].l2sq});
  }
  return finalize(std::move(ratios), std::move(skipped));
}

MaskEventReport mask_event_check(const std::vector<std::uint8_t>& mask, std::size_t rows,
                                 const std::vector<double>& y, double q, double eps) {
  if (rows == 0) throw std::invalid_argument("need at least one mask row");
  if (mask.size() != rows * y.size()) throw std::invalid_argument("mask size is not rows * p");
  if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("q must lie in (0, 1]");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");

  double l2 = 0.0;
  for (double v : y) l2 += v * v;
  if (l2 == 0.0) throw std::invalid_argument("y must be nonzero");

  MaskEventReport rep;
  rep.rows = rows;
  rep.eps = eps;
  rep.row_ok.resize(rows);
  const double lo = (1.0 - eps / 3.0) * l2;
  const double hi = (1.0 + eps / 3.0) * l2;
  const std::size_t p = y.size();
  for (std::size_t i = 0; i < rows; ++i) {
    const std::uint8_t* zeta = mask.data() + i * p;
    double s = 0.0;
    for (std::size_t k = 0; k < p; ++k) {
      if (zeta[k]) s += y[k] * y[k] / q;
    }
    const bool ok = s >= lo && s <= hi;
    rep.row_ok[i] = ok;
    rep.failures += !ok;
    rep.worst_dev = std::max(rep.worst_dev, std::fabs(s / l2 - 1.0));
  }
  rep.all_hold = rep.failures == 0;
  return rep;
}

std::vector<double> default_row_check_grid() {
  std::vector<double> grid;
  for (int i = -8; i <= 8; ++i) {
    if (i != 0) grid.push_back(i * 0.25);
  }
  return grid;
}

double subgaussian_row_check(const ProjectionMatrix& A, const std::vector<double>& y,
                             std::size_t trials, std::uint64_t seed,
                             const std::vector<double>& lambda_grid) {
  if (trials == 0) throw std::invalid_argument("trials must be positive");
  if (lambda_grid.empty()) throw std::invalid_argument("lambda grid must be nonempty");
  const double ynorm = std::sqrt(squared_norm(y));
  if (ynorm == 0.0) throw std::invalid_argument("y must be nonzero");

  const double root_d = std::sqrt(static_cast<double>(A.d()));
  std::vector<double> mgf_sum(lambda_grid.size(), 0.0);
  for (std::size_t t = 0; t < trials; ++t) {
    const std::uint64_t s = rng::derive_seed(seed, 0x5247, t);  // "RG"
    const ProjectionMatrix At =
        ProjectionMatrix::generate(A.meta().spec, A.d(), A.p(), A.meta().q_mask, s);
    const std::vector<double> img = At.apply(y);
    for (double yi : img) {
      const double z = root_d * yi / ynorm;
      for (std::size_t g = 0; g < lambda_grid.size(); ++g) {
        mgf_sum[g] += std::exp(lambda_grid[g] * z);
      }
    }
  }
  const double count = static_cast<double>(trials * A.d());
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < lambda_grid.size(); ++g) {
    const double l = lambda_grid[g];
    margin = std::min(margin, std::exp(0.5 * l * l) - mgf_sum[g] / count);
  }
  return margin;
}

MatrixStats matrix_stats(const std::vector<double>& S, std::size_t n) {
  if (n == 0) throw std::invalid_argument("matrix must be nonempty");
  if (S.size() != n * n) throw std::invalid_argument("matrix size is not n * n");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::fabs(S[i * n + j] - S[j * n + i]) > 1e-10) {
        throw std::invalid_argument("matrix is not symmetric at (" + std::to_string(i) + ", " +
                                    std::to_string(j) + ")");
      }
    }
  }
  MatrixStats st;
  for (std::size_t i = 0; i < n; ++i) st.trace += S[i * n + i];
  for (double v : S) st.frob_sq += v * v;

  // Power iteration on S; |dominant eigenvalue| is the operator norm of a
  // symmetric matrix. Fixed pseudo-random start to dodge unlucky exact
  // orthogonality with the top eigenvector.
  rng::Counter start(0x5eedULL, rng::Stream::power_start);
  std::vector<double> v(n), w(n);
  double vnorm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = 2.0 * start.u01(i) - 1.0;
    vnorm += v[i] * v[i];
  }
  vnorm = std::sqrt(vnorm);
  for (double& x : v) x /= vnorm;

  double est = 0.0;
  for (int iter = 0; iter < 10000; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += S[i * n + j] * v[j];
      w[i] = acc;
    }
    double wnorm = 0.0;
    for (double x : w) wnorm += x * x;
    wnorm = std::sqrt(wnorm);
    if (wnorm == 0.0) {
      est = 0.0;
      break;
    }
    const double prev = est;
    est = wnorm;  // ||S v|| with ||v|| = 1
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / wnorm;
    if (iter > 0 && std::fabs(est - prev) <= 1e-10 * std::max(1.0, est)) break;
  }
  st.op_norm = est;
  return st;
}

}  // namespace sjl::verify
