#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "sjl/dataset.hpp"
#include "sjl/projection.hpp"

// Desk-scale reproductions: distortion sweeps over mask level or data
// sparsity, and the moment identities behind the optimality probe.

namespace sjl::experiments {

enum class DataKind { dense_gaussian, sparse_gaussian, sparse_sign };

std::string data_kind_name(DataKind k);
DataKind data_kind_from_name(const std::string& name);

struct DataSpec {
  DataKind kind = DataKind::dense_gaussian;
  std::size_t s = 0;        // nonzeros per point (sparse_gaussian)
  double s_over_p = 0.0;    // expected nonzero fraction (sparse_sign)
};

// n points in R^p. dense_gaussian: iid standard normals. sparse_gaussian:
// exactly s uniformly placed nonzero coordinates per point, values standard
// normal. sparse_sign: each coordinate independently +-1 with probability
// s_over_p / 2 each, else 0. Coordinate (i, k) depends only on (seed, i, k).
DataSet gen_data(const DataSpec& spec, std::size_t n, std::size_t p, std::uint64_t seed);

struct SweepConfig {
  enum class Mode { sweep_q, sweep_s };
  Mode mode = Mode::sweep_q;
  DataSpec data;
  std::size_t n = 50, p = 2000, d = 200;  // desk-scale defaults
  std::vector<double> grid;               // mask levels q, or sparsities s
  std::size_t trials = 5;
  std::uint64_t seed = 1;
  double q = 0.0;  // fixed mask level, sweep_s only
  unsigned threads = 1;
};

struct TrialStat {
  double min_ratio = 0.0, max_ratio = 0.0, admissible_eps = 0.0;
};

struct GridPointResult {
  double grid_value = 0.0;
  std::vector<TrialStat> trials;
  double mean_min_ratio = 0.0, mean_max_ratio = 0.0;
  double mean_adm_eps = 0.0;
  double env_lo = 0.0, env_hi = 0.0;  // min and max admissible eps over trials
  double p05 = 0.0, p95 = 0.0;        // nearest-rank percentiles of admissible eps
};

struct SweepResult {
  SweepConfig config;
  std::vector<GridPointResult> points;
};

// One dataset, Rademacher values under mask level q for each grid point,
// `trials` matrices per point with derived seeds. q = 1 is the dense
// Rademacher projection.
SweepResult sweep_q(const SweepConfig& config);

// Data sparsity s varies along the grid (per-point nonzero count; for
// sparse_sign data the nonzero fraction is s / p), mask level fixed at
// config.q. s = p reproduces the dense data case of sweep_q at that q.
SweepResult sweep_s(const SweepConfig& config);

// grid_value,trial,min_ratio,max_ratio,admissible_eps
void write_raw_csv(const SweepResult& result, std::ostream& out);
// grid_value,mean_adm_eps,p05,p95
void write_agg_csv(const SweepResult& result, std::ostream& out);

// E[(||Ay||^2 - 1)^2] = 1/(dqs) + 2/d - 3/(ds) for the masked sign matrix on
// a flat unit vector with s nonzero coordinates.
double exact_centered_second_moment(std::size_t d, double q, std::size_t s);

// E||Ay||^4 = d (l4p4 / (d^2 q) + 3 (1 - l4p4) / d^2) + d (d - 1) / d^2 for a
// unit vector y with ||y||_4^4 = l4p4 in (0, 1].
double exact_fourth_moment_general(std::size_t d, double q, double l4p4);

// Monte Carlo companion to exact_centered_second_moment; samples per-row
// active-cell counts directly instead of materializing matrices, reproducing
// the float semantics of generate + apply on flat vectors. The per-trial
// values are reduced in trial order, so the thread count cannot change the
// result. se_out, if given, receives the standard error of the estimate.
double mc_centered_second_moment(std::size_t d, double q, std::size_t s, std::size_t trials,
                                 std::uint64_t seed, unsigned threads = 1,
                                 double* se_out = nullptr);

struct ProbeResult {
  std::size_t d = 0, s = 0;
  double q = 0.0, eps = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::string regime;  // "TinyDQS" when d*q*s <= 1/2048, else "MainRegime"
  double success_hat = 0.0;  // fraction of trials with ||Ay||^2 in [1-eps, 1+eps]
  double success_se = 0.0;
  double zero_hat = 0.0;            // fraction with ||Ay||^2 == 0
  double zero_lower_bound = 0.0;    // exp(-d s q / (1 - q)), vacuous at q = 1
  double exact_m2 = 0.0;            // closed form
  double mc_m2 = 0.0;               // estimate over these trials
};

// Simulates the flat s-sparse direction under the masked sign projection,
// one generated matrix per trial.
ProbeResult optimality_probe(std::size_t d, double q, std::size_t s, double eps,
                             std::size_t trials, std::uint64_t seed);

nlohmann::ordered_json to_json(const ProbeResult& r);
nlohmann::ordered_json config_to_json(const SweepConfig& config);
SweepConfig config_from_json(const nlohmann::json& j);

}  // namespace sjl::experiments
