#include "sjl/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "sjl/parallel.hpp"
#include "sjl/rng.hpp"
#include "sjl/verify.hpp"

namespace sjl::experiments {

namespace {

constexpr std::uint64_t kDataTag = 0xDA7A;
constexpr std::uint64_t kMatrixTagBase = 0x4D58'0000;  // one tag per grid point
constexpr std::uint64_t kProbeTag = 0x5042;

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

std::string data_kind_name(DataKind k) {
  switch (k) {
    case DataKind::dense_gaussian: return "dense_gaussian";
    case DataKind::sparse_gaussian: return "sparse_gaussian";
    case DataKind::sparse_sign: return "sparse_sign";
  }
  throw std::logic_error("unknown data kind");
}

DataKind data_kind_from_name(const std::string& name) {
  if (name == "dense_gaussian") return DataKind::dense_gaussian;
  if (name == "sparse_gaussian") return DataKind::sparse_gaussian;
  if (name == "sparse_sign") return DataKind::sparse_sign;
  throw std::invalid_argument("unknown data kind: " + name);
}

DataSet gen_data(const DataSpec& spec, std::size_t n, std::size_t p, std::uint64_t seed) {
  require(n >= 1 && p >= 1, "n and p must be positive");
  rng::Counter values(seed, rng::Stream::data_value);
  rng::Counter support(seed, rng::Stream::data_support);
  std::vector<double> x(n * p, 0.0);

  switch (spec.kind) {
    case DataKind::dense_gaussian: {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < p; ++k) x[i * p + k] = values.normal(i * p + k);
      }
      break;
    }
    case DataKind::sparse_gaussian: {
      require(spec.s >= 1 && spec.s <= p, "sparse_gaussian needs s in [1, p]");
      // Floyd's sampling: s distinct positions per point, uniform over
      // subsets; draw t depends only on (seed, point, iteration).
      std::vector<std::uint8_t> chosen(p);
      for (std::size_t i = 0; i < n; ++i) {
        std::fill(chosen.begin(), chosen.end(), 0);
        for (std::size_t j = p - spec.s; j < p; ++j) {
          const std::uint64_t t = support.bits(i, j) % (j + 1);
          const std::size_t pick = chosen[t] ? j : static_cast<std::size_t>(t);
          chosen[pick] = 1;
        }
        for (std::size_t k = 0; k < p; ++k) {
          if (chosen[k]) x[i * p + k] = values.normal(i * p + k);
        }
      }
      break;
    }
    case DataKind::sparse_sign: {
      require(spec.s_over_p > 0.0 && spec.s_over_p <= 1.0, "sparse_sign needs s_over_p in (0, 1]");
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < p; ++k) {
          const std::uint64_t idx = i * p + k;
          if (support.u01(idx) < spec.s_over_p) {
            x[idx] = (values.bits(idx) & 1) ? 1.0 : -1.0;
          }
        }
      }
      break;
    }
  }
  return DataSet(n, p, std::move(x));
}

namespace {

void validate_common(const SweepConfig& c) {
  require(c.n >= 2, "n must be at least 2");
  require(c.p >= 1 && c.d >= 1, "p and d must be positive");
  require(c.trials >= 1, "trials must be positive");
  require(!c.grid.empty(), "grid must be nonempty");
}

GridPointResult aggregate(double grid_value, std::vector<TrialStat> trials) {
  GridPointResult g;
  g.grid_value = grid_value;
  std::vector<double> adm;
  adm.reserve(trials.size());
  for (const TrialStat& t : trials) {
    g.mean_min_ratio += t.min_ratio;
    g.mean_max_ratio += t.max_ratio;
    g.mean_adm_eps += t.admissible_eps;
    adm.push_back(t.admissible_eps);
  }
  const double T = static_cast<double>(trials.size());
  g.mean_min_ratio /= T;
  g.mean_max_ratio /= T;
  g.mean_adm_eps /= T;
  std::sort(adm.begin(), adm.end());
  g.env_lo = adm.front();
  g.env_hi = adm.back();
  // Nearest-rank percentiles; with few trials these coincide with the
  // envelope ends.
  const auto rank = [&](double level) {
    const std::size_t r = static_cast<std::size_t>(std::ceil(level * T));
    return adm[std::max<std::size_t>(r, 1) - 1];
  };
  g.p05 = rank(0.05);
  g.p95 = rank(0.95);
  g.trials = std::move(trials);
  return g;
}

TrialStat one_trial(const DataSet& data, const DistributionSpec& law, std::size_t d,
                    double q_mask, std::uint64_t mseed, unsigned threads) {
  const ProjectionMatrix A =
      ProjectionMatrix::generate(law, d, data.p(), q_mask, mseed, threads);
  const DataSet projected = A.apply_dataset(data, threads);
  const verify::DistortionReport rep = verify::distortion_report_from_points(data, projected);
  return {rep.min_ratio, rep.max_ratio, rep.admissible_eps};
}

}  // namespace

SweepResult sweep_q(const SweepConfig& config) {
  validate_common(config);
  for (double q : config.grid) require(q > 0.0 && q <= 1.0, "mask levels must lie in (0, 1]");
  if (config.data.kind == DataKind::sparse_gaussian) {
    require(config.data.s >= 1 && config.data.s <= config.p, "sparse_gaussian needs s in [1, p]");
  }
  if (config.data.kind == DataKind::sparse_sign) {
    require(config.data.s_over_p > 0.0 && config.data.s_over_p <= 1.0,
            "sparse_sign needs s_over_p in (0, 1]");
  }

  const DistributionSpec law = make_distribution(Family::rademacher);
  const DataSet data =
      gen_data(config.data, config.n, config.p, rng::derive_seed(config.seed, kDataTag, 0));
  SweepResult result;
  result.config = config;
  for (std::size_t gi = 0; gi < config.grid.size(); ++gi) {
    std::vector<TrialStat> stats(config.trials);
    for (std::size_t t = 0; t < config.trials; ++t) {
      const std::uint64_t mseed = rng::derive_seed(config.seed, kMatrixTagBase + gi, t);
      stats[t] = one_trial(data, law, config.d, config.grid[gi], mseed, config.threads);
    }
    result.points.push_back(aggregate(config.grid[gi], std::move(stats)));
  }
  return result;
}

SweepResult sweep_s(const SweepConfig& config) {
  validate_common(config);
  require(config.q > 0.0 && config.q <= 1.0, "fixed mask level q must lie in (0, 1]");
  require(config.data.kind != DataKind::dense_gaussian,
          "sweep_s needs a sparse data kind; dense data has no s to sweep");
  for (double s : config.grid) {
    require(s >= 1.0 && s <= static_cast<double>(config.p) && std::floor(s) == s,
            "sparsity grid values must be integers in [1, p]");
  }

  const DistributionSpec law = make_distribution(Family::rademacher);
  SweepResult result;
  result.config = config;
  for (std::size_t gi = 0; gi < config.grid.size(); ++gi) {
    DataSpec point_spec = config.data;
    if (point_spec.kind == DataKind::sparse_gaussian) {
      point_spec.s = static_cast<std::size_t>(config.grid[gi]);
    } else {
      point_spec.s_over_p = config.grid[gi] / static_cast<double>(config.p);
    }
    const DataSet data =
        gen_data(point_spec, config.n, config.p, rng::derive_seed(config.seed, kDataTag, gi));
    std::vector<TrialStat> stats(config.trials);
    for (std::size_t t = 0; t < config.trials; ++t) {
      const std::uint64_t mseed = rng::derive_seed(config.seed, kMatrixTagBase + gi, t);
      stats[t] = one_trial(data, law, config.d, config.q, mseed, config.threads);
    }
    result.points.push_back(aggregate(config.grid[gi], std::move(stats)));
  }
  return result;
}

namespace {

void print_row(std::ostream& out, double v, bool lead_comma) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  if (lead_comma) out << ',';
  out << buf;
}

}  // namespace

void write_raw_csv(const SweepResult& result, std::ostream& out) {
  out << "grid_value,trial,min_ratio,max_ratio,admissible_eps\n";
  for (const GridPointResult& g : result.points) {
    for (std::size_t t = 0; t < g.trials.size(); ++t) {
      print_row(out, g.grid_value, false);
      out << ',' << t;
      print_row(out, g.trials[t].min_ratio, true);
      print_row(out, g.trials[t].max_ratio, true);
      print_row(out, g.trials[t].admissible_eps, true);
      out << '\n';
    }
  }
}

void write_agg_csv(const SweepResult& result, std::ostream& out) {
  out << "grid_value,mean_adm_eps,p05,p95\n";
  for (const GridPointResult& g : result.points) {
    print_row(out, g.grid_value, false);
    print_row(out, g.mean_adm_eps, true);
    print_row(out, g.p05, true);
    print_row(out, g.p95, true);
    out << '\n';
  }
}

double exact_centered_second_moment(std::size_t d, double q, std::size_t s) {
  require(d >= 1 && s >= 1, "d and s must be positive");
  require(q > 0.0 && q <= 1.0, "q must lie in (0, 1]");
  const double dd = static_cast<double>(d);
  const double ds = static_cast<double>(s);
  return 1.0 / (dd * q * ds) + 2.0 / dd - 3.0 / (dd * ds);
}

double exact_fourth_moment_general(std::size_t d, double q, double l4p4) {
  require(d >= 1, "d must be positive");
  require(q > 0.0 && q <= 1.0, "q must lie in (0, 1]");
  require(l4p4 > 0.0 && l4p4 <= 1.0, "l4p4 must lie in (0, 1] for a unit vector");
  const double dd = static_cast<double>(d);
  return dd * (l4p4 / (dd * dd * q) + 3.0 * (1.0 - l4p4) / (dd * dd)) + dd * (dd - 1.0) / (dd * dd);
}

double mc_centered_second_moment(std::size_t d, double q, std::size_t s, std::size_t trials,
                                 std::uint64_t seed, unsigned threads, double* se_out) {
  require(d >= 1 && s >= 1, "d and s must be positive");
  require(q > 0.0 && q <= 1.0, "q must lie in (0, 1]");
  require(trials >= 2, "need at least two trials");

  const rng::Counter gen(seed, rng::Stream::mc);
  const double y0 = 1.0 / std::sqrt(static_cast<double>(s));
  const double scale = q == 1.0 ? 1.0 / std::sqrt(static_cast<double>(d))
                                : 1.0 / std::sqrt(static_cast<double>(d) * q);
  const double odds = q == 1.0 ? 0.0 : q / (1.0 - q);

  std::vector<double> sq_dev(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    double norm2 = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const std::uint64_t idx = t * d + i;
      // Number of surviving cells in this row, by pmf inversion of
      // Binomial(s, q); then the signed sum of their values.
      std::size_t k = s;
      if (q < 1.0) {
        const double u = gen.u01(idx, 0);
        double pmf = std::pow(1.0 - q, static_cast<double>(s));
        double cum = pmf;
        k = 0;
        while (u >= cum && k < s) {
          pmf *= static_cast<double>(s - k) / static_cast<double>(k + 1) * odds;
          cum += pmf;
          ++k;
        }
      }
      double acc = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        acc += (gen.bits(idx, 1 + j) & 1) ? y0 : -y0;
      }
      const double row = scale * acc;
      norm2 += row * row;
    }
    const double dev = norm2 - 1.0;
    sq_dev[t] = dev * dev;
  });

  // Reduce in trial order regardless of how the work was scheduled.
  double mean = 0.0;
  for (double v : sq_dev) mean += v;
  mean /= static_cast<double>(trials);
  if (se_out) {
    double var = 0.0;
    for (double v : sq_dev) var += (v - mean) * (v - mean);
    var /= static_cast<double>(trials - 1);
    *se_out = std::sqrt(var / static_cast<double>(trials));
  }
  return mean;
}

ProbeResult optimality_probe(std::size_t d, double q, std::size_t s, double eps,
                             std::size_t trials, std::uint64_t seed) {
  require(d >= 1 && s >= 1, "d and s must be positive");
  require(q > 0.0 && q <= 1.0, "q must lie in (0, 1]");
  require(eps > 0.0 && eps < 1.0, "eps must lie in (0, 1)");
  require(trials >= 1, "trials must be positive");

  ProbeResult r;
  r.d = d;
  r.s = s;
  r.q = q;
  r.eps = eps;
  r.trials = trials;
  r.seed = seed;
  r.regime = static_cast<double>(d) * q * static_cast<double>(s) <= 1.0 / 2048.0 ? "TinyDQS"
                                                                                 : "MainRegime";
  r.zero_lower_bound =
      q == 1.0 ? 0.0
               : std::exp(-static_cast<double>(d) * static_cast<double>(s) * q / (1.0 - q));
  r.exact_m2 = exact_centered_second_moment(d, q, s);

  const DistributionSpec law = make_distribution(Family::rademacher);
  const std::vector<double> y(s, 1.0 / std::sqrt(static_cast<double>(s)));
  const double lo = 1.0 - eps;
  const double hi = 1.0 + eps;
  std::size_t successes = 0, zeros = 0;
  double m2_sum = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const ProjectionMatrix A =
        ProjectionMatrix::generate(law, d, s, q, rng::derive_seed(seed, kProbeTag, t));
    const std::vector<double> img = A.apply(y);
    double norm2 = 0.0;
    for (double v : img) norm2 += v * v;
    successes += norm2 >= lo && norm2 <= hi;
    zeros += norm2 == 0.0;
    m2_sum += (norm2 - 1.0) * (norm2 - 1.0);
  }
  const double T = static_cast<double>(trials);
  r.success_hat = static_cast<double>(successes) / T;
  r.success_se = std::sqrt(r.success_hat * (1.0 - r.success_hat) / T);
  r.zero_hat = static_cast<double>(zeros) / T;
  r.mc_m2 = m2_sum / T;
  return r;
}

nlohmann::ordered_json to_json(const ProbeResult& r) {
  return nlohmann::ordered_json{
      {"d", r.d},
      {"s", r.s},
      {"q", r.q},
      {"eps", r.eps},
      {"trials", r.trials},
      {"seed", r.seed},
      {"regime", r.regime},
      {"success_hat", r.success_hat},
      {"success_se", r.success_se},
      {"zero_hat", r.zero_hat},
      {"zero_lower_bound", r.zero_lower_bound},
      {"exact_m2", r.exact_m2},
      {"mc_m2", r.mc_m2},
  };
}

nlohmann::ordered_json config_to_json(const SweepConfig& config) {
  nlohmann::ordered_json data;
  data["kind"] = data_kind_name(config.data.kind);
  if (config.mode == SweepConfig::Mode::sweep_q) {
    if (config.data.kind == DataKind::sparse_gaussian) data["s"] = config.data.s;
    if (config.data.kind == DataKind::sparse_sign) data["s_over_p"] = config.data.s_over_p;
  }
  nlohmann::ordered_json j;
  j["command"] = config.mode == SweepConfig::Mode::sweep_q ? "sweep_q" : "sweep_s";
  j["data"] = data;
  j["n"] = config.n;
  j["p"] = config.p;
  j["d"] = config.d;
  j["grid"] = config.grid;
  j["trials"] = config.trials;
  j["seed"] = config.seed;
  if (config.mode == SweepConfig::Mode::sweep_s) j["q"] = config.q;
  j["threads"] = config.threads;
  return j;
}

namespace {

[[noreturn]] void bad_config(const std::string& field, const std::string& why) {
  throw std::invalid_argument("config field '" + field + "': " + why);
}

void check_keys(const nlohmann::json& j, const std::vector<std::string>& allowed,
                const std::string& where) {
  for (const auto& item : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      bad_config(where.empty() ? item.key() : where + "." + item.key(), "unknown field");
    }
  }
}

template <typename T>
T get_field(const nlohmann::json& j, const std::string& key) {
  if (!j.contains(key)) bad_config(key, "missing");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    bad_config(key, "wrong type");
  }
}

}  // namespace

SweepConfig config_from_json(const nlohmann::json& j) {
  const std::string command = get_field<std::string>(j, "command");
  SweepConfig c;
  if (command == "sweep_q") {
    c.mode = SweepConfig::Mode::sweep_q;
  } else if (command == "sweep_s") {
    c.mode = SweepConfig::Mode::sweep_s;
  } else {
    bad_config("command", "expected sweep_q or sweep_s, got '" + command + "'");
  }

  std::vector<std::string> allowed = {"command", "data", "n", "p",      "d",
                                      "grid",    "trials", "seed", "threads"};
  if (c.mode == SweepConfig::Mode::sweep_s) allowed.push_back("q");
  check_keys(j, allowed, "");

  if (!j.contains("data")) bad_config("data", "missing");
  const nlohmann::json& jd = j.at("data");
  if (!jd.is_object()) bad_config("data", "must be an object");
  c.data.kind = data_kind_from_name(get_field<std::string>(jd, "kind"));
  std::vector<std::string> data_allowed = {"kind"};
  if (c.mode == SweepConfig::Mode::sweep_q) {
    if (c.data.kind == DataKind::sparse_gaussian) {
      data_allowed.push_back("s");
      c.data.s = get_field<std::uint64_t>(jd, "s");
    } else if (c.data.kind == DataKind::sparse_sign) {
      data_allowed.push_back("s_over_p");
      c.data.s_over_p = get_field<double>(jd, "s_over_p");
    }
  }
  check_keys(jd, data_allowed, "data");

  c.n = get_field<std::uint64_t>(j, "n");
  c.p = get_field<std::uint64_t>(j, "p");
  c.d = get_field<std::uint64_t>(j, "d");
  c.grid = get_field<std::vector<double>>(j, "grid");
  c.trials = get_field<std::uint64_t>(j, "trials");
  c.seed = get_field<std::uint64_t>(j, "seed");
  if (c.mode == SweepConfig::Mode::sweep_s) c.q = get_field<double>(j, "q");
  if (j.contains("threads")) c.threads = get_field<std::uint32_t>(j, "threads");
  return c;
}

}  // namespace sjl::experiments
