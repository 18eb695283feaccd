// Command-line front end: threshold calculators, one-shot projections,
// distortion sweeps, and the moment probe.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "sjl/bounds.hpp"
#include "sjl/dataset.hpp"
#include "sjl/distribution.hpp"
#include "sjl/experiments.hpp"
#include "sjl/projection.hpp"
#include "sjl/verify.hpp"
#include "sjl/version.hpp"

namespace {

// sysexits-style process codes; 2 flags an infeasible bound, not a fault.
constexpr int kOk = 0;
constexpr int kInfeasible = 2;
constexpr int kUsage = 64;
constexpr int kConfig = 65;
constexpr int kIo = 74;

struct CliError {
  int code;
  std::string message;
};

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError{kIo, "cannot open " + path};
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw CliError{kConfig, path + ": " + e.what()};
  }
}

sjl::DataSet load_data_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError{kIo, "cannot open " + path};
  try {
    return sjl::parse_csv(in, path);
  } catch (const std::exception& e) {
    throw CliError{kConfig, e.what()};
  }
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw CliError{kIo, "cannot create " + dir + ": " + ec.message()};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw CliError{kIo, "cannot open " + path + " for writing"};
  out << text;
  if (!out) throw CliError{kIo, "write to " + path + " failed"};
}

void emit(const nlohmann::ordered_json& j) { std::cout << j.dump() << '\n'; }

int finish_bound(const sjl::bounds::BoundResult& r) {
  emit(sjl::bounds::to_json(r));
  return r.feasible ? kOk : kInfeasible;
}

nlohmann::ordered_json run_header(const std::string& command) {
  nlohmann::ordered_json j;
  j["tool"] = "sjl";
  j["version"] = sjl::kVersion;
  j["command"] = command;
  return j;
}

// ---- bounds ----------------------------------------------------------------

int cmd_bounds_dim(std::size_t n, double eps, std::optional<double> delta) {
  return finish_bound(delta ? sjl::bounds::dim_classical_delta(n, *delta, eps)
                            : sjl::bounds::dim_classical(n, eps));
}

int cmd_bounds_rate(double eps) {
  const sjl::bounds::RateFunction r = sjl::bounds::rate_function(eps);
  nlohmann::ordered_json j;
  j["kind"] = "rate_function";
  j["inputs"] = {{"eps", r.eps}};
  j["value"] = r.value;
  j["feasible"] = true;
  j["pollard_lb"] = r.pollard_lb;
  j["cubic_lb"] = r.cubic_lb;
  emit(j);
  return kOk;
}

int cmd_bounds_tail(std::size_t d, double eps) {
  sjl::bounds::BoundResult r;
  r.kind = sjl::bounds::Kind::chernoff_tail;
  r.inputs = {{"d", static_cast<double>(d)}, {"eps", eps}};
  r.value = sjl::bounds::chernoff_tail(d, eps);
  return finish_bound(r);
}

int cmd_bounds_hw(double trace, double frob_sq, double op_norm, double delta) {
  sjl::bounds::BoundResult r;
  r.kind = sjl::bounds::Kind::hw_tail;
  r.inputs = {{"trace", trace}, {"frob_sq", frob_sq}, {"op_norm", op_norm}, {"delta", delta}};
  r.value = sjl::bounds::hw_tail(trace, frob_sq, op_norm, delta);
  const bool consistent = sjl::bounds::hw_stats_consistent(trace, frob_sq, op_norm);
  if (!consistent) {
    std::cerr << "warning: trace/frob_sq/op_norm are not consistent with any PSD matrix\n";
  }
  nlohmann::ordered_json j = sjl::bounds::to_json(r);
  j["stats_consistent"] = consistent;
  emit(j);
  return kOk;
}

int cmd_bounds_hw_mgf(double trace, double frob_sq, double op_norm, double ell) {
  nlohmann::ordered_json j;
  j["kind"] = "hw_mgf_bound";
  j["inputs"] = {{"trace", trace}, {"frob_sq", frob_sq}, {"op_norm", op_norm}, {"ell", ell}};
  j["value"] = sjl::bounds::hw_mgf_bound(trace, frob_sq, op_norm, ell);
  j["feasible"] = true;
  emit(j);
  return kOk;
}

// ---- project ---------------------------------------------------------------

struct ProjectArgs {
  std::string data_path;
  std::string family = "gaussian";
  std::optional<double> q;
  double q_mask = 1.0;
  std::size_t d = 0;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string out_dir = ".";
  bool save_matrix = false;
};

int cmd_project(const ProjectArgs& args) {
  const sjl::Family family = sjl::family_from_name(args.family);
  const sjl::DistributionSpec spec = sjl::make_distribution(family, args.q);
  const sjl::DataSet data = load_data_file(args.data_path);
  if (args.d == 0) throw std::invalid_argument("d must be positive");

  const sjl::ProjectionMatrix A = sjl::ProjectionMatrix::generate(
      spec, args.d, data.p(), args.q_mask, args.seed, args.threads);
  const sjl::DataSet projected = A.apply_dataset(data, args.threads);
  const sjl::verify::DistortionReport rep =
      sjl::verify::distortion_report_from_points(data, projected);

  ensure_dir(args.out_dir);
  const std::filesystem::path out(args.out_dir);
  {
    std::ostringstream csv;
    sjl::write_csv(projected, csv);
    write_text((out / "projected.csv").string(), csv.str());
  }

  nlohmann::ordered_json report;
  report["pairs"] = rep.pairs;
  report["min_ratio"] = rep.min_ratio;
  report["max_ratio"] = rep.max_ratio;
  report["admissible_eps"] = rep.admissible_eps;
  report["argmin"] = {rep.argmin.first, rep.argmin.second};
  report["argmax"] = {rep.argmax.first, rep.argmax.second};
  report["skipped_pairs"] = rep.skipped.size();
  write_text((out / "report.json").string(), report.dump(2) + "\n");

  nlohmann::ordered_json cfg = run_header("project");
  cfg["data"] = args.data_path;
  nlohmann::ordered_json spec_json;
  sjl::to_json(spec_json, spec);
  cfg["distribution"] = spec_json;
  cfg["q_mask"] = args.q_mask;
  cfg["d"] = args.d;
  cfg["n"] = data.n();
  cfg["p"] = data.p();
  cfg["seed"] = args.seed;
  cfg["threads"] = args.threads;
  write_text((out / "run_config.json").string(), cfg.dump(2) + "\n");

  if (args.save_matrix) {
    try {
      A.save((out / "matrix.spjl").string());
    } catch (const std::runtime_error& e) {
      throw CliError{kIo, e.what()};
    }
  }

  nlohmann::ordered_json summary = run_header("project");
  summary["storage"] = A.storage() == sjl::Storage::csr ? "csr" : "dense";
  summary["nnz"] = A.nnz();
  summary["admissible_eps"] = rep.admissible_eps;
  summary["out"] = args.out_dir;
  emit(summary);
  return kOk;
}

// ---- sweep -----------------------------------------------------------------

int cmd_sweep(const std::string& config_path, const std::string& out_dir, bool full,
              std::optional<unsigned> threads) {
  nlohmann::json j = load_json_file(config_path);
  try {
    if (j.contains("full")) {
      const nlohmann::json full_block = j.at("full");
      j.erase("full");
      if (full) {
        for (const char* key : {"n", "p", "d"}) {
          if (full_block.contains(key)) j[key] = full_block.at(key);
        }
      }
    } else if (full) {
      throw std::invalid_argument("config has no 'full' block to apply");
    }

    sjl::experiments::SweepConfig config = sjl::experiments::config_from_json(j);
    if (threads) config.threads = *threads;
    const sjl::experiments::SweepResult result = config.mode == sjl::experiments::SweepConfig::Mode::sweep_q
                                                     ? sjl::experiments::sweep_q(config)
                                                     : sjl::experiments::sweep_s(config);

    ensure_dir(out_dir);
    const std::string stem = std::filesystem::path(config_path).stem().string();
    const std::filesystem::path out(out_dir);
    {
      std::ostringstream raw;
      sjl::experiments::write_raw_csv(result, raw);
      write_text((out / (stem + "_raw.csv")).string(), raw.str());
    }
    {
      std::ostringstream agg;
      sjl::experiments::write_agg_csv(result, agg);
      write_text((out / (stem + "_agg.csv")).string(), agg.str());
    }
    nlohmann::ordered_json cfg = run_header(config.mode == sjl::experiments::SweepConfig::Mode::sweep_q
                                                ? "sweep_q"
                                                : "sweep_s");
    cfg["config"] = sjl::experiments::config_to_json(config);
    write_text((out / (stem + "_config.json")).string(), cfg.dump(2) + "\n");

    std::cout << cfg["command"].get<std::string>() << ": " << result.points.size()
              << " grid points, " << config.trials << " trials each, wrote " << stem
              << "_{raw,agg}.csv and " << stem << "_config.json in " << out_dir << '\n';
    return kOk;
  } catch (const CliError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw CliError{kConfig, std::string(e.what())};
  }
}

// ---- probe -----------------------------------------------------------------

struct ProbeArgs {
  std::string config_path;
  std::size_t d = 0, s = 0;
  double q = 0.0, eps = 0.0;
  std::size_t trials = 10000;
  std::uint64_t seed = 1;
  std::string out_dir;
};

int cmd_probe(const ProbeArgs& args) {
  std::size_t d = args.d, s = args.s, trials = args.trials;
  double q = args.q, eps = args.eps;
  std::uint64_t seed = args.seed;

  if (!args.config_path.empty()) {
    const nlohmann::json j = load_json_file(args.config_path);
    try {
      if (j.value("command", "") != "probe") {
        throw std::invalid_argument("config field 'command': expected probe");
      }
      for (const auto& item : j.items()) {
        const std::string& key = item.key();
        if (key != "command" && key != "d" && key != "s" && key != "q" && key != "eps" &&
            key != "trials" && key != "seed") {
          throw std::invalid_argument("config field '" + key + "': unknown field");
        }
      }
      d = j.at("d").get<std::size_t>();
      s = j.at("s").get<std::size_t>();
      q = j.at("q").get<double>();
      eps = j.at("eps").get<double>();
      trials = j.at("trials").get<std::size_t>();
      seed = j.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
      throw CliError{kConfig, args.config_path + ": " + e.what()};
    } catch (const std::invalid_argument& e) {
      throw CliError{kConfig, std::string(e.what())};
    }
  }

  sjl::experiments::ProbeResult result;
  try {
    result = sjl::experiments::optimality_probe(d, q, s, eps, trials, seed);
  } catch (const std::invalid_argument& e) {
    throw CliError{args.config_path.empty() ? kUsage : kConfig, std::string(e.what())};
  }
  const nlohmann::ordered_json out_json = sjl::experiments::to_json(result);
  emit(out_json);

  if (!args.out_dir.empty()) {
    ensure_dir(args.out_dir);
    const std::filesystem::path out(args.out_dir);
    write_text((out / "probe.json").string(), out_json.dump(2) + "\n");
    nlohmann::ordered_json cfg = run_header("probe");
    cfg["d"] = d;
    cfg["s"] = s;
    cfg["q"] = q;
    cfg["eps"] = eps;
    cfg["trials"] = trials;
    cfg["seed"] = seed;
    write_text((out / "probe_config.json").string(), cfg.dump(2) + "\n");
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sub-Gaussian and sparse random projections"};
  app.set_version_flag("--version", sjl::kVersion);
  app.require_subcommand(1);

  // bounds
  CLI::App* bounds = app.add_subcommand("bounds", "Threshold and tail calculators");
  bounds->require_subcommand(1);

  std::size_t b_n = 0, b_d = 0;
  double b_eps = 0.0, b_delta = 0.0, b_trace = 0.0, b_frob = 0.0, b_op = 0.0, b_ell = 0.0;
  std::string b_data;
  bool b_has_delta = false;

  CLI::App* dim = bounds->add_subcommand("dim", "Embedding dimension, union bound");
  dim->add_option("--n", b_n, "number of points")->required();
  dim->add_option("--eps", b_eps, "distortion level in (0,1)")->required();
  dim->add_option("--delta", b_delta, "failure probability")->each([&](const std::string&) {
    b_has_delta = true;
  });

  CLI::App* dimsp = bounds->add_subcommand("dim-sparse-positive",
                                           "Dimension for the masked guarantee");
  dimsp->add_option("--n", b_n, "number of points")->required();
  dimsp->add_option("--eps", b_eps, "distortion level in (0,1)")->required();

  CLI::App* dimhp = bounds->add_subcommand("dim-sparse", "High-probability sparse dimension");
  dimhp->add_option("--n", b_n, "number of points")->required();
  dimhp->add_option("--delta", b_delta, "failure probability")->required();
  dimhp->add_option("--eps", b_eps, "distortion level in (0,1)")->required();

  CLI::App* rate = bounds->add_subcommand("rate", "Chernoff rate function");
  rate->add_option("--eps", b_eps, "deviation level")->required();

  CLI::App* tail = bounds->add_subcommand("tail", "Two-sided deviation tail");
  tail->add_option("--d", b_d, "embedding dimension")->required();
  tail->add_option("--eps", b_eps, "distortion level in (0,1)")->required();

  CLI::App* qmin2 = bounds->add_subcommand("qmin2", "Mask floor from fourth and sup norms");
  qmin2->add_option("--data", b_data, "points CSV")->required();
  qmin2->add_option("--eps", b_eps, "distortion level in (0,1)")->required();
  qmin2->add_option("--d", b_d, "embedding dimension")->required();

  CLI::App* qmin3 = bounds->add_subcommand("qmin3", "Mask floor from coordinate spread");
  qmin3->add_option("--data", b_data, "points CSV")->required();

  CLI::App* hw = bounds->add_subcommand("hw", "Quadratic form tail bound");
  hw->add_option("--trace", b_trace, "trace of S")->required();
  hw->add_option("--frob-sq", b_frob, "squared Frobenius norm of S")->required();
  hw->add_option("--op-norm", b_op, "operator norm of S")->required();
  hw->add_option("--delta", b_delta, "failure probability")->required();

  CLI::App* hwmgf = bounds->add_subcommand("hw-mgf", "Quadratic form MGF bound");
  hwmgf->add_option("--trace", b_trace, "trace of S")->required();
  hwmgf->add_option("--frob-sq", b_frob, "squared Frobenius norm of S")->required();
  hwmgf->add_option("--op-norm", b_op, "operator norm of S")->required();
  hwmgf->add_option("--ell", b_ell, "MGF argument")->required();

  // project
  ProjectArgs pargs;
  CLI::App* project = app.add_subcommand("project", "Draw a matrix and project a dataset");
  project->add_option("--data", pargs.data_path, "points CSV")->required();
  project->add_option("--family", pargs.family,
                      "entry law: gaussian, rademacher, uniform_sqrt3, three_point");
  double p_q = 0.0;
  CLI::Option* p_q_opt = project->add_option("--q", p_q, "three_point atom mass");
  project->add_option("--q-mask", pargs.q_mask, "Bernoulli mask level in (0,1]");
  project->add_option("--d", pargs.d, "embedding dimension")->required();
  project->add_option("--seed", pargs.seed, "generator seed");
  project->add_option("--threads", pargs.threads, "worker threads (never changes results)");
  project->add_option("--out", pargs.out_dir, "output directory");
  project->add_flag("--save-matrix", pargs.save_matrix, "also write matrix.spjl");

  // sweep
  std::string s_config, s_out = ".";
  bool s_full = false;
  unsigned s_threads = 0;
  CLI::App* sweep = app.add_subcommand("sweep", "Distortion sweep from a config file");
  sweep->add_option("--config", s_config, "sweep config JSON")->required();
  sweep->add_option("--out", s_out, "output directory");
  sweep->add_flag("--full", s_full, "use the config's full-scale sizes");
  CLI::Option* s_threads_opt =
      sweep->add_option("--threads", s_threads, "worker threads (never changes results)");

  // probe
  ProbeArgs prargs;
  CLI::App* probe = app.add_subcommand("probe", "Moment and success-rate probe");
  probe->add_option("--config", prargs.config_path, "probe config JSON");
  probe->add_option("--d", prargs.d, "embedding dimension");
  probe->add_option("--s", prargs.s, "nonzero coordinates of the direction");
  probe->add_option("--q", prargs.q, "mask level");
  probe->add_option("--eps", prargs.eps, "distortion level in (0,1)");
  probe->add_option("--trials", prargs.trials, "Monte Carlo trials");
  probe->add_option("--seed", prargs.seed, "generator seed");
  probe->add_option("--out", prargs.out_dir, "also write probe.json here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n';
    return kUsage;
  }

  try {
    if (bounds->parsed()) {
      if (dim->parsed()) {
        return cmd_bounds_dim(b_n, b_eps,
                              b_has_delta ? std::optional<double>(b_delta) : std::nullopt);
      }
      if (dimsp->parsed()) return finish_bound(sjl::bounds::dim_sparse_positive(b_n, b_eps));
      if (dimhp->parsed()) return finish_bound(sjl::bounds::dim_sparse_highprob(b_n, b_delta, b_eps));
      if (rate->parsed()) return cmd_bounds_rate(b_eps);
      if (tail->parsed()) return cmd_bounds_tail(b_d, b_eps);
      if (qmin2->parsed()) return finish_bound(sjl::bounds::qmin_thm2(load_data_file(b_data), b_eps, b_d));
      if (qmin3->parsed()) return finish_bound(sjl::bounds::qmin_thm3(load_data_file(b_data)));
      if (hw->parsed()) return cmd_bounds_hw(b_trace, b_frob, b_op, b_delta);
      if (hwmgf->parsed()) return cmd_bounds_hw_mgf(b_trace, b_frob, b_op, b_ell);
    }
    if (project->parsed()) {
      if (*p_q_opt) pargs.q = p_q;
      return cmd_project(pargs);
    }
    if (sweep->parsed()) {
      return cmd_sweep(s_config, s_out, s_full,
                       *s_threads_opt ? std::optional<unsigned>(s_threads) : std::nullopt);
    }
    if (probe->parsed()) return cmd_probe(prargs);
    std::cerr << "no subcommand\n";
    return kUsage;
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << '\n';
    return e.code;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  }
}
