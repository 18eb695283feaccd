#include "doctest.h"

#include "json.hpp"
#include "sjl/dataset.hpp"
#include "sjl/experiments.hpp"
#include "sjl/projection.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Cmd {
    int code = -1;
    std::string out;
};

Cmd run_cli(const std::string& args) {
    const std::string cmd = std::string(SJL_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    Cmd r;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, got);
    const int st = pclose(pipe);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

json parse_line(const std::string& out) { return json::parse(out.substr(0, out.find('\n'))); }

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Scratch {
    fs::path dir;
    explicit Scratch(const char* name) : dir(fs::path("cli_scratch") / name) {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }
    std::string str(const char* sub = nullptr) const {
        return sub ? (dir / sub).string() : dir.string();
    }
};

std::string preset(const char* name) { return (fs::path(SJL_CONFIG_DIR) / name).string(); }

} // namespace

TEST_SUITE("cli") {

TEST_CASE("version flag") {
    auto r = run_cli("--version");
    CHECK(r.code == 0);
    CHECK(r.out.find("0.1.0") != std::string::npos);
}

TEST_CASE("bounds dim emits the frozen value") {
    auto r = run_cli("bounds dim --n 100 --eps 0.5");
    REQUIRE(r.code == 0);
    auto j = parse_line(r.out);
    CHECK(j["kind"] == "dim_classical");
    CHECK(j["value"] == 295);
    CHECK(j["feasible"] == true);
    CHECK(j["inputs"]["n"] == 100);

    auto d1 = parse_line(run_cli("bounds dim --n 100 --eps 0.5 --delta 1").out);
    CHECK(d1["value"] == 295);
    auto d05 = parse_line(run_cli("bounds dim --n 100 --eps 0.5 --delta 0.05").out);
    CHECK(d05["value"] == 391);
}

TEST_CASE("usage errors exit 64") {
    CHECK(run_cli("bounds dim --n 100 --eps 1.5").code == 64);  // domain
    CHECK(run_cli("bounds dim --eps 0.5").code == 64);          // missing required
    CHECK(run_cli("bounds dim --n 100 --eps 0.5 --delta 0").code == 64);
    CHECK(run_cli("frobnicate").code == 64);                    // unknown subcommand
    CHECK(run_cli("bounds").code == 64);                        // subcommand required
    CHECK(run_cli("").code == 64);
}

TEST_CASE("bounds rate carries both lower bounds") {
    auto r = run_cli("bounds rate --eps 0.5");
    REQUIRE(r.code == 0);
    auto j = parse_line(r.out);
    CHECK(j["value"].get<double>() == doctest::Approx(0.047267445945917805).epsilon(1e-14));
    CHECK(j["pollard_lb"].get<double>() == doctest::Approx(0.045918367346938764).epsilon(1e-14));
    CHECK(j["cubic_lb"].get<double>() == doctest::Approx(0.03125).epsilon(1e-14));
}

TEST_CASE("bounds tail and dim-sparse") {
    auto t = parse_line(run_cli("bounds tail --d 400 --eps 0.5").out);
    CHECK(t["value"].get<double>() == doctest::Approx(7.453306344157342e-06).epsilon(1e-12));

    auto hp = run_cli("bounds dim-sparse --n 100 --delta 0.05 --eps 0.3");
    REQUIRE(hp.code == 0);
    auto j = parse_line(hp.out);
    CHECK(j["value"] == 3629941);

    auto sp = parse_line(run_cli("bounds dim-sparse-positive --n 100 --eps 0.5").out);
    CHECK(sp["value"] == 2853);
}

TEST_CASE("bounds hw subcommands") {
    auto r = run_cli("bounds hw --trace 3 --frob-sq 3 --op-norm 1 --delta 0.05");
    REQUIRE(r.code == 0);
    auto j = parse_line(r.out);
    CHECK(j["stats_consistent"] == true);
    CHECK(j["value"].get<double>() > 3.0);

    auto inconsistent = run_cli("bounds hw --trace 1 --frob-sq 10 --op-norm 1 --delta 0.05");
    CHECK(inconsistent.code == 0);  // warned, not refused
    CHECK(parse_line(inconsistent.out)["stats_consistent"] == false);

    auto mgf = parse_line(run_cli("bounds hw-mgf --trace 1 --frob-sq 1 --op-norm 1 --ell 0.25").out);
    CHECK(mgf["value"].get<double>() == doctest::Approx(std::exp(0.375)).epsilon(1e-12));
    CHECK(run_cli("bounds hw-mgf --trace 1 --frob-sq 1 --op-norm 1 --ell 0.5").code == 64);
}

TEST_CASE("bounds qmin2 signals infeasible data with exit 2") {
    Scratch sc("qmin2");
    {
        std::ofstream csv(sc.dir / "two.csv");
        csv << "c0\n0\n1\n";  // 1-sparse difference: qmin-bracket is 20
    }
    auto r = run_cli("bounds qmin2 --data " + sc.str("two.csv") + " --eps 0.5 --d 100");
    CHECK(r.code == 2);
    auto j = parse_line(r.out);
    CHECK(j["feasible"] == false);
    CHECK(j["value"].get<double>() > 1.0);

    // a 500-of-1000 flat difference at generous eps is feasible
    std::vector<double> values(2 * 1000, 0.0);
    for (int k = 0; k < 500; ++k) values[k] = 1.0 / std::sqrt(500.0);
    sjl::save_csv(sjl::DataSet(2, 1000, std::move(values)), sc.str("flat.csv"));
    auto ok = run_cli("bounds qmin2 --data " + sc.str("flat.csv") + " --eps 0.9 --d 100");
    CHECK(ok.code == 0);
    CHECK(parse_line(ok.out)["feasible"] == true);

    auto q3 = run_cli("bounds qmin3 --data " + sc.str("flat.csv"));
    CHECK(q3.code == 0);
    CHECK(parse_line(q3.out)["value"].get<double>() == doctest::Approx(1.0 / 500.0).epsilon(1e-12));
}

TEST_CASE("io and config errors get distinct codes") {
    CHECK(run_cli("bounds qmin3 --data definitely_not_here.csv").code == 74);
    Scratch sc("badcsv");
    {
        std::ofstream f(sc.dir / "bad.csv");
        f << "1,2\n3,oops\n";
    }
    CHECK(run_cli("bounds qmin3 --data " + sc.str("bad.csv")).code == 65);
}

TEST_CASE("project writes its artifact set and replays byte-identically") {
    Scratch sc("project");
    auto data = sjl::experiments::gen_data(
        sjl::experiments::DataSpec{sjl::experiments::DataKind::dense_gaussian}, 8, 16, 2024);
    sjl::save_csv(data, sc.str("pts.csv"));

    const std::string base = "project --data " + sc.str("pts.csv") +
                             " --family three_point --q 0.3333333333333333 --d 8 --seed 3";
    auto r = run_cli(base + " --out " + sc.str("run1") + " --save-matrix");
    REQUIRE(r.code == 0);
    auto summary = parse_line(r.out);
    CHECK(summary["tool"] == "sjl");
    CHECK(summary["command"] == "project");
    CHECK(summary["storage"] == "csr");
    CHECK(summary["admissible_eps"].get<double>() >= 0.0);

    auto report = json::parse(slurp(sc.dir / "run1" / "report.json"));
    CHECK(report["pairs"] == 28);
    CHECK(report["min_ratio"].get<double>() > 0.0);
    auto cfg = json::parse(slurp(sc.dir / "run1" / "run_config.json"));
    CHECK(cfg["seed"] == 3);
    CHECK(cfg["d"] == 8);
    CHECK(cfg["distribution"]["family"] == "three_point");

    // the saved matrix is exactly the library's generate() for these knobs
    auto saved = sjl::ProjectionMatrix::load((sc.dir / "run1" / "matrix.spjl").string());
    auto expect = sjl::ProjectionMatrix::generate(
        sjl::make_distribution(sjl::Family::three_point, 1.0 / 3.0), 8, 16, 1.0, 3);
    CHECK(saved == expect);

    // projected rows equal the library's apply_dataset
    auto projected = sjl::load_csv((sc.dir / "run1" / "projected.csv").string());
    CHECK(projected == expect.apply_dataset(data));

    auto r2 = run_cli(base + " --out " + sc.str("run2") + " --save-matrix --threads 4");
    REQUIRE(r2.code == 0);
    CHECK(slurp(sc.dir / "run1" / "projected.csv") == slurp(sc.dir / "run2" / "projected.csv"));
    CHECK(slurp(sc.dir / "run1" / "report.json") == slurp(sc.dir / "run2" / "report.json"));
}

TEST_CASE("project rejects bad distribution knobs as usage") {
    Scratch sc("projbad");
    {
        std::ofstream f(sc.dir / "pts.csv");
        f << "0,0\n1,1\n";
    }
    CHECK(run_cli("project --data " + sc.str("pts.csv") +
                  " --family three_point --q 0 --d 4").code == 64);
    CHECK(run_cli("project --data " + sc.str("pts.csv") + " --q 0.5 --d 4").code == 64);
    CHECK(run_cli("project --data " + sc.str("pts.csv") + " --family nope --d 4").code == 64);
    CHECK(run_cli("project --data missing.csv --d 4").code == 74);
}

TEST_CASE("sweep runs a config, honors --full, and replays") {
    Scratch sc("sweep");
    {
        std::ofstream f(sc.dir / "micro.json");
        f << R"({"command":"sweep_q","data":{"kind":"dense_gaussian"},"n":6,"p":32,"d":8,)"
          << R"("grid":[1.0,0.5],"trials":2,"seed":5,"full":{"n":8,"p":48,"d":12}})";
    }
    auto r = run_cli("sweep --config " + sc.str("micro.json") + " --out " + sc.str("out1"));
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("sweep_q: 2 grid points", 0) == 0);

    auto raw = slurp(sc.dir / "out1" / "micro_raw.csv");
    CHECK(raw.rfind("grid_value,trial,min_ratio,max_ratio,admissible_eps\n", 0) == 0);
    CHECK(std::count(raw.begin(), raw.end(), '\n') == 5);  // header + 2*2
    auto agg = slurp(sc.dir / "out1" / "micro_agg.csv");
    CHECK(std::count(agg.begin(), agg.end(), '\n') == 3);
    auto cfg = json::parse(slurp(sc.dir / "out1" / "micro_config.json"));
    CHECK(cfg["command"] == "sweep_q");
    CHECK(cfg["config"]["n"] == 6);  // desk scale without --full

    auto rf = run_cli("sweep --config " + sc.str("micro.json") + " --out " + sc.str("outfull") +
                      " --full");
    REQUIRE(rf.code == 0);
    auto cfgf = json::parse(slurp(sc.dir / "outfull" / "micro_config.json"));
    CHECK(cfgf["config"]["n"] == 8);
    CHECK(cfgf["config"]["p"] == 48);
    CHECK(cfgf["config"]["d"] == 12);

    auto r2 = run_cli("sweep --config " + sc.str("micro.json") + " --out " + sc.str("out2") +
                      " --threads 3");
    REQUIRE(r2.code == 0);
    CHECK(slurp(sc.dir / "out2" / "micro_raw.csv") == raw);
}

TEST_CASE("sweep config errors exit 65, io errors 74") {
    Scratch sc("sweepbad");
    {
        std::ofstream f(sc.dir / "nofull.json");
        f << R"({"command":"sweep_q","data":{"kind":"dense_gaussian"},"n":6,"p":32,"d":8,)"
          << R"("grid":[1.0],"trials":1,"seed":5})";
    }
    CHECK(run_cli("sweep --config " + sc.str("nofull.json") + " --out " + sc.str("o") +
                  " --full").code == 65);
    {
        std::ofstream f(sc.dir / "unknown.json");
        f << R"({"command":"sweep_q","data":{"kind":"dense_gaussian"},"n":6,"p":32,"d":8,)"
          << R"("grid":[1.0],"trials":1,"seed":5,"surprise":1})";
    }
    CHECK(run_cli("sweep --config " + sc.str("unknown.json") + " --out " + sc.str("o")).code == 65);
    {
        std::ofstream f(sc.dir / "syntax.json");
        f << "{not json";
    }
    CHECK(run_cli("sweep --config " + sc.str("syntax.json") + " --out " + sc.str("o")).code == 65);
    CHECK(run_cli("sweep --config missing.json --out " + sc.str("o")).code == 74);
    // q belongs to sweep_s configs only
    {
        std::ofstream f(sc.dir / "strayq.json");
        f << R"({"command":"sweep_q","data":{"kind":"dense_gaussian"},"n":6,"p":32,"d":8,)"
          << R"("grid":[1.0],"trials":1,"seed":5,"q":0.5})";
    }
    CHECK(run_cli("sweep --config " + sc.str("strayq.json") + " --out " + sc.str("o")).code == 65);
}

TEST_CASE("probe accepts flags, writes artifacts, and validates") {
    Scratch sc("probe");
    auto r = run_cli("probe --d 10 --s 2 --q 0.5 --eps 0.5 --trials 200 --seed 3 --out " +
                     sc.str("out"));
    REQUIRE(r.code == 0);
    auto j = parse_line(r.out);
    CHECK(j["regime"] == "MainRegime");
    CHECK(j["trials"] == 200);
    double sh = j["success_hat"].get<double>();
    CHECK(sh >= 0.0);
    CHECK(sh <= 1.0);
    auto file_json = json::parse(slurp(sc.dir / "out" / "probe.json"));
    CHECK(file_json == json::parse(j.dump()));
    CHECK(json::parse(slurp(sc.dir / "out" / "probe_config.json"))["command"] == "probe");

    CHECK(run_cli("probe --d 10 --s 2 --q 0.5 --trials 10").code == 64);  // eps unset
    {
        std::ofstream f(sc.dir / "notprobe.json");
        f << R"({"command":"sweep_q"})";
    }
    CHECK(run_cli("probe --config " + sc.str("notprobe.json")).code == 65);
}

TEST_CASE("shipped presets parse and the probe preset reproduces its regime") {
    // the sweep presets are full desk-scale runs; parse them through the
    // library instead of executing all of them here
    for (const char* name : {"figure1.json", "figure2.json", "figure3.json"}) {
        std::ifstream in(preset(name));
        REQUIRE(in.good());
        json j = json::parse(in);
        j.erase("full");
        auto cfg = sjl::experiments::config_from_json(j);
        CHECK(cfg.n == 50);
        CHECK(cfg.p == 2000);
        CHECK(cfg.d == 200);
        CHECK(cfg.trials == 5);
        CHECK_FALSE(cfg.grid.empty());
    }

    auto r = run_cli("probe --config " + preset("thm4-probe.json"));
    REQUIRE(r.code == 0);
    auto j = parse_line(r.out);
    CHECK(j["regime"] == "MainRegime");
    CHECK(j["d"] == 500);
    CHECK(j["s"] == 10);
    CHECK(j["trials"] == 10000);
    CHECK(j["success_hat"].get<double>() == doctest::Approx(0.5853).epsilon(1e-12));
}

TEST_CASE("figure1 preset emits one raw row per grid point and trial") {
    Scratch sc("fig1");
    auto r = run_cli("sweep --config " + preset("figure1.json") + " --out " + sc.str());
    REQUIRE(r.code == 0);
    auto raw = slurp(sc.dir / "figure1_raw.csv");
    std::ifstream in(preset("figure1.json"));
    json cfg = json::parse(in);
    const long expected_rows = long(cfg["grid"].size()) * cfg["trials"].get<long>();
    CHECK(std::count(raw.begin(), raw.end(), '\n') == expected_rows + 1);
    auto agg = slurp(sc.dir / "figure1_agg.csv");
    CHECK(std::count(agg.begin(), agg.end(), '\n') == long(cfg["grid"].size()) + 1);
}

} // TEST_SUITE
