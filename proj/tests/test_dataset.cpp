#include "doctest.h"

#include "sjl/dataset.hpp"
#include "sjl/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

using namespace sjl;

namespace {

std::string tmp_path(const char* name) {
    return std::string("sjl_test_") + name + ".csv";
}

} // namespace

TEST_SUITE("dataset") {

TEST_CASE("pair norms on a hand-computed pair") {
    // points (0,0) and (3,4): diff (3,4)
    DataSet d(2, 2, {0, 0, 3, 4});
    const auto& pn = d.pair_norms();
    REQUIRE(pn.size() == 1);
    CHECK(pn[0].i == 0);
    CHECK(pn[0].j == 1);
    CHECK(pn[0].l2sq == 25.0);
    CHECK(pn[0].l4p4 == 337.0);   // 81 + 256
    CHECK(pn[0].linfsq == 16.0);
    CHECK(d.zero_distance_pairs().empty());
}

TEST_CASE("pair count and cache") {
    DataSet d(5, 3, std::vector<double>(15, 0.0));
    CHECK(d.pair_norms().size() == 10);
    CHECK(&d.pair_norms() == &d.pair_norms());  // same cached object
    CHECK(d.zero_distance_pairs().size() == 10);
}

TEST_CASE("norm inequalities hold on random data") {
    auto data = experiments::gen_data(experiments::DataSpec{experiments::DataKind::dense_gaussian}, 12, 40, 99);
    for (const auto& pn : data.pair_norms()) {
        CHECK(pn.linfsq <= pn.l2sq + 1e-15);
        CHECK(pn.l2sq <= 40.0 * pn.linfsq + 1e-12);
        CHECK(pn.l4p4 <= pn.linfsq * pn.l2sq * (1 + 1e-15));
        CHECK(pn.l4p4 >= pn.l2sq * pn.l2sq / 40.0 * (1 - 1e-15));
    }
}

TEST_CASE("zero distance pairs are reported") {
    DataSet d(3, 2, {1, 2, 5, 6, 1, 2});
    auto z = d.zero_distance_pairs();
    REQUIRE(z.size() == 1);
    CHECK(z[0].first == 0);
    CHECK(z[0].second == 2);
}

TEST_CASE("constructor rejects mismatched sizes") {
    CHECK_THROWS_AS(DataSet(2, 3, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("csv round trip is bit exact") {
    auto data = experiments::gen_data(experiments::DataSpec{experiments::DataKind::dense_gaussian}, 7, 5, 4);
    auto path = tmp_path("roundtrip");
    save_csv(data, path);
    auto back = load_csv(path);
    CHECK(back == data);
    std::remove(path.c_str());
}

TEST_CASE("header line is detected and skipped") {
    std::istringstream with_header("a,b,c\n1,2,3\n4,5,6\n");
    auto d1 = parse_csv(with_header, "mem");
    CHECK(d1.n() == 2);
    CHECK(d1.p() == 3);
    CHECK(d1.at(1, 2) == 6.0);

    std::istringstream without("1,2,3\n4,5,6\n");
    auto d2 = parse_csv(without, "mem");
    CHECK(d2.n() == 2);
    CHECK(d2.at(0, 0) == 1.0);
}

TEST_CASE("ragged and malformed rows are named by line") {
    std::istringstream ragged("1,2,3\n4,5\n");
    CHECK_THROWS_WITH_AS(parse_csv(ragged, "mem"),
                         doctest::Contains("line 2"), std::runtime_error);

    std::istringstream garbage("1,2\n3,oops\n");
    CHECK_THROWS_WITH_AS(parse_csv(garbage, "mem"),
                         doctest::Contains("line 2"), std::runtime_error);

    std::istringstream empty("");
    CHECK_THROWS_AS(parse_csv(empty, "mem"), std::runtime_error);
}

TEST_CASE("missing file raises") {
    CHECK_THROWS_AS(load_csv("definitely_not_here.csv"), std::runtime_error);
}

TEST_CASE("written csv has the documented header") {
    DataSet d(1, 3, {1.5, -2.0, 0.25});
    std::ostringstream out;
    write_csv(d, out);
    auto text = out.str();
    CHECK(text.rfind("c0,c1,c2\n", 0) == 0);
    CHECK(text.find("1.5,-2,0.25\n") != std::string::npos);
}

TEST_CASE("blank trailing line is tolerated") {
    std::istringstream in("1,2\n3,4\n\n");
    auto d = parse_csv(in, "mem");
    CHECK(d.n() == 2);
}

} // TEST_SUITE
