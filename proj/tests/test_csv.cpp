#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "kltrack/csv.hpp"
#include "kltrack/errors.hpp"
#include "kltrack/logistic.hpp"
#include "kltrack/rng.hpp"
#include "kltrack/simulation.hpp"

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("./" + name) {}
    ~TempFile() { std::remove(path.c_str()); }

    void write(const std::string& content) const {
        std::ofstream out(path);
        out << content;
    }
};

}  // namespace

TEST_CASE("a small well-formed file loads") {
    TempFile file("csv_ok.csv");
    file.write("y,x1,x2\n1,0.5,-1.25\n0,2.0,0.0\n1,-3.5,4.75\n");
    const kltrack::Dataset data = kltrack::load_csv(file.path, "y");
    CHECK(data.n_obs() == 3);
    CHECK(data.n_columns() == 3);  // intercept + x1 + x2
    CHECK(data.columns[0] == "(intercept)");
    CHECK(data.columns[1] == "x1");
    CHECK(data.columns[2] == "x2");
    CHECK(data.X(1, 1) == 2.0);
    CHECK(data.X(2, 2) == 4.75);
    CHECK(data.y[0] == 1.0);
    CHECK(data.X.col(0).minCoeff() == 1.0);
}

TEST_CASE("a NaN cell is rejected with its row and column") {
    TempFile file("csv_nan.csv");
    file.write("y,x1,x2\n1,0.5,1\n0,NaN,2\n1,1.5,3\n");
    try {
        kltrack::load_csv(file.path, "y");
        FAIL("expected a parse error");
    } catch (const kltrack::ParseError& e) {
        const std::string message = e.what();
        CHECK(message.find("row 2") != std::string::npos);
        CHECK(message.find("x1") != std::string::npos);
    }
}

TEST_CASE("text cells, ragged rows and bad responses are rejected") {
    TempFile file("csv_bad.csv");

    file.write("y,x1\n1,abc\n");
    CHECK_THROWS_AS(kltrack::load_csv(file.path, "y"), kltrack::ParseError);

    file.write("y,x1\n1,1,9\n");
    CHECK_THROWS_AS(kltrack::load_csv(file.path, "y"), kltrack::ParseError);

    file.write("y,x1\n2,1.0\n");
    CHECK_THROWS_AS(kltrack::load_csv(file.path, "y"), kltrack::ParseError);

    file.write("y,x1\n");
    CHECK_THROWS_AS(kltrack::load_csv(file.path, "y"), kltrack::ParseError);
}

TEST_CASE("a missing response column is reported by name") {
    TempFile file("csv_missing.csv");
    file.write("y,x1\n1,0.5\n");
    try {
        kltrack::load_csv(file.path, "outcome");
        FAIL("expected a missing-column error");
    } catch (const kltrack::MissingColumnError& e) {
        CHECK(std::string(e.what()).find("outcome") != std::string::npos);
    }
}

TEST_CASE("save and reload preserve the fit exactly") {
    kltrack::RngStream rng(99, 4);
    const kltrack::Dataset original = kltrack::generate_nonnested_sample(300, rng);

    TempFile file("csv_roundtrip.csv");
    kltrack::save_csv(original, "y", file.path);
    const kltrack::Dataset reloaded = kltrack::load_csv(file.path, "y");

    REQUIRE(reloaded.n_obs() == original.n_obs());
    CHECK((reloaded.X - original.X).lpNorm<Eigen::Infinity>() == 0.0);

    const kltrack::ModelSpec spec{{{"x1", kltrack::FeatureMap::tercile},
                                   {"x2", kltrack::FeatureMap::linear}}};
    const auto fit_a = kltrack::fit_logistic(original, spec);
    const auto fit_b = kltrack::fit_logistic(reloaded, spec);
    CHECK(std::fabs(fit_a.aic - fit_b.aic) < 1e-9);
}
