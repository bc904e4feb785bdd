#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kltrack/errors.hpp"
#include "kltrack/scale.hpp"

using kltrack::RiskCategory;

TEST_CASE("kl_normal_variance reference values") {
    CHECK(kltrack::kl_normal_variance(1.0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(kltrack::kl_normal_variance(1.02) == doctest::Approx(9.73921e-5).epsilon(1e-5));
    CHECK(kltrack::kl_normal_variance(1.1) == doctest::Approx(2.20054e-3).epsilon(1e-5));
    CHECK(kltrack::kl_normal_variance(1.3) == doctest::Approx(1.57975e-2).epsilon(1e-5));
    CHECK(kltrack::kl_normal_variance(2.0) == doctest::Approx(0.0965736).epsilon(1e-5));
    // 0.5 (log s - 1 + 1/s) at s = 4 and s = 16
    CHECK(kltrack::kl_normal_variance(4.0) == doctest::Approx(0.3181472).epsilon(1e-5));
    CHECK(kltrack::kl_normal_variance(16.0) == doctest::Approx(0.9175444).epsilon(1e-5));

    CHECK_THROWS_AS(kltrack::kl_normal_variance(0.0), kltrack::DomainError);
    CHECK_THROWS_AS(kltrack::kl_normal_variance(-1.0), kltrack::DomainError);
}

TEST_CASE("kl_normal_variance is convex with its minimum at variance one") {
    double prev = kltrack::kl_normal_variance(0.05);
    for (double s = 0.1; s < 1.0; s += 0.05) {
        const double value = kltrack::kl_normal_variance(s);
        CHECK(value < prev);
        CHECK(value > 0.0);
        prev = value;
    }
    prev = 0.0;
    for (double s = 1.0; s < 10.0; s += 0.25) {
        const double value = kltrack::kl_normal_variance(s);
        CHECK(value >= prev);
        prev = value;
    }
}

TEST_CASE("relative_error values and small-KL approximation") {
    CHECK(kltrack::relative_error(0.0) == 0.0);
    CHECK(kltrack::relative_error(1e-4) == doctest::Approx(0.0141414).epsilon(1e-5));
    CHECK(kltrack::relative_error(1e-3) == doctest::Approx(0.0446990).epsilon(1e-5));
    CHECK(kltrack::relative_error(1e-2) == doctest::Approx(0.1407173).epsilon(1e-5));
    CHECK(kltrack::relative_error(1e-1) == doctest::Approx(0.4257573).epsilon(1e-5));

    double prev = -1.0;
    for (double kl = 0.0; kl < 3.0; kl += 0.05) {
        const double value = kltrack::relative_error(kl);
        CHECK(value > prev);
        CHECK(value < 1.0);
        prev = value;
    }
    for (double kl : {1e-6, 1e-4, 1e-3}) {
        const double approx = std::sqrt(2.0 * kl);
        CHECK(std::fabs(kltrack::relative_error(kl) - approx) < 0.05 * approx);
    }
    CHECK_THROWS_AS(kltrack::relative_error(-1e-9), kltrack::DomainError);
}

TEST_CASE("kl_binary_or values and symmetry") {
    CHECK(kltrack::kl_binary_or(0.0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(kltrack::kl_binary_or(std::log(2.5)) == doctest::Approx(0.1014705).epsilon(1e-5));
    CHECK(kltrack::kl_binary_or(std::log(1.1)) == doctest::Approx(1.13507e-3).epsilon(1e-5));

    double prev = -1.0;
    for (double beta = 0.0; beta < 5.0; beta += 0.2) {
        const double value = kltrack::kl_binary_or(beta);
        CHECK(kltrack::kl_binary_or(-beta) == doctest::Approx(value).epsilon(1e-13));
        CHECK(value > prev);
        prev = value;
    }
    // closed form agrees with the direct cosh expression where it is safe
    for (double beta : {0.3, 1.0, 4.0, 20.0}) {
        const double direct = 0.5 * std::log(0.5 * (1.0 + std::cosh(beta)));
        CHECK(kltrack::kl_binary_or(beta) == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("statistical_risk") {
    CHECK(kltrack::statistical_risk(10, 500) == doctest::Approx(1e-2).epsilon(1e-14));
    CHECK(kltrack::statistical_risk(1, 5000) == doctest::Approx(1e-4).epsilon(1e-14));
    CHECK(kltrack::qualify(kltrack::statistical_risk(1, 5000)).category ==
          RiskCategory::negligible);
    for (int m : {1, 7, 40}) {
        CHECK(kltrack::statistical_risk(2, 2 * m) == doctest::Approx(1.0 / (2.0 * m)));
    }
    CHECK_THROWS_AS(kltrack::statistical_risk(0, 10), kltrack::DomainError);
}

TEST_CASE("qualify anchors, monotonicity and boundaries") {
    CHECK(kltrack::qualify(0.0).category == RiskCategory::negligible);
    CHECK(kltrack::qualify(1e-4).category == RiskCategory::negligible);
    CHECK(kltrack::qualify(1e-3).category == RiskCategory::small);
    CHECK(kltrack::qualify(1e-2).category == RiskCategory::moderate);
    CHECK(kltrack::qualify(1e-1).category == RiskCategory::large);
    CHECK(kltrack::qualify(0.31).category == RiskCategory::large);
    CHECK(kltrack::qualify(0.5).category == RiskCategory::very_large);

    RiskCategory prev = RiskCategory::negligible;
    for (double kl = 0.0; kl < 2.0; kl += 1e-3) {
        const RiskCategory category = kltrack::qualify(kl).category;
        CHECK(static_cast<int>(category) >= static_cast<int>(prev));
        prev = category;
    }
    CHECK_THROWS_AS(kltrack::qualify(-1e-12), kltrack::DomainError);
}
