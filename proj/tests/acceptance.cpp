// Acceptance suite: one check per reproduction target, one printed line each.
// Every tolerance is pinned here, in code. Exit status is the number of
// failed criteria.
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "kltrack/comparison.hpp"
#include "kltrack/distributions.hpp"
#include "kltrack/errors.hpp"
#include "kltrack/logistic.hpp"
#include "kltrack/rng.hpp"
#include "kltrack/scale.hpp"
#include "kltrack/simulation.hpp"
#include "oracles.hpp"

namespace {

constexpr std::uint64_t kSeed = 20250808;

struct Criterion {
    std::string name;
    bool passed = true;
    std::ostringstream notes;

    void require(bool condition, const std::string& what) {
        if (!condition) {
            passed = false;
            notes << (notes.str().empty() ? "" : "; ") << what;
        }
    }
};

int report(Criterion& criterion, int index) {
    std::printf("[%s] criterion %d: %s%s%s\n", criterion.passed ? "PASS" : "FAIL", index,
                criterion.name.c_str(), criterion.notes.str().empty() ? "" : " -- ",
                criterion.notes.str().c_str());
    std::fflush(stdout);
    return criterion.passed ? 0 : 1;
}

std::string num(double v) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.6g", v);
    return buffer;
}

// ---------------------------------------------------------------- criterion 1
int table3_arithmetic() {
    Criterion c{"AIC table arithmetic (four depression models, n = 3484)"};
    struct Row {
        double loglik;
        int params;
        double published_aic;
    };
    const std::vector<Row> rows = {
        {-1346.2, 5, 2702.5}, {-1345.6, 6, 2703.2}, {-1342.9, 6, 2697.9}, {-1338.7, 9, 2695.5}};
    for (const Row& row : rows) {
        const double aic = -2.0 * row.loglik + 2.0 * row.params;
        c.require(std::fabs(aic - row.published_aic) <= 0.2,
                  "AIC " + num(aic) + " vs " + num(row.published_aic));
    }
    const int n = 3484;
    const double d_tercile = kltrack::d_statistic_from_loglik(-1346.2, 5, -1345.6, 6, n);
    const double d_quadratic = kltrack::d_statistic_from_loglik(-1346.2, 5, -1342.9, 6, n);
    const double d_powers = kltrack::d_statistic_from_loglik(-1342.9, 6, -1338.7, 9, n);
    c.require(std::fabs(d_tercile - (-0.0001)) <= 5e-5, "D(tercile) " + num(d_tercile));
    c.require(std::fabs(d_quadratic - 0.0007) <= 5e-5, "D(quadratic) " + num(d_quadratic));
    c.require(std::fabs(d_powers - 0.0003) <= 5e-5, "D(powers) " + num(d_powers));
    return report(c, 1);
}

// ---------------------------------------------------------------- criterion 2
int nested_interval_reproduction() {
    Criterion c{"nested interval from -2LR = 6.6, dof 1, n = 3484"};
    const auto intervals = kltrack::nested_intervals(6.6, 1, 3484, 0.05);
    const auto within20 = [](double value, double target) {
        return std::fabs(value - target) <= 0.20 * std::fabs(target);
    };
    c.require(within20(intervals.confidence.lower, 0.00012),
              "confidence lower " + num(intervals.confidence.lower));
    c.require(within20(intervals.confidence.upper, 0.0030),
              "confidence upper " + num(intervals.confidence.upper));
    c.require(within20(intervals.tracking.lower, -0.00002),
              "tracking lower " + num(intervals.tracking.lower));
    c.require(within20(intervals.tracking.upper, 0.0029),
              "tracking upper " + num(intervals.tracking.upper));
    return report(c, 2);
}

// ---------------------------------------------------------------- criterion 3
int calibration_constants(const kltrack::Calibration& calib) {
    Criterion c{"truth calibration at N = 1e5"};
    c.require(std::fabs(calib.kl_check - 7.28e-3) <= 3e-4, "KL " + num(calib.kl_check));
    c.require(std::fabs(calib.omega_check_sq - 1.44e-2) <= 1.5e-3,
              "omega^2 " + num(calib.omega_check_sq));
    c.require(std::fabs(calib.trace_check - 4.00) <= 0.05, "trace " + num(calib.trace_check));
    c.require(std::fabs(calib.delta_check(250) - (-9.28e-3)) <= 4e-4,
              "delta(250) " + num(calib.delta_check(250)));
    c.require(std::fabs(calib.delta_check(1000) - (-7.78e-3)) <= 4e-4,
              "delta(1000) " + num(calib.delta_check(1000)));
    return report(c, 3);
}

// ---------------------------------------------------------------- criterion 4
int coverage_study() {
    Criterion c{"tracking-interval coverage and power, 1000 replications"};

    const auto small_n = kltrack::run_nonnested_study(250, 1000, 0.05, kSeed, 1, 100000);
    c.require(std::fabs(small_n.mean_d - (-9.50e-3)) <= 1.5e-3,
              "n=250 mean D " + num(small_n.mean_d));
    c.require(std::fabs(small_n.mean_omega_hat_sq - 1.88e-2) <= 2e-3,
              "n=250 mean omega^2 " + num(small_n.mean_omega_hat_sq));
    c.require(std::fabs(small_n.coverage_rate - 0.967) <= 0.02,
              "n=250 coverage " + num(small_n.coverage_rate));
    c.require(std::fabs(small_n.power - 0.197) <= 0.04, "n=250 power " + num(small_n.power));
    c.require(small_n.wrong_preference == 0,
              "n=250 wrong preferences: " + std::to_string(small_n.wrong_preference));

    const auto large_n = kltrack::run_nonnested_study(1000, 1000, 0.05, kSeed, 1, 100000);
    c.require(std::fabs(large_n.mean_d - (-7.67e-3)) <= 8e-4,
              "n=1000 mean D " + num(large_n.mean_d));
    c.require(std::fabs(large_n.mean_omega_hat_sq - 1.54e-2) <= 1.5e-3,
              "n=1000 mean omega^2 " + num(large_n.mean_omega_hat_sq));
    c.require(std::fabs(large_n.coverage_rate - 0.954) <= 0.02,
              "n=1000 coverage " + num(large_n.coverage_rate));
    c.require(std::fabs(large_n.power - 0.514) <= 0.05, "n=1000 power " + num(large_n.power));
    c.require(large_n.wrong_preference == 0,
              "n=1000 wrong preferences: " + std::to_string(large_n.wrong_preference));
    return report(c, 4);
}

// ---------------------------------------------------------------- criterion 5
int nested_distribution_fit() {
    Criterion c{"noncentral fit of -2LR, 2000 replications at n = 1000"};
    const auto weak = kltrack::run_nested_study(kltrack::NestedTruth::f1, 1000, 2000, kSeed, 1);
    const auto strong =
        kltrack::run_nested_study(kltrack::NestedTruth::f2, 1000, 2000, kSeed, 1);
    c.require(weak.ks_distance < 0.03, "f1 KS " + num(weak.ks_distance));
    c.require(strong.ks_distance < 0.03, "f2 KS " + num(strong.ks_distance));
    const double weak_gap = weak.noncentrality_est / 2000.0;
    const double strong_gap = strong.noncentrality_est / 2000.0;
    c.require(weak_gap >= 2e-4 && weak_gap <= 5e-3, "f1 risk gap " + num(weak_gap));
    c.require(strong_gap >= 5e-3 && strong_gap <= 5e-2, "f2 risk gap " + num(strong_gap));
    return report(c, 5);
}

// ---------------------------------------------------------------- criterion 6
int scale_formulas() {
    Criterion c{"interpretation-scale formulas"};

    // published normal-variance values, matched to one unit in the last
    // displayed digit
    struct NormalCase {
        double sigma_sq;
        double displayed;
        double display_unit;
    };
    const std::vector<NormalCase> normal_cases = {{1.02, 0.0001, 1e-4}, {1.1, 0.002, 1e-3},
                                                  {1.3, 0.016, 1e-3},   {2.0, 0.096, 1e-3},
                                                  {4.0, 0.65, 1e-2},    {16.0, 0.91, 1e-2}};
    for (const NormalCase& nc : normal_cases) {
        const double kl = kltrack::kl_normal_variance(nc.sigma_sq);
        c.require(std::fabs(kl - nc.displayed) <= nc.display_unit,
                  "normal-variance " + num(nc.sigma_sq) + " gives " + num(kl) + ", published " +
                      num(nc.displayed) +
                      (nc.sigma_sq == 4.0
                           ? " (0.5*(log s - 1 + 1/s) puts 0.65 at s = 9, not s = 4)"
                           : ""));
    }

    const std::vector<std::pair<double, double>> re_cases = {
        {1e-4, 0.014}, {1e-3, 0.045}, {1e-2, 0.14}};
    for (const auto& [kl, displayed] : re_cases) {
        const double re = kltrack::relative_error(kl);
        c.require(std::fabs(re - displayed) <= 0.003,
                  "relative error at " + num(kl) + " -> " + num(re));
    }
    c.require(std::fabs(kltrack::relative_error(0.1) - 0.4258) <= 1e-4,
              "relative error at 0.1 -> " + num(kltrack::relative_error(0.1)));

    const std::vector<std::pair<double, kltrack::RiskCategory>> or_cases = {
        {1.03, kltrack::RiskCategory::negligible},
        {1.1, kltrack::RiskCategory::small},
        {1.35, kltrack::RiskCategory::moderate},
        {2.5, kltrack::RiskCategory::large}};
    for (const auto& [odds_ratio, category] : or_cases) {
        const auto q = kltrack::qualify(kltrack::kl_binary_or(std::log(odds_ratio)));
        c.require(q.category == category, "OR " + num(odds_ratio) + " classified " +
                                              kltrack::to_string(q.category));
    }
    return report(c, 6);
}

// ---------------------------------------------------------------- criterion 7
int property_suites() {
    Criterion c{"property suites (Monte Carlo, round trips, score, bounds)"};

    // noncentral cdf against 1e6-draw Monte Carlo on the grid
    for (int dof : {1, 2, 5}) {
        for (double delta : {0.0, 2.0, 10.0}) {
            const kltrack::NoncentralChiSq dist(dof, delta);
            std::vector<double> points;
            for (double p : {0.1, 0.3, 0.5, 0.7, 0.9}) {
                points.push_back(kltrack::noncentral_chisq_quantile(p, dist));
            }
            const auto mc = oracle::noncentral_chisq_mc_cdf(
                dof, delta, points, 1000000,
                0xC0FFEE ^ (static_cast<std::uint64_t>(dof) << 8) ^
                    static_cast<std::uint64_t>(delta));
            for (std::size_t i = 0; i < points.size(); ++i) {
                const double lib = kltrack::noncentral_chisq_cdf(points[i], dist);
                if (std::fabs(lib - mc[i]) >= 3e-3) {
                    c.require(false, "MC gap " + num(std::fabs(lib - mc[i])) + " at dof " +
                                         std::to_string(dof) + ", delta " + num(delta));
                }
            }
            // quantile round trips
            for (double x : {0.5, 2.0, 10.0}) {
                const double p = kltrack::noncentral_chisq_cdf(x, dist);
                if (p > 0.0 && p < 1.0) {
                    const double back = kltrack::noncentral_chisq_quantile(p, dist);
                    c.require(std::fabs(back - x) <= 1e-6,
                              "round trip off by " + num(std::fabs(back - x)));
                }
            }
        }
    }

    // logistic score norm and finite differences on random fits
    for (int rep = 0; rep < 20; ++rep) {
        kltrack::RngStream rng(kSeed, 1000 + static_cast<std::uint64_t>(rep));
        const auto data = kltrack::generate_nonnested_sample(300, rng);
        const auto fit = kltrack::fit_logistic(
            data, kltrack::ModelSpec{{{"x1", kltrack::FeatureMap::linear},
                                      {"x2", kltrack::FeatureMap::linear}}});
        const Eigen::MatrixXd design = kltrack::build_design(data, fit.design);
        const Eigen::VectorXd eta = design * fit.coefficients;
        Eigen::VectorXd mu(eta.size());
        for (Eigen::Index i = 0; i < eta.size(); ++i) mu[i] = 1.0 / (1.0 + std::exp(-eta[i]));
        const Eigen::VectorXd score = design.transpose() * (data.y - mu);
        c.require(score.lpNorm<Eigen::Infinity>() <= 1e-8,
                  "score norm " + num(score.lpNorm<Eigen::Infinity>()));

        const auto loglik_at = [&](const Eigen::VectorXd& beta) {
            const Eigen::VectorXd e = design * beta;
            double total = 0.0;
            for (Eigen::Index i = 0; i < e.size(); ++i) {
                const double softplus = e[i] > 0.0 ? e[i] + std::log1p(std::exp(-e[i]))
                                                   : std::log1p(std::exp(e[i]));
                total += data.y[i] * e[i] - softplus;
            }
            return total;
        };
        for (int j = 0; j < fit.n_params; ++j) {
            const double h = 1e-5;
            Eigen::VectorXd up = fit.coefficients;
            Eigen::VectorXd down = fit.coefficients;
            up[j] += h;
            down[j] -= h;
            const double fd = (loglik_at(up) - loglik_at(down)) / (2.0 * h);
            c.require(std::fabs(score[j] - fd) <= 1e-5 * std::max(1.0, std::fabs(score[j])),
                      "fd gap " + num(std::fabs(score[j] - fd)));
        }
    }

    // affine-rescaling invariance of the whole comparison
    {
        kltrack::RngStream rng(kSeed, 2000);
        auto data = kltrack::generate_nonnested_sample(400, rng);
        auto rescaled = data;
        rescaled.X.col(1) = 4.25 * rescaled.X.col(1).array() - 3.5;
        const kltrack::ModelSpec spec_g{{{"x1", kltrack::FeatureMap::linear},
                                         {"x2", kltrack::FeatureMap::linear}}};
        const kltrack::ModelSpec spec_h{{{"x1", kltrack::FeatureMap::tercile},
                                         {"x2", kltrack::FeatureMap::linear}}};
        const auto base =
            kltrack::compare(kltrack::fit_logistic(data, spec_g),
                             kltrack::fit_logistic(data, spec_h), kltrack::Relation::non_nested);
        const auto moved = kltrack::compare(kltrack::fit_logistic(rescaled, spec_g),
                                            kltrack::fit_logistic(rescaled, spec_h),
                                            kltrack::Relation::non_nested);
        c.require(std::fabs(base.d_stat - moved.d_stat) <= 1e-8, "D not invariant");
        c.require(std::fabs(*base.omega_hat_sq - *moved.omega_hat_sq) <= 1e-8,
                  "omega^2 not invariant");
        c.require(std::fabs(base.tracking_interval.lower - moved.tracking_interval.lower) <=
                      1e-8,
                  "interval lower not invariant");
        c.require(std::fabs(base.tracking_interval.upper - moved.tracking_interval.upper) <=
                      1e-8,
                  "interval upper not invariant");
    }

    // parameter-count bound on 100 random nested fits with real signal
    {
        int violations_spec = 0;
        int violations_hard = 0;
        for (int rep = 0; rep < 100; ++rep) {
            kltrack::RngStream rng(kSeed, 3000 + static_cast<std::uint64_t>(rep));
            const auto data = kltrack::generate_nested_sample(400, kltrack::NestedTruth::f2, rng);
            const auto g = kltrack::fit_logistic(
                data, kltrack::ModelSpec{{{"x2", kltrack::FeatureMap::linear}}});
            const auto h = kltrack::fit_logistic(
                data, kltrack::ModelSpec{{{"x1", kltrack::FeatureMap::linear},
                                          {"x2", kltrack::FeatureMap::linear}}});
            const double d = kltrack::d_statistic(g, h);
            const double p_minus_q = static_cast<double>(g.n_params - h.n_params);
            if (!(d > p_minus_q / (2.0 * 400.0))) ++violations_spec;
            if (!(d >= p_minus_q / 400.0 - 1e-12)) ++violations_hard;
        }
        c.require(violations_spec == 0,
                  std::to_string(violations_spec) + " fits at or below (p-q)/(2n)");
        c.require(violations_hard == 0,
                  std::to_string(violations_hard) + " fits below the hard (p-q)/n bound");
    }

    // interval inversion matches the likelihood ratio test on 100 instances
    {
        kltrack::RngStream rng(kSeed, 4000);
        int checked = 0;
        int mismatches = 0;
        while (checked < 100) {
            const int dof = 1 + static_cast<int>(rng.next_u64() % 3);
            const int n = 200 + static_cast<int>(rng.next_u64() % 3000);
            const double stat = 12.0 * rng.next_uniform();
            const double lr_pvalue = 1.0 - kltrack::central_chisq_cdf(stat, dof);
            if (std::fabs(lr_pvalue - 0.05) < 1e-4) continue;
            const auto intervals = kltrack::nested_intervals(stat, dof, n, 0.05);
            const bool zero_excluded = intervals.confidence.lower > 0.0;
            if (zero_excluded != (lr_pvalue < 0.05)) ++mismatches;
            ++checked;
        }
        c.require(mismatches == 0, std::to_string(mismatches) + " inversion mismatches");
    }

    return report(c, 7);
}

}  // namespace

int main() {
    int failures = 0;
    failures += table3_arithmetic();
    failures += nested_interval_reproduction();

    const kltrack::Calibration calib = kltrack::calibrate_truth(100000, kSeed);
    failures += calibration_constants(calib);
    failures += coverage_study();
    failures += nested_distribution_fit();
    failures += scale_formulas();
    failures += property_suites();

    if (failures == 0) {
        std::printf("acceptance: all criteria passed\n");
    } else {
        std::printf("acceptance: %d criteria failed\n", failures);
    }
    return failures;
}
