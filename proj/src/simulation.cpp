#include "kltrack/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "kltrack/comparison.hpp"
#include "kltrack/distributions.hpp"
#include "kltrack/errors.hpp"

namespace kltrack {

namespace {

constexpr std::uint64_t kCalibrationStream = 0x9E3779B97F4A7C15ULL;

double softplus(double t) {
    return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

double sigmoid(double t) {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

Dataset generate_logistic_sample(int n, double x1_coef, RngStream& rng) {
    if (n < 1) throw DomainError("sample size must be >= 1");
    Eigen::VectorXd y(n);
    Eigen::MatrixXd covariates(n, 2);
    for (int i = 0; i < n; ++i) {
        const double x1 = rng.next_normal();
        const double x2 = rng.next_normal();
        covariates(i, 0) = x1;
        covariates(i, 1) = x2;
        const double eta = 0.5 + x1_coef * x1 + 2.0 * x2;
        y[i] = rng.next_bernoulli(sigmoid(eta)) ? 1.0 : 0.0;
    }
    return Dataset::from_columns(std::move(y), std::move(covariates), {"x1", "x2"});
}

// Runs fn(r) for r in [0, reps); with several threads the work is split by
// index, so any aggregation over per-index slots stays deterministic.
template <typename Fn>
void for_each_replication(int reps, int threads, Fn&& fn) {
    if (threads <= 0) threads = 1;
    threads = std::min<int>(threads, reps);
    if (threads <= 1) {
        for (int r = 0; r < reps; ++r) fn(r);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (int r = next.fetch_add(1); r < reps; r = next.fetch_add(1)) fn(r);
        });
    }
    for (auto& worker : pool) worker.join();
}

double skewness(const std::vector<double>& values) {
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double m2 = 0.0;
    double m3 = 0.0;
    for (double v : values) {
        const double d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= n;
    m3 /= n;
    return m3 / std::pow(m2, 1.5);
}

}  // namespace

Histogram Histogram::build(const std::vector<double>& values, double bin_width) {
    if (!(bin_width > 0.0)) throw DomainError("histogram bin width must be positive");
    Histogram h;
    h.bin_width = bin_width;
    if (values.empty()) return h;
    long lo = std::numeric_limits<long>::max();
    long hi = std::numeric_limits<long>::min();
    for (double v : values) {
        const long bin = static_cast<long>(std::floor(v / bin_width));
        lo = std::min(lo, bin);
        hi = std::max(hi, bin);
    }
    h.first_bin = lo;
    h.counts.assign(static_cast<std::size_t>(hi - lo + 1), 0);
    for (double v : values) {
        const long bin = static_cast<long>(std::floor(v / bin_width));
        ++h.counts[static_cast<std::size_t>(bin - lo)];
    }
    return h;
}

const char* to_string(NestedTruth truth) {
    return truth == NestedTruth::f1 ? "f1" : "f2";
}

double nested_truth_x1_coef(NestedTruth truth) {
    return truth == NestedTruth::f1 ? 0.2 : 0.5;
}

Dataset generate_nonnested_sample(int n, RngStream& rng) {
    return generate_logistic_sample(n, 1.0, rng);
}

Dataset generate_nested_sample(int n, NestedTruth truth, RngStream& rng) {
    return generate_logistic_sample(n, nested_truth_x1_coef(truth), rng);
}

Dataset tercile_model_design(const Dataset& data) {
    const int x1 = data.column_index("x1");
    const int x2 = data.column_index("x2");
    const auto& col = data.X.col(x1);
    std::vector<double> values(col.data(), col.data() + col.size());
    {
        std::vector<double> distinct = values;
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        if (distinct.size() < 3) {
            throw EncodingError("tercile encoding needs at least 3 distinct x1 values");
        }
    }
    const double cut_lo = quantile_type7(values, 1.0 / 3.0);
    const double cut_hi = quantile_type7(values, 2.0 / 3.0);

    const Eigen::Index n = data.n_obs();
    Eigen::MatrixXd covariates(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double v = col[i];
        covariates(i, 0) = v <= cut_lo ? 1.0 : 0.0;
        covariates(i, 1) = (v > cut_lo && v <= cut_hi) ? 1.0 : 0.0;
        covariates(i, 2) = data.X(i, x2);
    }
    return Dataset::from_columns(data.y, std::move(covariates), {"x1_t1", "x1_t2", "x2"});
}

Eigen::VectorXd true_loglik_contributions(const Dataset& data, double x1_coef) {
    const int x1 = data.column_index("x1");
    const int x2 = data.column_index("x2");
    Eigen::VectorXd contribs(data.n_obs());
    for (Eigen::Index i = 0; i < data.n_obs(); ++i) {
        const double eta = 0.5 + x1_coef * data.X(i, x1) + 2.0 * data.X(i, x2);
        contribs[i] = data.y[i] * eta - softplus(eta);
    }
    return contribs;
}

Calibration calibrate_truth(int calibration_size, std::uint64_t seed) {
    if (calibration_size < 10000) {
        throw DomainError("calibration needs at least 10^4 observations");
    }
    RngStream rng(seed, kCalibrationStream);
    const Dataset sample = generate_nonnested_sample(calibration_size, rng);

    const ModelSpec tercile{{{"x1", FeatureMap::tercile}, {"x2", FeatureMap::linear}}};
    const FittedModel fit = fit_logistic(sample, tercile);

    const Eigen::VectorXd truth = true_loglik_contributions(sample, 1.0);
    const Eigen::VectorXd ratios = truth - fit.loglik_contribs;

    Calibration calib;
    calib.gamma_check = fit.coefficients;
    calib.kl_check = ratios.mean();
    calib.omega_check_sq =
        (ratios.array() - calib.kl_check).square().sum() / static_cast<double>(ratios.size());
    const auto [info, outer] = information_matrices(fit, sample);
    calib.trace_check = info.llt().solve(outer).trace();
    calib.sample_size = calibration_size;
    return calib;
}

SimulationReport run_nonnested_study(int n, int reps, double alpha, std::uint64_t seed,
                                     int threads, int calibration_size) {
    if (n < 50) throw DomainError("study sample size must be >= 50");
    if (reps < 1) throw DomainError("study needs at least one replication");

    const Calibration calib = calibrate_truth(calibration_size, seed);
    const double delta_check = calib.delta_check(n);

    const ModelSpec linear{{{"x1", FeatureMap::linear}, {"x2", FeatureMap::linear}}};
    const ModelSpec tercile{{{"x1", FeatureMap::tercile}, {"x2", FeatureMap::linear}}};

    struct Replication {
        bool ok = false;
        double d = 0.0;
        double omega_sq = 0.0;
        bool covers = false;
        bool excludes_zero = false;
    };
    std::vector<Replication> results(static_cast<std::size_t>(reps));

    for_each_replication(reps, threads, [&](int r) {
        RngStream rng(seed, static_cast<std::uint64_t>(r) + 1);
        try {
            const Dataset sample = generate_nonnested_sample(n, rng);
            const FittedModel fit_g = fit_logistic(sample, linear);
            const FittedModel fit_h = fit_logistic(sample, tercile);
            Replication& out = results[static_cast<std::size_t>(r)];
            out.d = d_statistic(fit_g, fit_h);
            out.omega_sq = omega_hat_sq(fit_g.loglik_contribs, fit_h.loglik_contribs);
            const Interval interval =
                tracking_interval_nonnested(out.d, out.omega_sq, n, alpha);
            out.covers = interval.contains(delta_check);
            out.excludes_zero = interval.excludes_zero();
            out.ok = true;
        } catch (const Error&) {
            // failed replications are counted and excluded below
        }
    });

    SimulationReport report;
    report.n = n;
    report.reps = reps;
    report.seed = seed;
    report.alpha = alpha;
    report.delta_check = delta_check;
    report.kl_check = calib.kl_check;
    report.omega_check_sq = calib.omega_check_sq;
    report.trace_check = calib.trace_check;

    std::vector<double> d_values;
    d_values.reserve(results.size());
    long covered = 0;
    long excluded = 0;
    for (const Replication& rep : results) {
        if (!rep.ok) {
            ++report.failures;
            continue;
        }
        d_values.push_back(rep.d);
        report.mean_d += rep.d;
        report.mean_omega_hat_sq += rep.omega_sq;
        if (rep.covers) ++covered;
        if (rep.excludes_zero) {
            ++excluded;
            if (rep.d > 0.0) ++report.wrong_preference;
        }
    }
    const long successes = static_cast<long>(d_values.size());
    if (successes == 0 || report.failures * 100 > reps) {
        throw StudyError("too many failed replications (" + std::to_string(report.failures) +
                         " of " + std::to_string(reps) + ")");
    }
    report.mean_d /= static_cast<double>(successes);
    report.mean_omega_hat_sq /= static_cast<double>(successes);
    report.coverage_rate = static_cast<double>(covered) / static_cast<double>(successes);
    report.power = static_cast<double>(excluded) / static_cast<double>(successes);
    report.d_skewness = successes > 2 ? skewness(d_values) : 0.0;
    report.histogram_d = Histogram::build(d_values, 2.5e-3);
    return report;
}

NestedFitReport run_nested_study(NestedTruth truth, int n, int reps, std::uint64_t seed,
                                 int threads) {
    if (n < 50) throw DomainError("study sample size must be >= 50");
    if (reps < 1) throw DomainError("study needs at least one replication");

    const ModelSpec reduced{{{"x2", FeatureMap::linear}}};
    const ModelSpec full{{{"x1", FeatureMap::linear}, {"x2", FeatureMap::linear}}};

    std::vector<double> stats(static_cast<std::size_t>(reps),
                              std::numeric_limits<double>::quiet_NaN());
    for_each_replication(reps, threads, [&](int r) {
        RngStream rng(seed, static_cast<std::uint64_t>(r) + 1);
        try {
            const Dataset sample = generate_nested_sample(n, truth, rng);
            const FittedModel fit_g = fit_logistic(sample, reduced);
            const FittedModel fit_h = fit_logistic(sample, full);
            stats[static_cast<std::size_t>(r)] = lr_test(fit_g, fit_h).stat;
        } catch (const Error&) {
        }
    });

    NestedFitReport report;
    report.truth = to_string(truth);
    report.n = n;
    report.reps = reps;
    report.seed = seed;
    report.dof = 1;

    std::vector<double> observed;
    observed.reserve(stats.size());
    for (double s : stats) {
        if (std::isnan(s)) {
            ++report.failures;
        } else {
            observed.push_back(s);
        }
    }
    if (observed.empty() || report.failures * 100 > reps) {
        throw StudyError("too many failed replications (" + std::to_string(report.failures) +
                         " of " + std::to_string(reps) + ")");
    }

    double mean = 0.0;
    for (double s : observed) mean += s;
    mean /= static_cast<double>(observed.size());
    report.mean_stat = mean;
    report.noncentrality_est = std::max(0.0, mean - report.dof);

    const NoncentralChiSq fitted(report.dof, report.noncentrality_est);
    std::sort(observed.begin(), observed.end());
    const double count = static_cast<double>(observed.size());
    double ks = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double cdf = noncentral_chisq_cdf(observed[i], fitted);
        const double above = (static_cast<double>(i) + 1.0) / count - cdf;
        const double below = cdf - static_cast<double>(i) / count;
        ks = std::max({ks, above, below});
    }
    report.ks_distance = ks;
    report.histogram_stat = Histogram::build(observed, 1.0);
    return report;
}

}  // namespace kltrack
