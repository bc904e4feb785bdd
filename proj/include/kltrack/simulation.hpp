#pragma once

#include <cstdint>
#include <vector>

#include "kltrack/dataset.hpp"
#include "kltrack/logistic.hpp"
#include "kltrack/rng.hpp"

namespace kltrack {

// Fixed-width histogram; bin b counts values in
// [ (first_bin + b) * bin_width, (first_bin + b + 1) * bin_width ).
struct Histogram {
    double bin_width = 1.0;
    long first_bin = 0;
    std::vector<long> counts;

    static Histogram build(const std::vector<double>& values, double bin_width);
};

// Everything calibrated once on the large reference sample. delta_check(n)
// combines the misspecification gap with the n-dependent parameter costs of
// the two models (3 parameters for the well-specified linear one).
struct Calibration {
    Eigen::VectorXd gamma_check;  // tercile-model coefficients on the large sample
    double kl_check = 0.0;        // mean log-ratio of truth over the tercile model
    double omega_check_sq = 0.0;  // variance of the same log-ratios
    double trace_check = 0.0;     // Tr(I^-1 J) of the tercile model
    int sample_size = 0;

    double delta_check(int n) const {
        return (3.0 - trace_check) / (2.0 * static_cast<double>(n)) - kl_check;
    }
};

struct SimulationReport {
    int n = 0;
    int reps = 0;
    std::uint64_t seed = 0;
    double alpha = 0.05;
    // calibration snapshot
    double delta_check = 0.0;
    double kl_check = 0.0;
    double omega_check_sq = 0.0;
    double trace_check = 0.0;
    // replication aggregates
    double mean_d = 0.0;
    double mean_omega_hat_sq = 0.0;
    double coverage_rate = 0.0;  // tracking intervals containing delta_check
    double power = 0.0;          // tracking intervals excluding zero
    int failures = 0;            // replications dropped due to fit errors
    int wrong_preference = 0;    // zero excluded but D > 0
    double d_skewness = 0.0;
    Histogram histogram_d;
};

struct NestedFitReport {
    const char* truth = "";
    int n = 0;
    int reps = 0;
    std::uint64_t seed = 0;
    int dof = 1;
    double mean_stat = 0.0;          // mean of -2LR
    double noncentrality_est = 0.0;  // mean_stat - dof, clamped at 0
    double ks_distance = 0.0;        // empirical cdf vs fitted noncentral chi-squared
    int failures = 0;
    Histogram histogram_stat;
};

// Truth used by the nested study: logit = 0.5 + x1_coef * x1 + 2 * x2.
enum class NestedTruth { f1, f2 };  // x1 coefficient 0.2 resp. 0.5

const char* to_string(NestedTruth truth);
double nested_truth_x1_coef(NestedTruth truth);

// Sample of n observations with x1, x2 independent standard normal and
// logit P(Y=1 | x) = 0.5 + x1 + 2 x2.
Dataset generate_nonnested_sample(int n, RngStream& rng);

// Same covariates, logit 0.5 + c x1 + 2 x2 with c set by the truth.
Dataset generate_nested_sample(int n, NestedTruth truth, RngStream& rng);

// Replaces x1 by its two tercile indicators (upper third is the reference),
// keeping x2. Cut points come from the observed x1 distribution.
Dataset tercile_model_design(const Dataset& data);

// True conditional log-density of each observation under the generating
// model with the given x1 coefficient.
Eigen::VectorXd true_loglik_contributions(const Dataset& data, double x1_coef);

// Fits the tercile model on one large sample and measures the quantities the
// coverage study needs. Deterministic in the seed.
Calibration calibrate_truth(int calibration_size, std::uint64_t seed);

// Coverage and power of the tracking interval when the well-specified linear
// model (g) challenges the tercile model (h) over `reps` fresh samples.
// Replication r uses stream (seed, r+1); the calibration uses a stream of its
// own, so results are identical for any worker count.
SimulationReport run_nonnested_study(int n, int reps = 1000, double alpha = 0.05,
                                     std::uint64_t seed = 20250808, int threads = 0,
                                     int calibration_size = 100000);

// Distribution of -2LR for x2-only (g) versus x1+x2 (h) fits, with the
// moment-fitted noncentral chi-squared and its KS distance.
NestedFitReport run_nested_study(NestedTruth truth, int n = 1000, int reps = 10000,
                                 std::uint64_t seed = 20250808, int threads = 0);

}  // namespace kltrack
