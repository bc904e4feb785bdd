#include "kltrack/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace kltrack {

namespace {

using nlohmann::json;

json interval_to_json(const Interval& interval) {
    json j;
    j["lower"] = interval.lower;
    j["upper"] = std::isinf(interval.upper) ? json() : json(interval.upper);
    return j;
}

std::string fmt_interval(const Interval& interval) {
    if (std::isinf(interval.upper)) return "[" + fmt4(interval.lower) + "; unbounded)";
    return "[" + fmt4(interval.lower) + "; " + fmt4(interval.upper) + "]";
}

json histogram_to_json(const Histogram& histogram) {
    json j;
    j["bin_width"] = histogram.bin_width;
    j["first_bin_left_edge"] = static_cast<double>(histogram.first_bin) * histogram.bin_width;
    j["counts"] = histogram.counts;
    return j;
}

json qualification_to_json(const RiskQualification& q) {
    json j;
    j["category"] = to_string(q.category);
    j["kl_value"] = q.kl_value;
    return j;
}

}  // namespace

std::string fmt4(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.4g", value);
    return buffer;
}

std::string render_fit_text(const FittedModel& model) {
    std::ostringstream out;
    out << "logistic fit (" << model.n_obs << " observations, " << model.n_params
        << " parameters)\n";
    for (int i = 0; i < model.n_params; ++i) {
        out << "  " << model.design.design_names[static_cast<std::size_t>(i)] << " = "
            << fmt4(model.coefficients[i]) << "\n";
    }
    out << "  log-likelihood = " << fmt4(model.loglik_total) << "\n";
    out << "  AIC            = " << fmt4(model.aic) << "\n";
    out << "  converged      = " << (model.converged ? "yes" : "no") << "\n";
    return out.str();
}

std::string render_comparison_text(const ComparisonResult& result) {
    std::ostringstream out;
    out << "model comparison (" << to_string(result.relation) << ", n = " << result.n_obs
        << ", alpha = " << fmt4(result.alpha) << ")\n";
    out << "  D statistic         = " << fmt4(result.d_stat) << "\n";
    out << "  omega-hat squared   = "
        << (result.omega_hat_sq ? fmt4(*result.omega_hat_sq) : std::string("-")) << "\n";
    if (result.lr) {
        out << "  -2 log LR           = " << fmt4(result.lr->stat) << " (dof " << result.lr->dof
            << ", p-value " << fmt4(result.lr->pvalue) << ")\n";
    }
    if (result.confidence_interval) {
        out << "  confidence interval = " << fmt_interval(*result.confidence_interval)
            << "  (difference of misspecification risks)\n";
    }
    out << "  tracking interval   = " << fmt_interval(result.tracking_interval) << "\n";
    if (result.per_measurement_divisor) {
        out << "  per-measurement     = divided by " << *result.per_measurement_divisor << "\n";
    }
    out << "  difference of risks is " << to_string(result.qualification.category) << " (|D| = "
        << fmt4(result.qualification.kl_value) << ")\n";
    return out.str();
}

std::string render_simulation_text(const SimulationReport& report) {
    std::ostringstream out;
    out << "tracking interval study (non-nested, n = " << report.n << ", " << report.reps
        << " replications, seed " << report.seed << ")\n";
    out << "  calibration:\n";
    out << "    KL(tercile model, truth) = " << fmt4(report.kl_check) << "\n";
    out << "    omega-check squared      = " << fmt4(report.omega_check_sq) << "\n";
    out << "    trace(I^-1 J)            = " << fmt4(report.trace_check) << "\n";
    out << "    delta-check(n)           = " << fmt4(report.delta_check) << "\n";
    out << "  replications:\n";
    out << "    mean D                   = " << fmt4(report.mean_d) << "\n";
    out << "    mean omega-hat squared   = " << fmt4(report.mean_omega_hat_sq) << "\n";
    out << "    coverage rate            = " << fmt4(report.coverage_rate) << "\n";
    out << "    power (zero excluded)    = " << fmt4(report.power) << "\n";
    out << "    wrong preference count   = " << report.wrong_preference << "\n";
    out << "    failures                 = " << report.failures << "\n";
    out << "    skewness of D            = " << fmt4(report.d_skewness) << "\n";
    out << "    histogram of D           = " << report.histogram_d.counts.size()
        << " bins of width " << fmt4(report.histogram_d.bin_width) << " from "
        << fmt4(static_cast<double>(report.histogram_d.first_bin) *
                report.histogram_d.bin_width)
        << " (full counts in structured output)\n";
    return out.str();
}

std::string render_nested_fit_text(const NestedFitReport& report) {
    std::ostringstream out;
    out << "-2LR distribution study (nested, truth " << report.truth << ", n = " << report.n
        << ", " << report.reps << " replications, seed " << report.seed << ")\n";
    out << "  dof                = " << report.dof << "\n";
    out << "  mean -2LR          = " << fmt4(report.mean_stat) << "\n";
    out << "  noncentrality est. = " << fmt4(report.noncentrality_est) << "\n";
    out << "  implied risk gap   = " << fmt4(report.noncentrality_est / (2.0 * report.n))
        << "  (noncentrality / 2n)\n";
    out << "  KS distance        = " << fmt4(report.ks_distance) << "\n";
    out << "  failures           = " << report.failures << "\n";
    out << "  histogram of -2LR  = " << report.histogram_stat.counts.size()
        << " bins of width " << fmt4(report.histogram_stat.bin_width) << " from "
        << fmt4(static_cast<double>(report.histogram_stat.first_bin) *
                report.histogram_stat.bin_width)
        << " (full counts in structured output)\n";
    return out.str();
}

json fit_to_json(const FittedModel& model) {
    json j;
    j["command"] = "fit";
    json coefficients = json::object();
    for (int i = 0; i < model.n_params; ++i) {
        coefficients[model.design.design_names[static_cast<std::size_t>(i)]] =
            model.coefficients[i];
    }
    j["coefficients"] = coefficients;
    j["n_params"] = model.n_params;
    j["loglik_total"] = model.loglik_total;
    j["aic"] = model.aic;
    j["converged"] = model.converged;
    j["n_obs"] = model.n_obs;
    return j;
}

json comparison_to_json(const ComparisonResult& result) {
    json j;
    j["command"] = "compare";
    j["d_stat"] = result.d_stat;
    j["omega_hat_sq"] = result.omega_hat_sq ? json(*result.omega_hat_sq) : json();
    j["n_obs"] = result.n_obs;
    j["relation"] = result.relation == Relation::non_nested ? "non_nested" : "nested_g_in_h";
    j["alpha"] = result.alpha;
    j["tracking_interval"] = interval_to_json(result.tracking_interval);
    j["confidence_interval"] =
        result.confidence_interval ? interval_to_json(*result.confidence_interval) : json();
    if (result.lr) {
        json lr;
        lr["stat"] = result.lr->stat;
        lr["dof"] = result.lr->dof;
        lr["pvalue"] = result.lr->pvalue;
        j["lr_test"] = lr;
    } else {
        j["lr_test"] = json();
    }
    j["qualification"] = qualification_to_json(result.qualification);
    j["per_measurement_divisor"] =
        result.per_measurement_divisor ? json(*result.per_measurement_divisor) : json();
    return j;
}

json simulation_to_json(const SimulationReport& report) {
    json j;
    j["command"] = "simulate";
    j["design"] = "nonnested";
    j["n"] = report.n;
    j["reps"] = report.reps;
    j["seed"] = report.seed;
    j["alpha"] = report.alpha;
    json calibration;
    calibration["kl_check"] = report.kl_check;
    calibration["omega_check_sq"] = report.omega_check_sq;
    calibration["trace_check"] = report.trace_check;
    calibration["delta_check"] = report.delta_check;
    j["calibration"] = calibration;
    j["mean_d"] = report.mean_d;
    j["mean_omega_hat_sq"] = report.mean_omega_hat_sq;
    j["coverage_rate"] = report.coverage_rate;
    j["power"] = report.power;
    j["wrong_preference"] = report.wrong_preference;
    j["failures"] = report.failures;
    j["d_skewness"] = report.d_skewness;
    j["histogram_d"] = histogram_to_json(report.histogram_d);
    return j;
}

json nested_fit_to_json(const NestedFitReport& report) {
    json j;
    j["command"] = "simulate";
    j["design"] = std::string("nested-") + report.truth;
    j["n"] = report.n;
    j["reps"] = report.reps;
    j["seed"] = report.seed;
    j["dof"] = report.dof;
    j["mean_stat"] = report.mean_stat;
    j["noncentrality_est"] = report.noncentrality_est;
    j["implied_risk_gap"] = report.noncentrality_est / (2.0 * report.n);
    j["ks_distance"] = report.ks_distance;
    j["failures"] = report.failures;
    j["histogram_stat"] = histogram_to_json(report.histogram_stat);
    return j;
}

}  // namespace kltrack
