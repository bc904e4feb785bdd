#include "kltrack/comparison.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "kltrack/distributions.hpp"
#include "kltrack/errors.hpp"

namespace kltrack {

namespace {

constexpr double kLrSlack = 1e-6;  // optimizer slack tolerated below zero

double clamp_lr(double stat) {
    if (stat >= 0.0) return stat;
    if (stat >= -kLrSlack) return 0.0;
    throw RelationError("-2LR is " + std::to_string(stat) +
                        " < 0: the declared nesting looks wrong");
}

void require_same_sample(int n_g, int n_h) {
    if (n_g != n_h) {
        throw ComparisonError("models were fitted on different sample sizes (" +
                              std::to_string(n_g) + " vs " + std::to_string(n_h) + ")");
    }
}

double check_alpha(double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw DomainError("alpha must lie in (0,1), got " + std::to_string(alpha));
    }
    return alpha;
}

}  // namespace

const char* to_string(Relation relation) {
    switch (relation) {
        case Relation::non_nested: return "non-nested";
        case Relation::nested_g_in_h: return "nested (g within h)";
    }
    return "?";
}

double d_statistic_from_loglik(double loglik_g, int p, double loglik_h, int q, int n) {
    if (n < 1) throw ComparisonError("d_statistic: n must be >= 1");
    return -(loglik_g - loglik_h - static_cast<double>(p - q)) / static_cast<double>(n);
}

double d_statistic(const FittedModel& fit_g, const FittedModel& fit_h) {
    require_same_sample(fit_g.n_obs, fit_h.n_obs);
    return d_statistic_from_loglik(fit_g.loglik_total, fit_g.n_params, fit_h.loglik_total,
                                   fit_h.n_params, fit_g.n_obs);
}

double omega_hat_sq(const Eigen::VectorXd& contribs_g, const Eigen::VectorXd& contribs_h) {
    if (contribs_g.size() != contribs_h.size()) {
        throw ComparisonError("contribution vectors have different lengths");
    }
    const Eigen::Index n = contribs_g.size();
    if (n < 2) throw ComparisonError("need at least two observations for omega-hat");
    const Eigen::VectorXd diff = contribs_g - contribs_h;
    const double mean = diff.mean();
    return (diff.array() - mean).square().sum() / static_cast<double>(n);
}

Interval tracking_interval_nonnested(double d, double omega_sq, int n, double alpha) {
    check_alpha(alpha);
    if (!(omega_sq >= 0.0)) throw DomainError("omega_sq must be non-negative");
    if (n < 2) throw DomainError("tracking interval needs n >= 2");
    const double z = std_normal_quantile(1.0 - 0.5 * alpha);
    const double half_width = z * std::sqrt(omega_sq / static_cast<double>(n));
    return Interval{d - half_width, d + half_width};
}

LrTest lr_test_from_loglik(double loglik_g, int p, double loglik_h, int q) {
    if (q <= p) {
        throw RelationError("nested comparison requires q > p (got p=" + std::to_string(p) +
                            ", q=" + std::to_string(q) + ")");
    }
    LrTest out;
    out.stat = clamp_lr(2.0 * (loglik_h - loglik_g));
    out.dof = q - p;
    out.pvalue = 1.0 - central_chisq_cdf(out.stat, out.dof);
    return out;
}

LrTest lr_test(const FittedModel& fit_g, const FittedModel& fit_h) {
    require_same_sample(fit_g.n_obs, fit_h.n_obs);
    return lr_test_from_loglik(fit_g.loglik_total, fit_g.n_params, fit_h.loglik_total,
                               fit_h.n_params);
}

double nested_pvalue(double lr_stat, int dof, int n, double delta0) {
    if (!(lr_stat >= 0.0)) throw DomainError("nested_pvalue: lr_stat must be >= 0");
    if (!(delta0 >= 0.0)) throw DomainError("nested_pvalue: delta0 must be >= 0");
    if (dof < 1 || n < 1) throw DomainError("nested_pvalue: require dof >= 1 and n >= 1");

    const NoncentralChiSq dist(dof, 2.0 * static_cast<double>(n) * delta0);
    const double cdf_at_stat = noncentral_chisq_cdf(lr_stat, dist);
    const double pv_right = 1.0 - cdf_at_stat;
    const double f_obs = noncentral_chisq_pdf(lr_stat, dist);

    if (pv_right <= 0.5) {
        // Statistic at or beyond the median: right-tail probability, doubled
        // when the matching left quantile has even lower density.
        if (pv_right <= 0.0) return 0.0;
        const double f_left = noncentral_chisq_pdf(
            noncentral_chisq_quantile(0.5 * pv_right, dist), dist);
        return f_left > f_obs ? pv_right : std::min(1.0, 2.0 * pv_right);
    }

    // Statistic below the median. With no mass to its left the one-sided
    // condition holds vacuously and the statistic is maximally compatible.
    const double pv_left = cdf_at_stat;
    if (pv_left <= 0.0) return 1.0;
    // If the density is even higher halfway into the left mass, the statistic
    // sits in the high-density bulk, not on a rejection flank.
    const double f_inner = noncentral_chisq_pdf(
        noncentral_chisq_quantile(0.5 * pv_left, dist), dist);
    if (f_inner > f_obs) return pv_right;
    // 1 - pv_left/2 can round to 1 for tiny tails; the comparator density is
    // then effectively zero and the doubled value applies.
    const double p_comparator = 1.0 - 0.5 * pv_left;
    const double f_right =
        p_comparator < 1.0
            ? noncentral_chisq_pdf(noncentral_chisq_quantile(p_comparator, dist), dist)
            : 0.0;
    return f_right > f_obs ? pv_left : std::min(1.0, 2.0 * pv_left);
}

NestedIntervals nested_intervals(double lr_stat, int dof, int n, double alpha) {
    if (!(lr_stat >= 0.0)) throw DomainError("nested_intervals: lr_stat must be >= 0");
    if (dof < 1 || n < 1) throw DomainError("nested_intervals: require dof >= 1 and n >= 1");
    check_alpha(alpha);

    const auto pvalue = [&](double delta0) { return nested_pvalue(lr_stat, dof, n, delta0); };
    constexpr double kTol = 1e-8;
    const double nn = static_cast<double>(n);

    // The p-value rises to its maximum near the moment-matched noncentrality
    // and falls beyond it, so each bound is a monotone crossing.
    const double delta_peak = std::max(0.0, (lr_stat - dof) / (2.0 * nn));

    double lower = 0.0;
    const double pv_at_zero = pvalue(0.0);
    if (pv_at_zero < alpha) {
        if (pvalue(delta_peak) < alpha) {
            throw SearchError("no value of the risk difference is compatible at level " +
                              std::to_string(alpha));
        }
        double a = 0.0;
        double b = delta_peak;
        while (b - a > kTol) {
            const double mid = 0.5 * (a + b);
            (pvalue(mid) < alpha ? a : b) = mid;
        }
        lower = 0.5 * (a + b);
    }

    double upper = std::numeric_limits<double>::infinity();
    double a = delta_peak;
    double b = (lr_stat + dof + 40.0 * std::sqrt(2.0 * dof + 4.0 * lr_stat)) / (2.0 * nn);
    bool bracketed = false;
    // A vanishing statistic cannot bound the noncentrality from above (the
    // dof-1 density is unbounded at the origin for every noncentrality), so
    // the search is skipped and the interval reported as one-sided.
    const bool degenerate = lr_stat <= 1e-8;
    for (int i = 0; !degenerate && i < 60; ++i) {
        if (pvalue(b) < alpha) {
            bracketed = true;
            break;
        }
        a = b;
        b *= 2.0;
    }
    if (bracketed) {
        while (b - a > kTol) {
            const double mid = 0.5 * (a + b);
            (pvalue(mid) >= alpha ? a : b) = mid;
        }
        upper = 0.5 * (a + b);
    } else if (!degenerate) {
        throw SearchError("upper bound search did not terminate below delta0 = " +
                          std::to_string(b));
    }

    const double shift = -static_cast<double>(dof) / (2.0 * nn);  // (p - q) / (2n)
    NestedIntervals out;
    out.confidence = Interval{lower, upper};
    out.tracking = Interval{lower + shift, upper + shift};
    return out;
}

ComparisonResult normalize_per_measurement(ComparisonResult result, int m) {
    if (m < 1) throw DomainError("per-measurement divisor must be >= 1");
    const double divisor = static_cast<double>(m);
    result.d_stat /= divisor;
    result.tracking_interval.lower /= divisor;
    result.tracking_interval.upper /= divisor;
    if (result.confidence_interval) {
        result.confidence_interval->lower /= divisor;
        result.confidence_interval->upper /= divisor;
    }
    result.qualification = qualify(std::fabs(result.d_stat));
    result.per_measurement_divisor = m;
    return result;
}

namespace {

ComparisonResult assemble(double loglik_g, int p, double loglik_h, int q, int n,
                          Relation relation, double alpha, std::optional<double> omega_sq,
                          std::optional<int> per_measurement) {
    check_alpha(alpha);
    ComparisonResult result;
    result.d_stat = d_statistic_from_loglik(loglik_g, p, loglik_h, q, n);
    result.omega_hat_sq = omega_sq;
    result.n_obs = n;
    result.relation = relation;
    result.alpha = alpha;

    if (relation == Relation::non_nested) {
        if (!omega_sq) {
            throw ComparisonError("the non-nested interval needs omega_hat_sq");
        }
        result.tracking_interval =
            tracking_interval_nonnested(result.d_stat, *omega_sq, n, alpha);
    } else {
        const LrTest lr = lr_test_from_loglik(loglik_g, p, loglik_h, q);
        result.lr = lr;
        const NestedIntervals intervals = nested_intervals(lr.stat, lr.dof, n, alpha);
        result.confidence_interval = intervals.confidence;
        result.tracking_interval = intervals.tracking;
    }
    result.qualification = qualify(std::fabs(result.d_stat));
    if (per_measurement) return normalize_per_measurement(std::move(result), *per_measurement);
    return result;
}

}  // namespace

ComparisonResult compare(const FittedModel& fit_g, const FittedModel& fit_h, Relation relation,
                         double alpha, std::optional<int> per_measurement) {
    require_same_sample(fit_g.n_obs, fit_h.n_obs);
    const double omega = omega_hat_sq(fit_g.loglik_contribs, fit_h.loglik_contribs);
    return assemble(fit_g.loglik_total, fit_g.n_params, fit_h.loglik_total, fit_h.n_params,
                    fit_g.n_obs, relation, alpha, omega, per_measurement);
}

ComparisonResult compare_summaries(double loglik_g, int p, double loglik_h, int q, int n,
                                   Relation relation, double alpha,
                                   std::optional<double> omega_sq,
                                   std::optional<int> per_measurement) {
    if (n < 1) throw ComparisonError("compare_summaries: n must be >= 1");
    if (omega_sq && !(*omega_sq >= 0.0)) {
        throw DomainError("omega_sq must be non-negative");
    }
    return assemble(loglik_g, p, loglik_h, q, n, relation, alpha, omega_sq, per_measurement);
}

}  // namespace kltrack
