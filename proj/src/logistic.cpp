#include "kltrack/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "kltrack/errors.hpp"

namespace kltrack {

namespace {

double sigmoid(double t) {
    if (t >= 0.0) {
        return 1.0 / (1.0 + std::exp(-t));
    }
    const double e = std::exp(t);
    return e / (1.0 + e);
}

// log(1 + exp(t)) without overflow.
double softplus(double t) {
    return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

double log_likelihood(const Eigen::VectorXd& y, const Eigen::VectorXd& eta) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        total += y[i] * eta[i] - softplus(eta[i]);
    }
    return total;
}

// Pivoted Cholesky rank check on X'X. Reports the first design column that
// cannot be pivoted above tol = 1e-10 * max diagonal.
void check_full_rank(const Eigen::MatrixXd& design, const std::vector<std::string>& names) {
    const Eigen::Index p = design.cols();
    Eigen::MatrixXd a = design.transpose() * design;
    std::vector<Eigen::Index> perm(p);
    for (Eigen::Index i = 0; i < p; ++i) perm[i] = i;
    const double tol = 1e-10 * a.diagonal().maxCoeff();

    for (Eigen::Index k = 0; k < p; ++k) {
        Eigen::Index pivot = k;
        for (Eigen::Index j = k + 1; j < p; ++j) {
            if (a(j, j) > a(pivot, pivot)) pivot = j;
        }
        if (!(a(pivot, pivot) > tol)) {
            throw SingularDesignError("design is rank deficient at column '" +
                                      names[static_cast<std::size_t>(perm[pivot])] + "'");
        }
        if (pivot != k) {
            a.row(k).swap(a.row(pivot));
            a.col(k).swap(a.col(pivot));
            std::swap(perm[k], perm[pivot]);
        }
        const double d = std::sqrt(a(k, k));
        a(k, k) = d;
        for (Eigen::Index j = k + 1; j < p; ++j) a(j, k) /= d;
        for (Eigen::Index j = k + 1; j < p; ++j) {
            for (Eigen::Index i = j; i < p; ++i) a(i, j) -= a(i, k) * a(j, k);
        }
    }
}

// Every observation predicted at its label with extreme probability is a
// certificate that the data are separated and the likelihood is unbounded.
bool perfectly_predicted(const Eigen::VectorXd& y, const Eigen::VectorXd& mu) {
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double miss = y[i] == 1.0 ? 1.0 - mu[i] : mu[i];
        if (miss > 1e-6) return false;
    }
    return true;
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

const char* to_string(FeatureMap map) {
    switch (map) {
        case FeatureMap::linear: return "linear";
        case FeatureMap::quadratic: return "quadratic";
        case FeatureMap::tercile: return "tercile";
    }
    return "?";
}

double quantile_type7(std::vector<double> values, double p) {
    if (values.empty()) throw DomainError("quantile_type7: empty sample");
    if (!(p >= 0.0) || !(p <= 1.0)) throw DomainError("quantile_type7: p outside [0,1]");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] + (h - std::floor(h)) * (values[lo + 1] - values[lo]);
}

DesignInfo resolve_design(const Dataset& data, const ModelSpec& spec) {
    DesignInfo info;
    info.source_columns = data.columns;
    info.design_names.emplace_back("(intercept)");
    for (const auto& term : spec.terms) {
        const int column = data.column_index(term.column);
        if (column == 0) {
            throw DomainError("the intercept column cannot appear as a model term");
        }
        ResolvedTerm resolved;
        resolved.column = column;
        resolved.map = term.map;
        switch (term.map) {
            case FeatureMap::linear:
                info.design_names.push_back(term.column);
                break;
            case FeatureMap::quadratic:
                info.design_names.push_back(term.column);
                info.design_names.push_back(term.column + "^2");
                break;
            case FeatureMap::tercile: {
                const auto& col = data.X.col(column);
                std::vector<double> values(col.data(), col.data() + col.size());
                std::set<double> distinct(values.begin(), values.end());
                if (distinct.size() < 3) {
                    throw EncodingError("tercile encoding of '" + term.column +
                                        "' needs at least 3 distinct values");
                }
                resolved.cut_lo = quantile_type7(values, 1.0 / 3.0);
                resolved.cut_hi = quantile_type7(values, 2.0 / 3.0);
                info.design_names.push_back(term.column + "_t1");
                info.design_names.push_back(term.column + "_t2");
                break;
            }
        }
        info.terms.push_back(resolved);
    }
    return info;
}

Eigen::MatrixXd build_design(const Dataset& data, const DesignInfo& info) {
    if (data.columns != info.source_columns) {
        throw ShapeError("dataset layout differs from the one the model was fitted on");
    }
    const Eigen::Index n = data.n_obs();
    Eigen::MatrixXd design(n, static_cast<Eigen::Index>(info.design_names.size()));
    design.col(0).setOnes();
    Eigen::Index out = 1;
    for (const auto& term : info.terms) {
        const auto& col = data.X.col(term.column);
        switch (term.map) {
            case FeatureMap::linear:
                design.col(out++) = col;
                break;
            case FeatureMap::quadratic:
                design.col(out++) = col;
                design.col(out++) = col.array().square();
                break;
            case FeatureMap::tercile:
                for (Eigen::Index i = 0; i < n; ++i) {
                    design(i, out) = col[i] <= term.cut_lo ? 1.0 : 0.0;
                    design(i, out + 1) =
                        (col[i] > term.cut_lo && col[i] <= term.cut_hi) ? 1.0 : 0.0;
                }
                out += 2;
                break;
        }
    }
    return design;
}

FittedModel fit_logistic(const Dataset& data, const ModelSpec& spec, const FitOptions& options) {
    const DesignInfo info = resolve_design(data, spec);
    const Eigen::MatrixXd design = build_design(data, info);
    const Eigen::Index n = design.rows();
    const Eigen::Index p = design.cols();
    if (n <= p) {
        throw SingularDesignError("need more observations than parameters (n=" +
                                  std::to_string(n) + ", p=" + std::to_string(p) + ")");
    }
    check_full_rank(design, info.design_names);

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd eta = Eigen::VectorXd::Zero(n);
    double loglik = log_likelihood(data.y, eta);
    if (options.loglik_trace) {
        options.loglik_trace->clear();
        options.loglik_trace->push_back(loglik);
    }

    Eigen::VectorXd mu(n);
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        for (Eigen::Index i = 0; i < n; ++i) mu[i] = sigmoid(eta[i]);
        const Eigen::VectorXd score = design.transpose() * (data.y - mu);
        const double score_norm = score.lpNorm<Eigen::Infinity>();

        if (score_norm <= options.gradient_tol) {
            if (perfectly_predicted(data.y, mu)) {
                throw SeparationError(
                    "complete separation: every response predicted exactly, "
                    "likelihood unbounded",
                    to_std(beta));
            }
            FittedModel model;
            model.coefficients = beta;
            model.n_params = static_cast<int>(p);
            model.loglik_contribs.resize(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                model.loglik_contribs[i] = data.y[i] * eta[i] - softplus(eta[i]);
            }
            model.loglik_total = model.loglik_contribs.sum();
            model.aic = -2.0 * model.loglik_total + 2.0 * static_cast<double>(p);
            model.converged = true;
            model.n_obs = static_cast<int>(n);
            model.design = info;
            return model;
        }
        if (beta.lpNorm<Eigen::Infinity>() > options.separation_bound) {
            throw SeparationError(
                "coefficients diverged beyond " + std::to_string(options.separation_bound) +
                    " with the gradient still above tolerance (separation likely)",
                to_std(beta));
        }

        Eigen::VectorXd weights = mu.array() * (1.0 - mu.array());
        weights = weights.cwiseMax(1e-12);
        const Eigen::MatrixXd hessian =
            design.transpose() * weights.asDiagonal() * design;
        Eigen::LLT<Eigen::MatrixXd> llt(hessian);
        Eigen::VectorXd direction;
        if (llt.info() == Eigen::Success) {
            direction = llt.solve(score);
        } else {
            direction = hessian.ldlt().solve(score);
        }
        if (!direction.allFinite()) {
            throw ConvergenceError("Newton direction is not finite", to_std(beta));
        }

        // Step halving keeps the likelihood non-decreasing (it is concave).
        // The slack of a few ulps lets full steps through once improvements
        // drop below representable precision, so the score can still tighten.
        const double slack = 1e-13 * (1.0 + std::fabs(loglik));
        double step = 1.0;
        Eigen::VectorXd beta_next;
        Eigen::VectorXd eta_next;
        double loglik_next = loglik;
        bool improved = false;
        for (int halving = 0; halving <= 30; ++halving) {
            beta_next = beta + step * direction;
            eta_next = design * beta_next;
            loglik_next = log_likelihood(data.y, eta_next);
            if (loglik_next >= loglik - slack) {
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) {
            throw ConvergenceError("step halving failed to improve the likelihood",
                                   to_std(beta));
        }
        beta = beta_next;
        eta = eta_next;
        loglik = loglik_next;
        if (options.loglik_trace) options.loglik_trace->push_back(loglik);
    }

    if (beta.lpNorm<Eigen::Infinity>() > options.separation_bound) {
        throw SeparationError("coefficients diverged without convergence (separation likely)",
                              to_std(beta));
    }
    throw ConvergenceError("no convergence after " + std::to_string(options.max_iterations) +
                               " iterations",
                           to_std(beta));
}

Eigen::VectorXd loglik_contributions(const FittedModel& model, const Dataset& data) {
    const Eigen::MatrixXd design = build_design(data, model.design);
    const Eigen::VectorXd eta = design * model.coefficients;
    Eigen::VectorXd contribs(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        contribs[i] = data.y[i] * eta[i] - softplus(eta[i]);
    }
    return contribs;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> information_matrices(const FittedModel& model,
                                                                 const Dataset& data) {
    const Eigen::MatrixXd design = build_design(data, model.design);
    const Eigen::Index n = design.rows();
    const Eigen::VectorXd eta = design * model.coefficients;
    Eigen::VectorXd w_info(n);
    Eigen::VectorXd w_score(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double mu = sigmoid(eta[i]);
        w_info[i] = mu * (1.0 - mu);
        const double r = data.y[i] - mu;
        w_score[i] = r * r;
    }
    const double scale = 1.0 / static_cast<double>(n);
    Eigen::MatrixXd info_matrix =
        scale * (design.transpose() * w_info.asDiagonal() * design);
    Eigen::MatrixXd score_matrix =
        scale * (design.transpose() * w_score.asDiagonal() * design);
    return {std::move(info_matrix), std::move(score_matrix)};
}

}  // namespace kltrack
