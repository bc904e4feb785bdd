#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "kltrack/dataset.hpp"

namespace kltrack {

// Feature expansion applied to one covariate column when building a design.
//   linear    -> x
//   quadratic -> x, x^2
//   tercile   -> indicator(x <= c1), indicator(c1 < x <= c2) with c1, c2 the
//                empirical 1/3 and 2/3 quantiles (type 7); the upper third is
//                the reference category and ties at a cut go to the lower one.
enum class FeatureMap { linear, quadratic, tercile };

const char* to_string(FeatureMap map);

struct ModelTerm {
    std::string column;
    FeatureMap map = FeatureMap::linear;
};

// Intercept is always included and never listed among the terms.
struct ModelSpec {
    std::vector<ModelTerm> terms;
};

// A term with its encoding frozen (tercile cuts resolved against the data the
// model was fitted on), so the same design can be rebuilt later.
struct ResolvedTerm {
    int column = 0;
    FeatureMap map = FeatureMap::linear;
    double cut_lo = 0.0;
    double cut_hi = 0.0;
};

struct DesignInfo {
    std::vector<ResolvedTerm> terms;
    std::vector<std::string> design_names;    // includes "(intercept)"
    std::vector<std::string> source_columns;  // layout the model was fitted on
};

struct FitOptions {
    int max_iterations = 200;
    double gradient_tol = 1e-8;       // max-norm of the score at the solution
    double separation_bound = 30.0;   // |coefficient| beyond any real signal
    std::vector<double>* loglik_trace = nullptr;  // per-iteration values, for tests
};

// A fitted logistic model together with everything comparisons need.
struct FittedModel {
    Eigen::VectorXd coefficients;
    int n_params = 0;
    double loglik_total = 0.0;
    Eigen::VectorXd loglik_contribs;  // per-observation log-density values
    double aic = 0.0;
    bool converged = false;
    int n_obs = 0;
    DesignInfo design;
};

// Type-7 quantile (linear interpolation between order statistics) of the
// given values at probability p in [0,1].
double quantile_type7(std::vector<double> values, double p);

// Freezes the encodings of a model against a dataset. Tercile terms need at
// least three distinct values in their column.
DesignInfo resolve_design(const Dataset& data, const ModelSpec& spec);

// Materializes the design matrix (intercept first). Throws ShapeError if the
// dataset layout differs from the one the design was resolved on.
Eigen::MatrixXd build_design(const Dataset& data, const DesignInfo& info);

// Maximum-likelihood fit of the Bernoulli-logit model by Newton-Raphson with
// step halving, started at zero. Errors: SingularDesignError on rank-deficient
// designs, SeparationError when the likelihood has no finite maximizer,
// ConvergenceError when iterations run out.
FittedModel fit_logistic(const Dataset& data, const ModelSpec& spec,
                         const FitOptions& options = {});

// Per-observation log-likelihood contributions of a fitted model evaluated on
// a dataset with the same layout: y*eta - log(1 + exp(eta)).
Eigen::VectorXd loglik_contributions(const FittedModel& model, const Dataset& data);

// Sandwich ingredients evaluated at the fit, both scaled by 1/n:
//   I = X' diag(mu (1-mu)) X / n      (information)
//   J = X' diag((y - mu)^2) X / n     (outer score)
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> information_matrices(const FittedModel& model,
                                                                 const Dataset& data);

}  // namespace kltrack
