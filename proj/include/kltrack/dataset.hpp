#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace kltrack {

// A binary-response sample. X holds one row per observation; column 0 is the
// intercept column of ones by convention, named "(intercept)". Immutable
// after construction.
struct Dataset {
    Eigen::VectorXd y;                 // responses in {0,1}
    Eigen::MatrixXd X;                 // n x k covariates, column 0 = intercept
    std::vector<std::string> columns;  // k names, columns[0] == "(intercept)"

    Eigen::Index n_obs() const { return X.rows(); }
    Eigen::Index n_columns() const { return X.cols(); }

    // Index of a named column; throws MissingColumnError.
    int column_index(const std::string& name) const;

    // Builds a dataset from covariate columns (intercept prepended here).
    // Validates: matching lengths, n >= 1, finite entries, responses in {0,1}.
    static Dataset from_columns(Eigen::VectorXd y, Eigen::MatrixXd covariates,
                                std::vector<std::string> names);
};

}  // namespace kltrack
