#include "kltrack/dataset.hpp"

#include <cmath>

#include "kltrack/errors.hpp"

namespace kltrack {

int Dataset::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) return static_cast<int>(i);
    }
    throw MissingColumnError("no column named '" + name + "'");
}

Dataset Dataset::from_columns(Eigen::VectorXd y, Eigen::MatrixXd covariates,
                              std::vector<std::string> names) {
    const Eigen::Index n = y.size();
    if (n < 1) throw ShapeError("dataset must contain at least one observation");
    if (covariates.rows() != n) {
        throw ShapeError("response length and covariate row count differ");
    }
    if (static_cast<Eigen::Index>(names.size()) != covariates.cols()) {
        throw ShapeError("covariate column count and name count differ");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (y[i] != 0.0 && y[i] != 1.0) {
            throw DomainError("responses must be 0 or 1 (observation " + std::to_string(i + 1) +
                              ")");
        }
    }
    if (!covariates.allFinite()) throw DomainError("covariates contain non-finite entries");

    Dataset data;
    data.y = std::move(y);
    data.X.resize(n, covariates.cols() + 1);
    data.X.col(0).setOnes();
    data.X.rightCols(covariates.cols()) = covariates;
    data.columns.reserve(names.size() + 1);
    data.columns.emplace_back("(intercept)");
    for (auto& name : names) data.columns.push_back(std::move(name));
    return data;
}

}  // namespace kltrack
