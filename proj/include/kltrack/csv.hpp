#pragma once

#include <string>

#include "kltrack/dataset.hpp"

namespace kltrack {

// Reads a comma-separated file with a header row. The named response column
// must hold 0/1 values; every other column is parsed as a real covariate.
// Errors name the offending row (1-based, excluding the header) and column.
Dataset load_csv(const std::string& path, const std::string& response_column);

// Writes the dataset back out (response first, covariates after, intercept
// column omitted) with full double precision, so a reload is lossless.
void save_csv(const Dataset& data, const std::string& response_name, const std::string& path);

}  // namespace kltrack
