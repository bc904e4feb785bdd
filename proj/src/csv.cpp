#include "kltrack/csv.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "kltrack/errors.hpp"

namespace kltrack {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream stream(line);
    while (std::getline(stream, field, ',')) fields.push_back(trim(field));
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_cell(const std::string& cell, long row, const std::string& column) {
    errno = 0;
    char* end = nullptr;
    const double value = std::strtod(cell.c_str(), &end);
    if (cell.empty() || end != cell.c_str() + cell.size() || errno == ERANGE ||
        !std::isfinite(value)) {
        throw ParseError("cannot parse '" + cell + "' as a number (row " + std::to_string(row) +
                         ", column " + column + ")");
    }
    return value;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& response_column) {
    std::ifstream file(path);
    if (!file) throw ParseError("cannot open '" + path + "'");

    std::string line;
    if (!std::getline(file, line)) throw ParseError("'" + path + "' is empty");
    const std::vector<std::string> header = split_fields(line);
    if (header.empty()) throw ParseError("'" + path + "' has an empty header");

    int response_index = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == response_column) response_index = static_cast<int>(i);
    }
    if (response_index < 0) {
        throw MissingColumnError("response column '" + response_column + "' not found in '" +
                                 path + "'");
    }

    std::vector<double> responses;
    std::vector<std::vector<double>> covariates;  // one vector per data row
    long row = 0;
    while (std::getline(file, line)) {
        if (trim(line).empty()) continue;
        ++row;
        const std::vector<std::string> fields = split_fields(line);
        if (fields.size() != header.size()) {
            throw ParseError("row " + std::to_string(row) + " has " +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(header.size()));
        }
        std::vector<double> values;
        values.reserve(header.size() - 1);
        for (std::size_t i = 0; i < fields.size(); ++i) {
            const double value = parse_cell(fields[i], row, header[i]);
            if (static_cast<int>(i) == response_index) {
                if (value != 0.0 && value != 1.0) {
                    throw ParseError("response must be 0 or 1, got '" + fields[i] + "' (row " +
                                     std::to_string(row) + ")");
                }
                responses.push_back(value);
            } else {
                values.push_back(value);
            }
        }
        covariates.push_back(std::move(values));
    }
    if (row == 0) throw ParseError("'" + path + "' contains no data rows");

    Eigen::VectorXd y(row);
    Eigen::MatrixXd x(row, static_cast<Eigen::Index>(header.size() - 1));
    for (long i = 0; i < row; ++i) {
        y[i] = responses[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            x(i, j) = covariates[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
    }
    std::vector<std::string> names;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (static_cast<int>(i) != response_index) names.push_back(header[i]);
    }
    return Dataset::from_columns(std::move(y), std::move(x), std::move(names));
}

void save_csv(const Dataset& data, const std::string& response_name, const std::string& path) {
    std::ofstream file(path);
    if (!file) throw ParseError("cannot write '" + path + "'");

    file << response_name;
    for (Eigen::Index j = 1; j < data.n_columns(); ++j) file << ',' << data.columns[j];
    file << '\n';

    char buffer[40];
    for (Eigen::Index i = 0; i < data.n_obs(); ++i) {
        file << (data.y[i] == 1.0 ? '1' : '0');
        for (Eigen::Index j = 1; j < data.n_columns(); ++j) {
            std::snprintf(buffer, sizeof buffer, "%.17g", data.X(i, j));
            file << ',' << buffer;
        }
        file << '\n';
    }
    if (!file.good()) throw ParseError("write to '" + path + "' failed");
}

}  // namespace kltrack
