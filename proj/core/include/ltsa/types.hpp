#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace ltsa {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Base class for all errors thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid argument / precondition violation (maps to CLI exit code 2).
class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& what) : Error(what) {}
};

/// File / parse problem (maps to CLI exit code 3).
class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(what) {}
};

/// Iterative solver failed to converge (maps to CLI exit code 4).
/// Carries the best residual norms reached for diagnosis.
class SolverError : public Error {
public:
    SolverError(const std::string& what, std::vector<double> residuals)
        : Error(what), best_residuals(std::move(residuals)) {}
    std::vector<double> best_residuals;
};

/// m x N sample set, one data point per column.
struct DataMatrix {
    Matrix values;  // m rows (input dimension), N columns (points)

    DataMatrix() = default;
    explicit DataMatrix(Matrix v) : values(std::move(v)) { validate(); }

    Index m() const { return values.rows(); }
    Index N() const { return values.cols(); }

    void validate() const {
        if (values.rows() < 1 || values.cols() < 1)
            throw InvalidArgument("DataMatrix requires m >= 1 and N >= 1");
        if (!values.allFinite())
            throw InvalidArgument("DataMatrix contains non-finite entries");
    }
};

/// Data plus an optional per-point integer cluster id.
struct LabeledSet {
    DataMatrix data;
    std::vector<int> labels;  // empty, or one entry per column of data

    void validate() const {
        data.validate();
        if (!labels.empty() && static_cast<Index>(labels.size()) != data.N())
            throw InvalidArgument("label count does not match point count");
    }
};

}  // namespace ltsa
