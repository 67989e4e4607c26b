#pragma once

#include "ltsa/types.hpp"

#include <string>
#include <vector>

namespace ltsa {

struct SolverOptions {
    double tol = 1e-10;          // residual target, relative to the norm estimate
    Index dense_threshold = 2000;  // dim <= threshold uses the dense path
    Index max_iter = 0;          // Lanczos step cap; 0 means 300 * count
    enum class Method { Auto, Dense, Lanczos } method = Method::Auto;
};

struct SolverReport {
    std::string method;              // dense | lanczos | svd
    Index iterations = 0;
    std::vector<double> residuals;   // actual ||B u - lambda u|| per returned pair
    double norm_estimate = 0.0;
    bool degenerate_gap = false;     // near-equal trailing eigenvalues
    std::vector<std::string> warnings;
    std::vector<std::pair<std::string, std::string>> extras;  // extra key=value entries

    std::string to_key_values() const;
};

/// Symmetric linear operator seen by the eigensolver.
class SymOp {
public:
    virtual ~SymOp() = default;
    virtual Index dim() const = 0;
    virtual Vector apply(const Vector& v) const = 0;
    virtual Matrix to_dense() const = 0;
    virtual double norm_estimate() const = 0;
};

/// Deterministic 2-norm estimate by a fixed-seed power iteration.
double power_norm_estimate(const SymOp& op, int steps = 30);

struct EigResult {
    Vector values;   // count entries, ascending
    Matrix vectors;  // dim x count, orthonormal, largest-magnitude entry positive
    SolverReport report;
};

/// The `count` smallest eigenpairs of a symmetric PSD operator. Below the
/// dense threshold a full symmetric eigendecomposition is used; above it (or
/// when forced) Lanczos runs on mu*I - B with full reorthogonalization, and
/// the all-ones direction is deflated explicitly whenever it is a null vector
/// of the operator. Throws SolverError with the best residuals on
/// non-convergence.
EigResult smallest_eigenpairs(const SymOp& op, Index count, const SolverOptions& opts = {});

}  // namespace ltsa
