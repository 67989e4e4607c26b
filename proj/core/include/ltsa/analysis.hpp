#pragma once

#include "ltsa/align.hpp"
#include "ltsa/ground_truth.hpp"
#include "ltsa/neighbors.hpp"
#include "ltsa/tangent.hpp"
#include "ltsa/types.hpp"

#include <string>
#include <vector>

namespace ltsa {

/// Global least-squares affine map A tau + b from computed to true
/// coordinates, with absolute and spread-relative residuals.
struct AffineFit {
    Matrix A;          // d x d
    Vector b;
    double rms = 0.0;      // sqrt(mean ||A tau_i + b - tau*_i||^2)
    double rms_rel = 0.0;  // rms / rms spread of centered T*
    Vector per_point;      // residual norm per point
};

AffineFit affine_align(const Matrix& T, const Matrix& T_star);

/// Numerical evaluation of the alignment-error, nonsingularity and
/// tangent-subspace bounds at one neighborhood.
struct BoundRecord {
    double delta = 0.0;        // curvature term
    double e_star_norm = 0.0;  // ||E*_i||_F
    double e_norm = 0.0;       // ||E_i||_F
    double p_inv_norm = 0.0;   // ||P_i^{-1}||_F
    double alpha = 0.0;
    double sigma_d_jt = 0.0;   // d-th singular value of J~_i
    double cond_jt = 0.0;
    double tangent_err = 0.0;  // ||X_i - (xbar e^T + Q Theta)||_F
    double bound2 = 0.0, bound3 = 0.0, bound4 = 0.0;
    bool sat2 = false, sat3 = false, sat4 = false;
    bool applicable = true;    // P_i nonsingular (alignment bound hypothesis)
    bool applicable34 = true;  // sigma_d(J~_i) > 0 (alpha finite)
};

struct BoundReport {
    std::vector<BoundRecord> records;
    bool hessian_fd = false;  // finite-difference Hessians widen the slack
    double slack = 1e-8;
};

/// Evaluates the three bounds with the true coordinates re-scaled to
/// row-orthonormal form (the normalization the computed embedding satisfies);
/// the Jacobian/Hessian evaluations absorb the re-scaling by the chain rule.
BoundReport theorem_bounds(const DataMatrix& X, const GroundTruth& gt,
                           const std::vector<LocalFrame>& frames, const NeighborhoodIndex& nbrs,
                           const Embedding& embedding);

struct LleOptions {
    double reg = 1e-3;  // Tikhonov weight: reg * trace(G)/k on the Gram diagonal
    SolverOptions solver;
    NeighborOptions neighbors;
};

/// Locally-linear-embedding baseline: reconstruction weights from the
/// regularized local Gram system, embedding from the d+1 smallest eigenpairs
/// of (I-W)^T (I-W) under the same normalization and sign conventions as the
/// tangent-alignment embedding.
struct LleResult {
    Embedding embedding;
    NeighborhoodIndex nbrs;
    SparseMatrix i_minus_w;  // rows of W sum to 1, so (I-W) e = 0
};

LleResult lle_embed(const DataMatrix& X, Index k, int d, const LleOptions& options = {});

/// Best classification accuracy of the labels achievable by splitting the
/// first embedding coordinate into contiguous intervals, one per class
/// (exhaustive threshold search). 1 = perfectly separated.
double cluster_separation(const Matrix& T, const std::vector<int>& labels);

/// CSV serialization with fixed, documented headers.
void save_affine_fit_csv(const std::string& path, const AffineFit& fit);
void save_bound_report_csv(const std::string& path, const BoundReport& report);

}  // namespace ltsa
