#pragma once

#include "ltsa/eigensolver.hpp"
#include "ltsa/neighbors.hpp"
#include "ltsa/tangent.hpp"
#include "ltsa/types.hpp"

#include <Eigen/SparseCore>

#include <memory>
#include <vector>

namespace ltsa {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// The symmetric PSD alignment operator B = sum_i S_i (I - G_i G_i^T) S_i^T
/// held in matrix-free block form; a sparse materialization is built lazily
/// on first request and cached.
class AlignmentOperator : public SymOp {
public:
    struct Block {
        std::vector<Index> indices;  // neighborhood I_i
        Matrix g;                    // k x (d+1) orthonormal factor G_i
    };

    AlignmentOperator(std::vector<Block> blocks, Index n);

    Index dim() const override { return n_; }

    /// y = B v, accumulated block by block in index order (deterministic).
    Vector apply(const Vector& v) const override;

    const SparseMatrix& materialized() const;
    bool is_materialized() const { return mat_ != nullptr; }

    Matrix to_dense() const override { return Matrix(materialized()); }

    /// Gershgorin bound from the materialization when present, otherwise a
    /// fixed-seed power iteration.
    double norm_estimate() const override;

    const std::vector<Block>& blocks() const { return blocks_; }

private:
    std::vector<Block> blocks_;
    Index n_;
    mutable std::unique_ptr<SparseMatrix> mat_;
    mutable double norm_est_ = -1.0;
};

/// Assemble the alignment operator from per-point frames and neighborhoods.
AlignmentOperator build_operator(const std::vector<LocalFrame>& frames,
                                 const NeighborhoodIndex& nbrs, Index N);

/// Global coordinates plus the spectrum used to select them. For operator
/// methods (LTSA, LLE) `eigenvalues` holds the d+1 smallest eigenvalues
/// ascending; for the SVD baseline it holds the leading singular values.
struct Embedding {
    int d = 0;
    Matrix T;  // d x N, rows orthonormal and orthogonal to the all-ones vector
    Vector eigenvalues;
    SolverReport solver_report;
};

struct LtsaOptions {
    SolverOptions solver;
    NeighborOptions neighbors;
    FrameRoute frame_route = FrameRoute::Auto;
};

struct LtsaResult {
    Embedding embedding;
    std::vector<LocalFrame> frames;
    NeighborhoodIndex nbrs;
    std::vector<Index> flagged;  // condition-flagged neighborhoods
};

/// Full pipeline: neighbors -> frames -> operator -> d+1 smallest eigenpairs;
/// T is rows 2..d+1 of the eigenvector matrix, transposed.
LtsaResult ltsa_embed(const DataMatrix& X, Index k, int d, const LtsaOptions& options = {});

/// Linear (affine) model fitted by SVD of the centered data.
struct LinearModel {
    Vector mean;    // x-bar
    Matrix basis;   // m x d orthonormal (U*)
    Vector sigmas;  // top d singular values
};

struct LinearEmbedResult {
    Embedding embedding;
    LinearModel model;
};

/// SVD baseline: T = top-d right singular vectors of X - mean, transposed.
LinearEmbedResult linear_embed(const DataMatrix& X, int d);

}  // namespace ltsa
