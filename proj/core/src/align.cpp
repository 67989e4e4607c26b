#include "ltsa/align.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <sstream>

namespace ltsa {

AlignmentOperator::AlignmentOperator(std::vector<Block> blocks, Index n)
    : blocks_(std::move(blocks)), n_(n) {
    if (n_ < 1) throw InvalidArgument("AlignmentOperator requires n >= 1");
    for (const auto& b : blocks_) {
        if (static_cast<Index>(b.indices.size()) != b.g.rows())
            throw InvalidArgument("block index list does not match its G factor");
        for (Index idx : b.indices)
            if (idx < 0 || idx >= n_) throw InvalidArgument("block index out of range");
    }
}

Vector AlignmentOperator::apply(const Vector& v) const {
    if (v.size() != n_)
        throw InvalidArgument("AlignmentOperator::apply: vector length mismatch");
    Vector y = Vector::Zero(n_);
    Vector u, w;
    for (const auto& block : blocks_) {
        const Index k = static_cast<Index>(block.indices.size());
        u.resize(k);
        for (Index j = 0; j < k; ++j) u[j] = v[block.indices[j]];
        w = u - block.g * (block.g.transpose() * u);
        for (Index j = 0; j < k; ++j) y[block.indices[j]] += w[j];
    }
    return y;
}

const SparseMatrix& AlignmentOperator::materialized() const {
    if (mat_ == nullptr) {
        std::vector<Eigen::Triplet<double>> triplets;
        std::size_t nnz = 0;
        for (const auto& block : blocks_) nnz += block.indices.size() * block.indices.size();
        triplets.reserve(nnz);
        for (const auto& block : blocks_) {
            const Index k = static_cast<Index>(block.indices.size());
            const Matrix local = Matrix::Identity(k, k) - block.g * block.g.transpose();
            for (Index a = 0; a < k; ++a)
                for (Index b = 0; b < k; ++b)
                    triplets.emplace_back(static_cast<int>(block.indices[a]),
                                          static_cast<int>(block.indices[b]), local(a, b));
        }
        auto mat = std::make_unique<SparseMatrix>(n_, n_);
        mat->setFromTriplets(triplets.begin(), triplets.end());
        mat->makeCompressed();
        mat_ = std::move(mat);
    }
    return *mat_;
}

double AlignmentOperator::norm_estimate() const {
    if (norm_est_ >= 0.0) return norm_est_;
    if (mat_ != nullptr) {
        Vector row_sums = Vector::Zero(n_);
        for (int outer = 0; outer < mat_->outerSize(); ++outer)
            for (SparseMatrix::InnerIterator it(*mat_, outer); it; ++it)
                row_sums[it.row()] += std::abs(it.value());
        norm_est_ = row_sums.maxCoeff();
    } else {
        norm_est_ = power_norm_estimate(*this);
    }
    return norm_est_;
}

AlignmentOperator build_operator(const std::vector<LocalFrame>& frames,
                                 const NeighborhoodIndex& nbrs, Index N) {
    if (static_cast<Index>(frames.size()) != nbrs.size())
        throw InvalidArgument("build_operator: frame count does not match neighborhood count");
    std::vector<AlignmentOperator::Block> blocks;
    blocks.reserve(frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) {
        if (static_cast<Index>(nbrs.sets[i].size()) != frames[i].g_factor.rows())
            throw InvalidArgument("build_operator: neighborhood " + std::to_string(i) +
                                  " size does not match its frame");
        blocks.push_back({nbrs.sets[i], frames[i].g_factor});
    }
    return AlignmentOperator(std::move(blocks), N);
}

LtsaResult ltsa_embed(const DataMatrix& X, Index k, int d, const LtsaOptions& options) {
    const Index n = X.N();
    if (k <= 1 || k > n) throw InvalidArgument("ltsa_embed requires 1 < k <= N");
    if (d < 1 || d > k - 1) throw InvalidArgument("ltsa_embed requires 1 <= d <= k-1");

    LtsaResult result;
    result.nbrs = knn_tree(X, k, options.neighbors);
    result.frames = all_frames(X, result.nbrs, d, options.frame_route);
    for (std::size_t i = 0; i < result.frames.size(); ++i)
        if (result.frames[i].condition_flag) result.flagged.push_back(static_cast<Index>(i));

    const AlignmentOperator op = build_operator(result.frames, result.nbrs, n);
    // One extra pair beyond d+1 exposes the eigengap for the degeneracy check.
    const Index count = std::min<Index>(d + 2, n);
    EigResult eig = smallest_eigenpairs(op, count, options.solver);

    Embedding& emb = result.embedding;
    emb.d = d;
    emb.T.resize(d, n);
    for (int r = 0; r < d; ++r) emb.T.row(r) = eig.vectors.col(r + 1).transpose();
    emb.eigenvalues = eig.values.head(std::min<Index>(d + 1, count));
    emb.solver_report = std::move(eig.report);
    if (count == d + 2) {
        const double next = eig.values[d + 1];
        if (next <= 0.0 || (next - eig.values[d]) / next < 1e-6) {
            emb.solver_report.degenerate_gap = true;
            emb.solver_report.warnings.push_back(
                "near-degenerate eigengap beyond the embedding subspace");
        }
    }
    if (!result.flagged.empty())
        emb.solver_report.warnings.push_back(std::to_string(result.flagged.size()) +
                                             " condition-flagged neighborhoods");
    return result;
}

LinearEmbedResult linear_embed(const DataMatrix& X, int d) {
    const Index m = X.m(), n = X.N();
    if (d < 1 || d > std::min(m, n))
        throw InvalidArgument("linear_embed requires 1 <= d <= min(m, N)");

    LinearEmbedResult result;
    result.model.mean = X.values.rowwise().mean();
    const Matrix centered = X.values.colwise() - result.model.mean;
    Eigen::BDCSVD<Matrix> svd(centered, Eigen::ComputeThinU | Eigen::ComputeThinV);

    Matrix u = svd.matrixU().leftCols(d);
    Matrix v = svd.matrixV().leftCols(d);
    // Deterministic sign: largest-magnitude entry of each coordinate row
    // (right singular vector) positive; the basis flips jointly.
    for (int j = 0; j < d; ++j) {
        Index best = 0;
        double best_abs = -1.0;
        for (Index i = 0; i < n; ++i) {
            const double a = std::abs(v(i, j));
            if (a > best_abs) {
                best_abs = a;
                best = i;
            }
        }
        if (v(best, j) < 0.0) {
            v.col(j) = -v.col(j);
            u.col(j) = -u.col(j);
        }
    }
    result.model.basis = u;
    result.model.sigmas = svd.singularValues().head(d);

    Embedding& emb = result.embedding;
    emb.d = d;
    emb.T = v.transpose();
    const Index lead = std::min<Index>(d + 1, svd.singularValues().size());
    emb.eigenvalues = svd.singularValues().head(lead);
    emb.solver_report.method = "svd";
    if (lead == d + 1 && result.model.sigmas[d - 1] > 0.0) {
        std::ostringstream gap;
        gap.precision(17);
        gap << svd.singularValues()[d] / result.model.sigmas[d - 1];
        emb.solver_report.extras.emplace_back("sigma_gap", gap.str());
    }
    return result;
}

}  // namespace ltsa
