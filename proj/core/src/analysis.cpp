#include "ltsa/analysis.hpp"

#include "ltsa/reconstruct.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>

namespace ltsa {

AffineFit affine_align(const Matrix& T, const Matrix& T_star) {
    if (T.rows() != T_star.rows() || T.cols() != T_star.cols())
        throw InvalidArgument("affine_align: shape mismatch");
    const Index d = T.rows(), n = T.cols();
    if (n < d + 1) throw InvalidArgument("affine_align requires N >= d+1");

    Matrix design(n, d + 1);
    design.leftCols(d) = T.transpose();
    design.col(d).setOnes();
    Eigen::ColPivHouseholderQR<Matrix> qr(design);
    if (qr.rank() < d + 1)
        throw InvalidArgument("affine_align: rank-deficient computed coordinates");
    const Matrix beta = qr.solve(T_star.transpose());  // (d+1) x d

    AffineFit fit;
    fit.A = beta.topRows(d).transpose();
    fit.b = beta.row(d).transpose();
    fit.per_point.resize(n);
    double ss = 0.0;
    for (Index i = 0; i < n; ++i) {
        const double r = (fit.A * T.col(i) + fit.b - T_star.col(i)).norm();
        fit.per_point[i] = r;
        ss += r * r;
    }
    fit.rms = std::sqrt(ss / static_cast<double>(n));
    const Vector mean_star = T_star.rowwise().mean();
    const double spread =
        std::sqrt((T_star.colwise() - mean_star).squaredNorm() / static_cast<double>(n));
    fit.rms_rel = spread > 0.0 ? fit.rms / spread : fit.rms;
    return fit;
}

namespace {

double spectral_norm_sym(const Matrix& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(h, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().cwiseAbs().maxCoeff();
}

// Symmetric inverse square root of the centered Gram of the true parameters,
// giving the map that makes T* row-orthonormal.
void orthonormalizing_map(const Matrix& params, Matrix& A, Matrix& A_inv, Matrix& t_star) {
    const Vector mean = params.rowwise().mean();
    const Matrix centered = params.colwise() - mean;
    const Matrix gram = centered * centered.transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
    if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0)
        throw InvalidArgument("theorem_bounds: true parameters are rank-deficient");
    const Vector inv_sqrt = eig.eigenvalues().cwiseSqrt().cwiseInverse();
    A = eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().transpose();
    A_inv = eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().asDiagonal() *
            eig.eigenvectors().transpose();
    t_star = A * centered;
}

}  // namespace

BoundReport theorem_bounds(const DataMatrix& X, const GroundTruth& gt,
                           const std::vector<LocalFrame>& frames, const NeighborhoodIndex& nbrs,
                           const Embedding& embedding) {
    if (!gt.has_evaluators())
        throw InvalidArgument("theorem_bounds requires ground truth with derivative evaluators");
    const Index n = X.N();
    if (static_cast<Index>(frames.size()) != n || nbrs.size() != n || embedding.T.cols() != n)
        throw InvalidArgument("theorem_bounds: inputs come from different pipeline runs");
    if (embedding.d != gt.d)
        throw InvalidArgument("theorem_bounds: embedding dimension does not match ground truth");
    const int d = embedding.d;
    const Index m = X.m();

    Matrix A, A_inv, t_star;
    orthonormalizing_map(gt.params, A, A_inv, t_star);

    BoundReport report;
    report.hessian_fd = !gt.hessian_analytic;
    report.slack = gt.hessian_analytic ? 1e-8 : 1e-4;
    report.records.resize(static_cast<std::size_t>(n));

    // Dataset-wide scale for the P-singularity flag: a P_i whose smallest
    // singular value is negligible against the largest P seen anywhere makes
    // the alignment bound vacuous (the nonsingularity hypothesis fails).
    double p_scale = 0.0;

    for (Index i = 0; i < n; ++i) {
        const auto& idx = nbrs.sets[static_cast<std::size_t>(i)];
        const Index k = static_cast<Index>(idx.size());
        const LocalFrame& frame = frames[static_cast<std::size_t>(i)];
        BoundRecord& rec = report.records[static_cast<std::size_t>(i)];

        // Raw-parameter neighborhood mean: the evaluation point for J and H.
        Vector tau_bar_raw = Vector::Zero(gt.params.rows());
        for (Index j = 0; j < k; ++j) tau_bar_raw += gt.params.col(idx[j]);
        tau_bar_raw /= static_cast<double>(k);

        // Neighborhood slices in computed and re-scaled true coordinates.
        Matrix ti(d, k), ti_star(d, k);
        Matrix e_star(m, k);
        for (Index j = 0; j < k; ++j) {
            ti.col(j) = embedding.T.col(idx[j]);
            ti_star.col(j) = t_star.col(idx[j]);
            e_star.col(j) = gt.noise.col(idx[j]);
        }
        const Vector ti_mean = ti.rowwise().mean();
        const Matrix ti_centered = ti.colwise() - ti_mean;
        const Vector star_mean = ti_star.rowwise().mean();
        const Matrix star_centered = ti_star.colwise() - star_mean;

        rec.e_star_norm = e_star.norm();
        const Matrix L = optimal_alignment(frame.coords, ti_centered);
        rec.e_norm = (ti_centered - L * frame.coords).norm();
        rec.tangent_err = frame.residual_norms.norm();

        // Chain rule through the re-scaling tau~ = A (tau - mean).
        const Matrix jac = gt.jacobian(tau_bar_raw) * A_inv;  // m x d
        double hess_sq = 0.0;
        for (Index l = 0; l < m; ++l) {
            const Matrix h = A_inv.transpose() * gt.hessian(tau_bar_raw, static_cast<int>(l)) *
                             A_inv;
            const double s = spectral_norm_sym(h);
            hess_sq += s * s;
        }
        double dist4 = 0.0;
        for (Index j = 0; j < k; ++j) {
            const double sq = star_centered.col(j).squaredNorm();
            dist4 += sq * sq;
        }
        rec.delta = std::sqrt(hess_sq * dist4);

        // P_i = Q_i^T J and its inverse norm via SVD.
        const Matrix p = frame.basis.transpose() * jac;  // d x d
        Eigen::JacobiSVD<Matrix> psvd(p);
        const double p_min = psvd.singularValues()[d - 1];
        p_scale = std::max(p_scale, psvd.singularValues()[0]);
        rec.p_inv_norm = p_min > 0.0
                             ? std::sqrt(psvd.singularValues().cwiseInverse().squaredNorm())
                             : std::numeric_limits<double>::infinity();
        rec.applicable = p_min > 0.0;  // refined against p_scale below

        // J~_i = J * T*_i (I - ee^T/k).
        const Matrix jt = jac * star_centered;
        Eigen::JacobiSVD<Matrix> jtsvd(jt);
        rec.sigma_d_jt = jtsvd.singularValues()[d - 1];
        rec.applicable34 = rec.sigma_d_jt > 0.0;
        rec.cond_jt = rec.applicable34 ? jtsvd.singularValues()[0] / rec.sigma_d_jt : 0.0;

        if (rec.applicable34) {
            rec.alpha = 4.0 * (rec.e_star_norm + rec.delta) / rec.sigma_d_jt;
            Eigen::JacobiSVD<Matrix> jsvd(jac);
            double jpinv_sq = 0.0;
            for (Index t = 0; t < jsvd.singularValues().size(); ++t) {
                const double s = jsvd.singularValues()[t];
                if (s > 0.0) jpinv_sq += 1.0 / (s * s);
            }
            rec.bound3 = std::sqrt(1.0 + rec.alpha * rec.alpha) * std::sqrt(jpinv_sq);
            rec.bound4 = (1.0 + 4.0 * (1.0 + rec.alpha * rec.alpha) * rec.cond_jt) *
                         (rec.e_star_norm + rec.delta);
            rec.sat4 = rec.tangent_err <= rec.bound4 + report.slack;
        }
    }

    for (auto& rec : report.records) {
        rec.applicable = rec.applicable && std::isfinite(rec.p_inv_norm) &&
                         1.0 / rec.p_inv_norm > 1e-12 * p_scale;
        if (rec.applicable) {
            rec.bound2 = rec.p_inv_norm * (rec.delta + rec.e_star_norm);
            rec.sat2 = rec.e_norm <= rec.bound2 + report.slack;
        }
        rec.sat3 = !rec.applicable || !rec.applicable34 ||
                   rec.p_inv_norm <= rec.bound3 + report.slack;
    }
    return report;
}

namespace {

class SparseSymOp : public SymOp {
public:
    explicit SparseSymOp(SparseMatrix m) : mat_(std::move(m)) {}
    Index dim() const override { return mat_.rows(); }
    Vector apply(const Vector& v) const override { return mat_ * v; }
    Matrix to_dense() const override { return Matrix(mat_); }
    double norm_estimate() const override {
        Vector row_sums = Vector::Zero(mat_.rows());
        for (int outer = 0; outer < mat_.outerSize(); ++outer)
            for (SparseMatrix::InnerIterator it(mat_, outer); it; ++it)
                row_sums[it.row()] += std::abs(it.value());
        return row_sums.maxCoeff();
    }

private:
    SparseMatrix mat_;
};

}  // namespace

LleResult lle_embed(const DataMatrix& X, Index k, int d, const LleOptions& options) {
    const Index n = X.N();
    if (k <= 1 || k > n) throw InvalidArgument("lle_embed requires 1 < k <= N");
    if (d < 1 || d >= k) throw InvalidArgument("lle_embed requires 1 <= d < k");

    LleResult result;
    result.nbrs = knn_tree(X, k, options.neighbors);

    // Reconstruction weights over the k-1 non-self neighbors of each row.
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(n * k));
    const Index kn = k - 1;
    for (Index i = 0; i < n; ++i) {
        const auto& idx = result.nbrs.sets[static_cast<std::size_t>(i)];
        Matrix diff(X.m(), kn);
        for (Index j = 0; j < kn; ++j) diff.col(j) = X.values.col(idx[j + 1]) - X.values.col(i);
        Matrix gram = diff.transpose() * diff;
        const double tr = gram.trace();
        Vector w;
        if (tr > 0.0) {
            gram.diagonal().array() += options.reg * tr / static_cast<double>(k);
            w = gram.ldlt().solve(Vector::Ones(kn));
        } else {
            w = Vector::Ones(kn);
        }
        const double sum = w.sum();
        if (sum == 0.0 || !std::isfinite(sum))
            w = Vector::Constant(kn, 1.0 / static_cast<double>(kn));
        else
            w /= sum;
        triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
        for (Index j = 0; j < kn; ++j)
            triplets.emplace_back(static_cast<int>(i), static_cast<int>(idx[j + 1]), -w[j]);
    }
    result.i_minus_w.resize(n, n);
    result.i_minus_w.setFromTriplets(triplets.begin(), triplets.end());
    SparseMatrix mat = SparseMatrix(result.i_minus_w.transpose()) * result.i_minus_w;
    mat.makeCompressed();
    SparseSymOp op(std::move(mat));

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
    return result;
}

double cluster_separation(const Matrix& T, const std::vector<int>& labels) {
    const Index n = T.cols();
    if (static_cast<Index>(labels.size()) != n)
        throw InvalidArgument("cluster_separation: label count mismatch");
    std::set<int> distinct(labels.begin(), labels.end());
    if (distinct.size() < 2)
        throw InvalidArgument("cluster_separation requires at least two classes");
    if (distinct.size() > 16)
        throw InvalidArgument("cluster_separation supports at most 16 classes");
    const int C = static_cast<int>(distinct.size());
    std::vector<int> class_ids(distinct.begin(), distinct.end());

    // Sort points along the first coordinate (ties by index).
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        return T(0, a) < T(0, b) || (T(0, a) == T(0, b) && a < b);
    });

    // prefix[c][p] = count of class c among the first p sorted points.
    std::vector<std::vector<int>> prefix(C, std::vector<int>(n + 1, 0));
    for (Index p = 0; p < n; ++p) {
        const int lab = labels[static_cast<std::size_t>(order[p])];
        const int c = static_cast<int>(
            std::lower_bound(class_ids.begin(), class_ids.end(), lab) - class_ids.begin());
        for (int cc = 0; cc < C; ++cc)
            prefix[cc][p + 1] = prefix[cc][p] + (cc == c ? 1 : 0);
    }

    // Partition the sorted sequence into contiguous intervals, each class used
    // at most once; dp[pos][mask] = best correct count for points[pos..).
    const int masks = 1 << C;
    std::vector<std::vector<int>> dp(static_cast<std::size_t>(n + 1),
                                     std::vector<int>(masks, -1));
    for (int mask = 0; mask < masks; ++mask) dp[static_cast<std::size_t>(n)][mask] = 0;
    for (Index pos = n; pos-- > 0;) {
        for (int mask = 0; mask < masks; ++mask) {
            int best = -1;
            for (int c = 0; c < C; ++c) {
                if (mask & (1 << c)) continue;
                for (Index end = pos + 1; end <= n; ++end) {
                    const int tail = dp[static_cast<std::size_t>(end)][mask | (1 << c)];
                    if (tail < 0) continue;
                    const int correct = prefix[c][end] - prefix[c][pos] + tail;
                    best = std::max(best, correct);
                }
            }
            dp[static_cast<std::size_t>(pos)][mask] = best;
        }
    }
    const int correct = dp[0][0];
    if (correct < 0) throw Error("cluster_separation: infeasible partition");
    return static_cast<double>(correct) / static_cast<double>(n);
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void save_affine_fit_csv(const std::string& path, const AffineFit& fit) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path);
    out << "i,residual\n";
    for (Index i = 0; i < fit.per_point.size(); ++i)
        out << i << ',' << fmt(fit.per_point[i]) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

void save_bound_report_csv(const std::string& path, const BoundReport& report) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path);
    out << "i,delta,e_star_norm,e_norm,p_inv_norm,alpha,sigma_d_jt,cond_jt,tangent_err,"
           "bound2,bound3,bound4,sat2,sat3,sat4,applicable,applicable34\n";
    for (std::size_t i = 0; i < report.records.size(); ++i) {
        const BoundRecord& r = report.records[i];
        out << i << ',' << fmt(r.delta) << ',' << fmt(r.e_star_norm) << ',' << fmt(r.e_norm)
            << ',' << fmt(r.p_inv_norm) << ',' << fmt(r.alpha) << ',' << fmt(r.sigma_d_jt) << ','
            << fmt(r.cond_jt) << ',' << fmt(r.tangent_err) << ',' << fmt(r.bound2) << ','
            << fmt(r.bound3) << ',' << fmt(r.bound4) << ',' << (r.sat2 ? 1 : 0) << ','
            << (r.sat3 ? 1 : 0) << ',' << (r.sat4 ? 1 : 0) << ',' << (r.applicable ? 1 : 0) << ','
            << (r.applicable34 ? 1 : 0) << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace ltsa
