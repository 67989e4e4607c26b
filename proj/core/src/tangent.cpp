#include "ltsa/tangent.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace ltsa {

namespace {

// Largest-magnitude entry positive; on magnitude ties the earliest entry
// decides. Returns the sign applied.
double fix_sign(Eigen::Ref<Vector> v) {
    Index best = 0;
    double best_abs = -1.0;
    for (Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v[i]);
        if (a > best_abs) {
            best_abs = a;
            best = i;
        }
    }
    if (v[best] < 0.0) {
        v = -v;
        return -1.0;
    }
    return 1.0;
}

struct ThinSvd {
    Matrix u;      // m x d
    Matrix v;      // k x d
    Vector sigmas; // min(m,k), non-increasing
};

ThinSvd svd_route(const Matrix& centered, int d) {
    Eigen::JacobiSVD<Matrix> svd(centered, Eigen::ComputeThinU | Eigen::ComputeThinV);
    ThinSvd out;
    out.sigmas = svd.singularValues();
    out.u = svd.matrixU().leftCols(d);
    out.v = svd.matrixV().leftCols(d);
    return out;
}

ThinSvd gram_route(const Matrix& centered, int d) {
    const Index k = centered.cols();
    const Matrix gram = centered.transpose() * centered;  // k x k
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
    if (eig.info() != Eigen::Success)
        throw Error("eigendecomposition of the neighborhood Gram matrix failed");
    // Eigenvalues come back ascending; flip to singular-value order.
    ThinSvd out;
    out.sigmas.resize(k);
    for (Index j = 0; j < k; ++j)
        out.sigmas[j] = std::sqrt(std::max(0.0, eig.eigenvalues()[k - 1 - j]));
    out.v.resize(k, d);
    out.u.resize(centered.rows(), d);
    for (int j = 0; j < d; ++j) {
        out.v.col(j) = eig.eigenvectors().col(k - 1 - j);
        if (out.sigmas[j] > 0.0)
            out.u.col(j) = centered * out.v.col(j) / out.sigmas[j];
        else
            out.u.col(j).setZero();
    }
    return out;
}

}  // namespace

LocalFrame local_frame(const DataMatrix& X, const std::vector<Index>& nbrs, int d,
                       FrameRoute route) {
    const Index k = static_cast<Index>(nbrs.size());
    const Index m = X.m();
    if (k < 2) throw InvalidArgument("local_frame requires a neighborhood of size >= 2");
    if (d < 1) throw InvalidArgument("local_frame requires d >= 1");
    if (d > m) throw InvalidArgument("local_frame: d exceeds the input dimension");
    if (d > k - 1)
        throw InvalidArgument("rank-deficient neighborhood at point " +
                              std::to_string(nbrs.empty() ? -1 : nbrs[0]) +
                              ": d > k-1 (d=" + std::to_string(d) +
                              ", k=" + std::to_string(k) + ")");

    Matrix xi(m, k);
    for (Index j = 0; j < k; ++j) {
        if (nbrs[j] < 0 || nbrs[j] >= X.N())
            throw InvalidArgument("neighbor index out of range");
        xi.col(j) = X.values.col(nbrs[j]);
    }

    LocalFrame frame;
    frame.center = xi.rowwise().mean();
    const Matrix centered = xi.colwise() - frame.center;

    bool use_gram = route == FrameRoute::Gram || (route == FrameRoute::Auto && k < m);
    ThinSvd svd = use_gram ? gram_route(centered, d) : svd_route(centered, d);
    // The Gram route divides by sigma; near rank deficiency the left vectors
    // lose orthonormality, so redo via the SVD which stays well defined.
    if (use_gram && route == FrameRoute::Auto &&
        !(svd.sigmas[d - 1] > 1e-10 * std::max(svd.sigmas[0], 0.0) && svd.sigmas[d - 1] > 0.0))
        svd = svd_route(centered, d);

    for (int j = 0; j < d; ++j) {
        const double s = fix_sign(svd.u.col(j));
        if (s < 0.0) svd.v.col(j) = -svd.v.col(j);
    }

    frame.basis = svd.u;
    frame.sigmas = svd.sigmas;
    frame.coords = frame.basis.transpose() * centered;

    // G_i = [e/sqrt(k), g_1..g_d]; one re-orthogonalization pass absorbs the
    // roundoff in Theta_i * e = 0.
    frame.g_factor.resize(k, d + 1);
    frame.g_factor.col(0).setConstant(1.0 / std::sqrt(static_cast<double>(k)));
    for (int j = 0; j < d; ++j) {
        Vector g = svd.v.col(j);
        for (int p = 0; p < j + 1; ++p) {
            const Vector& prev = frame.g_factor.col(p);
            g -= prev.dot(g) * prev;
        }
        const double norm = g.norm();
        if (norm > 0.0) g /= norm;
        frame.g_factor.col(j + 1) = g;
    }

    frame.residual_norms.resize(k);
    const Matrix reconstructed = frame.basis * frame.coords;
    for (Index j = 0; j < k; ++j)
        frame.residual_norms[j] = (centered.col(j) - reconstructed.col(j)).norm();

    if (frame.sigmas[d - 1] <= 0.0) {
        frame.degenerate = true;
        frame.condition_flag = true;
    } else if (d < frame.sigmas.size()) {
        frame.condition_flag = frame.sigmas[d] / frame.sigmas[d - 1] > 0.99;
    }
    return frame;
}

std::vector<LocalFrame> all_frames(const DataMatrix& X, const NeighborhoodIndex& nbrs, int d,
                                   FrameRoute route) {
    std::vector<LocalFrame> frames;
    frames.reserve(nbrs.sets.size());
    for (std::size_t i = 0; i < nbrs.sets.size(); ++i) {
        try {
            frames.push_back(local_frame(X, nbrs.sets[i], d, route));
        } catch (const InvalidArgument& e) {
            throw InvalidArgument("frame " + std::to_string(i) + ": " + e.what());
        }
    }
    return frames;
}

RatioProfile singular_ratio_profile(const std::vector<LocalFrame>& frames, int j) {
    if (frames.empty()) throw InvalidArgument("singular_ratio_profile: no frames");
    if (j < 1 || j + 1 > frames.front().sigmas.size())
        throw InvalidArgument("singular_ratio_profile: rank j out of range");
    RatioProfile profile;
    profile.ratios.resize(static_cast<Index>(frames.size()));
    profile.degenerate.assign(frames.size(), 0);
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const Vector& s = frames[i].sigmas;
        if (s[j - 1] <= 0.0) {
            profile.ratios[static_cast<Index>(i)] = 0.0;
            profile.degenerate[i] = 1;
        } else {
            profile.ratios[static_cast<Index>(i)] = s[j] / s[j - 1];
        }
    }
    return profile;
}

std::optional<int> estimate_dim(const std::vector<LocalFrame>& frames, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0))
        throw InvalidArgument("estimate_dim: threshold must lie in (0,1)");
    if (frames.empty()) throw InvalidArgument("estimate_dim: no frames");
    const int max_rank = static_cast<int>(frames.front().sigmas.size()) - 1;
    for (int j = 1; j <= max_rank; ++j) {
        const RatioProfile profile = singular_ratio_profile(frames, j);
        std::vector<double> r(profile.ratios.data(), profile.ratios.data() + profile.ratios.size());
        if (median(std::move(r)) < threshold) return j;
    }
    return std::nullopt;
}

double median(std::vector<double> values) {
    if (values.empty()) throw InvalidArgument("median of empty range");
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + mid, values.end());
    double hi = values[mid];
    if (values.size() % 2 == 1) return hi;
    double lo = *std::max_element(values.begin(), values.begin() + mid);
    return 0.5 * (lo + hi);
}

}  // namespace ltsa
