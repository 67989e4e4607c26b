#pragma once

#include "ltsa/neighbors.hpp"
#include "ltsa/types.hpp"

#include <optional>
#include <vector>

namespace ltsa {

/// Per-neighborhood affine model: mean, orthonormal tangent basis, local
/// coordinates, the orthonormal factor used by the alignment operator, and
/// singular-value diagnostics.
struct LocalFrame {
    Vector center;          // neighborhood mean, in R^m
    Matrix basis;           // m x d, orthonormal columns (Q_i)
    Matrix coords;          // d x k local coordinates (Theta_i), centered
    Vector sigmas;          // all min(m,k) singular values, non-increasing
    Matrix g_factor;        // k x (d+1): [e/sqrt(k), g_1..g_d], orthonormal
    Vector residual_norms;  // per neighbor, norm of (I - QQ^T)(x_j - center)
    /// sigma_{d+1}/sigma_d > 0.99: tangent estimate unreliable (noise-dominated
    /// or near a singular point of the generating map).
    bool condition_flag = false;
    /// sigma_d is exactly zero (neighborhood rank below d).
    bool degenerate = false;
};

enum class FrameRoute {
    Auto,  // k < m: Gram eigendecomposition; otherwise thin SVD
    Svd,
    Gram,
};

/// Best rank-d affine fit of the neighborhood X(:, nbrs). Basis columns carry
/// a deterministic sign (largest-magnitude entry positive).
LocalFrame local_frame(const DataMatrix& X, const std::vector<Index>& nbrs, int d,
                       FrameRoute route = FrameRoute::Auto);

/// local_frame for every row of the neighborhood index, in index order.
std::vector<LocalFrame> all_frames(const DataMatrix& X, const NeighborhoodIndex& nbrs, int d,
                                   FrameRoute route = FrameRoute::Auto);

/// Per-point singular value ratios rho_i^(j) = sigma_{j+1,i} / sigma_{j,i}
/// (1-based rank j). A zero denominator yields ratio 0 with the degenerate
/// flag set.
struct RatioProfile {
    Vector ratios;                // one per frame, in [0,1]
    std::vector<char> degenerate; // 1 where sigma_{j,i} == 0
};

RatioProfile singular_ratio_profile(const std::vector<LocalFrame>& frames, int j);

/// Smallest rank j whose median ratio falls below the threshold, or nullopt
/// when no rank qualifies.
std::optional<int> estimate_dim(const std::vector<LocalFrame>& frames, double threshold);

double median(std::vector<double> values);

}  // namespace ltsa
