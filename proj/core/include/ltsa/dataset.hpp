#pragma once

#include "ltsa/ground_truth.hpp"
#include "ltsa/types.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace ltsa {

/// Names accepted by gen_curve.
const std::vector<std::string>& curve_names();

/// Sample a named 1-D manifold at N parameters uniformly spaced over the
/// curve's interval (both endpoints included) and add noise of level eta.
/// All curves use the additive model x = f(tau) + eta*z with z standard
/// normal, except rel_cubic whose noise is relative: the curve is embedded as
/// (tau, f(tau)) and the ordinate becomes f(tau)*(1 + eta*eps).
/// Draw order: one point at a time, components in order, so results are
/// bitwise reproducible for a fixed (name, N, eta, seed).
std::pair<DataMatrix, GroundTruth> gen_curve(const std::string& name, Index N,
                                             double eta, std::uint64_t seed);

/// The peak height function used by gen_peak_surface.
double peak_height(double t, double s);

/// Sample the peak surface x = (t, s, h(t,s)) + 0.01*eta*z with t, s i.i.d.
/// uniform on [-1,1]. Draws all (t,s) pairs first, then the noise, point by
/// point. The Hessian evaluator is finite-difference (flagged).
std::pair<DataMatrix, GroundTruth> gen_peak_surface(Index N, double eta,
                                                    std::uint64_t seed);

enum class EmbedMode { Orthogonal, Affine };

struct HighDimEmbedding {
    DataMatrix data;   // target_m x N
    Matrix transform;  // target_m x m
};

/// Map src into a target_m-dimensional space. Orthogonal mode draws a seeded
/// Gaussian matrix and orthonormalizes it (distances preserved); affine mode
/// builds U diag(s) V^T with U, V random orthonormal and s i.i.d. uniform(0,1).
HighDimEmbedding embed_highdim(const DataMatrix& src, Index target_m,
                               EmbedMode mode, std::uint64_t seed);

/// Three bivariate Gaussians (covariance 0.2*I2, means [1,1], [1,-1], [-1,0]),
/// n_per points each, labeled 0/1/2 in generation order.
LabeledSet gen_three_gaussians(Index n_per, std::uint64_t seed);

/// Rebuild the f / jacobian / hessian evaluators (and d) for a generator name
/// ("peak" or any curve name). params/noise are left untouched. Used when a
/// dataset is loaded back from disk.
void bind_evaluators(const std::string& generator, GroundTruth& gt);

/// Ground truth for data transformed by x -> M x: evaluators are composed
/// with M and the noise record is mapped into the target space.
GroundTruth transformed_truth(const GroundTruth& base, const Matrix& M);

}  // namespace ltsa
