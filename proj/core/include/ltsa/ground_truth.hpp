#pragma once

#include "ltsa/types.hpp"

#include <functional>

namespace ltsa {

/// True generating model of a synthetic dataset: the parameters tau*, the map
/// f with derivative evaluators, and the noise actually added per point.
struct GroundTruth {
    int d = 0;               // intrinsic dimension
    Matrix params;           // d x N matrix of tau*_i
    std::function<Vector(const Vector&)> f;          // tau -> R^m
    std::function<Matrix(const Vector&)> jacobian;   // tau -> m x d
    /// Hessian of component l of f: tau -> d x d.
    std::function<Matrix(const Vector&, int)> hessian;
    bool hessian_analytic = false;  // false: central finite differences
    Matrix noise;            // m x N, the eps*_i actually added (x - f(tau*))
    double noise_level = 0.0;

    bool has_evaluators() const { return static_cast<bool>(f); }
};

/// Central finite-difference Hessian of component `l` built from a Jacobian
/// evaluator, step 1e-4. Result is symmetrized.
inline Matrix fd_hessian(const std::function<Matrix(const Vector&)>& jac,
                         const Vector& tau, int l, double step = 1e-4) {
    const int d = static_cast<int>(tau.size());
    Matrix H(d, d);
    for (int b = 0; b < d; ++b) {
        Vector tp = tau, tm = tau;
        tp[b] += step;
        tm[b] -= step;
        const Matrix jp = jac(tp);
        const Matrix jm = jac(tm);
        for (int a = 0; a < d; ++a)
            H(a, b) = (jp(l, a) - jm(l, a)) / (2.0 * step);
    }
    return 0.5 * (H + H.transpose());
}

}  // namespace ltsa
