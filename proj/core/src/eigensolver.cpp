#include "ltsa/eigensolver.hpp"

#include "ltsa/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ltsa {

namespace {

void fix_sign_column(Eigen::Ref<Matrix> m, Index col) {
    Index best = 0;
    double best_abs = -1.0;
    for (Index i = 0; i < m.rows(); ++i) {
        const double a = std::abs(m(i, col));
        if (a > best_abs) {
            best_abs = a;
            best = i;
        }
    }
    if (m(best, col) < 0.0) m.col(col) = -m.col(col);
}

Vector deterministic_start(Index n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = rng.next_normal();
    return v;
}

std::vector<double> actual_residuals(const SymOp& op, const Vector& values,
                                     const Matrix& vectors) {
    std::vector<double> res(static_cast<std::size_t>(values.size()));
    for (Index i = 0; i < values.size(); ++i)
        res[static_cast<std::size_t>(i)] =
            (op.apply(vectors.col(i)) - values[i] * vectors.col(i)).norm();
    return res;
}

struct RitzPair {
    double value;  // eigenvalue of B
    Vector vector;
};

EigResult dense_path(const SymOp& op, Index count, SolverReport report) {
    const Index n = op.dim();
    Matrix dense = op.to_dense();
    const double norm_est = report.norm_estimate;

    // When the all-ones direction is a null vector its eigenvalue sits inside
    // the near-zero cluster and the solver would mix it into the returned
    // eigenvectors. Deflate by shifting that eigenvalue to the top of the
    // spectrum: replace B with P B P + mu * ee^T/n (P the projector onto the
    // complement of e), whose small eigenpairs live strictly in e-perp.
    const Vector ones = Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    const double ones_resid = (dense * ones).norm();
    const bool deflate = ones_resid <= 1e-8 * std::max(norm_est, 1e-30);
    double ones_value = 0.0;
    if (deflate) {
        ones_value = ones.dot(dense * ones);
        const Vector c = dense * ones;
        const double s = ones.dot(c);
        const double mu = std::max(norm_est, 1.0) * 2.0;
        dense.noalias() -= c * ones.transpose();
        dense.noalias() -= ones * c.transpose();
        dense.noalias() += (s + mu) * ones * ones.transpose();
    }

    Eigen::SelfAdjointEigenSolver<Matrix> es(dense);
    if (es.info() != Eigen::Success) throw Error("dense symmetric eigendecomposition failed");

    EigResult out;
    out.values.resize(count);
    out.vectors.resize(n, count);
    if (deflate) {
        // The deflated direction is pinned first: its eigenvalue ties with the
        // near-zero cluster to rounding error, and value-based ordering could
        // leak the constant vector into the embedding rows.
        out.values[0] = ones_value;
        out.vectors.col(0) = ones;
        out.values.tail(count - 1) = es.eigenvalues().head(count - 1);
        out.vectors.rightCols(count - 1) = es.eigenvectors().leftCols(count - 1);
    } else {
        out.values = es.eigenvalues().head(count);
        out.vectors = es.eigenvectors().leftCols(count);
    }
    for (Index j = 0; j < count; ++j) fix_sign_column(out.vectors, j);
    report.method = "dense";
    report.iterations = 0;
    report.residuals = actual_residuals(op, out.values, out.vectors);
    out.report = std::move(report);
    return out;
}

EigResult lanczos_path(const SymOp& op, Index count, const SolverOptions& opts,
                       SolverReport report) {
    const Index n = op.dim();
    const double norm_est = report.norm_estimate;
    const double mu = 1.01 * norm_est;
    const double resid_target = opts.tol * norm_est;

    // Deflate the all-ones direction when it is (numerically) a null vector.
    Vector ones = Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    const double ones_resid = op.apply(ones).norm();
    const bool deflate = ones_resid <= 1e-8 * std::max(norm_est, 1e-30);
    const Index want = count - (deflate ? 1 : 0);
    const Index subspace_dim = n - (deflate ? 1 : 0);

    std::vector<RitzPair> pairs;
    Index iterations = 0;

    if (want > 0) {
        const Index cap = std::min<Index>(
            opts.max_iter > 0 ? opts.max_iter : 300 * count, subspace_dim);
        if (cap < want)
            throw SolverError("Lanczos subspace cap below requested pair count", {});

        Matrix V(n, cap);
        std::vector<double> alpha, beta;  // beta[j] links v_j and v_{j+1}
        alpha.reserve(cap);
        beta.reserve(cap);

        SplitMix64 restart_rng(0x17A5A5EEDULL);
        auto fresh_vector = [&](Index cols) {
            Vector v = deterministic_start(n, restart_rng.next_u64());
            for (int pass = 0; pass < 2; ++pass) {
                if (deflate) v -= ones.dot(v) * ones;
                if (cols > 0) v -= V.leftCols(cols) * (V.leftCols(cols).transpose() * v);
            }
            const double nv = v.norm();
            if (nv <= 0.0) throw SolverError("could not draw a fresh Lanczos vector", {});
            return Vector(v / nv);
        };

        V.col(0) = fresh_vector(0);
        Index next_check = std::max<Index>(want + 2, 10);
        Vector last_ritz;
        bool converged = false;

        auto extract = [&](const Eigen::SelfAdjointEigenSolver<Matrix>& full, Index basis) {
            pairs.clear();
            for (Index t = 0; t < want; ++t) {
                const Index col = basis - 1 - t;  // largest of A <-> smallest of B
                RitzPair p;
                p.value = mu - full.eigenvalues()[col];
                p.vector = V.leftCols(basis) * full.eigenvectors().col(col);
                p.vector.normalize();
                pairs.push_back(std::move(p));
            }
        };

        for (Index j = 0; j < cap && !converged; ++j) {
            const Index basis = j + 1;
            iterations = basis;
            Vector w = mu * V.col(j) - op.apply(V.col(j));
            if (j > 0 && beta[j - 1] != 0.0) w -= beta[j - 1] * V.col(j - 1);
            const double a = V.col(j).dot(w);
            alpha.push_back(a);
            w -= a * V.col(j);
            // Full reorthogonalization, two passes.
            for (int pass = 0; pass < 2; ++pass) {
                if (deflate) w -= ones.dot(w) * ones;
                w -= V.leftCols(basis) * (V.leftCols(basis).transpose() * w);
            }
            const double b = w.norm();
            const bool breakdown = b <= 1e-13 * std::max(norm_est, 1.0);
            const bool complete = basis == subspace_dim;  // Krylov space exhausted: exact
            const bool maxed = basis == cap;

            if ((basis >= next_check || breakdown || maxed) && basis >= want) {
                Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), basis);
                Eigen::VectorXd sub =
                    beta.empty() ? Eigen::VectorXd()
                                 : Eigen::Map<const Eigen::VectorXd>(beta.data(), basis - 1);
                // Cheap eigenvalue-only screen; the residual bound from the
                // tridiagonal eigenvectors is the real convergence criterion.
                // Requiring two stable checks guards against accepting an
                // invariant subspace that is still missing a multiple copy.
                Eigen::SelfAdjointEigenSolver<Matrix> values_only;
                values_only.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
                Vector ritz = values_only.eigenvalues().tail(want);
                bool settled = complete || maxed;
                if (!settled && last_ritz.size() == want)
                    settled = (ritz - last_ritz).cwiseAbs().maxCoeff() <=
                              1e-6 * std::max(norm_est, 1e-30);
                last_ritz = ritz;
                if (settled) {
                    Eigen::SelfAdjointEigenSolver<Matrix> full;
                    full.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
                    bool bounds_ok = true;
                    for (Index t = 0; t < want && bounds_ok; ++t)
                        bounds_ok = b * std::abs(full.eigenvectors()(basis - 1, basis - 1 - t)) <=
                                    resid_target;
                    if (bounds_ok || complete) {
                        extract(full, basis);
                        converged = true;
                        break;
                    }
                    if (maxed) {
                        extract(full, basis);
                        Vector vals(static_cast<Index>(pairs.size()));
                        Matrix vecs(n, static_cast<Index>(pairs.size()));
                        for (std::size_t t = 0; t < pairs.size(); ++t) {
                            vals[static_cast<Index>(t)] = pairs[t].value;
                            vecs.col(static_cast<Index>(t)) = pairs[t].vector;
                        }
                        throw SolverError("Lanczos did not converge within " +
                                              std::to_string(iterations) + " iterations",
                                          actual_residuals(op, vals, vecs));
                    }
                }
                next_check = basis + std::max<Index>(10, basis / 8);
            }

            if (basis == cap) break;
            if (breakdown) {
                beta.push_back(0.0);
                V.col(basis) = fresh_vector(basis);
            } else {
                beta.push_back(b);
                V.col(basis) = w / b;
            }
        }

        if (!converged)
            throw SolverError("Lanczos did not converge within " + std::to_string(iterations) +
                                  " iterations",
                              {});
    }

    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const RitzPair& a, const RitzPair& b) { return a.value < b.value; });
    if (deflate) {
        // Pinned first for the same reason as in the dense path.
        RitzPair p;
        p.value = ones.dot(op.apply(ones));
        p.vector = ones;
        pairs.insert(pairs.begin(), std::move(p));
    }

    EigResult out;
    out.values.resize(count);
    out.vectors.resize(n, count);
    for (Index i = 0; i < count; ++i) {
        out.values[i] = pairs[static_cast<std::size_t>(i)].value;
        out.vectors.col(i) = pairs[static_cast<std::size_t>(i)].vector;
        fix_sign_column(out.vectors, i);
    }
    report.method = "lanczos";
    report.iterations = iterations;
    report.residuals = actual_residuals(op, out.values, out.vectors);
    out.report = std::move(report);
    return out;
}

}  // namespace

double power_norm_estimate(const SymOp& op, int steps) {
    const Index n = op.dim();
    Vector v = deterministic_start(n, 0xB0A7ED11ULL);
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < steps; ++it) {
        Vector w = op.apply(v);
        lambda = v.dot(w);
        const double nw = w.norm();
        if (nw <= 0.0) return 0.0;
        v = w / nw;
    }
    return std::max(lambda, op.apply(v).norm());
}

EigResult smallest_eigenpairs(const SymOp& op, Index count, const SolverOptions& opts) {
    const Index n = op.dim();
    if (count < 1) throw InvalidArgument("smallest_eigenpairs: count must be >= 1");
    if (count > n) throw InvalidArgument("smallest_eigenpairs: count exceeds operator dimension");
    if (!(opts.tol > 0.0)) throw InvalidArgument("smallest_eigenpairs: tol must be positive");

    SolverReport report;
    report.norm_estimate = op.norm_estimate();

    const bool dense = opts.method == SolverOptions::Method::Dense ||
                       (opts.method == SolverOptions::Method::Auto && n <= opts.dense_threshold);
    return dense ? dense_path(op, count, std::move(report))
                 : lanczos_path(op, count, opts, std::move(report));
}

std::string SolverReport::to_key_values() const {
    std::ostringstream out;
    out.precision(17);
    out << "method=" << method << '\n';
    out << "iterations=" << iterations << '\n';
    out << "norm_estimate=" << norm_estimate << '\n';
    out << "degenerate_gap=" << (degenerate_gap ? 1 : 0) << '\n';
    for (std::size_t i = 0; i < residuals.size(); ++i)
        out << "residual_" << i << '=' << residuals[i] << '\n';
    for (const auto& [k, v] : extras) out << k << '=' << v << '\n';
    for (const auto& w : warnings) out << "warning=" << w << '\n';
    return out.str();
}

}  // namespace ltsa
