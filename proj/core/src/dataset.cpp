#include "ltsa/dataset.hpp"

#include "ltsa/rng.hpp"

#include <Eigen/QR>

#include <cmath>
#include <map>

namespace ltsa {

namespace {

// 1-D manifold definition: parameter interval, input dimension, and the
// scalar-parameter evaluators. d2f is null for curves whose second derivative
// falls back to finite differences.
struct CurveDef {
    double lo = 0.0;
    double hi = 1.0;
    int m = 2;
    bool relative_noise = false;
    Vector (*f)(double) = nullptr;
    Vector (*df)(double) = nullptr;
    Vector (*d2f)(double) = nullptr;
};

Vector vec2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

Vector vec3(double a, double b, double c) {
    Vector v(3);
    v << a, b, c;
    return v;
}

Vector cubic2d_f(double t) { return vec2(10.0 * t, 10.0 * t * t * t + 2.0 * t * t - 10.0 * t); }
Vector cubic2d_df(double t) { return vec2(10.0, 30.0 * t * t + 4.0 * t - 10.0); }
Vector cubic2d_d2f(double t) { return vec2(0.0, 60.0 * t + 4.0); }

Vector spiral_f(double t) { return vec2(t * std::cos(t), t * std::sin(t)); }
Vector spiral_df(double t) {
    return vec2(std::cos(t) - t * std::sin(t), std::sin(t) + t * std::cos(t));
}

Vector helix_f(double t) { return vec3(3.0 * std::cos(t), 3.0 * std::sin(t), 3.0 * t); }
Vector helix_df(double t) { return vec3(-3.0 * std::sin(t), 3.0 * std::cos(t), 3.0); }

Vector astroid_f(double t) {
    const double c = std::cos(t), s = std::sin(t);
    return vec2(c * c * c, s * s * s);
}
Vector astroid_df(double t) {
    const double c = std::cos(t), s = std::sin(t);
    return vec2(-3.0 * c * c * s, 3.0 * s * s * c);
}
Vector astroid_d2f(double t) {
    const double c = std::cos(t), s = std::sin(t);
    return vec2(-3.0 * c * (c * c - 2.0 * s * s), 3.0 * s * (2.0 * c * c - s * s));
}

Vector half_ellipse_f(double t) { return vec2(10.0 * std::cos(t), std::sin(t)); }
Vector half_ellipse_df(double t) { return vec2(-10.0 * std::sin(t), std::cos(t)); }
Vector half_ellipse_d2f(double t) { return vec2(-10.0 * std::cos(t), -std::sin(t)); }

// rel_cubic is the scalar cubic 3t^3 + 2t^2 - 2t embedded as its graph
// (t, f(t)) so neighborhoods are geometrically meaningful.
Vector rel_cubic_f(double t) { return vec2(t, 3.0 * t * t * t + 2.0 * t * t - 2.0 * t); }
Vector rel_cubic_df(double t) { return vec2(1.0, 9.0 * t * t + 4.0 * t - 2.0); }
Vector rel_cubic_d2f(double t) { return vec2(0.0, 18.0 * t + 4.0); }

const std::map<std::string, CurveDef>& curve_table() {
    static const std::map<std::string, CurveDef> table = {
        {"cubic2d", {-1.0, 1.0, 2, false, cubic2d_f, cubic2d_df, cubic2d_d2f}},
        {"spiral", {0.0, 4.0 * M_PI, 2, false, spiral_f, spiral_df, nullptr}},
        {"helix", {0.0, 4.0 * M_PI, 3, false, helix_f, helix_df, nullptr}},
        {"astroid", {0.0, M_PI, 2, false, astroid_f, astroid_df, astroid_d2f}},
        {"half_ellipse", {M_PI / 2.0, 1.5 * M_PI, 2, false, half_ellipse_f, half_ellipse_df,
                          half_ellipse_d2f}},
        {"rel_cubic", {-1.1, 1.0, 2, true, rel_cubic_f, rel_cubic_df, rel_cubic_d2f}},
    };
    return table;
}

const CurveDef& lookup_curve(const std::string& name) {
    const auto& table = curve_table();
    auto it = table.find(name);
    if (it == table.end()) throw InvalidArgument("unknown curve id: " + name);
    return it->second;
}

void bind_curve_evaluators(const CurveDef& def, GroundTruth& gt) {
    gt.d = 1;
    gt.f = [&def](const Vector& tau) { return def.f(tau[0]); };
    gt.jacobian = [&def](const Vector& tau) -> Matrix { return def.df(tau[0]); };
    if (def.d2f != nullptr) {
        gt.hessian_analytic = true;
        gt.hessian = [&def](const Vector& tau, int l) -> Matrix {
            Matrix h(1, 1);
            h(0, 0) = def.d2f(tau[0])[l];
            return h;
        };
    } else {
        gt.hessian_analytic = false;
        const auto jac = gt.jacobian;
        gt.hessian = [jac](const Vector& tau, int l) { return fd_hessian(jac, tau, l); };
    }
}

void peak_gradient(double t, double s, double& ht, double& hs) {
    const double e1 = std::exp(-t * t - (s + 1.0) * (s + 1.0));
    const double e2 = std::exp(-t * t - s * s);
    const double e3 = std::exp(-(t + 1.0) * (t + 1.0) - s * s);
    const double omt = 1.0 - t;
    const double p = 0.2 * t - t * t * t - s * s * s * s * s;
    ht = 0.3 * e1 * (-2.0 * omt - 2.0 * t * omt * omt)
         - e2 * ((0.2 - 3.0 * t * t) - 2.0 * t * p)
         + 0.2 * (t + 1.0) * e3;
    hs = 0.3 * omt * omt * (-2.0 * (s + 1.0)) * e1
         - e2 * (-5.0 * s * s * s * s - 2.0 * s * p)
         + 0.2 * s * e3;
}

void bind_peak_evaluators(GroundTruth& gt) {
    gt.d = 2;
    gt.f = [](const Vector& tau) { return vec3(tau[0], tau[1], peak_height(tau[0], tau[1])); };
    gt.jacobian = [](const Vector& tau) {
        Matrix j(3, 2);
        double ht, hs;
        peak_gradient(tau[0], tau[1], ht, hs);
        j << 1.0, 0.0, 0.0, 1.0, ht, hs;
        return j;
    };
    gt.hessian_analytic = false;
    const auto jac = gt.jacobian;
    gt.hessian = [jac](const Vector& tau, int l) { return fd_hessian(jac, tau, l); };
}

// Orthonormalize a seeded Gaussian matrix; columns made deterministic by
// forcing the R diagonal positive.
Matrix random_orthonormal(Index rows, Index cols, SplitMix64& rng) {
    Matrix g(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) g(i, j) = rng.next_normal();
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
    const Vector rdiag = qr.matrixQR().diagonal().head(cols);
    for (Index j = 0; j < cols; ++j)
        if (rdiag[j] < 0.0) q.col(j) = -q.col(j);
    return q;
}

}  // namespace

const std::vector<std::string>& curve_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [name, def] : curve_table()) v.push_back(name);
        return v;
    }();
    return names;
}

std::pair<DataMatrix, GroundTruth> gen_curve(const std::string& name, Index N, double eta,
                                             std::uint64_t seed) {
    if (N < 2) throw InvalidArgument("gen_curve requires N >= 2");
    if (eta < 0.0) throw InvalidArgument("gen_curve requires eta >= 0");
    const CurveDef& def = lookup_curve(name);

    GroundTruth gt;
    bind_curve_evaluators(def, gt);
    gt.noise_level = eta;
    gt.params.resize(1, N);
    gt.noise = Matrix::Zero(def.m, N);

    Matrix x(def.m, N);
    SplitMix64 rng(seed);
    for (Index i = 0; i < N; ++i) {
        const double tau = def.lo + (def.hi - def.lo) * static_cast<double>(i) /
                                        static_cast<double>(N - 1);
        gt.params(0, i) = tau;
        const Vector fx = def.f(tau);
        if (def.relative_noise) {
            // Relative noise perturbs the function value; the abscissa is the
            // parameter itself and stays exact.
            const double eps = eta > 0.0 ? rng.next_normal() : 0.0;
            x(0, i) = fx[0];
            x(1, i) = fx[1] * (1.0 + eta * eps);
            gt.noise(1, i) = x(1, i) - fx[1];
        } else {
            for (int c = 0; c < def.m; ++c) {
                const double n = eta > 0.0 ? eta * rng.next_normal() : 0.0;
                gt.noise(c, i) = n;
                x(c, i) = fx[c] + n;
            }
        }
    }
    return {DataMatrix(std::move(x)), std::move(gt)};
}

double peak_height(double t, double s) {
    return 0.3 * (1.0 - t) * (1.0 - t) * std::exp(-t * t - (s + 1.0) * (s + 1.0)) -
           (0.2 * t - t * t * t - s * s * s * s * s) * std::exp(-t * t - s * s) -
           0.1 * std::exp(-(t + 1.0) * (t + 1.0) - s * s);
}

std::pair<DataMatrix, GroundTruth> gen_peak_surface(Index N, double eta, std::uint64_t seed) {
    if (N < 3) throw InvalidArgument("gen_peak_surface requires N >= 3");
    if (eta < 0.0) throw InvalidArgument("gen_peak_surface requires eta >= 0");

    GroundTruth gt;
    bind_peak_evaluators(gt);
    gt.noise_level = eta;
    gt.params.resize(2, N);
    gt.noise = Matrix::Zero(3, N);

    SplitMix64 rng(seed);
    for (Index i = 0; i < N; ++i) {
        gt.params(0, i) = rng.next_uniform(-1.0, 1.0);
        gt.params(1, i) = rng.next_uniform(-1.0, 1.0);
    }
    Matrix x(3, N);
    for (Index i = 0; i < N; ++i) {
        const double t = gt.params(0, i), s = gt.params(1, i);
        const Vector fx = vec3(t, s, peak_height(t, s));
        for (int c = 0; c < 3; ++c) {
            const double n = eta > 0.0 ? 0.01 * eta * rng.next_normal() : 0.0;
            gt.noise(c, i) = n;
            x(c, i) = fx[c] + n;
        }
    }
    return {DataMatrix(std::move(x)), std::move(gt)};
}

HighDimEmbedding embed_highdim(const DataMatrix& src, Index target_m, EmbedMode mode,
                               std::uint64_t seed) {
    if (target_m < src.m())
        throw InvalidArgument("embed_highdim requires target_m >= source dimension");
    SplitMix64 rng(seed);
    Matrix transform;
    if (mode == EmbedMode::Orthogonal) {
        transform = random_orthonormal(target_m, src.m(), rng);
    } else {
        const Matrix u = random_orthonormal(target_m, src.m(), rng);
        const Matrix v = random_orthonormal(src.m(), src.m(), rng);
        Vector s(src.m());
        for (Index i = 0; i < src.m(); ++i) {
            double val = rng.next_uniform();
            if (val <= 0.0) val = 0x1.0p-53;
            s[i] = val;
        }
        transform = u * s.asDiagonal() * v.transpose();
    }
    return {DataMatrix(transform * src.values), std::move(transform)};
}

LabeledSet gen_three_gaussians(Index n_per, std::uint64_t seed) {
    if (n_per < 1) throw InvalidArgument("gen_three_gaussians requires n_per >= 1");
    const double means[3][2] = {{1.0, 1.0}, {1.0, -1.0}, {-1.0, 0.0}};
    const double sd = std::sqrt(0.2);  // covariance 0.2*I2

    LabeledSet set;
    Matrix x(2, 3 * n_per);
    set.labels.reserve(3 * n_per);
    SplitMix64 rng(seed);
    Index col = 0;
    for (int c = 0; c < 3; ++c) {
        for (Index i = 0; i < n_per; ++i, ++col) {
            x(0, col) = means[c][0] + sd * rng.next_normal();
            x(1, col) = means[c][1] + sd * rng.next_normal();
            set.labels.push_back(c);
        }
    }
    set.data = DataMatrix(std::move(x));
    return set;
}

void bind_evaluators(const std::string& generator, GroundTruth& gt) {
    if (generator == "peak") {
        bind_peak_evaluators(gt);
        return;
    }
    bind_curve_evaluators(lookup_curve(generator), gt);
}

GroundTruth transformed_truth(const GroundTruth& base, const Matrix& M) {
    if (base.noise.size() > 0 && M.cols() != base.noise.rows())
        throw InvalidArgument("transform width does not match base dimension");
    GroundTruth gt;
    gt.d = base.d;
    gt.params = base.params;
    gt.noise_level = base.noise_level;
    if (base.noise.size() > 0) gt.noise = M * base.noise;
    if (!base.has_evaluators()) return gt;

    const auto base_f = base.f;
    const auto base_j = base.jacobian;
    const auto base_h = base.hessian;
    const Matrix Mc = M;
    gt.f = [base_f, Mc](const Vector& tau) -> Vector { return Mc * base_f(tau); };
    gt.jacobian = [base_j, Mc](const Vector& tau) -> Matrix { return Mc * base_j(tau); };
    // Component l of M f is sum_c M(l,c) f_c, so its Hessian is the same
    // combination of the base Hessians.
    const Index base_m = M.cols();
    gt.hessian = [base_h, Mc, base_m](const Vector& tau, int l) -> Matrix {
        const Index d = tau.size();
        Matrix h = Matrix::Zero(d, d);
        for (Index c = 0; c < base_m; ++c) {
            const double w = Mc(l, c);
            if (w != 0.0) h += w * base_h(tau, static_cast<int>(c));
        }
        return h;
    };
    gt.hessian_analytic = base.hessian_analytic;
    return gt;
}

}  // namespace ltsa
