#include "ltsa/analysis.hpp"

#include "ltsa/dataset.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace ltsa;
using ltsa::test::random_matrix;
using ltsa::test::random_orthonormal;
using ltsa::test::random_vector;

TEST_CASE("affine_align recovers exact affine maps") {
    SplitMix64 rng(61);
    const Matrix t = random_matrix(2, 50, rng);
    Matrix t_star = 2.0 * t;
    t_star.array() += 3.0;
    const AffineFit fit = affine_align(t, t_star);
    CHECK(fit.rms < 1e-12);
    CHECK((fit.A - 2.0 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((fit.b - Vector::Constant(2, 3.0)).cwiseAbs().maxCoeff() < 1e-10);

    Matrix flipped = t;
    flipped.row(1) = -t.row(1);
    CHECK(affine_align(t, flipped).rms < 1e-12);
}

TEST_CASE("affine_align rejects degenerate coordinates") {
    Matrix t = Matrix::Zero(2, 30);  // all points identical
    SplitMix64 rng(62);
    const Matrix t_star = random_matrix(2, 30, rng);
    CHECK_THROWS_AS(affine_align(t, t_star), InvalidArgument);
    CHECK_THROWS_AS(affine_align(t_star, random_matrix(2, 31, rng)), InvalidArgument);
}

TEST_CASE("affine_align is invariant under affine reparameterization") {
    SplitMix64 rng(63);
    const Matrix t = random_matrix(3, 80, rng);
    const Matrix t_star = random_matrix(3, 80, rng);
    const double base = affine_align(t, t_star).rms;
    for (int rep = 0; rep < 5; ++rep) {
        Matrix m = random_matrix(3, 3, rng);
        m += 4.0 * Matrix::Identity(3, 3);  // keep it invertible
        const Vector c = random_vector(3, rng);
        const Matrix warped = (m * t).colwise() + c;
        CHECK(std::abs(affine_align(warped, t_star).rms - base) < 1e-10);
    }
}

namespace {

struct AffineWorld {
    DataMatrix data;
    GroundTruth gt;
};

AffineWorld affine_world(Index m, int d, Index n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    AffineWorld w;
    const Matrix basis = random_orthonormal(m, d, rng);
    const Vector offset = random_vector(m, rng);
    w.gt.d = d;
    w.gt.params = random_matrix(d, n, rng);
    w.data = DataMatrix((offset.replicate(1, n) + basis * w.gt.params).eval());
    w.gt.noise = Matrix::Zero(m, n);
    w.gt.f = [offset, basis](const Vector& tau) -> Vector { return offset + basis * tau; };
    w.gt.jacobian = [basis](const Vector&) -> Matrix { return basis; };
    w.gt.hessian = [d](const Vector&, int) -> Matrix { return Matrix::Zero(d, d); };
    w.gt.hessian_analytic = true;
    return w;
}

}  // namespace

TEST_CASE("theorem bounds vanish for exactly linear data") {
    auto w = affine_world(6, 2, 150, 64);
    const auto res = ltsa_embed(w.data, 10, 2);
    const auto report = theorem_bounds(w.data, w.gt, res.frames, res.nbrs, res.embedding);
    CHECK(report.slack == 1e-8);
    CHECK_FALSE(report.hessian_fd);
    for (const auto& rec : report.records) {
        REQUIRE(rec.applicable);
        CHECK(rec.delta <= 1e-10);
        CHECK(rec.e_star_norm == 0.0);
        CHECK(rec.e_norm <= 1e-10);
        CHECK(rec.tangent_err <= 1e-9);
        CHECK(rec.sat2);
        CHECK(rec.sat3);
        CHECK(rec.sat4);
    }
}

TEST_CASE("theorem bounds hold on the noise-free helix") {
    auto [data, gt] = gen_curve("helix", 400, 0.0, 1);
    const auto res = ltsa_embed(data, 8, 1);
    const auto report = theorem_bounds(data, gt, res.frames, res.nbrs, res.embedding);
    CHECK(report.hessian_fd);  // helix Hessian is finite-difference
    Index sat = 0, applicable = 0;
    for (const auto& rec : report.records) {
        if (!rec.applicable) continue;
        ++applicable;
        if (rec.sat2 && rec.sat3 && rec.sat4) ++sat;
    }
    CHECK(applicable == 400);
    CHECK(sat >= applicable * 99 / 100);
}

TEST_CASE("theorem bounds hold on the noisy peak surface") {
    auto [data, gt] = gen_peak_surface(400, 1.0, 1);
    const auto res = ltsa_embed(data, 10, 2);
    const auto report = theorem_bounds(data, gt, res.frames, res.nbrs, res.embedding);
    Index sat = 0, applicable = 0;
    for (const auto& rec : report.records) {
        if (!rec.applicable) continue;
        ++applicable;
        if (rec.sat2 && rec.sat3 && rec.sat4) ++sat;
    }
    CHECK(applicable == 400);
    CHECK(sat >= applicable * 99 / 100);
}

TEST_CASE("astroid records near the cusp are flagged or extreme") {
    auto [data, gt] = gen_curve("astroid", 400, 0.01, 1);
    const auto res = ltsa_embed(data, 8, 1);
    const auto report = theorem_bounds(data, gt, res.frames, res.nbrs, res.embedding);
    Index inapplicable_near = 0;
    double max_pinv_near = 0.0;
    std::vector<double> pinv_far;
    for (Index i = 0; i < 400; ++i) {
        const auto& rec = report.records[i];
        if (std::abs(gt.params(0, i) - M_PI / 2) < 0.15) {
            if (!rec.applicable) ++inapplicable_near;
            max_pinv_near = std::max(max_pinv_near, rec.p_inv_norm);
        } else if (rec.applicable) {
            pinv_far.push_back(rec.p_inv_norm);
        }
    }
    CHECK(inapplicable_near > 0);
    CHECK(max_pinv_near > 1e6 * median(pinv_far));
}

TEST_CASE("lle reconstructs exact affine data") {
    SplitMix64 rng(65);
    const Matrix basis = random_orthonormal(3, 2, rng);
    const Matrix params = random_matrix(2, 200, rng);
    DataMatrix x((basis * params).eval());
    LleOptions options;
    options.reg = 1e-8;  // negligible regularization: local reconstruction is exact
    const auto lle = lle_embed(x, 10, 2, options);
    const AffineFit fit = affine_align(lle.embedding.T, params);
    CHECK(fit.rms_rel <= 1e-6);
}

TEST_CASE("lle weight rows sum to one") {
    auto set = gen_three_gaussians(60, 5);
    const auto lle = lle_embed(set.data, 10, 1);
    const Vector residual = lle.i_minus_w * Vector::Ones(set.data.N());
    CHECK(residual.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("lle and ltsa share the normalization contract") {
    auto set = gen_three_gaussians(60, 6);
    const auto lle = lle_embed(set.data, 10, 1);
    const auto lt = ltsa_embed(set.data, 10, 1);
    for (const Embedding* emb : {&lle.embedding, &lt.embedding}) {
        CHECK((emb->T * emb->T.transpose() - Matrix::Identity(1, 1)).cwiseAbs().maxCoeff() <
              1e-9);
        CHECK(std::abs(emb->T.row(0).sum()) < 1e-8);
        CHECK(emb->eigenvalues[0] <= 1e-10);
    }
    CHECK_THROWS_AS(lle_embed(set.data, 5, 5), InvalidArgument);  // d >= k
}

TEST_CASE("cluster separation scores") {
    // Perfectly separated intervals.
    Matrix t(1, 9);
    t << 0, 1, 2, 10, 11, 12, 20, 21, 22;
    std::vector<int> labels{0, 0, 0, 1, 1, 1, 2, 2, 2};
    CHECK(cluster_separation(t, labels) == 1.0);

    // Interleaved classes cannot be separated by intervals.
    Matrix bad(1, 4);
    bad << 0, 1, 2, 3;
    std::vector<int> alt{0, 1, 0, 1};
    CHECK(cluster_separation(bad, alt) == doctest::Approx(0.75));

    std::vector<int> single{0, 0, 0, 0};
    CHECK_THROWS_AS(cluster_separation(bad, single), InvalidArgument);
}

TEST_CASE("cluster separation on random labels is near chance") {
    SplitMix64 rng(66);
    Matrix t = random_matrix(1, 300, rng);
    std::vector<int> labels(300);
    for (auto& l : labels) l = static_cast<int>(rng.next_uniform() * 3);
    const double score = cluster_separation(t, labels);
    CHECK(std::abs(score - 1.0 / 3.0) < 0.1);
}

TEST_CASE("three-gaussian separation: tangent alignment beats the baseline") {
    auto set = gen_three_gaussians(100, 1);
    const auto lt = ltsa_embed(set.data, 10, 1);
    const auto lle = lle_embed(set.data, 10, 1);
    const double score_lt = cluster_separation(lt.embedding.T, set.labels);
    const double score_lle = cluster_separation(lle.embedding.T, set.labels);
    CHECK(score_lt >= 0.9);
    CHECK(score_lt >= score_lle);
}

TEST_CASE("report CSV serialization") {
    auto [data, gt] = gen_curve("helix", 60, 0.05, 7);
    const auto res = ltsa_embed(data, 8, 1);
    const auto report = theorem_bounds(data, gt, res.frames, res.nbrs, res.embedding);
    const AffineFit fit = affine_align(res.embedding.T, gt.params);
    const std::string dir = std::filesystem::temp_directory_path().string();
    save_bound_report_csv(dir + "/bounds_test.csv", report);
    save_affine_fit_csv(dir + "/affine_test.csv", fit);
    std::ifstream bounds(dir + "/bounds_test.csv");
    std::string header;
    std::getline(bounds, header);
    CHECK(header ==
          "i,delta,e_star_norm,e_norm,p_inv_norm,alpha,sigma_d_jt,cond_jt,tangent_err,"
          "bound2,bound3,bound4,sat2,sat3,sat4,applicable,applicable34");
    int rows = 0;
    for (std::string line; std::getline(bounds, line);) ++rows;
    CHECK(rows == 60);
    std::filesystem::remove(dir + "/bounds_test.csv");
    std::filesystem::remove(dir + "/affine_test.csv");
}
