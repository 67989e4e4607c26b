#include "ltsa/reconstruct.hpp"

#include "ltsa/dataset.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <string>
#include <unistd.h>

using namespace ltsa;
using ltsa::test::random_matrix;
using ltsa::test::random_orthonormal;
using ltsa::test::random_vector;

namespace {

struct AffineWorld {
    DataMatrix data;
    GroundTruth gt;
};

// Exact d-dimensional affine data with analytic (zero-Hessian) evaluators.
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

TEST_CASE("optimal alignment solves the least-squares problem") {
    SplitMix64 rng(51);
    const Matrix coords = random_matrix(2, 9, rng);
    const Matrix target = random_matrix(2, 9, rng);
    const Matrix l = optimal_alignment(coords, target);
    // Compare against the normal-equations solution.
    const Matrix expected =
        (target * coords.transpose()) * (coords * coords.transpose()).inverse();
    CHECK((l - expected).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("reconstruction is exact on affine data") {
    auto w = affine_world(6, 2, 150, 52);
    const auto res = ltsa_embed(w.data, 10, 2);
    const auto rmap = fit_reconstruction(w.data, res.embedding, res.frames, res.nbrs);
    for (Index i = 0; i < 150; ++i) {
        const Vector g = map_point(rmap, res.embedding.T.col(i));
        CHECK((g - w.data.values.col(i)).norm() < 1e-8);
    }
}

TEST_CASE("helix reconstruction error stays below 1e-3 of the diameter") {
    auto [data, gt] = gen_curve("helix", 400, 0.0, 1);
    const auto res = ltsa_embed(data, 8, 1);
    const auto rmap = fit_reconstruction(data, res.embedding, res.frames, res.nbrs);
    double diam = 0.0;
    for (Index i = 0; i < 400; i += 7)
        for (Index j = i + 1; j < 400; j += 7)
            diam = std::max(diam, (data.values.col(i) - data.values.col(j)).norm());
    for (Index i = 0; i < 400; ++i) {
        const Vector g = map_point(rmap, res.embedding.T.col(i));
        CHECK((g - data.values.col(i)).norm() <= 1e-3 * diam);
    }
}

TEST_CASE("zero offset returns the record center") {
    auto [data, gt] = gen_curve("helix", 100, 0.0, 2);
    const auto res = ltsa_embed(data, 8, 1);
    const auto rmap = fit_reconstruction(data, res.embedding, res.frames, res.nbrs);
    bool exercised = false;
    for (Index i = 0; i < 100; ++i) {
        const Vector center_tau = rmap.records()[i].center_tau;
        if (rmap.nearest_record(center_tau) != i) continue;
        exercised = true;
        const Vector g = map_point(rmap, center_tau);
        CHECK((g - rmap.records()[i].center_x).norm() == 0.0);
    }
    CHECK(exercised);
}

TEST_CASE("unusable record raises an error naming it") {
    std::vector<ReconstructionRecord> records(2);
    Matrix feature(1, 2);
    feature << 0.0, 1.0;
    for (int i = 0; i < 2; ++i) {
        records[i].center_x = Vector::Zero(2);
        records[i].center_tau = Vector::Constant(1, static_cast<double>(i));
        records[i].basis = Matrix::Identity(2, 1);
        records[i].L = Matrix::Zero(1, 1);
        records[i].L_inv = Matrix::Zero(1, 1);
        records[i].theta_self = Vector::Zero(1);
        records[i].cond = std::numeric_limits<double>::infinity();
        records[i].usable = false;
    }
    ReconstructionMap rmap(std::move(records), feature);
    Vector q(1);
    q << 0.9;
    try {
        map_point(rmap, q);
        FAIL("expected InvalidArgument");
    } catch (const InvalidArgument& e) {
        const std::string msg = e.what();
        CHECK(msg.find("record 1") != std::string::npos);
        CHECK(msg.find("cond") != std::string::npos);
    }
}

TEST_CASE("theorem 1 decomposition on affine data") {
    auto w = affine_world(5, 1, 120, 53);
    const auto res = ltsa_embed(w.data, 8, 1);
    const auto rmap = fit_reconstruction(w.data, res.embedding, res.frames, res.nbrs);
    const auto reports = theorem1_report_all(rmap, w.gt);
    for (const auto& r : reports) {
        REQUIRE(r.applicable);
        CHECK(r.eps_star <= 1e-10);
        CHECK(r.xi <= 1e-10);
        CHECK(r.l_inv_eps <= 1e-10);
        CHECK(r.lhs <= 1e-10);
        CHECK_FALSE(r.violated);
    }
}

TEST_CASE("theorem 1 inequality holds on the noise-free helix") {
    auto [data, gt] = gen_curve("helix", 400, 0.0, 1);
    const auto res = ltsa_embed(data, 8, 1);
    const auto rmap = fit_reconstruction(data, res.embedding, res.frames, res.nbrs);
    for (const auto& r : theorem1_report_all(rmap, gt)) {
        REQUIRE(r.applicable);
        CHECK_FALSE(r.violated);
    }
}

TEST_CASE("theorem 1 inequality holds on every generated curve") {
    for (const auto& name : curve_names()) {
        auto [data, gt] = gen_curve(name, 200, 0.05, 3);
        const auto res = ltsa_embed(data, 8, 1);
        const auto rmap = fit_reconstruction(data, res.embedding, res.frames, res.nbrs);
        for (const auto& r : theorem1_report_all(rmap, gt))
            if (r.applicable) CHECK_FALSE(r.violated);
    }
}

TEST_CASE("theorem 1 inequality holds on the noisy spiral") {
    auto [data, gt] = gen_curve("spiral", 400, 0.2, 1);
    const auto res = ltsa_embed(data, 8, 1);
    const auto rmap = fit_reconstruction(data, res.embedding, res.frames, res.nbrs);
    Index applicable = 0;
    for (const auto& r : theorem1_report_all(rmap, gt)) {
        if (!r.applicable) continue;
        ++applicable;
        CHECK(r.lhs <= r.bound + 1e-8);
    }
    CHECK(applicable > 0);
}

TEST_CASE("astroid alignments collapse near the cusp") {
    auto [data, gt] = gen_curve("astroid", 400, 0.01, 1);
    const auto res = ltsa_embed(data, 8, 1);
    const auto rmap = fit_reconstruction(data, res.embedding, res.frames, res.nbrs);
    // |L| near the singular point is far below the typical scale, which makes
    // ||L^{-1}|| spike: the quantitative form of coordinates being compressed.
    std::vector<double> near, far;
    for (Index i = 0; i < 400; ++i) {
        const double linv = rmap.records()[i].L_inv.cwiseAbs().maxCoeff();
        if (std::abs(gt.params(0, i) - M_PI / 2) < 0.15)
            near.push_back(linv);
        else
            far.push_back(linv);
    }
    CHECK(*std::max_element(near.begin(), near.end()) > 10.0 * median(far));
}

TEST_CASE("map is Lipschitz within a cell") {
    auto [data, gt] = gen_curve("spiral", 200, 0.05, 9);
    const auto res = ltsa_embed(data, 8, 1);
    const auto rmap = fit_reconstruction(data, res.embedding, res.frames, res.nbrs);
    SplitMix64 rng(54);
    int exercised = 0;
    for (int t = 0; t < 200; ++t) {
        const Index i = static_cast<Index>(rng.next_uniform() * 200);
        const Vector base = res.embedding.T.col(i);
        Vector a = base, b = base;
        a[0] += 1e-4 * rng.next_normal();
        b[0] += 1e-4 * rng.next_normal();
        const Index ra = rmap.nearest_record(a);
        if (ra != rmap.nearest_record(b) || !rmap.records()[ra].usable) continue;
        ++exercised;
        const double bound =
            Eigen::JacobiSVD<Matrix>(rmap.records()[ra].basis * rmap.records()[ra].L_inv)
                .singularValues()[0] *
            (a - b).norm();
        CHECK((map_point(rmap, a) - map_point(rmap, b)).norm() <= bound * (1.0 + 1e-12) + 1e-300);
    }
    CHECK(exercised > 50);
}

TEST_CASE("serialization round trip") {
    auto [data, gt] = gen_curve("cubic2d", 80, 0.05, 11);
    const auto res = ltsa_embed(data, 8, 1);
    const auto rmap = fit_reconstruction(data, res.embedding, res.frames, res.nbrs);
    const std::string path =
        (std::filesystem::temp_directory_path() / ("rmap_" + std::to_string(::getpid()) + ".txt"))
            .string();
    save_rmap(path, rmap);
    const ReconstructionMap back = load_rmap(path);
    std::filesystem::remove(path);
    REQUIRE(back.records().size() == rmap.records().size());
    CHECK(back.feature_points() == rmap.feature_points());
    for (std::size_t i = 0; i < rmap.records().size(); ++i) {
        CHECK(back.records()[i].center_x == rmap.records()[i].center_x);
        CHECK(back.records()[i].L == rmap.records()[i].L);
        CHECK(back.records()[i].L_inv == rmap.records()[i].L_inv);
        CHECK(back.records()[i].usable == rmap.records()[i].usable);
    }
    SplitMix64 rng(55);
    for (int t = 0; t < 10; ++t) {
        Vector q(1);
        q << rng.next_normal() * 0.05;
        CHECK(map_point(back, q) == map_point(rmap, q));
    }
}

TEST_CASE("fit_reconstruction validates input consistency") {
    auto [data, gt] = gen_curve("helix", 50, 0.0, 1);
    const auto res = ltsa_embed(data, 6, 1);
    auto short_frames = res.frames;
    short_frames.pop_back();
    CHECK_THROWS_AS(fit_reconstruction(data, res.embedding, short_frames, res.nbrs),
                    InvalidArgument);
}
