#include "hamkrr/features.hpp"
#include "hamkrr/kernels.hpp"
#include "hamkrr/linalg.hpp"
#include "hamkrr/sim.hpp"
#include "hamkrr/systems.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>

using namespace hamkrr;
using testutil::random_points;
using testutil::random_vec;

namespace {

const FeatureFamily kAll[] = {FeatureFamily::GaussianSeparable, FeatureFamily::CurlFree,
                              FeatureFamily::Symplectic,        FeatureFamily::OddSymplectic,
                              FeatureFamily::EvenSymplectic,    FeatureFamily::OddSeparable,
                              FeatureFamily::EvenSeparable};

// Psi(x)^T Psi(z) summed frequency by frequency from the spectral formulas.
Mat inner_product_oracle(FeatureFamily fam, const Mat& w, const Vec& x, const Vec& z)
{
    const Eigen::Index n = x.size();
    const double d = static_cast<double>(w.rows());
    Mat acc = Mat::Zero(n, n);
    for (Eigen::Index j = 0; j < w.rows(); ++j) {
        const Vec wj = w.row(j).transpose();
        const double cx = std::cos(wj.dot(x)), sx = std::sin(wj.dot(x));
        const double cz = std::cos(wj.dot(z)), sz = std::sin(wj.dot(z));
        const Vec jw = testutil::j_times(wj);
        switch (fam) {
        case FeatureFamily::GaussianSeparable: acc += (cx * cz + sx * sz) * Mat::Identity(n, n); break;
        case FeatureFamily::CurlFree: acc += (cx * cz + sx * sz) * wj * wj.transpose(); break;
        case FeatureFamily::Symplectic: acc += (cx * cz + sx * sz) * jw * jw.transpose(); break;
        case FeatureFamily::OddSymplectic: acc += sx * sz * jw * jw.transpose(); break;
        case FeatureFamily::EvenSymplectic: acc += cx * cz * jw * jw.transpose(); break;
        case FeatureFamily::OddSeparable: acc += sx * sz * Mat::Identity(n, n); break;
        case FeatureFamily::EvenSeparable: acc += cx * cz * Mat::Identity(n, n); break;
        }
    }
    return acc / d;
}

bool is_odd_family(FeatureFamily f) { return f == FeatureFamily::OddSymplectic || f == FeatureFamily::OddSeparable; }
bool is_even_family(FeatureFamily f) { return f == FeatureFamily::EvenSymplectic || f == FeatureFamily::EvenSeparable; }

}  // namespace

TEST_CASE("frequency draws are reproducible with the requested moments")
{
    CHECK((draw_frequencies(1.5, 20, 2, 42) - draw_frequencies(1.5, 20, 2, 42)).norm() == 0.0);
    CHECK((draw_frequencies(1.5, 20, 2, 42) - draw_frequencies(1.5, 20, 2, 43)).norm() > 0.0);

    const Mat w = draw_frequencies(2.0, 10000, 2, 5);
    for (Eigen::Index c = 0; c < 2; ++c) {
        const double mean = w.col(c).mean();
        const double var = (w.col(c).array() - mean).square().mean();
        CHECK(var == doctest::Approx(0.25).epsilon(0.05));
    }
    const Mat w1 = draw_frequencies(1.0, 10000, 2, 6);
    CHECK(std::abs(w1.col(0).mean()) < 0.05);
    CHECK(std::abs(w1.col(1).mean()) < 0.05);
}

TEST_CASE("feature dimension per family")
{
    const Eigen::Index d = 7, n = 4;
    const Eigen::Index expected[] = {2 * d * n, 2 * d, 2 * d, d, d, d * n, d * n};
    for (int i = 0; i < 7; ++i) {
        const FeatureMap map = FeatureMap::draw(kAll[i], 1.0, d, n, 1);
        CHECK(map.feature_dim() == expected[i]);
        CHECK(map.eval(Vec::Ones(n)).rows() == expected[i]);
        CHECK(map.eval(Vec::Ones(n)).cols() == n);
    }
    CHECK_THROWS_AS(FeatureMap::draw(FeatureFamily::OddSymplectic, 1.0, 5, 3, 1), ConfigError);
}

TEST_CASE("feature values at the origin")
{
    const Eigen::Index d = 6;
    CHECK(FeatureMap::draw(FeatureFamily::OddSymplectic, 1.0, d, 2, 3).eval(Vec::Zero(2)).norm() == 0.0);
    const Mat psi = FeatureMap::draw(FeatureFamily::EvenSeparable, 1.0, d, 2, 3).eval(Vec::Zero(2));
    // Every n x n block is I / sqrt(d).
    for (Eigen::Index j = 0; j < d; ++j)
        CHECK((psi.block(2 * j, 0, 2, 2) - Mat::Identity(2, 2) / std::sqrt(double(d))).norm() < 1e-15);
}

TEST_CASE("feature inner products match the spectral sum")
{
    std::mt19937_64 rng(21);
    for (FeatureFamily fam : kAll) {
        for (Eigen::Index n : {2, 4}) {
            const FeatureMap map = FeatureMap::draw(fam, 1.3, 9, n, 77);
            const Vec x = random_vec(rng, n, 2.0), z = random_vec(rng, n, 2.0);
            const Mat got = map.eval(x).transpose() * map.eval(z);
            CHECK((got - inner_product_oracle(fam, map.frequencies(), x, z)).cwiseAbs().maxCoeff() < 1e-12);
            CHECK((eval_features(map, x) - map.eval(x)).norm() == 0.0);
        }
    }
}

TEST_CASE("design block stacks transposed feature matrices")
{
    std::mt19937_64 rng(22);
    const FeatureMap map = FeatureMap::draw(FeatureFamily::Symplectic, 1.0, 5, 4, 9);
    const Mat pts = random_points(rng, 6, 4);
    const Mat block = map.design_block(pts, 2, 3);
    REQUIRE(block.rows() == 12);
    REQUIRE(block.cols() == map.feature_dim());
    for (Eigen::Index i = 0; i < 3; ++i)
        CHECK((block.middleRows(4 * i, 4) - map.eval(pts.row(2 + i).transpose()).transpose()).norm() == 0.0);
}

TEST_CASE("random features approximate the exact kernels")
{
    std::mt19937_64 rng(23);
    for (FeatureFamily fam : kAll) {
        const KernelSpec spec = equivalent_kernel(fam, 1.0);
        const FeatureMap map = FeatureMap::draw(fam, 1.0, 50000, 2, 1000 + static_cast<int>(fam));
        for (int k = 0; k < 5; ++k) {
            const Vec x = random_vec(rng, 2), z = random_vec(rng, 2);
            const Mat approx = map.eval(x).transpose() * map.eval(z);
            CHECK((approx - eval_kernel(spec, x, z)).cwiseAbs().maxCoeff() <= 0.02);
        }
    }
}

TEST_CASE("seed-averaged approximation error shrinks as d doubles")
{
    std::mt19937_64 rng(24);
    std::vector<std::pair<Vec, Vec>> pairs;
    for (int k = 0; k < 4; ++k) pairs.emplace_back(random_vec(rng, 2), random_vec(rng, 2));
    const KernelSpec spec = equivalent_kernel(FeatureFamily::OddSymplectic, 1.0);
    double previous = 1e300;
    for (Eigen::Index d = 10; d <= 2560; d *= 2) {
        double err = 0.0;
        for (int s = 0; s < 50; ++s) {
            const FeatureMap map = FeatureMap::draw(FeatureFamily::OddSymplectic, 1.0, d, 2, derive_seed(9, "trend", d, s));
            for (const auto& [x, z] : pairs)
                err += (map.eval(x).transpose() * map.eval(z) - eval_kernel(spec, x, z)).cwiseAbs().mean();
        }
        CHECK(err < previous);
        previous = err;
    }
}

TEST_CASE("rff fit limits")
{
    std::mt19937_64 rng(25);
    const Mat pts = random_points(rng, 10, 2, 2.0);
    const FeatureMap map = FeatureMap::draw(FeatureFamily::OddSymplectic, 1.2, 8, 2, 3);
    const RffModel zero = rff_fit(testutil::make_dataset(pts, Mat::Zero(10, 2)), map, 1e-3);
    CHECK(zero.alpha().norm() == 0.0);
    CHECK(rff_predict(zero, random_vec(rng, 2)).norm() == 0.0);
    CHECK(rff_hamiltonian(zero, random_vec(rng, 2)) == 0.0);

    const Dataset d = testutil::make_dataset(pts, random_points(rng, 10, 2));
    const FeatureSystem sys = assemble_feature_system(d, map, 1e6);
    const RffModel heavy = rff_fit(d, map, 1e6);
    CHECK(heavy.alpha().norm() <= 1e-4 * sys.rhs.norm());
}

TEST_CASE("rff fit solves the feature normal equations on both solve paths")
{
    std::mt19937_64 rng(26);
    const Dataset d = testutil::make_dataset(random_points(rng, 15, 2, 2.0), random_points(rng, 15, 2));
    for (Eigen::Index dd : {5, 200}) {  // D < Nn and D > Nn
        for (FeatureFamily fam : kAll) {
            const FeatureMap map = FeatureMap::draw(fam, 1.1, dd, 2, 4);
            const double lambda = 1e-3;
            const RffModel m = rff_fit(d, map, lambda);
            const FeatureSystem sys = assemble_feature_system(d, map, lambda);
            CHECK(relative_residual(sys.normal, m.alpha(), sys.rhs) <= 1e-10);
        }
    }
}

TEST_CASE("feature solve equals kernel solve on the approximate Gram")
{
    std::mt19937_64 rng(27);
    const Eigen::Index n_samples = 12;
    const Dataset d = testutil::make_dataset(random_points(rng, n_samples, 2, 2.0), random_points(rng, n_samples, 2));
    const double lambda = 1e-2;
    for (Eigen::Index dd : {8, 60}) {
        const FeatureMap map = FeatureMap::draw(FeatureFamily::Symplectic, 1.0, dd, 2, 8);
        Mat phi(2 * n_samples, map.feature_dim());
        for (Eigen::Index i = 0; i < n_samples; ++i) phi.middleRows(2 * i, 2) = map.eval(d.x.row(i).transpose()).transpose();
        const Mat k = phi * phi.transpose();
        Vec y(2 * n_samples);
        for (Eigen::Index i = 0; i < n_samples; ++i) y.segment(2 * i, 2) = d.y.row(i).transpose();
        const Vec a = (k + n_samples * lambda * Mat::Identity(2 * n_samples, 2 * n_samples)).ldlt().solve(y);
        const RffModel m = rff_fit(d, map, lambda);
        for (int t = 0; t < 5; ++t) {
            const Vec x = random_vec(rng, 2, 2.0);
            const Vec kernel_pred = map.eval(x).transpose() * (phi.transpose() * a);
            CHECK((rff_predict(m, x) - kernel_pred).norm() < 1e-8);
        }
    }
}

TEST_CASE("rff predictions respect parity exactly")
{
    std::mt19937_64 rng(28);
    const Dataset d = testutil::make_dataset(random_points(rng, 10, 4, 2.0), random_points(rng, 10, 4));
    for (FeatureFamily fam : kAll) {
        if (!is_odd_family(fam) && !is_even_family(fam)) continue;
        const RffModel m = rff_fit(d, FeatureMap::draw(fam, 1.0, 30, 4, 2), 1e-3);
        for (int t = 0; t < 10; ++t) {
            const Vec x = random_vec(rng, 4, 3.0);
            if (is_odd_family(fam)) CHECK((rff_predict(m, -x) + rff_predict(m, x)).norm() < 1e-12);
            else CHECK((rff_predict(m, -x) - rff_predict(m, x)).norm() < 1e-12);
        }
        if (is_odd_family(fam)) CHECK(rff_predict(m, Vec::Zero(4)).norm() == 0.0);
    }
}

TEST_CASE("rff Hamiltonian generates the field")
{
    std::mt19937_64 rng(29);
    for (FeatureFamily fam : {FeatureFamily::Symplectic, FeatureFamily::OddSymplectic, FeatureFamily::EvenSymplectic}) {
        for (Eigen::Index n : {2, 4}) {
            const Dataset d = testutil::make_dataset(random_points(rng, 10, n, 2.0), random_points(rng, 10, n));
            const RffModel m = rff_fit(d, FeatureMap::draw(fam, 1.2, 40, n, 5), 1e-4);
            for (int t = 0; t < 20; ++t) {
                const Vec x = random_vec(rng, n, 2.0);
                const Vec f = rff_predict(m, x);
                const Vec grad = testutil::fd_gradient([&](const Vec& v) { return rff_hamiltonian(m, v); }, x);
                CHECK((f - testutil::j_times(grad)).norm() <= 1e-5 * (1.0 + f.norm()));
                if (fam == FeatureFamily::OddSymplectic)
                    CHECK(std::abs(rff_hamiltonian(m, -x) - rff_hamiltonian(m, x)) < 1e-12);
            }
        }
    }
    const Dataset d = testutil::make_dataset(random_points(rng, 4, 2), random_points(rng, 4, 2));
    const RffModel g = rff_fit(d, FeatureMap::draw(FeatureFamily::GaussianSeparable, 1.0, 4, 2, 1), 1e-3);
    CHECK_THROWS_AS(rff_hamiltonian(g, Vec::Zero(2)), UnsupportedError);
}

TEST_CASE("rff odd symplectic model tracks the exact odd symplectic fit on pendulum data")
{
    constexpr double pi = 3.14159265358979323846;
    const System pend = System::from_id("pendulum");
    const std::vector<Vec> ics{Eigen::Vector2d(2 * pi / 5, 0), Eigen::Vector2d(4 * pi / 5, 0), Eigen::Vector2d(19 * pi / 20, -4)};
    const Dataset d = generate_dataset(pend, ics, 0.7, 8, NoiseOptions{0.01, true}, 123);
    REQUIRE(d.size() == 24);
    const double sigma = 2.0, lambda = 1e-6;
    const ExactModel exact = exact_fit(d, {KernelFamily::Symplectic, sigma, Parity::Odd}, lambda);
    const RffModel rff = rff_fit(d, FeatureMap::draw(FeatureFamily::OddSymplectic, sigma, 2560, 2, 7), lambda);
    double err = 0.0;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        const Vec x = d.x.row(i).transpose();
        err += (exact_predict(exact, x) - rff_predict(rff, x)).norm();
    }
    CHECK(err / 24.0 <= 0.05);
}

TEST_CASE("feature family names round-trip")
{
    for (FeatureFamily f : kAll) CHECK(feature_family_from_string(to_string(f)) == f);
    CHECK(feature_family_from_string("gaussian") == FeatureFamily::GaussianSeparable);
    CHECK_THROWS_AS(feature_family_from_string("nope"), ConfigError);
}
