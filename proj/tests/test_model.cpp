#include "hamkrr/metrics.hpp"
#include "hamkrr/model.hpp"
#include "hamkrr/systems.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace hamkrr;
using testutil::random_points;
using testutil::random_vec;

namespace {

constexpr double pi = std::numbers::pi;

Dataset pendulum_data(double noise, std::uint64_t seed = 1)
{
    const std::vector<Vec> ics{Eigen::Vector2d(2 * pi / 5, 0), Eigen::Vector2d(4 * pi / 5, 0),
                               Eigen::Vector2d(19 * pi / 20, -4)};
    return generate_dataset(System::from_id("pendulum"), ics, 0.7, 8, NoiseOptions{noise, true}, seed);
}

double train_mse(const LearnedModel& m, const Dataset& d)
{
    double s = 0.0;
    for (Eigen::Index i = 0; i < d.size(); ++i)
        s += (m.predict(d.x.row(i).transpose()) - d.y.row(i).transpose()).squaredNorm();
    return s / static_cast<double>(d.size());
}

}  // namespace

TEST_CASE("zero targets give a zero predictor for both variants")
{
    std::mt19937_64 rng(41);
    const Dataset d = testutil::make_dataset(random_points(rng, 8, 2), Mat::Zero(8, 2));
    const LearnedModel exact = fit(d, KernelSpec{KernelFamily::Symplectic, 1.0, Parity::Odd}, 1e-3);
    const LearnedModel rff = fit(d, FeatureMap::draw(FeatureFamily::OddSymplectic, 1.0, 20, 2, 3), 1e-3);
    for (const LearnedModel* m : {&exact, &rff}) {
        const Vec x = random_vec(rng, 2);
        CHECK(m->predict(x).norm() == 0.0);
        CHECK(learned_hamiltonian(*m, x) == 0.0);
        const Trajectory tr = rollout(*m, x, 1.0, 5);
        for (const Vec& s : tr.x) CHECK((s - x).norm() == 0.0);
    }
}

TEST_CASE("model accessors")
{
    const Dataset d = pendulum_data(0.01);
    const LearnedModel exact = fit(d, KernelSpec{KernelFamily::Symplectic, 2.0, Parity::Odd}, 1e-4);
    CHECK(exact.is_exact());
    CHECK(exact.is_symplectic());
    CHECK(exact.is_odd());
    CHECK(exact.sigma() == 2.0);
    CHECK(exact.lambda() == 1e-4);
    CHECK(exact.dim() == 2);
    const LearnedModel g = fit(d, FeatureMap::draw(FeatureFamily::GaussianSeparable, 1.5, 10, 2, 1), 1e-3);
    CHECK(!g.is_exact());
    CHECK(!g.is_symplectic());
    CHECK(!g.is_odd());
    CHECK(g.family_name() == "gaussian_separable");
    CHECK_THROWS_AS(g.hamiltonian(Vec::Zero(2)), UnsupportedError);
}

TEST_CASE("refitting is deterministic")
{
    const Dataset d = pendulum_data(0.01);
    const ModelRecipe r = ModelRecipe::features(FeatureFamily::OddSymplectic, 100, 77);
    const LearnedModel a = r.fit(d, 2.0, 1e-5), b = r.fit(d, 2.0, 1e-5);
    CHECK((a.rff().alpha() - b.rff().alpha()).norm() == 0.0);
    CHECK(r.name() == "odd_symplectic");
    CHECK(ModelRecipe::exact_kernel(KernelFamily::Symplectic, Parity::Odd).name() == "odd_symplectic");
}

TEST_CASE("equal-budget odd symplectic and Gaussian feature models on noiseless pendulum data")
{
    const Dataset d = pendulum_data(0.0);
    // Equal coefficient budget: D = 400 for both.
    const LearnedModel odd = fit(d, FeatureMap::draw(FeatureFamily::OddSymplectic, 2.0, 400, 2, 5), 1e-8);
    const LearnedModel gauss = fit(d, FeatureMap::draw(FeatureFamily::GaussianSeparable, 2.0, 100, 2, 5), 1e-8);
    CHECK(train_mse(odd, d) <= 1e-5);
    CHECK(train_mse(gauss, d) <= 1e-5);

    // Away from the data only the structured model follows the true field.
    const System pend = System::from_id("pendulum");
    const Trajectory test = integrate(pend.field(), TrajectorySpec{Eigen::Vector2d(pi / 2, 0), 2.0, 101});
    double e_odd = 0.0, e_gauss = 0.0;
    for (const Vec& x : test.x) {
        e_odd += (odd.predict(x) - pend.dynamics(x)).squaredNorm();
        e_gauss += (gauss.predict(x) - pend.dynamics(x)).squaredNorm();
    }
    CHECK(e_odd < 1e-2 * e_gauss);
}

TEST_CASE("odd models have odd flows and conserved Hamiltonians")
{
    const Dataset d = pendulum_data(0.01);
    const LearnedModel rff = fit(d, FeatureMap::draw(FeatureFamily::OddSymplectic, 2.0, 400, 2, 9), 1e-5);
    const LearnedModel exact = fit(d, KernelSpec{KernelFamily::Symplectic, 2.0, Parity::Odd}, 1e-5);
    for (const LearnedModel* m : {&rff, &exact}) {
        const Vec x0 = Eigen::Vector2d(pi / 2, 0.0);
        const Trajectory fwd = rollout(*m, x0, 2.0, 41), mirrored = rollout(*m, -x0, 2.0, 41);
        for (std::size_t k = 0; k < fwd.size(); ++k) CHECK((fwd.x[k] + mirrored.x[k]).norm() <= 1e-8);
        const MeanVar h = hamiltonian_stats([m](const Vec& x) { return m->hamiltonian(x); }, fwd);
        CHECK(h.variance <= 1e-6);
    }
}

TEST_CASE("learned Hamiltonian generates the learned field; Jacobian condition holds")
{
    std::mt19937_64 rng(42);
    const Dataset d = testutil::make_dataset(random_points(rng, 20, 4, 2.0), random_points(rng, 20, 4));
    const LearnedModel rff = fit(d, FeatureMap::draw(FeatureFamily::Symplectic, 1.5, 60, 4, 2), 1e-4);
    const LearnedModel exact = fit(d, KernelSpec{KernelFamily::Symplectic, 1.5, Parity::None}, 1e-4);
    const Mat j = symplectic_matrix(4);
    for (const LearnedModel* m : {&rff, &exact}) {
        for (int k = 0; k < 10; ++k) {
            const Vec x = random_vec(rng, 4, 2.0);
            const Vec f = m->predict(x);
            const Vec grad = testutil::fd_gradient([m](const Vec& v) { return learned_hamiltonian(*m, v); }, x);
            CHECK((f - testutil::j_times(grad)).norm() <= 1e-5 * (1.0 + f.norm()));
            Mat jac(4, 4);
            for (Eigen::Index c = 0; c < 4; ++c) {
                Vec a = x, b = x;
                a[c] += 1e-5;
                b[c] -= 1e-5;
                jac.col(c) = (m->predict(a) - m->predict(b)) / 2e-5;
            }
            const Mat a = j.transpose() * jac;
            CHECK((a - a.transpose()).norm() <= 1e-5 * (1.0 + a.norm()));
        }
    }
}

TEST_CASE("centered learned Hamiltonian tracks the true one")
{
    const Dataset d = pendulum_data(0.0);
    const LearnedModel m = fit(d, FeatureMap::draw(FeatureFamily::OddSymplectic, 2.0, 400, 2, 4), 1e-6);
    const System pend = System::from_id("pendulum");
    const Trajectory learned = rollout(m, Eigen::Vector2d(pi / 2, 0), 2.0, 51);
    std::vector<double> diff;
    for (const Vec& x : learned.x) diff.push_back(m.hamiltonian(x) - m.hamiltonian(Vec::Zero(2)));
    // The learned energy is constant along its own flow, so the centered values are too.
    CHECK(mean_variance(diff).variance <= 1e-6);
}

TEST_CASE("dataset digest")
{
    const Dataset a = pendulum_data(0.01, 1), b = pendulum_data(0.01, 2);
    CHECK(dataset_digest(a) == dataset_digest(pendulum_data(0.01, 1)));
    CHECK(dataset_digest(a) != dataset_digest(b));
    CHECK(dataset_digest(a).size() == 16);
}

TEST_CASE("rollout rejects mismatched dimensions")
{
    const LearnedModel m = fit(pendulum_data(0.01), KernelSpec{KernelFamily::Symplectic, 2.0, Parity::Odd}, 1e-4);
    CHECK_THROWS_AS(rollout(m, Vec::Zero(4), 1.0, 3), InputError);
}
