#include "hamkrr/sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>

namespace hamkrr {

void TrajectorySpec::validate() const
{
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw InputError("trajectory: t_end must be positive");
    if (n_steps < 2) throw InputError("trajectory: need at least two output samples");
    if (!(rel_tol > 0.0 && rel_tol <= 1e-2) || !(abs_tol > 0.0 && abs_tol <= 1e-2))
        throw InputError("trajectory: tolerances must lie in (0, 1e-2]");
    if (x0.size() == 0 || !x0.allFinite()) throw InputError("trajectory: invalid initial state");
}

namespace {

// Dormand-Prince 8(5,3) tableau: 12 stages plus the first-same-as-last evaluation.
constexpr int stages = 12;
constexpr std::array<double, stages> C{0.0, 0.05260015195876773, 0.0789002279381516, 0.1183503419072274, 0.2816496580927726, 0.3333333333333333, 0.25, 0.3076923076923077, 0.6512820512820513, 0.6, 0.8571428571428571, 1.0};
constexpr std::array<std::array<double, stages>, stages> A{{
    {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.05260015195876773, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.0197250569845379, 0.0591751709536137, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.02958758547680685, 0.0, 0.08876275643042054, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.2413651341592667, 0.0, -0.8845494793282861, 0.924834003261792, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.037037037037037035, 0.0, 0.0, 0.17082860872947386, 0.12546768756682242, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.037109375, 0.0, 0.0, 0.17025221101954405, 0.06021653898045596, -0.017578125, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.03709200011850479, 0.0, 0.0, 0.17038392571223998, 0.10726203044637328, -0.015319437748624402, 0.008273789163814023, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.6241109587160757, 0.0, 0.0, -3.3608926294469414, -0.868219346841726, 27.59209969944671, 20.154067550477894, -43.48988418106996, 0.0, 0.0, 0.0, 0.0},
    {0.47766253643826434, 0.0, 0.0, -2.4881146199716677, -0.590290826836843, 21.230051448181193, 15.279233632882423, -33.28821096898486, -0.020331201708508627, 0.0, 0.0, 0.0},
    {-0.9371424300859873, 0.0, 0.0, 5.186372428844064, 1.0914373489967295, -8.149787010746927, -18.52006565999696, 22.739487099350505, 2.4936055526796523, -3.0467644718982196, 0.0, 0.0},
    {2.273310147516538, 0.0, 0.0, -10.53449546673725, -2.0008720582248625, -17.9589318631188, 27.94888452941996, -2.8589982771350235, -8.87285693353063, 12.360567175794303, 0.6433927460157636, 0.0},
}};
constexpr std::array<double, stages> B{0.054293734116568765, 0.0, 0.0, 0.0, 0.0, 4.450312892752409, 1.8915178993145003, -5.801203960010585, 0.3111643669578199, -0.1521609496625161, 0.20136540080403034, 0.04471061572777259};
constexpr std::array<double, stages> E3{-0.18980075407240762, 0.0, 0.0, 0.0, 0.0, 4.450312892752409, 1.8915178993145003, -5.801203960010585, -0.4226823213237919, -0.1521609496625161, 0.20136540080403034, 0.02265179219836082};
constexpr std::array<double, stages> E5{0.01312004499419488, 0.0, 0.0, 0.0, 0.0, -1.2251564463762044, -0.4957589496572502, 1.6643771824549864, -0.35032884874997366, 0.3341791187130175, 0.08192320648511571, -0.022355307863886294};

// Blended 5th/3rd-order error estimate, scaled by the mixed tolerance.
double error_norm(const Vec& err5, const Vec& err3, const Vec& y0, const Vec& y1, double h, double rtol,
                  double atol)
{
    const Vec scale = (y0.cwiseAbs().cwiseMax(y1.cwiseAbs()) * rtol).array() + atol;
    const double n5 = err5.cwiseQuotient(scale).squaredNorm();
    const double n3 = err3.cwiseQuotient(scale).squaredNorm();
    if (n5 == 0.0 && n3 == 0.0) return 0.0;
    return std::abs(h) * n5 / std::sqrt((n5 + 0.01 * n3) * static_cast<double>(y0.size()));
}

Vec evaluate(const VectorField& f, const Vec& x, double t)
{
    Vec v = f(x);
    if (v.size() != x.size() || !v.allFinite())
        throw IntegrationError("vector field returned a non-finite value at t = " + std::to_string(t), t);
    return v;
}

}  // namespace

Trajectory integrate(const VectorField& f, const TrajectorySpec& spec)
{
    spec.validate();
    const double rtol = spec.rel_tol;
    const double atol = spec.abs_tol;
    const double t_end = spec.t_end;
    const int n_out = spec.n_steps;

    Trajectory out;
    out.t.reserve(static_cast<std::size_t>(n_out));
    out.x.reserve(static_cast<std::size_t>(n_out));
    auto output_time = [&](int k) { return t_end * static_cast<double>(k) / static_cast<double>(n_out - 1); };

    double t = 0.0;
    Vec y = spec.x0;
    Vec k1 = evaluate(f, y, t);
    out.t.push_back(0.0);
    out.x.push_back(y);
    int next = 1;

    // Initial step from the ratio of state and derivative scales.
    const Vec sc = (y.cwiseAbs() * rtol).array() + atol;
    const double d0 = std::sqrt(y.cwiseQuotient(sc).squaredNorm() / static_cast<double>(y.size()));
    const double d1n = std::sqrt(k1.cwiseQuotient(sc).squaredNorm() / static_cast<double>(y.size()));
    double h = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    h = std::min(h, t_end);

    std::vector<Vec> k(stages);
    const long max_steps = 10'000'000;
    for (long step = 0; next < n_out; ++step) {
        if (step > max_steps) throw IntegrationError("too many integration steps", t);
        if (h < 1e-14 * std::max(1.0, std::abs(t)))
            throw IntegrationError("step size underflow at t = " + std::to_string(t), t);
        // Steps land on every output time, so each sample is a full step result.
        const double target = output_time(next);
        const double h_proposed = h;
        const bool last = t + h >= target;
        if (last) h = target - t;

        k[0] = k1;
        for (int i = 1; i < stages; ++i) {
            Vec dy = A[i][0] * k[0];
            for (int j = 1; j < i; ++j)
                if (A[i][j] != 0.0) dy += A[i][j] * k[j];
            k[i] = evaluate(f, y + h * dy, t + C[i] * h);
        }
        Vec incr = Vec::Zero(y.size()), err5 = Vec::Zero(y.size()), err3 = Vec::Zero(y.size());
        for (int i = 0; i < stages; ++i) {
            incr += B[i] * k[i];
            err5 += E5[i] * k[i];
            err3 += E3[i] * k[i];
        }
        const Vec y1 = y + h * incr;
        const double en = error_norm(err5, err3, y, y1, h, rtol, atol);
        if (!std::isfinite(en)) throw IntegrationError("non-finite error estimate", t);

        if (en <= 1.0) {
            t = last ? target : t + h;
            y = y1;
            if (!y.allFinite()) throw IntegrationError("state became non-finite", t);
            k1 = evaluate(f, y, t);
            if (last) {
                out.t.push_back(t);
                out.x.push_back(y);
                ++next;
            }
        }
        const double factor = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -1.0 / 8.0), 0.2, 10.0);
        if (en <= 1.0)
            h = last ? std::max(h * factor, h_proposed) : h * factor;
        else
            h *= std::min(1.0, factor);
    }
    if (static_cast<int>(out.t.size()) != n_out)
        throw IntegrationError("integration ended before the final output time", t);
    return out;
}

std::vector<Vec> sample_ics(const Vec& lower, const Vec& upper, std::size_t count, std::uint64_t seed)
{
    if (lower.size() != upper.size() || lower.size() == 0)
        throw InputError("sample_ics: bounds differ in dimension");
    if (!((upper - lower).array() > 0.0).all()) throw InputError("sample_ics: degenerate box");
    Rng rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Vec> points;
    points.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Vec x(lower.size());
        for (Eigen::Index k = 0; k < x.size(); ++k) x(k) = lower(k) + (upper(k) - lower(k)) * unit(rng);
        points.push_back(std::move(x));
    }
    return points;
}

namespace {

Vec gaussian_noise(Rng& rng, Eigen::Index n, double sigma)
{
    Vec v(n);
    if (sigma == 0.0) return v.setZero();
    std::normal_distribution<double> normal(0.0, sigma);
    for (Eigen::Index k = 0; k < n; ++k) v(k) = normal(rng);
    return v;
}

void check_noise(const NoiseOptions& noise)
{
    if (!(noise.sigma_n >= 0.0) || !std::isfinite(noise.sigma_n))
        throw InputError("noise standard deviation must be non-negative");
}

// Adds noise to one clean sample and returns (x, y).
std::pair<Vec, Vec> noisy_sample(const System& system, const Vec& clean, const NoiseOptions& noise,
                                 Rng& rng)
{
    const Eigen::Index n = clean.size();
    const Vec nx = gaussian_noise(rng, n, noise.sigma_n);
    const Vec ny = gaussian_noise(rng, n, noise.sigma_n);
    const Vec x = clean + nx;
    const Vec y = (noise.derivative_at_clean_state ? system.dynamics(clean) : system.dynamics(x)) + ny;
    return {x, y};
}

}  // namespace

Dataset generate_dataset(const System& system, const std::vector<Vec>& ics, double t_end,
                         int n_steps, const NoiseOptions& noise, std::uint64_t seed)
{
    check_noise(noise);
    if (ics.empty()) throw InputError("generate_dataset: no initial conditions");
    const Eigen::Index n = system.dim();
    const auto total = static_cast<Eigen::Index>(ics.size()) * n_steps;

    Dataset data;
    data.x.resize(total, n);
    data.y.resize(total, n);
    data.meta.system = system.id();
    data.meta.params_digest = system.params_digest();
    data.meta.noise_std = noise.sigma_n;
    data.meta.seed = seed;

    const VectorField f = system.field();
    Eigen::Index row = 0;
    for (std::size_t i = 0; i < ics.size(); ++i) {
        if (ics[i].size() != n)
            throw InputError("generate_dataset: initial condition " + std::to_string(i) +
                             " has the wrong dimension");
        Trajectory traj;
        try {
            traj = integrate(f, TrajectorySpec{ics[i], t_end, n_steps});
        } catch (const IntegrationError& e) {
            throw IntegrationError("initial condition " + std::to_string(i) + ": " + e.what(),
                                   e.failure_time());
        }
        Rng rng(derive_seed(seed, "trajectory-noise", i));
        data.meta.trajectory_starts.push_back(static_cast<std::size_t>(row));
        for (std::size_t k = 0; k < traj.size(); ++k, ++row) {
            auto [x, y] = noisy_sample(system, traj.x[k], noise, rng);
            data.x.row(row) = x.transpose();
            data.y.row(row) = y.transpose();
            data.traj_id.push_back(static_cast<int>(i));
            data.t.push_back(traj.t[k]);
        }
    }
    return data;
}

Dataset sample_point_dataset(const System& system, const std::vector<Vec>& points,
                             const NoiseOptions& noise, std::uint64_t seed)
{
    check_noise(noise);
    if (points.empty()) throw InputError("sample_point_dataset: no points");
    const Eigen::Index n = system.dim();
    Dataset data;
    data.x.resize(static_cast<Eigen::Index>(points.size()), n);
    data.y.resize(static_cast<Eigen::Index>(points.size()), n);
    data.meta.system = system.id();
    data.meta.params_digest = system.params_digest();
    data.meta.noise_std = noise.sigma_n;
    data.meta.seed = seed;
    Rng rng(derive_seed(seed, "point-noise"));
    for (std::size_t i = 0; i < points.size(); ++i) {
        require_dim(points[i], n, "sample_point_dataset");
        auto [x, y] = noisy_sample(system, points[i], noise, rng);
        data.x.row(static_cast<Eigen::Index>(i)) = x.transpose();
        data.y.row(static_cast<Eigen::Index>(i)) = y.transpose();
        data.traj_id.push_back(-1);
        data.t.push_back(0.0);
    }
    return data;
}

}  // namespace hamkrr
