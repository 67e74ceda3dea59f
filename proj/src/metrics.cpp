#include "hamkrr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace hamkrr {

MeanVar mean_variance(const std::vector<double>& values)
{
    if (values.empty()) throw InputError("mean_variance: no values");
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    return {mean, var / n};
}

namespace {

void check_matched(const Trajectory& a, const Trajectory& b)
{
    if (a.size() != b.size() || a.size() == 0) throw InputError("trajectory_mse: trajectory lengths differ");
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (std::abs(a.t[k] - b.t[k]) > 1e-12 * std::max(1.0, std::abs(a.t[k])))
            throw InputError("trajectory_mse: sample times differ");
        if (a.x[k].size() != b.x[k].size()) throw InputError("trajectory_mse: state dimensions differ");
    }
}

}  // namespace

double trajectory_mse(const Trajectory& truth, const Trajectory& learned)
{
    check_matched(truth, learned);
    double sum = 0.0;
    for (std::size_t k = 0; k < truth.size(); ++k) sum += (truth.x[k] - learned.x[k]).squaredNorm();
    return sum / static_cast<double>(truth.size());
}

double trajectory_mse(const std::vector<Trajectory>& truth, const std::vector<Trajectory>& learned)
{
    if (truth.size() != learned.size() || truth.empty())
        throw InputError("trajectory_mse: trajectory counts differ");
    double sum = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) sum += trajectory_mse(truth[i], learned[i]);
    return sum / static_cast<double>(truth.size());
}

std::vector<double> pointwise_error(const Trajectory& truth, const Trajectory& learned)
{
    check_matched(truth, learned);
    std::vector<double> err(truth.size());
    for (std::size_t k = 0; k < truth.size(); ++k) err[k] = (truth.x[k] - learned.x[k]).norm();
    return err;
}

MeanVar odd_error(const VectorField& f, const StateBox& box, std::size_t count, std::uint64_t seed)
{
    if (count < 1) throw InputError("odd_error: count must be positive");
    Vec lower = box.lower;
    lower(0) = std::max(0.0, lower(0));
    if (!((box.upper - lower).array() > 0.0).all()) throw InputError("odd_error: empty half box");
    Rng rng(derive_seed(seed, "odd-error"));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> errors;
    errors.reserve(count);
    Vec x(lower.size());
    for (std::size_t i = 0; i < count; ++i) {
        for (Eigen::Index k = 0; k < x.size(); ++k) x(k) = lower(k) + (box.upper(k) - lower(k)) * unit(rng);
        errors.push_back((f(x) + f(-x)).norm());
    }
    return mean_variance(errors);
}

MeanVar hamiltonian_stats(const ScalarField& h, const Trajectory& trajectory)
{
    if (trajectory.size() == 0) throw InputError("hamiltonian_stats: empty trajectory");
    std::vector<double> values;
    values.reserve(trajectory.size());
    for (const Vec& x : trajectory.x) values.push_back(h(x));
    return mean_variance(values);
}

Mat fd_jacobian(const VectorField& f, const Vec& x, double step)
{
    const Eigen::Index n = x.size();
    Mat jac(n, n);
    Vec xp = x, xm = x;
    for (Eigen::Index k = 0; k < n; ++k) {
        xp(k) = x(k) + step;
        xm(k) = x(k) - step;
        jac.col(k) = (f(xp) - f(xm)) / (2.0 * step);
        xp(k) = x(k);
        xm(k) = x(k);
    }
    return jac;
}

double symplecticity_residual(const VectorField& f, const Vec& x, double fd_step)
{
    if (!(fd_step > 0.0 && fd_step <= 1e-2)) throw InputError("symplecticity_residual: fd_step out of range");
    const Mat jac = fd_jacobian(f, x, fd_step * (1.0 + x.norm()));
    const Mat a = symplectic_matrix(x.size()).transpose() * jac;
    return (a - a.transpose()).norm();
}

void EvalReport::check_consistency() const
{
    if (trajectory_mse.empty()) return;
    double sum = 0.0;
    for (double v : trajectory_mse) sum += v;
    const double expect = sum / static_cast<double>(trajectory_mse.size());
    if (std::abs(expect - mse) > 1e-12 * std::max(1.0, std::abs(expect)))
        throw InputError("evaluation report: aggregate MSE does not match per-trajectory values");
}

std::string render_table(const std::vector<EvalReport>& reports)
{
    std::string out;
    char line[512];
    std::snprintf(line, sizeof line, "%-10s %-22s %12s %12s %12s %12s %12s %12s\n", "system", "model",
                  "traj MSE", "e_odd mean", "e_odd var", "H mean", "H var", "H-Htrue var");
    out += line;
    for (const auto& r : reports) {
        // Table 2 reports the trajectory with the largest learned-H variance.
        const HamiltonianRow* worst = nullptr;
        for (const auto& h : r.hamiltonian)
            if (!worst || h.learned.variance > worst->learned.variance) worst = &h;
        if (worst) {
            std::snprintf(line, sizeof line, "%-10s %-22s %12.4e %12.4e %12.4e %12.4e %12.4e %12.4e\n",
                          r.system.c_str(), r.model.c_str(), r.mse, r.odd_error_model.mean,
                          r.odd_error_model.variance, worst->learned.mean, worst->learned.variance,
                          worst->centered_variance);
        } else {
            std::snprintf(line, sizeof line, "%-10s %-22s %12.4e %12.4e %12.4e %12s %12s %12s\n",
                          r.system.c_str(), r.model.c_str(), r.mse, r.odd_error_model.mean,
                          r.odd_error_model.variance, "-", "-", "-");
        }
        out += line;
    }
    if (!reports.empty()) {
        const auto& r = reports.front();
        const HamiltonianRow* worst = nullptr;
        for (const auto& h : r.hamiltonian)
            if (!worst || h.truth.variance > worst->truth.variance) worst = &h;
        std::snprintf(line, sizeof line, "%-10s %-22s %12s %12.4e %12.4e", r.system.c_str(), "true", "-",
                      r.odd_error_true.mean, r.odd_error_true.variance);
        out += line;
        if (worst) {
            std::snprintf(line, sizeof line, " %12.4e %12.4e %12s\n", worst->truth.mean, worst->truth.variance, "-");
            out += line;
        } else {
            out += "\n";
        }
    }
    return out;
}

}  // namespace hamkrr
