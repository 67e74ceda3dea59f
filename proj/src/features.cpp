#include "hamkrr/features.hpp"

#include "hamkrr/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hamkrr {

std::string to_string(FeatureFamily f)
{
    switch (f) {
    case FeatureFamily::GaussianSeparable: return "gaussian_separable";
    case FeatureFamily::CurlFree: return "curl_free";
    case FeatureFamily::Symplectic: return "symplectic";
    case FeatureFamily::OddSymplectic: return "odd_symplectic";
    case FeatureFamily::EvenSymplectic: return "even_symplectic";
    case FeatureFamily::OddSeparable: return "odd_separable";
    case FeatureFamily::EvenSeparable: return "even_separable";
    }
    return "unknown";
}

FeatureFamily feature_family_from_string(const std::string& s)
{
    if (s == "gaussian_separable" || s == "gaussian") return FeatureFamily::GaussianSeparable;
    if (s == "curl_free") return FeatureFamily::CurlFree;
    if (s == "symplectic") return FeatureFamily::Symplectic;
    if (s == "odd_symplectic") return FeatureFamily::OddSymplectic;
    if (s == "even_symplectic") return FeatureFamily::EvenSymplectic;
    if (s == "odd_separable") return FeatureFamily::OddSeparable;
    if (s == "even_separable") return FeatureFamily::EvenSeparable;
    throw ConfigError("unknown feature family '" + s + "'");
}

KernelSpec equivalent_kernel(FeatureFamily family, double sigma)
{
    switch (family) {
    case FeatureFamily::GaussianSeparable: return {KernelFamily::GaussianSeparable, sigma, Parity::None};
    case FeatureFamily::CurlFree: return {KernelFamily::CurlFree, sigma, Parity::None};
    case FeatureFamily::Symplectic: return {KernelFamily::Symplectic, sigma, Parity::None};
    case FeatureFamily::OddSymplectic: return {KernelFamily::Symplectic, sigma, Parity::Odd};
    case FeatureFamily::EvenSymplectic: return {KernelFamily::Symplectic, sigma, Parity::Even};
    case FeatureFamily::OddSeparable: return {KernelFamily::GaussianSeparable, sigma, Parity::Odd};
    case FeatureFamily::EvenSeparable: return {KernelFamily::GaussianSeparable, sigma, Parity::Even};
    }
    throw ConfigError("unknown feature family");
}

bool is_symplectic(FeatureFamily family)
{
    return family == FeatureFamily::Symplectic || family == FeatureFamily::OddSymplectic ||
           family == FeatureFamily::EvenSymplectic;
}

Mat draw_frequencies(double sigma, Eigen::Index d, Eigen::Index n, std::uint64_t seed)
{
    if (d < 1 || n < 1) throw InputError("draw_frequencies: d and n must be positive");
    if (!(sigma > 0.0)) throw ConfigError("draw_frequencies: sigma must be positive");
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Mat w(d, n);
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index k = 0; k < n; ++k) w(j, k) = normal(rng) / sigma;
    return w;
}

FeatureMap::FeatureMap(FeatureFamily family, double sigma, Mat frequencies, std::uint64_t seed)
    : family_(family), sigma_(sigma), frequencies_(std::move(frequencies)), seed_(seed)
{
    if (frequencies_.rows() < 1 || frequencies_.cols() < 1)
        throw InputError("FeatureMap: empty frequency list");
    equivalent_kernel(family_, sigma_).validate(frequencies_.cols());
}

FeatureMap FeatureMap::draw(FeatureFamily family, double sigma, Eigen::Index d, Eigen::Index n,
                            std::uint64_t seed)
{
    equivalent_kernel(family, sigma).validate(n);
    return FeatureMap(family, sigma, draw_frequencies(sigma, d, n, seed), seed);
}

Eigen::Index FeatureMap::feature_dim() const
{
    switch (family_) {
    case FeatureFamily::GaussianSeparable: return 2 * d() * n();
    case FeatureFamily::CurlFree:
    case FeatureFamily::Symplectic: return 2 * d();
    case FeatureFamily::OddSymplectic:
    case FeatureFamily::EvenSymplectic: return d();
    case FeatureFamily::OddSeparable:
    case FeatureFamily::EvenSeparable: return d() * n();
    }
    return 0;
}

namespace {

// Columns of W^T (or J W^T for symplectic families): the B(w_j) direction per frequency.
Mat directions(const FeatureMap& map)
{
    Mat dirs = map.frequencies().transpose();  // n x d
    if (is_symplectic(map.family())) {
        const Eigen::Index m = map.n() / 2;
        Mat jd(dirs.rows(), dirs.cols());
        jd.topRows(m) = dirs.bottomRows(m);
        jd.bottomRows(m) = -dirs.topRows(m);
        return jd;
    }
    return dirs;
}

// Writes Psi(x)^T (n x D) into `out` given the per-frequency cos/sin values.
void fill_transposed(FeatureFamily family, const Mat& dirs, const Vec& c, const Vec& s,
                     Eigen::Ref<Mat> out)
{
    const Eigen::Index d = c.size();
    const Eigen::Index n = out.rows();
    out.setZero();
    switch (family) {
    case FeatureFamily::GaussianSeparable:
        for (Eigen::Index j = 0; j < d; ++j)
            for (Eigen::Index k = 0; k < n; ++k) {
                out(k, j * n + k) = c(j);
                out(k, d * n + j * n + k) = s(j);
            }
        break;
    case FeatureFamily::CurlFree:
    case FeatureFamily::Symplectic:
        out.leftCols(d) = dirs * c.asDiagonal();
        out.rightCols(d) = dirs * s.asDiagonal();
        break;
    case FeatureFamily::OddSymplectic: out = dirs * s.asDiagonal(); break;
    case FeatureFamily::EvenSymplectic: out = dirs * c.asDiagonal(); break;
    case FeatureFamily::OddSeparable:
        for (Eigen::Index j = 0; j < d; ++j)
            for (Eigen::Index k = 0; k < n; ++k) out(k, j * n + k) = s(j);
        break;
    case FeatureFamily::EvenSeparable:
        for (Eigen::Index j = 0; j < d; ++j)
            for (Eigen::Index k = 0; k < n; ++k) out(k, j * n + k) = c(j);
        break;
    }
}

}  // namespace

Mat FeatureMap::eval(const Vec& x) const
{
    require_dim(x, n(), "eval_features");
    const double scale = 1.0 / std::sqrt(static_cast<double>(d()));
    const Vec proj = frequencies_ * x;
    const Vec c = proj.array().cos() * scale;
    const Vec s = proj.array().sin() * scale;
    Mat psi_t(n(), feature_dim());
    fill_transposed(family_, directions(*this), c, s, psi_t);
    return psi_t.transpose();
}

Mat FeatureMap::design_block(const Mat& points, Eigen::Index first, Eigen::Index count) const
{
    if (points.cols() != n()) throw InputError("design_block: dimension mismatch");
    const double scale = 1.0 / std::sqrt(static_cast<double>(d()));
    const Mat dirs = directions(*this);
    const Mat proj = points.middleRows(first, count) * frequencies_.transpose();  // count x d
    Mat block(count * n(), feature_dim());
    for (Eigen::Index i = 0; i < count; ++i) {
        const Vec c = proj.row(i).transpose().array().cos() * scale;
        const Vec s = proj.row(i).transpose().array().sin() * scale;
        fill_transposed(family_, dirs, c, s, block.middleRows(i * n(), n()));
    }
    return block;
}

Vec FeatureMap::apply(const Vec& x, const Vec& alpha) const
{
    require_dim(x, n(), "rff_predict");
    if (alpha.size() != feature_dim()) throw InputError("rff_predict: coefficient length mismatch");
    const Eigen::Index dd = d();
    const Eigen::Index nn = n();
    const double scale = 1.0 / std::sqrt(static_cast<double>(dd));
    const Vec proj = frequencies_ * x;
    const Vec c = proj.array().cos() * scale;
    const Vec s = proj.array().sin() * scale;

    auto block_sum = [&](Eigen::Index offset, const Vec& trig) {
        const Eigen::Map<const Mat> a(alpha.data() + offset, nn, dd);
        return Vec(a * trig);
    };

    switch (family_) {
    case FeatureFamily::GaussianSeparable: return block_sum(0, c) + block_sum(dd * nn, s);
    case FeatureFamily::OddSeparable: return block_sum(0, s);
    case FeatureFamily::EvenSeparable: return block_sum(0, c);
    case FeatureFamily::CurlFree: {
        const Vec weights = c.cwiseProduct(alpha.head(dd)) + s.cwiseProduct(alpha.tail(dd));
        return frequencies_.transpose() * weights;
    }
    case FeatureFamily::Symplectic: {
        const Vec weights = c.cwiseProduct(alpha.head(dd)) + s.cwiseProduct(alpha.tail(dd));
        return apply_j(frequencies_.transpose() * weights);
    }
    case FeatureFamily::OddSymplectic:
        return apply_j(frequencies_.transpose() * s.cwiseProduct(alpha));
    case FeatureFamily::EvenSymplectic:
        return apply_j(frequencies_.transpose() * c.cwiseProduct(alpha));
    }
    return Vec::Zero(nn);
}

double FeatureMap::potential(const Vec& x, const Vec& alpha) const
{
    require_dim(x, n(), "rff_hamiltonian");
    if (alpha.size() != feature_dim()) throw InputError("rff_hamiltonian: coefficient length mismatch");
    const Eigen::Index dd = d();
    const double scale = 1.0 / std::sqrt(static_cast<double>(dd));
    const Vec proj = frequencies_ * x;
    const Vec c = proj.array().cos() * scale;
    const Vec s = proj.array().sin() * scale;

    // grad sin(w^T x) = cos(w^T x) w and grad(-cos(w^T x)) = sin(w^T x) w.
    switch (family_) {
    case FeatureFamily::Symplectic: return s.dot(alpha.head(dd)) - c.dot(alpha.tail(dd));
    case FeatureFamily::OddSymplectic: return -c.dot(alpha);
    case FeatureFamily::EvenSymplectic: return s.dot(alpha);
    default:
        throw UnsupportedError("learned Hamiltonian is not defined for feature family " +
                               to_string(family_));
    }
}

Mat eval_features(const FeatureMap& map, const Vec& x) { return map.eval(x); }

RffModel::RffModel(FeatureMap map, Vec alpha, double lambda, RffTrainingInfo info)
    : map_(std::move(map)), alpha_(std::move(alpha)), lambda_(lambda), info_(std::move(info))
{
    if (alpha_.size() != map_.feature_dim()) throw InputError("RffModel: coefficient length mismatch");
}

Vec RffModel::predict(const Vec& x) const { return map_.apply(x, alpha_); }

double RffModel::hamiltonian(const Vec& x) const { return map_.potential(x, alpha_); }

namespace {

constexpr Eigen::Index kChunk = 128;

Vec stacked_targets(const Mat& y)
{
    const Mat yt = y.transpose();
    return Eigen::Map<const Vec>(yt.data(), yt.size());
}

void check_fit_inputs(const Dataset& data, const FeatureMap& map, double lambda)
{
    if (data.empty()) throw InputError("rff_fit: empty dataset");
    data.validate();
    if (data.dim() != map.n()) throw InputError("rff_fit: dataset and feature map dimensions differ");
    if (!(lambda > 0.0)) throw ConfigError("regularization lambda must be positive");
}

}  // namespace

FeatureSystem assemble_feature_system(const Dataset& data, const FeatureMap& map, double lambda)
{
    check_fit_inputs(data, map, lambda);
    const Eigen::Index big_d = map.feature_dim();
    FeatureSystem sys;
    sys.normal = Mat::Zero(big_d, big_d);
    sys.rhs = Vec::Zero(big_d);
    for (Eigen::Index first = 0; first < data.size(); first += kChunk) {
        const Eigen::Index count = std::min(kChunk, data.size() - first);
        const Mat block = map.design_block(data.x, first, count);
        sys.normal.selfadjointView<Eigen::Lower>().rankUpdate(block.transpose());
        const Vec y = stacked_targets(data.y.middleRows(first, count));
        sys.rhs.noalias() += block.transpose() * y;
    }
    sys.normal.diagonal().array() += static_cast<double>(data.size()) * lambda;
    sys.normal.triangularView<Eigen::StrictlyUpper>() = sys.normal.transpose();
    return sys;
}

RffModel rff_fit(const Dataset& data, const FeatureMap& map, double lambda)
{
    check_fit_inputs(data, map, lambda);
    const Eigen::Index big_d = map.feature_dim();
    const Eigen::Index rows = data.size() * map.n();
    const double shift = static_cast<double>(data.size()) * lambda;

    RffTrainingInfo info{data.size(), data.meta.noise_std, data.meta.system};
    if (big_d <= rows) {
        const FeatureSystem sys = assemble_feature_system(data, map, lambda);
        return RffModel(map, solve_spd(sys.normal, sys.rhs), lambda, info);
    }

    // Dual form: alpha = Phi^T (Phi Phi^T + N lambda I)^{-1} y.
    const Mat phi = map.design_block(data.x, 0, data.size());
    Mat k = Mat::Zero(rows, rows);
    k.selfadjointView<Eigen::Lower>().rankUpdate(phi);
    k.diagonal().array() += shift;
    k.triangularView<Eigen::StrictlyUpper>() = k.transpose();
    const Vec beta = solve_spd(k, stacked_targets(data.y));
    Vec alpha = phi.transpose() * beta;
    if (!alpha.allFinite()) throw NumericalError("rff_fit: non-finite coefficients");
    return RffModel(map, std::move(alpha), lambda, info);
}

Vec rff_predict(const RffModel& model, const Vec& x) { return model.predict(x); }

double rff_hamiltonian(const RffModel& model, const Vec& x) { return model.hamiltonian(x); }

}  // namespace hamkrr
