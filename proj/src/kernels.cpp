#include "hamkrr/kernels.hpp"

#include "hamkrr/linalg.hpp"

#include <cmath>

namespace hamkrr {

std::string to_string(KernelFamily f)
{
    switch (f) {
    case KernelFamily::GaussianSeparable: return "gaussian_separable";
    case KernelFamily::CurlFree: return "curl_free";
    case KernelFamily::Symplectic: return "symplectic";
    }
    return "unknown";
}

std::string to_string(Parity p)
{
    switch (p) {
    case Parity::None: return "none";
    case Parity::Odd: return "odd";
    case Parity::Even: return "even";
    }
    return "unknown";
}

KernelFamily kernel_family_from_string(const std::string& s)
{
    if (s == "gaussian_separable" || s == "gaussian") return KernelFamily::GaussianSeparable;
    if (s == "curl_free") return KernelFamily::CurlFree;
    if (s == "symplectic") return KernelFamily::Symplectic;
    throw ConfigError("unknown kernel family '" + s + "'");
}

Parity parity_from_string(const std::string& s)
{
    if (s == "none" || s.empty()) return Parity::None;
    if (s == "odd") return Parity::Odd;
    if (s == "even") return Parity::Even;
    throw ConfigError("unknown parity '" + s + "'");
}

void KernelSpec::validate(Eigen::Index n) const
{
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw ConfigError("kernel bandwidth sigma must be positive");
    if (n <= 0) throw InputError("kernel: state dimension must be positive");
    if (family == KernelFamily::Symplectic && n % 2 != 0)
        throw ConfigError("symplectic kernel needs an even state dimension (got " +
                          std::to_string(n) + ")");
}

namespace {

double gaussian_of(const Vec& u, double sigma)
{
    return std::exp(-u.squaredNorm() / (2.0 * sigma * sigma));
}

// G(u) a for the parity-None signature, without forming G.
Vec apply_signature(KernelFamily family, double sigma, const Vec& u, const Vec& a)
{
    const double s2 = sigma * sigma;
    const double g = gaussian_of(u, sigma);
    switch (family) {
    case KernelFamily::GaussianSeparable:
        return g * a;
    case KernelFamily::CurlFree:
        return (g / s2) * (a - u * (u.dot(a) / s2));
    case KernelFamily::Symplectic: {
        const Vec c = apply_jt(a);
        return apply_j((g / s2) * (c - u * (u.dot(c) / s2)));
    }
    }
    return Vec::Zero(a.size());
}

// Scalar potential h(u) = g(u) u^T c / sigma^2, whose gradient is G_c(u) c.
double potential(double sigma, const Vec& u, const Vec& c)
{
    return gaussian_of(u, sigma) * u.dot(c) / (sigma * sigma);
}

}  // namespace

double gaussian_scalar(const Vec& x, const Vec& z, double sigma)
{
    if (x.size() != z.size()) throw InputError("gaussian_scalar: dimension mismatch");
    if (!(sigma > 0.0)) throw ConfigError("gaussian_scalar: sigma must be positive");
    return gaussian_of(x - z, sigma);
}

Mat kernel_signature(KernelFamily family, double sigma, const Vec& u)
{
    const Eigen::Index n = u.size();
    const double s2 = sigma * sigma;
    const double g = gaussian_of(u, sigma);
    switch (family) {
    case KernelFamily::GaussianSeparable:
        return g * Mat::Identity(n, n);
    case KernelFamily::CurlFree:
        return (g / s2) * (Mat::Identity(n, n) - u * u.transpose() / s2);
    case KernelFamily::Symplectic: {
        const Mat j = symplectic_matrix(n);
        const Mat gc = (g / s2) * (Mat::Identity(n, n) - u * u.transpose() / s2);
        return j * gc * j.transpose();
    }
    }
    return Mat::Zero(n, n);
}

Mat eval_kernel(const KernelSpec& spec, const Vec& x, const Vec& z)
{
    if (x.size() != z.size()) throw InputError("eval_kernel: dimension mismatch");
    spec.validate(x.size());
    const Mat direct = kernel_signature(spec.family, spec.sigma, x - z);
    if (spec.parity == Parity::None) return direct;
    // K(-x, z) = G(-x - z) = G(x + z) since every signature here is even.
    const Mat reflected = kernel_signature(spec.family, spec.sigma, x + z);
    if (spec.parity == Parity::Odd) return 0.5 * (direct - reflected);
    return 0.5 * (direct + reflected);
}

Mat gram(const KernelSpec& spec, const Mat& points)
{
    const Eigen::Index count = points.rows();
    const Eigen::Index n = points.cols();
    if (count == 0) throw InputError("gram: empty point list");
    spec.validate(n);

    Mat k(count * n, count * n);
    for (Eigen::Index i = 0; i < count; ++i) {
        const Vec xi = points.row(i).transpose();
        for (Eigen::Index j = 0; j <= i; ++j) {
            const Mat block = eval_kernel(spec, xi, points.row(j).transpose());
            k.block(i * n, j * n, n, n) = block;
            if (j != i) k.block(j * n, i * n, n, n) = block.transpose();
        }
    }
    return k;
}

Mat gram(const KernelSpec& spec, const std::vector<Vec>& points)
{
    if (points.empty()) throw InputError("gram: empty point list");
    Mat rows(static_cast<Eigen::Index>(points.size()), points.front().size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].size() != rows.cols()) throw InputError("gram: points differ in dimension");
        rows.row(static_cast<Eigen::Index>(i)) = points[i].transpose();
    }
    return gram(spec, rows);
}

Mat GramSystem::regularized() const
{
    Mat a = gram;
    a.diagonal().array() += static_cast<double>(n_samples) * lambda;
    return a;
}

GramSystem assemble_system(const KernelSpec& spec, const Dataset& data, double lambda)
{
    if (data.empty()) throw InputError("exact fit: empty dataset");
    data.validate();
    if (!(lambda > 0.0)) throw ConfigError("regularization lambda must be positive");

    GramSystem sys;
    sys.gram = gram(spec, data.x);
    sys.lambda = lambda;
    sys.n_samples = data.size();
    // Stack y_1, ..., y_N; Eigen is column-major so transpose the row-per-sample matrix.
    const Mat yt = data.y.transpose();
    sys.rhs = Eigen::Map<const Vec>(yt.data(), yt.size());
    return sys;
}

ExactModel::ExactModel(KernelSpec spec, Mat inputs, Mat coefficients, double lambda)
    : spec_(spec), inputs_(std::move(inputs)), coefficients_(std::move(coefficients)), lambda_(lambda)
{
    if (inputs_.rows() != coefficients_.rows() || inputs_.cols() != coefficients_.cols())
        throw InputError("ExactModel: inputs and coefficients differ in shape");
    spec_.validate(inputs_.cols());
}

Vec ExactModel::predict(const Vec& x) const
{
    require_dim(x, dim(), "exact_predict");
    Vec f = Vec::Zero(dim());
    for (Eigen::Index i = 0; i < inputs_.rows(); ++i) {
        const Vec xi = inputs_.row(i).transpose();
        const Vec ai = coefficients_.row(i).transpose();
        switch (spec_.parity) {
        case Parity::None:
            f += apply_signature(spec_.family, spec_.sigma, x - xi, ai);
            break;
        case Parity::Odd:
            f += 0.5 * (apply_signature(spec_.family, spec_.sigma, x - xi, ai) -
                        apply_signature(spec_.family, spec_.sigma, x + xi, ai));
            break;
        case Parity::Even:
            f += 0.5 * (apply_signature(spec_.family, spec_.sigma, x - xi, ai) +
                        apply_signature(spec_.family, spec_.sigma, x + xi, ai));
            break;
        }
    }
    return f;
}

double ExactModel::hamiltonian(const Vec& x) const
{
    if (spec_.family != KernelFamily::Symplectic)
        throw UnsupportedError("learned Hamiltonian is only defined for the symplectic kernel family");
    require_dim(x, dim(), "exact_hamiltonian");

    // f = sum_i J G_c(x - x_i) c_i with c_i = J^T a_i, and G_c(u) c = grad_u h(u).
    double h = 0.0;
    for (Eigen::Index i = 0; i < inputs_.rows(); ++i) {
        const Vec xi = inputs_.row(i).transpose();
        const Vec ci = apply_jt(coefficients_.row(i).transpose());
        const double direct = potential(spec_.sigma, x - xi, ci);
        switch (spec_.parity) {
        case Parity::None: h += direct; break;
        case Parity::Odd: h += 0.5 * (direct - potential(spec_.sigma, x + xi, ci)); break;
        case Parity::Even: h += 0.5 * (direct + potential(spec_.sigma, x + xi, ci)); break;
        }
    }
    return h;
}

ExactModel exact_fit(const Dataset& data, const KernelSpec& spec, double lambda)
{
    const GramSystem sys = assemble_system(spec, data, lambda);
    const Vec a = solve_spd(sys.regularized(), sys.rhs);
    const Eigen::Index n = data.dim();
    // a is stacked [a_1; ...; a_N]; view it as n x N and transpose to one row per sample.
    Mat coeffs = Eigen::Map<const Mat>(a.data(), n, data.size()).transpose();
    return ExactModel(spec, data.x, std::move(coeffs), lambda);
}

Vec exact_predict(const ExactModel& model, const Vec& x) { return model.predict(x); }

double exact_hamiltonian(const ExactModel& model, const Vec& x) { return model.hamiltonian(x); }

}  // namespace hamkrr
