#ifndef HAMKRR_KERNELS_HPP
#define HAMKRR_KERNELS_HPP

#include "hamkrr/core.hpp"
#include "hamkrr/dataset.hpp"

#include <string>
#include <vector>

namespace hamkrr {

enum class KernelFamily { GaussianSeparable, CurlFree, Symplectic };

/// Odd/even symmetrization K_odd(x,z) = (K(x,z) - K(-x,z))/2, K_even with a plus.
enum class Parity { None, Odd, Even };

std::string to_string(KernelFamily f);
std::string to_string(Parity p);
KernelFamily kernel_family_from_string(const std::string& s);
Parity parity_from_string(const std::string& s);

struct KernelSpec {
    KernelFamily family = KernelFamily::GaussianSeparable;
    double sigma = 1.0;
    Parity parity = Parity::None;

    /// Throws ConfigError for sigma <= 0 or an odd state dimension with the symplectic family.
    void validate(Eigen::Index n) const;
};

/// exp(-||x - z||^2 / (2 sigma^2)).
double gaussian_scalar(const Vec& x, const Vec& z, double sigma);

/// Signature G(u) of the shift-invariant (parity None) kernel, K(x, z) = G(x - z).
Mat kernel_signature(KernelFamily family, double sigma, const Vec& u);

/// n x n kernel block K(x, z) including the parity transform.
Mat eval_kernel(const KernelSpec& spec, const Vec& x, const Vec& z);

/// Dense Nn x Nn Gram matrix, block (i, j) = K(x_i, x_j). Points are rows of `points`.
Mat gram(const KernelSpec& spec, const Mat& points);
Mat gram(const KernelSpec& spec, const std::vector<Vec>& points);

/// Regularized system (K + N lambda I) a = y for a dataset.
struct GramSystem {
    Mat gram;
    Vec rhs;
    double lambda = 0.0;
    Eigen::Index n_samples = 0;

    Mat regularized() const;
};

GramSystem assemble_system(const KernelSpec& spec, const Dataset& data, double lambda);

/// Exact kernel ridge regression model: f(x) = sum_i K(x, x_i) a_i.
class ExactModel {
public:
    ExactModel() = default;
    ExactModel(KernelSpec spec, Mat inputs, Mat coefficients, double lambda);

    const KernelSpec& spec() const { return spec_; }
    /// Training inputs, one per row.
    const Mat& inputs() const { return inputs_; }
    /// Coefficient vectors a_i, one per row.
    const Mat& coefficients() const { return coefficients_; }
    double lambda() const { return lambda_; }
    Eigen::Index dim() const { return inputs_.cols(); }

    Vec predict(const Vec& x) const;
    /// Learned Hamiltonian with f = J grad H; symplectic family only.
    double hamiltonian(const Vec& x) const;

private:
    KernelSpec spec_;
    Mat inputs_;
    Mat coefficients_;
    double lambda_ = 0.0;
};

ExactModel exact_fit(const Dataset& data, const KernelSpec& spec, double lambda);
Vec exact_predict(const ExactModel& model, const Vec& x);
double exact_hamiltonian(const ExactModel& model, const Vec& x);

}  // namespace hamkrr

#endif
