#ifndef HAMKRR_FEATURES_HPP
#define HAMKRR_FEATURES_HPP

#include "hamkrr/core.hpp"
#include "hamkrr/dataset.hpp"
#include "hamkrr/kernels.hpp"

#include <cstdint>
#include <string>

namespace hamkrr {

/// Random Fourier feature families. Each approximates one exact kernel:
///
///   GaussianSeparable  cos/sin blocks, B(w) = I_n          D = 2 d n
///   CurlFree           cos/sin rows,   B(w) = w            D = 2 d
///   Symplectic         cos/sin rows,   B(w) = J w          D = 2 d
///   OddSymplectic      sin rows,       B(w) = J w          D = d
///   EvenSymplectic     cos rows,       B(w) = J w          D = d
///   OddSeparable       sin blocks,     B(w) = I_n          D = d n
///   EvenSeparable      cos blocks,     B(w) = I_n          D = d n
///
/// All rows carry the 1/sqrt(d) factor.
enum class FeatureFamily {
    GaussianSeparable,
    CurlFree,
    Symplectic,
    OddSymplectic,
    EvenSymplectic,
    OddSeparable,
    EvenSeparable,
};

std::string to_string(FeatureFamily f);
FeatureFamily feature_family_from_string(const std::string& s);

/// Exact kernel approximated by a feature family.
KernelSpec equivalent_kernel(FeatureFamily family, double sigma);

bool is_symplectic(FeatureFamily family);

/// d frequencies from N(0, sigma^-2 I_n), one per row, drawn as z / sigma with
/// z standard normal under `seed`.
Mat draw_frequencies(double sigma, Eigen::Index d, Eigen::Index n, std::uint64_t seed);

/// Frozen spectral sample plus family tag.
class FeatureMap {
public:
    FeatureMap() = default;
    FeatureMap(FeatureFamily family, double sigma, Mat frequencies, std::uint64_t seed);

    /// Draws the frequencies for (sigma, d, n, seed).
    static FeatureMap draw(FeatureFamily family, double sigma, Eigen::Index d, Eigen::Index n,
                           std::uint64_t seed);

    FeatureFamily family() const { return family_; }
    double sigma() const { return sigma_; }
    std::uint64_t seed() const { return seed_; }
    const Mat& frequencies() const { return frequencies_; }
    Eigen::Index d() const { return frequencies_.rows(); }
    Eigen::Index n() const { return frequencies_.cols(); }
    /// Feature dimension D (rows of Psi(x)).
    Eigen::Index feature_dim() const;

    /// Psi(x), D x n.
    Mat eval(const Vec& x) const;

    /// Stacked Psi(x_i)^T for rows first..first+count of `points`: (count n) x D.
    Mat design_block(const Mat& points, Eigen::Index first, Eigen::Index count) const;

    /// Psi(x)^T alpha.
    Vec apply(const Vec& x, const Vec& alpha) const;

    /// Gamma(x)^T alpha, the scalar potential with apply(x, alpha) = J grad of it.
    double potential(const Vec& x, const Vec& alpha) const;

private:
    FeatureFamily family_ = FeatureFamily::GaussianSeparable;
    double sigma_ = 1.0;
    Mat frequencies_;
    std::uint64_t seed_ = 0;
};

Mat eval_features(const FeatureMap& map, const Vec& x);

struct RffTrainingInfo {
    Eigen::Index n_samples = 0;
    double noise_std = 0.0;
    std::string system;
};

class RffModel {
public:
    RffModel() = default;
    RffModel(FeatureMap map, Vec alpha, double lambda, RffTrainingInfo info = {});

    const FeatureMap& map() const { return map_; }
    const Vec& alpha() const { return alpha_; }
    double lambda() const { return lambda_; }
    const RffTrainingInfo& info() const { return info_; }
    Eigen::Index dim() const { return map_.n(); }

    Vec predict(const Vec& x) const;
    /// Symplectic families only.
    double hamiltonian(const Vec& x) const;

private:
    FeatureMap map_;
    Vec alpha_;
    double lambda_ = 0.0;
    RffTrainingInfo info_;
};

/// Feature-space normal equations (sum_i Psi_i Psi_i^T + N lambda I) alpha = sum_i Psi_i y_i.
struct FeatureSystem {
    Mat normal;
    Vec rhs;
};

/// Accumulated sample by sample in fixed-size chunks (fixed reduction order).
FeatureSystem assemble_feature_system(const Dataset& data, const FeatureMap& map, double lambda);

/// Solves the normal equations. When D exceeds N n the equivalent N n x N n dual
/// system (Phi Phi^T + N lambda I) beta = y, alpha = Phi^T beta is solved instead.
RffModel rff_fit(const Dataset& data, const FeatureMap& map, double lambda);
Vec rff_predict(const RffModel& model, const Vec& x);
double rff_hamiltonian(const RffModel& model, const Vec& x);

}  // namespace hamkrr

#endif
