#ifndef HAMKRR_MODEL_HPP
#define HAMKRR_MODEL_HPP

#include "hamkrr/dataset.hpp"
#include "hamkrr/features.hpp"
#include "hamkrr/kernels.hpp"
#include "hamkrr/sim.hpp"

#include <cstdint>
#include <string>
#include <variant>

namespace hamkrr {

struct Provenance {
    std::string dataset_digest;
    std::string created;  // ISO-8601 UTC, empty for library-built models
    std::uint64_t seed = 0;
};

/// Exact or random-feature model behind one predict interface.
class LearnedModel {
public:
    using Variant = std::variant<ExactModel, RffModel>;

    LearnedModel() = default;
    explicit LearnedModel(Variant model, Provenance provenance = {});

    const Variant& variant() const { return model_; }
    bool is_exact() const { return std::holds_alternative<ExactModel>(model_); }
    const ExactModel& exact() const { return std::get<ExactModel>(model_); }
    const RffModel& rff() const { return std::get<RffModel>(model_); }
    const Provenance& provenance() const { return provenance_; }

    double sigma() const;
    double lambda() const;
    Eigen::Index dim() const;
    /// Name of the kernel or feature family, e.g. "odd_symplectic".
    std::string family_name() const;
    bool is_symplectic() const;
    bool is_odd() const;

    Vec predict(const Vec& x) const;
    double hamiltonian(const Vec& x) const;
    VectorField field() const;

private:
    Variant model_;
    Provenance provenance_;
};

/// Fits an exact kernel model (Gram system) or an RFF model (feature system).
LearnedModel fit(const Dataset& data, const KernelSpec& spec, double lambda);
LearnedModel fit(const Dataset& data, const FeatureMap& map, double lambda);

/// Everything needed to fit a model except (sigma, lambda): either an exact kernel
/// (family + parity) or a feature family with d and the frequency seed.
struct ModelRecipe {
    bool exact = false;
    KernelFamily kernel_family = KernelFamily::Symplectic;
    Parity parity = Parity::Odd;
    FeatureFamily feature_family = FeatureFamily::OddSymplectic;
    Eigen::Index d = 400;
    std::uint64_t feature_seed = 0;

    static ModelRecipe exact_kernel(KernelFamily family, Parity parity);
    static ModelRecipe features(FeatureFamily family, Eigen::Index d, std::uint64_t seed);

    /// Frequencies are drawn from (sigma, d, n, feature_seed), so two fits with the
    /// same sigma share them.
    LearnedModel fit(const Dataset& data, double sigma, double lambda) const;
    std::string name() const;
};

/// Integrates the learned field with the shared adaptive integrator.
Trajectory rollout(const LearnedModel& model, const Vec& x0, double t_end, int n_steps);

double learned_hamiltonian(const LearnedModel& model, const Vec& x);

/// Hex FNV-1a digest over the x/y values in row order.
std::string dataset_digest(const Dataset& data);

}  // namespace hamkrr

#endif
