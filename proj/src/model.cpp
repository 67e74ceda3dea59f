#include "hamkrr/model.hpp"

#include <cstdio>
#include <cstring>

namespace hamkrr {

LearnedModel::LearnedModel(Variant model, Provenance provenance)
    : model_(std::move(model)), provenance_(std::move(provenance))
{
}

double LearnedModel::sigma() const
{
    return is_exact() ? exact().spec().sigma : rff().map().sigma();
}

double LearnedModel::lambda() const { return is_exact() ? exact().lambda() : rff().lambda(); }

Eigen::Index LearnedModel::dim() const { return is_exact() ? exact().dim() : rff().dim(); }

std::string LearnedModel::family_name() const
{
    if (!is_exact()) return to_string(rff().map().family());
    const KernelSpec& s = exact().spec();
    if (s.parity == Parity::None) return to_string(s.family);
    return to_string(s.parity) + "_" + to_string(s.family);
}

bool LearnedModel::is_symplectic() const
{
    return is_exact() ? exact().spec().family == KernelFamily::Symplectic
                      : hamkrr::is_symplectic(rff().map().family());
}

bool LearnedModel::is_odd() const
{
    if (is_exact()) return exact().spec().parity == Parity::Odd;
    const FeatureFamily f = rff().map().family();
    return f == FeatureFamily::OddSymplectic || f == FeatureFamily::OddSeparable;
}

Vec LearnedModel::predict(const Vec& x) const
{
    return std::visit([&](const auto& m) { return m.predict(x); }, model_);
}

double LearnedModel::hamiltonian(const Vec& x) const
{
    return std::visit([&](const auto& m) { return m.hamiltonian(x); }, model_);
}

VectorField LearnedModel::field() const
{
    return [m = *this](const Vec& x) { return m.predict(x); };
}

LearnedModel fit(const Dataset& data, const KernelSpec& spec, double lambda)
{
    return LearnedModel(exact_fit(data, spec, lambda), Provenance{dataset_digest(data), "", data.meta.seed});
}

LearnedModel fit(const Dataset& data, const FeatureMap& map, double lambda)
{
    return LearnedModel(rff_fit(data, map, lambda), Provenance{dataset_digest(data), "", map.seed()});
}

ModelRecipe ModelRecipe::exact_kernel(KernelFamily family, Parity parity)
{
    ModelRecipe r;
    r.exact = true;
    r.kernel_family = family;
    r.parity = parity;
    return r;
}

ModelRecipe ModelRecipe::features(FeatureFamily family, Eigen::Index d, std::uint64_t seed)
{
    ModelRecipe r;
    r.exact = false;
    r.feature_family = family;
    r.d = d;
    r.feature_seed = seed;
    return r;
}

LearnedModel ModelRecipe::fit(const Dataset& data, double sigma, double lambda) const
{
    if (exact) return hamkrr::fit(data, KernelSpec{kernel_family, sigma, parity}, lambda);
    return hamkrr::fit(data, FeatureMap::draw(feature_family, sigma, d, data.dim(), feature_seed), lambda);
}

std::string ModelRecipe::name() const
{
    if (!exact) return to_string(feature_family);
    if (parity == Parity::None) return to_string(kernel_family);
    return to_string(parity) + "_" + to_string(kernel_family);
}

Trajectory rollout(const LearnedModel& model, const Vec& x0, double t_end, int n_steps)
{
    require_dim(x0, model.dim(), "rollout");
    return integrate(model.field(), TrajectorySpec{x0, t_end, n_steps});
}

double learned_hamiltonian(const LearnedModel& model, const Vec& x) { return model.hamiltonian(x); }

std::string dataset_digest(const Dataset& data)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](double v) {
        unsigned char bytes[sizeof(double)];
        std::memcpy(bytes, &v, sizeof(double));
        for (unsigned char b : bytes) {
            h ^= b;
            h *= 0x100000001b3ULL;
        }
    };
    for (Eigen::Index i = 0; i < data.x.rows(); ++i)
        for (Eigen::Index k = 0; k < data.x.cols(); ++k) {
            feed(data.x(i, k));
            feed(data.y(i, k));
        }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace hamkrr
