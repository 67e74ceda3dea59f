#ifndef HAMKRR_SYSTEMS_HPP
#define HAMKRR_SYSTEMS_HPP

#include "hamkrr/core.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <variant>

namespace hamkrr {

using Mat2 = Eigen::Matrix2d;

struct PendulumParams {
    double m = 1.0;
    double l = 1.0;
    double g = 9.81;
    void validate() const;
};

struct CartPoleParams {
    double m_c = 0.8;
    double m_p = 0.5;
    double l = 1.0;
    double g = 9.81;
    void validate() const;
};

struct TwoLinkParams {
    double m1 = 1.0;
    double m2 = 1.0;
    double L1 = 1.0;
    double L2 = 2.0;
    double l1 = 0.5;  // center-of-mass offsets
    double l2 = 1.0;
    double g = 9.81;
    void validate() const;
    double inertia1() const { return m1 * L1 * L1 / 12.0; }
    double inertia2() const { return m2 * L2 * L2 / 12.0; }
};

// State layout everywhere: x = (q, p).

Vec pendulum_dynamics(const Vec& x, const PendulumParams& params);
double pendulum_hamiltonian(const Vec& x, const PendulumParams& params);

Mat2 cartpole_mass_matrix(const Vec& q, const CartPoleParams& params);
Vec cartpole_dynamics(const Vec& x, const CartPoleParams& params);
double cartpole_hamiltonian(const Vec& x, const CartPoleParams& params);
double cartpole_potential(const Vec& q, const CartPoleParams& params);

Mat2 twolink_mass_matrix(const Vec& q, const TwoLinkParams& params);
Vec twolink_dynamics(const Vec& x, const TwoLinkParams& params);
double twolink_hamiltonian(const Vec& x, const TwoLinkParams& params);
double twolink_potential(const Vec& q, const TwoLinkParams& params);

using VectorField = std::function<Vec(const Vec&)>;
using ScalarField = std::function<double(const Vec&)>;

/// Axis-aligned box of states.
struct StateBox {
    Vec lower;
    Vec upper;
};

/// One of the benchmark systems behind a common interface.
class System {
public:
    using Params = std::variant<PendulumParams, CartPoleParams, TwoLinkParams>;

    explicit System(Params params);
    /// "pendulum", "cartpole" or "twolink" with the published parameter values.
    static System from_id(const std::string& id);

    const std::string& id() const { return id_; }
    const Params& params() const { return params_; }
    Eigen::Index dim() const;

    Vec dynamics(const Vec& x) const;
    double hamiltonian(const Vec& x) const;
    VectorField field() const;
    ScalarField energy() const;

    /// Box initial conditions are drawn from (cart-pole / two-link) or the set S (pendulum).
    StateBox ic_box() const;
    /// Short stable textual digest of the parameter values.
    std::string params_digest() const;

private:
    Params params_;
    std::string id_;
};

}  // namespace hamkrr

#endif
