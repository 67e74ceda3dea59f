#include "hamkrr/systems.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace hamkrr {

namespace {

void require_positive(double v, const char* name)
{
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be positive");
}

Mat2 inverse_2x2(const Mat2& m)
{
    const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    if (!(std::abs(det) > 0.0) || !std::isfinite(det))
        throw NumericalError("mass matrix is singular", 0.0);
    Mat2 inv;
    inv << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
    return inv / det;
}

// Shared structure of the two-degree-of-freedom mechanical systems:
// H = p^T M(q)^-1 p / 2 + U(q), with M depending on q only through dM/dq.
Vec mechanical_dynamics(const Vec& x, const Mat2& mass, const Mat2& dmass_dq1,
                        const Mat2& dmass_dq2, const Eigen::Vector2d& grad_u)
{
    const Eigen::Vector2d p = x.tail<2>();
    const Eigen::Vector2d v = inverse_2x2(mass) * p;  // q-dot
    // d/dq_k (p^T M^-1 p / 2) = -v^T (dM/dq_k) v / 2
    Vec out(4);
    out.head<2>() = v;
    out(2) = 0.5 * v.dot(dmass_dq1 * v) - grad_u(0);
    out(3) = 0.5 * v.dot(dmass_dq2 * v) - grad_u(1);
    return out;
}

double mechanical_energy(const Vec& x, const Mat2& mass, double potential)
{
    const Eigen::Vector2d p = x.tail<2>();
    return 0.5 * p.dot(inverse_2x2(mass) * p) + potential;
}

void require_state(const Vec& x, Eigen::Index n, const char* what)
{
    require_dim(x, n, what);
}

}  // namespace

void PendulumParams::validate() const
{
    require_positive(m, "pendulum m");
    require_positive(l, "pendulum l");
    require_positive(g, "pendulum g");
}

void CartPoleParams::validate() const
{
    require_positive(m_c, "cart-pole m_c");
    require_positive(m_p, "cart-pole m_p");
    require_positive(l, "cart-pole l");
    require_positive(g, "cart-pole g");
}

void TwoLinkParams::validate() const
{
    require_positive(m1, "two-link m1");
    require_positive(m2, "two-link m2");
    require_positive(L1, "two-link L1");
    require_positive(L2, "two-link L2");
    require_positive(l1, "two-link l1");
    require_positive(l2, "two-link l2");
    require_positive(g, "two-link g");
    if (l1 > L1 || l2 > L2) throw ConfigError("two-link center of mass must lie on the link");
}

Vec pendulum_dynamics(const Vec& x, const PendulumParams& params)
{
    require_state(x, 2, "pendulum_dynamics");
    Vec f(2);
    f(0) = x(1) / (params.m * params.l * params.l);
    f(1) = -params.m * params.g * params.l * std::sin(x(0));
    return f;
}

double pendulum_hamiltonian(const Vec& x, const PendulumParams& params)
{
    require_state(x, 2, "pendulum_hamiltonian");
    return x(1) * x(1) / (2.0 * params.m * params.l * params.l) +
           params.m * params.g * params.l * (1.0 - std::cos(x(0)));
}

Mat2 cartpole_mass_matrix(const Vec& q, const CartPoleParams& params)
{
    const double off = params.m_p * params.l * std::cos(q(1));
    Mat2 m;
    m << params.m_c + params.m_p, off, off, params.m_p * params.l * params.l;
    return m;
}

double cartpole_potential(const Vec& q, const CartPoleParams& params)
{
    return params.m_p * params.g * params.l * std::cos(q(1));
}

Vec cartpole_dynamics(const Vec& x, const CartPoleParams& params)
{
    require_state(x, 4, "cartpole_dynamics");
    const Vec q = x.head(2);
    const double s = std::sin(q(1));
    Mat2 dm_dtheta;
    dm_dtheta << 0.0, -params.m_p * params.l * s, -params.m_p * params.l * s, 0.0;
    const Eigen::Vector2d grad_u(0.0, -params.m_p * params.g * params.l * s);
    return mechanical_dynamics(x, cartpole_mass_matrix(q, params), Mat2::Zero(), dm_dtheta, grad_u);
}

double cartpole_hamiltonian(const Vec& x, const CartPoleParams& params)
{
    require_state(x, 4, "cartpole_hamiltonian");
    const Vec q = x.head(2);
    return mechanical_energy(x, cartpole_mass_matrix(q, params), cartpole_potential(q, params));
}

Mat2 twolink_mass_matrix(const Vec& q, const TwoLinkParams& p)
{
    const double i1 = p.inertia1();
    const double i2 = p.inertia2();
    const double c2 = std::cos(q(1));
    const double m3 = p.m2 * p.l2 * p.l2 + i2;
    const double m2 = m3 + p.m2 * p.l2 * p.L1 * c2;
    const double m1 = p.m1 * p.l1 * p.l1 + p.m2 * p.l2 * p.l2 + p.m2 * p.L1 * p.L1 + i1 + i2 +
                      2.0 * p.m2 * p.l2 * p.L1 * c2;
    Mat2 m;
    m << m1, m2, m2, m3;
    return m;
}

double twolink_potential(const Vec& q, const TwoLinkParams& p)
{
    return p.g * (-(p.m1 * p.l1 + p.m2 * p.L1) * std::cos(q(0)) - p.m2 * p.l2 * std::cos(q(0) + q(1)));
}

Vec twolink_dynamics(const Vec& x, const TwoLinkParams& p)
{
    require_state(x, 4, "twolink_dynamics");
    const Vec q = x.head(2);
    const double b = p.m2 * p.l2 * p.L1;
    const double s2 = std::sin(q(1));
    Mat2 dm_dtheta2;
    dm_dtheta2 << -2.0 * b * s2, -b * s2, -b * s2, 0.0;
    const double s12 = std::sin(q(0) + q(1));
    const Eigen::Vector2d grad_u(p.g * ((p.m1 * p.l1 + p.m2 * p.L1) * std::sin(q(0)) + p.m2 * p.l2 * s12),
                                 p.g * p.m2 * p.l2 * s12);
    return mechanical_dynamics(x, twolink_mass_matrix(q, p), Mat2::Zero(), dm_dtheta2, grad_u);
}

double twolink_hamiltonian(const Vec& x, const TwoLinkParams& p)
{
    require_state(x, 4, "twolink_hamiltonian");
    const Vec q = x.head(2);
    return mechanical_energy(x, twolink_mass_matrix(q, p), twolink_potential(q, p));
}

System::System(Params params) : params_(std::move(params))
{
    std::visit([](const auto& p) { p.validate(); }, params_);
    if (std::holds_alternative<PendulumParams>(params_))
        id_ = "pendulum";
    else if (std::holds_alternative<CartPoleParams>(params_))
        id_ = "cartpole";
    else
        id_ = "twolink";
}

System System::from_id(const std::string& id)
{
    if (id == "pendulum") return System(PendulumParams{});
    if (id == "cartpole") return System(CartPoleParams{});
    if (id == "twolink") return System(TwoLinkParams{});
    throw ConfigError("unknown system id '" + id + "'");
}

Eigen::Index System::dim() const
{
    return std::holds_alternative<PendulumParams>(params_) ? 2 : 4;
}

Vec System::dynamics(const Vec& x) const
{
    struct Visitor {
        const Vec& x;
        Vec operator()(const PendulumParams& p) const { return pendulum_dynamics(x, p); }
        Vec operator()(const CartPoleParams& p) const { return cartpole_dynamics(x, p); }
        Vec operator()(const TwoLinkParams& p) const { return twolink_dynamics(x, p); }
    };
    return std::visit(Visitor{x}, params_);
}

double System::hamiltonian(const Vec& x) const
{
    struct Visitor {
        const Vec& x;
        double operator()(const PendulumParams& p) const { return pendulum_hamiltonian(x, p); }
        double operator()(const CartPoleParams& p) const { return cartpole_hamiltonian(x, p); }
        double operator()(const TwoLinkParams& p) const { return twolink_hamiltonian(x, p); }
    };
    return std::visit(Visitor{x}, params_);
}

VectorField System::field() const
{
    return [sys = *this](const Vec& x) { return sys.dynamics(x); };
}

ScalarField System::energy() const
{
    return [sys = *this](const Vec& x) { return sys.hamiltonian(x); };
}

StateBox System::ic_box() const
{
    constexpr double pi = std::numbers::pi;
    StateBox box;
    if (id_ == "pendulum") {
        box.lower = Eigen::Vector2d(-pi, -8.0);
        box.upper = Eigen::Vector2d(pi, 8.0);
    } else if (id_ == "cartpole") {
        box.lower = Eigen::Vector4d(-2.0, -pi, -2.0, -2.0);
        box.upper = Eigen::Vector4d(2.0, pi, 2.0, 2.0);
    } else {
        box.lower = Eigen::Vector4d(-pi, -pi, -2.0, -2.0);
        box.upper = Eigen::Vector4d(pi, pi, 2.0, 2.0);
    }
    return box;
}

std::string System::params_digest() const
{
    char buf[256];
    struct Visitor {
        char* buf;
        void operator()(const PendulumParams& p) const
        {
            std::snprintf(buf, 256, "m=%.17g;l=%.17g;g=%.17g", p.m, p.l, p.g);
        }
        void operator()(const CartPoleParams& p) const
        {
            std::snprintf(buf, 256, "m_c=%.17g;m_p=%.17g;l=%.17g;g=%.17g", p.m_c, p.m_p, p.l, p.g);
        }
        void operator()(const TwoLinkParams& p) const
        {
            std::snprintf(buf, 256, "m1=%.17g;m2=%.17g;L1=%.17g;L2=%.17g;l1=%.17g;l2=%.17g;g=%.17g",
                          p.m1, p.m2, p.L1, p.L2, p.l1, p.l2, p.g);
        }
    };
    std::visit(Visitor{buf}, params_);
    return id_ + ":" + buf;
}

}  // namespace hamkrr
