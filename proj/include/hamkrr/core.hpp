#ifndef HAMKRR_CORE_HPP
#define HAMKRR_CORE_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hamkrr {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Error hierarchy. The CLI maps these onto exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input (dimension mismatch, empty data, bad box).
class InputError : public Error {
public:
    using Error::Error;
};

/// Invalid combination of settings (odd n for a symplectic kernel, bad family name).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Linear solve produced non-finite values or the factorization failed.
class NumericalError : public Error {
public:
    NumericalError(const std::string& what, double condition_estimate = 0.0)
        : Error(what), condition_estimate_(condition_estimate) {}
    double condition_estimate() const noexcept { return condition_estimate_; }

private:
    double condition_estimate_;
};

/// Adaptive integration gave up (step underflow or non-finite state).
class IntegrationError : public Error {
public:
    IntegrationError(const std::string& what, double failure_time)
        : Error(what), failure_time_(failure_time) {}
    double failure_time() const noexcept { return failure_time_; }

private:
    double failure_time_;
};

/// Operation not defined for the model/kernel family (e.g. Hamiltonian of a Gaussian model).
class UnsupportedError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Canonical symplectic matrix [[0, I_m], [-I_m, 0]] for n = 2m.
Mat symplectic_matrix(Eigen::Index n);

/// J * v without forming J.
Vec apply_j(const Vec& v);
/// J^T * v without forming J.
Vec apply_jt(const Vec& v);

using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t x);

/// Seed for a named sub-stream of a master seed, optionally indexed
/// (e.g. per trajectory or per GA individual).
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream,
                          std::uint64_t index_a = 0, std::uint64_t index_b = 0);

inline void require_dim(const Vec& v, Eigen::Index n, const char* what)
{
    if (v.size() != n)
        throw InputError(std::string(what) + ": expected dimension " + std::to_string(n) +
                         ", got " + std::to_string(v.size()));
}

}  // namespace hamkrr

#endif
