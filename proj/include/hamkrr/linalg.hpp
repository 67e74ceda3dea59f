#ifndef HAMKRR_LINALG_HPP
#define HAMKRR_LINALG_HPP

#include "hamkrr/core.hpp"

namespace hamkrr {

/// Solves A x = b for symmetric positive-definite A (only the lower triangle is read).
///
/// Cholesky first; if the factorization fails a single jitter of
/// 1e-10 * trace(A) / dim is added to the diagonal and the factorization retried.
/// One step of iterative refinement follows. Throws NumericalError when the
/// factorization fails twice or the solution is not finite.
Vec solve_spd(const Mat& a, const Vec& b);

/// ||A x - b|| / ||b|| (0 when b is zero and A x is zero).
double relative_residual(const Mat& a, const Vec& x, const Vec& b);

}  // namespace hamkrr

#endif
