#include "hamkrr/linalg.hpp"

#include <string>

namespace hamkrr {

Vec solve_spd(const Mat& a, const Vec& b)
{
    if (a.rows() != a.cols() || a.rows() != b.size())
        throw InputError("solve_spd: shape mismatch");
    if (!b.allFinite())
        throw NumericalError("solve_spd: right-hand side has non-finite entries");

    const Mat sym = a.selfadjointView<Eigen::Lower>();
    Eigen::LLT<Mat> llt(sym);
    Mat jittered;
    const Mat* used = &sym;
    if (llt.info() != Eigen::Success) {
        const double jitter = 1e-10 * sym.trace() / static_cast<double>(sym.rows());
        jittered = sym;
        jittered.diagonal().array() += jitter;
        llt.compute(jittered);
        used = &jittered;
        if (llt.info() != Eigen::Success)
            throw NumericalError("Cholesky factorization failed after jitter", 0.0);
    }

    Vec x = llt.solve(b);
    const Vec r = b - (*used) * x;
    x += llt.solve(r);

    if (!x.allFinite()) {
        const double rcond = llt.rcond();
        throw NumericalError("linear solve produced non-finite values (rcond estimate " +
                                 std::to_string(rcond) + ")",
                             rcond > 0.0 ? 1.0 / rcond : 0.0);
    }
    return x;
}

double relative_residual(const Mat& a, const Vec& x, const Vec& b)
{
    const Mat sym = a.selfadjointView<Eigen::Lower>();
    const double rn = (sym * x - b).norm();
    const double bn = b.norm();
    if (bn == 0.0) return rn;
    return rn / bn;
}

}  // namespace hamkrr
