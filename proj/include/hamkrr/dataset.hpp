#ifndef HAMKRR_DATASET_HPP
#define HAMKRR_DATASET_HPP

#include "hamkrr/core.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hamkrr {

struct DatasetMeta {
    std::string system;          // "pendulum", "cartpole", "twolink" or free-form
    std::string params_digest;
    double noise_std = 0.0;      // sigma_n
    std::uint64_t seed = 0;
    std::vector<std::size_t> trajectory_starts;  // first row of each trajectory
};

/// N samples (x_i, y_i), one per row of `x` / `y`.
struct Dataset {
    Mat x;
    Mat y;
    std::vector<int> traj_id;  // per row; -1 for scattered (non-trajectory) samples
    std::vector<double> t;     // per row sample time
    DatasetMeta meta;

    Eigen::Index size() const { return x.rows(); }
    Eigen::Index dim() const { return x.cols(); }
    bool empty() const { return x.rows() == 0; }

    /// Rows in the given order; metadata copied, trajectory boundaries dropped.
    Dataset subset(const std::vector<Eigen::Index>& rows) const;

    /// Throws InputError on shape inconsistencies.
    void validate() const;
};

}  // namespace hamkrr

#endif
