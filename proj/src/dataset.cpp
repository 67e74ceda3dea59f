#include "hamkrr/dataset.hpp"

namespace hamkrr {

Dataset Dataset::subset(const std::vector<Eigen::Index>& rows) const
{
    Dataset out;
    out.x.resize(static_cast<Eigen::Index>(rows.size()), dim());
    out.y.resize(static_cast<Eigen::Index>(rows.size()), dim());
    out.traj_id.reserve(rows.size());
    out.t.reserve(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const Eigen::Index r = rows[k];
        if (r < 0 || r >= size()) throw InputError("Dataset::subset: row out of range");
        out.x.row(static_cast<Eigen::Index>(k)) = x.row(r);
        out.y.row(static_cast<Eigen::Index>(k)) = y.row(r);
        out.traj_id.push_back(traj_id.empty() ? -1 : traj_id[static_cast<std::size_t>(r)]);
        out.t.push_back(t.empty() ? 0.0 : t[static_cast<std::size_t>(r)]);
    }
    out.meta = meta;
    out.meta.trajectory_starts.clear();
    return out;
}

void Dataset::validate() const
{
    if (x.rows() != y.rows() || x.cols() != y.cols())
        throw InputError("dataset: x and y shapes differ");
    if (!traj_id.empty() && static_cast<Eigen::Index>(traj_id.size()) != x.rows())
        throw InputError("dataset: traj_id length does not match sample count");
    if (!t.empty() && static_cast<Eigen::Index>(t.size()) != x.rows())
        throw InputError("dataset: time column length does not match sample count");
    if (!x.allFinite() || !y.allFinite()) throw InputError("dataset: non-finite entries");
}

}  // namespace hamkrr
