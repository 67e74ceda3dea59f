#include "hamkrr/core.hpp"

namespace hamkrr {

Mat symplectic_matrix(Eigen::Index n)
{
    if (n <= 0 || n % 2 != 0)
        throw ConfigError("symplectic matrix needs an even, positive dimension (got " +
                          std::to_string(n) + ")");
    const Eigen::Index m = n / 2;
    Mat j = Mat::Zero(n, n);
    j.topRightCorner(m, m).setIdentity();
    j.bottomLeftCorner(m, m) = -Mat::Identity(m, m);
    return j;
}

Vec apply_j(const Vec& v)
{
    const Eigen::Index m = v.size() / 2;
    Vec out(v.size());
    out.head(m) = v.tail(m);
    out.tail(m) = -v.head(m);
    return out;
}

Vec apply_jt(const Vec& v)
{
    const Eigen::Index m = v.size() / 2;
    Vec out(v.size());
    out.head(m) = -v.tail(m);
    out.tail(m) = v.head(m);
    return out;
}

std::uint64_t mix_seed(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view stream,
                          std::uint64_t index_a, std::uint64_t index_b)
{
    // FNV-1a over the stream tag, then fold in the indices.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : stream) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::uint64_t s = mix_seed(master ^ h);
    s = mix_seed(s ^ index_a);
    s = mix_seed(s ^ (index_b * 0x2545f4914f6cdd1dULL));
    return s;
}

}  // namespace hamkrr
