#include "pr/rng.hpp"

#include <cmath>

namespace pr {

Mat gaussian_matrix_real(Index m, Index n, Seed seed) {
    if (m < 1 || n < 1) throw DimensionError("gaussian_matrix: m and n must be positive");
    Rng rng(seed);
    const double sigma = 1.0 / std::sqrt(static_cast<double>(m));
    Mat a(m, n);
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < n; ++j) a(i, j) = sigma * rng.normal();
    return a;
}

CMat gaussian_matrix_complex(Index m, Index n, Seed seed) {
    if (m < 1 || n < 1) throw DimensionError("gaussian_matrix: m and n must be positive");
    Rng rng(seed);
    const double sigma = 1.0 / std::sqrt(2.0 * static_cast<double>(m));
    CMat a(m, n);
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < n; ++j) {
            const double re = sigma * rng.normal();
            const double im = sigma * rng.normal();
            a(i, j) = std::complex<double>(re, im);
        }
    return a;
}

std::vector<Vec> sample_latent(Index l, Index count, Seed seed) {
    if (l < 1 || count < 1) throw DimensionError("sample_latent: l and count must be positive");
    Rng rng(seed);
    std::vector<Vec> out;
    out.reserve(static_cast<std::size_t>(count));
    for (Index c = 0; c < count; ++c) out.push_back(rng.normal_vec(l));
    return out;
}

}  // namespace pr
