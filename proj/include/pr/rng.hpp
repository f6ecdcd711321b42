#ifndef PR_RNG_HPP
#define PR_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "pr/types.hpp"

namespace pr {

/// splitmix64 mixing step; used to derive independent seeds from a base seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Deterministic child seed: hash of (base, salt). Independent of call order.
inline Seed derive_seed(Seed base, std::uint64_t salt) {
    return Seed(splitmix64(base.value ^ splitmix64(salt)));
}

/// Seeded generator with explicit, bit-stable mappings to doubles.
///
/// Uniform doubles come from the top 53 bits of mt19937_64 output; normals use
/// the Box-Muller transform on those uniforms. Both mappings are spelled out
/// here rather than delegated to std::*_distribution, whose streams differ
/// between standard-library implementations.
class Rng {
public:
    explicit Rng(Seed seed) : gen_(seed.value) {}

    /// Uniform on [0, 1).
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1]; safe as a log() argument.
    double uniform01_open0() { return static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53; }

    /// Standard normal via Box-Muller; generates pairs, caches the second.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01_open0();
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * M_PI * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    Vec normal_vec(Index n) {
        Vec v(n);
        for (Index i = 0; i < n; ++i) v[i] = normal();
        return v;
    }

    std::uint64_t next_u64() { return gen_(); }

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

enum class GaussianKind { Real, Complex };

/// m x n real measurement matrix, i.i.d. N(0, 1/m) entries, filled row by row.
Mat gaussian_matrix_real(Index m, Index n, Seed seed);

/// m x n complex measurement matrix; real and imaginary parts i.i.d. N(0, 1/(2m)).
CMat gaussian_matrix_complex(Index m, Index n, Seed seed);

/// `count` i.i.d. standard-normal latent vectors of length l, drawn from one
/// stream so that a longer draw extends a shorter one with the same seed.
std::vector<Vec> sample_latent(Index l, Index count, Seed seed);

}  // namespace pr

#endif
