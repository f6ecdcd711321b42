#ifndef PR_METRICS_HPP
#define PR_METRICS_HPP

#include "pr/types.hpp"

namespace pr {

/// 10*log10(peak^2 / MSE); +infinity for an exact match.
double psnr(const Vec& x, const Vec& ref, double peak = 1.0);

/// Mean local SSIM, 11x11 Gaussian window (sigma 1.5), K1 = 0.01, K2 = 0.03,
/// dynamic range 1, symmetric boundary handling. Images smaller than the
/// window fall back to full-image statistics.
double ssim(const Vec& x, const Vec& ref, const Shape2D& shape);

struct Registration {
    Vec aligned;
    Index shift_row = 0;
    Index shift_col = 0;
    bool flipped = false;
};

/// Aligns x to ref over all circular shifts of x and of its point reflection,
/// maximizing cross-correlation (equivalently, minimizing MSE: both transforms
/// preserve the norm). Ties prefer the unflipped, smallest-shift candidate.
Registration register_trivial(const Vec& x, const Vec& ref, const Shape2D& shape);

/// Circular shift by (dr, dc): out(j,k) = x((j-dr) mod H, (k-dc) mod W).
Vec circular_shift(const Vec& x, const Shape2D& shape, Index dr, Index dc);

/// Point reflection out(j,k) = x((H-j) mod H, (W-k) mod W).
Vec point_reflect(const Vec& x, const Shape2D& shape);

double pearson_correlation(const Vec& a, const Vec& b);

struct MetricReport {
    double psnr_db = 0.0;
    double ssim_value = 0.0;
    double magnitude_mse = 0.0;
    bool registered = false;
    Index shift_row = 0;
    Index shift_col = 0;
    bool flipped = false;
};

}  // namespace pr

#endif
