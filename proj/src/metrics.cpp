#include "pr/metrics.hpp"

#include <cmath>
#include <limits>

namespace pr {

double psnr(const Vec& x, const Vec& ref, double peak) {
    require_length(x, ref.size(), "psnr");
    if (!(peak > 0.0)) throw DimensionError("psnr: peak must be positive");
    const double mse = (x - ref).squaredNorm() / static_cast<double>(x.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / mse);
}

namespace {

constexpr Index kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = (0.01 * 1.0) * (0.01 * 1.0);
constexpr double kC2 = (0.03 * 1.0) * (0.03 * 1.0);

Vec gaussian_kernel() {
    Vec k(kWindow);
    const Index half = kWindow / 2;
    for (Index i = 0; i < kWindow; ++i) {
        const double d = static_cast<double>(i - half);
        k[i] = std::exp(-d * d / (2.0 * kSigma * kSigma));
    }
    return k / k.sum();
}

// Half-sample symmetric extension: ... x1 x0 | x0 x1 ... x_{n-1} | x_{n-1} ...
Index mirror(Index i, Index n) {
    while (i < 0 || i >= n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - i - 1;
    }
    return i;
}

// Separable Gaussian filtering of a H x W image held row-major in a vector.
Mat gaussian_filter(const Eigen::Map<const Mat, 0, Eigen::Stride<1, Eigen::Dynamic>>& img,
                    const Vec& kernel) {
    const Index h = img.rows(), w = img.cols(), half = kWindow / 2;
    Mat tmp(h, w), out(h, w);
    for (Index r = 0; r < h; ++r)
        for (Index c = 0; c < w; ++c) {
            double acc = 0.0;
            for (Index t = -half; t <= half; ++t)
                acc += kernel[t + half] * img(r, mirror(c + t, w));
            tmp(r, c) = acc;
        }
    for (Index r = 0; r < h; ++r)
        for (Index c = 0; c < w; ++c) {
            double acc = 0.0;
            for (Index t = -half; t <= half; ++t)
                acc += kernel[t + half] * tmp(mirror(r + t, h), c);
            out(r, c) = acc;
        }
    return out;
}

double ssim_from_stats(double mu1, double mu2, double var1, double var2, double cov) {
    return ((2.0 * mu1 * mu2 + kC1) * (2.0 * cov + kC2)) /
           ((mu1 * mu1 + mu2 * mu2 + kC1) * (var1 + var2 + kC2));
}

}  // namespace

double ssim(const Vec& x, const Vec& ref, const Shape2D& shape) {
    if (x.size() != shape.size() || ref.size() != shape.size())
        throw ShapeError("ssim: image lengths do not match shape");

    if (shape.height < kWindow || shape.width < kWindow) {
        // Too small for windowed statistics; use global moments instead.
        const double n = static_cast<double>(x.size());
        const double mu1 = x.mean(), mu2 = ref.mean();
        const double var1 = (x.array() - mu1).square().sum() / n;
        const double var2 = (ref.array() - mu2).square().sum() / n;
        const double cov = ((x.array() - mu1) * (ref.array() - mu2)).sum() / n;
        return ssim_from_stats(mu1, mu2, var1, var2, cov);
    }

    using RowMajorMap = Eigen::Map<const Mat, 0, Eigen::Stride<1, Eigen::Dynamic>>;
    const RowMajorMap img1(x.data(), shape.height, shape.width,
                           Eigen::Stride<1, Eigen::Dynamic>(1, shape.width));
    const RowMajorMap img2(ref.data(), shape.height, shape.width,
                           Eigen::Stride<1, Eigen::Dynamic>(1, shape.width));

    const Vec kernel = gaussian_kernel();
    const Mat mu1 = gaussian_filter(img1, kernel);
    const Mat mu2 = gaussian_filter(img2, kernel);

    using SqMap = Eigen::Map<const Mat, 0, Eigen::Stride<1, Eigen::Dynamic>>;
    const Vec xx = x.cwiseProduct(x), yy = ref.cwiseProduct(ref), xy = x.cwiseProduct(ref);
    const Eigen::Stride<1, Eigen::Dynamic> stride(1, shape.width);
    const Mat m11 = gaussian_filter(SqMap(xx.data(), shape.height, shape.width, stride), kernel);
    const Mat m22 = gaussian_filter(SqMap(yy.data(), shape.height, shape.width, stride), kernel);
    const Mat m12 = gaussian_filter(SqMap(xy.data(), shape.height, shape.width, stride), kernel);

    double acc = 0.0;
    for (Index r = 0; r < shape.height; ++r)
        for (Index c = 0; c < shape.width; ++c) {
            const double var1 = m11(r, c) - mu1(r, c) * mu1(r, c);
            const double var2 = m22(r, c) - mu2(r, c) * mu2(r, c);
            const double cov = m12(r, c) - mu1(r, c) * mu2(r, c);
            acc += ssim_from_stats(mu1(r, c), mu2(r, c), var1, var2, cov);
        }
    return acc / static_cast<double>(shape.size());
}

Vec circular_shift(const Vec& x, const Shape2D& shape, Index dr, Index dc) {
    if (x.size() != shape.size()) throw ShapeError("circular_shift: length/shape mismatch");
    const Index h = shape.height, w = shape.width;
    dr = ((dr % h) + h) % h;
    dc = ((dc % w) + w) % w;
    Vec out(x.size());
    for (Index j = 0; j < h; ++j) {
        const Index src_j = (j - dr + h) % h;
        for (Index k = 0; k < w; ++k) out[j * w + k] = x[src_j * w + (k - dc + w) % w];
    }
    return out;
}

Vec point_reflect(const Vec& x, const Shape2D& shape) {
    if (x.size() != shape.size()) throw ShapeError("point_reflect: length/shape mismatch");
    const Index h = shape.height, w = shape.width;
    Vec out(x.size());
    for (Index j = 0; j < h; ++j)
        for (Index k = 0; k < w; ++k) out[j * w + k] = x[((h - j) % h) * w + (w - k) % w];
    return out;
}

Registration register_trivial(const Vec& x, const Vec& ref, const Shape2D& shape) {
    if (x.size() != shape.size() || ref.size() != shape.size())
        throw ShapeError("register_trivial: length/shape mismatch");
    const Index h = shape.height, w = shape.width;

    Registration best;
    double best_corr = -std::numeric_limits<double>::infinity();
    for (int flip = 0; flip <= 1; ++flip) {
        const Vec base = flip ? point_reflect(x, shape) : x;
        for (Index dr = 0; dr < h; ++dr)
            for (Index dc = 0; dc < w; ++dc) {
                double corr = 0.0;
                for (Index j = 0; j < h; ++j) {
                    const Index src_j = (j - dr + h) % h;
                    const double* row = base.data() + src_j * w;
                    const double* ref_row = ref.data() + j * w;
                    for (Index k = 0; k < w; ++k) corr += row[(k - dc + w) % w] * ref_row[k];
                }
                if (corr > best_corr) {
                    best_corr = corr;
                    best.shift_row = dr;
                    best.shift_col = dc;
                    best.flipped = (flip == 1);
                }
            }
    }
    const Vec base = best.flipped ? point_reflect(x, shape) : x;
    best.aligned = circular_shift(base, shape, best.shift_row, best.shift_col);
    return best;
}

double pearson_correlation(const Vec& a, const Vec& b) {
    require_length(a, b.size(), "pearson_correlation");
    const double ma = a.mean(), mb = b.mean();
    const Vec da = a.array() - ma, db = b.array() - mb;
    const double denom = std::sqrt(da.squaredNorm() * db.squaredNorm());
    if (denom == 0.0) return 0.0;
    return da.dot(db) / denom;
}

}  // namespace pr
