#include "pr/dft.hpp"

#include <unsupported/Eigen/FFT>

#include <complex>
#include <vector>

namespace pr {

namespace {

// One FFT object per thread; it memoizes twiddle tables per transform length,
// so repeated desk-scale transforms cost no plan setup after the first call.
Eigen::FFT<double>& fft_engine() {
    thread_local Eigen::FFT<double> engine;
    return engine;
}

using Cd = std::complex<double>;

// In-place row-column transform of a row-major H x W grid.
void transform2d(std::vector<Cd>& grid, Index height, Index width, bool inverse) {
    auto& fft = fft_engine();
    std::vector<Cd> line(static_cast<std::size_t>(std::max(height, width)));
    std::vector<Cd> out(line.size());

    const int w = static_cast<int>(width);
    if (w > 1) {
        for (Index j = 0; j < height; ++j) {
            Cd* row = grid.data() + j * width;
            if (inverse)
                fft.inv(out.data(), row, w);
            else
                fft.fwd(out.data(), row, w);
            std::copy(out.begin(), out.begin() + width, row);
        }
    }

    const int h = static_cast<int>(height);
    if (h > 1) {
        for (Index k = 0; k < width; ++k) {
            for (Index j = 0; j < height; ++j)
                line[static_cast<std::size_t>(j)] = grid[j * width + k];
            if (inverse)
                fft.inv(out.data(), line.data(), h);
            else
                fft.fwd(out.data(), line.data(), h);
            for (Index j = 0; j < height; ++j)
                grid[j * width + k] = out[static_cast<std::size_t>(j)];
        }
    }
}

CVec run(const CVec& x, const Shape2D& shape, bool inverse) {
    if (x.size() != shape.size())
        throw ShapeError("dft2: input length " + std::to_string(x.size()) +
                         " does not match shape " + std::to_string(shape.height) + "x" +
                         std::to_string(shape.width));
    std::vector<Cd> grid(x.data(), x.data() + x.size());
    transform2d(grid, shape.height, shape.width, inverse);
    return Eigen::Map<const CVec>(grid.data(), x.size());
}

}  // namespace

CVec dft2(const Vec& x, const Shape2D& shape) {
    return run(x.cast<Cd>().eval(), shape, /*inverse=*/false);
}

CVec dft2(const CVec& x, const Shape2D& shape) { return run(x, shape, /*inverse=*/false); }

CVec idft2(const CVec& c, const Shape2D& shape) { return run(c, shape, /*inverse=*/true); }

}  // namespace pr
