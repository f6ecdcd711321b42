#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pr/measurement.hpp"
#include "pr/metrics.hpp"
#include "pr/rng.hpp"
#include "test_util.hpp"

using namespace pr;

namespace {

MeasurementOperator make_operator(int which, Index m, Index n, const Shape2D& shape, Seed seed) {
    switch (which) {
        case 0: return MeasurementOperator::fourier(shape);
        case 1: return MeasurementOperator::gaussian_real(gaussian_matrix_real(m, n, seed));
        default:
            return MeasurementOperator::gaussian_complex(gaussian_matrix_complex(m, n, seed));
    }
}

// Central finite differences of the magnitude loss.
Vec fd_gradient(const MeasurementOperator& op, const Vec& x, const Vec& y, double h) {
    Vec g(x.size());
    for (Index i = 0; i < x.size(); ++i) {
        Vec xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        g[i] = (magnitude_loss(op, xp, y) - magnitude_loss(op, xm, y)) / (2.0 * h);
    }
    return g;
}

}  // namespace

TEST_CASE("apply_magnitude basics") {
    Vec delta = Vec::Zero(4);
    delta[0] = 1.0;
    const auto fourier = MeasurementOperator::fourier(Shape2D(1, 4));
    const Vec y = apply_magnitude(fourier, delta);
    for (Index i = 0; i < 4; ++i) CHECK(y[i] == doctest::Approx(1.0).epsilon(1e-12));

    const auto identity = MeasurementOperator::gaussian_real(Mat::Identity(3, 3));
    Vec x(3);
    x << -2.0, 0.5, 3.0;
    const Vec mags = apply_magnitude(identity, x);
    CHECK(mags[0] == 2.0);
    CHECK(mags[1] == 0.5);
    CHECK(mags[2] == 3.0);

    CHECK_THROWS_AS(apply_magnitude(fourier, Vec::Ones(3)), ShapeError);
}

TEST_CASE("fourier magnitudes are shift and reflection invariant") {
    const Shape2D shape(8, 8);
    const auto op = MeasurementOperator::fourier(shape);
    const Vec x = prtest::random_image(shape.size(), Seed(17));
    const Vec y = apply_magnitude(op, x);

    const Vec shifted = circular_shift(x, shape, 3, 5);
    CHECK((apply_magnitude(op, shifted) - y).cwiseAbs().maxCoeff() < 1e-10);

    const Vec reflected = point_reflect(x, shape);
    CHECK((apply_magnitude(op, reflected) - y).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("fourier magnitudes of real images carry the DFT symmetry") {
    const Shape2D shape(6, 7);
    const auto op = MeasurementOperator::fourier(shape);
    const Vec y = apply_magnitude(op, prtest::random_image(shape.size(), Seed(23)));
    for (Index u = 0; u < shape.height; ++u)
        for (Index v = 0; v < shape.width; ++v) {
            const Index mirror =
                ((shape.height - u) % shape.height) * shape.width + (shape.width - v) % shape.width;
            CHECK(std::abs(y[u * shape.width + v] - y[mirror]) < 1e-10);
        }
}

TEST_CASE("magnitude_loss exact values and reference sum") {
    const Shape2D shape(1, 4);
    const auto op = MeasurementOperator::fourier(shape);
    Vec delta = Vec::Zero(4);
    delta[0] = 1.0;

    CHECK(magnitude_loss(op, delta, apply_magnitude(op, delta)) == doctest::Approx(0.0));
    CHECK(magnitude_loss(op, delta, Vec::Zero(4)) == doctest::Approx(4.0).epsilon(1e-12));

    const auto gop = MeasurementOperator::gaussian_complex(gaussian_matrix_complex(6, 5, Seed(2)));
    const Vec x = prtest::random_normal(5, Seed(3));
    const Vec y = prtest::random_image(6, Seed(4));
    const Vec mags = apply_magnitude(gop, x);
    double reference = 0.0;
    for (Index j = 0; j < 6; ++j) reference += (mags[j] - y[j]) * (mags[j] - y[j]);
    CHECK(magnitude_loss(gop, x, y) == doctest::Approx(reference).epsilon(1e-12));

    CHECK_THROWS_AS(magnitude_loss(gop, x, Vec::Zero(3)), ShapeError);
}

TEST_CASE("gradient vanishes at an exact fit and matches the scalar case") {
    const Shape2D shape(2, 3);
    const auto op = MeasurementOperator::fourier(shape);
    const Vec x = prtest::random_image(6, Seed(8));
    const Vec g = magnitude_loss_grad(op, x, apply_magnitude(op, x));
    CHECK(g.cwiseAbs().maxCoeff() < 1e-10);

    // d/dx (|2x| - 1)^2 at x = 3 is 2*(6-1)*2 = 20.
    Mat a(1, 1);
    a << 2.0;
    const auto scalar_op = MeasurementOperator::gaussian_real(a);
    Vec x1(1), y1(1);
    x1 << 3.0;
    y1 << 1.0;
    const Vec g1 = magnitude_loss_grad(scalar_op, x1, y1);
    CHECK(g1[0] == doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("gradient matches central finite differences on all operator kinds") {
    const Shape2D shape(4, 6);
    const Index n = shape.size(), m = 16;
    const double h = 1e-6;
    Rng rng(Seed(70));

    for (int which = 0; which < 3; ++which) {
        int done = 0;
        std::uint64_t attempt = 0;
        while (done < 50) {
            const Seed inst_seed = derive_seed(Seed(1000 + which), attempt++);
            const auto op = make_operator(which, m, n, shape, inst_seed);
            const Vec x = prtest::random_normal(n, derive_seed(inst_seed, 1));
            const Vec y = prtest::random_image(op.output_len(), derive_seed(inst_seed, 2));

            // FD is unreliable where |c_j| is tiny; skip such instances.
            if (op.apply(x).cwiseAbs().minCoeff() < 1e-3) continue;

            const Vec g = magnitude_loss_grad(op, x, y);
            const Vec fd = fd_gradient(op, x, y, h);
            const double rel = (g - fd).norm() / std::max(1e-12, fd.norm());
            CHECK(rel < 1e-5);
            ++done;
        }
    }
}

TEST_CASE("negative gradient is a descent direction") {
    const Shape2D shape(3, 5);
    for (int trial = 0; trial < 10; ++trial) {
        const auto op = MeasurementOperator::fourier(shape);
        const Vec x = prtest::random_image(shape.size(), Seed(300 + trial));
        const Vec y = prtest::random_image(shape.size(), Seed(400 + trial));
        const auto [loss, grad] = magnitude_loss_and_grad(op, x, y);
        if (grad.norm() < 1e-12) continue;
        const double step = 1e-7 / grad.norm();
        const double moved = magnitude_loss(op, (x - step * grad).eval(), y);
        CHECK(moved < loss);
    }
}

TEST_CASE("zero-magnitude entries use the zero subgradient") {
    Mat a(1, 1);
    a << 1.0;
    const auto op = MeasurementOperator::gaussian_real(a);
    Vec x(1), y(1);
    x << 0.0;  // c = 0 exactly
    y << 1.0;
    const Vec g = magnitude_loss_grad(op, x, y);
    CHECK(g[0] == 0.0);
}
