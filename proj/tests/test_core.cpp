#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "pr/dft.hpp"
#include "pr/pgd.hpp"
#include "pr/projection.hpp"
#include "pr/rng.hpp"
#include "test_util.hpp"

using namespace pr;

namespace {

// O(n^2) direct-summation DFT, the reference for the fast path.
CVec dft2_direct(const Vec& x, const Shape2D& shape) {
    const Index h = shape.height, w = shape.width;
    CVec out(shape.size());
    for (Index u = 0; u < h; ++u)
        for (Index v = 0; v < w; ++v) {
            std::complex<double> acc = 0.0;
            for (Index j = 0; j < h; ++j)
                for (Index k = 0; k < w; ++k) {
                    const double phase = -2.0 * M_PI *
                                         (double(u) * j / double(h) + double(v) * k / double(w));
                    acc += x[j * w + k] * std::complex<double>(std::cos(phase), std::sin(phase));
                }
            out[u * w + v] = acc;
        }
    return out;
}

// Bisection on theta solving sum max(|u_i| - theta, 0) = r; reference for the
// sort-and-scan projection.
Vec project_l1_bisection(const Vec& v, const L1Ball& ball) {
    const Vec u = v - ball.center;
    if (u.lpNorm<1>() <= ball.radius) return v;
    double lo = 0.0, hi = u.cwiseAbs().maxCoeff();
    for (int it = 0; it < 200; ++it) {
        const double theta = 0.5 * (lo + hi);
        const double mass = (u.cwiseAbs().array() - theta).max(0.0).sum();
        if (mass > ball.radius)
            lo = theta;
        else
            hi = theta;
    }
    const double theta = 0.5 * (lo + hi);
    Vec w(u.size());
    for (Index i = 0; i < u.size(); ++i)
        w[i] = std::copysign(std::max(std::abs(u[i]) - theta, 0.0), u[i]);
    return w + ball.center;
}

}  // namespace

TEST_CASE("seed derivation is order-independent and collision-resistant") {
    const Seed base(42);
    CHECK(derive_seed(base, 0).value != derive_seed(base, 1).value);
    CHECK(derive_seed(base, 5).value == derive_seed(base, 5).value);
    CHECK(derive_seed(Seed(1), 0).value != derive_seed(Seed(2), 0).value);
}

TEST_CASE("rng normal moments and determinism") {
    Rng a(Seed(7)), b(Seed(7));
    for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());

    Rng rng(Seed(11));
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = rng.normal();
        sum += v;
        sum2 += v * v;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(std::abs(sum2 / n - 1.0) < 0.02);
}

TEST_CASE("gaussian matrices match their stated variances") {
    const Index m = 300, n = 784;
    const Mat a = gaussian_matrix_real(m, n, Seed(3));
    const double var = a.array().square().sum() / double(m * n);
    CHECK(var == doctest::Approx(1.0 / 300.0).epsilon(0.10));

    const CMat c = gaussian_matrix_complex(m, n, Seed(4));
    const double e_abs2 = c.array().abs2().sum() / double(m * n);
    CHECK(e_abs2 == doctest::Approx(1.0 / 300.0).epsilon(0.10));

    CHECK(gaussian_matrix_real(m, n, Seed(3)) == gaussian_matrix_real(m, n, Seed(3)));
    CHECK_THROWS_AS(gaussian_matrix_real(0, 4, Seed(1)), DimensionError);
}

TEST_CASE("sample_latent: shape, determinism, prefix stability, moments") {
    const auto one = sample_latent(5, 1, Seed(9));
    REQUIRE(one.size() == 1);
    CHECK(one[0].size() == 5);

    const auto a = sample_latent(5, 3, Seed(9));
    const auto b = sample_latent(5, 7, Seed(9));
    for (int i = 0; i < 3; ++i) CHECK(a[size_t(i)] == b[size_t(i)]);

    const auto big = sample_latent(4, 10000, Seed(10));
    Vec mean = Vec::Zero(4);
    for (const Vec& v : big) mean += v;
    mean /= 10000.0;
    for (Index i = 0; i < 4; ++i) CHECK(std::abs(mean[i]) < 0.05);
}

TEST_CASE("dft2 of a delta image is flat") {
    Vec x = Vec::Zero(4);
    x[0] = 1.0;
    const CVec c = dft2(x, Shape2D(2, 2));
    for (Index i = 0; i < 4; ++i) {
        CHECK(c[i].real() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(c[i].imag() == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("dft2 of a constant image concentrates at DC") {
    const Vec x = Vec::Ones(4);
    const CVec c = dft2(x, Shape2D(1, 4));
    CHECK(std::abs(c[0] - std::complex<double>(4.0, 0.0)) < 1e-12);
    for (Index i = 1; i < 4; ++i) CHECK(std::abs(c[i]) < 1e-12);
}

TEST_CASE("dft2 matches the direct-summation reference") {
    for (int trial = 0; trial < 3; ++trial) {
        const Shape2D shape(4, 4);
        const Vec x = prtest::random_image(shape.size(), Seed(100 + trial));
        const CVec fast = dft2(x, shape);
        const CVec slow = dft2_direct(x, shape);
        CHECK((fast - slow).cwiseAbs().maxCoeff() < 1e-10);
    }
    // non-power-of-two extents
    const Shape2D odd(3, 7);
    const Vec x = prtest::random_image(odd.size(), Seed(200));
    CHECK((dft2(x, odd) - dft2_direct(x, odd)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("idft2 inverts dft2") {
    CVec flat(4);
    flat << std::complex<double>(4, 0), std::complex<double>(0, 0), std::complex<double>(0, 0),
        std::complex<double>(0, 0);
    const CVec back = idft2(flat, Shape2D(1, 4));
    for (Index i = 0; i < 4; ++i) CHECK(std::abs(back[i] - 1.0) < 1e-12);

    const Shape2D shape(8, 8);
    const Vec x = prtest::random_image(shape.size(), Seed(5));
    const CVec round = idft2(dft2(x, shape), shape);
    CHECK((round.real() - x).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(round.imag().cwiseAbs().maxCoeff() < 1e-10);

    const CVec zeros = idft2(CVec::Zero(16), Shape2D(4, 4));
    CHECK(zeros.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dft2 rejects mismatched lengths") {
    CHECK_THROWS_AS(dft2(Vec(Vec::Ones(5)), Shape2D(2, 2)), ShapeError);
    CHECK_THROWS_AS(idft2(CVec(CVec::Ones(5)), Shape2D(2, 2)), ShapeError);
}

TEST_CASE("dft2 conjugate symmetry, Parseval, linearity") {
    const Shape2D shape(6, 5);
    const Vec x = prtest::random_image(shape.size(), Seed(21));
    const CVec c = dft2(x, shape);

    for (Index u = 0; u < shape.height; ++u)
        for (Index v = 0; v < shape.width; ++v) {
            const Index mirror =
                ((shape.height - u) % shape.height) * shape.width + (shape.width - v) % shape.width;
            CHECK(std::abs(c[u * shape.width + v] - std::conj(c[mirror])) < 1e-10);
        }

    const double lhs = c.squaredNorm();
    const double rhs = double(shape.size()) * x.squaredNorm();
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)));

    const Vec y = prtest::random_image(shape.size(), Seed(22));
    const CVec combo = dft2((2.5 * x - 0.7 * y).eval(), shape);
    const CVec sep = 2.5 * dft2(x, shape) - 0.7 * dft2(y, shape);
    CHECK((combo - sep).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("project_l1 basics") {
    const L1Ball ball(Vec::Zero(2), 2.0);

    Vec inside(2);
    inside << 0.5, -0.5;
    CHECK(project_l1(inside, ball) == inside);

    Vec v(2);
    v << 2.0, 2.0;
    const Vec w = project_l1(v, ball);
    CHECK(w[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(w[1] == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(project_l1(Vec::Ones(3), ball), ShapeError);
    CHECK_THROWS_AS(L1Ball(Vec::Zero(2), 0.0), DimensionError);
}

TEST_CASE("project_l1 agrees with the bisection reference on random instances") {
    Rng rng(Seed(31));
    for (int trial = 0; trial < 1000; ++trial) {
        const Index dim = 1 + static_cast<Index>(rng.uniform01() * 12);
        Vec v(dim), center(dim);
        for (Index i = 0; i < dim; ++i) {
            v[i] = 4.0 * (rng.uniform01() - 0.5);
            center[i] = 2.0 * (rng.uniform01() - 0.5);
        }
        const double radius = 0.1 + 3.0 * rng.uniform01();
        const L1Ball ball(center, radius);
        const Vec fast = project_l1(v, ball);
        const Vec slow = project_l1_bisection(v, ball);
        CHECK((fast - slow).cwiseAbs().maxCoeff() < 1e-8);
        CHECK(ball.contains(fast));
    }
}

TEST_CASE("noise schedule variance is exact") {
    const NoiseSchedule s = NoiseSchedule::on(0.02, 0.55);
    for (long k : {0L, 1L, 7L, 100L})
        CHECK(noise_variance(s, k) == 0.02 / std::pow(1.0 + double(k), 0.55));
}

TEST_CASE("pgd with zero steps returns x0 and its loss") {
    const LossGradFn f = [](const Vec& x) { return std::make_pair(x.squaredNorm(), Vec(2 * x)); };
    Vec x0(3);
    x0 << 1, 2, 3;
    PgdSettings s;
    s.steps = 0;
    const PgdResult r = pgd(f, x0, L1Ball(Vec::Zero(3), 100.0), s);
    CHECK(r.best == x0);
    CHECK(r.best_loss == x0.squaredNorm());
    CHECK(r.evaluations == 1);
}

TEST_CASE("pgd contracts on a quadratic with an interior minimizer") {
    Vec c(4);
    c << 0.3, -0.2, 0.5, 0.1;
    const LossGradFn f = [&](const Vec& x) {
        return std::make_pair((x - c).squaredNorm(), Vec(2.0 * (x - c)));
    };
    PgdSettings s;
    s.steps = 200;
    s.step_size = 0.4;  // below 1/L = 0.5
    const PgdResult r = pgd(f, Vec::Zero(4), L1Ball(Vec::Zero(4), 50.0), s);
    CHECK((r.best - c).norm() < 1e-6);
}

TEST_CASE("pgd lands on the boundary when the minimizer is infeasible") {
    Vec c(3);
    c << 2.0, 1.5, -1.0;
    const L1Ball ball(Vec::Zero(3), 1.0);
    const LossGradFn f = [&](const Vec& x) {
        return std::make_pair((x - c).squaredNorm(), Vec(2.0 * (x - c)));
    };
    PgdSettings s;
    s.steps = 300;
    s.step_size = 0.3;
    const PgdResult r = pgd(f, Vec::Zero(3), ball, s);
    CHECK(r.best.lpNorm<1>() == doctest::Approx(1.0).epsilon(1e-8));

    PgdSettings oracle = s;
    oracle.steps = 30000;
    const PgdResult longrun = pgd(f, Vec::Zero(3), ball, oracle);
    CHECK((r.best - longrun.best).norm() < 1e-6);
}

TEST_CASE("pgd feasibility, best-tracking, monotone descent") {
    Rng rng(Seed(55));
    Vec c(6);
    for (Index i = 0; i < 6; ++i) c[i] = 3.0 * (rng.uniform01() - 0.5);
    const L1Ball ball(Vec::Ones(6) * 0.1, 0.7);
    const LossGradFn f = [&](const Vec& x) {
        return std::make_pair((x - c).squaredNorm(), Vec(2.0 * (x - c)));
    };
    PgdSettings s;
    s.steps = 150;
    s.step_size = 0.3;
    s.record_trace = true;
    const Vec x0 = ball.center;
    const PgdResult r = pgd(f, x0, ball, s);

    CHECK(ball.contains(r.best));
    CHECK(r.audit.violations == 0);
    CHECK(r.audit.checked == 151);
    CHECK(r.best_loss <= f(x0).first);
    for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] <= r.trace[i - 1] + 1e-12);
}

TEST_CASE("pgd noise off matches noiseless run bit for bit") {
    Vec c(4);
    c << 1, -1, 0.5, 0.25;
    const LossGradFn f = [&](const Vec& x) {
        return std::make_pair((x - c).squaredNorm(), Vec(2.0 * (x - c)));
    };
    PgdSettings off1;
    off1.steps = 50;
    off1.seed = Seed(99);
    off1.noise = NoiseSchedule::off();
    PgdSettings off2 = off1;
    off2.noise.enabled = false;
    off2.noise.eta = 123.0;  // irrelevant when disabled
    const PgdResult a = pgd(f, Vec::Zero(4), L1Ball(Vec::Zero(4), 10.0), off1);
    const PgdResult b = pgd(f, Vec::Zero(4), L1Ball(Vec::Zero(4), 10.0), off2);
    CHECK(a.best == b.best);
    CHECK(a.final == b.final);
}

TEST_CASE("pgd reports divergence with the iteration index") {
    int calls = 0;
    const LossGradFn f = [&](const Vec& x) {
        ++calls;
        const double loss = calls > 3 ? std::numeric_limits<double>::quiet_NaN() : 1.0;
        return std::make_pair(loss, Vec(Vec::Zero(x.size())));
    };
    PgdSettings s;
    s.steps = 10;
    CHECK_THROWS_AS(pgd(f, Vec::Zero(2), L1Ball(Vec::Zero(2), 1.0), s), DivergenceError);
}
