#include "pr/projection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace pr {

Vec project_l1(const Vec& v, const L1Ball& ball) {
    if (v.size() != ball.center.size())
        throw ShapeError("project_l1: point length " + std::to_string(v.size()) +
                         " vs ball dimension " + std::to_string(ball.center.size()));
    if (ball.unbounded()) return v;

    const Vec u = v - ball.center;
    const double r = ball.radius;
    if (u.lpNorm<1>() <= r) return v;

    const Index n = u.size();
    std::vector<double> mags(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) mags[static_cast<std::size_t>(i)] = std::abs(u[i]);
    std::sort(mags.begin(), mags.end(), std::greater<double>());

    // Largest rho with mags[rho-1] > (partial_sum(rho) - r) / rho gives the
    // threshold theta; coordinates below theta vanish.
    double cumsum = 0.0;
    double theta = 0.0;
    for (Index rho = 1; rho <= n; ++rho) {
        const double m = mags[static_cast<std::size_t>(rho - 1)];
        cumsum += m;
        const double candidate = (cumsum - r) / static_cast<double>(rho);
        if (m > candidate)
            theta = candidate;
        else
            break;
    }

    Vec w(n);
    for (Index i = 0; i < n; ++i) {
        const double shrunk = std::max(std::abs(u[i]) - theta, 0.0);
        w[i] = std::copysign(shrunk, u[i]);
    }
    return w + ball.center;
}

}  // namespace pr
