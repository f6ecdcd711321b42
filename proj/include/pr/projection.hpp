#ifndef PR_PROJECTION_HPP
#define PR_PROJECTION_HPP

#include <limits>

#include "pr/types.hpp"

namespace pr {

/// {x : ||x - center||_1 <= radius}. An infinite radius makes the projection a no-op.
struct L1Ball {
    Vec center;
    double radius = std::numeric_limits<double>::infinity();

    L1Ball() = default;
    L1Ball(Vec c, double r) : center(std::move(c)), radius(r) {
        if (!(r > 0.0)) throw DimensionError("L1Ball: radius must be positive");
    }

    bool unbounded() const { return !(radius < std::numeric_limits<double>::infinity()); }

    bool contains(const Vec& v, double rel_slack = 1e-12) const {
        if (unbounded()) return true;
        return (v - center).lpNorm<1>() <= radius * (1.0 + rel_slack);
    }
};

/// Euclidean projection onto an l1-ball.
///
/// Shifts to the origin, returns the input unchanged when already feasible,
/// otherwise soft-thresholds by the threshold obtained from a descending sort
/// of the magnitudes and a partial-sum scan.
Vec project_l1(const Vec& v, const L1Ball& ball);

}  // namespace pr

#endif
