#ifndef PR_TYPES_HPP
#define PR_TYPES_HPP

#include <Eigen/Dense>
#include <cstdint>

#include "pr/errors.hpp"

namespace pr {

using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using Index = Eigen::Index;

/// Height x width of a flattened image vector (row-major: pixel (j,k) -> j*width + k).
struct Shape2D {
    Index height = 0;
    Index width = 0;

    Shape2D() = default;
    Shape2D(Index h, Index w) : height(h), width(w) {
        if (h < 1 || w < 1) throw DimensionError("Shape2D requires positive extents");
    }

    Index size() const { return height * width; }
    bool operator==(const Shape2D& o) const { return height == o.height && width == o.width; }
};

struct Seed {
    std::uint64_t value = 0;
    Seed() = default;
    explicit Seed(std::uint64_t v) : value(v) {}
};

inline void require_length(const Vec& v, Index n, const char* what) {
    if (v.size() != n)
        throw ShapeError(std::string(what) + ": expected length " + std::to_string(n) +
                         ", got " + std::to_string(v.size()));
}

}  // namespace pr

#endif
