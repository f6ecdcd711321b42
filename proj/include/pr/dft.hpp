#ifndef PR_DFT_HPP
#define PR_DFT_HPP

#include "pr/types.hpp"

namespace pr {

/// Unnormalized forward 2-D DFT of a row-major flattened real image:
/// out(u,v) = sum_{j,k} x(j,k) * exp(-2*pi*i*(u*j/H + v*k/W)).
CVec dft2(const Vec& x, const Shape2D& shape);

/// Forward transform of an already-complex vector (same convention).
CVec dft2(const CVec& x, const Shape2D& shape);

/// Inverse of dft2, scaled by 1/(H*W): idft2(dft2(x)) == x.
CVec idft2(const CVec& c, const Shape2D& shape);

}  // namespace pr

#endif
