#ifndef PR_MEASUREMENT_HPP
#define PR_MEASUREMENT_HPP

#include "pr/dft.hpp"
#include "pr/types.hpp"

namespace pr {

/// Magnitude-only forward map |A.|, where A is the 2-D DFT or a dense
/// Gaussian matrix (real or complex). Immutable after construction.
class MeasurementOperator {
public:
    enum class Kind { Fourier2D, GaussianReal, GaussianComplex };

    MeasurementOperator() = default;  // empty placeholder; assign before use

    static MeasurementOperator fourier(const Shape2D& shape);
    static MeasurementOperator gaussian_real(Mat a);
    static MeasurementOperator gaussian_complex(CMat a);

    Kind kind() const { return kind_; }
    Index input_len() const { return input_len_; }
    Index output_len() const { return output_len_; }
    const Shape2D& shape() const { return shape_; }
    const Mat& matrix_real() const { return a_real_; }
    const CMat& matrix_complex() const { return a_cplx_; }

    /// c = A x.
    CVec apply(const Vec& x) const;

    /// Re(A^H v). For the Fourier operator A^H v = n * idft2(v).
    Vec adjoint_real(const CVec& v) const;

private:
    Kind kind_ = Kind::Fourier2D;
    Shape2D shape_;
    Mat a_real_;
    CMat a_cplx_;
    Index input_len_ = 0;
    Index output_len_ = 0;
};

/// y_hat = |A x| entrywise.
Vec apply_magnitude(const MeasurementOperator& op, const Vec& x);

/// sum_j (|Ax|_j - y_j)^2.
double magnitude_loss(const MeasurementOperator& op, const Vec& x, const Vec& y);

/// Gradient of magnitude_loss with respect to x:
///   2 * Re(A^H ((|c| - y) .* c/|c|)),  c = A x,
/// with the phase factor c_j/|c_j| taken as 0 whenever |c_j| < eps (the
/// minimal-norm subgradient at a vanishing magnitude).
Vec magnitude_loss_grad(const MeasurementOperator& op, const Vec& x, const Vec& y,
                        double eps = 1e-12);

/// Loss and gradient from one evaluation of c = A x.
std::pair<double, Vec> magnitude_loss_and_grad(const MeasurementOperator& op, const Vec& x,
                                               const Vec& y, double eps = 1e-12);

}  // namespace pr

#endif
