#include "pr/measurement.hpp"

#include <cmath>

namespace pr {

MeasurementOperator MeasurementOperator::fourier(const Shape2D& shape) {
    MeasurementOperator op;
    op.kind_ = Kind::Fourier2D;
    op.shape_ = shape;
    op.input_len_ = shape.size();
    op.output_len_ = shape.size();
    return op;
}

MeasurementOperator MeasurementOperator::gaussian_real(Mat a) {
    if (a.rows() < 1 || a.cols() < 1) throw DimensionError("gaussian_real: empty matrix");
    MeasurementOperator op;
    op.kind_ = Kind::GaussianReal;
    op.input_len_ = a.cols();
    op.output_len_ = a.rows();
    op.a_real_ = std::move(a);
    return op;
}

MeasurementOperator MeasurementOperator::gaussian_complex(CMat a) {
    if (a.rows() < 1 || a.cols() < 1) throw DimensionError("gaussian_complex: empty matrix");
    MeasurementOperator op;
    op.kind_ = Kind::GaussianComplex;
    op.input_len_ = a.cols();
    op.output_len_ = a.rows();
    op.a_cplx_ = std::move(a);
    return op;
}

CVec MeasurementOperator::apply(const Vec& x) const {
    require_length(x, input_len_, "MeasurementOperator::apply");
    switch (kind_) {
        case Kind::Fourier2D:
            return dft2(x, shape_);
        case Kind::GaussianReal:
            return (a_real_ * x).cast<std::complex<double>>();
        case Kind::GaussianComplex:
            return a_cplx_ * x.cast<std::complex<double>>();
    }
    throw Error("unreachable");
}

Vec MeasurementOperator::adjoint_real(const CVec& v) const {
    if (v.size() != output_len_)
        throw ShapeError("adjoint_real: expected length " + std::to_string(output_len_));
    switch (kind_) {
        case Kind::Fourier2D:
            // F^H = n * F^{-1} under the unnormalized-forward convention.
            return (static_cast<double>(shape_.size()) * idft2(v, shape_)).real();
        case Kind::GaussianReal:
            return a_real_.transpose() * v.real();
        case Kind::GaussianComplex:
            return (a_cplx_.adjoint() * v).real();
    }
    throw Error("unreachable");
}

Vec apply_magnitude(const MeasurementOperator& op, const Vec& x) {
    if (op.kind() == MeasurementOperator::Kind::GaussianReal) {
        require_length(x, op.input_len(), "apply_magnitude");
        return (op.matrix_real() * x).cwiseAbs();
    }
    return op.apply(x).cwiseAbs();
}

double magnitude_loss(const MeasurementOperator& op, const Vec& x, const Vec& y) {
    require_length(y, op.output_len(), "magnitude_loss: y");
    return (apply_magnitude(op, x) - y).squaredNorm();
}

std::pair<double, Vec> magnitude_loss_and_grad(const MeasurementOperator& op, const Vec& x,
                                               const Vec& y, double eps) {
    require_length(y, op.output_len(), "magnitude_loss_grad: y");
    const CVec c = op.apply(x);
    const Vec mag = c.cwiseAbs();
    const double loss = (mag - y).squaredNorm();

    CVec weighted(c.size());
    for (Index j = 0; j < c.size(); ++j) {
        if (mag[j] < eps)
            weighted[j] = 0.0;
        else
            weighted[j] = (mag[j] - y[j]) * (c[j] / mag[j]);
    }
    return {loss, 2.0 * op.adjoint_real(weighted)};
}

Vec magnitude_loss_grad(const MeasurementOperator& op, const Vec& x, const Vec& y, double eps) {
    return magnitude_loss_and_grad(op, x, y, eps).second;
}

}  // namespace pr
