#ifndef PR_GENERATOR_HPP
#define PR_GENERATOR_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pr/types.hpp"

namespace pr {

struct Activation {
    enum class Kind : std::uint8_t { Identity = 0, Relu = 1, LeakyRelu = 2, Sigmoid = 3, Tanh = 4 };

    Kind kind = Kind::Identity;
    double alpha = 0.01;  // negative-side slope for LeakyRelu, in (0,1)

    static Activation identity() { return {Kind::Identity, 0.0}; }
    static Activation relu() { return {Kind::Relu, 0.0}; }
    static Activation leaky_relu(double alpha);
    static Activation sigmoid() { return {Kind::Sigmoid, 0.0}; }
    static Activation tanh() { return {Kind::Tanh, 0.0}; }

    double apply(double a) const;
    /// Derivative from the pre-activation; at exactly 0 this is 0 for relu
    /// and alpha for leaky_relu.
    double derivative(double pre) const;

    Vec apply(const Vec& pre) const;
    Mat apply(const Mat& pre) const;
    Vec derivative(const Vec& pre) const;
};

/// One affine map plus its activation; the ILO unit of "layer".
struct DenseLayer {
    Mat weight;  // out x in
    Vec bias;    // out
    Activation activation;

    Index in_dim() const { return weight.cols(); }
    Index out_dim() const { return weight.rows(); }
};

class GeneratorNet {
public:
    GeneratorNet() = default;
    explicit GeneratorNet(std::vector<DenseLayer> layers);

    Index depth() const { return static_cast<Index>(layers_.size()); }
    Index latent_dim() const { return layers_.front().in_dim(); }
    Index output_dim() const { return layers_.back().out_dim(); }
    const DenseLayer& layer(Index i) const { return layers_[static_cast<std::size_t>(i - 1)]; }
    const std::vector<DenseLayer>& layers() const { return layers_; }

    /// Monotone per-instance stamp used to pair traces with this network.
    std::uint64_t stamp() const { return stamp_; }

private:
    std::vector<DenseLayer> layers_;
    std::uint64_t stamp_ = 0;
};

/// Cached forward pass through layers [first_layer, last_layer]: the input,
/// every pre-activation, and every post-activation output z_i.
struct ActivationTrace {
    std::uint64_t net_stamp = 0;
    Index first_layer = 0;
    Index last_layer = 0;
    Vec input;
    std::vector<Vec> pre;   // pre[t]  = W z + b for layer first_layer + t
    std::vector<Vec> post;  // post[t] = activation(pre[t])
};

/// Applies layers i..j (1-based, inclusive); forward_sub(1, k, z0) is the full network.
std::pair<Vec, ActivationTrace> forward_sub(const GeneratorNet& net, Index i, Index j,
                                            const Vec& z);

std::pair<Vec, ActivationTrace> forward(const GeneratorNet& net, const Vec& z0);

/// Column-wise forward of the whole network (each column an independent input).
Mat forward_batch(const GeneratorNet& net, const Mat& z0);

/// J^T * cotangent for the subnetwork whose forward pass produced `trace`.
Vec vjp_sub(const GeneratorNet& net, Index i, Index j, const ActivationTrace& trace,
            const Vec& cotangent);

/// PRGW weight file, little-endian: magic "PRGW", u32 version = 1,
/// u32 layer_count, then per layer u32 rows, u32 cols, u8 activation code,
/// f64 alpha (leaky_relu only), rows*cols f64 row-major weights, rows f64 biases.
void save_weights(const GeneratorNet& net, const std::string& path);
GeneratorNet load_weights(const std::string& path);

}  // namespace pr

#endif
