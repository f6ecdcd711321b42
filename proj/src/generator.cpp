#include "pr/generator.hpp"

#include <atomic>
#include <cmath>
#include <cstring>
#include <fstream>

namespace pr {

namespace {

std::atomic<std::uint64_t> next_stamp{1};

double logistic(double a) { return 1.0 / (1.0 + std::exp(-a)); }

}  // namespace

Activation Activation::leaky_relu(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ValidationError("leaky_relu: alpha must lie in (0,1)");
    return {Kind::LeakyRelu, alpha};
}

double Activation::apply(double a) const {
    switch (kind) {
        case Kind::Identity: return a;
        case Kind::Relu: return a > 0.0 ? a : 0.0;
        case Kind::LeakyRelu: return a > 0.0 ? a : alpha * a;
        case Kind::Sigmoid: return logistic(a);
        case Kind::Tanh: return std::tanh(a);
    }
    throw Error("unreachable");
}

double Activation::derivative(double pre) const {
    switch (kind) {
        case Kind::Identity: return 1.0;
        case Kind::Relu: return pre > 0.0 ? 1.0 : 0.0;
        case Kind::LeakyRelu: return pre > 0.0 ? 1.0 : alpha;
        case Kind::Sigmoid: {
            const double s = logistic(pre);
            return s * (1.0 - s);
        }
        case Kind::Tanh: {
            const double t = std::tanh(pre);
            return 1.0 - t * t;
        }
    }
    throw Error("unreachable");
}

Vec Activation::apply(const Vec& pre) const {
    return pre.unaryExpr([this](double a) { return apply(a); });
}

Mat Activation::apply(const Mat& pre) const {
    return pre.unaryExpr([this](double a) { return apply(a); });
}

Vec Activation::derivative(const Vec& pre) const {
    return pre.unaryExpr([this](double a) { return derivative(a); });
}

GeneratorNet::GeneratorNet(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
    if (layers_.empty()) throw ValidationError("GeneratorNet: needs at least one layer");
    for (std::size_t t = 0; t < layers_.size(); ++t) {
        const auto& l = layers_[t];
        if (l.bias.size() != l.weight.rows())
            throw ValidationError("GeneratorNet: layer " + std::to_string(t + 1) +
                                  " bias length does not match weight rows");
        if (!l.weight.allFinite() || !l.bias.allFinite())
            throw ValidationError("GeneratorNet: layer " + std::to_string(t + 1) +
                                  " has non-finite parameters");
        if (t > 0 && l.in_dim() != layers_[t - 1].out_dim())
            throw ValidationError("GeneratorNet: layer " + std::to_string(t + 1) + " input dim " +
                                  std::to_string(l.in_dim()) + " != layer " + std::to_string(t) +
                                  " output dim " + std::to_string(layers_[t - 1].out_dim()));
    }
    stamp_ = next_stamp.fetch_add(1);
}

std::pair<Vec, ActivationTrace> forward_sub(const GeneratorNet& net, Index i, Index j,
                                            const Vec& z) {
    if (i < 1 || j > net.depth() || i > j)
        throw RangeError("forward_sub: invalid layer range [" + std::to_string(i) + ", " +
                         std::to_string(j) + "] for depth " + std::to_string(net.depth()));
    require_length(z, net.layer(i).in_dim(), "forward_sub: input");

    ActivationTrace trace;
    trace.net_stamp = net.stamp();
    trace.first_layer = i;
    trace.last_layer = j;
    trace.input = z;
    trace.pre.reserve(static_cast<std::size_t>(j - i + 1));
    trace.post.reserve(static_cast<std::size_t>(j - i + 1));

    Vec cur = z;
    for (Index l = i; l <= j; ++l) {
        const DenseLayer& layer = net.layer(l);
        Vec pre = layer.weight * cur + layer.bias;
        cur = layer.activation.apply(pre);
        trace.pre.push_back(std::move(pre));
        trace.post.push_back(cur);
    }
    return {cur, std::move(trace)};
}

std::pair<Vec, ActivationTrace> forward(const GeneratorNet& net, const Vec& z0) {
    return forward_sub(net, 1, net.depth(), z0);
}

Mat forward_batch(const GeneratorNet& net, const Mat& z0) {
    if (z0.rows() != net.latent_dim())
        throw ShapeError("forward_batch: expected " + std::to_string(net.latent_dim()) + " rows");
    Mat cur = z0;
    for (Index l = 1; l <= net.depth(); ++l) {
        const DenseLayer& layer = net.layer(l);
        Mat pre = (layer.weight * cur).colwise() + layer.bias;
        cur = layer.activation.apply(pre);
    }
    return cur;
}

Vec vjp_sub(const GeneratorNet& net, Index i, Index j, const ActivationTrace& trace,
            const Vec& cotangent) {
    if (i < 1 || j > net.depth() || i > j)
        throw RangeError("vjp_sub: invalid layer range [" + std::to_string(i) + ", " +
                         std::to_string(j) + "]");
    if (trace.net_stamp != net.stamp() || trace.first_layer != i || trace.last_layer != j)
        throw TraceError("vjp_sub: trace does not match this network and layer range");
    require_length(cotangent, net.layer(j).out_dim(), "vjp_sub: cotangent");

    Vec grad = cotangent;
    for (Index l = j; l >= i; --l) {
        const DenseLayer& layer = net.layer(l);
        const Vec& pre = trace.pre[static_cast<std::size_t>(l - i)];
        grad = layer.weight.transpose() *
               (grad.cwiseProduct(layer.activation.derivative(pre))).eval();
    }
    return grad;
}

// ---------------------------------------------------------------------------
// PRGW persistence

namespace {

constexpr char kMagic[4] = {'P', 'R', 'G', 'W'};
constexpr std::uint32_t kVersion = 1;

struct Writer {
    std::ofstream out;
    std::uint64_t offset = 0;

    void bytes(const void* p, std::size_t n) {
        out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
        offset += n;
    }
    void u32(std::uint32_t v) { bytes(&v, 4); }
    void u8(std::uint8_t v) { bytes(&v, 1); }
    void f64(double v) { bytes(&v, 8); }
};

struct Reader {
    std::ifstream in;
    std::uint64_t offset = 0;

    void bytes(void* p, std::size_t n, const char* what) {
        in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        if (in.gcount() != static_cast<std::streamsize>(n))
            throw FormatError(std::string("PRGW: truncated while reading ") + what, offset);
        offset += n;
    }
    std::uint32_t u32(const char* what) {
        std::uint32_t v;
        bytes(&v, 4, what);
        return v;
    }
    std::uint8_t u8(const char* what) {
        std::uint8_t v;
        bytes(&v, 1, what);
        return v;
    }
    double f64(const char* what) {
        double v;
        bytes(&v, 8, what);
        return v;
    }
};

}  // namespace

void save_weights(const GeneratorNet& net, const std::string& path) {
    Writer w;
    w.out.open(path, std::ios::binary | std::ios::trunc);
    if (!w.out) throw DataError("save_weights: cannot open " + path);

    w.bytes(kMagic, 4);
    w.u32(kVersion);
    w.u32(static_cast<std::uint32_t>(net.depth()));
    for (Index l = 1; l <= net.depth(); ++l) {
        const DenseLayer& layer = net.layer(l);
        w.u32(static_cast<std::uint32_t>(layer.out_dim()));
        w.u32(static_cast<std::uint32_t>(layer.in_dim()));
        w.u8(static_cast<std::uint8_t>(layer.activation.kind));
        if (layer.activation.kind == Activation::Kind::LeakyRelu) w.f64(layer.activation.alpha);
        for (Index r = 0; r < layer.out_dim(); ++r)
            for (Index c = 0; c < layer.in_dim(); ++c) w.f64(layer.weight(r, c));
        for (Index r = 0; r < layer.out_dim(); ++r) w.f64(layer.bias[r]);
    }
    w.out.flush();
    if (!w.out) throw DataError("save_weights: write failed for " + path);
}

GeneratorNet load_weights(const std::string& path) {
    Reader r;
    r.in.open(path, std::ios::binary);
    if (!r.in) throw DataError("load_weights: cannot open " + path);

    char magic[4];
    r.bytes(magic, 4, "magic");
    if (std::memcmp(magic, kMagic, 4) != 0) throw FormatError("PRGW: bad magic bytes", 0);
    const std::uint32_t version = r.u32("version");
    if (version != kVersion)
        throw FormatError("PRGW: unsupported version " + std::to_string(version), 4);
    const std::uint32_t layer_count = r.u32("layer count");
    if (layer_count == 0) throw FormatError("PRGW: zero layers", 8);

    std::vector<DenseLayer> layers;
    layers.reserve(layer_count);
    for (std::uint32_t l = 0; l < layer_count; ++l) {
        const std::uint64_t header_off = r.offset;
        const std::uint32_t rows = r.u32("layer rows");
        const std::uint32_t cols = r.u32("layer cols");
        if (rows == 0 || cols == 0)
            throw FormatError("PRGW: layer " + std::to_string(l + 1) + " has a zero dimension",
                              header_off);
        const std::uint8_t code = r.u8("activation code");
        Activation act;
        switch (code) {
            case 0: act = Activation::identity(); break;
            case 1: act = Activation::relu(); break;
            case 2: act = Activation::leaky_relu(r.f64("leaky_relu alpha")); break;
            case 3: act = Activation::sigmoid(); break;
            case 4: act = Activation::tanh(); break;
            default:
                throw FormatError("PRGW: unknown activation code " + std::to_string(code),
                                  r.offset - 1);
        }
        DenseLayer layer;
        layer.weight.resize(rows, cols);
        layer.bias.resize(rows);
        layer.activation = act;
        for (std::uint32_t i = 0; i < rows; ++i)
            for (std::uint32_t j = 0; j < cols; ++j) layer.weight(i, j) = r.f64("weights");
        for (std::uint32_t i = 0; i < rows; ++i) layer.bias[i] = r.f64("biases");
        layers.push_back(std::move(layer));
    }

    try {
        return GeneratorNet(std::move(layers));
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("load_weights: ") + e.what());
    }
}

}  // namespace pr
