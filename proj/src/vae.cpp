#include "pr/vae.hpp"

#include <cmath>

namespace pr {

namespace {

double softplus(double a) { return std::max(a, 0.0) + std::log1p(std::exp(-std::abs(a))); }

struct AdamParam {
    Mat value, m, v;

    AdamParam() = default;
    AdamParam(Index rows, Index cols)
        : value(Mat::Zero(rows, cols)), m(Mat::Zero(rows, cols)), v(Mat::Zero(rows, cols)) {}

    void step(const Mat& grad, double lr, long t) {
        constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
        m = beta1 * m + (1.0 - beta1) * grad;
        v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
        const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
        const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
        value.noalias() -=
            (lr / c1) * m.cwiseQuotient(((v / c2).cwiseSqrt().array() + eps).matrix());
    }
};

struct AffineParams {
    AdamParam w, b;

    AffineParams() = default;
    AffineParams(Index out, Index in, Rng& rng, double weight_sigma) : w(out, in), b(out, 1) {
        for (Index r = 0; r < out; ++r)
            for (Index c = 0; c < in; ++c) w.value(r, c) = weight_sigma * rng.normal();
    }

    Mat forward(const Mat& x) const { return (w.value * x).colwise() + b.value.col(0); }
};

Mat relu(const Mat& a) { return a.cwiseMax(0.0); }
Mat relu_mask(const Mat& a) {
    return a.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; });
}

}  // namespace

void VaeSpec::validate() const {
    if (latent_dim < 1 || epochs < 1 || batch_size < 1 || !(learning_rate > 0.0))
        throw ConfigError("VaeSpec: all fields must be positive");
    for (Index h : hidden_dims)
        if (h < 1) throw ConfigError("VaeSpec: hidden dims must be positive");
}

GeneratorNet train_vae(const std::vector<Vec>& images, const VaeSpec& spec,
                       VaeTrainReport* report, GeneratorNet* encoder_out) {
    spec.validate();
    if (images.empty()) throw DataError("train_vae: empty dataset");
    const Index n = images.front().size();
    for (const Vec& img : images)
        if (img.size() != n) throw DataError("train_vae: images have mixed lengths");

    Rng rng(spec.seed);
    const Index l = spec.latent_dim;
    const std::size_t hidden_count = spec.hidden_dims.size();

    // Encoder hidden chain, two linear heads, mirrored decoder.
    std::vector<AffineParams> enc;
    Index in_dim = n;
    for (Index h : spec.hidden_dims) {
        enc.emplace_back(h, in_dim, rng, std::sqrt(2.0 / static_cast<double>(in_dim)));
        in_dim = h;
    }
    AffineParams head_mu(l, in_dim, rng, std::sqrt(1.0 / static_cast<double>(in_dim)));
    AffineParams head_lv(l, in_dim, rng, std::sqrt(1.0 / static_cast<double>(in_dim)));

    std::vector<AffineParams> dec;
    in_dim = l;
    for (std::size_t t = hidden_count; t-- > 0;) {
        const Index h = spec.hidden_dims[t];
        dec.emplace_back(h, in_dim, rng, std::sqrt(2.0 / static_cast<double>(in_dim)));
        in_dim = h;
    }
    dec.emplace_back(n, in_dim, rng, std::sqrt(1.0 / static_cast<double>(in_dim)));

    const Index count = static_cast<Index>(images.size());
    std::vector<Index> order(static_cast<std::size_t>(count));
    for (Index i = 0; i < count; ++i) order[static_cast<std::size_t>(i)] = i;

    long adam_t = 0;
    if (report) *report = {};

    for (int epoch = 0; epoch < spec.epochs; ++epoch) {
        // Fisher-Yates with the explicit uniform mapping keeps the permutation
        // identical across standard-library implementations.
        for (Index i = count - 1; i > 0; --i) {
            const Index j = static_cast<Index>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
            std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
        }

        double epoch_loss_sum = 0.0;
        for (Index start = 0; start < count; start += spec.batch_size) {
            const Index bs = std::min(spec.batch_size, count - start);
            Mat x(n, bs);
            for (Index c = 0; c < bs; ++c)
                x.col(c) = images[static_cast<std::size_t>(order[static_cast<std::size_t>(start + c)])];

            // Forward.
            std::vector<Mat> enc_pre(enc.size()), enc_act(enc.size());
            Mat cur = x;
            for (std::size_t t = 0; t < enc.size(); ++t) {
                enc_pre[t] = enc[t].forward(cur);
                enc_act[t] = relu(enc_pre[t]);
                cur = enc_act[t];
            }
            const Mat mu = head_mu.forward(cur);
            const Mat lv = head_lv.forward(cur);

            Mat epsn(l, bs);
            for (Index r = 0; r < l; ++r)
                for (Index c = 0; c < bs; ++c) epsn(r, c) = rng.normal();
            const Mat sigma = (0.5 * lv).array().exp();
            const Mat z = mu + sigma.cwiseProduct(epsn);

            std::vector<Mat> dec_pre(dec.size()), dec_act(dec.size());
            cur = z;
            for (std::size_t t = 0; t < dec.size(); ++t) {
                dec_pre[t] = dec[t].forward(cur);
                if (t + 1 < dec.size()) {
                    dec_act[t] = relu(dec_pre[t]);
                    cur = dec_act[t];
                }
            }
            const Mat& logits = dec_pre.back();

            // Mean per-sample loss: Bernoulli NLL + KL.
            double bce = 0.0;
            for (Index r = 0; r < n; ++r)
                for (Index c = 0; c < bs; ++c)
                    bce += softplus(logits(r, c)) - x(r, c) * logits(r, c);
            const double kl =
                -0.5 * (1.0 + lv.array() - mu.array().square() - lv.array().exp()).sum();
            const double batch_loss = (bce + kl) / static_cast<double>(bs);
            if (std::isnan(batch_loss))
                throw DivergenceError("train_vae: NaN loss in epoch", epoch);
            epoch_loss_sum += batch_loss * static_cast<double>(bs);

            // Backward.
            const double inv_bs = 1.0 / static_cast<double>(bs);
            Mat grad = (logits.unaryExpr([](double a) { return 1.0 / (1.0 + std::exp(-a)); }) - x) *
                       inv_bs;
            std::vector<Mat> dec_wg(dec.size());
            std::vector<Vec> dec_bg(dec.size());
            for (std::size_t t = dec.size(); t-- > 0;) {
                const Mat& input = (t == 0) ? z : dec_act[t - 1];
                dec_wg[t] = grad * input.transpose();
                dec_bg[t] = grad.rowwise().sum();
                if (t > 0) {
                    grad = dec[t].w.value.transpose() * grad;
                    grad = grad.cwiseProduct(relu_mask(dec_pre[t - 1]));
                }
            }
            const Mat dz = dec[0].w.value.transpose() * grad;

            Mat dmu = dz + mu * inv_bs;
            Mat dlv = 0.5 * dz.cwiseProduct(epsn).cwiseProduct(sigma) +
                      0.5 * (lv.array().exp() - 1.0).matrix() * inv_bs;

            const Mat& head_in = enc.empty() ? x : enc_act.back();
            const Mat mu_wg = dmu * head_in.transpose();
            const Vec mu_bg = dmu.rowwise().sum();
            const Mat lv_wg = dlv * head_in.transpose();
            const Vec lv_bg = dlv.rowwise().sum();

            grad = head_mu.w.value.transpose() * dmu + head_lv.w.value.transpose() * dlv;
            std::vector<Mat> enc_wg(enc.size());
            std::vector<Vec> enc_bg(enc.size());
            for (std::size_t t = enc.size(); t-- > 0;) {
                grad = grad.cwiseProduct(relu_mask(enc_pre[t]));
                const Mat& input = (t == 0) ? x : enc_act[t - 1];
                enc_wg[t] = grad * input.transpose();
                enc_bg[t] = grad.rowwise().sum();
                if (t > 0) grad = enc[t].w.value.transpose() * grad;
            }

            ++adam_t;
            const double lr = spec.learning_rate;
            for (std::size_t t = 0; t < enc.size(); ++t) {
                enc[t].w.step(enc_wg[t], lr, adam_t);
                enc[t].b.step(enc_bg[t], lr, adam_t);
            }
            head_mu.w.step(mu_wg, lr, adam_t);
            head_mu.b.step(mu_bg, lr, adam_t);
            head_lv.w.step(lv_wg, lr, adam_t);
            head_lv.b.step(lv_bg, lr, adam_t);
            for (std::size_t t = 0; t < dec.size(); ++t) {
                dec[t].w.step(dec_wg[t], lr, adam_t);
                dec[t].b.step(dec_bg[t], lr, adam_t);
            }
        }
        if (report) report->epoch_loss.push_back(epoch_loss_sum / static_cast<double>(count));
    }
    if (report && !report->epoch_loss.empty()) report->final_train_loss = report->epoch_loss.back();

    auto affine_to_layer = [](const AffineParams& p, Activation act) {
        DenseLayer layer;
        layer.weight = p.w.value;
        layer.bias = p.b.value.col(0);
        layer.activation = act;
        return layer;
    };

    std::vector<DenseLayer> decoder_layers;
    for (std::size_t t = 0; t < dec.size(); ++t)
        decoder_layers.push_back(affine_to_layer(
            dec[t], t + 1 < dec.size() ? Activation::relu() : Activation::sigmoid()));

    if (encoder_out) {
        std::vector<DenseLayer> encoder_layers;
        for (const AffineParams& p : enc)
            encoder_layers.push_back(affine_to_layer(p, Activation::relu()));
        encoder_layers.push_back(affine_to_layer(head_mu, Activation::identity()));
        *encoder_out = GeneratorNet(std::move(encoder_layers));
    }
    return GeneratorNet(std::move(decoder_layers));
}

}  // namespace pr
