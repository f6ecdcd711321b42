#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "pr/generator.hpp"
#include "pr/mii.hpp"
#include "pr/rng.hpp"
#include "pr/synth.hpp"
#include "pr/vae.hpp"
#include "test_util.hpp"

using namespace pr;

namespace {

DenseLayer random_layer(Index out, Index in, Activation act, Seed seed) {
    Rng rng(seed);
    DenseLayer l;
    l.weight = Mat::NullaryExpr(out, in, [&](Index, Index) { return 0.6 * rng.normal(); });
    l.bias = 0.1 * rng.normal_vec(out);
    l.activation = act;
    return l;
}

GeneratorNet random_net(const std::vector<Index>& dims, const std::vector<Activation>& acts,
                        Seed seed) {
    std::vector<DenseLayer> layers;
    for (std::size_t t = 0; t + 1 < dims.size(); ++t)
        layers.push_back(random_layer(dims[t + 1], dims[t], acts[t],
                                      derive_seed(seed, static_cast<std::uint64_t>(t))));
    return GeneratorNet(std::move(layers));
}

}  // namespace

TEST_CASE("forward: identity and relu single layers") {
    DenseLayer id;
    id.weight = Mat::Identity(2, 2);
    id.bias = Vec::Zero(2);
    id.activation = Activation::identity();
    GeneratorNet net({id});
    Vec z(2);
    z << -1.0, 2.0;
    CHECK(forward(net, z).first == z);

    DenseLayer rl = id;
    rl.activation = Activation::relu();
    GeneratorNet rnet({rl});
    const Vec out = forward(rnet, z).first;
    CHECK(out[0] == 0.0);
    CHECK(out[1] == 2.0);
}

TEST_CASE("forward equals the composition of subnetwork passes") {
    const GeneratorNet net = random_net({4, 6, 5}, {Activation::tanh(), Activation::sigmoid()},
                                        Seed(12));
    const Vec z0 = prtest::random_normal(4, Seed(13));
    const Vec full = forward(net, z0).first;
    const Vec first = forward_sub(net, 1, 1, z0).first;
    const Vec second = forward_sub(net, 2, 2, first).first;
    CHECK((full - second).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("split consistency across every split point") {
    const GeneratorNet net = random_net(
        {3, 8, 6, 5}, {Activation::relu(), Activation::leaky_relu(0.1), Activation::sigmoid()},
        Seed(14));
    const Vec z0 = prtest::random_normal(3, Seed(15));
    const Vec full = forward(net, z0).first;
    for (Index i = 1; i < net.depth(); ++i) {
        const Vec head = forward_sub(net, 1, i, z0).first;
        const Vec tail = forward_sub(net, i + 1, net.depth(), head).first;
        CHECK((full - tail).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("forward_sub rejects bad ranges") {
    const GeneratorNet net = random_net({3, 4, 5}, {Activation::relu(), Activation::identity()},
                                        Seed(16));
    CHECK_THROWS_AS(forward_sub(net, 2, 1, Vec::Zero(4)), RangeError);
    CHECK_THROWS_AS(forward_sub(net, 0, 1, Vec::Zero(3)), RangeError);
    CHECK_THROWS_AS(forward_sub(net, 1, 3, Vec::Zero(3)), RangeError);
    CHECK_THROWS_AS(forward_sub(net, 1, 1, Vec::Zero(4)), ShapeError);
}

TEST_CASE("vjp of a linear layer is the transposed weight") {
    DenseLayer l;
    l.weight = Mat::NullaryExpr(3, 2, [](Index r, Index c) { return double(r * 2 + c + 1); });
    l.bias = Vec::Zero(3);
    l.activation = Activation::identity();
    GeneratorNet net({l});
    Vec z(2);
    z << 0.5, -0.5;
    const auto [out, trace] = forward(net, z);
    Vec cot(3);
    cot << 1.0, 2.0, 3.0;
    const Vec vjp = vjp_sub(net, 1, 1, trace, cot);
    CHECK((vjp - l.weight.transpose() * cot).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("vjp matches finite-difference directional derivatives") {
    const double h = 1e-6;
    int done = 0;
    std::uint64_t attempt = 0;
    while (done < 60) {
        const Seed seed = derive_seed(Seed(900), attempt++);
        const std::vector<Activation> acts = {
            Activation::relu(), Activation::leaky_relu(0.05), Activation::tanh()};
        const GeneratorNet net = random_net({5, 9, 7, 6}, acts, seed);
        const Vec z = prtest::random_normal(5, derive_seed(seed, 50));
        const Vec dir = prtest::random_normal(5, derive_seed(seed, 51)).normalized();
        const Vec cot = prtest::random_normal(6, derive_seed(seed, 52));

        // stay away from relu kinks: both perturbed passes must keep every
        // pre-activation clear of zero
        const auto [out, trace] = forward(net, z);
        bool near_kink = false;
        for (const Vec& pre : trace.pre)
            if (pre.cwiseAbs().minCoeff() < 1e-4) near_kink = true;
        if (near_kink) continue;

        const Vec g = vjp_sub(net, 1, net.depth(), trace, cot);
        const double fd = (cot.dot(forward(net, (z + h * dir).eval()).first) -
                           cot.dot(forward(net, (z - h * dir).eval()).first)) /
                          (2.0 * h);
        const double analytic = g.dot(dir);
        CHECK(std::abs(analytic - fd) / std::max(1e-12, std::abs(fd)) < 1e-5);
        ++done;
    }
}

TEST_CASE("vjp linearity and chain rule") {
    const GeneratorNet net = random_net(
        {4, 7, 6, 5}, {Activation::sigmoid(), Activation::tanh(), Activation::identity()},
        Seed(31));
    const Vec z = prtest::random_normal(4, Seed(32));
    const auto [out, trace] = forward(net, z);
    const Vec u = prtest::random_normal(5, Seed(33));
    const Vec v = prtest::random_normal(5, Seed(34));

    const Vec lin = vjp_sub(net, 1, 3, trace, (2.0 * u - 0.5 * v).eval());
    const Vec sep = 2.0 * vjp_sub(net, 1, 3, trace, u) - 0.5 * vjp_sub(net, 1, 3, trace, v);
    CHECK((lin - sep).cwiseAbs().maxCoeff() < 1e-12);

    CHECK(vjp_sub(net, 1, 3, trace, Vec::Zero(5)).cwiseAbs().maxCoeff() == 0.0);

    // chain: vjp over (1,3) == vjp over (1,i) applied to vjp over (i+1,3)
    for (Index i = 1; i < 3; ++i) {
        const auto [head_out, head_trace] = forward_sub(net, 1, i, z);
        const auto [tail_out, tail_trace] = forward_sub(net, i + 1, 3, head_out);
        const Vec inner = vjp_sub(net, i + 1, 3, tail_trace, u);
        const Vec chained = vjp_sub(net, 1, i, head_trace, inner);
        const Vec direct = vjp_sub(net, 1, 3, trace, u);
        CHECK((chained - direct).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("vjp rejects stale traces") {
    const GeneratorNet a = random_net({3, 4, 5}, {Activation::relu(), Activation::relu()}, Seed(1));
    const GeneratorNet b = random_net({3, 4, 5}, {Activation::relu(), Activation::relu()}, Seed(2));
    const auto [out, trace] = forward(a, Vec::Zero(3));
    CHECK_THROWS_AS(vjp_sub(b, 1, 2, trace, Vec::Zero(5)), TraceError);
    CHECK_THROWS_AS(vjp_sub(a, 1, 1, trace, Vec::Zero(4)), TraceError);
}

TEST_CASE("forward_batch matches per-column forward") {
    const GeneratorNet net = random_net({4, 6, 5}, {Activation::relu(), Activation::sigmoid()},
                                        Seed(41));
    Mat z(4, 3);
    for (Index c = 0; c < 3; ++c) z.col(c) = prtest::random_normal(4, Seed(50 + c));
    const Mat batch = forward_batch(net, z);
    for (Index c = 0; c < 3; ++c)
        CHECK((batch.col(c) - forward(net, z.col(c).eval()).first).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("PRGW round trip is bit exact") {
    prtest::TempDir tmp("prgw");
    const GeneratorNet net = random_net(
        {5, 8, 6}, {Activation::leaky_relu(0.2), Activation::sigmoid()}, Seed(60));
    const std::string path = tmp.file("net.prgw");
    save_weights(net, path);
    const GeneratorNet back = load_weights(path);
    REQUIRE(back.depth() == net.depth());
    for (Index l = 1; l <= net.depth(); ++l) {
        CHECK(back.layer(l).weight == net.layer(l).weight);
        CHECK(back.layer(l).bias == net.layer(l).bias);
        CHECK(back.layer(l).activation.kind == net.layer(l).activation.kind);
        CHECK(back.layer(l).activation.alpha == net.layer(l).activation.alpha);
    }
}

TEST_CASE("PRGW rejects corruption") {
    prtest::TempDir tmp("prgw_bad");
    const GeneratorNet net =
        random_net({3, 4, 2}, {Activation::relu(), Activation::identity()}, Seed(61));
    const std::string path = tmp.file("net.prgw");
    save_weights(net, path);

    // corrupt magic
    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(0);
        f.write("XXXX", 4);
    }
    CHECK_THROWS_AS(load_weights(path), FormatError);

    // truncation
    save_weights(net, path);
    {
        std::ifstream in(path, std::ios::binary);
        std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out.write(all.data(), static_cast<std::streamsize>(all.size() - 9));
    }
    CHECK_THROWS_AS(load_weights(path), FormatError);

    // break the dimension chain: shrink layer 2's input count in its header
    // (a smaller value still parses, then fails the chain validation)
    save_weights(net, path);
    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        // header: 4 magic + 4 version + 4 count; layer 1: 4 rows + 4 cols + 1 act
        // + 4*3*8 weights + 4*8 bias; layer 2 cols sit 4 bytes into its header.
        const std::streamoff layer2_cols = 12 + (8 + 1 + 96 + 32) + 4;
        f.seekp(layer2_cols);
        const std::uint32_t wrong = 3;
        f.write(reinterpret_cast<const char*>(&wrong), 4);
    }
    CHECK_THROWS_AS(load_weights(path), ValidationError);
}

TEST_CASE("vae trains deterministically and decodes into [0,1]") {
    const Shape2D shape(8, 8);
    const SynthDataset data = synth_digit_dataset(shape, 300, Seed(70));

    VaeSpec spec;
    spec.latent_dim = 6;
    spec.hidden_dims = {24};
    spec.epochs = 3;
    spec.batch_size = 32;
    spec.seed = Seed(71);

    VaeTrainReport report_a, report_b;
    const GeneratorNet a = train_vae(data.images, spec, &report_a);
    const GeneratorNet b = train_vae(data.images, spec, &report_b);
    for (Index l = 1; l <= a.depth(); ++l) {
        CHECK(a.layer(l).weight == b.layer(l).weight);
        CHECK(a.layer(l).bias == b.layer(l).bias);
    }

    REQUIRE(report_a.epoch_loss.size() == 3);
    CHECK(report_a.epoch_loss.back() < report_a.epoch_loss.front());

    const Vec img = forward(a, Vec::Zero(6)).first;
    CHECK(img.minCoeff() >= 0.0);
    CHECK(img.maxCoeff() <= 1.0);

    CHECK_THROWS_AS(train_vae({}, spec), DataError);
}

TEST_CASE("vae encoder pairs with the decoder for reconstruction") {
    const Shape2D shape(12, 12);
    const SynthDataset data = synth_digit_dataset(shape, 400, Seed(80));
    std::vector<Vec> train(data.images.begin(), data.images.begin() + 300);

    VaeSpec spec;
    spec.latent_dim = 12;
    spec.hidden_dims = {96};
    spec.epochs = 80;
    spec.batch_size = 32;
    spec.seed = Seed(81);

    GeneratorNet encoder;
    const GeneratorNet decoder = train_vae(train, spec, nullptr, &encoder);

    double mse = 0.0;
    for (std::size_t i = 300; i < 400; ++i) {
        const Vec z = forward(encoder, data.images[i]).first;
        const Vec rec = forward(decoder, z).first;
        mse += (rec - data.images[i]).squaredNorm() / double(shape.size());
    }
    mse /= 100.0;
    CHECK(mse < 0.05);
}

TEST_CASE("mii_init picks the best candidate, ties to lowest index") {
    const Shape2D shape(4, 4);
    const GeneratorNet net =
        random_net({3, 8, 16}, {Activation::relu(), Activation::sigmoid()}, Seed(90));
    const auto op = MeasurementOperator::fourier(shape);
    const Vec target = prtest::random_image(16, Seed(91));
    const Vec y = apply_magnitude(op, target);

    MiiSettings one;
    one.candidates = 1;
    one.seed = Seed(92);
    const Vec only = mii_init(op, y, net, one);
    CHECK(only == sample_latent(3, 1, Seed(92))[0]);

    MiiSettings many;
    many.candidates = 64;
    many.seed = Seed(93);
    const Vec chosen = mii_init(op, y, net, many);
    const double chosen_loss = magnitude_loss(op, forward(net, chosen).first, y);
    const auto latents = sample_latent(3, 64, Seed(93));
    for (const Vec& z : latents) {
        const double candidate = magnitude_loss(op, forward(net, z).first, y);
        CHECK(chosen_loss <= candidate + 1e-12);
    }
}

TEST_CASE("mii loss is non-increasing as the candidate pool grows") {
    const Shape2D shape(4, 4);
    const GeneratorNet net =
        random_net({3, 8, 16}, {Activation::tanh(), Activation::sigmoid()}, Seed(95));
    const auto op = MeasurementOperator::fourier(shape);
    const Vec y = apply_magnitude(op, prtest::random_image(16, Seed(96)));

    double prev = std::numeric_limits<double>::infinity();
    for (Index p : {4, 16, 64, 128}) {
        MiiSettings s;
        s.candidates = p;
        s.seed = Seed(97);
        const Vec z = mii_init(op, y, net, s);
        const double loss = magnitude_loss(op, forward(net, z).first, y);
        CHECK(loss <= prev + 1e-12);
        prev = loss;
    }
}
