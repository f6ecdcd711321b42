#include "pr/mii.hpp"

namespace pr {

namespace {

// Scores all candidates; Gaussian operators get one batched matrix product.
std::pair<Mat, std::vector<double>> draw_and_score(const MeasurementOperator& op, const Vec& y,
                                                   const GeneratorNet& net,
                                                   const MiiSettings& settings) {
    if (settings.candidates < 1) throw DimensionError("mii_init: candidates must be >= 1");
    const Index l = net.latent_dim();
    const Index p = settings.candidates;

    Rng rng(settings.seed);
    Mat latents(l, p);
    // Column-by-column to match sample_latent's stream: candidate j equals
    // the j-th vector of sample_latent(l, p, seed).
    for (Index c = 0; c < p; ++c)
        for (Index r = 0; r < l; ++r) latents(r, c) = rng.normal();

    const Mat images = forward_batch(net, latents);
    std::vector<double> losses(static_cast<std::size_t>(p));

    if (op.kind() == MeasurementOperator::Kind::GaussianReal) {
        const Mat c = op.matrix_real() * images;
        for (Index j = 0; j < p; ++j)
            losses[static_cast<std::size_t>(j)] = (c.col(j).cwiseAbs() - y).squaredNorm();
    } else if (op.kind() == MeasurementOperator::Kind::GaussianComplex) {
        const CMat c = op.matrix_complex() * images.cast<std::complex<double>>();
        for (Index j = 0; j < p; ++j)
            losses[static_cast<std::size_t>(j)] = (c.col(j).cwiseAbs() - y).squaredNorm();
    } else {
        for (Index j = 0; j < p; ++j)
            losses[static_cast<std::size_t>(j)] = magnitude_loss(op, images.col(j), y);
    }
    return {std::move(latents), std::move(losses)};
}

}  // namespace

Vec mii_init(const MeasurementOperator& op, const Vec& y, const GeneratorNet& net,
             const MiiSettings& settings) {
    auto [latents, losses] = draw_and_score(op, y, net, settings);
    std::size_t best = 0;
    for (std::size_t j = 1; j < losses.size(); ++j)
        if (losses[j] < losses[best]) best = j;
    return latents.col(static_cast<Index>(best));
}

std::vector<double> mii_scores(const MeasurementOperator& op, const Vec& y,
                               const GeneratorNet& net, const MiiSettings& settings) {
    return draw_and_score(op, y, net, settings).second;
}

}  // namespace pr
