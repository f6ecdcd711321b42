#ifndef PR_VAE_HPP
#define PR_VAE_HPP

#include <vector>

#include "pr/generator.hpp"
#include "pr/rng.hpp"
#include "pr/types.hpp"

namespace pr {

struct VaeSpec {
    Index latent_dim = 32;
    std::vector<Index> hidden_dims = {256};
    int epochs = 20;
    double learning_rate = 1e-3;
    Index batch_size = 128;
    Seed seed;

    void validate() const;
};

struct VaeTrainReport {
    std::vector<double> epoch_loss;       // mean per-sample ELBO loss
    double final_train_loss = 0.0;
};

/// Trains a fully-connected VAE (Bernoulli likelihood + KL, reparameterized
/// sampling, Adam) and returns the decoder: relu hidden layers mirrored from
/// the encoder, sigmoid output, standard-normal latent prior. Deterministic
/// for a fixed spec.seed. If `encoder_out` is given it receives the mean path
/// of the encoder (relu hidden layers, identity output).
GeneratorNet train_vae(const std::vector<Vec>& images, const VaeSpec& spec,
                       VaeTrainReport* report = nullptr, GeneratorNet* encoder_out = nullptr);

}  // namespace pr

#endif
