#ifndef PR_MII_HPP
#define PR_MII_HPP

#include "pr/generator.hpp"
#include "pr/measurement.hpp"
#include "pr/rng.hpp"

namespace pr {

struct MiiSettings {
    Index candidates = 5000;  // p
    Seed seed;
};

/// Magnitude-informed initialization: samples p standard-normal latents and
/// returns the one whose generated image has the lowest magnitude error
/// against y. Ties break toward the lowest sample index.
Vec mii_init(const MeasurementOperator& op, const Vec& y, const GeneratorNet& net,
             const MiiSettings& settings);

/// Loss of every candidate in the same draw (index-aligned with mii_init's
/// internal scoring; candidate 0 first).
std::vector<double> mii_scores(const MeasurementOperator& op, const Vec& y,
                               const GeneratorNet& net, const MiiSettings& settings);

}  // namespace pr

#endif
