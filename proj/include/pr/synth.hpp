#ifndef PR_SYNTH_HPP
#define PR_SYNTH_HPP

#include <cstdint>
#include <vector>

#include "pr/rng.hpp"
#include "pr/types.hpp"

namespace pr {

/// Procedurally rendered digit-like glyph: class skeleton (polylines) with a
/// random affine jitter, stroke width, and contrast, rasterized through a
/// distance field. Deterministic in (seed, index). Pixels in [0,1].
Vec synth_digit(const Shape2D& shape, int digit_class, Seed seed, std::uint64_t index);

struct SynthDataset {
    std::vector<Vec> images;
    std::vector<std::uint8_t> labels;
};

/// `count` digits cycling through classes 0..9.
SynthDataset synth_digit_dataset(const Shape2D& shape, Index count, Seed seed);

/// Random binary blob mask (union of discs and rectangles), entries in {0,1}.
Vec binary_blob_image(const Shape2D& shape, Seed seed);

}  // namespace pr

#endif
