#ifndef PR_DATASET_HPP
#define PR_DATASET_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pr/types.hpp"

namespace pr {

struct Dataset {
    std::vector<Vec> images;  // pixels in [0,1]
    std::vector<std::uint8_t> labels;  // empty when no label file was given
    Shape2D shape;

    std::size_t size() const { return images.size(); }
};

/// IDX image file (big-endian magic 0x00000803), pixels scaled to [0,1] by
/// division by 255; optional IDX label file (magic 0x00000801).
Dataset load_mnist_idx(const std::string& images_path, const std::string& labels_path = "");

/// Writers for the same formats (used by the bundled dataset generator).
void save_idx_images(const std::string& path, const std::vector<Vec>& images,
                     const Shape2D& shape);
void save_idx_labels(const std::string& path, const std::vector<std::uint8_t>& labels);

/// All *.pgm files in a directory, lexicographic by filename; every image
/// must match `shape`.
Dataset load_image_dir(const std::string& dir_path, const Shape2D& shape);

/// Binary PGM (P5, maxval 255). Pixels are clamped to [0,1] and quantized.
void write_pgm(const std::string& path, const Vec& image, const Shape2D& shape);
Vec read_pgm(const std::string& path, Shape2D* shape_out = nullptr);

}  // namespace pr

#endif
