// Writes procedurally generated demo datasets in the same IDX format the
// solver consumes: digit-like glyphs for generator training and binary blob
// images for classical-solver experiments.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "pr/dataset.hpp"
#include "pr/synth.hpp"

int main(int argc, char** argv) {
    CLI::App app{"prdatagen: deterministic synthetic dataset generator"};

    std::string out_dir = "data";
    long train_count = 10000, test_count = 1024;
    long height = 28, width = 28;
    std::uint64_t seed = 7;
    std::string kind = "digits";

    app.add_option("--out", out_dir, "output directory")->capture_default_str();
    app.add_option("--kind", kind, "digits | blobs")->capture_default_str();
    app.add_option("--train", train_count, "training image count")->capture_default_str();
    app.add_option("--test", test_count, "test image count")->capture_default_str();
    app.add_option("--height", height)->capture_default_str();
    app.add_option("--width", width)->capture_default_str();
    app.add_option("--seed", seed)->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        const pr::Shape2D shape(height, width);
        std::filesystem::create_directories(out_dir);
        const auto path = [&](const char* name) {
            return (std::filesystem::path(out_dir) / name).string();
        };

        if (kind == "digits") {
            const pr::SynthDataset train =
                pr::synth_digit_dataset(shape, train_count, pr::Seed(seed));
            const pr::SynthDataset test =
                pr::synth_digit_dataset(shape, test_count, pr::derive_seed(pr::Seed(seed), 1));
            pr::save_idx_images(path("train-images-idx3-ubyte"), train.images, shape);
            pr::save_idx_labels(path("train-labels-idx1-ubyte"), train.labels);
            pr::save_idx_images(path("test-images-idx3-ubyte"), test.images, shape);
            pr::save_idx_labels(path("test-labels-idx1-ubyte"), test.labels);
            std::cout << "wrote " << train_count << " train / " << test_count
                      << " test digit images to " << out_dir << "\n";
        } else if (kind == "blobs") {
            std::vector<pr::Vec> images;
            for (long i = 0; i < test_count; ++i)
                images.push_back(pr::binary_blob_image(
                    shape, pr::derive_seed(pr::Seed(seed), static_cast<std::uint64_t>(i))));
            pr::save_idx_images(path("blobs-images-idx3-ubyte"), images, shape);
            std::cout << "wrote " << test_count << " blob images to " << out_dir << "\n";
        } else {
            std::cerr << "unknown --kind " << kind << "\n";
            return 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
