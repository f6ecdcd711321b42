#include "pr/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

namespace pr {

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::uint32_t read_u32_be(std::ifstream& in, std::uint64_t& offset, const char* what) {
    unsigned char buf[4];
    in.read(reinterpret_cast<char*>(buf), 4);
    if (in.gcount() != 4) throw FormatError(std::string("IDX: truncated reading ") + what, offset);
    offset += 4;
    return (std::uint32_t(buf[0]) << 24) | (std::uint32_t(buf[1]) << 16) |
           (std::uint32_t(buf[2]) << 8) | std::uint32_t(buf[3]);
}

void write_u32_be(std::ofstream& out, std::uint32_t v) {
    const unsigned char buf[4] = {static_cast<unsigned char>(v >> 24),
                                  static_cast<unsigned char>(v >> 16),
                                  static_cast<unsigned char>(v >> 8),
                                  static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<const char*>(buf), 4);
}

}  // namespace

Dataset load_mnist_idx(const std::string& images_path, const std::string& labels_path) {
    std::ifstream in(images_path, std::ios::binary);
    if (!in) throw DataError("load_mnist_idx: cannot open " + images_path);
    std::uint64_t offset = 0;

    const std::uint32_t magic = read_u32_be(in, offset, "magic");
    if (magic != kImagesMagic)
        throw FormatError("IDX: bad image magic " + std::to_string(magic), 0);
    const std::uint32_t count = read_u32_be(in, offset, "count");
    const std::uint32_t rows = read_u32_be(in, offset, "rows");
    const std::uint32_t cols = read_u32_be(in, offset, "cols");
    if (rows == 0 || cols == 0) throw FormatError("IDX: zero image dimensions", 8);

    const std::uint64_t expected = std::uint64_t(count) * rows * cols;
    std::vector<unsigned char> pixels(expected);
    in.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(expected));
    const std::uint64_t got = static_cast<std::uint64_t>(in.gcount());
    if (got != expected)
        throw FormatError("IDX: truncated payload, expected " + std::to_string(expected) +
                              " pixel bytes, got " + std::to_string(got),
                          offset + got);

    Dataset ds;
    ds.shape = Shape2D(static_cast<Index>(rows), static_cast<Index>(cols));
    ds.images.reserve(count);
    const Index n = ds.shape.size();
    for (std::uint32_t i = 0; i < count; ++i) {
        Vec img(n);
        const unsigned char* src = pixels.data() + std::uint64_t(i) * n;
        for (Index p = 0; p < n; ++p) img[p] = static_cast<double>(src[p]) / 255.0;
        ds.images.push_back(std::move(img));
    }

    if (!labels_path.empty()) {
        std::ifstream lin(labels_path, std::ios::binary);
        if (!lin) throw DataError("load_mnist_idx: cannot open " + labels_path);
        std::uint64_t loffset = 0;
        const std::uint32_t lmagic = read_u32_be(lin, loffset, "label magic");
        if (lmagic != kLabelsMagic)
            throw FormatError("IDX: bad label magic " + std::to_string(lmagic), 0);
        const std::uint32_t lcount = read_u32_be(lin, loffset, "label count");
        if (lcount != count)
            throw ValidationError("IDX: label count " + std::to_string(lcount) +
                                  " != image count " + std::to_string(count));
        ds.labels.resize(lcount);
        lin.read(reinterpret_cast<char*>(ds.labels.data()), lcount);
        if (static_cast<std::uint32_t>(lin.gcount()) != lcount)
            throw FormatError("IDX: truncated label payload",
                              loffset + static_cast<std::uint64_t>(lin.gcount()));
    }
    return ds;
}

void save_idx_images(const std::string& path, const std::vector<Vec>& images,
                     const Shape2D& shape) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("save_idx_images: cannot open " + path);
    write_u32_be(out, kImagesMagic);
    write_u32_be(out, static_cast<std::uint32_t>(images.size()));
    write_u32_be(out, static_cast<std::uint32_t>(shape.height));
    write_u32_be(out, static_cast<std::uint32_t>(shape.width));
    for (const Vec& img : images) {
        if (img.size() != shape.size()) throw ShapeError("save_idx_images: image/shape mismatch");
        for (Index p = 0; p < img.size(); ++p) {
            const double v = std::clamp(img[p], 0.0, 1.0);
            out.put(static_cast<char>(std::lround(v * 255.0)));
        }
    }
    if (!out) throw DataError("save_idx_images: write failed");
}

void save_idx_labels(const std::string& path, const std::vector<std::uint8_t>& labels) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("save_idx_labels: cannot open " + path);
    write_u32_be(out, kLabelsMagic);
    write_u32_be(out, static_cast<std::uint32_t>(labels.size()));
    out.write(reinterpret_cast<const char*>(labels.data()),
              static_cast<std::streamsize>(labels.size()));
    if (!out) throw DataError("save_idx_labels: write failed");
}

Dataset load_image_dir(const std::string& dir_path, const Shape2D& shape) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir_path)) throw DataError("load_image_dir: not a directory: " + dir_path);

    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir_path))
        if (entry.is_regular_file() && entry.path().extension() == ".pgm")
            names.push_back(entry.path().string());
    std::sort(names.begin(), names.end());

    Dataset ds;
    ds.shape = shape;
    for (const std::string& name : names) {
        Shape2D file_shape;
        Vec img = read_pgm(name, &file_shape);
        if (!(file_shape == shape))
            throw DataError("load_image_dir: " + name + " has shape " +
                            std::to_string(file_shape.height) + "x" +
                            std::to_string(file_shape.width) + ", expected " +
                            std::to_string(shape.height) + "x" + std::to_string(shape.width));
        ds.images.push_back(std::move(img));
    }
    return ds;
}

void write_pgm(const std::string& path, const Vec& image, const Shape2D& shape) {
    if (image.size() != shape.size()) throw ShapeError("write_pgm: image/shape mismatch");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("write_pgm: cannot open " + path);
    out << "P5\n" << shape.width << " " << shape.height << "\n255\n";
    for (Index p = 0; p < image.size(); ++p) {
        const double v = std::clamp(image[p], 0.0, 1.0);
        out.put(static_cast<char>(std::lround(v * 255.0)));
    }
    if (!out) throw DataError("write_pgm: write failed for " + path);
}

namespace {

// Skips PGM whitespace and '#' comment lines.
int next_header_token(std::ifstream& in, std::string& token) {
    token.clear();
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {}
            continue;
        }
        if (std::isspace(ch)) {
            if (!token.empty()) return 0;
            continue;
        }
        token.push_back(static_cast<char>(ch));
    }
    return token.empty() ? -1 : 0;
}

}  // namespace

Vec read_pgm(const std::string& path, Shape2D* shape_out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("read_pgm: cannot open " + path);

    std::string tok;
    if (next_header_token(in, tok) != 0 || tok != "P5")
        throw FormatError("read_pgm: " + path + " is not binary PGM (P5)", 0);
    auto header_int = [&](const char* what) {
        if (next_header_token(in, tok) != 0)
            throw FormatError("read_pgm: missing " + std::string(what) + " in " + path,
                              static_cast<std::uint64_t>(in.tellg()));
        return std::stol(tok);
    };
    const long w = header_int("width");
    const long h = header_int("height");
    const long maxval = header_int("maxval");
    if (w < 1 || h < 1 || maxval != 255)
        throw FormatError("read_pgm: unsupported header in " + path,
                          static_cast<std::uint64_t>(in.tellg()));

    const std::uint64_t n = std::uint64_t(w) * std::uint64_t(h);
    std::vector<unsigned char> raw(n);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(n));
    if (static_cast<std::uint64_t>(in.gcount()) != n)
        throw FormatError("read_pgm: truncated pixel data in " + path,
                          static_cast<std::uint64_t>(in.tellg()));

    if (shape_out) *shape_out = Shape2D(h, w);
    Vec img(static_cast<Index>(n));
    for (std::uint64_t p = 0; p < n; ++p) img[static_cast<Index>(p)] = raw[p] / 255.0;
    return img;
}

}  // namespace pr
