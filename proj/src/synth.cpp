#include "pr/synth.hpp"

#include <cmath>

namespace pr {

namespace {

struct P {
    double x, y;
};

using Polyline = std::vector<P>;

Polyline circle(double cx, double cy, double rx, double ry, int samples = 20) {
    Polyline pts;
    for (int i = 0; i <= samples; ++i) {
        const double t = 2.0 * M_PI * i / samples;
        pts.push_back({cx + rx * std::cos(t), cy + ry * std::sin(t)});
    }
    return pts;
}

Polyline arc(double cx, double cy, double r, double a0, double a1, int samples = 12) {
    Polyline pts;
    for (int i = 0; i <= samples; ++i) {
        const double t = a0 + (a1 - a0) * i / samples;
        pts.push_back({cx + r * std::cos(t), cy + r * std::sin(t)});
    }
    return pts;
}

// Skeletons in unit coordinates, x right, y down.
std::vector<Polyline> glyph(int digit) {
    switch (digit) {
        case 0: return {circle(0.5, 0.5, 0.21, 0.32)};
        case 1: return {{{0.42, 0.26}, {0.55, 0.15}, {0.55, 0.85}}};
        case 2: {
            Polyline top = arc(0.5, 0.33, 0.19, -M_PI, -0.15 * M_PI);
            top.push_back({0.32, 0.85});
            return {top, {{0.32, 0.85}, {0.71, 0.85}}};
        }
        case 3: {
            Polyline upper = arc(0.47, 0.3, 0.17, -0.85 * M_PI, 0.45 * M_PI);
            Polyline lower = arc(0.47, 0.66, 0.2, -0.45 * M_PI, 0.85 * M_PI);
            return {upper, lower};
        }
        case 4: return {{{0.6, 0.15}, {0.3, 0.6}, {0.76, 0.6}}, {{0.62, 0.34}, {0.62, 0.85}}};
        case 5: {
            Polyline body = {{0.68, 0.16}, {0.36, 0.16}, {0.34, 0.45}, {0.52, 0.42}};
            Polyline bowl = arc(0.5, 0.63, 0.21, -0.35 * M_PI, 0.8 * M_PI);
            return {body, bowl};
        }
        case 6: {
            Polyline stem = {{0.62, 0.14}, {0.43, 0.38}, {0.35, 0.62}};
            return {stem, circle(0.5, 0.66, 0.17, 0.18)};
        }
        case 7: return {{{0.3, 0.16}, {0.7, 0.16}, {0.45, 0.85}}};
        case 8: return {circle(0.5, 0.31, 0.15, 0.16), circle(0.5, 0.67, 0.18, 0.18)};
        case 9: {
            Polyline tail = {{0.66, 0.36}, {0.63, 0.6}, {0.5, 0.86}};
            return {circle(0.5, 0.34, 0.17, 0.17), tail};
        }
        default: throw DimensionError("synth_digit: class must be 0..9");
    }
}

double segment_distance(double px, double py, const P& a, const P& b) {
    const double vx = b.x - a.x, vy = b.y - a.y;
    const double len2 = vx * vx + vy * vy;
    double t = len2 > 0.0 ? ((px - a.x) * vx + (py - a.y) * vy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double dx = px - (a.x + t * vx), dy = py - (a.y + t * vy);
    return std::sqrt(dx * dx + dy * dy);
}

}  // namespace

Vec synth_digit(const Shape2D& shape, int digit_class, Seed seed, std::uint64_t index) {
    Rng rng(derive_seed(seed, index * 10 + static_cast<std::uint64_t>(digit_class)));

    const double angle = (rng.uniform01() - 0.5) * 0.36;
    const double sx = 0.85 + 0.27 * rng.uniform01();
    const double sy = 0.85 + 0.27 * rng.uniform01();
    const double shear = (rng.uniform01() - 0.5) * 0.24;
    const double tx = (rng.uniform01() - 0.5) * 0.14;
    const double ty = (rng.uniform01() - 0.5) * 0.14;
    const double stroke = 0.045 + 0.045 * rng.uniform01();
    const double contrast = 0.85 + 0.15 * rng.uniform01();
    const double ca = std::cos(angle), sa = std::sin(angle);

    auto transform = [&](P p) {
        double x = (p.x - 0.5) * sx, y = (p.y - 0.5) * sy;
        x += shear * y;
        const double xr = ca * x - sa * y, yr = sa * x + ca * y;
        return P{xr + 0.5 + tx, yr + 0.5 + ty};
    };

    std::vector<Polyline> strokes = glyph(digit_class);
    for (Polyline& line : strokes)
        for (P& p : line) p = transform(p);

    const double aa = 0.035;  // antialiasing band, roughly one pixel
    auto rasterize = [&](double off_x, double off_y) {
        Vec img(shape.size());
        for (Index j = 0; j < shape.height; ++j)
            for (Index k = 0; k < shape.width; ++k) {
                const double py =
                    (static_cast<double>(j) + 0.5) / static_cast<double>(shape.height) - off_y;
                const double px =
                    (static_cast<double>(k) + 0.5) / static_cast<double>(shape.width) - off_x;
                double d = 1e9;
                for (const Polyline& line : strokes)
                    for (std::size_t s = 0; s + 1 < line.size(); ++s)
                        d = std::min(d, segment_distance(px, py, line[s], line[s + 1]));
                const double ink = std::clamp((stroke - d) / aa + 0.5, 0.0, 1.0);
                img[j * shape.width + k] = contrast * ink;
            }
        return img;
    };

    // Center by mass, like the classic digit corpora: render once, measure the
    // center of mass, re-render with the compensating offset.
    const Vec draft = rasterize(0.0, 0.0);
    double mass = 0.0, mx = 0.0, my = 0.0;
    for (Index j = 0; j < shape.height; ++j)
        for (Index k = 0; k < shape.width; ++k) {
            const double v = draft[j * shape.width + k];
            mass += v;
            my += v * (static_cast<double>(j) + 0.5) / static_cast<double>(shape.height);
            mx += v * (static_cast<double>(k) + 0.5) / static_cast<double>(shape.width);
        }
    if (mass <= 0.0) return draft;
    return rasterize(0.5 - mx / mass, 0.5 - my / mass);
}

SynthDataset synth_digit_dataset(const Shape2D& shape, Index count, Seed seed) {
    SynthDataset ds;
    ds.images.reserve(static_cast<std::size_t>(count));
    ds.labels.reserve(static_cast<std::size_t>(count));
    for (Index i = 0; i < count; ++i) {
        const int cls = static_cast<int>(i % 10);
        ds.images.push_back(synth_digit(shape, cls, seed, static_cast<std::uint64_t>(i)));
        ds.labels.push_back(static_cast<std::uint8_t>(cls));
    }
    return ds;
}

Vec binary_blob_image(const Shape2D& shape, Seed seed) {
    Rng rng(seed);
    Vec img = Vec::Zero(shape.size());
    const double h = static_cast<double>(shape.height), w = static_cast<double>(shape.width);

    const int discs = 2 + static_cast<int>(rng.uniform01() * 3.0);
    for (int d = 0; d < discs; ++d) {
        const double cy = h * (0.2 + 0.6 * rng.uniform01());
        const double cx = w * (0.2 + 0.6 * rng.uniform01());
        const double r = 0.08 * std::min(h, w) * (1.0 + 2.0 * rng.uniform01());
        for (Index j = 0; j < shape.height; ++j)
            for (Index k = 0; k < shape.width; ++k) {
                const double dy = j - cy, dx = k - cx;
                if (dy * dy + dx * dx <= r * r) img[j * shape.width + k] = 1.0;
            }
    }
    const int rects = 1 + static_cast<int>(rng.uniform01() * 2.0);
    for (int t = 0; t < rects; ++t) {
        const Index j0 = static_cast<Index>(h * 0.15 + rng.uniform01() * h * 0.5);
        const Index k0 = static_cast<Index>(w * 0.15 + rng.uniform01() * w * 0.5);
        const Index dj = 1 + static_cast<Index>(rng.uniform01() * h * 0.25);
        const Index dk = 1 + static_cast<Index>(rng.uniform01() * w * 0.25);
        for (Index j = j0; j < std::min(shape.height, j0 + dj); ++j)
            for (Index k = k0; k < std::min(shape.width, k0 + dk); ++k)
                img[j * shape.width + k] = 1.0;
    }
    return img;
}

}  // namespace pr
