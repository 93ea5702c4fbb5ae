#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "flameseg/core.hpp"

namespace flameseg {

/// Nested-ellipse flame geometry: Central inside Middle inside Outer,
/// all centered at (cx, cy). Axes are semi-axes in pixels.
struct FlameGeometry {
    double cx = 0, cy = 0;
    double outer_a = 0, outer_b = 0;
    double middle_a = 0, middle_b = 0;
    double central_a = 0, central_b = 0;

    static FlameGeometry centered(int width, int height) {
        FlameGeometry g;
        g.cx = 0.5 * (width - 1);
        g.cy = 0.5 * (height - 1);
        g.outer_a = 0.42 * width;
        g.outer_b = 0.38 * height;
        g.middle_a = 0.28 * width;
        g.middle_b = 0.25 * height;
        g.central_a = 0.14 * width;
        g.central_b = 0.12 * height;
        return g;
    }

    void validate() const {
        const double axes[6] = {central_a, central_b, middle_a, middle_b, outer_a, outer_b};
        for (double a : axes)
            if (!(a > 0)) throw error("FlameGeometry: semi-axes must be positive");
        if (!(central_a < middle_a && middle_a < outer_a &&
              central_b < middle_b && middle_b < outer_b))
            throw error("FlameGeometry: zones must be strictly nested (Central < Middle < Outer)");
    }
};

struct SyntheticParams {
    FlameGeometry geometry;
    // Per-class base intensity, index = class id; must strictly increase.
    std::vector<double> base_levels = {0.1, 0.4, 0.7, 1.0};
    double noise_sigma = 0.0;
};

struct SyntheticFlame {
    IntensityImage image;
    LabelMask mask;
};

/// Renders the nested-zone label mask and a per-zone constant intensity
/// plus Gaussian noise. Deterministic for a fixed seed.
inline SyntheticFlame generate_synthetic_flame(int width, int height,
                                               const SyntheticParams& params,
                                               std::uint64_t seed) {
    if (width <= 0 || height <= 0)
        throw error("generate_synthetic_flame: dimensions must be positive");
    params.geometry.validate();
    if (params.base_levels.size() != 4)
        throw error("generate_synthetic_flame: expected 4 base levels");
    for (std::size_t i = 1; i < params.base_levels.size(); ++i)
        if (!(params.base_levels[i] > params.base_levels[i - 1]))
            throw error("generate_synthetic_flame: base levels must strictly increase");
    if (params.noise_sigma < 0)
        throw error("generate_synthetic_flame: noise must be >= 0");

    const FlameGeometry& g = params.geometry;
    auto inside = [](double x, double y, double cx, double cy, double a, double b) {
        const double dx = (x - cx) / a, dy = (y - cy) / b;
        return dx * dx + dy * dy <= 1.0;
    };

    SyntheticFlame out;
    out.mask = LabelMask(width, height, 4);
    out.image = IntensityImage(width, height);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, params.noise_sigma);

    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            int label = 0;
            if (inside(x, y, g.cx, g.cy, g.central_a, g.central_b))
                label = 3;
            else if (inside(x, y, g.cx, g.cy, g.middle_a, g.middle_b))
                label = 2;
            else if (inside(x, y, g.cx, g.cy, g.outer_a, g.outer_b))
                label = 1;
            out.mask.at(x, y) = static_cast<std::uint8_t>(label);
            double v = params.base_levels[label];
            if (params.noise_sigma > 0) v += noise(rng);
            out.image.at(x, y) = v;
        }
    }
    return out;
}

/// Reassigns `fraction` of the pixels (rounded up) to a uniformly random
/// *different* class. Used to build controlled degradation series.
inline LabelMask degrade_flip(const LabelMask& mask, double fraction, std::uint64_t seed) {
    if (fraction < 0 || fraction > 1) throw error("degrade_flip: fraction must be in [0,1]");
    LabelMask out = mask;
    const std::size_t n = mask.size();
    const std::size_t k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
    if (k == 0) return out;

    std::mt19937_64 rng(seed);
    std::vector<std::uint32_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<std::uint32_t>(i);
    // partial Fisher-Yates: first k entries become the flipped pixels
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    std::uniform_int_distribution<int> cls(0, mask.num_classes - 2);
    for (std::size_t i = 0; i < k; ++i) {
        const std::uint8_t old = out.labels[idx[i]];
        int c = cls(rng);
        if (c >= old) ++c;  // uniform over classes != old
        out.labels[idx[i]] = static_cast<std::uint8_t>(c);
    }
    return out;
}

/// Translates the mask content by `distance` pixels in a seed-chosen
/// direction; vacated pixels become background. Degrades spatial metrics
/// roughly linearly in the distance.
inline LabelMask degrade_shift(const LabelMask& mask, double distance, std::uint64_t seed) {
    if (distance < 0) throw error("degrade_shift: distance must be >= 0");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * 3.14159265358979323846);
    const double theta = angle(rng);
    const int dx = static_cast<int>(std::lround(distance * std::cos(theta)));
    const int dy = static_cast<int>(std::lround(distance * std::sin(theta)));

    LabelMask out(mask.width, mask.height, mask.num_classes, kBackground);
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            const int sx = x - dx, sy = y - dy;
            if (sx >= 0 && sx < mask.width && sy >= 0 && sy < mask.height)
                out.at(x, y) = mask.at(sx, sy);
        }
    }
    return out;
}

}  // namespace flameseg
