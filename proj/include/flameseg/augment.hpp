#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "flameseg/core.hpp"

namespace flameseg {

struct AugmentConfig {
    double flip_probability = 0.5;
    double scale_lo = 0.7;
    double scale_hi = 2.0;
    int crop_width = 0;   // 0 = original image size
    int crop_height = 0;

    void validate() const {
        if (flip_probability < 0 || flip_probability > 1)
            throw error("AugmentConfig: flip_probability must be in [0, 1]");
        if (!(scale_lo > 0) || scale_lo > scale_hi)
            throw error("AugmentConfig: need 0 < scale_lo <= scale_hi");
        if (crop_width < 0 || crop_height < 0)
            throw error("AugmentConfig: crop size must be positive (or 0 for full size)");
    }
};

struct AugmentedPair {
    IntensityImage image;
    LabelMask mask;
};

namespace detail {

inline IntensityImage flip_h(const IntensityImage& img) {
    IntensityImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) out.at(x, y) = img.at(img.width - 1 - x, y);
    return out;
}

inline LabelMask flip_h(const LabelMask& mask) {
    LabelMask out(mask.width, mask.height, mask.num_classes);
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x) out.at(x, y) = mask.at(mask.width - 1 - x, y);
    return out;
}

inline IntensityImage resize_bilinear(const IntensityImage& img, int out_w, int out_h) {
    IntensityImage out(out_w, out_h);
    const double sx = static_cast<double>(out_w) / img.width;
    const double sy = static_cast<double>(out_h) / img.height;
    for (int y = 0; y < out_h; ++y) {
        const double src_y = (y + 0.5) / sy - 0.5;
        const int y0 = static_cast<int>(std::floor(src_y));
        const double fy = src_y - y0;
        const int yc0 = std::clamp(y0, 0, img.height - 1);
        const int yc1 = std::clamp(y0 + 1, 0, img.height - 1);
        for (int x = 0; x < out_w; ++x) {
            const double src_x = (x + 0.5) / sx - 0.5;
            const int x0 = static_cast<int>(std::floor(src_x));
            const double fx = src_x - x0;
            const int xc0 = std::clamp(x0, 0, img.width - 1);
            const int xc1 = std::clamp(x0 + 1, 0, img.width - 1);
            const double top = img.at(xc0, yc0) * (1 - fx) + img.at(xc1, yc0) * fx;
            const double bot = img.at(xc0, yc1) * (1 - fx) + img.at(xc1, yc1) * fx;
            out.at(x, y) = top * (1 - fy) + bot * fy;
        }
    }
    return out;
}

inline LabelMask resize_nearest(const LabelMask& mask, int out_w, int out_h) {
    LabelMask out(out_w, out_h, mask.num_classes);
    const double sx = static_cast<double>(out_w) / mask.width;
    const double sy = static_cast<double>(out_h) / mask.height;
    for (int y = 0; y < out_h; ++y) {
        const int src_y = std::clamp(
            static_cast<int>(std::floor((y + 0.5) / sy)), 0, mask.height - 1);
        for (int x = 0; x < out_w; ++x) {
            const int src_x = std::clamp(
                static_cast<int>(std::floor((x + 0.5) / sx)), 0, mask.width - 1);
            out.at(x, y) = mask.at(src_x, src_y);
        }
    }
    return out;
}

}  // namespace detail

/// Joint augmentation: horizontal flip, uniform random scale (bilinear image /
/// nearest-neighbor mask), then a random crop back to crop size. Where the
/// scaled image is smaller than the crop, the remainder is padded with
/// intensity 0 / background label. Draw order is fixed: flip, scale, x
/// offset, y offset.
inline AugmentedPair augment(const IntensityImage& img, const LabelMask& mask,
                             const AugmentConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    if (img.width != mask.width || img.height != mask.height)
        throw error("augment: image and mask dimensions differ");
    if (img.width <= 0 || img.height <= 0) throw error("augment: empty input");

    const int crop_w = cfg.crop_width > 0 ? cfg.crop_width : img.width;
    const int crop_h = cfg.crop_height > 0 ? cfg.crop_height : img.height;

    std::mt19937_64 rng(seed);
    const bool do_flip =
        std::uniform_real_distribution<double>(0.0, 1.0)(rng) < cfg.flip_probability;
    const double s =
        std::uniform_real_distribution<double>(cfg.scale_lo, cfg.scale_hi)(rng);

    IntensityImage work_img = do_flip ? detail::flip_h(img) : img;
    LabelMask work_mask = do_flip ? detail::flip_h(mask) : mask;

    const int scaled_w = std::max(1, static_cast<int>(std::lround(img.width * s)));
    const int scaled_h = std::max(1, static_cast<int>(std::lround(img.height * s)));
    if (scaled_w != img.width || scaled_h != img.height) {
        work_img = detail::resize_bilinear(work_img, scaled_w, scaled_h);
        work_mask = detail::resize_nearest(work_mask, scaled_w, scaled_h);
    }

    // crop offset: where the scaled image is larger we slide the window over
    // it; where it is smaller the (negative) offset slides the image inside
    // the padded output
    auto draw_offset = [&](int scaled, int crop) {
        const int range = scaled - crop;
        if (range == 0) return 0;
        const int lo = std::min(range, 0), hi = std::max(range, 0);
        return std::uniform_int_distribution<int>(lo, hi)(rng);
    };
    const int off_x = draw_offset(scaled_w, crop_w);
    const int off_y = draw_offset(scaled_h, crop_h);

    AugmentedPair out{IntensityImage(crop_w, crop_h), LabelMask(crop_w, crop_h, mask.num_classes)};
    for (int y = 0; y < crop_h; ++y) {
        const int sy = y + off_y;
        for (int x = 0; x < crop_w; ++x) {
            const int sx = x + off_x;
            if (sx >= 0 && sx < scaled_w && sy >= 0 && sy < scaled_h) {
                out.image.at(x, y) = work_img.at(sx, sy);
                out.mask.at(x, y) = work_mask.at(sx, sy);
            }
        }
    }
    return out;
}

}  // namespace flameseg
