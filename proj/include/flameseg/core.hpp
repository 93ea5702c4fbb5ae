#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace flameseg {

// Class id convention used throughout: 0 = background, then flame zones
// ordered by increasing temperature (1 = Outer, 2 = Middle, 3 = Central).
inline constexpr int kBackground = 0;
inline constexpr int kDefaultNumClasses = 4;

class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

/// Dimension check that runs before any allocation sized from w*h can
/// happen (constructors use it in their member initializers).
inline std::size_t checked_area(int w, int h, const char* what) {
    if (w <= 0 || h <= 0) throw error(std::string(what) + ": dimensions must be positive");
    return static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
}

}  // namespace detail

/// H x W grid of class ids in {0 .. num_classes-1}, row-major.
struct LabelMask {
    int width = 0;
    int height = 0;
    int num_classes = kDefaultNumClasses;
    std::vector<std::uint8_t> labels;

    LabelMask() = default;
    LabelMask(int w, int h, int c = kDefaultNumClasses, std::uint8_t fill = 0)
        : width(w), height(h), num_classes(c),
          labels(detail::checked_area(w, h, "LabelMask"), fill) {
        validate();
    }

    std::size_t size() const { return labels.size(); }
    std::uint8_t& at(int x, int y) { return labels[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }

    bool same_shape(const LabelMask& other) const {
        return width == other.width && height == other.height;
    }

    /// Copy with num_classes widened to at least c. Never narrows.
    LabelMask with_num_classes(int c) const {
        LabelMask out = *this;
        if (c > out.num_classes) out.num_classes = c;
        return out;
    }

    void validate() const {
        if (width <= 0 || height <= 0)
            throw error("LabelMask: dimensions must be positive");
        if (num_classes < 2)
            throw error("LabelMask: num_classes must be >= 2");
        if (num_classes > 256)
            throw error("LabelMask: num_classes must be <= 256");
        if (labels.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
            throw error("LabelMask: label array size does not match dimensions");
        for (std::uint8_t v : labels)
            if (v >= num_classes)
                throw error("LabelMask: label value " + std::to_string(int(v)) +
                            " out of range for num_classes " + std::to_string(num_classes));
    }
};

/// H x W grid of real intensities, row-major.
struct IntensityImage {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    IntensityImage() = default;
    IntensityImage(int w, int h, double fill = 0.0)
        : width(w), height(h),
          values(detail::checked_area(w, h, "IntensityImage"), fill) {}

    std::size_t size() const { return values.size(); }
    double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }

    bool same_shape(const LabelMask& mask) const {
        return width == mask.width && height == mask.height;
    }

    void require_finite() const {
        for (double v : values)
            if (!std::isfinite(v)) throw error("IntensityImage: non-finite value");
    }
};

/// Affine min-max rescale to [0,1]; a constant image maps to all zeros.
inline IntensityImage normalize(const IntensityImage& img) {
    if (img.size() == 0) throw error("normalize: empty image");
    img.require_finite();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : img.values) {
        if (v < lo) lo = v;
        if (v > hi) hi = v;
    }
    IntensityImage out(img.width, img.height);
    if (hi == lo) return out;  // all zeros
    const double scale = 1.0 / (hi - lo);
    for (std::size_t i = 0; i < img.size(); ++i)
        out.values[i] = (img.values[i] - lo) * scale;
    return out;
}

inline int count_distinct(const std::vector<double>& values) {
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    int n = 0;
    for (std::size_t i = 0; i < sorted.size(); ++i)
        if (i == 0 || sorted[i] != sorted[i - 1]) ++n;
    return n;
}

}  // namespace flameseg
