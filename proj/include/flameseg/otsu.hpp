#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "flameseg/core.hpp"

namespace flameseg {

inline constexpr int kOtsuBins = 256;

struct OtsuResult {
    LabelMask mask;
    std::vector<int> thresholds;         // bin indices; class c covers bins (t[c-1], t[c]]
    std::vector<double> threshold_values;  // upper intensity edge of each threshold bin
    bool constant_input = false;
};

namespace detail {

inline int otsu_bin(double v) {
    int b = static_cast<int>(v * kOtsuBins);
    if (b < 0) b = 0;
    if (b >= kOtsuBins) b = kOtsuBins - 1;
    return b;
}

}  // namespace detail

/// Multi-level Otsu thresholding on a 256-bin histogram. Exhaustively scans
/// all ascending threshold tuples and keeps the first maximizer (in
/// lexicographic order) of sum_k s_k^2 / n_k, which is equivalent to
/// maximizing the between-class variance. Inputs are expected in [0, 1];
/// out-of-range values land in the edge bins.
inline OtsuResult segment_threshold(const IntensityImage& img, int num_classes = kDefaultNumClasses) {
    if (num_classes < 2 || num_classes > 5)
        throw error("segment_threshold: num_classes must be in [2, 5] (exhaustive scan)");
    const std::size_t n = img.values.size();
    if (n == 0) throw error("segment_threshold: empty image");

    std::vector<std::int64_t> hist(kOtsuBins, 0);
    for (double v : img.values) ++hist[detail::otsu_bin(v)];

    OtsuResult result;
    result.mask = LabelMask(img.width, img.height, num_classes);

    int occupied = 0;
    for (int b = 0; b < kOtsuBins; ++b) occupied += hist[b] > 0 ? 1 : 0;
    if (occupied < 2) {
        // constant image: no threshold separates anything, leave all background
        result.constant_input = true;
        return result;
    }

    // prefix sums over bins: counts and weighted sums (integer, exact)
    std::vector<std::int64_t> pcount(kOtsuBins + 1, 0), psum(kOtsuBins + 1, 0);
    for (int b = 0; b < kOtsuBins; ++b) {
        pcount[b + 1] = pcount[b] + hist[b];
        psum[b + 1] = psum[b] + hist[b] * static_cast<std::int64_t>(b);
    }
    const int m = num_classes;
    auto objective = [&](const std::vector<int>& t) {
        double score = 0;
        int lo = 0;
        for (int c = 0; c < m; ++c) {
            const int hi = c + 1 < m ? t[c] + 1 : kOtsuBins;  // exclusive
            const std::int64_t cnt = pcount[hi] - pcount[lo];
            if (cnt > 0) {
                const double s = static_cast<double>(psum[hi] - psum[lo]);
                score += s * s / static_cast<double>(cnt);
            }
            lo = hi;
        }
        return score;
    };

    // odometer over ascending tuples t[0] < t[1] < ... < t[m-2] in [0, 254]
    std::vector<int> t(static_cast<std::size_t>(m - 1));
    for (int c = 0; c < m - 1; ++c) t[c] = c;
    std::vector<int> best = t;
    double best_score = objective(t);
    const int top = kOtsuBins - 2;  // max value of the last threshold
    while (true) {
        int pos = m - 2;
        while (pos >= 0 && t[pos] == top - (m - 2 - pos)) --pos;
        if (pos < 0) break;
        ++t[pos];
        for (int c = pos + 1; c < m - 1; ++c) t[c] = t[c - 1] + 1;
        const double score = objective(t);
        if (score > best_score) {
            best_score = score;
            best = t;
        }
    }

    result.thresholds = best;
    result.threshold_values.reserve(best.size());
    for (int b : best) result.threshold_values.push_back(static_cast<double>(b + 1) / kOtsuBins);

    std::vector<std::uint8_t> bin_label(kOtsuBins, static_cast<std::uint8_t>(m - 1));
    {
        int c = 0;
        for (int b = 0; b < kOtsuBins; ++b) {
            while (c < m - 1 && b > best[c]) ++c;
            bin_label[b] = static_cast<std::uint8_t>(c);
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        result.mask.labels[i] = bin_label[detail::otsu_bin(img.values[i])];
    return result;
}

}  // namespace flameseg
