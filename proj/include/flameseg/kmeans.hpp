#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "flameseg/core.hpp"

namespace flameseg {

struct KmeansOptions {
    int k = 4;
    int max_iter = 300;
    double tol = 1e-6;
};

struct KmeansResult {
    LabelMask mask;
    std::vector<double> centroids;  // ascending; cluster c of the mask has centroids[c]
    int iterations = 0;
    bool converged = false;
};

namespace detail {

/// k-means++ seeding on 1-D values: first centroid uniform, the rest drawn
/// proportionally to the squared distance to the nearest chosen centroid.
inline std::vector<double> kmeanspp_init(const std::vector<double>& values, int k,
                                         std::mt19937_64& rng) {
    const std::size_t n = values.size();
    std::vector<double> centroids;
    centroids.reserve(static_cast<std::size_t>(k));
    std::uniform_int_distribution<std::size_t> first(0, n - 1);
    centroids.push_back(values[first(rng)]);

    std::vector<double> dist_sq(n);
    for (int j = 1; j < k; ++j) {
        double total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (double c : centroids) {
                const double d = values[i] - c;
                best = std::min(best, d * d);
            }
            dist_sq[i] = best;
            total += best;
        }
        std::uniform_real_distribution<double> pick(0.0, total);
        double u = pick(rng);
        std::size_t chosen = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
            u -= dist_sq[i];
            if (u <= 0) {
                chosen = i;
                break;
            }
        }
        centroids.push_back(values[chosen]);
    }
    return centroids;
}

}  // namespace detail

/// Lloyd's algorithm on raw pixel intensities with k-means++ seeding.
/// Clusters are relabeled by ascending centroid, so the brightest cluster
/// gets the highest class id.
inline KmeansResult segment_kmeans(const IntensityImage& img, const KmeansOptions& opts,
                                   std::uint64_t seed) {
    if (opts.k < 2) throw error("segment_kmeans: k must be >= 2");
    if (opts.max_iter < 1) throw error("segment_kmeans: max_iter must be >= 1");
    const std::vector<double>& v = img.values;
    const std::size_t n = v.size();
    if (n == 0) throw error("segment_kmeans: empty image");
    if (count_distinct(v) < opts.k)
        throw error("segment_kmeans: fewer distinct values than k");

    std::mt19937_64 rng(seed);
    std::vector<double> centroids = detail::kmeanspp_init(v, opts.k, rng);
    std::vector<int> assign(n, 0);

    KmeansResult result;
    for (int iter = 0; iter < opts.max_iter; ++iter) {
        result.iterations = iter + 1;
        for (std::size_t i = 0; i < n; ++i) {
            int best_c = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < opts.k; ++c) {
                const double d = (v[i] - centroids[c]) * (v[i] - centroids[c]);
                if (d < best_d) {
                    best_d = d;
                    best_c = c;
                }
            }
            assign[i] = best_c;
        }
        std::vector<double> sums(static_cast<std::size_t>(opts.k), 0.0);
        std::vector<std::int64_t> counts(static_cast<std::size_t>(opts.k), 0);
        for (std::size_t i = 0; i < n; ++i) {
            sums[assign[i]] += v[i];
            ++counts[assign[i]];
        }
        // re-seed an emptied cluster at the pixel farthest from its centroid,
        // never stealing the last member of another cluster
        for (int c = 0; c < opts.k; ++c) {
            if (counts[c] > 0) continue;
            std::size_t far_i = 0;
            double far_d = -1;
            for (std::size_t i = 0; i < n; ++i) {
                if (counts[assign[i]] < 2) continue;
                const double d = (v[i] - centroids[assign[i]]) * (v[i] - centroids[assign[i]]);
                if (d > far_d) {
                    far_d = d;
                    far_i = i;
                }
            }
            if (far_d < 0) throw error("segment_kmeans: cannot repopulate empty cluster");
            sums[assign[far_i]] -= v[far_i];
            --counts[assign[far_i]];
            assign[far_i] = c;
            sums[c] = v[far_i];
            counts[c] = 1;
        }
        double shift = 0;
        for (int c = 0; c < opts.k; ++c) {
            const double updated = sums[c] / static_cast<double>(counts[c]);
            shift = std::max(shift, std::abs(updated - centroids[c]));
            centroids[c] = updated;
        }
        if (shift < opts.tol) {
            result.converged = true;
            break;
        }
    }
    // final assignment against the converged centroids
    for (std::size_t i = 0; i < n; ++i) {
        int best_c = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int c = 0; c < opts.k; ++c) {
            const double d = (v[i] - centroids[c]) * (v[i] - centroids[c]);
            if (d < best_d) {
                best_d = d;
                best_c = c;
            }
        }
        assign[i] = best_c;
    }

    // relabel clusters by ascending centroid
    std::vector<int> order(static_cast<std::size_t>(opts.k));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return centroids[a] < centroids[b]; });
    std::vector<int> rank(static_cast<std::size_t>(opts.k));
    for (int r = 0; r < opts.k; ++r) rank[order[r]] = r;

    result.mask = LabelMask(img.width, img.height, opts.k);
    for (std::size_t i = 0; i < n; ++i)
        result.mask.labels[i] = static_cast<std::uint8_t>(rank[assign[i]]);
    std::vector<double> sorted_centroids(static_cast<std::size_t>(opts.k));
    for (int c = 0; c < opts.k; ++c) sorted_centroids[rank[c]] = centroids[c];
    result.centroids = std::move(sorted_centroids);
    return result;
}

}  // namespace flameseg
