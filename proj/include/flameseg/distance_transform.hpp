#pragma once

#include <limits>
#include <vector>

#include "flameseg/core.hpp"

namespace flameseg {
namespace detail {

inline constexpr double kEdtInf = 1e20;

/// 1-D squared-distance transform of a sampled function via the lower
/// envelope of parabolas. Exact for integer-valued inputs; `f` and `d`
/// may not alias.
inline void edt_1d(const double* f, double* d, int n, std::vector<int>& v,
                   std::vector<double>& z) {
    v.resize(static_cast<std::size_t>(n));
    z.resize(static_cast<std::size_t>(n) + 1);
    int k = 0;
    v[0] = 0;
    z[0] = -kEdtInf;
    z[1] = kEdtInf;
    for (int q = 1; q < n; ++q) {
        double s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) /
                   (2.0 * q - 2.0 * v[k]);
        while (s <= z[k]) {
            --k;
            s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) /
                (2.0 * q - 2.0 * v[k]);
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = kEdtInf;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        const double dq = double(q) - v[k];
        d[q] = dq * dq + f[v[k]];
    }
}

}  // namespace detail

/// Exact squared Euclidean distance (in pixel units, pixel centers) from
/// every pixel to the nearest pixel where `in_set` is true. Pixels with no
/// set pixel anywhere come back >= 1e20. Output values are exact integers.
inline std::vector<double> squared_distance_transform(const std::vector<std::uint8_t>& in_set,
                                                      int width, int height) {
    const std::size_t n = static_cast<std::size_t>(width) * height;
    if (in_set.size() != n) throw error("squared_distance_transform: size mismatch");
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i)
        dist[i] = in_set[i] ? 0.0 : detail::kEdtInf;

    std::vector<int> v;
    std::vector<double> z;
    std::vector<double> col_in(static_cast<std::size_t>(height));
    std::vector<double> col_out(static_cast<std::size_t>(height));

    // columns first, then rows
    for (int x = 0; x < width; ++x) {
        for (int y = 0; y < height; ++y) col_in[y] = dist[static_cast<std::size_t>(y) * width + x];
        detail::edt_1d(col_in.data(), col_out.data(), height, v, z);
        for (int y = 0; y < height; ++y) dist[static_cast<std::size_t>(y) * width + x] = col_out[y];
    }
    std::vector<double> row_in(static_cast<std::size_t>(width));
    for (int y = 0; y < height; ++y) {
        double* row = &dist[static_cast<std::size_t>(y) * width];
        for (int x = 0; x < width; ++x) row_in[x] = row[x];
        detail::edt_1d(row_in.data(), row, width, v, z);
    }
    return dist;
}

}  // namespace flameseg
