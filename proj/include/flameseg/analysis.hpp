#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <tuple>
#include <vector>

#include "flameseg/core.hpp"

namespace flameseg {

/// Sample Pearson correlation coefficient. Throws on length mismatch,
/// fewer than two samples, or a constant vector.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw error("pearson: length mismatch");
    const std::size_t n = x.size();
    if (n < 2) throw error("pearson: need at least two samples");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0) throw error("pearson: first vector is constant");
    if (syy == 0) throw error("pearson: second vector is constant");
    const double r = sxy / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

struct CorrelationMatrix {
    std::vector<std::string> names;
    std::vector<double> values;  // row-major names.size() x names.size()

    double at(std::size_t i, std::size_t j) const { return values[i * names.size() + j]; }
};

/// Pairwise Pearson matrix over named, aligned columns. The diagonal is 1 by
/// definition; pairs involving a constant column get NaN instead of an error
/// so one degenerate metric cannot void the whole study.
inline CorrelationMatrix correlation_study(const std::vector<std::string>& names,
                                           const std::vector<std::vector<double>>& columns) {
    if (names.size() != columns.size())
        throw error("correlation_study: names/columns count mismatch");
    if (columns.empty()) throw error("correlation_study: no columns");
    const std::size_t rows = columns.front().size();
    for (const auto& col : columns)
        if (col.size() != rows) throw error("correlation_study: misaligned columns");
    if (rows < 2) throw error("correlation_study: need at least two rows");

    const std::size_t m = names.size();
    CorrelationMatrix cm;
    cm.names = names;
    cm.values.assign(m * m, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < m; ++i) {
        cm.values[i * m + i] = 1.0;
        for (std::size_t j = i + 1; j < m; ++j) {
            double r;
            try {
                r = pearson(columns[i], columns[j]);
            } catch (const error&) {
                r = std::numeric_limits<double>::quiet_NaN();
            }
            cm.values[i * m + j] = r;
            cm.values[j * m + i] = r;
        }
    }
    return cm;
}

struct ModelSummary {
    std::string name;
    double mean_hausdorff = 0;
    double mean_ari = 0;
    double total_seconds = 0;
};

/// Order models best-first: mean Hausdorff ascending, ties (within 1e-9)
/// broken by mean ARI descending, then total time ascending, then name so the
/// order is always deterministic. Values are quantized to the tie tolerance
/// so the comparison is a genuine strict weak ordering.
inline std::vector<ModelSummary> rank_models(std::vector<ModelSummary> models) {
    if (models.empty()) throw error("rank_models: empty report set");
    auto q = [](double v) { return std::llround(v / 1e-9); };
    std::stable_sort(models.begin(), models.end(),
                     [&](const ModelSummary& a, const ModelSummary& b) {
                         return std::make_tuple(q(a.mean_hausdorff), -q(a.mean_ari),
                                                q(a.total_seconds), std::cref(a.name)) <
                                std::make_tuple(q(b.mean_hausdorff), -q(b.mean_ari),
                                                q(b.total_seconds), std::cref(b.name));
                     });
    return models;
}

}  // namespace flameseg
