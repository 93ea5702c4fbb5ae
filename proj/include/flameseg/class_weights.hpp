#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "flameseg/core.hpp"

namespace flameseg {

struct ClassWeights {
    std::vector<double> weights;

    void validate() const {
        if (weights.empty()) throw error("ClassWeights: empty");
        for (double w : weights)
            if (!(w > 0) || !std::isfinite(w))
                throw error("ClassWeights: weights must be positive and finite");
    }
};

/// Symmetric inter-class semantic distances, zero diagonal.
struct DistanceMatrix {
    int num_classes = 0;
    std::vector<double> values;  // row-major C x C

    double at(int i, int j) const {
        return values[static_cast<std::size_t>(i) * num_classes + j];
    }
    double& at(int i, int j) {
        return values[static_cast<std::size_t>(i) * num_classes + j];
    }

    void validate() const {
        if (num_classes < 2) throw error("DistanceMatrix: need at least 2 classes");
        if (values.size() != static_cast<std::size_t>(num_classes) * num_classes)
            throw error("DistanceMatrix: size mismatch");
        for (int i = 0; i < num_classes; ++i) {
            if (at(i, i) != 0) throw error("DistanceMatrix: diagonal must be zero");
            for (int j = 0; j < num_classes; ++j) {
                if (at(i, j) != at(j, i)) throw error("DistanceMatrix: must be symmetric");
                if (i != j && !(at(i, j) > 0))
                    throw error("DistanceMatrix: off-diagonal entries must be positive");
            }
        }
    }
};

/// Distance 1 between background and any radiation zone, 0.5 between zones.
inline DistanceMatrix flame_zone_distances() {
    DistanceMatrix m;
    m.num_classes = 4;
    m.values.assign(16, 0.0);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            if (i == j) continue;
            m.at(i, j) = (i == 0 || j == 0) ? 1.0 : 0.5;
        }
    return m;
}

/// ENet class weighing: w_i = 1 / ln(c + p_i) for class frequencies p.
/// Rarer classes get larger weights.
inline ClassWeights enet_class_weights(const std::vector<double>& frequencies,
                                       double c = 1.02) {
    if (frequencies.empty()) throw error("enet_class_weights: empty frequencies");
    double sum = 0;
    for (double p : frequencies) {
        if (p < 0 || !std::isfinite(p))
            throw error("enet_class_weights: frequencies must be nonnegative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-6)
        throw error("enet_class_weights: frequencies must sum to 1 (got " +
                    std::to_string(sum) + ")");
    ClassWeights out;
    out.weights.reserve(frequencies.size());
    for (double p : frequencies) {
        if (c + p <= 1.0)
            throw error("enet_class_weights: c + p must exceed 1 for every class");
        out.weights.push_back(1.0 / std::log(c + p));
    }
    return out;
}

}  // namespace flameseg
