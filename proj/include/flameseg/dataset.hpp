#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "flameseg/core.hpp"

namespace flameseg {

struct DatasetSplit {
    std::vector<std::string> train;
    std::vector<std::string> val;
    std::vector<std::string> test;
};

struct SplitRatios {
    double train = 0.8;
    double val = 0.1;
    double test = 0.1;
};

namespace detail {

/// Largest-remainder apportionment of n items to the given ratios.
/// Ties on remainder go to the earlier bucket.
inline std::array<std::size_t, 3> largest_remainder_sizes(std::size_t n,
                                                          const SplitRatios& r) {
    const double ratios[3] = {r.train, r.val, r.test};
    std::array<std::size_t, 3> sizes{};
    double remainders[3];
    std::size_t assigned = 0;
    for (int i = 0; i < 3; ++i) {
        double exact = static_cast<double>(n) * ratios[i];
        sizes[i] = static_cast<std::size_t>(std::floor(exact));
        remainders[i] = exact - std::floor(exact);
        assigned += sizes[i];
    }
    std::array<int, 3> order = {0, 1, 2};
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return remainders[a] > remainders[b]; });
    for (std::size_t leftover = n - assigned, k = 0; k < leftover; ++k)
        ++sizes[order[k % 3]];
    return sizes;
}

}  // namespace detail

/// Deterministic shuffle by seed, then partition with largest-remainder
/// rounding so e.g. 201 ids at (0.8,0.1,0.1) come out as (161,20,20).
inline DatasetSplit split_dataset(std::vector<std::string> ids, const SplitRatios& ratios,
                                  std::uint64_t seed) {
    if (ids.empty()) throw error("split_dataset: empty id list");
    if (ratios.train <= 0 || ratios.val <= 0 || ratios.test <= 0)
        throw error("split_dataset: ratios must be positive");
    if (std::abs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-9)
        throw error("split_dataset: ratios must sum to 1");

    std::mt19937_64 rng(seed);
    std::shuffle(ids.begin(), ids.end(), rng);

    const auto sizes = detail::largest_remainder_sizes(ids.size(), ratios);
    DatasetSplit split;
    auto it = ids.begin();
    split.train.assign(it, it + sizes[0]);
    it += sizes[0];
    split.val.assign(it, it + sizes[1]);
    it += sizes[1];
    split.test.assign(it, it + sizes[2]);
    return split;
}

inline nlohmann::json split_to_json(const DatasetSplit& split) {
    return nlohmann::json{{"train", split.train}, {"val", split.val}, {"test", split.test}};
}

inline DatasetSplit split_from_json(const nlohmann::json& j) {
    DatasetSplit split;
    split.train = j.at("train").get<std::vector<std::string>>();
    split.val = j.at("val").get<std::vector<std::string>>();
    split.test = j.at("test").get<std::vector<std::string>>();
    return split;
}

inline void save_split_manifest(const DatasetSplit& split, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw error("save_split_manifest: cannot open " + path);
    out << split_to_json(split).dump(2) << '\n';
}

inline DatasetSplit load_split_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("load_split_manifest: cannot open " + path);
    nlohmann::json j;
    in >> j;
    return split_from_json(j);
}

}  // namespace flameseg
