#pragma once

#include <cstdint>
#include <vector>

#include "flameseg/core.hpp"

namespace flameseg {

/// Joint label counts between a ground-truth and a predicted mask:
/// cell(i, j) = number of pixels with gt class i and predicted class j.
struct ContingencyTable {
    int num_classes = 0;
    std::int64_t total = 0;
    std::vector<std::int64_t> counts;         // row-major C x C
    std::vector<std::int64_t> gt_marginals;   // row sums
    std::vector<std::int64_t> pred_marginals; // column sums

    std::int64_t cell(int gt, int pred) const {
        return counts[static_cast<std::size_t>(gt) * num_classes + pred];
    }
};

inline ContingencyTable contingency(const LabelMask& pred, const LabelMask& gt) {
    if (!pred.same_shape(gt))
        throw error("contingency: mask dimensions differ");
    if (pred.num_classes != gt.num_classes)
        throw error("contingency: num_classes differ (" + std::to_string(pred.num_classes) +
                    " vs " + std::to_string(gt.num_classes) + ")");
    ContingencyTable t;
    t.num_classes = gt.num_classes;
    t.total = static_cast<std::int64_t>(gt.size());
    t.counts.assign(static_cast<std::size_t>(t.num_classes) * t.num_classes, 0);
    t.gt_marginals.assign(static_cast<std::size_t>(t.num_classes), 0);
    t.pred_marginals.assign(static_cast<std::size_t>(t.num_classes), 0);
    for (std::size_t i = 0; i < gt.size(); ++i)
        ++t.counts[static_cast<std::size_t>(gt.labels[i]) * t.num_classes + pred.labels[i]];
    for (int i = 0; i < t.num_classes; ++i)
        for (int j = 0; j < t.num_classes; ++j) {
            t.gt_marginals[i] += t.cell(i, j);
            t.pred_marginals[j] += t.cell(i, j);
        }
    return t;
}

}  // namespace flameseg
