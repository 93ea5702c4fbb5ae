#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "flameseg/contingency.hpp"
#include "flameseg/core.hpp"
#include "flameseg/distance_transform.hpp"

namespace flameseg {

struct OverlapScores {
    double jaccard = 0;               // macro-mean IoU over classes present in gt or pred
    double f_measure = 0;             // macro-mean Dice over the same classes
    double ari = 0;                   // adjusted Rand index (chance-corrected pair counting)
    double mutual_information = 0;    // nats
    double normalized_mutual_information = 0;  // MI / sqrt(H(gt) H(pred))
    double kappa = 0;                 // Cohen's kappa
};

struct PixelErrorScores {
    double mae = 0;
    double mse = 0;
    double psnr = 0;  // dB, +inf when masks agree exactly
};

struct MetricScores {
    double jaccard = 0;
    double f_measure = 0;
    double ari = 0;
    double mutual_information = 0;
    double normalized_mutual_information = 0;
    double kappa = 0;
    double hausdorff = 0;
    double mae = 0;
    double mse = 0;
    double psnr = 0;
};

namespace detail {

inline double pair_count(std::int64_t x) {
    return x < 2 ? 0.0 : 0.5 * static_cast<double>(x) * static_cast<double>(x - 1);
}

inline double entropy_nats(const std::vector<std::int64_t>& marginals, std::int64_t n) {
    double h = 0;
    for (std::int64_t m : marginals)
        if (m > 0) {
            const double p = static_cast<double>(m) / static_cast<double>(n);
            h -= p * std::log(p);
        }
    return h;
}

}  // namespace detail

inline OverlapScores overlap_metrics(const ContingencyTable& t) {
    if (t.total < 1) throw error("overlap_metrics: empty table");
    const int c = t.num_classes;
    const double n = static_cast<double>(t.total);
    OverlapScores s;

    // macro-averaged Jaccard and Dice over classes present in gt or pred
    double jaccard_sum = 0, dice_sum = 0;
    int present = 0;
    for (int i = 0; i < c; ++i) {
        const std::int64_t gt_i = t.gt_marginals[i];
        const std::int64_t pr_i = t.pred_marginals[i];
        if (gt_i + pr_i == 0) continue;
        ++present;
        const double inter = static_cast<double>(t.cell(i, i));
        jaccard_sum += inter / static_cast<double>(gt_i + pr_i - t.cell(i, i));
        dice_sum += 2.0 * inter / static_cast<double>(gt_i + pr_i);
    }
    s.jaccard = jaccard_sum / present;
    s.f_measure = dice_sum / present;

    // adjusted Rand index over pixel pairs
    double sum_cells = 0, sum_gt = 0, sum_pred = 0;
    for (int i = 0; i < c; ++i)
        for (int j = 0; j < c; ++j) sum_cells += detail::pair_count(t.cell(i, j));
    for (int i = 0; i < c; ++i) sum_gt += detail::pair_count(t.gt_marginals[i]);
    for (int j = 0; j < c; ++j) sum_pred += detail::pair_count(t.pred_marginals[j]);
    if (sum_gt == sum_cells && sum_pred == sum_cells) {
        s.ari = 1.0;  // no disagreeing pairs at all (includes both-trivial partitions)
    } else {
        const double total_pairs = detail::pair_count(t.total);
        const double expected = sum_gt * sum_pred / total_pairs;
        const double max_index = 0.5 * (sum_gt + sum_pred);
        s.ari = (sum_cells - expected) / (max_index - expected);
    }

    // mutual information in nats
    double mi = 0;
    for (int i = 0; i < c; ++i)
        for (int j = 0; j < c; ++j) {
            const std::int64_t nij = t.cell(i, j);
            if (nij == 0) continue;
            mi += (static_cast<double>(nij) / n) *
                  std::log(static_cast<double>(nij) * n /
                           (static_cast<double>(t.gt_marginals[i]) *
                            static_cast<double>(t.pred_marginals[j])));
        }
    s.mutual_information = std::max(0.0, mi);
    const double h_gt = detail::entropy_nats(t.gt_marginals, t.total);
    const double h_pred = detail::entropy_nats(t.pred_marginals, t.total);
    s.normalized_mutual_information =
        (h_gt > 0 && h_pred > 0) ? s.mutual_information / std::sqrt(h_gt * h_pred) : 0.0;

    // Cohen's kappa
    double p_o = 0, p_e = 0;
    for (int i = 0; i < c; ++i) {
        p_o += static_cast<double>(t.cell(i, i));
        p_e += static_cast<double>(t.gt_marginals[i]) * static_cast<double>(t.pred_marginals[i]);
    }
    p_o /= n;
    p_e /= n * n;
    s.kappa = (p_e >= 1.0) ? 1.0 : (p_o - p_e) / (1.0 - p_e);
    return s;
}

/// Symmetric Hausdorff distance between the per-class point sets of the
/// flame zones (classes 1..C-1, background excluded), summed over classes.
/// A class absent from both masks contributes 0; absent from exactly one,
/// the image diagonal. Euclidean, pixel centers, exact.
inline double hausdorff(const LabelMask& pred, const LabelMask& gt) {
    if (!pred.same_shape(gt)) throw error("hausdorff: mask dimensions differ");
    const int w = pred.width, h = pred.height;
    const std::size_t n = pred.size();
    const int num_classes = std::max(pred.num_classes, gt.num_classes);

    double total = 0;
    std::vector<std::uint8_t> pred_set(n), gt_set(n);
    for (int c = 1; c < num_classes; ++c) {
        bool in_pred = false, in_gt = false;
        for (std::size_t i = 0; i < n; ++i) {
            pred_set[i] = pred.labels[i] == c;
            gt_set[i] = gt.labels[i] == c;
            in_pred |= pred_set[i] != 0;
            in_gt |= gt_set[i] != 0;
        }
        if (!in_pred && !in_gt) continue;
        if (in_pred != in_gt) {
            total += std::hypot(static_cast<double>(w), static_cast<double>(h));
            continue;
        }
        const std::vector<double> dist_to_gt = squared_distance_transform(gt_set, w, h);
        const std::vector<double> dist_to_pred = squared_distance_transform(pred_set, w, h);
        double max_sq = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (pred_set[i] && dist_to_gt[i] > max_sq) max_sq = dist_to_gt[i];
            if (gt_set[i] && dist_to_pred[i] > max_sq) max_sq = dist_to_pred[i];
        }
        total += std::sqrt(max_sq);
    }
    return total;
}

/// Treats class ids as integer intensities. PSNR peak is num_classes - 1.
inline PixelErrorScores pixel_error_metrics(const LabelMask& pred, const LabelMask& gt) {
    if (!pred.same_shape(gt)) throw error("pixel_error_metrics: mask dimensions differ");
    const std::size_t n = pred.size();
    double abs_sum = 0, sq_sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = static_cast<double>(pred.labels[i]) - static_cast<double>(gt.labels[i]);
        abs_sum += std::abs(d);
        sq_sum += d * d;
    }
    PixelErrorScores s;
    s.mae = abs_sum / static_cast<double>(n);
    s.mse = sq_sum / static_cast<double>(n);
    const double peak = static_cast<double>(std::max(pred.num_classes, gt.num_classes) - 1);
    s.psnr = s.mse == 0 ? std::numeric_limits<double>::infinity()
                        : 10.0 * std::log10(peak * peak / s.mse);
    return s;
}

/// All nine metrics of the evaluation battery for one prediction/gt pair.
inline MetricScores evaluate_pair(const LabelMask& pred, const LabelMask& gt) {
    const OverlapScores o = overlap_metrics(contingency(pred, gt));
    const PixelErrorScores p = pixel_error_metrics(pred, gt);
    MetricScores s;
    s.jaccard = o.jaccard;
    s.f_measure = o.f_measure;
    s.ari = o.ari;
    s.mutual_information = o.mutual_information;
    s.normalized_mutual_information = o.normalized_mutual_information;
    s.kappa = o.kappa;
    s.hausdorff = hausdorff(pred, gt);
    s.mae = p.mae;
    s.mse = p.mse;
    s.psnr = p.psnr;
    return s;
}

}  // namespace flameseg
