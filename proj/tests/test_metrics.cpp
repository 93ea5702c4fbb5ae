#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "flameseg/contingency.hpp"
#include "flameseg/distance_transform.hpp"
#include "flameseg/metrics.hpp"
#include "flameseg/synthetic.hpp"
#include "oracles.hpp"

using namespace flameseg;

namespace {

LabelMask mask_from(std::initializer_list<int> labels, int w, int h, int c) {
    LabelMask m(w, h, c);
    std::size_t i = 0;
    for (int v : labels) m.labels[i++] = static_cast<std::uint8_t>(v);
    m.validate();
    return m;
}

// 4x4 pair with two disagreeing pixels; contingency worked out by hand:
//   n[0][0]=5 n[0][1]=1 n[1][1]=5 n[1][2]=1 n[2][2]=4
//   gt marginals (6,6,4), pred marginals (5,6,5), N=16
const auto kGt4 = [] {
    return mask_from({0, 0, 1, 1,
                      0, 0, 1, 1,
                      2, 2, 1, 1,
                      2, 2, 0, 0}, 4, 4, 3);
};
const auto kPred4 = [] {
    return mask_from({0, 0, 1, 1,
                      0, 1, 1, 1,
                      2, 2, 2, 1,
                      2, 2, 0, 0}, 4, 4, 3);
};

}  // namespace

TEST(Contingency, IdenticalMasksGiveDiagonalTable) {
    const LabelMask gt = kGt4();
    const ContingencyTable t = contingency(gt, gt);
    std::int64_t trace = 0;
    for (int i = 0; i < t.num_classes; ++i) {
        trace += t.cell(i, i);
        for (int j = 0; j < t.num_classes; ++j)
            if (i != j) EXPECT_EQ(t.cell(i, j), 0);
    }
    EXPECT_EQ(trace, t.total);
    EXPECT_EQ(t.total, 16);
}

TEST(Contingency, ConstantMasksFillSingleCell) {
    LabelMask pred(2, 2, 2, 0);
    LabelMask gt(2, 2, 2, 1);
    const ContingencyTable t = contingency(pred, gt);
    EXPECT_EQ(t.cell(1, 0), 4);  // row = gt class, column = predicted class
    EXPECT_EQ(t.cell(0, 0) + t.cell(0, 1) + t.cell(1, 1), 0);
}

TEST(Contingency, MatchesNaiveDoubleLoopOnRandomPairs) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const LabelMask pred = oracle::random_mask(8, 8, 4, rng);
        const LabelMask gt = oracle::random_mask(8, 8, 4, rng);
        const ContingencyTable t = contingency(pred, gt);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                std::int64_t count = 0;
                for (std::size_t p = 0; p < gt.size(); ++p)
                    count += gt.labels[p] == i && pred.labels[p] == j;
                EXPECT_EQ(t.cell(i, j), count);
            }
    }
}

TEST(Contingency, RejectsMismatchedShapes) {
    EXPECT_THROW(contingency(LabelMask(2, 2, 4), LabelMask(3, 2, 4)), error);
    EXPECT_THROW(contingency(LabelMask(2, 2, 3), LabelMask(2, 2, 4)), error);
}

TEST(OverlapMetrics, PerfectAgreementScoresIdentityValues) {
    const LabelMask gt = kGt4();
    const OverlapScores s = overlap_metrics(contingency(gt, gt));
    EXPECT_DOUBLE_EQ(s.jaccard, 1.0);
    EXPECT_DOUBLE_EQ(s.f_measure, 1.0);
    EXPECT_DOUBLE_EQ(s.ari, 1.0);
    EXPECT_DOUBLE_EQ(s.kappa, 1.0);
    // MI of identical partitions = entropy of the partition
    const double p0 = 6.0 / 16, p1 = 6.0 / 16, p2 = 4.0 / 16;
    const double entropy = -(p0 * std::log(p0) + p1 * std::log(p1) + p2 * std::log(p2));
    EXPECT_NEAR(s.mutual_information, entropy, 1e-12);
    EXPECT_NEAR(s.normalized_mutual_information, 1.0, 1e-12);
}

TEST(OverlapMetrics, HandComputedTableValues) {
    const OverlapScores s = overlap_metrics(contingency(kPred4(), kGt4()));
    // macro Jaccard: (5/6 + 5/7 + 4/5) / 3
    EXPECT_NEAR(s.jaccard, (5.0 / 6 + 5.0 / 7 + 4.0 / 5) / 3, 1e-12);
    // macro Dice: (10/11 + 10/12 + 8/9) / 3
    EXPECT_NEAR(s.f_measure, (10.0 / 11 + 10.0 / 12 + 8.0 / 9) / 3, 1e-12);
    // ARI via pair counts: index 26, expected 10.5, max 35.5
    EXPECT_NEAR(s.ari, (26.0 - 10.5) / (35.5 - 10.5), 1e-12);
    EXPECT_DOUBLE_EQ(s.ari, 0.62);
    // kappa: p_o = 14/16, p_e = 86/256
    EXPECT_NEAR(s.kappa, (14.0 / 16 - 86.0 / 256) / (1 - 86.0 / 256), 1e-12);
    // MI assembled cell by cell from the hand-derived table
    const double mi = 5.0 / 16 * std::log(5.0 * 16 / (6 * 5)) +
                      1.0 / 16 * std::log(1.0 * 16 / (6 * 6)) +
                      5.0 / 16 * std::log(5.0 * 16 / (6 * 6)) +
                      1.0 / 16 * std::log(1.0 * 16 / (6 * 5)) +
                      4.0 / 16 * std::log(4.0 * 16 / (4 * 5));
    EXPECT_NEAR(s.mutual_information, mi, 1e-12);
}

TEST(OverlapMetrics, AriMatchesPairCountingOracle) {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 60; ++trial) {
        const int classes = 2 + trial % 3;
        const LabelMask pred = oracle::random_mask(8, 8, classes, rng);
        const LabelMask gt = oracle::random_mask(8, 8, classes, rng);
        const double fast = overlap_metrics(contingency(pred, gt)).ari;
        const double slow = oracle::ari_pair_counting(pred, gt);
        EXPECT_NEAR(fast, slow, 1e-12);
    }
}

TEST(OverlapMetrics, AriHandlesDegeneratePartitions) {
    // both masks single-cluster: identical degenerate partitions score 1
    const LabelMask a(3, 3, 4, 2);
    EXPECT_DOUBLE_EQ(overlap_metrics(contingency(a, a)).ari, 1.0);
    const LabelMask b(3, 3, 4, 1);  // same partition, different id
    EXPECT_DOUBLE_EQ(overlap_metrics(contingency(a, b)).ari, 1.0);
}

TEST(OverlapMetrics, AriInvariantUnderSimultaneousPermutation) {
    std::mt19937_64 rng(41);
    const LabelMask pred = oracle::random_mask(8, 8, 4, rng);
    const LabelMask gt = oracle::random_mask(8, 8, 4, rng);
    const double base_ari = overlap_metrics(contingency(pred, gt)).ari;
    const double base_mi = overlap_metrics(contingency(pred, gt)).mutual_information;
    const int perm[4] = {2, 0, 3, 1};
    LabelMask pred_p = pred, gt_p = gt;
    for (auto& v : pred_p.labels) v = static_cast<std::uint8_t>(perm[v]);
    for (auto& v : gt_p.labels) v = static_cast<std::uint8_t>(perm[v]);
    const OverlapScores s = overlap_metrics(contingency(pred_p, gt_p));
    EXPECT_DOUBLE_EQ(s.ari, base_ari);
    EXPECT_NEAR(s.mutual_information, base_mi, 1e-12);
}

TEST(OverlapMetrics, AriInvariantUnderOneSidedRelabeling) {
    // pair counting sees partitions, not ids: relabeling only pred's ids
    // changes nothing
    std::mt19937_64 rng(43);
    const LabelMask pred = oracle::random_mask(8, 8, 4, rng);
    const LabelMask gt = oracle::random_mask(8, 8, 4, rng);
    const int perm[4] = {3, 1, 0, 2};
    LabelMask pred_p = pred;
    for (auto& v : pred_p.labels) v = static_cast<std::uint8_t>(perm[v]);
    EXPECT_NEAR(overlap_metrics(contingency(pred_p, gt)).ari,
                overlap_metrics(contingency(pred, gt)).ari, 1e-12);
}

TEST(OverlapMetrics, RandomMasksScoreNearZeroAri) {
    std::mt19937_64 rng(47);
    double sum = 0;
    const int trials = 1000;
    for (int t = 0; t < trials; ++t) {
        const LabelMask pred = oracle::random_mask(64, 64, 4, rng);
        const LabelMask gt = oracle::random_mask(64, 64, 4, rng);
        sum += overlap_metrics(contingency(pred, gt)).ari;
    }
    EXPECT_LT(std::abs(sum / trials), 0.02);
}

TEST(OverlapMetrics, MutualInformationBoundedByEntropies) {
    std::mt19937_64 rng(53);
    for (int t = 0; t < 50; ++t) {
        const LabelMask pred = oracle::random_mask(10, 10, 4, rng);
        const LabelMask gt = oracle::random_mask(10, 10, 4, rng);
        const ContingencyTable table = contingency(pred, gt);
        const OverlapScores s = overlap_metrics(table);
        auto entropy = [&](const std::vector<std::int64_t>& marg) {
            double h = 0;
            for (std::int64_t m : marg)
                if (m > 0) {
                    const double p = static_cast<double>(m) / static_cast<double>(table.total);
                    h -= p * std::log(p);
                }
            return h;
        };
        const double bound = std::min(entropy(table.gt_marginals), entropy(table.pred_marginals));
        EXPECT_LE(s.mutual_information, bound + 1e-9);
        EXPECT_GE(s.mutual_information, 0.0);
    }
}

TEST(OverlapMetrics, KappaIsOneExactlyOnAgreement) {
    std::mt19937_64 rng(59);
    const LabelMask gt = oracle::random_mask(8, 8, 4, rng);
    EXPECT_DOUBLE_EQ(overlap_metrics(contingency(gt, gt)).kappa, 1.0);
    LabelMask pred = gt;
    pred.labels[13] = static_cast<std::uint8_t>((pred.labels[13] + 1) % 4);
    EXPECT_LT(overlap_metrics(contingency(pred, gt)).kappa, 1.0);
    for (int t = 0; t < 30; ++t) {
        const LabelMask a = oracle::random_mask(8, 8, 3, rng);
        const LabelMask b = oracle::random_mask(8, 8, 3, rng);
        EXPECT_LE(overlap_metrics(contingency(a, b)).kappa, 1.0);
    }
}

TEST(Hausdorff, ZeroOnIdenticalMasks) {
    SyntheticParams params;
    params.geometry = FlameGeometry::centered(32, 24);
    const LabelMask mask = generate_synthetic_flame(32, 24, params, 5).mask;
    EXPECT_DOUBLE_EQ(hausdorff(mask, mask), 0.0);
}

TEST(Hausdorff, TranslatedSquareScoresItsOffset) {
    LabelMask gt(30, 20, 4, 0), pred(30, 20, 4, 0);
    for (int y = 5; y < 15; ++y)
        for (int x = 5; x < 15; ++x) gt.at(x, y) = 1;
    for (int y = 5; y < 15; ++y)
        for (int x = 10; x < 20; ++x) pred.at(x, y) = 1;
    EXPECT_DOUBLE_EQ(hausdorff(pred, gt), 5.0);
}

TEST(Hausdorff, AbsentClassCostsImageDiagonal) {
    LabelMask gt(12, 9, 4, 0), pred(12, 9, 4, 0);
    gt.at(2, 2) = 1;
    pred.at(2, 2) = 1;  // class 1 identical
    gt.at(8, 5) = 3;    // class 3 only in gt
    EXPECT_DOUBLE_EQ(hausdorff(pred, gt), std::hypot(12.0, 9.0));
}

TEST(Hausdorff, SymmetricInItsArguments) {
    std::mt19937_64 rng(61);
    for (int t = 0; t < 20; ++t) {
        const LabelMask a = oracle::random_mask(9, 7, 4, rng);
        const LabelMask b = oracle::random_mask(9, 7, 4, rng);
        EXPECT_DOUBLE_EQ(hausdorff(a, b), hausdorff(b, a));
    }
}

TEST(Hausdorff, MatchesBruteForceExactly) {
    std::mt19937_64 rng(67);
    for (int t = 0; t < 40; ++t) {
        const LabelMask pred = oracle::random_mask(8, 8, 4, rng);
        const LabelMask gt = oracle::random_mask(8, 8, 4, rng);
        EXPECT_EQ(hausdorff(pred, gt), oracle::hausdorff_bruteforce(pred, gt));
    }
}

TEST(Hausdorff, DilatingPredTowardGtNeverIncreasesTheTerm) {
    LabelMask gt(24, 16, 2, 0);
    for (int y = 4; y < 12; ++y)
        for (int x = 4; x < 12; ++x) gt.at(x, y) = 1;
    LabelMask pred(24, 16, 2, 0);
    pred.at(20, 8) = 1;
    const double before = hausdorff(pred, gt);
    LabelMask dilated = pred;
    dilated.at(19, 8) = 1;  // one step toward the gt square
    const double after = hausdorff(dilated, gt);
    EXPECT_LE(after, before);
    LabelMask more = dilated;
    for (int x = 12; x < 19; ++x) more.at(x, 8) = 1;
    EXPECT_LE(hausdorff(more, gt), after);
}

TEST(DistanceTransform, MatchesBruteForceOnRandomSets) {
    std::mt19937_64 rng(71);
    for (int t = 0; t < 25; ++t) {
        const int w = 3 + static_cast<int>(rng() % 12);
        const int h = 3 + static_cast<int>(rng() % 12);
        std::vector<std::uint8_t> in_set(static_cast<std::size_t>(w) * h, 0);
        bool any = false;
        for (auto& v : in_set) {
            v = rng() % 5 == 0;
            any |= v != 0;
        }
        if (!any) in_set[rng() % in_set.size()] = 1;
        const std::vector<double> fast = squared_distance_transform(in_set, w, h);
        const std::vector<double> slow = oracle::squared_edt_bruteforce(in_set, w, h);
        for (std::size_t i = 0; i < fast.size(); ++i) EXPECT_EQ(fast[i], slow[i]) << "pixel " << i;
    }
}

TEST(PixelErrors, PerfectAgreementGivesZeroErrorInfinitePsnr) {
    const LabelMask gt = kGt4();
    const PixelErrorScores s = pixel_error_metrics(gt, gt);
    EXPECT_DOUBLE_EQ(s.mae, 0.0);
    EXPECT_DOUBLE_EQ(s.mse, 0.0);
    EXPECT_TRUE(std::isinf(s.psnr));
    EXPECT_GT(s.psnr, 0);
}

TEST(PixelErrors, TwoPixelHandExample) {
    LabelMask pred(2, 1, 4), gt(2, 1, 4);
    pred.labels = {0, 3};
    gt.labels = {0, 0};
    const PixelErrorScores s = pixel_error_metrics(pred, gt);
    EXPECT_DOUBLE_EQ(s.mae, 1.5);
    EXPECT_DOUBLE_EQ(s.mse, 4.5);
    EXPECT_NEAR(s.psnr, 10.0 * std::log10(9.0 / 4.5), 1e-12);
}

TEST(PixelErrors, MaeSquaredNeverExceedsMse) {
    std::mt19937_64 rng(73);
    for (int t = 0; t < 50; ++t) {
        const LabelMask pred = oracle::random_mask(6, 6, 4, rng);
        const LabelMask gt = oracle::random_mask(6, 6, 4, rng);
        const PixelErrorScores s = pixel_error_metrics(pred, gt);
        EXPECT_LE(s.mae * s.mae, s.mse + 1e-12);
    }
}

TEST(EvaluatePair, AgreesWithIndividualOperations) {
    std::mt19937_64 rng(79);
    const LabelMask pred = oracle::random_mask(8, 8, 4, rng);
    const LabelMask gt = oracle::random_mask(8, 8, 4, rng);
    const MetricScores s = evaluate_pair(pred, gt);
    const OverlapScores o = overlap_metrics(contingency(pred, gt));
    const PixelErrorScores p = pixel_error_metrics(pred, gt);
    EXPECT_DOUBLE_EQ(s.jaccard, o.jaccard);
    EXPECT_DOUBLE_EQ(s.f_measure, o.f_measure);
    EXPECT_DOUBLE_EQ(s.ari, o.ari);
    EXPECT_DOUBLE_EQ(s.mutual_information, o.mutual_information);
    EXPECT_DOUBLE_EQ(s.kappa, o.kappa);
    EXPECT_DOUBLE_EQ(s.hausdorff, hausdorff(pred, gt));
    EXPECT_DOUBLE_EQ(s.mae, p.mae);
    EXPECT_DOUBLE_EQ(s.mse, p.mse);
    EXPECT_DOUBLE_EQ(s.psnr, p.psnr);
}

TEST(EvaluatePair, DegradationMovesScoresTheRightWay) {
    SyntheticParams params;
    params.geometry = FlameGeometry::centered(24, 24);
    const LabelMask gt = generate_synthetic_flame(24, 24, params, 83).mask;
    const int seeds = 20;
    std::vector<double> mean_ari, mean_h;
    for (double frac : {0.0, 0.1, 0.2, 0.3, 0.4, 0.5}) {
        double ari_acc = 0, h_acc = 0;
        for (int s = 0; s < seeds; ++s) {
            const LabelMask pred = degrade_flip(gt, frac, 1000 + s);
            const MetricScores scores = evaluate_pair(pred, gt);
            ari_acc += scores.ari;
            h_acc += scores.hausdorff;
        }
        mean_ari.push_back(ari_acc / seeds);
        mean_h.push_back(h_acc / seeds);
    }
    for (std::size_t i = 1; i < mean_ari.size(); ++i) {
        EXPECT_LE(mean_ari[i], mean_ari[i - 1] + 1e-9) << "level " << i;
        EXPECT_GE(mean_h[i], mean_h[i - 1] - 0.5) << "level " << i;  // statistical slack
    }
    EXPECT_GT(mean_h.back(), mean_h.front());
    EXPECT_LT(mean_ari.back(), mean_ari.front());
}
