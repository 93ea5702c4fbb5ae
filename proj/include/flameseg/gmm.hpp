#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "flameseg/core.hpp"
#include "flameseg/kmeans.hpp"

namespace flameseg {

struct GmmOptions {
    int k = 4;
    int max_iter = 500;
    double tol = 1e-7;            // stop when the log-likelihood gain drops below this
    double variance_floor = 1e-6;
    double weight_floor = 1e-8;   // mixing weight below this counts as degenerate
    int max_restarts = 3;
};

struct GmmModel {
    std::vector<double> weights;
    std::vector<double> means;      // ascending; component c of the mask has means[c]
    std::vector<double> variances;
    std::vector<double> log_likelihood_history;  // one entry per EM iteration
    bool converged = false;
};

struct GmmResult {
    LabelMask mask;
    GmmModel model;
    int restarts = 0;
};

namespace detail {

inline double logsumexp(const double* v, int k) {
    double m = v[0];
    for (int i = 1; i < k; ++i) m = std::max(m, v[i]);
    double s = 0;
    for (int i = 0; i < k; ++i) s += std::exp(v[i] - m);
    return m + std::log(s);
}

struct GmmFitState {
    std::vector<double> weights, means, variances;
    std::vector<double> ll_history;
    bool converged = false;
    bool degenerate = false;
};

inline GmmFitState gmm_fit_once(const std::vector<double>& v, const IntensityImage& img,
                                const GmmOptions& opts, std::uint64_t seed) {
    const std::size_t n = v.size();
    const int k = opts.k;
    GmmFitState st;

    KmeansOptions kopts;
    kopts.k = k;
    const KmeansResult init = segment_kmeans(img, kopts, seed);
    st.weights.assign(static_cast<std::size_t>(k), 0.0);
    st.means = init.centroids;
    st.variances.assign(static_cast<std::size_t>(k), 0.0);
    {
        std::vector<std::int64_t> counts(static_cast<std::size_t>(k), 0);
        for (std::size_t i = 0; i < n; ++i) ++counts[init.mask.labels[i]];
        for (std::size_t i = 0; i < n; ++i) {
            const int c = init.mask.labels[i];
            const double d = v[i] - st.means[c];
            st.variances[c] += d * d;
        }
        for (int c = 0; c < k; ++c) {
            st.weights[c] = static_cast<double>(counts[c]) / static_cast<double>(n);
            st.variances[c] = counts[c] > 0
                                  ? std::max(st.variances[c] / static_cast<double>(counts[c]),
                                             opts.variance_floor)
                                  : opts.variance_floor;
        }
    }

    constexpr double kLogTwoPi = 1.8378770664093453;
    std::vector<double> resp(n * static_cast<std::size_t>(k));
    std::vector<double> lp(static_cast<std::size_t>(k));
    double prev_ll = -std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < opts.max_iter; ++iter) {
        // E-step in the log domain
        double ll = 0;
        std::vector<double> log_w(static_cast<std::size_t>(k)), log_var(static_cast<std::size_t>(k));
        for (int c = 0; c < k; ++c) {
            log_w[c] = std::log(st.weights[c]);
            log_var[c] = std::log(st.variances[c]);
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (int c = 0; c < k; ++c) {
                const double d = v[i] - st.means[c];
                lp[c] = log_w[c] - 0.5 * (kLogTwoPi + log_var[c] + d * d / st.variances[c]);
            }
            const double lse = logsumexp(lp.data(), k);
            ll += lse;
            for (int c = 0; c < k; ++c) resp[i * k + c] = std::exp(lp[c] - lse);
        }
        if (!std::isfinite(ll)) {
            st.degenerate = true;
            return st;
        }
        st.ll_history.push_back(ll);
        if (iter > 0 && ll - prev_ll < opts.tol) {
            st.converged = true;
            break;
        }
        prev_ll = ll;

        // M-step
        for (int c = 0; c < k; ++c) {
            double nk = 0, sum = 0;
            for (std::size_t i = 0; i < n; ++i) {
                nk += resp[i * k + c];
                sum += resp[i * k + c] * v[i];
            }
            const double w = nk / static_cast<double>(n);
            if (!(w >= opts.weight_floor)) {
                st.degenerate = true;
                return st;
            }
            const double mu = sum / nk;
            double var = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const double d = v[i] - mu;
                var += resp[i * k + c] * d * d;
            }
            st.weights[c] = w;
            st.means[c] = mu;
            st.variances[c] = std::max(var / nk, opts.variance_floor);
        }
    }
    return st;
}

}  // namespace detail

/// 1-D Gaussian mixture fit by EM (k-means init, log-domain E-step, floored
/// variances). A collapsed component triggers a reseeded restart; after
/// max_restarts failures the fit is abandoned. Components are relabeled by
/// ascending mean and pixels take the argmax-posterior component.
inline GmmResult segment_gmm(const IntensityImage& img, const GmmOptions& opts,
                             std::uint64_t seed) {
    if (opts.k < 2) throw error("segment_gmm: k must be >= 2");
    const std::vector<double>& v = img.values;
    if (v.empty()) throw error("segment_gmm: empty image");
    if (count_distinct(v) < opts.k) throw error("segment_gmm: fewer distinct values than k");

    detail::GmmFitState st;
    int attempt = 0;
    for (;; ++attempt) {
        const std::uint64_t attempt_seed =
            seed + 0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(attempt);
        st = detail::gmm_fit_once(v, img, opts, attempt_seed);
        if (!st.degenerate) break;
        if (attempt >= opts.max_restarts)
            throw error("segment_gmm: EM collapsed after " +
                        std::to_string(opts.max_restarts + 1) + " attempts");
    }

    const int k = opts.k;
    std::vector<int> order(static_cast<std::size_t>(k));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return st.means[a] < st.means[b]; });

    GmmResult result;
    result.restarts = attempt;
    result.model.converged = st.converged;
    result.model.log_likelihood_history = std::move(st.ll_history);
    result.model.weights.resize(static_cast<std::size_t>(k));
    result.model.means.resize(static_cast<std::size_t>(k));
    result.model.variances.resize(static_cast<std::size_t>(k));
    for (int r = 0; r < k; ++r) {
        result.model.weights[r] = st.weights[order[r]];
        result.model.means[r] = st.means[order[r]];
        result.model.variances[r] = st.variances[order[r]];
    }

    result.mask = LabelMask(img.width, img.height, k);
    std::vector<double> lp(static_cast<std::size_t>(k));
    constexpr double kLogTwoPi = 1.8378770664093453;
    for (std::size_t i = 0; i < v.size(); ++i) {
        int best_c = 0;
        double best_lp = -std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            const double d = v[i] - result.model.means[c];
            const double cur = std::log(result.model.weights[c]) -
                               0.5 * (kLogTwoPi + std::log(result.model.variances[c]) +
                                      d * d / result.model.variances[c]);
            if (cur > best_lp) {
                best_lp = cur;
                best_c = c;
            }
        }
        result.mask.labels[i] = static_cast<std::uint8_t>(best_c);
    }
    return result;
}

}  // namespace flameseg
