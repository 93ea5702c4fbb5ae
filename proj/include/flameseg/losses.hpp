#pragma once

#include <cmath>
#include <vector>

#include "flameseg/class_weights.hpp"
#include "flameseg/core.hpp"

namespace flameseg {

namespace detail {

inline std::size_t checked_channels(int c) {
    if (c < 2) throw error("Logits: invalid shape");
    return static_cast<std::size_t>(c);
}

}  // namespace detail

/// Unnormalized per-pixel class scores, row-major H x W with C contiguous
/// channels per pixel.
struct Logits {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<double> values;

    Logits() = default;
    Logits(int w, int h, int c, double fill = 0.0)
        : width(w), height(h), channels(c),
          values(detail::checked_area(w, h, "Logits") * detail::checked_channels(c), fill) {}

    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
    double* pixel(std::size_t i) { return &values[i * channels]; }
    const double* pixel(std::size_t i) const { return &values[i * channels]; }
};

struct LossResult {
    double loss = 0;
    Logits grad;  // same shape as the input logits
};

namespace detail {

struct SoftmaxPixel {
    std::vector<double> p;  // probabilities
    double nll = 0;         // -ln p[target], computed via log-sum-exp
};

inline void softmax_pixel(const double* z, int c, int target, SoftmaxPixel& out) {
    out.p.resize(static_cast<std::size_t>(c));
    double m = z[0];
    for (int k = 1; k < c; ++k) m = std::max(m, z[k]);
    double sumexp = 0;
    for (int k = 0; k < c; ++k) {
        out.p[k] = std::exp(z[k] - m);
        sumexp += out.p[k];
    }
    const double inv = 1.0 / sumexp;
    for (int k = 0; k < c; ++k) out.p[k] *= inv;
    out.nll = std::log(sumexp) - (z[target] - m);
}

inline void check_loss_shapes(const Logits& logits, const LabelMask& target) {
    if (logits.width != target.width || logits.height != target.height)
        throw error("loss: logits and target dimensions differ");
    if (logits.channels != target.num_classes)
        throw error("loss: logits channels != target num_classes");
    for (double v : logits.values)
        if (!std::isfinite(v)) throw error("loss: non-finite logit");
}

}  // namespace detail

/// Softmax cross-entropy with per-class weights, normalized by the sum of
/// the per-pixel weights so scaling all weights leaves the loss unchanged.
inline LossResult weighted_cross_entropy(const Logits& logits, const LabelMask& target,
                                         const ClassWeights& weights) {
    detail::check_loss_shapes(logits, target);
    weights.validate();
    if (static_cast<int>(weights.weights.size()) != logits.channels)
        throw error("weighted_cross_entropy: weight count != channels");

    const int c = logits.channels;
    LossResult out;
    out.grad = Logits(logits.width, logits.height, c);
    double loss_sum = 0, weight_sum = 0;
    detail::SoftmaxPixel sp;
    for (std::size_t i = 0; i < logits.pixel_count(); ++i) {
        const int y = target.labels[i];
        detail::softmax_pixel(logits.pixel(i), c, y, sp);
        const double w = weights.weights[y];
        loss_sum += w * sp.nll;
        weight_sum += w;
        double* g = out.grad.pixel(i);
        for (int k = 0; k < c; ++k)
            g[k] = w * (sp.p[k] - (k == y ? 1.0 : 0.0));
    }
    out.loss = loss_sum / weight_sum;
    const double inv = 1.0 / weight_sum;
    for (double& g : out.grad.values) g *= inv;
    return out;
}

/// Focal loss: per-pixel w_y (1-p_y)^gamma (-ln p_y), normalized like the
/// weighted cross-entropy. gamma = 0 reproduces it exactly.
inline LossResult focal_loss(const Logits& logits, const LabelMask& target,
                             const ClassWeights& weights, double gamma = 2.0) {
    detail::check_loss_shapes(logits, target);
    weights.validate();
    if (static_cast<int>(weights.weights.size()) != logits.channels)
        throw error("focal_loss: weight count != channels");
    if (gamma < 0) throw error("focal_loss: gamma must be >= 0");

    const int c = logits.channels;
    LossResult out;
    out.grad = Logits(logits.width, logits.height, c);
    double loss_sum = 0, weight_sum = 0;
    detail::SoftmaxPixel sp;
    for (std::size_t i = 0; i < logits.pixel_count(); ++i) {
        const int y = target.labels[i];
        detail::softmax_pixel(logits.pixel(i), c, y, sp);
        const double w = weights.weights[y];
        const double u = std::exp(-sp.nll);  // p_y
        const double q = 1.0 - u;
        const double modulator = std::pow(q, gamma);
        loss_sum += w * (modulator * sp.nll);
        weight_sum += w;
        // d/dz_k of (1-u)^g (-ln u) through the softmax:
        //   f'(u) u (delta_ky - p_k)  with  f'(u) u = -g q^{g-1} nll u - q^g
        double fprime_u = -modulator;
        if (gamma > 0 && q > 0)
            fprime_u -= gamma * std::pow(q, gamma - 1.0) * sp.nll * u;
        double* g = out.grad.pixel(i);
        for (int k = 0; k < c; ++k)
            g[k] = w * (fprime_u * ((k == y ? 1.0 : 0.0) - sp.p[k]));
    }
    out.loss = loss_sum / weight_sum;
    const double inv = 1.0 / weight_sum;
    for (double& g : out.grad.values) g *= inv;
    return out;
}

/// Generalized Wasserstein Dice loss. Per pixel the Wasserstein error
/// against the one-hot target is W_i = sum_c M[y_i][c] p_i[c]; the loss
/// aggregates as 1 - 2A/(2A+B) with A the summed (1-W_i) over flame-zone
/// pixels and B the summed W_i over all pixels.
inline LossResult generalized_wasserstein_dice_loss(const Logits& logits,
                                                    const LabelMask& target,
                                                    const DistanceMatrix& distances) {
    detail::check_loss_shapes(logits, target);
    distances.validate();
    if (distances.num_classes != logits.channels)
        throw error("generalized_wasserstein_dice_loss: distance matrix size != channels");

    const int c = logits.channels;
    const std::size_t n = logits.pixel_count();
    bool any_foreground = false;
    for (std::size_t i = 0; i < n; ++i)
        if (target.labels[i] != kBackground) {
            any_foreground = true;
            break;
        }
    if (!any_foreground)
        throw error("generalized_wasserstein_dice_loss: all-background target");

    std::vector<double> werr(n);
    std::vector<std::vector<double>> probs(n);
    double fg_agreement = 0;  // A
    double total_werr = 0;    // B
    detail::SoftmaxPixel sp;
    for (std::size_t i = 0; i < n; ++i) {
        const int y = target.labels[i];
        detail::softmax_pixel(logits.pixel(i), c, y, sp);
        double wi = 0;
        for (int k = 0; k < c; ++k) wi += distances.at(y, k) * sp.p[k];
        werr[i] = wi;
        probs[i] = sp.p;
        total_werr += wi;
        if (y != kBackground) fg_agreement += 1.0 - wi;
    }

    const double denom = 2.0 * fg_agreement + total_werr;
    LossResult out;
    out.grad = Logits(logits.width, logits.height, c);
    out.loss = 1.0 - 2.0 * fg_agreement / denom;
    // dL/dW_i = (2 B alpha_i + 2 A) / denom^2, then through the softmax
    const double denom_sq = denom * denom;
    for (std::size_t i = 0; i < n; ++i) {
        const int y = target.labels[i];
        const double alpha = y != kBackground ? 1.0 : 0.0;
        const double dl_dw = (2.0 * total_werr * alpha + 2.0 * fg_agreement) / denom_sq;
        double* g = out.grad.pixel(i);
        for (int k = 0; k < c; ++k)
            g[k] = dl_dw * probs[i][k] * (distances.at(y, k) - werr[i]);
    }
    return out;
}

}  // namespace flameseg
