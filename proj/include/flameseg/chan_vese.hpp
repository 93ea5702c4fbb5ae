#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "flameseg/core.hpp"

namespace flameseg {

struct ChanVeseOptions {
    double mu = 0.02;      // boundary length weight
    double dt = 10.0;      // initial descent step; halved when a step raises the energy
    double epsilon = 2.0;  // half-width of the Heaviside transition band
    int max_iter = 300;
    double tol = 2e-4;     // stop when the mean |phi update| falls below this
    std::string init = "checkerboard";  // or "circle"
};

struct ChanVeseResult {
    LabelMask mask;
    bool converged = false;
    int iterations = 0;
    std::vector<double> energy_history;  // accepted energy per iteration, front = initial
    std::array<double, 4> region_means{};  // indexed by output label
};

namespace detail {

/// Smoothed Heaviside with compact support: exactly 0 below -eps and 1 above
/// +eps, C1 across the transition. Pixels outside the transition band have
/// crisp region memberships, so far-apart regions do not leak mass into each
/// other through slowly decaying tails.
inline double heaviside_eps(double z, double eps) {
    if (z <= -eps) return 0.0;
    if (z >= eps) return 1.0;
    const double pi = 3.14159265358979323846;
    const double t = z / eps;
    return 0.5 * (1.0 + t + std::sin(pi * t) / pi);
}

/// Mumford–Shah energy of the two-level-set model: piecewise-constant data
/// term over the four sign regions plus mu * (perimeter of both H fields),
/// with the region constants refit to the given phi.
struct CvEnergy {
    double value;
    std::array<double, 4> means;  // indexed by (phi1>0)*2 + (phi2>0)
};

inline CvEnergy cv_energy(const std::vector<double>& u, const std::vector<double>& phi1,
                          const std::vector<double>& phi2, int w, int h, double mu,
                          double eps) {
    const std::size_t n = u.size();
    // soft memberships of the four regions
    std::array<double, 4> wsum{}, vsum{};
    std::vector<double> h1(n), h2(n);
    for (std::size_t i = 0; i < n; ++i) {
        h1[i] = heaviside_eps(phi1[i], eps);
        h2[i] = heaviside_eps(phi2[i], eps);
        const std::array<double, 4> m = {(1 - h1[i]) * (1 - h2[i]), (1 - h1[i]) * h2[i],
                                         h1[i] * (1 - h2[i]), h1[i] * h2[i]};
        for (int r = 0; r < 4; ++r) {
            wsum[r] += m[r];
            vsum[r] += m[r] * u[i];
        }
    }
    double global = 0;
    for (std::size_t i = 0; i < n; ++i) global += u[i];
    global /= static_cast<double>(n);
    CvEnergy e{};
    for (int r = 0; r < 4; ++r) e.means[r] = wsum[r] > 1e-12 ? vsum[r] / wsum[r] : global;

    double data = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::array<double, 4> m = {(1 - h1[i]) * (1 - h2[i]), (1 - h1[i]) * h2[i],
                                         h1[i] * (1 - h2[i]), h1[i] * h2[i]};
        for (int r = 0; r < 4; ++r) {
            const double d = u[i] - e.means[r];
            data += m[r] * d * d;
        }
    }
    double length = 0;
    auto grad_mag = [&](const std::vector<double>& f) {
        double acc = 0;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const double fx = x + 1 < w ? f[y * w + x + 1] - f[y * w + x] : 0.0;
                const double fy = y + 1 < h ? f[(y + 1) * w + x] - f[y * w + x] : 0.0;
                acc += std::sqrt(fx * fx + fy * fy);
            }
        return acc;
    };
    length = grad_mag(h1) + grad_mag(h2);
    e.value = data + mu * length;
    return e;
}

/// Curvature div(grad phi / |grad phi|) with central differences and
/// replicated borders.
inline double cv_curvature(const std::vector<double>& f, int x, int y, int w, int h) {
    auto at = [&](int xx, int yy) {
        xx = std::clamp(xx, 0, w - 1);
        yy = std::clamp(yy, 0, h - 1);
        return f[yy * w + xx];
    };
    const double fx = (at(x + 1, y) - at(x - 1, y)) / 2.0;
    const double fy = (at(x, y + 1) - at(x, y - 1)) / 2.0;
    const double fxx = at(x + 1, y) - 2 * at(x, y) + at(x - 1, y);
    const double fyy = at(x, y + 1) - 2 * at(x, y) + at(x, y - 1);
    const double fxy =
        (at(x + 1, y + 1) + at(x - 1, y - 1) - at(x + 1, y - 1) - at(x - 1, y + 1)) / 4.0;
    const double g2 = fx * fx + fy * fy;
    return (fxx * fy * fy - 2 * fx * fy * fxy + fyy * fx * fx) /
           (g2 * std::sqrt(g2) + 1e-8);
}

}  // namespace detail

/// Four-phase Chan–Vese segmentation with two level sets evolved by explicit
/// gradient descent. The delta factor is dropped from the mobility so all
/// level sets evolve, not just a narrow band around the zero crossing, and
/// the fields are kept in a fixed band instead of being reinitialized. Each
/// step is accepted only if the refit energy does not increase (the step is
/// halved otherwise), so the recorded energy history is non-increasing;
/// when descent stalls with a sign pattern wasted (vacant, or duplicating
/// another pattern's constant), a discrete reassignment move is proposed and
/// kept only if it lowers the energy. Output regions are relabeled by
/// ascending mean intensity.
inline ChanVeseResult segment_chan_vese(const IntensityImage& img, const ChanVeseOptions& opts) {
    if (opts.mu < 0) throw error("segment_chan_vese: mu must be >= 0");
    if (opts.dt <= 0) throw error("segment_chan_vese: dt must be > 0");
    if (opts.epsilon <= 0) throw error("segment_chan_vese: epsilon must be > 0");
    if (opts.max_iter < 1) throw error("segment_chan_vese: max_iter must be >= 1");
    const int w = img.width, h = img.height;
    const std::vector<double>& u = img.values;
    if (u.empty()) throw error("segment_chan_vese: empty image");

    const double pi = 3.14159265358979323846;
    // Only the zero set of a level-set field carries meaning, so instead of
    // periodic reinitialization both fields are kept in a band around zero.
    // Settled interiors park at the band edge, where the projection zeroes
    // their updates and they stop contributing to the convergence norm, and
    // where the compact Heaviside makes their memberships exactly crisp.
    const double band = 2.0 * opts.epsilon;
    std::vector<double> phi1(u.size()), phi2(u.size());
    if (opts.init == "checkerboard") {
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                phi1[y * w + x] = std::sin(pi * x / 5.0) * std::sin(pi * y / 5.0);
                phi2[y * w + x] = std::cos(pi * x / 5.0) * std::cos(pi * y / 5.0);
            }
    } else if (opts.init == "circle") {
        const double cx = (w - 1) / 2.0, cy = (h - 1) / 2.0;
        const double r1 = std::min(w, h) / 3.0, r2 = std::min(w, h) / 5.0;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const double d = std::hypot(x - cx, y - cy);
                phi1[y * w + x] = r1 - d;
                phi2[y * w + x] = r2 - d;
            }
    } else {
        throw error("segment_chan_vese: unknown init '" + opts.init + "'");
    }
    for (std::size_t i = 0; i < u.size(); ++i) {
        phi1[i] = std::clamp(phi1[i], -band, band);
        phi2[i] = std::clamp(phi2[i], -band, band);
    }

    ChanVeseResult result;
    detail::CvEnergy cur = detail::cv_energy(u, phi1, phi2, w, h, opts.mu, opts.epsilon);
    result.energy_history.push_back(cur.value);

    std::vector<double> cand1(u.size()), cand2(u.size());
    double last_change = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < opts.max_iter; ++iter) {
        result.iterations = iter + 1;
        std::array<double, 4> c = cur.means;  // c[(phi1>0)*2 + (phi2>0)]
        // Two stalls waste a sign pattern on nothing: a (near-)vacant pattern
        // whose constant no pixel wants, and two patterns fitting the same
        // constant (one region split across both while two true regions stay
        // merged elsewhere). Re-aim a wasted pattern at the intensity the
        // others serve worst — like reseeding an empty k-means cluster — and
        // keep re-aiming until it holds enough pixels (0.5% of the image) to
        // anchor its own mean.
        const std::size_t vacancy = std::max<std::size_t>(1, u.size() / 200);
        std::array<std::size_t, 4> occupancy{};
        for (std::size_t i = 0; i < u.size(); ++i)
            ++occupancy[(phi1[i] > 0 ? 2 : 0) + (phi2[i] > 0 ? 1 : 0)];
        double worst = -1.0, rescue = c[0];
        int donor = 0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            const int r = (phi1[i] > 0 ? 2 : 0) + (phi2[i] > 0 ? 1 : 0);
            const double d = (u[i] - c[r]) * (u[i] - c[r]);
            if (d > worst) {
                worst = d;
                rescue = u[i];
                donor = r;
            }
        }
        std::array<bool, 4> wasted{};
        for (int r = 0; r < 4; ++r) wasted[r] = occupancy[r] < vacancy;
        // Early on every pattern's soft mean sits near the global mean, so
        // constants that merely look alike are not yet wasted; treat
        // duplicates as wasted only once ordinary descent has stalled. A
        // stall shows up either as the fields barely moving (a slow crawl
        // toward the tolerance exit) or as the energy freezing while
        // pixels slide through the flat zones, so watch for both.
        const auto& hist = result.energy_history;
        const bool stalled =
            last_change < 10.0 * opts.tol ||
            (hist.size() >= 2 && hist[hist.size() - 2] - hist.back() <
                                     1e-7 * (1.0 + std::abs(hist.back())));
        for (int r = 0; stalled && r < 4; ++r)
            for (int s = r + 1; s < 4; ++s) {
                if (wasted[r] || wasted[s] || std::abs(c[r] - c[s]) >= 0.02) continue;
                wasted[occupancy[r] <= occupancy[s] ? r : s] = true;
            }
        bool reaimed = false;
        for (int r = 0; r < 4; ++r)
            if (wasted[r] && r != donor) {
                c[r] = rescue;
                reaimed = true;
            }
        bool accepted = false;
        double mean_change = 0;
        if (reaimed) {
            // Dragging pixels into the re-aimed pattern through the
            // transition bands crosses an energy ridge (mass passes through
            // the two mixed patterns on the way), and monotone descent
            // rejects every step big enough to make it across. So propose
            // the finished claim instead: park each pixel at the code of its
            // nearest constant and keep the move only if the refit energy
            // actually drops.
            for (std::size_t i = 0; i < u.size(); ++i) {
                int best = 0;
                double bd = (u[i] - c[0]) * (u[i] - c[0]);
                for (int r = 1; r < 4; ++r) {
                    const double d = (u[i] - c[r]) * (u[i] - c[r]);
                    if (d < bd) {
                        bd = d;
                        best = r;
                    }
                }
                cand1[i] = (best & 2) ? band : -band;
                cand2[i] = (best & 1) ? band : -band;
            }
            const detail::CvEnergy next =
                detail::cv_energy(u, cand1, cand2, w, h, opts.mu, opts.epsilon);
            if (next.value < cur.value) {
                double acc = 0;
                for (std::size_t i = 0; i < u.size(); ++i)
                    acc += std::abs(cand1[i] - phi1[i]) + std::abs(cand2[i] - phi2[i]);
                mean_change = acc / (2.0 * static_cast<double>(u.size()));
                last_change = mean_change;
                phi1.swap(cand1);
                phi2.swap(cand2);
                cur = next;
                accepted = true;
            } else {
                reaimed = false;  // claim refused; descend with the honest means
                c = cur.means;
            }
        }
        double step = opts.dt;
        for (int halving = 0; !accepted && halving < 40; ++halving) {
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    const std::size_t i = static_cast<std::size_t>(y) * w + x;
                    const double h1 = detail::heaviside_eps(phi1[i], opts.epsilon);
                    const double h2 = detail::heaviside_eps(phi2[i], opts.epsilon);
                    const double d00 = (u[i] - c[0]) * (u[i] - c[0]);
                    const double d01 = (u[i] - c[1]) * (u[i] - c[1]);
                    const double d10 = (u[i] - c[2]) * (u[i] - c[2]);
                    const double d11 = (u[i] - c[3]) * (u[i] - c[3]);
                    const double f1 = (d11 - d01) * h2 + (d10 - d00) * (1 - h2);
                    const double f2 = (d11 - d10) * h1 + (d01 - d00) * (1 - h1);
                    cand1[i] = std::clamp(
                        phi1[i] +
                            step * (opts.mu * detail::cv_curvature(phi1, x, y, w, h) - f1),
                        -band, band);
                    cand2[i] = std::clamp(
                        phi2[i] +
                            step * (opts.mu * detail::cv_curvature(phi2, x, y, w, h) - f2),
                        -band, band);
                }
            const detail::CvEnergy next =
                detail::cv_energy(u, cand1, cand2, w, h, opts.mu, opts.epsilon);
            if (next.value <= cur.value + 1e-12 * (1.0 + std::abs(cur.value))) {
                double acc = 0;
                for (std::size_t i = 0; i < u.size(); ++i) {
                    acc += std::abs(cand1[i] - phi1[i]) + std::abs(cand2[i] - phi2[i]);
                }
                mean_change = acc / (2.0 * static_cast<double>(u.size()));
                last_change = mean_change;
                phi1.swap(cand1);
                phi2.swap(cand2);
                cur = next;
                accepted = true;
                break;
            }
            step /= 2;
        }
        if (!accepted) {
            result.converged = true;  // no descent direction left at any step size
            break;
        }
        result.energy_history.push_back(cur.value);
        // A re-aimed pattern mid-claim is not a settled state, even if this
        // step happened to move little.
        if (mean_change < opts.tol && !reaimed) {
            result.converged = true;
            break;
        }
    }

    // harden the level sets into labels and order regions by mean intensity
    std::array<double, 4> sum{}, cnt{};
    std::vector<std::uint8_t> region(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const int r = (phi1[i] > 0 ? 2 : 0) + (phi2[i] > 0 ? 1 : 0);
        region[i] = static_cast<std::uint8_t>(r);
        sum[r] += u[i];
        cnt[r] += 1;
    }
    std::array<int, 4> order{0, 1, 2, 3};
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const bool ea = cnt[a] == 0, eb = cnt[b] == 0;
        if (ea != eb) return eb;  // occupied regions first
        if (ea) return false;
        return sum[a] / cnt[a] < sum[b] / cnt[b];
    });
    std::array<int, 4> rank{};
    for (int r = 0; r < 4; ++r) rank[order[r]] = r;

    result.mask = LabelMask(w, h, 4);
    for (std::size_t i = 0; i < u.size(); ++i)
        result.mask.labels[i] = static_cast<std::uint8_t>(rank[region[i]]);
    for (int r = 0; r < 4; ++r)
        result.region_means[rank[r]] = cnt[r] > 0 ? sum[r] / cnt[r] : 0.0;
    return result;
}

}  // namespace flameseg
