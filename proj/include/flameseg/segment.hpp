#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>

#include "json.hpp"

#include "flameseg/chan_vese.hpp"
#include "flameseg/core.hpp"
#include "flameseg/gmm.hpp"
#include "flameseg/kmeans.hpp"
#include "flameseg/otsu.hpp"

namespace flameseg {

enum class SegMethod { kmeans, gmm, threshold, chanvese };

inline SegMethod parse_method(const std::string& name) {
    if (name == "kmeans") return SegMethod::kmeans;
    if (name == "gmm") return SegMethod::gmm;
    if (name == "threshold" || name == "otsu") return SegMethod::threshold;
    if (name == "chanvese" || name == "chan-vese") return SegMethod::chanvese;
    throw error("unknown method '" + name + "' (expected kmeans|gmm|threshold|chanvese)");
}

inline std::string method_name(SegMethod m) {
    switch (m) {
        case SegMethod::kmeans: return "kmeans";
        case SegMethod::gmm: return "gmm";
        case SegMethod::threshold: return "threshold";
        case SegMethod::chanvese: return "chanvese";
    }
    throw error("invalid method enum");
}

struct SegmentationOutput {
    LabelMask mask;
    nlohmann::json diagnostics;
};

namespace detail {

/// Strict parameter extraction: every key in `params` must be consumed, so a
/// typo in a config fails loudly instead of silently running defaults.
class ParamReader {
public:
    explicit ParamReader(const nlohmann::json& params) : params_(params) {
        if (!params_.is_object() && !params_.is_null())
            throw error("method params must be a JSON object");
    }
    double number(const char* key, double fallback) {
        if (!params_.is_object() || !params_.contains(key)) return fallback;
        used_.insert(key);
        const auto& v = params_.at(key);
        if (!v.is_number()) throw error(std::string("param '") + key + "' must be a number");
        return v.get<double>();
    }
    int integer(const char* key, int fallback) {
        if (!params_.is_object() || !params_.contains(key)) return fallback;
        used_.insert(key);
        const auto& v = params_.at(key);
        if (!v.is_number_integer()) throw error(std::string("param '") + key + "' must be an integer");
        return v.get<int>();
    }
    std::string text(const char* key, std::string fallback) {
        if (!params_.is_object() || !params_.contains(key)) return fallback;
        used_.insert(key);
        const auto& v = params_.at(key);
        if (!v.is_string()) throw error(std::string("param '") + key + "' must be a string");
        return v.get<std::string>();
    }
    void finish() const {
        if (!params_.is_object()) return;
        for (const auto& [key, value] : params_.items())
            if (!used_.count(key)) throw error("unknown method param '" + key + "'");
    }

private:
    const nlohmann::json& params_;
    std::set<std::string> used_;
};

}  // namespace detail

/// Dispatch one classical segmenter with JSON parameter overrides. Unknown
/// parameter keys are rejected.
inline SegmentationOutput run_segmenter(const IntensityImage& img, SegMethod method,
                                        const nlohmann::json& params, std::uint64_t seed) {
    detail::ParamReader reader(params);
    SegmentationOutput out;
    switch (method) {
        case SegMethod::kmeans: {
            KmeansOptions opts;
            opts.k = reader.integer("k", opts.k);
            opts.max_iter = reader.integer("max_iter", opts.max_iter);
            opts.tol = reader.number("tol", opts.tol);
            reader.finish();
            KmeansResult r = segment_kmeans(img, opts, seed);
            out.mask = std::move(r.mask);
            out.diagnostics = {{"centroids", r.centroids},
                               {"iterations", r.iterations},
                               {"converged", r.converged}};
            break;
        }
        case SegMethod::gmm: {
            GmmOptions opts;
            opts.k = reader.integer("k", opts.k);
            opts.max_iter = reader.integer("max_iter", opts.max_iter);
            opts.tol = reader.number("tol", opts.tol);
            opts.variance_floor = reader.number("variance_floor", opts.variance_floor);
            opts.weight_floor = reader.number("weight_floor", opts.weight_floor);
            opts.max_restarts = reader.integer("max_restarts", opts.max_restarts);
            reader.finish();
            GmmResult r = segment_gmm(img, opts, seed);
            out.mask = std::move(r.mask);
            out.diagnostics = {{"weights", r.model.weights},
                               {"means", r.model.means},
                               {"variances", r.model.variances},
                               {"iterations", r.model.log_likelihood_history.size()},
                               {"final_log_likelihood", r.model.log_likelihood_history.empty()
                                                            ? 0.0
                                                            : r.model.log_likelihood_history.back()},
                               {"restarts", r.restarts},
                               {"converged", r.model.converged}};
            break;
        }
        case SegMethod::threshold: {
            const int num_classes = reader.integer("num_classes", kDefaultNumClasses);
            reader.finish();
            OtsuResult r = segment_threshold(img, num_classes);
            out.mask = std::move(r.mask);
            out.diagnostics = {{"thresholds", r.thresholds},
                               {"threshold_values", r.threshold_values},
                               {"constant_input", r.constant_input}};
            break;
        }
        case SegMethod::chanvese: {
            ChanVeseOptions opts;
            opts.mu = reader.number("mu", opts.mu);
            opts.dt = reader.number("dt", opts.dt);
            opts.epsilon = reader.number("epsilon", opts.epsilon);
            opts.max_iter = reader.integer("max_iter", opts.max_iter);
            opts.tol = reader.number("tol", opts.tol);
            opts.init = reader.text("init", opts.init);
            reader.finish();
            ChanVeseResult r = segment_chan_vese(img, opts);
            out.mask = std::move(r.mask);
            out.diagnostics = {{"converged", r.converged},
                               {"iterations", r.iterations},
                               {"initial_energy", r.energy_history.front()},
                               {"final_energy", r.energy_history.back()},
                               {"region_means", r.region_means}};
            break;
        }
    }
    return out;
}

}  // namespace flameseg
