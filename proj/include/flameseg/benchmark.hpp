#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "flameseg/csv_io.hpp"
#include "flameseg/dataset.hpp"
#include "flameseg/metrics.hpp"
#include "flameseg/png_io.hpp"
#include "flameseg/report.hpp"
#include "flameseg/segment.hpp"

namespace flameseg {

struct MethodSpec {
    std::string name;
    bool external = false;
    SegMethod method = SegMethod::kmeans;  // classical only
    nlohmann::json params;                 // classical only
    std::string pred_dir;                  // external only
};

struct BenchmarkConfig {
    std::string dataset;
    std::vector<MethodSpec> methods;
    std::uint64_t seed = 0;  // master seed for per-image segmentation RNG
    bool has_split = false;
    std::uint64_t split_seed = 0;
    SplitRatios ratios{};
    std::string subset = "all";  // all|train|val|test
    int parallelism = 1;
    std::string rankings;  // optional rankings CSV; enables corr.csv output
};

inline BenchmarkConfig benchmark_config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw error("benchmark config must be a JSON object");
    BenchmarkConfig cfg;
    if (!j.contains("dataset") || !j.at("dataset").is_string())
        throw error("benchmark config: missing string field 'dataset'");
    cfg.dataset = j.at("dataset").get<std::string>();
    if (!j.contains("methods") || !j.at("methods").is_array() || j.at("methods").empty())
        throw error("benchmark config: 'methods' must be a non-empty array");
    for (const auto& m : j.at("methods")) {
        MethodSpec spec;
        if (!m.contains("name") || !m.at("name").is_string())
            throw error("benchmark config: each method needs a string 'name'");
        spec.name = m.at("name").get<std::string>();
        const std::string kind =
            m.contains("kind") ? m.at("kind").get<std::string>() : std::string("classical");
        if (kind == "classical") {
            spec.external = false;
            spec.method = parse_method(m.contains("method")
                                           ? m.at("method").get<std::string>()
                                           : spec.name);
            spec.params = m.contains("params") ? m.at("params") : nlohmann::json();
        } else if (kind == "external") {
            spec.external = true;
            if (!m.contains("pred_dir") || !m.at("pred_dir").is_string())
                throw error("benchmark config: external method '" + spec.name +
                            "' needs 'pred_dir'");
            spec.pred_dir = m.at("pred_dir").get<std::string>();
        } else {
            throw error("benchmark config: unknown method kind '" + kind + "'");
        }
        for (const MethodSpec& prev : cfg.methods)
            if (prev.name == spec.name)
                throw error("benchmark config: duplicate method name '" + spec.name + "'");
        cfg.methods.push_back(std::move(spec));
    }
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("split")) {
        const auto& s = j.at("split");
        cfg.has_split = true;
        cfg.split_seed = s.contains("seed") ? s.at("seed").get<std::uint64_t>() : 0;
        if (s.contains("ratios")) {
            const auto& r = s.at("ratios");
            if (!r.is_array() || r.size() != 3)
                throw error("benchmark config: split.ratios must be [train, val, test]");
            cfg.ratios.train = r.at(0).get<double>();
            cfg.ratios.val = r.at(1).get<double>();
            cfg.ratios.test = r.at(2).get<double>();
        }
        if (s.contains("subset")) cfg.subset = s.at("subset").get<std::string>();
        if (cfg.subset != "all" && cfg.subset != "train" && cfg.subset != "val" &&
            cfg.subset != "test")
            throw error("benchmark config: split.subset must be all|train|val|test");
        if (!j.contains("seed")) cfg.seed = cfg.split_seed;
    }
    if (j.contains("parallelism")) cfg.parallelism = j.at("parallelism").get<int>();
    if (cfg.parallelism < 1) throw error("benchmark config: parallelism must be >= 1");
    if (j.contains("rankings")) cfg.rankings = j.at("rankings").get<std::string>();
    return cfg;
}

struct BenchmarkFailure {
    std::string image_id;
    std::string method;  // "*" when the image/mask pair itself is unusable
    std::string message;
};

struct BenchmarkOutcome {
    EvalReport report;
    std::vector<MethodAggregate> aggregates;
    std::vector<ModelSummary> ranking;
    std::vector<BenchmarkFailure> failures;
    std::optional<DatasetSplit> split;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t image_seed(std::uint64_t master, const std::string& image_id) {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64
    for (unsigned char c : image_id) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return splitmix64(h ^ master);
}

inline std::vector<std::string> discover_image_ids(const std::string& dataset_root) {
    namespace fs = std::filesystem;
    const fs::path images = fs::path(dataset_root) / "images";
    if (!fs::is_directory(images))
        throw error("dataset root '" + dataset_root + "' has no images/ directory");
    std::vector<std::string> ids;
    for (const auto& entry : fs::directory_iterator(images)) {
        if (!entry.is_regular_file()) continue;
        if (entry.path().extension() == ".csv") ids.push_back(entry.path().stem().string());
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

}  // namespace detail

/// Run every configured method over every selected image, timing segmentation
/// (and only segmentation), then score each prediction against the ground
/// truth with the full metric battery. Per-file problems are quarantined as
/// failures; an empty dataset is fatal.
inline BenchmarkOutcome run_benchmark(const BenchmarkConfig& cfg) {
    namespace fs = std::filesystem;
    std::vector<std::string> ids = detail::discover_image_ids(cfg.dataset);
    if (ids.empty()) throw error("dataset '" + cfg.dataset + "' contains no images");

    BenchmarkOutcome outcome;
    if (cfg.has_split) {
        outcome.split = split_dataset(ids, cfg.ratios, cfg.split_seed);
        if (cfg.subset == "train") ids = outcome.split->train;
        else if (cfg.subset == "val") ids = outcome.split->val;
        else if (cfg.subset == "test") ids = outcome.split->test;
        std::sort(ids.begin(), ids.end());
        if (ids.empty()) throw error("selected subset '" + cfg.subset + "' is empty");
    }

    const std::size_t n_images = ids.size();
    const std::size_t n_methods = cfg.methods.size();
    std::vector<std::optional<EvalRow>> cells(n_images * n_methods);
    std::vector<BenchmarkFailure> failures;
    std::mutex failures_mu;
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n_images) return;
            const std::string& id = ids[i];
            IntensityImage img;
            LabelMask gt;
            try {
                const fs::path img_path = fs::path(cfg.dataset) / "images" / (id + ".csv");
                const fs::path gt_path = fs::path(cfg.dataset) / "masks" / (id + ".png");
                img = normalize(load_intensity_csv(img_path.string()));
                gt = load_label_mask(gt_path.string());
                if (img.width != gt.width || img.height != gt.height)
                    throw error("image/mask dimensions differ for '" + id + "'");
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(failures_mu);
                failures.push_back({id, "*", e.what()});
                continue;
            }
            const std::uint64_t seed = detail::image_seed(cfg.seed, id);
            for (std::size_t m = 0; m < n_methods; ++m) {
                const MethodSpec& spec = cfg.methods[m];
                try {
                    LabelMask pred;
                    double seconds = 0;
                    if (spec.external) {
                        const fs::path p = fs::path(spec.pred_dir) / (id + ".png");
                        pred = load_label_mask(p.string());
                        if (pred.width != gt.width || pred.height != gt.height)
                            throw error("prediction dimensions differ for '" + id + "'");
                    } else {
                        const auto t0 = std::chrono::steady_clock::now();
                        SegmentationOutput seg = run_segmenter(img, spec.method, spec.params, seed);
                        const auto t1 = std::chrono::steady_clock::now();
                        seconds = std::chrono::duration<double>(t1 - t0).count();
                        pred = std::move(seg.mask);
                    }
                    const int classes = std::max(pred.num_classes, gt.num_classes);
                    EvalRow row;
                    row.image_id = id;
                    row.method = spec.name;
                    row.scores = evaluate_pair(pred.with_num_classes(classes),
                                               gt.with_num_classes(classes));
                    row.seconds = seconds;
                    cells[i * n_methods + m] = std::move(row);
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lock(failures_mu);
                    failures.push_back({id, spec.name, e.what()});
                }
            }
        }
    };

    const int threads = std::min<int>(cfg.parallelism, static_cast<int>(n_images));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    for (auto& cell : cells)
        if (cell) outcome.report.rows.push_back(std::move(*cell));
    outcome.report.sort_rows();
    std::sort(failures.begin(), failures.end(),
              [](const BenchmarkFailure& a, const BenchmarkFailure& b) {
                  if (a.method != b.method) return a.method < b.method;
                  return a.image_id < b.image_id;
              });
    outcome.failures = std::move(failures);
    if (outcome.report.rows.empty())
        throw error("benchmark produced no successful evaluations");
    outcome.aggregates = outcome.report.aggregate();
    outcome.ranking = rank_models(summaries_from_aggregates(outcome.aggregates));
    return outcome;
}

/// Rankings CSV: header "image_id,<name>,<name>,..."; one row per image.
struct RankingTable {
    std::vector<std::string> names;
    std::map<std::string, std::vector<double>> by_image;
};

inline RankingTable load_rankings_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("cannot open rankings '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw error("empty rankings '" + path + "'");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    RankingTable table;
    {
        const auto header = detail::split_line(line, ',');
        if (header.size() < 2 || header[0] != "image_id")
            throw error("rankings header must start with image_id");
        for (std::size_t c = 1; c < header.size(); ++c) table.names.emplace_back(header[c]);
    }
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto parts = detail::split_line(line, ',');
        if (parts.size() != table.names.size() + 1)
            throw error("rankings row " + std::to_string(lineno) + " has wrong field count");
        std::vector<double> vals(table.names.size());
        for (std::size_t c = 0; c < table.names.size(); ++c) {
            if (!detail::parse_double(parts[c + 1], vals[c]))
                throw error("bad number in rankings line " + std::to_string(lineno));
        }
        table.by_image[std::string(parts[0])] = std::move(vals);
    }
    if (table.by_image.empty()) throw error("rankings '" + path + "' has no data rows");
    return table;
}

/// Metric columns + ranking columns over the report rows, joined on image_id.
inline CorrelationMatrix report_ranking_correlation(const EvalReport& report,
                                                    const RankingTable& rankings) {
    std::vector<std::string> names(kReportMetrics.begin(), kReportMetrics.end());
    std::vector<std::vector<double>> columns(names.size() + rankings.names.size());
    for (const EvalRow& row : report.rows) {
        const auto it = rankings.by_image.find(row.image_id);
        if (it == rankings.by_image.end())
            throw error("rankings are missing image '" + row.image_id + "'");
        for (std::size_t c = 0; c < names.size(); ++c)
            columns[c].push_back(metric_by_name(row.scores, names[c]));
        for (std::size_t c = 0; c < rankings.names.size(); ++c)
            columns[names.size() + c].push_back(it->second[c]);
    }
    for (const std::string& rn : rankings.names) names.push_back(rn);
    return correlation_study(names, columns);
}

inline void write_benchmark_outputs(const BenchmarkOutcome& outcome, const std::string& out_dir,
                                    const BenchmarkConfig& cfg) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    write_report_csv((fs::path(out_dir) / "report.csv").string(), outcome.report,
                     resolve_metric_names("all"));
    {
        std::ofstream out(fs::path(out_dir) / "aggregate.json");
        out << aggregate_to_json(outcome.aggregates).dump(2) << '\n';
        if (!out) throw error("write failed for aggregate.json");
    }
    {
        std::ofstream out(fs::path(out_dir) / "ranking.json");
        out << ranking_to_json(outcome.ranking).dump(2) << '\n';
        if (!out) throw error("write failed for ranking.json");
    }
    if (!outcome.failures.empty()) {
        nlohmann::json arr = nlohmann::json::array();
        for (const BenchmarkFailure& f : outcome.failures)
            arr.push_back({{"image_id", f.image_id}, {"method", f.method}, {"error", f.message}});
        std::ofstream out(fs::path(out_dir) / "failures.json");
        out << arr.dump(2) << '\n';
        if (!out) throw error("write failed for failures.json");
    }
    if (outcome.split)
        save_split_manifest(*outcome.split, (fs::path(out_dir) / "split.json").string());
    if (!cfg.rankings.empty()) {
        const RankingTable table = load_rankings_csv(cfg.rankings);
        write_correlation_csv((fs::path(out_dir) / "corr.csv").string(),
                              report_ranking_correlation(outcome.report, table));
    }
}

}  // namespace flameseg
