// Command-line front end: segmentation, evaluation, augmentation, losses,
// class weights, correlation, ranking, and the end-to-end benchmark.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "flameseg/flameseg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json parse_json_arg(const std::string& arg, const char* what) {
    try {
        if (!arg.empty() && arg.front() == '@') {
            std::ifstream in(arg.substr(1));
            if (!in) throw flameseg::error(std::string("cannot open ") + what + " file '" +
                                           arg.substr(1) + "'");
            return json::parse(in);
        }
        return json::parse(arg);
    } catch (const json::parse_error& e) {
        throw flameseg::error(std::string("invalid JSON for ") + what + ": " + e.what());
    }
}

std::vector<std::string> png_stems(const std::string& dir) {
    std::vector<std::string> stems;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".png")
            stems.push_back(entry.path().stem().string());
    }
    std::sort(stems.begin(), stems.end());
    return stems;
}

void cmd_segment(const std::string& method, const std::string& in_path,
                 const std::string& out_path, const std::string& params_arg,
                 std::uint64_t seed) {
    const flameseg::SegMethod m = flameseg::parse_method(method);
    const json params = params_arg.empty() ? json() : parse_json_arg(params_arg, "--params");
    const flameseg::IntensityImage img =
        flameseg::normalize(flameseg::load_intensity_csv(in_path));
    const auto t0 = std::chrono::steady_clock::now();
    flameseg::SegmentationOutput out = flameseg::run_segmenter(img, m, params, seed);
    const auto t1 = std::chrono::steady_clock::now();
    flameseg::save_label_mask(out.mask, out_path);
    json info = out.diagnostics;
    info["method"] = flameseg::method_name(m);
    info["seconds"] = std::chrono::duration<double>(t1 - t0).count();
    info["out"] = out_path;
    std::cout << info.dump(2) << '\n';
}

void cmd_eval(const std::string& pred_dir, const std::string& gt_dir,
              const std::string& metrics, const std::string& out_path,
              std::string method_name) {
    if (method_name.empty()) method_name = fs::path(pred_dir).filename().string();
    if (method_name.empty()) method_name = "external";
    const std::vector<std::string> names = flameseg::resolve_metric_names(metrics);
    flameseg::EvalReport report;
    int skipped = 0;
    for (const std::string& id : png_stems(gt_dir)) {
        const fs::path pred_path = fs::path(pred_dir) / (id + ".png");
        try {
            flameseg::LabelMask gt = flameseg::load_label_mask((fs::path(gt_dir) / (id + ".png")).string());
            flameseg::LabelMask pred = flameseg::load_label_mask(pred_path.string());
            const int classes = std::max(pred.num_classes, gt.num_classes);
            flameseg::EvalRow row;
            row.image_id = id;
            row.method = method_name;
            row.scores = flameseg::evaluate_pair(pred.with_num_classes(classes),
                                                 gt.with_num_classes(classes));
            report.rows.push_back(std::move(row));
        } catch (const std::exception& e) {
            std::cerr << "skip " << id << ": " << e.what() << '\n';
            ++skipped;
        }
    }
    if (report.rows.empty()) throw flameseg::error("no evaluable mask pairs");
    report.sort_rows();
    flameseg::write_report_csv(out_path, report, names);
    std::cout << "wrote " << out_path << " (" << report.rows.size() << " rows";
    if (skipped) std::cout << ", " << skipped << " skipped";
    std::cout << ")\n";
}

void cmd_augment(const std::string& image_path, const std::string& mask_path,
                 const flameseg::AugmentConfig& cfg, std::uint64_t seed, int count,
                 const std::string& out_dir) {
    const flameseg::IntensityImage img = flameseg::load_intensity_csv(image_path);
    const flameseg::LabelMask mask = flameseg::load_label_mask(mask_path);
    fs::create_directories(out_dir);
    const std::string stem = fs::path(image_path).stem().string();
    for (int i = 0; i < count; ++i) {
        const flameseg::AugmentedPair pair = flameseg::augment(img, mask, cfg, seed + static_cast<std::uint64_t>(i));
        const std::string tag = stem + "_aug" + std::to_string(i);
        flameseg::save_intensity_csv(pair.image, (fs::path(out_dir) / (tag + ".csv")).string());
        flameseg::save_label_mask(pair.mask, (fs::path(out_dir) / (tag + ".png")).string());
    }
    std::cout << "wrote " << count << " augmented pair(s) to " << out_dir << '\n';
}

flameseg::Logits load_logits_csv(const std::string& path, int width, int height) {
    const flameseg::IntensityImage grid = flameseg::load_intensity_csv(path);
    if (grid.height != width * height)
        throw flameseg::error("logits CSV must have H*W = " + std::to_string(width * height) +
                              " rows (got " + std::to_string(grid.height) + ")");
    flameseg::Logits logits(width, height, grid.width);
    logits.values = grid.values;  // both row-major pixel-major
    return logits;
}

void cmd_loss(const std::string& loss_name, const std::string& logits_path,
              const std::string& target_path, const std::string& weights_arg,
              double gamma, const std::string& distances_arg, const std::string& grad_out) {
    const flameseg::LabelMask target = flameseg::load_label_mask(target_path);
    const flameseg::Logits logits = load_logits_csv(logits_path, target.width, target.height);
    const int C = logits.channels;

    flameseg::LossResult result;
    if (loss_name == "wce" || loss_name == "focal") {
        flameseg::ClassWeights weights;
        if (weights_arg.empty()) {
            weights.weights.assign(static_cast<std::size_t>(C), 1.0);
        } else {
            const json j = parse_json_arg(weights_arg, "--weights");
            weights.weights = j.get<std::vector<double>>();
        }
        result = loss_name == "wce"
                     ? flameseg::weighted_cross_entropy(logits, target, weights)
                     : flameseg::focal_loss(logits, target, weights, gamma);
    } else if (loss_name == "gwdl") {
        flameseg::DistanceMatrix M;
        if (distances_arg.empty()) {
            if (C != flameseg::kDefaultNumClasses)
                throw flameseg::error("--distances required when channels != 4");
            M = flameseg::flame_zone_distances();
        } else {
            const json j = parse_json_arg(distances_arg, "--distances");
            M.num_classes = C;
            M.values.reserve(static_cast<std::size_t>(C) * C);
            for (const auto& row : j)
                for (const auto& v : row) M.values.push_back(v.get<double>());
            M.validate();
        }
        result = flameseg::generalized_wasserstein_dice_loss(logits, target, M);
    } else {
        throw flameseg::error("unknown loss '" + loss_name + "' (expected wce|focal|gwdl)");
    }

    std::cout << flameseg::detail::format_double(result.loss) << '\n';
    if (!grad_out.empty()) {
        flameseg::IntensityImage grid(logits.channels, logits.width * logits.height);
        grid.values = result.grad.values;
        flameseg::save_intensity_csv(grid, grad_out);
        std::cerr << "gradient written to " << grad_out << '\n';
    }
}

void cmd_weights(const std::string& frequencies_arg, const std::string& masks_dir, double c) {
    std::vector<double> freq;
    if (!frequencies_arg.empty()) {
        for (std::string_view tok : flameseg::detail::split_line(frequencies_arg, ',')) {
            double v;
            if (!flameseg::detail::parse_double(tok, v))
                throw flameseg::error("bad frequency '" + std::string(tok) + "'");
            freq.push_back(v);
        }
    } else if (!masks_dir.empty()) {
        std::vector<std::int64_t> counts;
        std::int64_t total = 0;
        for (const std::string& id : png_stems(masks_dir)) {
            const flameseg::LabelMask mask =
                flameseg::load_label_mask((fs::path(masks_dir) / (id + ".png")).string());
            if (static_cast<int>(counts.size()) < mask.num_classes)
                counts.resize(static_cast<std::size_t>(mask.num_classes), 0);
            for (std::uint8_t v : mask.labels) ++counts[v];
            total += static_cast<std::int64_t>(mask.labels.size());
        }
        if (total == 0) throw flameseg::error("no masks found in '" + masks_dir + "'");
        for (std::int64_t n : counts) freq.push_back(static_cast<double>(n) / static_cast<double>(total));
    } else {
        throw flameseg::error("need --frequencies or --from-masks");
    }
    const flameseg::ClassWeights w = flameseg::enet_class_weights(freq, c);
    json out;
    out["frequencies"] = freq;
    out["c"] = c;
    out["weights"] = w.weights;
    std::cout << out.dump(2) << '\n';
}

void cmd_correlate(const std::string& report_path, const std::string& rankings_path,
                   const std::string& out_path) {
    const flameseg::EvalReport report = flameseg::read_report_csv(report_path);
    const flameseg::RankingTable rankings = flameseg::load_rankings_csv(rankings_path);
    const flameseg::CorrelationMatrix cm =
        flameseg::report_ranking_correlation(report, rankings);
    flameseg::write_correlation_csv(out_path, cm);
    std::cout << "wrote " << out_path << " (" << cm.names.size() << " variables)\n";
}

void cmd_rank(const std::string& reports_dir, const std::string& out_path) {
    std::vector<flameseg::EvalRow> rows;
    for (const auto& entry : fs::directory_iterator(reports_dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
        flameseg::EvalReport part = flameseg::read_report_csv(entry.path().string());
        rows.insert(rows.end(), part.rows.begin(), part.rows.end());
    }
    if (rows.empty()) throw flameseg::error("no report CSVs in '" + reports_dir + "'");
    flameseg::EvalReport merged;
    merged.rows = std::move(rows);
    merged.sort_rows();
    const auto ranked = flameseg::rank_models(
        flameseg::summaries_from_aggregates(merged.aggregate()));
    std::ofstream out(out_path);
    if (!out) throw flameseg::error("cannot open '" + out_path + "'");
    out << flameseg::ranking_to_json(ranked).dump(2) << '\n';
    std::cout << "wrote " << out_path << '\n';
    for (std::size_t i = 0; i < ranked.size(); ++i)
        std::cout << (i + 1) << ". " << ranked[i].name
                  << "  hausdorff=" << ranked[i].mean_hausdorff
                  << "  ari=" << ranked[i].mean_ari
                  << "  seconds=" << ranked[i].total_seconds << '\n';
}

void cmd_benchmark(const std::string& config_path, const std::string& out_dir) {
    std::ifstream in(config_path);
    if (!in) throw flameseg::error("cannot open config '" + config_path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw flameseg::error(std::string("invalid config JSON: ") + e.what());
    }
    const flameseg::BenchmarkConfig cfg = flameseg::benchmark_config_from_json(j);
    const flameseg::BenchmarkOutcome outcome = flameseg::run_benchmark(cfg);
    flameseg::write_benchmark_outputs(outcome, out_dir, cfg);
    for (const flameseg::BenchmarkFailure& f : outcome.failures)
        std::cerr << "failure: image=" << f.image_id << " method=" << f.method << ": "
                  << f.message << '\n';
    std::cout << "report rows: " << outcome.report.rows.size() << '\n';
    for (std::size_t i = 0; i < outcome.ranking.size(); ++i)
        std::cout << (i + 1) << ". " << outcome.ranking[i].name
                  << "  hausdorff=" << outcome.ranking[i].mean_hausdorff
                  << "  ari=" << outcome.ranking[i].mean_ari
                  << "  seconds=" << outcome.ranking[i].total_seconds << '\n';
    std::cout << "outputs in " << out_dir << '\n';
}

void cmd_synth(const std::string& out_dir, int count, int width, int height, double noise,
               std::uint64_t seed) {
    fs::create_directories(fs::path(out_dir) / "images");
    fs::create_directories(fs::path(out_dir) / "masks");
    for (int i = 0; i < count; ++i) {
        flameseg::SyntheticParams params;
        params.geometry = flameseg::FlameGeometry::centered(width, height);
        params.noise_sigma = noise;
        const auto sample =
            flameseg::generate_synthetic_flame(width, height, params, seed + static_cast<std::uint64_t>(i));
        char name[32];
        std::snprintf(name, sizeof(name), "flame_%03d", i);
        flameseg::save_intensity_csv(sample.image,
                                     (fs::path(out_dir) / "images" / (std::string(name) + ".csv")).string());
        flameseg::save_label_mask(sample.mask,
                                  (fs::path(out_dir) / "masks" / (std::string(name) + ".png")).string());
    }
    std::cout << "wrote " << count << " synthetic pair(s) to " << out_dir << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"flameseg: classical flame-zone segmentation and evaluation toolkit"};
    app.require_subcommand(1);

    // segment
    std::string seg_method, seg_in, seg_out, seg_params;
    std::uint64_t seg_seed = 0;
    auto* seg = app.add_subcommand("segment", "Segment one intensity CSV into a class mask PNG");
    seg->add_option("--method", seg_method, "gmm|kmeans|threshold|chanvese")->required();
    seg->add_option("--in", seg_in, "input intensity CSV")->required()->check(CLI::ExistingFile);
    seg->add_option("--out", seg_out, "output mask PNG")->required();
    seg->add_option("--params", seg_params, "JSON object of method parameters (or @file)");
    seg->add_option("--seed", seg_seed, "RNG seed");

    // eval
    std::string eval_pred, eval_gt, eval_metrics = "all", eval_out, eval_name;
    auto* eval = app.add_subcommand("eval", "Score predicted masks against ground truth");
    eval->add_option("--pred-dir", eval_pred, "directory of predicted masks")->required()->check(CLI::ExistingDirectory);
    eval->add_option("--gt-dir", eval_gt, "directory of ground-truth masks")->required()->check(CLI::ExistingDirectory);
    eval->add_option("--metrics", eval_metrics, "all or comma list (jaccard,f_measure,ari,mutual_information,nmi,kappa,hausdorff,mae,mse,psnr)");
    eval->add_option("--out", eval_out, "output report CSV")->required();
    eval->add_option("--method-name", eval_name, "method column value (default: pred dir name)");

    // augment
    std::string aug_image, aug_mask, aug_crop, aug_out_dir;
    flameseg::AugmentConfig aug_cfg;
    std::uint64_t aug_seed = 0;
    int aug_count = 1;
    auto* aug = app.add_subcommand("augment", "Apply flip/scale/crop jointly to an image and mask");
    aug->add_option("--image", aug_image, "input intensity CSV")->required()->check(CLI::ExistingFile);
    aug->add_option("--mask", aug_mask, "input mask PNG")->required()->check(CLI::ExistingFile);
    aug->add_option("--flip-prob", aug_cfg.flip_probability, "horizontal flip probability");
    aug->add_option("--scale-lo", aug_cfg.scale_lo, "scale range lower bound");
    aug->add_option("--scale-hi", aug_cfg.scale_hi, "scale range upper bound");
    aug->add_option("--crop", aug_crop, "crop size WxH (default: original size)");
    aug->add_option("--seed", aug_seed, "RNG seed");
    aug->add_option("--count", aug_count, "number of augmented draws")->check(CLI::PositiveNumber);
    aug->add_option("--out-dir", aug_out_dir, "output directory")->required();

    // loss
    std::string loss_name, loss_logits, loss_target, loss_weights, loss_distances, loss_grad_out;
    double loss_gamma = 2.0;
    auto* loss = app.add_subcommand("loss", "Evaluate a loss (and gradient) on logits vs a target mask");
    loss->add_option("--loss", loss_name, "wce|focal|gwdl")->required();
    loss->add_option("--logits", loss_logits, "CSV with H*W rows x C columns")->required()->check(CLI::ExistingFile);
    loss->add_option("--target", loss_target, "target mask PNG")->required()->check(CLI::ExistingFile);
    loss->add_option("--weights", loss_weights, "JSON array of class weights (or @file)");
    loss->add_option("--gamma", loss_gamma, "focal exponent");
    loss->add_option("--distances", loss_distances, "JSON CxC distance matrix (or @file)");
    loss->add_option("--grad-out", loss_grad_out, "write gradient CSV here");

    // weights
    std::string w_freqs, w_masks;
    double w_c = 1.02;
    auto* weights = app.add_subcommand("weights", "ENet class weighing from frequencies or masks");
    weights->add_option("--frequencies", w_freqs, "comma-separated class frequencies");
    weights->add_option("--from-masks", w_masks, "directory of mask PNGs")->check(CLI::ExistingDirectory);
    weights->add_option("--c", w_c, "ENet constant");

    // correlate
    std::string corr_report, corr_rankings, corr_out;
    auto* corr = app.add_subcommand("correlate", "Pearson matrix of metrics vs manual rankings");
    corr->add_option("--report", corr_report, "report CSV")->required()->check(CLI::ExistingFile);
    corr->add_option("--rankings", corr_rankings, "rankings CSV (image_id,rank1,...)")->required()->check(CLI::ExistingFile);
    corr->add_option("--out", corr_out, "output correlation CSV")->required();

    // rank
    std::string rank_dir, rank_out;
    auto* rank = app.add_subcommand("rank", "Rank methods from a directory of report CSVs");
    rank->add_option("--reports", rank_dir, "directory of report CSVs")->required()->check(CLI::ExistingDirectory);
    rank->add_option("--out", rank_out, "output ranking JSON")->required();

    // benchmark
    std::string bench_config, bench_out;
    auto* bench = app.add_subcommand("benchmark", "Run the full segmentation benchmark");
    bench->add_option("--config", bench_config, "benchmark config JSON")->required()->check(CLI::ExistingFile);
    bench->add_option("--out", bench_out, "output directory")->required();

    // synth
    std::string synth_out;
    int synth_count = 20, synth_w = 80, synth_h = 60;
    double synth_noise = 0.0;
    std::uint64_t synth_seed = 0;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic flame dataset");
    synth->add_option("--out", synth_out, "dataset directory")->required();
    synth->add_option("--count", synth_count, "number of images")->check(CLI::PositiveNumber);
    synth->add_option("--width", synth_w)->check(CLI::PositiveNumber);
    synth->add_option("--height", synth_h)->check(CLI::PositiveNumber);
    synth->add_option("--noise", synth_noise, "Gaussian noise sigma");
    synth->add_option("--seed", synth_seed, "RNG seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (seg->parsed()) {
            cmd_segment(seg_method, seg_in, seg_out, seg_params, seg_seed);
        } else if (eval->parsed()) {
            cmd_eval(eval_pred, eval_gt, eval_metrics, eval_out, eval_name);
        } else if (aug->parsed()) {
            if (!aug_crop.empty()) {
                const auto x = aug_crop.find('x');
                if (x == std::string::npos)
                    throw flameseg::error("--crop expects WxH, e.g. 320x240");
                aug_cfg.crop_width = std::stoi(aug_crop.substr(0, x));
                aug_cfg.crop_height = std::stoi(aug_crop.substr(x + 1));
            }
            cmd_augment(aug_image, aug_mask, aug_cfg, aug_seed, aug_count, aug_out_dir);
        } else if (loss->parsed()) {
            cmd_loss(loss_name, loss_logits, loss_target, loss_weights, loss_gamma,
                     loss_distances, loss_grad_out);
        } else if (weights->parsed()) {
            cmd_weights(w_freqs, w_masks, w_c);
        } else if (corr->parsed()) {
            cmd_correlate(corr_report, corr_rankings, corr_out);
        } else if (rank->parsed()) {
            cmd_rank(rank_dir, rank_out);
        } else if (bench->parsed()) {
            cmd_benchmark(bench_config, bench_out);
        } else if (synth->parsed()) {
            cmd_synth(synth_out, synth_count, synth_w, synth_h, synth_noise, synth_seed);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
