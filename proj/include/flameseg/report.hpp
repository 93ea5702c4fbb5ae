#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "flameseg/analysis.hpp"
#include "flameseg/core.hpp"
#include "flameseg/csv_io.hpp"
#include "flameseg/metrics.hpp"

namespace flameseg {

inline constexpr std::array<const char*, 9> kReportMetrics = {
    "jaccard", "f_measure", "ari",  "mutual_information", "kappa",
    "hausdorff", "mae",      "mse", "psnr"};

inline double metric_by_name(const MetricScores& s, const std::string& name) {
    if (name == "jaccard") return s.jaccard;
    if (name == "f_measure") return s.f_measure;
    if (name == "ari") return s.ari;
    if (name == "mutual_information") return s.mutual_information;
    if (name == "nmi") return s.normalized_mutual_information;
    if (name == "kappa") return s.kappa;
    if (name == "hausdorff") return s.hausdorff;
    if (name == "mae") return s.mae;
    if (name == "mse") return s.mse;
    if (name == "psnr") return s.psnr;
    throw error("unknown metric '" + name + "'");
}

inline std::vector<std::string> resolve_metric_names(const std::string& selection) {
    std::vector<std::string> names;
    if (selection.empty() || selection == "all") {
        names.assign(kReportMetrics.begin(), kReportMetrics.end());
        return names;
    }
    for (std::string_view tok : detail::split_line(selection, ',')) {
        std::string name(tok);
        MetricScores probe;
        metric_by_name(probe, name);  // validates the name
        names.push_back(std::move(name));
    }
    if (names.empty()) throw error("empty metric selection");
    return names;
}

struct EvalRow {
    std::string image_id;
    std::string method;
    MetricScores scores;
    double seconds = 0;
};

struct MethodAggregate {
    std::string method;
    int count = 0;
    MetricScores mean;  // per-metric arithmetic mean over the method's rows
    double total_seconds = 0;
};

struct EvalReport {
    std::vector<EvalRow> rows;

    /// Canonical order: (method, image_id); makes emission reproducible
    /// regardless of evaluation scheduling.
    void sort_rows() {
        std::stable_sort(rows.begin(), rows.end(), [](const EvalRow& a, const EvalRow& b) {
            if (a.method != b.method) return a.method < b.method;
            return a.image_id < b.image_id;
        });
    }

    std::vector<MethodAggregate> aggregate() const {
        std::map<std::string, std::vector<const EvalRow*>> by_method;
        for (const EvalRow& r : rows) by_method[r.method].push_back(&r);
        std::vector<MethodAggregate> out;
        for (const auto& [method, mrows] : by_method) {
            MethodAggregate agg;
            agg.method = method;
            agg.count = static_cast<int>(mrows.size());
            MetricScores& m = agg.mean;
            for (const EvalRow* r : mrows) {
                const MetricScores& s = r->scores;
                m.jaccard += s.jaccard;
                m.f_measure += s.f_measure;
                m.ari += s.ari;
                m.mutual_information += s.mutual_information;
                m.normalized_mutual_information += s.normalized_mutual_information;
                m.kappa += s.kappa;
                m.hausdorff += s.hausdorff;
                m.mae += s.mae;
                m.mse += s.mse;
                m.psnr += s.psnr;
                agg.total_seconds += r->seconds;
            }
            const double inv = 1.0 / static_cast<double>(mrows.size());
            m.jaccard *= inv;
            m.f_measure *= inv;
            m.ari *= inv;
            m.mutual_information *= inv;
            m.normalized_mutual_information *= inv;
            m.kappa *= inv;
            m.hausdorff *= inv;
            m.mae *= inv;
            m.mse *= inv;
            m.psnr *= inv;
            out.push_back(std::move(agg));
        }
        return out;
    }
};

/// JSON value for a double that survives non-finite entries (JSON has no
/// inf/nan literals; they are emitted as strings).
inline nlohmann::json json_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

inline void write_report_csv(const std::string& path, const EvalReport& report,
                             const std::vector<std::string>& metric_names) {
    std::ofstream out(path);
    if (!out) throw error("cannot open '" + path + "' for writing");
    out << "image_id,method";
    for (const std::string& m : metric_names) out << ',' << m;
    out << ",seconds\n";
    for (const EvalRow& r : report.rows) {
        out << r.image_id << ',' << r.method;
        for (const std::string& m : metric_names)
            out << ',' << detail::format_double(metric_by_name(r.scores, m));
        out << ',' << detail::format_double(r.seconds) << '\n';
    }
    if (!out) throw error("write failed for '" + path + "'");
}

inline nlohmann::json aggregate_to_json(const std::vector<MethodAggregate>& aggs) {
    nlohmann::json j = nlohmann::json::object();
    for (const MethodAggregate& a : aggs) {
        nlohmann::json entry;
        entry["count"] = a.count;
        for (const char* metric : kReportMetrics)
            entry[std::string("mean_") + metric] = json_number(metric_by_name(a.mean, metric));
        entry["total_seconds"] = json_number(a.total_seconds);
        j[a.method] = std::move(entry);
    }
    return j;
}

inline std::vector<ModelSummary> summaries_from_aggregates(
    const std::vector<MethodAggregate>& aggs) {
    std::vector<ModelSummary> models;
    models.reserve(aggs.size());
    for (const MethodAggregate& a : aggs)
        models.push_back({a.method, a.mean.hausdorff, a.mean.ari, a.total_seconds});
    return models;
}

inline nlohmann::json ranking_to_json(const std::vector<ModelSummary>& ranked) {
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        nlohmann::json entry;
        entry["rank"] = i + 1;
        entry["name"] = ranked[i].name;
        entry["mean_hausdorff"] = json_number(ranked[i].mean_hausdorff);
        entry["mean_ari"] = json_number(ranked[i].mean_ari);
        entry["total_seconds"] = json_number(ranked[i].total_seconds);
        arr.push_back(std::move(entry));
    }
    return arr;
}

/// Parse a report.csv produced by write_report_csv (or a compatible file).
/// Unknown metric columns are ignored; missing ones stay zero.
inline EvalReport read_report_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw error("empty report '" + path + "'");
    std::vector<std::string> header;
    for (std::string_view tok : detail::split_line(line, ',')) header.emplace_back(tok);
    if (header.size() < 3 || header[0] != "image_id" || header[1] != "method")
        throw error("unexpected report header in '" + path + "'");
    EvalReport report;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::vector<std::string_view> parts = detail::split_line(line, ',');
        if (parts.size() != header.size())
            throw error("report row " + std::to_string(lineno) + " has " +
                        std::to_string(parts.size()) + " fields, expected " +
                        std::to_string(header.size()));
        EvalRow row;
        row.image_id = std::string(parts[0]);
        row.method = std::string(parts[1]);
        for (std::size_t c = 2; c < header.size(); ++c) {
            double v;
            if (!detail::parse_double(parts[c], v))
                throw error("bad number in '" + path + "' line " + std::to_string(lineno));
            const std::string& name = header[c];
            if (name == "seconds") row.seconds = v;
            else if (name == "jaccard") row.scores.jaccard = v;
            else if (name == "f_measure") row.scores.f_measure = v;
            else if (name == "ari") row.scores.ari = v;
            else if (name == "mutual_information") row.scores.mutual_information = v;
            else if (name == "nmi") row.scores.normalized_mutual_information = v;
            else if (name == "kappa") row.scores.kappa = v;
            else if (name == "hausdorff") row.scores.hausdorff = v;
            else if (name == "mae") row.scores.mae = v;
            else if (name == "mse") row.scores.mse = v;
            else if (name == "psnr") row.scores.psnr = v;
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

inline void write_correlation_csv(const std::string& path, const CorrelationMatrix& cm) {
    std::ofstream out(path);
    if (!out) throw error("cannot open '" + path + "' for writing");
    out << "variable";
    for (const std::string& n : cm.names) out << ',' << n;
    out << '\n';
    const std::size_t m = cm.names.size();
    for (std::size_t i = 0; i < m; ++i) {
        out << cm.names[i];
        for (std::size_t j = 0; j < m; ++j) out << ',' << detail::format_double(cm.at(i, j));
        out << '\n';
    }
    if (!out) throw error("write failed for '" + path + "'");
}

}  // namespace flameseg
