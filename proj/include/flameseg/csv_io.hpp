#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "flameseg/core.hpp"

namespace flameseg {

namespace detail {

inline bool parse_double(std::string_view token, double& out) {
    // trim ascii whitespace around the token
    std::size_t b = 0, e = token.size();
    while (b < e && (token[b] == ' ' || token[b] == '\t' || token[b] == '\r')) ++b;
    while (e > b && (token[e - 1] == ' ' || token[e - 1] == '\t' || token[e - 1] == '\r')) --e;
    if (b == e) return false;
    const char* first = token.data() + b;
    const char* last = token.data() + e;
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last;
}

inline std::vector<std::string_view> split_line(std::string_view line, char sep = ',') {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == sep) {
            out.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

inline std::string format_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

/// Reads a headerless CSV grid of finite reals, one image row per line.
inline IntensityImage load_intensity_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("load_intensity_csv: cannot open " + path);
    std::vector<double> values;
    int width = -1, height = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() && in.peek() == EOF) break;  // trailing newline
        auto tokens = detail::split_line(line);
        if (width < 0) {
            width = static_cast<int>(tokens.size());
        } else if (static_cast<int>(tokens.size()) != width) {
            throw error("load_intensity_csv: ragged rows in " + path + " (row " +
                        std::to_string(height) + " has " + std::to_string(tokens.size()) +
                        " cells, expected " + std::to_string(width) + ")");
        }
        for (auto tok : tokens) {
            double v;
            if (!detail::parse_double(tok, v))
                throw error("load_intensity_csv: non-numeric cell '" + std::string(tok) +
                            "' in " + path);
            if (!std::isfinite(v))
                throw error("load_intensity_csv: non-finite value in " + path);
            values.push_back(v);
        }
        ++height;
    }
    if (height == 0 || width <= 0) throw error("load_intensity_csv: empty file " + path);
    IntensityImage img;
    img.width = width;
    img.height = height;
    img.values = std::move(values);
    return img;
}

inline void save_intensity_csv(const IntensityImage& img, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw error("save_intensity_csv: cannot open " + path);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            if (x) out << ',';
            out << detail::format_double(img.at(x, y));
        }
        out << '\n';
    }
    if (!out) throw error("save_intensity_csv: write failed for " + path);
}

}  // namespace flameseg
