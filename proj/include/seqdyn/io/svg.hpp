#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "seqdyn/io/json.hpp"

namespace seqdyn::io::svg {

// Every plot here is a function of JSON input only; fixed-precision formatting keeps the bytes stable.

inline constexpr std::array<const char*, 6> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

inline std::string fmt(double v, int digits = 2)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

inline std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Frame {
    double x0, y0, w, h;             // pixel rectangle
    double xmin, xmax, ymin, ymax;   // data range

    double px(double x) const { return x0 + (x - xmin) / (xmax - xmin) * w; }
    double py(double y) const { return y0 + h - (y - ymin) / (ymax - ymin) * h; }
};

inline std::string header(int width, int height)
{
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) + "\" height=\"" +
           std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) + " " + std::to_string(height) +
           "\" font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

/// Provenance of the source document (its run_config and build stamp), when present.
inline std::string metadata(const json& doc)
{
    json meta = json::object();
    for (const char* key : {"run_config", "build"})
        if (doc.contains(key))
            meta[key] = doc.at(key);
    return meta.empty() ? std::string() : "<metadata>" + escape(meta.dump()) + "</metadata>\n";
}

inline std::string text(double x, double y, const std::string& s, const char* anchor = "start", int size = 12)
{
    return "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" text-anchor=\"" + anchor + "\" font-size=\"" +
           std::to_string(size) + "\">" + escape(s) + "</text>\n";
}

inline std::string axes(const Frame& f, const std::string& xlabel, const std::string& ylabel)
{
    std::string s = "<rect x=\"" + fmt(f.x0) + "\" y=\"" + fmt(f.y0) + "\" width=\"" + fmt(f.w) + "\" height=\"" +
                    fmt(f.h) + "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = f.xmin + (f.xmax - f.xmin) * k / 4.0;
        const double yv = f.ymin + (f.ymax - f.ymin) * k / 4.0;
        s += text(f.px(xv), f.y0 + f.h + 15, fmt(xv, 1), "middle", 10);
        s += text(f.x0 - 5, f.py(yv) + 4, fmt(yv, 2), "end", 10);
    }
    s += text(f.x0 + f.w / 2, f.y0 + f.h + 30, xlabel, "middle");
    s += "<text x=\"" + fmt(f.x0 - 40) + "\" y=\"" + fmt(f.y0 + f.h / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 " +
         fmt(f.x0 - 40) + " " + fmt(f.y0 + f.h / 2) + ")\">" + escape(ylabel) + "</text>\n";
    return s;
}

inline std::string polyline(const std::vector<std::pair<double, double>>& pts, const char* color, double width = 1.2,
                            const char* dash = nullptr)
{
    std::string s = "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"" + fmt(width, 1) + "\"";
    if (dash)
        s += " stroke-dasharray=\"" + std::string(dash) + "\"";
    s += " points=\"";
    for (std::size_t k = 0; k < pts.size(); ++k) {
        if (k)
            s += ' ';
        s += fmt(pts[k].first) + "," + fmt(pts[k].second);
    }
    return s + "\"/>\n";
}

/// One panel of x_i(t) for a series {t: [...], x: [[...], ...]}.
inline std::string series_panel(const json& series, const Frame& f, const std::string& title)
{
    std::string s = axes(f, "t", "x_i(t)");
    s += text(f.x0 + f.w / 2, f.y0 - 6, title, "middle", 13);
    const auto& t = series.at("t");
    const auto& x = series.at("x");
    if (t.empty())
        return s;
    const std::size_t n = x[0].size();
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::pair<double, double>> pts;
        for (std::size_t k = 0; k < t.size(); ++k)
            pts.emplace_back(f.px(t[k].get<double>()), f.py(x[k][i].get<double>()));
        s += polyline(pts, kPalette[i % kPalette.size()]);
        s += text(f.x0 + f.w + 8, f.y0 + 14 + 16 * static_cast<double>(i), "x_" + std::to_string(i + 1));
        s += "<line x1=\"" + fmt(f.x0 + f.w + 30) + "\" y1=\"" + fmt(f.y0 + 10 + 16 * static_cast<double>(i)) +
             "\" x2=\"" + fmt(f.x0 + f.w + 45) + "\" y2=\"" + fmt(f.y0 + 10 + 16 * static_cast<double>(i)) +
             "\" stroke=\"" + kPalette[i % kPalette.size()] + "\" stroke-width=\"2\"/>\n";
    }
    return s;
}

inline std::pair<double, double> value_range(const json& series, double pad = 0.05)
{
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& row : series.at("x"))
        for (const auto& v : row) {
            lo = std::min(lo, v.get<double>());
            hi = std::max(hi, v.get<double>());
        }
    if (!(lo < hi)) {
        lo = std::isfinite(lo) ? lo - 0.5 : 0.0;
        hi = std::isfinite(hi) ? hi + 0.5 : 1.0;
    }
    const double d = (hi - lo) * pad;
    return {lo - d, hi + d};
}

inline double time_end(const json& series)
{
    const auto& t = series.at("t");
    return t.empty() ? 1.0 : std::max(t.back().get<double>(), 1e-12);
}

/// Time series of a document {title, series: {t, x}}.
inline std::string time_series(const json& doc)
{
    const auto& series = doc.at("series");
    std::string s = header(760, 320) + metadata(doc);
    const auto [lo, hi] = value_range(series);
    const Frame f{70, 30, 600, 240, 0.0, time_end(series), lo, hi};
    s += series_panel(series, f, doc.value("title", std::string()));
    return s + "</svg>\n";
}

/// Target (top) against the trained net (bottom), from an analysis report.
inline std::string comparison(const json& report)
{
    const auto& tgt = report.at("series").at("target");
    const auto& net = report.at("series").at("net");
    std::string s = header(760, 600) + metadata(report);
    const auto r1 = value_range(tgt), r2 = value_range(net);
    const double lo = std::min(r1.first, r2.first), hi = std::max(r1.second, r2.second);
    const double te = std::max(time_end(tgt), time_end(net));
    s += series_panel(tgt, {70, 30, 600, 220, 0.0, te, lo, hi}, "target");
    std::string title = "trained network";
    if (!report.at("converged_period").is_null())
        title += ", period " + fmt(report.at("converged_period").get<double>(), 3);
    s += series_panel(net, {70, 320, 600, 220, 0.0, te, lo, hi}, title);
    return s + "</svg>\n";
}

/// Oblique 2D view of a 3D orbit: u = (x_2 - x_1) cos 30deg, v = x_3 - (x_1 + x_2) / 2.
inline std::pair<double, double> oblique(const json& x)
{
    const double a = x[0].get<double>(), b = x[1].get<double>(), c = x[2].get<double>();
    return {(b - a) * std::sqrt(3.0) / 2.0, c - 0.5 * (a + b)};
}

inline std::string projection(const json& report)
{
    std::string s = header(560, 560) + metadata(report);
    const Frame f{60, 40, 460, 460, -1.0, 1.0, -0.75, 1.25};
    s += "<rect x=\"" + fmt(f.x0) + "\" y=\"" + fmt(f.y0) + "\" width=\"" + fmt(f.w) + "\" height=\"" + fmt(f.h) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
    s += text(f.x0 + f.w / 2, f.y0 - 12, "orbit, oblique projection of (x_1, x_2, x_3)", "middle", 13);
    const char* colors[2] = {"#999999", kPalette[0]};
    const char* dashes[2] = {"4 3", nullptr};
    const char* names[2] = {"target", "net"};
    for (int which = 0; which < 2; ++which) {
        const auto& ser = report.at("series").at(names[which]);
        std::vector<std::pair<double, double>> pts;
        for (const auto& x : ser.at("x")) {
            const auto [u, v] = oblique(x);
            pts.emplace_back(f.px(u), f.py(v));
        }
        s += polyline(pts, colors[which], which ? 1.2 : 1.0, dashes[which]);
        s += "<line x1=\"" + fmt(f.x0 + 10) + "\" y1=\"" + fmt(f.y0 + 15 + 16.0 * which) + "\" x2=\"" +
             fmt(f.x0 + 30) + "\" y2=\"" + fmt(f.y0 + 15 + 16.0 * which) + "\" stroke=\"" + colors[which] +
             "\" stroke-width=\"2\"/>\n";
        s += text(f.x0 + 35, f.y0 + 19 + 16.0 * which, names[which]);
    }
    const auto a = vec_from_json(report.at("target_params").at("a"));
    for (int i = 0; i < 3; ++i) {
        json e = json::array({0.0, 0.0, 0.0});
        e[i] = a[i];
        const auto [u, v] = oblique(e);
        s += "<circle cx=\"" + fmt(f.px(u)) + "\" cy=\"" + fmt(f.py(v)) + "\" r=\"4\" fill=\"black\"/>\n";
        s += text(f.px(u) + 6, f.py(v) - 6, "saddle " + std::to_string(i + 1), "start", 11);
    }
    return s + "</svg>\n";
}

/// Block-mean connectivity heatmap with a diverging blue-white-red scale.
inline std::string heatmap(const json& report)
{
    const auto& bm = report.at("block_means");
    std::string s = header(420, 400) + metadata(report);
    s += text(210, 24, "block means of WP (row: target group, column: source group)", "middle", 12);
    if (bm.is_null())
        return s + text(210, 200, "no block layout", "middle") + "</svg>\n";
    const Mat m = mat_from_json(bm);
    const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
    const double cell = 280.0 / static_cast<double>(m.rows());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const double u = std::clamp(m(i, j) / scale, -1.0, 1.0);
            const int hi = 255, lo = static_cast<int>(std::lround(255.0 * (1.0 - std::abs(u))));
            char color[16];
            std::snprintf(color, sizeof color, "#%02x%02x%02x", u >= 0 ? hi : lo, lo, u >= 0 ? lo : hi);
            const double x = 70 + cell * static_cast<double>(j), y = 50 + cell * static_cast<double>(i);
            s += "<rect x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" width=\"" + fmt(cell) + "\" height=\"" + fmt(cell) +
                 "\" fill=\"" + color + "\" stroke=\"black\"/>\n";
            s += text(x + cell / 2, y + cell / 2 + 4, fmt(m(i, j), 3), "middle", 12);
        }
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        s += text(60, 50 + cell * (static_cast<double>(i) + 0.5) + 4, "x_" + std::to_string(i + 1), "end");
        s += text(70 + cell * (static_cast<double>(i) + 0.5), 50 + cell * static_cast<double>(m.rows()) + 18,
                  "x_" + std::to_string(i + 1), "middle");
    }
    s += text(210, 385, "max |mean| = " + fmt(scale, 4), "middle", 11);
    return s + "</svg>\n";
}

inline void write(const std::string& path, const std::string& svg)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot open " + path + " for writing");
    os << svg;
}

} // namespace seqdyn::io::svg
