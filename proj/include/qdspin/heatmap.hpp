#pragma once

// Static SVG heatmaps of sweep results. The output is plain markup built
// with fixed-width formatting only, so a given record set renders to
// byte-identical SVG on every run and platform. Cells are laid out by grid
// index (the omega axis of the reference sweep is log-spaced, so equal cell
// widths correspond to equal log steps); tick labels carry the physical
// values in GHz.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sweep.hpp"

namespace qdspin::svg {

enum class Metric { fidelity, init_time, speed };

inline const char* metric_title(Metric m) {
    switch (m) {
        case Metric::fidelity: return "steady-state fidelity";
        case Metric::init_time: return "initialization time (ns)";
        case Metric::speed: return "initialization speed (GHz)";
    }
    throw std::invalid_argument("metric_title: unknown metric");
}

inline std::optional<double> metric_value(const sweep::SweepRecord& r, Metric m) {
    switch (m) {
        case Metric::fidelity: return r.fidelity;
        case Metric::init_time: return r.t_init_ns;
        case Metric::speed: return r.speed_ghz;
    }
    throw std::invalid_argument("metric_value: unknown metric");
}

// Perceptually uniform dark-to-bright map (viridis anchor points, linearly
// interpolated). t outside [0, 1] is clamped. Components are in [0, 1].
inline std::array<double, 3> colormap(double t) {
    static constexpr std::array<std::array<double, 3>, 9> anchors = {{
        {0.267004, 0.004874, 0.329415},
        {0.282623, 0.156513, 0.473350},
        {0.243113, 0.292092, 0.538516},
        {0.190631, 0.407061, 0.556089},
        {0.147607, 0.511733, 0.557049},
        {0.119699, 0.618490, 0.536347},
        {0.208030, 0.718701, 0.472873},
        {0.430983, 0.808473, 0.346476},
        {0.993248, 0.906157, 0.143936},
    }};
    t = std::clamp(t, 0.0, 1.0);
    const double pos = t * static_cast<double>(anchors.size() - 1);
    const std::size_t lo = std::min(static_cast<std::size_t>(pos), anchors.size() - 2);
    const double f = pos - static_cast<double>(lo);
    std::array<double, 3> c{};
    for (int k = 0; k < 3; ++k) c[k] = anchors[lo][k] + f * (anchors[lo + 1][k] - anchors[lo][k]);
    return c;
}

inline std::string color_hex(const std::array<double, 3>& rgb) {
    char buf[8];
    auto chan = [](double v) {
        return static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
    };
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", chan(rgb[0]), chan(rgb[1]), chan(rgb[2]));
    return buf;
}

// Relative position of value in [vmin, vmax]; 0.5 when the range is empty.
inline double metric_position(double value, double vmin, double vmax) {
    if (!(vmax > vmin)) return 0.5;
    return (value - vmin) / (vmax - vmin);
}

namespace detail {

inline std::string fmt(const char* spec, double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

inline std::size_t index_of_value(const std::vector<double>& axis, double v) {
    for (std::size_t i = 0; i < axis.size(); ++i) {
        if (axis[i] == v) return i;
    }
    return axis.size();
}

} // namespace detail

// Render records (any order) as a complete rectangular grid. Throws
// std::invalid_argument if the records do not cover a full grid exactly
// once. Cells whose metric is absent (points where the threshold is
// unreachable) are hatched grey.
inline std::string render_heatmap(std::span<const sweep::SweepRecord> records, Metric metric) {
    if (records.empty()) {
        throw std::invalid_argument("render_heatmap: no records");
    }

    std::vector<double> omegas, gammas;
    for (const auto& r : records) {
        if (detail::index_of_value(omegas, r.omega_ghz) == omegas.size()) omegas.push_back(r.omega_ghz);
        if (detail::index_of_value(gammas, r.gamma_ghz) == gammas.size()) gammas.push_back(r.gamma_ghz);
    }
    std::sort(omegas.begin(), omegas.end());
    std::sort(gammas.begin(), gammas.end());
    const std::size_t nx = omegas.size();
    const std::size_t ny = gammas.size();
    if (records.size() != nx * ny) {
        throw std::invalid_argument("render_heatmap: records do not form a complete rectangular grid");
    }

    std::vector<const sweep::SweepRecord*> cell(nx * ny, nullptr);
    for (const auto& r : records) {
        const std::size_t ox = detail::index_of_value(omegas, r.omega_ghz);
        const std::size_t gy = detail::index_of_value(gammas, r.gamma_ghz);
        if (cell[gy * nx + ox] != nullptr) {
            throw std::invalid_argument("render_heatmap: records do not form a complete rectangular grid");
        }
        cell[gy * nx + ox] = &r;
    }

    double vmin = 0.0, vmax = 0.0;
    bool have_range = false;
    for (const auto& r : records) {
        if (const auto v = metric_value(r, metric)) {
            if (!have_range) { vmin = vmax = *v; have_range = true; }
            vmin = std::min(vmin, *v);
            vmax = std::max(vmax, *v);
        }
    }

    // fixed layout, all coordinates in user units
    const double plot_w = 560.0, plot_h = 360.0;
    const double left = 84.0, top = 44.0;
    const double width = 790.0, height = 470.0;
    const double cw = plot_w / static_cast<double>(nx);
    const double ch = plot_h / static_cast<double>(ny);

    std::string s;
    s.reserve(records.size() * 90 + 4096);
    s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::fmt("%.0f", width) +
         "\" height=\"" + detail::fmt("%.0f", height) + "\" viewBox=\"0 0 " +
         detail::fmt("%.0f", width) + " " + detail::fmt("%.0f", height) + "\">\n";
    s += "<defs><pattern id=\"unreach\" width=\"6\" height=\"6\" patternUnits=\"userSpaceOnUse\" "
         "patternTransform=\"rotate(45)\"><rect width=\"6\" height=\"6\" fill=\"#b4b4b4\"/>"
         "<line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"#787878\" stroke-width=\"2\"/>"
         "</pattern></defs>\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    s += std::string("<text x=\"") + detail::fmt("%.1f", left + plot_w / 2.0) +
         "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">" +
         metric_title(metric) + "</text>\n";

    // data cells, gamma increasing upward
    for (std::size_t gy = 0; gy < ny; ++gy) {
        const double y = top + (static_cast<double>(ny - 1 - gy)) * ch;
        for (std::size_t ox = 0; ox < nx; ++ox) {
            const double x = left + static_cast<double>(ox) * cw;
            const sweep::SweepRecord& r = *cell[gy * nx + ox];
            std::string fill;
            if (const auto v = metric_value(r, metric)) {
                fill = color_hex(colormap(metric_position(*v, vmin, vmax)));
            } else {
                fill = "url(#unreach)";
            }
            s += "<rect class=\"cell\" x=\"" + detail::fmt("%.2f", x) + "\" y=\"" +
                 detail::fmt("%.2f", y) + "\" width=\"" + detail::fmt("%.2f", cw) +
                 "\" height=\"" + detail::fmt("%.2f", ch) + "\" fill=\"" + fill + "\"/>\n";
        }
    }
    s += "<rect x=\"" + detail::fmt("%.1f", left) + "\" y=\"" + detail::fmt("%.1f", top) +
         "\" width=\"" + detail::fmt("%.1f", plot_w) + "\" height=\"" + detail::fmt("%.1f", plot_h) +
         "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1\"/>\n";

    // ticks: at most 7 per axis, evenly strided by index, endpoints included
    auto ticks_for = [](std::size_t n) {
        std::vector<std::size_t> idx;
        const std::size_t want = std::min<std::size_t>(n, 7);
        for (std::size_t k = 0; k < want; ++k)
            idx.push_back(want == 1 ? 0 : k * (n - 1) / (want - 1));
        return idx;
    };
    for (const std::size_t i : ticks_for(nx)) {
        const double x = left + (static_cast<double>(i) + 0.5) * cw;
        s += "<line x1=\"" + detail::fmt("%.2f", x) + "\" y1=\"" + detail::fmt("%.1f", top + plot_h) +
             "\" x2=\"" + detail::fmt("%.2f", x) + "\" y2=\"" + detail::fmt("%.1f", top + plot_h + 5) +
             "\" stroke=\"#000000\"/>\n";
        s += "<text x=\"" + detail::fmt("%.2f", x) + "\" y=\"" + detail::fmt("%.1f", top + plot_h + 18) +
             "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" +
             detail::fmt("%.4g", omegas[i]) + "</text>\n";
    }
    for (const std::size_t i : ticks_for(ny)) {
        const double y = top + (static_cast<double>(ny - 1 - i) + 0.5) * ch;
        s += "<line x1=\"" + detail::fmt("%.1f", left - 5) + "\" y1=\"" + detail::fmt("%.2f", y) +
             "\" x2=\"" + detail::fmt("%.1f", left) + "\" y2=\"" + detail::fmt("%.2f", y) +
             "\" stroke=\"#000000\"/>\n";
        s += "<text x=\"" + detail::fmt("%.1f", left - 9) + "\" y=\"" + detail::fmt("%.2f", y + 4) +
             "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" +
             detail::fmt("%.4g", gammas[i]) + "</text>\n";
    }
    s += "<text x=\"" + detail::fmt("%.1f", left + plot_w / 2.0) + "\" y=\"" +
         detail::fmt("%.1f", top + plot_h + 40) +
         "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">drive "
         "&#937;/2&#960; (GHz)</text>\n";
    s += "<text x=\"20\" y=\"" + detail::fmt("%.1f", top + plot_h / 2.0) +
         "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 20 " +
         detail::fmt("%.1f", top + plot_h / 2.0) + ")\">decay &#915;/2&#960; (GHz)</text>\n";

    // colorbar, 64 strips from bottom (vmin) to top (vmax)
    const double cb_x = left + plot_w + 28.0;
    const double cb_w = 16.0;
    const int strips = 64;
    for (int k = 0; k < strips; ++k) {
        const double t0 = static_cast<double>(k) / strips;
        const double t1 = static_cast<double>(k + 1) / strips;
        const double y = top + plot_h * (1.0 - t1);
        s += "<rect x=\"" + detail::fmt("%.1f", cb_x) + "\" y=\"" + detail::fmt("%.3f", y) +
             "\" width=\"" + detail::fmt("%.1f", cb_w) + "\" height=\"" +
             detail::fmt("%.3f", plot_h / strips + 0.5) + "\" fill=\"" +
             color_hex(colormap(0.5 * (t0 + t1))) + "\"/>\n";
    }
    s += "<rect x=\"" + detail::fmt("%.1f", cb_x) + "\" y=\"" + detail::fmt("%.1f", top) +
         "\" width=\"" + detail::fmt("%.1f", cb_w) + "\" height=\"" + detail::fmt("%.1f", plot_h) +
         "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
    if (have_range) {
        const double lx = cb_x + cb_w + 6.0;
        s += "<text x=\"" + detail::fmt("%.1f", lx) + "\" y=\"" + detail::fmt("%.1f", top + plot_h) +
             "\" font-family=\"sans-serif\" font-size=\"11\">" + detail::fmt("%.4g", vmin) + "</text>\n";
        s += "<text x=\"" + detail::fmt("%.1f", lx) + "\" y=\"" +
             detail::fmt("%.1f", top + plot_h / 2.0 + 4.0) + "\" font-family=\"sans-serif\" font-size=\"11\">" +
             detail::fmt("%.4g", 0.5 * (vmin + vmax)) + "</text>\n";
        s += "<text x=\"" + detail::fmt("%.1f", lx) + "\" y=\"" + detail::fmt("%.1f", top + 8.0) +
             "\" font-family=\"sans-serif\" font-size=\"11\">" + detail::fmt("%.4g", vmax) + "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

inline void write_svg(std::span<const sweep::SweepRecord> records, Metric metric,
                      const std::filesystem::path& path) {
    const std::string body = render_heatmap(records, metric);
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw sweep::IoError("write_svg: cannot open " + path.string() + " for writing");
    }
    f.write(body.data(), static_cast<std::streamsize>(body.size()));
    f.flush();
    if (!f) {
        throw sweep::IoError("write_svg: write to " + path.string() + " failed");
    }
}

} // namespace qdspin::svg
