#include "pvbess/svg.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace pvbess::svg {
namespace {

constexpr double kWidth = 640, kHeight = 480;
constexpr double kLeft = 70, kRight = 120, kTop = 40, kBottom = 60;
constexpr double kPlotW = kWidth - kLeft - kRight;
constexpr double kPlotH = kHeight - kTop - kBottom;

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

// Dark blue -> green -> yellow ramp for t in [0, 1].
std::string ramp(double t) {
    static constexpr std::array<std::array<double, 3>, 4> stops = {
        {{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {253, 231, 37}}};
    t = std::clamp(t, 0.0, 1.0) * (stops.size() - 1);
    const auto i = std::min<std::size_t>(static_cast<std::size_t>(t), stops.size() - 2);
    const double f = t - static_cast<double>(i);
    std::array<int, 3> rgb{};
    for (std::size_t k = 0; k < 3; ++k)
        rgb[k] = static_cast<int>(std::lround(stops[i][k] + f * (stops[i + 1][k] - stops[i][k])));
    return fmt::format("#{:02x}{:02x}{:02x}", rgb[0], rgb[1], rgb[2]);
}

std::string header(const std::string& title) {
    return fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
        "font-family=\"sans-serif\" font-size=\"12\">\n"
        "<rect width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n"
        "<text x=\"{2}\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">{3}</text>\n",
        kWidth, kHeight, kLeft + kPlotW / 2, escape(title));
}

std::string axes(double x0, double x1, double y0, double y1, const std::string& x_label, const std::string& y_label) {
    std::string out = fmt::format(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", kLeft, kTop, kPlotW,
        kPlotH);
    for (int k = 0; k <= 4; ++k) {
        const double fx = k / 4.0;
        out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{:.3g}</text>\n",
                           kLeft + fx * kPlotW, kTop + kPlotH + 16, x0 + fx * (x1 - x0));
        out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.3g}</text>\n", kLeft - 6,
                           kTop + kPlotH - fx * kPlotH + 4, y0 + fx * (y1 - y0));
    }
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", kLeft + kPlotW / 2,
                       kHeight - 20, escape(x_label));
    out += fmt::format(
        "<text x=\"18\" y=\"{:.1f}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.1f})\">{}</text>\n",
        kTop + kPlotH / 2, kTop + kPlotH / 2, escape(y_label));
    return out;
}

}  // namespace

std::string heatmap(const sizing::SizingGrid& grid, const sizing::CostModel& model, std::optional<double> budget,
                    std::optional<sizing::OperatingPoint> optimum, const std::string& title) {
    const auto [cmin, cmax] = std::minmax_element(grid.capacities.begin(), grid.capacities.end());
    const auto [gmin, gmax] = std::minmax_element(grid.avg_gen_power.begin(), grid.avg_gen_power.end());
    const double x0 = *cmin, x1 = *cmax > *cmin ? *cmax : *cmin + 1.0;
    const double y0 = *gmin, y1 = *gmax > *gmin ? *gmax : *gmin + 1.0;
    const double cell_w = kPlotW / static_cast<double>(grid.capacities.size());
    const double cell_h = kPlotH / static_cast<double>(grid.factors.size());
    auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * kPlotW; };
    auto py = [&](double y) { return kTop + kPlotH - (y - y0) / (y1 - y0) * kPlotH; };

    std::string out = header(title);
    for (std::size_t ci = 0; ci < grid.capacities.size(); ++ci) {
        for (std::size_t fi = 0; fi < grid.factors.size(); ++fi) {
            const auto& cell = grid.at(ci, fi);
            const std::string fill = cell.valid ? ramp(cell.sc_plus_ss / 2.0) : "#cccccc";
            out += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"/>\n",
                               kLeft + static_cast<double>(ci) * cell_w,
                               kTop + kPlotH - static_cast<double>(fi + 1) * cell_h, cell_w + 0.05, cell_h + 0.05,
                               fill);
        }
    }
    out += axes(x0, x1, y0, y1, "battery capacity [kWh]", "average generation power [kW]");
    if (budget && model.c_gen > 0.0) {
        // c_batt * x + c_gen * y = budget, clipped to the plot.
        std::string points;
        for (int k = 0; k <= 64; ++k) {
            const double x = x0 + (x1 - x0) * k / 64.0;
            const double y = (*budget - model.c_batt * x) / model.c_gen;
            if (y < y0 || y > y1) continue;
            points += fmt::format("{:.2f},{:.2f} ", px(x), py(y));
        }
        if (!points.empty())
            out += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"lime\" stroke-width=\"2\"/>\n", points);
    }
    if (optimum) {
        const double cx = px(optimum->capacity);
        const double cy = py(grid.avg_gen_power[optimum->factor_index]);
        out += fmt::format(
            "<path d=\"M{0:.2f} {1:.2f} L{2:.2f} {3:.2f} M{0:.2f} {3:.2f} L{2:.2f} {1:.2f}\" stroke=\"cyan\" "
            "stroke-width=\"3\"/>\n",
            cx - 6, cy - 6, cx + 6, cy + 6);
    }
    // Colour bar for SC+SS in [0, 2].
    for (int k = 0; k < 50; ++k)
        out += fmt::format("<rect x=\"{:.1f}\" y=\"{:.2f}\" width=\"16\" height=\"{:.2f}\" fill=\"{}\"/>\n",
                           kLeft + kPlotW + 20, kTop + kPlotH - (k + 1) * kPlotH / 50.0, kPlotH / 50.0 + 0.05,
                           ramp(k / 49.0));
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">2.0</text>\n", kLeft + kPlotW + 40, kTop + 10);
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">0.0</text>\n", kLeft + kPlotW + 40, kTop + kPlotH);
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">SC+SS</text>\n", kLeft + kPlotW + 14, kTop - 6);
    out += "</svg>\n";
    return out;
}

std::string line_chart(const std::vector<Series>& series, const std::string& title, const std::string& x_label,
                       const std::string& y_label) {
    static constexpr std::array<const char*, 8> colours = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                                           "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = 0.0, y1 = 1.0;
    for (const auto& s : series) {
        for (double x : s.x) {
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
        }
        for (double y : s.y) y1 = std::max(y1, y);
    }
    if (!std::isfinite(x0)) x0 = 0.0, x1 = 1.0;
    if (x1 <= x0) x1 = x0 + 1.0;
    auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * kPlotW; };
    auto py = [&](double y) { return kTop + kPlotH - (y - y0) / (y1 - y0) * kPlotH; };

    std::string out = header(title);
    out += axes(x0, x1, y0, y1, x_label, y_label);
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& s = series[i];
        const char* colour = colours[i % colours.size()];
        std::string points;
        for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k)
            points += fmt::format("{:.2f},{:.2f} ", px(s.x[k]), py(s.y[k]));
        out += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n", points,
                           colour);
        out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" fill=\"{}\">{}</text>\n", kLeft + kPlotW + 8,
                           kTop + 14 + 16.0 * static_cast<double>(i), colour, escape(s.name));
    }
    out += "</svg>\n";
    return out;
}

}  // namespace pvbess::svg
