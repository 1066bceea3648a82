#pragma once

// Minimal SVG figures: sizing heatmap and capacity line charts.

#include "pvbess/sizing.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pvbess::svg {

/// SC+SS heatmap over (battery capacity, average generation power) with an optional
/// iso-cost line at `budget` and a cross at the optimum.
std::string heatmap(const sizing::SizingGrid& grid, const sizing::CostModel& model, std::optional<double> budget,
                    std::optional<sizing::OperatingPoint> optimum, const std::string& title);

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

std::string line_chart(const std::vector<Series>& series, const std::string& title, const std::string& x_label,
                       const std::string& y_label);

}  // namespace pvbess::svg
