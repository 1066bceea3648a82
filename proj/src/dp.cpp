#include "pvbess/dp.hpp"

#include <algorithm>
#include <cmath>

namespace pvbess::schedulers::dp {

double stage_cost(double net, double delta, const Weights& w) noexcept {
    const double grid = -net + delta;
    return grid > 0.0 ? w.import_weight * grid : w.export_weight * -grid;
}

double interpolate(const SocGrid& grid, std::span<const double> values, double soc) noexcept {
    if (soc <= grid.lo) return values.front();
    if (soc >= grid.hi) return values.back();
    const double pos = (soc - grid.lo) / grid.step();
    const int j = std::min(static_cast<int>(pos), grid.points - 2);
    const double frac = pos - j;
    const auto k = static_cast<std::size_t>(j);
    return values[k] + frac * (values[k + 1] - values[k]);
}

Move best_move(const SocGrid& grid, std::span<const double> next_values, double soc, double net, const Weights& w,
               double max_rate) noexcept {
    const double hi_d = std::min(std::max(0.0, grid.hi - soc), max_rate);
    const double lo_d = -std::min(std::max(0.0, soc - grid.lo), max_rate);
    const double kink = std::clamp(net, lo_d, hi_d);
    const double target = soc + kink;

    Move best{kink, stage_cost(net, kink, w) + interpolate(grid, next_values, target)};

    // First grid index strictly above the kink point.
    int up = std::clamp(static_cast<int>(std::floor((target - grid.lo) / grid.step())) + 1, 0, grid.points);
    while (up > 0 && grid.at(up - 1) > target) --up;
    while (up < grid.points && grid.at(up) <= target) ++up;

    bool improved = false;
    bool reached_end = true;
    for (int j = up; j < grid.points; ++j) {
        const double d = grid.at(j) - soc;
        if (d <= kink) continue;  // rounding can put the kink point just below a grid point
        if (d >= hi_d) break;
        const double c = stage_cost(net, d, w) + next_values[static_cast<std::size_t>(j)];
        if (!(c < best.cost)) {
            reached_end = false;
            break;
        }
        best = Move{d, c};
        improved = true;
    }
    if (reached_end && hi_d > best.delta) {
        const double c = stage_cost(net, hi_d, w) + interpolate(grid, next_values, soc + hi_d);
        if (c < best.cost) {
            best = Move{hi_d, c};
            improved = true;
        }
    }
    if (improved) return best;

    reached_end = true;
    for (int j = up - 1; j >= 0; --j) {
        const double d = grid.at(j) - soc;
        if (d >= kink) continue;  // the kink itself sits on this grid point
        if (d <= lo_d) break;
        const double c = stage_cost(net, d, w) + next_values[static_cast<std::size_t>(j)];
        if (!(c <= best.cost)) {
            reached_end = false;
            break;
        }
        best = Move{d, c};
    }
    if (reached_end && lo_d < best.delta) {
        const double c = stage_cost(net, lo_d, w) + interpolate(grid, next_values, soc + lo_d);
        if (c <= best.cost) best = Move{lo_d, c};
    }
    return best;
}

void backup(const SocGrid& grid, std::span<const double> next_values, double net, const Weights& w,
            double max_rate, std::span<double> out) noexcept {
    // The cost-to-go is convex, so the unconstrained best target is the kink clamped between
    // the points where its slope crosses -import_weight (below) and export_weight (above).
    const double step = grid.step();
    const int last = grid.points - 1;
    auto point = [&](int k) { return k == last ? grid.hi : grid.lo + k * step; };
    int below = 0, above = 0;
    double best_below = next_values[0] + w.import_weight * point(0);
    double best_above = next_values[0] - w.export_weight * point(0);
    for (int k = 1; k < grid.points; ++k) {
        const double v = next_values[static_cast<std::size_t>(k)];
        const double s = point(k);
        if (const double c = v + w.import_weight * s; c < best_below) {
            best_below = c;
            below = k;
        }
        if (const double c = v - w.export_weight * s; c < best_above) {
            best_above = c;
            above = k;
        }
    }
    const double floor_target = point(below);
    const double ceil_target = point(above);
    const double inv_step = 1.0 / step;
    for (int j = 0; j <= last; ++j) {
        const double soc = point(j);
        const double target = std::clamp(std::clamp(soc + net, floor_target, ceil_target),
                                         std::max(grid.lo, soc - max_rate), std::min(grid.hi, soc + max_rate));
        const double pos = std::clamp((target - grid.lo) * inv_step, 0.0, static_cast<double>(last));
        const int k = std::min(static_cast<int>(pos), last - 1);
        const auto uk = static_cast<std::size_t>(k);
        const double value = next_values[uk] + (pos - k) * (next_values[uk + 1] - next_values[uk]);
        out[static_cast<std::size_t>(j)] = stage_cost(net, target - soc, w) + value;
    }
}

}  // namespace pvbess::schedulers::dp
