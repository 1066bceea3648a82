#pragma once

// Building blocks of the SOC dynamic program shared by the offline oracle and MPC.
//
// Cost of one slot with net generation n (gen - load) and SOC change d is
//     import_weight * max(d - n, 0) + export_weight * max(n - d, 0),
// i.e. the weighted grid exchange; summed over a run and with weights 1/total_load and
// 1/total_gen this is 2 - (SC + SS). Cost-to-go is tabulated on an evenly spaced SOC grid
// and linearly interpolated between grid points. Moves may end on any grid point or on the
// exact "absorb the imbalance" point clamp(n, lowest move, highest move), which is where
// the stage cost kinks; with a piecewise-linear cost-to-go the minimum over the whole
// continuous interval is attained at one of these candidates.

#include <cstddef>
#include <span>
#include <vector>

namespace pvbess::schedulers::dp {

struct SocGrid {
    double lo = 0.0;
    double hi = 0.0;
    int points = 2;

    double step() const noexcept { return (hi - lo) / (points - 1); }
    /// Grid point j; the last point is exactly `hi`.
    double at(int j) const noexcept { return j == points - 1 ? hi : lo + j * step(); }
};

struct Weights {
    double import_weight = 0.0;
    double export_weight = 0.0;
};

double stage_cost(double net, double delta, const Weights& w) noexcept;

/// Linear interpolation of grid values at `soc` (clamped into the grid range).
double interpolate(const SocGrid& grid, std::span<const double> values, double soc) noexcept;

struct Move {
    double delta = 0.0;  // SOC change; > 0 charges, < 0 discharges
    double cost = 0.0;   // stage cost + interpolated cost-to-go
};

/// Cheapest move from `soc`, lowest resulting SOC among equal costs. `next_values` is the
/// cost-to-go on the grid after this slot. The search walks outward from the kink and
/// relies on the objective being convex along the candidate list, which holds whenever
/// `next_values` is convex (true for every table this module builds).
Move best_move(const SocGrid& grid, std::span<const double> next_values, double soc, double net, const Weights& w,
               double max_rate) noexcept;

/// One Bellman backup: cost-to-go at every grid point before a slot with net `net`.
/// Same minimum as best_move at each grid point, in O(points) for the whole table.
void backup(const SocGrid& grid, std::span<const double> next_values, double net, const Weights& w,
            double max_rate, std::span<double> out) noexcept;

}  // namespace pvbess::schedulers::dp
