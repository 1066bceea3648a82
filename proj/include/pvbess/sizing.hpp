#pragma once

// Capacity sizing: household classification by rho, the battery + PV cost model, the
// (battery capacity x PV scale) sweep and budget-constrained optimum selection.

#include "pvbess/battery.hpp"
#include "pvbess/profiles.hpp"
#include "pvbess/schedulers.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace pvbess::sizing {

enum class HouseholdType { Type1 = 1, Type2 = 2, Type3 = 3, Type4 = 4 };

/// Type1 [0, 0.4), Type2 [0.4, 0.7), Type3 [0.7, 1.0), Type4 [1.0, inf).
/// Throws ArgumentError for negative, NaN or infinite rho.
HouseholdType classify(double rho);
std::string_view to_string(HouseholdType t);

struct CostModel {
    double c_batt = 1.0;   // per kWh of battery capacity
    double c_gen = 100.0;  // per kW of average generation power
};

/// Throws ArgumentError for negative or non-finite prices, or both zero.
void validate(const CostModel& m);

/// c_batt * capacity + c_gen * avg_gen_power.
double cost(double capacity, double avg_gen_power, const CostModel& m);

struct Cell {
    double sc = 0.0;
    double ss = 0.0;
    double rho = 0.0;
    double sc_plus_ss = 0.0;
    double cost = 0.0;
    bool valid = false;
    std::string error;  // set when the scheduler failed for this cell
};

struct SizingGrid {
    std::vector<double> capacities;     // kWh
    std::vector<double> factors;        // generation scale factors
    std::vector<double> avg_gen_power;  // kW, per factor (post-scaling)
    std::vector<Cell> cells;            // row-major: capacity index, then factor index

    const Cell& at(std::size_t capacity_index, std::size_t factor_index) const {
        return cells[capacity_index * factors.size() + factor_index];
    }
};

/// Evenly spaced axis lo, lo + step, ..., hi (inclusive, within rounding).
std::vector<double> make_axis(double lo, double hi, double step);

inline std::vector<double> default_capacity_axis() { return make_axis(0.0, 60.0, 0.5); }
inline std::vector<double> default_factor_axis() { return make_axis(0.1, 6.0, 0.05); }

/// Number of worker threads: PVBESS_THREADS if set and positive, else hardware concurrency.
unsigned worker_threads();

/// Evaluates every (capacity, factor) cell: scale generation, dispatch with `scheduler`
/// (greedy uses the allocation-free analyzer), compute metrics and cost. `base` supplies the
/// SOC fractions; its capacity is replaced per cell. Cells are independent and computed in
/// parallel; a failing cell is marked invalid and the sweep continues.
SizingGrid sweep(const profiles::HouseholdProfile& p, std::vector<double> capacities, std::vector<double> factors,
                 const schedulers::SchedulerSpec& scheduler, const battery::BatteryConfig& base = {},
                 const CostModel& model = {});

struct OperatingPoint {
    std::size_t capacity_index = 0;
    std::size_t factor_index = 0;
    double capacity = 0.0;
    double factor = 0.0;
    double sc_plus_ss = 0.0;
    double rho = 0.0;
    double cost = 0.0;
};

/// Best SC + SS among valid cells whose cost under `m` is within `budget`; ties go to the
/// lower cost, then the lower capacity, then the lower factor. Throws InfeasibleError when
/// no cell fits.
OperatingPoint optimal_point(const SizingGrid& grid, const CostModel& m, double budget);

/// rho_target * total_load / total_gen. Throws ArgumentError without generation or for rho_target <= 0.
double factor_for_target_rho(const profiles::AnnualTotals& totals, double rho_target);

/// Long-form CSV: capacity,factor,sc,ss,rho,sc_plus_ss,cost (invalid cells have empty metrics).
void write_grid_csv(std::ostream& out, const SizingGrid& grid);

}  // namespace pvbess::sizing
