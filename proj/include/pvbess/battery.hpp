#pragma once

// Lossless battery state machine with state-of-charge bounds.

#include <limits>

namespace pvbess::battery {

struct BatteryConfig {
    double capacity = 0.0;       // kWh, nominal size
    double soc_min_frac = 0.10;
    double soc_max_frac = 0.95;
    double soc_init_frac = 0.10;
    /// Round-trip efficiency. Only the lossless value 1.0 is currently modelled.
    double efficiency = 1.0;
    /// Per-slot charge/discharge energy limit, kWh.
    double max_rate = std::numeric_limits<double>::infinity();

    double soc_min() const noexcept { return soc_min_frac * capacity; }
    double soc_max() const noexcept { return soc_max_frac * capacity; }
    double soc_init() const noexcept { return soc_init_frac * capacity; }
    /// Energy between the SOC bounds.
    double usable() const noexcept { return soc_max() - soc_min(); }
};

/// Config with all fractions chosen so that the whole capacity is usable and the battery starts empty.
inline BatteryConfig full_range(double capacity) { return BatteryConfig{capacity, 0.0, 1.0, 0.0}; }

/// Throws ArgumentError if fractions are out of order, capacity is negative, or efficiency is not 1.
void validate(const BatteryConfig& cfg);

struct BatteryState {
    double stored = 0.0;  // kWh
};

BatteryState initial_state(const BatteryConfig& cfg);

/// Room left before the upper SOC bound.
double headroom(const BatteryState& s, const BatteryConfig& cfg);

/// Energy above the lower SOC bound.
double available(const BatteryState& s, const BatteryConfig& cfg);

/// stored' = stored + charge - discharge. Throws ContractViolation on simultaneous
/// charge and discharge, negative amounts, or amounts beyond headroom/available/max_rate.
/// The result is clamped to the SOC bounds so they hold exactly.
BatteryState apply(const BatteryState& s, const BatteryConfig& cfg, double charge, double discharge);

}  // namespace pvbess::battery
