#pragma once

// Per-slot dispatch record shared by every scheduler, plus the invariant checker
// that every produced trace passes through.

#include "pvbess/battery.hpp"
#include "pvbess/profiles.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace pvbess {

struct DispatchTrace {
    std::vector<double> charge;     // kWh into the battery
    std::vector<double> discharge;  // kWh out of the battery
    std::vector<double> import_;    // kWh from the grid
    std::vector<double> export_;    // kWh to the grid
    std::vector<double> soc;        // stored energy at the end of each slot
    double initial_soc = 0.0;
    double final_soc = 0.0;

    std::size_t size() const noexcept { return charge.size(); }
    double total_import() const;
    double total_export() const;
    double total_charge() const;
    double total_discharge() const;
};

/// Records slots one at a time, deriving grid flows from the balance
/// load - gen + charge - discharge = import - export and advancing the battery.
class TraceBuilder {
public:
    TraceBuilder(const profiles::HouseholdProfile& p, const battery::BatteryConfig& cfg);

    std::size_t slot() const noexcept { return trace_.size(); }
    const battery::BatteryState& state() const noexcept { return state_; }
    /// gen - load of the current slot.
    double net() const;

    void step(double charge, double discharge);
    /// Validates and hands over the finished trace.
    DispatchTrace finish() &&;

private:
    const profiles::HouseholdProfile& profile_;
    battery::BatteryConfig cfg_;
    battery::BatteryState state_;
    DispatchTrace trace_;
};

/// Trace a no-storage household would produce: every imbalance goes to the grid.
DispatchTrace passthrough_trace(const profiles::HouseholdProfile& p, const battery::BatteryConfig& cfg);

/// Checks complementarity (exact), non-negativity (exact), SOC bounds (exact), the SOC
/// transition and per-slot grid balance (1e-9 relative) and whole-run energy balance
/// (1e-9 relative). Throws InvariantViolation.
void validate_trace(const DispatchTrace& t, const profiles::HouseholdProfile& p, const battery::BatteryConfig& cfg);

/// Number of traces that have passed validate_trace in this process.
std::uint64_t validated_trace_count() noexcept;

/// CSV with columns slot,gen,load,charge,discharge,import,export,soc.
void write_trace_csv(std::ostream& out, const DispatchTrace& t, const profiles::HouseholdProfile& p);

}  // namespace pvbess
