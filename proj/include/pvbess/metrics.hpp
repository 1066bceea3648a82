#pragma once

// Self-consumption, self-sufficiency and their ratio.

#include "pvbess/battery.hpp"
#include "pvbess/profiles.hpp"
#include "pvbess/trace.hpp"

namespace pvbess::metrics {

struct Metrics {
    double sc = 0.0;          // 1 - export/gen, 1 when there is no generation
    double ss = 0.0;          // 1 - import/load, 1 when there is no load
    double rho = 0.0;         // ss/sc, 0 when there is no generation
    double sc_plus_ss = 0.0;
    double balance_residual = 0.0;  // gen + import + soc_init - load - export - final_soc, kWh
    /// Diagnostics that account for the energy left in the battery: the net stored energy
    /// (final - initial SOC) is removed from self-consumed generation and credited to
    /// self-supplied demand. With lossless storage ss_soc_adjusted / sc equals gen/load.
    double sc_soc_adjusted = 0.0;
    double ss_soc_adjusted = 0.0;
};

/// Whole-run flow sums a scheduler produced.
struct FlowTotals {
    double total_import = 0.0;
    double total_export = 0.0;
    double initial_soc = 0.0;
    double final_soc = 0.0;
};

FlowTotals flow_totals(const DispatchTrace& trace);

/// Throws ArgumentError if the trace and totals cover different slot counts.
Metrics compute(const DispatchTrace& trace, const profiles::AnnualTotals& totals, const battery::BatteryConfig& cfg);

Metrics from_flows(const FlowTotals& flows, const profiles::AnnualTotals& totals);

/// total_gen / total_load. Throws ArgumentError when there is no load.
double asymptotic_rho(const profiles::AnnualTotals& totals);

/// Upper bound on |rho / asymptotic_rho - 1| for any lossless trace:
/// |final - initial SOC| <= usable capacity, divided by the self-consumed generation.
/// Infinite when nothing is self-consumed.
double rho_relative_deviation_bound(const FlowTotals& flows, const profiles::AnnualTotals& totals,
                                    const battery::BatteryConfig& cfg);

}  // namespace pvbess::metrics
