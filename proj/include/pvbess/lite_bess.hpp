#pragma once

// Cycle-based greedy analyzer: charge first on surplus, discharge first on deficit.

#include "pvbess/battery.hpp"
#include "pvbess/metrics.hpp"
#include "pvbess/profiles.hpp"
#include "pvbess/trace.hpp"

#include <cstddef>
#include <vector>

namespace pvbess::lite_bess {

/// Slots [start_slot, end_slot). A cycle opens where generation starts strictly exceeding
/// load; slots before the first such onset form a deficit-only preamble cycle.
struct Cycle {
    std::size_t start_slot = 0;
    std::size_t end_slot = 0;
    double surplus = 0.0;  // sum of positive (gen - load)
    double deficit = 0.0;  // sum of positive (load - gen)
};

std::vector<Cycle> detect_cycles(const profiles::HouseholdProfile& p);

/// Per-slot greedy dispatch.
DispatchTrace run(const profiles::HouseholdProfile& p, const battery::BatteryConfig& cfg);

/// run + metrics::compute fused into one allocation-free pass.
metrics::Metrics analyze(const profiles::HouseholdProfile& p, const battery::BatteryConfig& cfg);

/// Energy moved during one cycle.
struct CycleFlows {
    Cycle cycle;
    double soc_start = 0.0;
    double charging = 0.0;
    double discharging = 0.0;
    double import_ = 0.0;
    double export_ = 0.0;
};

/// Cycle-aggregate form of the greedy policy: per cycle,
///   charging    = min(soc_max - soc_start, surplus)
///   discharging = min(soc_start + charging - soc_min, deficit)
///   import = deficit - discharging, export = surplus - charging.
/// Requires an unlimited charge rate (throws ArgumentError otherwise).
std::vector<CycleFlows> cycle_model(const profiles::HouseholdProfile& p, const battery::BatteryConfig& cfg);

/// Sums a per-slot trace over the given cycles.
std::vector<CycleFlows> aggregate_by_cycle(const DispatchTrace& trace, const std::vector<Cycle>& cycles);

}  // namespace pvbess::lite_bess
