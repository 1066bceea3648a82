#include "pvbess/battery.hpp"

#include "pvbess/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace pvbess::battery {
namespace {

// Slack for amounts computed as differences of stored energies.
double slack(const BatteryConfig& cfg) { return 1e-12 * std::max(1.0, cfg.capacity); }

}  // namespace

void validate(const BatteryConfig& cfg) {
    if (!std::isfinite(cfg.capacity) || cfg.capacity < 0.0)
        throw ArgumentError(fmt::format("battery capacity must be finite and >= 0, got {}", cfg.capacity));
    if (!(0.0 <= cfg.soc_min_frac && cfg.soc_min_frac <= cfg.soc_init_frac && cfg.soc_init_frac <= cfg.soc_max_frac &&
          cfg.soc_max_frac <= 1.0))
        throw ArgumentError(fmt::format("need 0 <= soc_min ({}) <= soc_init ({}) <= soc_max ({}) <= 1",
                                        cfg.soc_min_frac, cfg.soc_init_frac, cfg.soc_max_frac));
    if (cfg.efficiency != 1.0)
        throw ArgumentError(fmt::format("round-trip efficiency {} not supported; storage is lossless", cfg.efficiency));
    if (!(cfg.max_rate > 0.0)) throw ArgumentError("max_rate must be > 0");
}

BatteryState initial_state(const BatteryConfig& cfg) { return BatteryState{cfg.soc_init()}; }

double headroom(const BatteryState& s, const BatteryConfig& cfg) { return std::max(0.0, cfg.soc_max() - s.stored); }

double available(const BatteryState& s, const BatteryConfig& cfg) { return std::max(0.0, s.stored - cfg.soc_min()); }

BatteryState apply(const BatteryState& s, const BatteryConfig& cfg, double charge, double discharge) {
    if (!(charge >= 0.0) || !(discharge >= 0.0))
        throw ContractViolation(fmt::format("negative or NaN transfer (charge {}, discharge {})", charge, discharge));
    if (charge > 0.0 && discharge > 0.0)
        throw ContractViolation(fmt::format("simultaneous charge {} and discharge {}", charge, discharge));
    if (charge > headroom(s, cfg) + slack(cfg))
        throw ContractViolation(fmt::format("charge {} exceeds headroom {}", charge, headroom(s, cfg)));
    if (discharge > available(s, cfg) + slack(cfg))
        throw ContractViolation(fmt::format("discharge {} exceeds available {}", discharge, available(s, cfg)));
    if (charge > cfg.max_rate + slack(cfg) || discharge > cfg.max_rate + slack(cfg))
        throw ContractViolation(fmt::format("transfer exceeds max rate {}", cfg.max_rate));
    const double next = std::clamp(s.stored + charge - discharge, cfg.soc_min(), cfg.soc_max());
    return BatteryState{next};
}

}  // namespace pvbess::battery
