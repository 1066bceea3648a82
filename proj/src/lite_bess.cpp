#include "pvbess/lite_bess.hpp"

#include "pvbess/errors.hpp"

#include <algorithm>
#include <cmath>

namespace pvbess::lite_bess {

std::vector<Cycle> detect_cycles(const profiles::HouseholdProfile& p) {
    std::vector<Cycle> cycles;
    const std::size_t n = p.slots();
    if (n == 0) return cycles;
    cycles.push_back(Cycle{0, n, 0.0, 0.0});
    bool prev_surplus = false;
    for (std::size_t t = 0; t < n; ++t) {
        const double gen = p.generation[t];
        const double load = p.load[t];
        const bool surplus = gen > load;
        if (surplus && !prev_surplus && t > 0) {
            cycles.back().end_slot = t;
            cycles.push_back(Cycle{t, n, 0.0, 0.0});
        }
        if (surplus) cycles.back().surplus += gen - load;
        else if (load > gen) cycles.back().deficit += load - gen;
        prev_surplus = surplus;
    }
    return cycles;
}

DispatchTrace run(const profiles::HouseholdProfile& p, const battery::BatteryConfig& cfg) {
    battery::validate(cfg);
    TraceBuilder b(p, cfg);
    for (std::size_t t = 0; t < p.slots(); ++t) {
        const double net = b.net();
        if (net > 0.0) {
            b.step(std::min({net, battery::headroom(b.state(), cfg), cfg.max_rate}), 0.0);
        } else if (net < 0.0) {
            b.step(0.0, std::min({-net, battery::available(b.state(), cfg), cfg.max_rate}));
        } else {
            b.step(0.0, 0.0);
        }
    }
    return std::move(b).finish();
}

metrics::Metrics analyze(const profiles::HouseholdProfile& p, const battery::BatteryConfig& cfg) {
    battery::validate(cfg);
    const double lo = cfg.soc_min();
    const double hi = cfg.soc_max();
    metrics::FlowTotals flows;
    flows.initial_soc = cfg.soc_init();
    double stored = flows.initial_soc;
    profiles::AnnualTotals totals;
    totals.slots = p.slots();
    const std::size_t n = p.slots();
    const double* gen = p.generation.data();
    const double* load = p.load.data();
    // Same arithmetic as run(): battery::apply's clamp and TraceBuilder's grid balance.
    for (std::size_t t = 0; t < n; ++t) {
        totals.total_gen += gen[t];
        totals.total_load += load[t];
        const double net = gen[t] - load[t];
        double charge = 0.0, discharge = 0.0;
        if (net > 0.0) charge = std::min({net, std::max(0.0, hi - stored), cfg.max_rate});
        else if (net < 0.0) discharge = std::min({-net, std::max(0.0, stored - lo), cfg.max_rate});
        stored = std::clamp(stored + charge - discharge, lo, hi);
        const double grid = -net + charge - discharge;
        if (grid > 0.0) flows.total_import += grid;
        else if (grid < 0.0) flows.total_export += -grid;
    }
    flows.final_soc = stored;
    totals.avg_gen_power = n > 0 ? totals.total_gen / (static_cast<double>(n) * p.slot_hours()) : 0.0;
    return metrics::from_flows(flows, totals);
}

std::vector<CycleFlows> cycle_model(const profiles::HouseholdProfile& p, const battery::BatteryConfig& cfg) {
    battery::validate(cfg);
    if (std::isfinite(cfg.max_rate)) throw ArgumentError("cycle model assumes an unlimited charge rate");
    std::vector<CycleFlows> out;
    double soc = cfg.soc_init();
    for (const Cycle& c : detect_cycles(p)) {
        CycleFlows f;
        f.cycle = c;
        f.soc_start = soc;
        f.charging = std::min(cfg.soc_max() - soc, c.surplus);
        f.discharging = std::min(soc + f.charging - cfg.soc_min(), c.deficit);
        f.import_ = c.deficit - f.discharging;
        f.export_ = c.surplus - f.charging;
        soc = soc + f.charging - f.discharging;
        out.push_back(f);
    }
    return out;
}

std::vector<CycleFlows> aggregate_by_cycle(const DispatchTrace& trace, const std::vector<Cycle>& cycles) {
    std::vector<CycleFlows> out;
    out.reserve(cycles.size());
    for (const Cycle& c : cycles) {
        if (c.end_slot > trace.size() || c.start_slot >= c.end_slot)
            throw ArgumentError("cycle outside the trace range");
        CycleFlows f;
        f.cycle = c;
        f.soc_start = c.start_slot == 0 ? trace.initial_soc : trace.soc[c.start_slot - 1];
        for (std::size_t t = c.start_slot; t < c.end_slot; ++t) {
            f.charging += trace.charge[t];
            f.discharging += trace.discharge[t];
            f.import_ += trace.import_[t];
            f.export_ += trace.export_[t];
        }
        out.push_back(f);
    }
    return out;
}

}  // namespace pvbess::lite_bess
