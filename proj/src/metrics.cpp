#include "pvbess/metrics.hpp"

#include "pvbess/errors.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace pvbess::metrics {

FlowTotals flow_totals(const DispatchTrace& trace) {
    return FlowTotals{trace.total_import(), trace.total_export(), trace.initial_soc, trace.final_soc};
}

Metrics from_flows(const FlowTotals& f, const profiles::AnnualTotals& totals) {
    Metrics m;
    const double gen = totals.total_gen;
    const double load = totals.total_load;
    const double stored_delta = f.final_soc - f.initial_soc;

    m.sc = gen > 0.0 ? 1.0 - f.total_export / gen : 1.0;
    m.ss = load > 0.0 ? 1.0 - f.total_import / load : 1.0;
    if (gen <= 0.0) {
        m.rho = 0.0;
    } else if (m.sc > 0.0) {
        m.rho = m.ss / m.sc;
    } else {
        // Nothing self-consumed: the ratio diverges unless nothing was self-supplied either.
        m.rho = m.ss > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    m.sc_plus_ss = m.sc + m.ss;
    m.balance_residual = gen + f.total_import + f.initial_soc - load - f.total_export - f.final_soc;
    m.sc_soc_adjusted = gen > 0.0 ? m.sc - stored_delta / gen : 1.0;
    m.ss_soc_adjusted = load > 0.0 ? m.ss + stored_delta / load : 1.0;
    return m;
}

Metrics compute(const DispatchTrace& trace, const profiles::AnnualTotals& totals, const battery::BatteryConfig& cfg) {
    if (trace.size() != totals.slots)
        throw ArgumentError(fmt::format("trace has {} slots, profile has {}", trace.size(), totals.slots));
    if (trace.soc.size() != trace.size() || trace.import_.size() != trace.size() ||
        trace.export_.size() != trace.size())
        throw ArgumentError("trace arrays have mismatched lengths");
    if (trace.initial_soc < cfg.soc_min() || trace.initial_soc > cfg.soc_max())
        throw ArgumentError("trace initial SOC is outside the configured bounds");
    return from_flows(flow_totals(trace), totals);
}

double asymptotic_rho(const profiles::AnnualTotals& totals) {
    if (!(totals.total_load > 0.0)) throw ArgumentError("asymptotic rho needs positive total load");
    return totals.total_gen / totals.total_load;
}

double rho_relative_deviation_bound(const FlowTotals& f, const profiles::AnnualTotals& totals,
                                    const battery::BatteryConfig& cfg) {
    const double self_consumed = totals.total_gen - f.total_export;
    if (!(self_consumed > 0.0)) return std::numeric_limits<double>::infinity();
    return cfg.usable() / self_consumed;
}

}  // namespace pvbess::metrics
