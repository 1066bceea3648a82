#include "pvbess/trace.hpp"

#include "pvbess/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <ostream>

namespace pvbess {
namespace {

std::atomic<std::uint64_t> g_validated{0};

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

[[noreturn]] void fail(std::size_t slot, const std::string& what) {
    throw InvariantViolation(fmt::format("trace slot {}: {}", slot, what));
}

}  // namespace

double DispatchTrace::total_import() const { return sum(import_); }
double DispatchTrace::total_export() const { return sum(export_); }
double DispatchTrace::total_charge() const { return sum(charge); }
double DispatchTrace::total_discharge() const { return sum(discharge); }

TraceBuilder::TraceBuilder(const profiles::HouseholdProfile& p, const battery::BatteryConfig& cfg)
    : profile_(p), cfg_(cfg), state_(battery::initial_state(cfg)) {
    const auto n = p.slots();
    trace_.charge.reserve(n);
    trace_.discharge.reserve(n);
    trace_.import_.reserve(n);
    trace_.export_.reserve(n);
    trace_.soc.reserve(n);
    trace_.initial_soc = state_.stored;
}

double TraceBuilder::net() const { return profile_.generation[slot()] - profile_.load[slot()]; }

void TraceBuilder::step(double charge, double discharge) {
    const double net_load = -net();
    state_ = battery::apply(state_, cfg_, charge, discharge);
    const double grid = net_load + charge - discharge;
    trace_.charge.push_back(charge);
    trace_.discharge.push_back(discharge);
    trace_.import_.push_back(grid > 0.0 ? grid : 0.0);
    trace_.export_.push_back(grid < 0.0 ? -grid : 0.0);
    trace_.soc.push_back(state_.stored);
}

DispatchTrace TraceBuilder::finish() && {
    if (trace_.size() != profile_.slots())
        throw InvariantViolation(fmt::format("trace has {} of {} slots", trace_.size(), profile_.slots()));
    trace_.final_soc = state_.stored;
    validate_trace(trace_, profile_, cfg_);
    return std::move(trace_);
}

DispatchTrace passthrough_trace(const profiles::HouseholdProfile& p, const battery::BatteryConfig& cfg) {
    TraceBuilder b(p, cfg);
    for (std::size_t t = 0; t < p.slots(); ++t) b.step(0.0, 0.0);
    return std::move(b).finish();
}

void validate_trace(const DispatchTrace& t, const profiles::HouseholdProfile& p, const battery::BatteryConfig& cfg) {
    const std::size_t n = p.slots();
    if (t.charge.size() != n || t.discharge.size() != n || t.import_.size() != n || t.export_.size() != n ||
        t.soc.size() != n)
        throw InvariantViolation(fmt::format("trace arrays do not all have {} slots", n));
    const double lo = cfg.soc_min();
    const double hi = cfg.soc_max();
    if (t.initial_soc < lo || t.initial_soc > hi) fail(0, "initial SOC outside bounds");
    double prev = t.initial_soc;
    for (std::size_t i = 0; i < n; ++i) {
        const double c = t.charge[i], d = t.discharge[i], im = t.import_[i], ex = t.export_[i];
        if (!(c >= 0.0 && d >= 0.0 && im >= 0.0 && ex >= 0.0)) fail(i, "negative or NaN flow");
        if (c * d != 0.0) fail(i, fmt::format("charge {} and discharge {} both non-zero", c, d));
        if (im * ex != 0.0) fail(i, fmt::format("import {} and export {} both non-zero", im, ex));
        if (t.soc[i] < lo || t.soc[i] > hi) fail(i, fmt::format("SOC {} outside [{}, {}]", t.soc[i], lo, hi));
        const double scale = std::max({1.0, p.generation[i] + p.load[i] + c + d, prev});
        if (std::abs(t.soc[i] - (prev + c - d)) > 1e-9 * scale) fail(i, "SOC transition broken");
        const double lhs = p.load[i] - p.generation[i] + c - d;
        if (std::abs(lhs - (im - ex)) > 1e-9 * scale) fail(i, "grid balance broken");
        prev = t.soc[i];
    }
    if (n > 0 && t.final_soc != t.soc.back()) fail(n - 1, "final SOC differs from last slot SOC");

    double gen = 0.0, load = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        gen += p.generation[i];
        load += p.load[i];
    }
    const double residual = gen + t.total_import() + t.initial_soc - load - t.total_export() - t.final_soc;
    if (std::abs(residual) > 1e-9 * std::max({gen, load, 1.0}))
        throw InvariantViolation(fmt::format("energy balance residual {} kWh", residual));
    g_validated.fetch_add(1, std::memory_order_relaxed);
}

std::uint64_t validated_trace_count() noexcept { return g_validated.load(std::memory_order_relaxed); }

void write_trace_csv(std::ostream& out, const DispatchTrace& t, const profiles::HouseholdProfile& p) {
    out << "slot,gen,load,charge,discharge,import,export,soc\n";
    for (std::size_t i = 0; i < t.size(); ++i)
        out << fmt::format("{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f}\n", i, p.generation[i], p.load[i],
                           t.charge[i], t.discharge[i], t.import_[i], t.export_[i], t.soc[i]);
}

}  // namespace pvbess
