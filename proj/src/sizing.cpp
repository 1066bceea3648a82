#include "pvbess/sizing.hpp"

#include "pvbess/errors.hpp"
#include "pvbess/lite_bess.hpp"
#include "pvbess/metrics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <thread>

namespace pvbess::sizing {

HouseholdType classify(double rho) {
    if (!std::isfinite(rho) || rho < 0.0) throw ArgumentError(fmt::format("cannot classify rho = {}", rho));
    if (rho < 0.4) return HouseholdType::Type1;
    if (rho < 0.7) return HouseholdType::Type2;
    if (rho < 1.0) return HouseholdType::Type3;
    return HouseholdType::Type4;
}

std::string_view to_string(HouseholdType t) {
    switch (t) {
        case HouseholdType::Type1: return "Type1";
        case HouseholdType::Type2: return "Type2";
        case HouseholdType::Type3: return "Type3";
        case HouseholdType::Type4: return "Type4";
    }
    return "?";
}

void validate(const CostModel& m) {
    if (!std::isfinite(m.c_batt) || !std::isfinite(m.c_gen) || m.c_batt < 0.0 || m.c_gen < 0.0)
        throw ArgumentError("cost model prices must be finite and >= 0");
    if (m.c_batt == 0.0 && m.c_gen == 0.0) throw ArgumentError("cost model prices cannot both be zero");
}

double cost(double capacity, double avg_gen_power, const CostModel& m) {
    return m.c_batt * capacity + m.c_gen * avg_gen_power;
}

std::vector<double> make_axis(double lo, double hi, double step) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(step > 0.0) || hi < lo)
        throw ArgumentError(fmt::format("bad axis {}:{}:{}", lo, hi, step));
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> axis(n);
    for (std::size_t i = 0; i < n; ++i) axis[i] = std::round((lo + static_cast<double>(i) * step) * 1e9) / 1e9;
    return axis;
}

unsigned worker_threads() {
    if (const char* env = std::getenv("PVBESS_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

SizingGrid sweep(const profiles::HouseholdProfile& p, std::vector<double> capacities, std::vector<double> factors,
                 const schedulers::SchedulerSpec& scheduler, const battery::BatteryConfig& base,
                 const CostModel& model) {
    if (capacities.empty() || factors.empty()) throw ArgumentError("sweep axes must be non-empty");
    for (double c : capacities)
        if (!std::isfinite(c) || c < 0.0) throw ArgumentError(fmt::format("bad capacity {}", c));
    for (double f : factors)
        if (!std::isfinite(f) || f <= 0.0) throw ArgumentError(fmt::format("bad factor {}", f));
    profiles::validate(p);
    schedulers::validate(scheduler);
    validate(model);

    SizingGrid grid;
    grid.capacities = std::move(capacities);
    grid.factors = std::move(factors);
    std::vector<profiles::HouseholdProfile> scaled;
    std::vector<profiles::AnnualTotals> totals;
    for (double f : grid.factors) {
        scaled.push_back(profiles::scale_generation(p, f));
        totals.push_back(profiles::annual_totals(scaled.back()));
        grid.avg_gen_power.push_back(totals.back().avg_gen_power);
    }
    const std::size_t n_cells = grid.capacities.size() * grid.factors.size();
    grid.cells.resize(n_cells);

    auto evaluate = [&](std::size_t index) {
        const std::size_t ci = index / grid.factors.size();
        const std::size_t fi = index % grid.factors.size();
        Cell& cell = grid.cells[index];
        battery::BatteryConfig cfg = base;
        cfg.capacity = grid.capacities[ci];
        cell.cost = cost(cfg.capacity, grid.avg_gen_power[fi], model);
        try {
            metrics::Metrics m;
            if (scheduler.kind == schedulers::Kind::Greedy) {
                m = lite_bess::analyze(scaled[fi], cfg);
            } else {
                const auto trace = schedulers::dispatch(scheduler, scaled[fi], cfg);
                m = metrics::compute(trace, totals[fi], cfg);
            }
            cell.sc = m.sc;
            cell.ss = m.ss;
            cell.rho = m.rho;
            cell.sc_plus_ss = m.sc_plus_ss;
            cell.valid = true;
        } catch (const std::exception& e) {
            cell.valid = false;
            cell.error = e.what();
        }
    };

    const unsigned threads = std::min<std::size_t>(worker_threads(), n_cells);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n_cells; ++i) evaluate(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n_cells; i = next++) evaluate(i);
            });
    }
    return grid;
}

OperatingPoint optimal_point(const SizingGrid& grid, const CostModel& m, double budget) {
    validate(m);
    const double tolerance = 1e-9 * std::max(1.0, std::abs(budget));
    std::optional<OperatingPoint> best;
    for (std::size_t ci = 0; ci < grid.capacities.size(); ++ci) {
        for (std::size_t fi = 0; fi < grid.factors.size(); ++fi) {
            const Cell& cell = grid.at(ci, fi);
            if (!cell.valid) continue;
            const double c = cost(grid.capacities[ci], grid.avg_gen_power[fi], m);
            if (c > budget + tolerance) continue;
            const OperatingPoint candidate{ci, fi, grid.capacities[ci], grid.factors[fi], cell.sc_plus_ss, cell.rho, c};
            // Row-major scan visits lower capacities first, then lower factors.
            if (!best || candidate.sc_plus_ss > best->sc_plus_ss ||
                (candidate.sc_plus_ss == best->sc_plus_ss && candidate.cost < best->cost))
                best = candidate;
        }
    }
    if (!best) throw InfeasibleError(fmt::format("no grid cell costs at most {}", budget));
    return *best;
}

double factor_for_target_rho(const profiles::AnnualTotals& totals, double rho_target) {
    if (!(totals.total_gen > 0.0)) throw ArgumentError("household has no generation to scale");
    if (!std::isfinite(rho_target) || rho_target <= 0.0) throw ArgumentError("target rho must be > 0");
    return rho_target * totals.total_load / totals.total_gen;
}

void write_grid_csv(std::ostream& out, const SizingGrid& grid) {
    out << "capacity,factor,sc,ss,rho,sc_plus_ss,cost\n";
    for (std::size_t ci = 0; ci < grid.capacities.size(); ++ci) {
        for (std::size_t fi = 0; fi < grid.factors.size(); ++fi) {
            const Cell& c = grid.at(ci, fi);
            if (c.valid)
                out << fmt::format("{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f}\n", grid.capacities[ci],
                                   grid.factors[fi], c.sc, c.ss, c.rho, c.sc_plus_ss, c.cost);
            else
                out << fmt::format("{:.6f},{:.6f},,,,,{:.6f}\n", grid.capacities[ci], grid.factors[fi], c.cost);
        }
    }
}

}  // namespace pvbess::sizing
