// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
// `--dataset` runs the criteria that need the Ausgrid solar-home file named by
// PVBESS_AUSGRID_CSV and exits 77 (skipped) when it is not set.

#include "pvbess/battery.hpp"
#include "pvbess/lite_bess.hpp"
#include "pvbess/metrics.hpp"
#include "pvbess/profiles.hpp"
#include "pvbess/schedulers.hpp"
#include "pvbess/sizing.hpp"
#include "pvbess/synthetic.hpp"
#include "pvbess/trace.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace pvbess;
using battery::BatteryConfig;
using schedulers::Kind;
using schedulers::SchedulerSpec;
using Clock = std::chrono::steady_clock;

namespace {

constexpr int kSkipped = 77;
// Floating-point slack for comparisons that are exact in real arithmetic (values of order 1).
constexpr double kRoundoff = 1e-12;

const Kind kAllKinds[] = {Kind::Greedy, Kind::Random, Kind::DpOptimal, Kind::Mpc, Kind::QLearning};

int g_failures = 0;

void report(const char* id, const std::string& title, bool ok, const std::string& detail) {
    std::printf("%s %s %s: %s\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Independent re-check of every trace this binary receives: exact complementarity and
// whole-run balance recomputed from the raw series.
struct TraceAudit {
    std::uint64_t received = 0;
    std::uint64_t complementarity_breaks = 0;
    double worst_residual = 0.0;  // relative to max(gen, load)

    void check(const DispatchTrace& t, const profiles::HouseholdProfile& p) {
        ++received;
        double gen = 0.0, load = 0.0, imp = 0.0, exp = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (t.charge[i] != 0.0 && t.discharge[i] != 0.0) ++complementarity_breaks;
            if (t.import_[i] != 0.0 && t.export_[i] != 0.0) ++complementarity_breaks;
            gen += p.generation[i];
            load += p.load[i];
            imp += t.import_[i];
            exp += t.export_[i];
        }
        const double residual = gen + imp + t.initial_soc - load - exp - t.final_soc;
        worst_residual = std::max(worst_residual, std::abs(residual) / std::max({gen, load, 1.0}));
    }
};

TraceAudit g_audit;

DispatchTrace run_checked(const SchedulerSpec& spec, const profiles::HouseholdProfile& p, const BatteryConfig& cfg) {
    auto t = schedulers::dispatch(spec, p, cfg);
    g_audit.check(t, p);
    return t;
}

SchedulerSpec spec_for(Kind kind, std::uint64_t seed = 0) {
    SchedulerSpec s{kind};
    s.seed = seed;
    return s;
}

metrics::Metrics measure(const SchedulerSpec& spec, const profiles::HouseholdProfile& p, const BatteryConfig& cfg) {
    return metrics::compute(run_checked(spec, p, cfg), profiles::annual_totals(p), cfg);
}

bool same_trace(const DispatchTrace& a, const DispatchTrace& b) {
    return a.charge == b.charge && a.discharge == b.discharge && a.import_ == b.import_ && a.export_ == b.export_ &&
           a.soc == b.soc && a.final_soc == b.final_soc;
}

// Year-long synthetic households spanning the four household types.
std::vector<profiles::HouseholdProfile> type_fixtures() {
    std::vector<profiles::HouseholdProfile> out;
    const double ratios[] = {0.20, 0.54, 0.72, 1.25};
    for (int i = 0; i < 4; ++i)
        out.push_back(synthetic::household({.household_id = i + 1, .gen_to_load = ratios[i]}, 100 + i));
    return out;
}

std::vector<profiles::HouseholdProfile> ausgrid_fixture() {
    std::ifstream in(std::string(PVBESS_FIXTURE_DIR) + "/ausgrid_small.csv");
    return profiles::parse_ausgrid_csv(in);
}

// ---------------------------------------------------------------------------------------

void cross_table_arithmetic() {
    // factor, rho before scaling, rho reported after scaling
    struct Row {
        int household;
        double factor, rho, scaled_rho;
    };
    const Row rows[] = {{25, 4.05, 0.20, 0.81}, {93, 1.42, 0.54, 0.77}, {48, 0.95, 0.72, 0.69}, {75, 0.77, 1.25, 0.96}};
    double worst = 0.0;
    std::string detail;
    for (const auto& r : rows) {
        const double err = std::abs(r.factor * r.rho - r.scaled_rho);
        worst = std::max(worst, err);
        detail += fmt("#%d %.2fx%.2f=%.4f vs %.2f; ", r.household, r.factor, r.rho, r.factor * r.rho, r.scaled_rho);
    }
    // The rho = 1 factors satisfy the same identity.
    const Row unit[] = {{25, 4.99, 0.20, 1.0}, {93, 1.86, 0.54, 1.0}, {48, 1.38, 0.72, 1.0}, {75, 0.80, 1.25, 1.0}};
    for (const auto& r : unit) worst = std::max(worst, std::abs(r.factor * r.rho - r.scaled_rho));
    report("C3", "cross-table arithmetic", worst <= 0.01, detail + fmt("max |err| %.4f <= 0.01", worst));
}

void rho_invariance() {
    const auto start = Clock::now();
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    std::string worst_where = "none";
    int runs = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto p = synthetic::random_household(seed);
        const auto totals = profiles::annual_totals(p);
        const double asym = metrics::asymptotic_rho(totals);
        // Every fourth profile sits exactly on the 1% edge; the rest draw from (0, 1%].
        const double u = seed % 4 == 0 ? 1.0 : 1.0 - unit(rng);
        BatteryConfig cfg;
        cfg.capacity = 0.01 * totals.total_load * u / (cfg.soc_max_frac - cfg.soc_min_frac);
        while (cfg.usable() > 0.01 * totals.total_load) cfg.capacity = std::nextafter(cfg.capacity, 0.0);
        for (Kind k : kAllKinds) {
            const auto m = measure(spec_for(k, seed), p, cfg);
            const double dev = std::abs(m.rho / asym - 1.0);
            ++runs;
            if (dev > worst) {
                worst = dev;
                worst_where = fmt("profile %llu %s gen/load %.3f usable %.1f kWh", static_cast<unsigned long long>(seed),
                                  std::string(schedulers::to_string(k)).c_str(), asym, cfg.usable());
            }
        }
    }
    report("C4", "rho invariance (200 year profiles x 5 schedulers)", worst <= 0.02,
           fmt("%d runs, worst |rho/(gen/load) - 1| = %.5f <= 0.02 at %s (%.0f s)", runs, worst, worst_where.c_str(),
               seconds_since(start)));
}

void oracle_dominance() {
    const auto start = Clock::now();
    std::mt19937_64 rng(77);
    int dominance_breaks = 0, mpc_full_breaks = 0, mpc_one_breaks = 0;
    double worst_gap = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto p = synthetic::noise_instance(seed);
        const BatteryConfig cfg{std::uniform_real_distribution<double>(0.5, 15.0)(rng)};
        const auto totals = profiles::annual_totals(p);
        const auto dp_trace = run_checked(spec_for(Kind::DpOptimal), p, cfg);
        const double dp = metrics::compute(dp_trace, totals, cfg).sc_plus_ss;
        for (Kind k : {Kind::Greedy, Kind::Random, Kind::Mpc, Kind::QLearning}) {
            const double other = measure(spec_for(k, seed), p, cfg).sc_plus_ss;
            worst_gap = std::max(worst_gap, other - dp);
            if (other > dp + kRoundoff) ++dominance_breaks;
        }
        auto full = spec_for(Kind::Mpc);
        full.horizon = static_cast<int>(p.slots());
        if (!same_trace(run_checked(full, p, cfg), dp_trace)) ++mpc_full_breaks;
        auto one = spec_for(Kind::Mpc);
        one.horizon = 1;
        if (!same_trace(run_checked(one, p, cfg), run_checked(spec_for(Kind::Greedy), p, cfg))) ++mpc_one_breaks;
    }
    report("C6", "DP dominance and MPC limits (100 two-day instances)",
           dominance_breaks == 0 && mpc_full_breaks == 0 && mpc_one_breaks == 0,
           fmt("dominance breaks %d (max other-DP %.2e, tol 1e-12), mpc(h=n)!=DP %d, mpc(h=1)!=greedy %d (%.1f s)",
               dominance_breaks, worst_gap, mpc_full_breaks, mpc_one_breaks, seconds_since(start)));
}

void discretization_stability() {
    const auto start = Clock::now();
    std::vector<profiles::HouseholdProfile> instances = ausgrid_fixture();
    for (auto& p : type_fixtures()) instances.push_back(std::move(p));
    for (std::uint64_t seed = 0; seed < 20; ++seed) instances.push_back(synthetic::noise_instance(seed));
    double worst = 0.0;
    int cases = 0;
    for (const auto& p : instances) {
        const auto totals = profiles::annual_totals(p);
        for (double capacity : {2.0, 5.0, 10.0, 20.0, 40.0, 60.0}) {
            const BatteryConfig cfg{capacity};
            const auto coarse = metrics::compute(run_checked(spec_for(Kind::DpOptimal), p, cfg), totals, cfg);
            auto fine_spec = spec_for(Kind::DpOptimal);
            fine_spec.soc_grid_points = 201;
            const auto fine = metrics::compute(run_checked(fine_spec, p, cfg), totals, cfg);
            worst = std::max(worst, std::abs(fine.sc_plus_ss - coarse.sc_plus_ss));
            ++cases;
        }
    }
    report("C7", "DP grid 101 -> 201 points", worst < 1e-3,
           fmt("%d instance/capacity cases, max |delta SC+SS| = %.2e < 1e-3 (%.1f s)", cases, worst,
               seconds_since(start)));
}

void analyze_performance() {
    const auto p = synthetic::household({.household_id = 1}, 8);
    const BatteryConfig cfg{13.5};
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) {
        const auto start = Clock::now();
        const auto m = lite_bess::analyze(p, cfg);
        const double ms = seconds_since(start) * 1e3;
        if (!(m.sc >= 0.0)) worst = std::numeric_limits<double>::infinity();
        worst = std::max(worst, ms);
    }
    report("C8", "analyze on one household-year", p.slots() == 17520 && worst < 100.0,
           fmt("%zu slots, slowest of 5 runs %.2f ms < 100 ms", p.slots(), worst));
}

void classification_totality() {
    using sizing::HouseholdType;
    auto expected = [](double rho) {
        if (rho < 0.4) return HouseholdType::Type1;
        if (rho < 0.7) return HouseholdType::Type2;
        if (rho < 1.0) return HouseholdType::Type3;
        return HouseholdType::Type4;
    };
    int mismatches = 0, checked = 0;
    auto probe = [&](double rho) {
        ++checked;
        if (sizing::classify(rho) != expected(rho)) ++mismatches;
    };
    for (double b : {0.4, 0.7, 1.0}) {
        double below = b, above = b;
        probe(b);
        for (int i = 0; i < 64; ++i) {
            below = std::nextafter(below, 0.0);
            above = std::nextafter(above, 2.0);
            probe(below);
            probe(above);
        }
    }
    for (double rho : {0.0, std::numeric_limits<double>::denorm_min(), 1e-300, 1e300,
                       std::numeric_limits<double>::max()})
        probe(rho);
    for (int i = 0; i <= 300000; ++i) probe(i * 1e-5);
    int rejected = 0;
    for (double bad : {-1e-300, -1.0, std::numeric_limits<double>::infinity(), std::numeric_limits<double>::quiet_NaN()}) {
        try {
            sizing::classify(bad);
        } catch (const std::exception&) {
            ++rejected;
        }
    }
    report("C9", "classification totality", mismatches == 0 && rejected == 4,
           fmt("%d points checked, %d mismatches, %d/4 invalid inputs rejected", checked, mismatches, rejected));
}

void saturation() {
    const auto start = Clock::now();
    int decreases = 0, late_rises = 0, ladders = 0, without_knee = 0;
    double worst_drop = 0.0;
    std::string knees;
    for (const auto& p : type_fixtures()) {
        const auto totals = profiles::annual_totals(p);
        for (Kind k : {Kind::Greedy, Kind::DpOptimal}) {
            std::vector<double> value;
            for (int capacity = 0; capacity <= 60; ++capacity) {
                const BatteryConfig cfg{static_cast<double>(capacity)};
                value.push_back(metrics::compute(run_checked(spec_for(k), p, cfg), totals, cfg).sc_plus_ss);
            }
            ++ladders;
            int knee = -1;
            for (std::size_t c = 1; c < value.size(); ++c) {
                const double step = value[c] - value[c - 1];
                // Past saturation the flows agree exactly in real arithmetic; only summation order moves them.
                worst_drop = std::max(worst_drop, -step);
                if (step < -kRoundoff) ++decreases;
                if (knee < 0 && step < 1e-3) knee = static_cast<int>(c);
                else if (knee >= 0 && step >= 1e-3) ++late_rises;
            }
            if (knee < 0) ++without_knee;
            knees += fmt("#%d %s knee %d kWh; ", p.household_id, std::string(schedulers::to_string(k)).c_str(), knee);
        }
    }
    report("C10", "SC+SS saturation over 0..60 kWh",
           decreases == 0 && late_rises == 0 && without_knee == 0,
           knees + fmt("%d ladders, decreases beyond 1e-12 roundoff %d (largest step down %.2e), increments >= 1e-3/kWh past knee %d (%.1f s)", ladders,
                       decreases, worst_drop, late_rises, seconds_since(start)));
}

void conservation(std::uint64_t validated_before) {
    const std::uint64_t validated = validated_trace_count() - validated_before;
    const bool ok = g_audit.received > 0 && validated >= g_audit.received && g_audit.complementarity_breaks == 0 &&
                    g_audit.worst_residual <= 1e-9;
    report("C5", "conservation on every produced trace", ok,
           fmt("%llu traces received, %llu passed the library validator, complementarity breaks %llu, worst "
               "relative residual %.2e <= 1e-9",
               static_cast<unsigned long long>(g_audit.received), static_cast<unsigned long long>(validated),
               static_cast<unsigned long long>(g_audit.complementarity_breaks), g_audit.worst_residual));
}

// ---------------------------------------------------------------------------------------

struct Household {
    int id;
    double rho_lo, rho_hi;  // reported rho (a range where sources disagree)
    // Optimal operating point under the reference budget: PV factor, capacity and the rho it yields.
    double sized_factor, sized_capacity, sized_rho_lo, sized_rho_hi;
    double unit_factor;  // PV factor that brings rho to 1
};

const Household kHouseholds[] = {
    {25, 0.20, 0.20, 4.05, 51.5, 0.81, 0.81, 4.99},
    {93, 0.54, 0.54, 1.42, 50.1, 0.76, 0.77, 1.86},
    {48, 0.72, 0.72, 0.95, 49.7, 0.69, 0.69, 1.38},
    {75, 1.25, 1.26, 0.77, 53.2, 0.96, 0.97, 0.80},
};

double distance(double x, double lo, double hi) { return x < lo ? lo - x : x > hi ? x - hi : 0.0; }

int dataset_suite() {
    const char* path = std::getenv("PVBESS_AUSGRID_CSV");
    if (path == nullptr || *path == '\0') {
        std::printf("SKIP C1 rho reproduction on Ausgrid households: PVBESS_AUSGRID_CSV not set\n");
        std::printf("SKIP C2 increase-factor consistency on Ausgrid households: PVBESS_AUSGRID_CSV not set\n");
        return kSkipped;
    }
    std::ifstream in(path);
    if (!in) {
        report("C1", "rho reproduction", false, fmt("cannot open %s", path));
        return 1;
    }
    const auto all = profiles::parse_ausgrid_csv(in);
    std::vector<profiles::HouseholdProfile> year;
    for (const auto& h : kHouseholds) {
        const auto it = std::find_if(all.begin(), all.end(), [&](const auto& p) { return p.household_id == h.id; });
        if (it == all.end()) {
            report("C1", "rho reproduction", false, fmt("household %d missing from %s", h.id, path));
            return 1;
        }
        year.push_back(it->days.size() > 365 ? profiles::slice_days(*it, 0, 365) : *it);
    }

    double worst = 0.0, fast_seconds = 0.0, q_seconds = 0.0;
    std::string where = "none";
    for (std::size_t i = 0; i < year.size(); ++i) {
        for (double capacity : {0.0, 10.0, 20.0, 40.0, 60.0}) {
            const BatteryConfig cfg{capacity};
            for (Kind k : kAllKinds) {
                const auto start = Clock::now();
                const double rho = measure(spec_for(k), year[i], cfg).rho;
                (k == Kind::QLearning ? q_seconds : fast_seconds) += seconds_since(start);
                const double d = distance(rho, kHouseholds[i].rho_lo, kHouseholds[i].rho_hi);
                if (d > worst) {
                    worst = d;
                    where = fmt("#%d %s %.0f kWh rho %.3f", kHouseholds[i].id,
                                std::string(schedulers::to_string(k)).c_str(), capacity, rho);
                }
            }
        }
    }
    report("C1", "rho reproduction on Ausgrid households", worst <= 0.02 && fast_seconds < 300.0 && q_seconds < 1200.0,
           fmt("worst distance %.4f <= 0.02 at %s; random/greedy/DP/MPC %.1f s < 300 s, Q-learning %.1f s < 1200 s",
               worst, where.c_str(), fast_seconds, q_seconds));

    double worst_factor = 0.0, worst_rho = 0.0;
    std::string detail;
    for (std::size_t i = 0; i < year.size(); ++i) {
        const auto& h = kHouseholds[i];
        const double f = sizing::factor_for_target_rho(profiles::annual_totals(year[i]), 1.0);
        worst_factor = std::max(worst_factor, std::abs(f - h.unit_factor));
        const auto scaled = profiles::scale_generation(year[i], h.sized_factor);
        const BatteryConfig cfg{h.sized_capacity};
        for (Kind k : {Kind::Greedy, Kind::Mpc}) {
            const double rho = measure(spec_for(k), scaled, cfg).rho;
            worst_rho = std::max(worst_rho, distance(rho, h.sized_rho_lo, h.sized_rho_hi));
            if (k == Kind::Mpc) detail += fmt("#%d factor %.2f rho %.3f; ", h.id, f, rho);
        }
    }
    report("C2", "increase-factor consistency on Ausgrid households", worst_factor <= 0.03 && worst_rho <= 0.02,
           detail + fmt("worst factor error %.3f <= 0.03, worst rho distance %.4f <= 0.02", worst_factor, worst_rho));
    return g_failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1 && std::strcmp(argv[1], "--dataset") == 0) return dataset_suite();
    if (argc > 1) {
        std::fprintf(stderr, "usage: %s [--dataset]\n", argv[0]);
        return 2;
    }
    const std::uint64_t validated_before = validated_trace_count();
    const std::pair<const char*, std::function<void()>> criteria[] = {
        {"C3", cross_table_arithmetic}, {"C9", classification_totality}, {"C8", analyze_performance},
        {"C6", oracle_dominance},       {"C7", discretization_stability}, {"C10", saturation},
        {"C4", rho_invariance},
    };
    for (const auto& [id, body] : criteria) {
        try {
            body();
        } catch (const std::exception& e) {
            report(id, "aborted", false, e.what());
        }
    }
    conservation(validated_before);
    std::printf("%s: %d criteria failed\n", g_failures == 0 ? "ACCEPTED" : "REJECTED", g_failures);
    return g_failures == 0 ? 0 : 1;
}
