#include "pvbess/schedulers.hpp"

#include "pvbess/diagnostics.hpp"
#include "pvbess/dp.hpp"
#include "pvbess/errors.hpp"
#include "pvbess/lite_bess.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

namespace pvbess::schedulers {
namespace {

struct Setup {
    dp::SocGrid grid;
    dp::Weights weights;
    bool degenerate = false;  // no storage, or weights undefined
};

Setup make_setup(const profiles::HouseholdProfile& p, const battery::BatteryConfig& cfg, int points,
                 std::string_view who) {
    Setup s;
    s.grid = dp::SocGrid{cfg.soc_min(), cfg.soc_max(), points};
    const auto totals = profiles::annual_totals(p);
    if (!(cfg.usable() > 0.0)) {
        s.degenerate = true;
    } else if (!(totals.total_gen > 0.0) || !(totals.total_load > 0.0)) {
        warn(fmt::format("{}: household {} has zero total generation or load; using greedy dispatch", who,
                         p.household_id));
        s.degenerate = true;
    } else {
        s.weights = dp::Weights{1.0 / totals.total_load, 1.0 / totals.total_gen};
    }
    return s;
}

void step_delta(TraceBuilder& b, double delta) {
    if (delta > 0.0) b.step(delta, 0.0);
    else if (delta < 0.0) b.step(0.0, -delta);
    else b.step(0.0, 0.0);
}

std::vector<double> net_series(const profiles::HouseholdProfile& p) {
    std::vector<double> net(p.slots());
    for (std::size_t t = 0; t < net.size(); ++t) net[t] = p.generation[t] - p.load[t];
    return net;
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

enum Action : int { kChargeMax = 0, kDischargeMax = 1, kIdle = 2 };
constexpr int kActions = 3;

/// Charge/discharge amounts of a direction-constrained action.
std::pair<double, double> action_flows(int action, double net, double stored, const battery::BatteryConfig& cfg) {
    if (action == kChargeMax && net > 0.0)
        return {std::min({net, std::max(0.0, cfg.soc_max() - stored), cfg.max_rate}), 0.0};
    if (action == kDischargeMax && net < 0.0)
        return {0.0, std::min({-net, std::max(0.0, stored - cfg.soc_min()), cfg.max_rate})};
    return {0.0, 0.0};
}

}  // namespace

std::optional<Kind> parse_kind(std::string_view name) {
    if (name == "greedy" || name == "lite_bess") return Kind::Greedy;
    if (name == "random") return Kind::Random;
    if (name == "dp_optimal" || name == "dp") return Kind::DpOptimal;
    if (name == "mpc") return Kind::Mpc;
    if (name == "q_learning" || name == "q") return Kind::QLearning;
    return std::nullopt;
}

std::string_view to_string(Kind kind) {
    switch (kind) {
        case Kind::Greedy: return "greedy";
        case Kind::Random: return "random";
        case Kind::DpOptimal: return "dp_optimal";
        case Kind::Mpc: return "mpc";
        case Kind::QLearning: return "q_learning";
    }
    return "?";
}

void validate(const SchedulerSpec& spec) {
    if (spec.horizon < 1) throw ArgumentError(fmt::format("horizon must be >= 1, got {}", spec.horizon));
    if (spec.soc_grid_points < 2)
        throw ArgumentError(fmt::format("soc_grid_points must be >= 2, got {}", spec.soc_grid_points));
    const auto& q = spec.q;
    if (q.episodes < 1) throw ArgumentError("q-learning needs at least one episode");
    if (!(q.learning_rate > 0.0 && q.learning_rate <= 1.0)) throw ArgumentError("learning_rate must be in (0, 1]");
    if (!(q.epsilon >= 0.0 && q.epsilon <= 1.0)) throw ArgumentError("epsilon must be in [0, 1]");
    if (!(q.discount >= 0.0 && q.discount <= 1.0)) throw ArgumentError("discount must be in [0, 1]");
}

SchedulerSpec spec_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ArgumentError("scheduler config must be a JSON object");
    SchedulerSpec spec;
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "kind") {
                auto kind = parse_kind(value.get<std::string>());
                if (!kind) throw ArgumentError("unknown scheduler kind '" + value.get<std::string>() + "'");
                spec.kind = *kind;
            } else if (key == "horizon") {
                spec.horizon = value.get<int>();
            } else if (key == "soc_grid_points") {
                spec.soc_grid_points = value.get<int>();
            } else if (key == "seed") {
                spec.seed = value.get<std::uint64_t>();
            } else if (key == "forecast") {
                const auto name = value.get<std::string>();
                if (name == "perfect") spec.forecast = Forecast::Perfect;
                else if (name == "persistence") spec.forecast = Forecast::Persistence;
                else throw ArgumentError("unknown forecast '" + name + "'");
            } else if (key == "episodes") {
                spec.q.episodes = value.get<int>();
            } else if (key == "learning_rate") {
                spec.q.learning_rate = value.get<double>();
            } else if (key == "epsilon") {
                spec.q.epsilon = value.get<double>();
            } else if (key == "discount") {
                spec.q.discount = value.get<double>();
            } else {
                throw ArgumentError("unknown scheduler config key '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ArgumentError(std::string("bad scheduler config: ") + e.what());
    }
    validate(spec);
    return spec;
}

nlohmann::json to_json(const SchedulerSpec& spec) {
    nlohmann::ordered_json j;
    j["kind"] = std::string(to_string(spec.kind));
    j["horizon"] = spec.horizon;
    j["soc_grid_points"] = spec.soc_grid_points;
    j["seed"] = spec.seed;
    j["forecast"] = spec.forecast == Forecast::Perfect ? "perfect" : "persistence";
    j["episodes"] = spec.q.episodes;
    j["learning_rate"] = spec.q.learning_rate;
    j["epsilon"] = spec.q.epsilon;
    j["discount"] = spec.q.discount;
    return j;
}

DispatchTrace greedy(const profiles::HouseholdProfile& p, const battery::BatteryConfig& cfg) {
    return lite_bess::run(p, cfg);
}

DispatchTrace dp_optimal(const profiles::HouseholdProfile& p, const battery::BatteryConfig& cfg, int soc_grid_points) {
    battery::validate(cfg);
    if (soc_grid_points < 2) throw ArgumentError("soc_grid_points must be >= 2");
    const Setup s = make_setup(p, cfg, soc_grid_points, "dp_optimal");
    if (s.degenerate) return greedy(p, cfg);

    const std::size_t n = p.slots();
    const auto points = static_cast<std::size_t>(soc_grid_points);
    const auto net = net_series(p);
    // values[t] is the cost-to-go from the start of slot t; values[n] is zero.
    std::vector<double> values((n + 1) * points, 0.0);
    for (std::size_t t = n; t-- > 0;) {
        std::span<const double> next(values.data() + (t + 1) * points, points);
        std::span<double> here(values.data() + t * points, points);
        dp::backup(s.grid, next, net[t], s.weights, cfg.max_rate, here);
    }

    TraceBuilder b(p, cfg);
    for (std::size_t t = 0; t < n; ++t) {
        std::span<const double> next(values.data() + (t + 1) * points, points);
        step_delta(b, dp::best_move(s.grid, next, b.state().stored, net[t], s.weights, cfg.max_rate).delta);
    }
    return std::move(b).finish();
}

DispatchTrace mpc(const profiles::HouseholdProfile& p, const battery::BatteryConfig& cfg, int horizon,
                  int soc_grid_points, Forecast forecast) {
    battery::validate(cfg);
    if (horizon < 1) throw ArgumentError("horizon must be >= 1");
    if (soc_grid_points < 2) throw ArgumentError("soc_grid_points must be >= 2");
    const Setup s = make_setup(p, cfg, soc_grid_points, "mpc");
    if (s.degenerate) return greedy(p, cfg);

    const std::size_t n = p.slots();
    const auto points = static_cast<std::size_t>(soc_grid_points);
    const auto per_day = static_cast<std::size_t>(p.slots_per_day());
    const auto net = net_series(p);
    std::vector<double> next(points), scratch(points);

    auto forecast_net = [&](std::size_t now, std::size_t u) -> double {
        if (forecast == Forecast::Perfect || u == now) return net[u];
        const std::size_t lag_days = (u - now + per_day - 1) / per_day;
        const std::size_t lag = lag_days * per_day;
        return u >= lag ? net[u - lag] : 0.0;
    };

    TraceBuilder b(p, cfg);
    for (std::size_t t = 0; t < n; ++t) {
        const std::size_t end = std::min(n, t + static_cast<std::size_t>(horizon));
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t u = end; u-- > t + 1;) {
            dp::backup(s.grid, next, forecast_net(t, u), s.weights, cfg.max_rate, scratch);
            next.swap(scratch);
        }
        step_delta(b, dp::best_move(s.grid, next, b.state().stored, net[t], s.weights, cfg.max_rate).delta);
    }
    return std::move(b).finish();
}

DispatchTrace q_learning(const profiles::HouseholdProfile& p, const battery::BatteryConfig& cfg,
                         const SchedulerSpec& spec) {
    battery::validate(cfg);
    validate(spec);
    const auto totals = profiles::annual_totals(p);
    const double w_import = totals.total_load > 0.0 ? 1.0 / totals.total_load : 0.0;
    const double w_export = totals.total_gen > 0.0 ? 1.0 / totals.total_gen : 0.0;
    const std::size_t n = p.slots();
    const auto per_day = static_cast<std::size_t>(p.slots_per_day());
    constexpr std::size_t kSocBuckets = 10;
    constexpr std::size_t kSigns = 3;
    const double usable = cfg.usable();

    auto state_index = [&](std::size_t t, double stored) {
        std::size_t bucket = 0;
        if (usable > 0.0)
            bucket = std::min(kSocBuckets - 1,
                              static_cast<std::size_t>(std::max(0.0, (stored - cfg.soc_min()) / usable) * kSocBuckets));
        const double net = p.generation[t] - p.load[t];
        const std::size_t sign = net < 0.0 ? 0 : (net > 0.0 ? 2 : 1);
        return ((t % per_day) * kSocBuckets + bucket) * kSigns + sign;
    };
    // Ties, including never-visited states, go to the action greedy would take.
    auto greedy_action = [](const double* q, double net) {
        int best = net < 0.0 ? kDischargeMax : kChargeMax;
        for (int a = 0; a < kActions; ++a)
            if (q[a] > q[best]) best = a;
        return best;
    };

    std::vector<double> table(per_day * kSocBuckets * kSigns * kActions, 0.0);
    std::mt19937_64 rng(spec.seed);
    const auto& hp = spec.q;
    for (int episode = 0; episode < hp.episodes; ++episode) {
        double stored = cfg.soc_init();
        std::size_t state = state_index(0, stored);
        for (std::size_t t = 0; t < n; ++t) {
            double* q = &table[state * kActions];
            const double net = p.generation[t] - p.load[t];
            const int action =
                uniform01(rng) < hp.epsilon ? static_cast<int>(rng() % kActions) : greedy_action(q, net);
            const auto [charge, discharge] = action_flows(action, net, stored, cfg);
            stored = std::clamp(stored + charge - discharge, cfg.soc_min(), cfg.soc_max());
            const double grid = -net + charge - discharge;
            const double reward = grid > 0.0 ? -w_import * grid : w_export * grid;
            double target = reward;
            if (t + 1 < n) {
                const std::size_t next_state = state_index(t + 1, stored);
                const double* qn = &table[next_state * kActions];
                target += hp.discount * *std::max_element(qn, qn + kActions);
                state = next_state;
            }
            q[action] += hp.learning_rate * (target - q[action]);
        }
    }

    TraceBuilder b(p, cfg);
    for (std::size_t t = 0; t < n; ++t) {
        const int action = greedy_action(&table[state_index(t, b.state().stored) * kActions], b.net());
        const auto [charge, discharge] = action_flows(action, b.net(), b.state().stored, cfg);
        b.step(charge, discharge);
    }
    return std::move(b).finish();
}

DispatchTrace random_policy(const profiles::HouseholdProfile& p, const battery::BatteryConfig& cfg,
                            std::uint64_t seed) {
    battery::validate(cfg);
    std::mt19937_64 rng(seed);
    TraceBuilder b(p, cfg);
    for (std::size_t t = 0; t < p.slots(); ++t) {
        const double net = b.net();
        const double stored = b.state().stored;
        std::array<int, kActions> feasible{kIdle};
        std::size_t count = 1;
        if (net > 0.0 && action_flows(kChargeMax, net, stored, cfg).first > 0.0) feasible[count++] = kChargeMax;
        if (net < 0.0 && action_flows(kDischargeMax, net, stored, cfg).second > 0.0) feasible[count++] = kDischargeMax;
        const int action = feasible[rng() % count];
        const auto [charge, discharge] = action_flows(action, net, stored, cfg);
        b.step(charge, discharge);
    }
    return std::move(b).finish();
}

DispatchTrace dispatch(const SchedulerSpec& spec, const profiles::HouseholdProfile& p,
                       const battery::BatteryConfig& cfg) {
    validate(spec);
    battery::validate(cfg);
    profiles::validate(p);
    switch (spec.kind) {
        case Kind::Greedy: return greedy(p, cfg);
        case Kind::Random: return random_policy(p, cfg, spec.seed);
        case Kind::DpOptimal: return dp_optimal(p, cfg, spec.soc_grid_points);
        case Kind::Mpc: return mpc(p, cfg, spec.horizon, spec.soc_grid_points, spec.forecast);
        case Kind::QLearning: return q_learning(p, cfg, spec);
    }
    throw ArgumentError("unknown scheduler kind");
}

}  // namespace pvbess::schedulers
