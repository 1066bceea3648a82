#pragma once

// Dispatch policies behind one contract. Every policy returns a trace that has passed
// validate_trace.

#include "pvbess/battery.hpp"
#include "pvbess/profiles.hpp"
#include "pvbess/trace.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string_view>

namespace pvbess::schedulers {

enum class Kind { Greedy, Random, DpOptimal, Mpc, QLearning };

std::optional<Kind> parse_kind(std::string_view name);
std::string_view to_string(Kind kind);

/// Where MPC gets the net load of future slots inside its horizon.
enum class Forecast {
    Perfect,      // recorded values
    Persistence,  // same slot of the most recent day already observed
};

struct QLearningParams {
    int episodes = 20;
    double learning_rate = 0.1;
    double epsilon = 0.1;
    double discount = 0.99;
};

struct SchedulerSpec {
    Kind kind = Kind::Greedy;
    int horizon = 48;           // MPC only, slots
    int soc_grid_points = 101;  // DP and MPC
    std::uint64_t seed = 0;     // random and Q-learning
    Forecast forecast = Forecast::Perfect;
    QLearningParams q;
};

/// Throws ArgumentError for horizon < 1, soc_grid_points < 2 or bad Q-learning parameters.
void validate(const SchedulerSpec& spec);

/// Keys: kind, horizon, soc_grid_points, seed, forecast, episodes, learning_rate, epsilon, discount.
/// Missing keys keep their defaults; unknown keys are rejected.
SchedulerSpec spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SchedulerSpec& spec);

/// Runs the policy selected by `spec`. Throws ArgumentError for an infeasible battery config.
DispatchTrace dispatch(const SchedulerSpec& spec, const profiles::HouseholdProfile& p, const battery::BatteryConfig& cfg);

DispatchTrace greedy(const profiles::HouseholdProfile& p, const battery::BatteryConfig& cfg);

/// Offline optimum of SC + SS over the SOC grid with full knowledge of the series.
/// Falls back to greedy (with a warning) when total generation or load is zero.
DispatchTrace dp_optimal(const profiles::HouseholdProfile& p, const battery::BatteryConfig& cfg, int soc_grid_points);

/// Receding horizon: at each slot solve the DP over the next `horizon` slots, apply the
/// first move. Cost weights use the profile's whole-series totals, so a horizon covering the
/// whole series reproduces dp_optimal exactly and horizon 1 reproduces greedy.
DispatchTrace mpc(const profiles::HouseholdProfile& p, const battery::BatteryConfig& cfg, int horizon,
                  int soc_grid_points, Forecast forecast = Forecast::Perfect);

/// Tabular Q-learning over (slot of day, SOC decile, sign of net generation) with actions
/// charge-max / discharge-max / idle, trained epsilon-greedily on the series itself and then
/// replayed greedily. Ties between action values, as in states never visited during
/// training, resolve to the greedy choice for the sign of net generation.
DispatchTrace q_learning(const profiles::HouseholdProfile& p, const battery::BatteryConfig& cfg,
                         const SchedulerSpec& spec);

/// Uniform choice among the feasible actions each slot. Charging only absorbs surplus and
/// discharging only covers deficit.
DispatchTrace random_policy(const profiles::HouseholdProfile& p, const battery::BatteryConfig& cfg,
                            std::uint64_t seed);

}  // namespace pvbess::schedulers
