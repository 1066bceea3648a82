#pragma once

// Seeded synthetic household profiles for fixtures and property tests.

#include "pvbess/profiles.hpp"

#include <cstdint>

namespace pvbess::synthetic {

struct Params {
    int household_id = 0;
    int days = 365;
    double annual_load_kwh = 5000.0;  // rescaled pro rata for shorter series
    double gen_to_load = 0.8;         // total generation / total load of the result
    double cloudiness = 0.35;         // 0 = always clear
};

/// Half-hourly year starting 1 July: PV bell curve with seasonal day length and daily
/// clearness draws; load with morning/evening peaks, seasonal heating and random spikes.
/// Totals are rescaled so gen/load equals `gen_to_load` exactly (up to rounding).
profiles::HouseholdProfile household(const Params& params, std::uint64_t seed);

/// Draws Params (gen/load in [0.15, 1.6], annual load in [2500, 9000] kWh) from `seed`, then builds.
profiles::HouseholdProfile random_household(std::uint64_t seed, int days = 365);

/// Uncorrelated per-slot draws, for short randomized dispatch instances.
profiles::HouseholdProfile noise_instance(std::uint64_t seed, int days = 2);

}  // namespace pvbess::synthetic
