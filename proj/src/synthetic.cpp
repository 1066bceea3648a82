#include "pvbess/synthetic.hpp"

#include "pvbess/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace pvbess::synthetic {
namespace {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double exponential(double mean) { return -mean * std::log1p(-uniform()); }

private:
    std::mt19937_64 engine_;
};

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

profiles::HouseholdProfile household(const Params& params, std::uint64_t seed) {
    if (params.days < 1 || !(params.annual_load_kwh > 0.0) || !(params.gen_to_load >= 0.0))
        throw ArgumentError("synthetic household needs days >= 1, load > 0, gen_to_load >= 0");
    constexpr int kSlots = 48;
    Rng rng(seed);
    const auto n = static_cast<std::size_t>(params.days) * kSlots;
    std::vector<double> gen(n), load(n);

    for (int d = 0; d < params.days; ++d) {
        // Day 0 is 1 July (southern winter); day ~182 is midsummer.
        const double season = std::cos(kTwoPi * d / 365.0);  // +1 winter, -1 summer
        const double day_length = 12.0 - 2.2 * season;
        const double sunrise = 12.0 - day_length / 2.0;
        const double peak = 1.0 - 0.3 * season;
        const double draw = rng.uniform();
        double clearness;
        if (draw > params.cloudiness) clearness = rng.uniform(0.85, 1.0);
        else if (draw > params.cloudiness / 3.0) clearness = rng.uniform(0.4, 0.85);
        else clearness = rng.uniform(0.1, 0.4);
        const double heating = 1.0 + 0.25 * std::max(0.0, season);
        const double cooling = 1.0 + 0.15 * std::max(0.0, -season);

        for (int s = 0; s < kSlots; ++s) {
            const auto i = static_cast<std::size_t>(d) * kSlots + static_cast<std::size_t>(s);
            const double hour = (s + 0.5) / 2.0;
            const double x = (hour - sunrise) / day_length;
            double pv = 0.0;
            if (x > 0.0 && x < 1.0) {
                pv = peak * clearness * std::pow(std::sin(std::numbers::pi * x), 1.5);
                if (clearness < 0.85) pv *= rng.uniform(0.6, 1.4);
            }
            gen[i] = pv;

            double l = 0.25;
            l += 0.6 * std::exp(-0.5 * std::pow((hour - 7.5) / 1.0, 2.0));
            l += 1.0 * std::exp(-0.5 * std::pow((hour - 19.0) / 1.8, 2.0));
            l *= (hour < 9.0 || hour > 17.0) ? heating : cooling;
            l *= rng.uniform(0.8, 1.2);
            if (rng.uniform() < 0.06) l += rng.exponential(0.6);
            load[i] = l;
        }
    }

    double gen_total = 0.0, load_total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        gen_total += gen[i];
        load_total += load[i];
    }
    const double target_load = params.annual_load_kwh * params.days / 365.0;
    const double load_scale = target_load / load_total;
    const double gen_scale = gen_total > 0.0 ? params.gen_to_load * target_load / gen_total : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        load[i] *= load_scale;
        gen[i] *= gen_scale;
    }
    return profiles::make_profile(params.household_id, std::move(gen), std::move(load));
}

profiles::HouseholdProfile random_household(std::uint64_t seed, int days) {
    Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
    Params params;
    params.household_id = static_cast<int>(seed % 100000);
    params.days = days;
    params.gen_to_load = rng.uniform(0.15, 1.6);
    params.annual_load_kwh = rng.uniform(2500.0, 9000.0);
    params.cloudiness = rng.uniform(0.15, 0.6);
    return household(params, seed);
}

profiles::HouseholdProfile noise_instance(std::uint64_t seed, int days) {
    Rng rng(seed);
    const auto n = static_cast<std::size_t>(days) * 48;
    std::vector<double> gen(n), load(n);
    for (std::size_t i = 0; i < n; ++i) {
        gen[i] = rng.uniform() < 0.3 ? 0.0 : rng.uniform(0.0, 2.0);
        load[i] = rng.uniform(0.0, 1.5);
    }
    return profiles::make_profile(static_cast<int>(seed % 100000), std::move(gen), std::move(load));
}

}  // namespace pvbess::synthetic
