#pragma once

// Household generation/consumption series: smart-meter ingestion, PV scaling,
// annual totals and the canonical on-disk profile format.

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace pvbess::profiles {

inline constexpr int kDefaultSlotMinutes = 30;

/// Ausgrid consumption category codes: gross generation, general consumption, controlled load.
enum class Category { GG, GC, CL };

std::optional<Category> parse_category(std::string_view code);
std::string_view to_string(Category c);

using CategorySet = std::set<Category>;

inline CategorySet default_load_categories() { return {Category::GC, Category::CL}; }

/// Parses a comma-separated list such as "GC,CL". Throws ArgumentError on unknown codes.
CategorySet parse_category_list(std::string_view list);

/// Aligned per-slot energy series for one household. Values are kWh per slot.
struct HouseholdProfile {
    int household_id = 0;
    int slot_minutes = kDefaultSlotMinutes;
    /// Calendar date of every day in the series, strictly increasing. Gaps are allowed
    /// (days dropped at ingestion); timestamps are always derived from this list.
    std::vector<std::chrono::sys_days> days;
    std::vector<double> generation;
    std::vector<double> load;
    /// Cumulative factor applied to generation since ingestion.
    double gen_scale = 1.0;

    std::size_t slots() const noexcept { return generation.size(); }
    int slots_per_day() const noexcept { return 24 * 60 / slot_minutes; }
    double slot_hours() const noexcept { return slot_minutes / 60.0; }
    std::chrono::sys_days start_date() const { return days.front(); }
    /// Start time of slot `i`.
    std::chrono::sys_seconds slot_start(std::size_t i) const;
};

/// Throws ValidationError if any profile invariant is broken.
void validate(const HouseholdProfile& p);

/// Builds a validated profile over consecutive days starting at `start`.
HouseholdProfile make_profile(int household_id, std::vector<double> generation, std::vector<double> load,
                              std::chrono::sys_days start = std::chrono::sys_days{std::chrono::year{2012} /
                                                                                   std::chrono::July / 1},
                              int slot_minutes = kDefaultSlotMinutes);

struct AnnualTotals {
    double total_gen = 0.0;      // kWh
    double total_load = 0.0;     // kWh
    double avg_gen_power = 0.0;  // kW, total_gen over elapsed hours
    std::size_t slots = 0;
};

AnnualTotals annual_totals(const HouseholdProfile& p);

/// Multiplies every generation slot by `factor`. Throws ArgumentError unless factor is finite and > 0.
HouseholdProfile scale_generation(const HouseholdProfile& p, double factor);

/// Appends the days of `tail` to `head`. Both must share household and slot length, and
/// `tail` must start after `head` ends.
HouseholdProfile concatenate(const HouseholdProfile& head, const HouseholdProfile& tail);

/// Sub-range of whole days [first_day, first_day + n_days).
HouseholdProfile slice_days(const HouseholdProfile& p, std::size_t first_day, std::size_t n_days);

/// Reads the Ausgrid "Solar home electricity data" wide CSV. One profile per customer
/// with at least one GG row, sorted by customer id. Skipped customers and dropped days
/// are reported through pvbess::warn.
std::vector<HouseholdProfile> parse_ausgrid_csv(std::istream& in,
                                                const CategorySet& load_categories = default_load_categories());

/// Accepts D/M/YYYY and D-Mon-YY / D-Mon-YYYY.
std::optional<std::chrono::sys_days> parse_ausgrid_date(std::string_view text);

enum class Format { Csv, Json };

std::optional<Format> parse_format(std::string_view name);

/// Canonical CSV: `# key=value` metadata lines, then `timestamp,gen_kwh,load_kwh` rows
/// with six fractional digits.
void write_canonical_csv(std::ostream& out, const HouseholdProfile& p);
HouseholdProfile read_canonical_csv(std::istream& in);

void write_canonical_json(std::ostream& out, const HouseholdProfile& p);
HouseholdProfile read_canonical_json(std::istream& in);

/// Loads a canonical profile, choosing the format from the file extension (.json or anything else as CSV).
HouseholdProfile load_profile(const std::filesystem::path& path);
void save_profile(const std::filesystem::path& path, const HouseholdProfile& p, Format format);

std::string format_date(std::chrono::sys_days d);
std::string format_timestamp(std::chrono::sys_seconds t);

}  // namespace pvbess::profiles
