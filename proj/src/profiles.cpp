#include "pvbess/profiles.hpp"

#include "pvbess/diagnostics.hpp"
#include "pvbess/errors.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace pvbess::profiles {

using namespace std::chrono;

namespace {

constexpr int kAusgridValueColumns = 48;
constexpr int kAusgridFirstValue = 5;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        std::size_t next = line.find(sep, pos);
        if (next == std::string_view::npos) {
            out.push_back(trim(line.substr(pos)));
            break;
        }
        out.push_back(trim(line.substr(pos, next - pos)));
        pos = next + 1;
    }
    return out;
}

template <class T>
std::optional<T> parse_number(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    T value{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return value;
}

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

std::optional<unsigned> month_from_name(std::string_view name) {
    static constexpr std::array<std::string_view, 12> names = {"jan", "feb", "mar", "apr", "may", "jun",
                                                               "jul", "aug", "sep", "oct", "nov", "dec"};
    for (unsigned i = 0; i < names.size(); ++i)
        if (iequals(name.substr(0, 3), names[i]) && name.size() >= 3) return i + 1;
    return std::nullopt;
}

std::optional<sys_days> make_date(int y, unsigned m, unsigned d) {
    year_month_day ymd{year{y}, month{m}, day{d}};
    if (!ymd.ok()) return std::nullopt;
    return sys_days{ymd};
}

void check_finite_nonneg(const std::vector<double>& v, std::string_view what) {
    for (std::size_t i = 0; i < v.size(); ++i)
        if (!std::isfinite(v[i]) || v[i] < 0.0)
            throw ValidationError(fmt::format("{}[{}] = {} is not a finite non-negative energy", what, i, v[i]));
}

std::string format_value(double v) { return fmt::format("{:.6f}", v); }

double round6(double v) { return std::round(v * 1e6) / 1e6; }

std::optional<sys_seconds> parse_timestamp(std::string_view s) {
    // YYYY-MM-DDTHH:MM
    if (s.size() != 16 || s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':') return std::nullopt;
    auto y = parse_number<int>(s.substr(0, 4));
    auto mo = parse_number<unsigned>(s.substr(5, 2));
    auto d = parse_number<unsigned>(s.substr(8, 2));
    auto hh = parse_number<int>(s.substr(11, 2));
    auto mm = parse_number<int>(s.substr(14, 2));
    if (!y || !mo || !d || !hh || !mm || *hh > 23 || *mm > 59) return std::nullopt;
    auto date = make_date(*y, *mo, *d);
    if (!date) return std::nullopt;
    return sys_seconds{*date} + hours{*hh} + minutes{*mm};
}

/// Rebuilds day list and checks slot ordering from per-row timestamps.
void assign_days_from_timestamps(HouseholdProfile& p, const std::vector<sys_seconds>& stamps) {
    const auto per_day = static_cast<std::size_t>(p.slots_per_day());
    if (stamps.empty() || stamps.size() % per_day != 0)
        throw ValidationError(fmt::format("profile has {} rows, not a whole number of {}-slot days",
                                          stamps.size(), per_day));
    for (std::size_t i = 0; i < stamps.size(); i += per_day) {
        const sys_days day = floor<days>(stamps[i]);
        for (std::size_t k = 0; k < per_day; ++k) {
            const auto expected = sys_seconds{day} + minutes{p.slot_minutes * static_cast<int>(k)};
            if (stamps[i + k] != expected)
                throw ValidationError(fmt::format("row {}: timestamp {} out of sequence (expected {})", i + k + 1,
                                                  format_timestamp(stamps[i + k]), format_timestamp(expected)));
        }
        p.days.push_back(day);
    }
}

}  // namespace

std::optional<Category> parse_category(std::string_view code) {
    code = trim(code);
    if (iequals(code, "GG")) return Category::GG;
    if (iequals(code, "GC")) return Category::GC;
    if (iequals(code, "CL")) return Category::CL;
    return std::nullopt;
}

std::string_view to_string(Category c) {
    switch (c) {
        case Category::GG: return "GG";
        case Category::GC: return "GC";
        case Category::CL: return "CL";
    }
    return "?";
}

CategorySet parse_category_list(std::string_view list) {
    CategorySet out;
    for (auto item : split(list, ',')) {
        if (item.empty()) continue;
        auto c = parse_category(item);
        if (!c) throw ArgumentError(fmt::format("unknown consumption category '{}'", item));
        out.insert(*c);
    }
    if (out.empty()) throw ArgumentError("load category list is empty");
    return out;
}

sys_seconds HouseholdProfile::slot_start(std::size_t i) const {
    const auto per_day = static_cast<std::size_t>(slots_per_day());
    return sys_seconds{days.at(i / per_day)} + minutes{slot_minutes * static_cast<int>(i % per_day)};
}

void validate(const HouseholdProfile& p) {
    if (p.slot_minutes <= 0 || (24 * 60) % p.slot_minutes != 0)
        throw ValidationError(fmt::format("slot length {} min does not divide a day", p.slot_minutes));
    if (p.generation.empty()) throw ValidationError("profile has no slots");
    if (p.generation.size() != p.load.size())
        throw ValidationError(fmt::format("generation has {} slots but load has {}", p.generation.size(),
                                          p.load.size()));
    const auto per_day = static_cast<std::size_t>(p.slots_per_day());
    if (p.slots() % per_day != 0)
        throw ValidationError(fmt::format("{} slots is not a whole number of days", p.slots()));
    if (p.days.size() != p.slots() / per_day)
        throw ValidationError(fmt::format("profile lists {} days for {} slots", p.days.size(), p.slots()));
    for (std::size_t i = 1; i < p.days.size(); ++i)
        if (p.days[i] <= p.days[i - 1]) throw ValidationError("profile days are not strictly increasing");
    if (!std::isfinite(p.gen_scale) || p.gen_scale <= 0.0) throw ValidationError("gen_scale must be finite and > 0");
    check_finite_nonneg(p.generation, "generation");
    check_finite_nonneg(p.load, "load");
}

HouseholdProfile make_profile(int household_id, std::vector<double> generation, std::vector<double> load,
                              sys_days start, int slot_minutes) {
    HouseholdProfile p;
    p.household_id = household_id;
    p.slot_minutes = slot_minutes;
    p.generation = std::move(generation);
    p.load = std::move(load);
    if (slot_minutes > 0 && (24 * 60) % slot_minutes == 0) {
        const auto n_days = p.generation.size() / static_cast<std::size_t>(p.slots_per_day());
        for (std::size_t d = 0; d < n_days; ++d) p.days.push_back(start + days{static_cast<int>(d)});
    }
    validate(p);
    return p;
}

AnnualTotals annual_totals(const HouseholdProfile& p) {
    AnnualTotals t;
    for (double g : p.generation) t.total_gen += g;
    for (double l : p.load) t.total_load += l;
    t.slots = p.slots();
    const double elapsed_hours = static_cast<double>(t.slots) * p.slot_hours();
    t.avg_gen_power = elapsed_hours > 0.0 ? t.total_gen / elapsed_hours : 0.0;
    return t;
}

HouseholdProfile scale_generation(const HouseholdProfile& p, double factor) {
    if (!std::isfinite(factor) || factor <= 0.0)
        throw ArgumentError(fmt::format("generation scale factor must be finite and > 0, got {}", factor));
    HouseholdProfile out = p;
    for (double& g : out.generation) g *= factor;
    out.gen_scale *= factor;
    return out;
}

HouseholdProfile concatenate(const HouseholdProfile& head, const HouseholdProfile& tail) {
    if (head.slot_minutes != tail.slot_minutes) throw ArgumentError("cannot concatenate profiles with different slots");
    if (head.household_id != tail.household_id) throw ArgumentError("cannot concatenate different households");
    if (!head.days.empty() && !tail.days.empty() && tail.days.front() <= head.days.back())
        throw ArgumentError("tail profile must start after head profile ends");
    if (head.gen_scale != tail.gen_scale) throw ArgumentError("cannot concatenate profiles with different gen_scale");
    HouseholdProfile out = head;
    out.days.insert(out.days.end(), tail.days.begin(), tail.days.end());
    out.generation.insert(out.generation.end(), tail.generation.begin(), tail.generation.end());
    out.load.insert(out.load.end(), tail.load.begin(), tail.load.end());
    return out;
}

HouseholdProfile slice_days(const HouseholdProfile& p, std::size_t first_day, std::size_t n_days) {
    if (n_days == 0 || first_day + n_days > p.days.size())
        throw ArgumentError(fmt::format("day range [{}, {}) outside profile of {} days", first_day,
                                        first_day + n_days, p.days.size()));
    const auto per_day = static_cast<std::size_t>(p.slots_per_day());
    HouseholdProfile out;
    out.household_id = p.household_id;
    out.slot_minutes = p.slot_minutes;
    out.gen_scale = p.gen_scale;
    const auto d0 = static_cast<std::ptrdiff_t>(first_day);
    const auto d1 = static_cast<std::ptrdiff_t>(first_day + n_days);
    out.days.assign(p.days.begin() + d0, p.days.begin() + d1);
    out.generation.assign(p.generation.begin() + d0 * static_cast<std::ptrdiff_t>(per_day),
                          p.generation.begin() + d1 * static_cast<std::ptrdiff_t>(per_day));
    out.load.assign(p.load.begin() + d0 * static_cast<std::ptrdiff_t>(per_day),
                    p.load.begin() + d1 * static_cast<std::ptrdiff_t>(per_day));
    return out;
}

std::optional<sys_days> parse_ausgrid_date(std::string_view text) {
    text = trim(text);
    if (auto parts = split(text, '/'); parts.size() == 3) {
        auto d = parse_number<unsigned>(parts[0]);
        auto m = parse_number<unsigned>(parts[1]);
        auto y = parse_number<int>(parts[2]);
        if (!d || !m || !y || parts[2].size() != 4) return std::nullopt;
        return make_date(*y, *m, *d);
    }
    if (auto parts = split(text, '-'); parts.size() == 3) {
        auto d = parse_number<unsigned>(parts[0]);
        auto m = month_from_name(parts[1]);
        auto y = parse_number<int>(parts[2]);
        if (!d || !m || !y || parts[1].size() != 3) return std::nullopt;
        if (parts[2].size() == 2) *y += 2000;
        else if (parts[2].size() != 4) return std::nullopt;
        return make_date(*y, *m, *d);
    }
    return std::nullopt;
}

std::vector<HouseholdProfile> parse_ausgrid_csv(std::istream& in, const CategorySet& load_categories) {
    using DayRows = std::array<std::optional<std::array<double, kAusgridValueColumns>>, 3>;
    std::map<int, std::map<sys_days, DayRows>> customers;

    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    bool any_content = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = trim(line);
        if (view.empty()) continue;
        any_content = true;
        auto fields = split(view, ',');
        if (!header_seen) {
            // Title lines may precede the header row.
            if (iequals(fields.front(), "Customer")) {
                if (fields.size() < static_cast<std::size_t>(kAusgridFirstValue + kAusgridValueColumns))
                    throw ParseError(fmt::format("header has {} columns, expected at least {}", fields.size(),
                                                 kAusgridFirstValue + kAusgridValueColumns),
                                     line_no);
                header_seen = true;
            }
            continue;
        }
        if (fields.size() < static_cast<std::size_t>(kAusgridFirstValue + kAusgridValueColumns))
            throw ParseError(fmt::format("row has {} columns, expected at least {}", fields.size(),
                                         kAusgridFirstValue + kAusgridValueColumns),
                             line_no);
        auto customer = parse_number<int>(fields[0]);
        if (!customer) throw ParseError(fmt::format("bad customer id '{}'", fields[0]), line_no);
        auto category = parse_category(fields[3]);
        if (!category) throw ParseError(fmt::format("unknown consumption category '{}'", fields[3]), line_no);
        auto date = parse_ausgrid_date(fields[4]);
        if (!date) throw ParseError(fmt::format("bad date '{}'", fields[4]), line_no);

        std::array<double, kAusgridValueColumns> values{};
        for (int k = 0; k < kAusgridValueColumns; ++k) {
            const auto& field = fields[static_cast<std::size_t>(kAusgridFirstValue + k)];
            auto v = parse_number<double>(field);
            if (!v || !std::isfinite(*v) || *v < 0.0)
                throw ParseError(fmt::format("bad half-hour value '{}' in column {}", field, kAusgridFirstValue + k + 1),
                                 line_no);
            values[static_cast<std::size_t>(k)] = *v;
        }
        auto& slot = customers[*customer][*date][static_cast<std::size_t>(*category)];
        if (slot)
            throw ValidationError(fmt::format("line {}: duplicate row for customer {}, category {}, date {}", line_no,
                                              *customer, to_string(*category), format_date(*date)));
        slot = values;
    }
    if (!any_content) throw ParseError("empty input", line_no == 0 ? 1 : line_no);
    if (!header_seen) throw ParseError("no 'Customer,...' header row found", line_no);

    std::vector<HouseholdProfile> out;
    for (const auto& [customer, by_date] : customers) {
        const bool has_gg = std::any_of(by_date.begin(), by_date.end(), [](const auto& kv) {
            return kv.second[static_cast<std::size_t>(Category::GG)].has_value();
        });
        if (!has_gg) {
            warn(fmt::format("customer {} has no GG (generation) rows; skipped", customer));
            continue;
        }
        HouseholdProfile p;
        p.household_id = customer;
        p.slot_minutes = kDefaultSlotMinutes;
        std::size_t missing_days = 0;
        std::optional<sys_days> prev;
        for (const auto& [date, rows] : by_date) {
            if (prev) missing_days += static_cast<std::size_t>((date - *prev).count() - 1);
            prev = date;
            p.days.push_back(date);
            const auto& gg = rows[static_cast<std::size_t>(Category::GG)];
            for (int k = 0; k < kAusgridValueColumns; ++k) {
                const auto idx = static_cast<std::size_t>(k);
                p.generation.push_back(gg ? (*gg)[idx] : 0.0);
                double l = 0.0;
                for (Category c : load_categories) {
                    const auto& row = rows[static_cast<std::size_t>(c)];
                    if (row) l += (*row)[idx];
                }
                p.load.push_back(l);
            }
        }
        if (missing_days > 0)
            warn(fmt::format("customer {}: {} day(s) absent from the file were dropped", customer, missing_days));
        validate(p);
        out.push_back(std::move(p));
    }
    return out;
}

std::optional<Format> parse_format(std::string_view name) {
    if (iequals(name, "csv")) return Format::Csv;
    if (iequals(name, "json")) return Format::Json;
    return std::nullopt;
}

std::string format_date(sys_days d) {
    const year_month_day ymd{d};
    return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                       static_cast<unsigned>(ymd.day()));
}

std::string format_timestamp(sys_seconds t) {
    const auto day = floor<days>(t);
    const hh_mm_ss tod{t - day};
    return fmt::format("{}T{:02d}:{:02d}", format_date(day), tod.hours().count(), tod.minutes().count());
}

void write_canonical_csv(std::ostream& out, const HouseholdProfile& p) {
    validate(p);
    out << "# household_id=" << p.household_id << '\n';
    out << "# slot_minutes=" << p.slot_minutes << '\n';
    out << "# gen_scale=" << fmt::format("{}", p.gen_scale) << '\n';
    out << "timestamp,gen_kwh,load_kwh\n";
    for (std::size_t i = 0; i < p.slots(); ++i)
        out << format_timestamp(p.slot_start(i)) << ',' << format_value(p.generation[i]) << ','
            << format_value(p.load[i]) << '\n';
}

HouseholdProfile read_canonical_csv(std::istream& in) {
    HouseholdProfile p;
    std::vector<sys_seconds> stamps;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = trim(line);
        if (view.empty()) continue;
        if (view.front() == '#') {
            view.remove_prefix(1);
            auto eq = view.find('=');
            if (eq == std::string_view::npos) continue;
            auto key = trim(view.substr(0, eq));
            auto value = trim(view.substr(eq + 1));
            if (key == "household_id") {
                auto v = parse_number<int>(value);
                if (!v) throw ParseError("bad household_id", line_no);
                p.household_id = *v;
            } else if (key == "slot_minutes") {
                auto v = parse_number<int>(value);
                if (!v) throw ParseError("bad slot_minutes", line_no);
                p.slot_minutes = *v;
            } else if (key == "gen_scale") {
                auto v = parse_number<double>(value);
                if (!v) throw ParseError("bad gen_scale", line_no);
                p.gen_scale = *v;
            }
            continue;
        }
        if (!header_seen) {
            if (view != "timestamp,gen_kwh,load_kwh") throw ParseError("expected header timestamp,gen_kwh,load_kwh", line_no);
            header_seen = true;
            continue;
        }
        auto fields = split(view, ',');
        if (fields.size() != 3) throw ParseError(fmt::format("expected 3 columns, got {}", fields.size()), line_no);
        auto stamp = parse_timestamp(fields[0]);
        auto gen = parse_number<double>(fields[1]);
        auto load = parse_number<double>(fields[2]);
        if (!stamp) throw ParseError(fmt::format("bad timestamp '{}'", fields[0]), line_no);
        if (!gen || !load) throw ParseError("bad energy value", line_no);
        stamps.push_back(*stamp);
        p.generation.push_back(*gen);
        p.load.push_back(*load);
    }
    if (!header_seen) throw ParseError("missing header", line_no == 0 ? 1 : line_no);
    assign_days_from_timestamps(p, stamps);
    validate(p);
    return p;
}

void write_canonical_json(std::ostream& out, const HouseholdProfile& p) {
    validate(p);
    nlohmann::ordered_json j;
    j["household_id"] = p.household_id;
    j["slot_minutes"] = p.slot_minutes;
    j["gen_scale"] = p.gen_scale;
    auto& days_json = j["days"] = nlohmann::ordered_json::array();
    for (auto d : p.days) days_json.push_back(format_date(d));
    auto& gen = j["gen_kwh"] = nlohmann::ordered_json::array();
    auto& load = j["load_kwh"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < p.slots(); ++i) {
        gen.push_back(round6(p.generation[i]));
        load.push_back(round6(p.load[i]));
    }
    out << j.dump() << '\n';
}

HouseholdProfile read_canonical_json(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(e.what(), 1);
    }
    HouseholdProfile p;
    try {
        p.household_id = j.at("household_id").get<int>();
        p.slot_minutes = j.at("slot_minutes").get<int>();
        p.gen_scale = j.value("gen_scale", 1.0);
        for (const auto& d : j.at("days")) {
            auto stamp = parse_timestamp(d.get<std::string>() + "T00:00");
            if (!stamp) throw ValidationError("bad day '" + d.get<std::string>() + "'");
            p.days.push_back(floor<days>(*stamp));
        }
        p.generation = j.at("gen_kwh").get<std::vector<double>>();
        p.load = j.at("load_kwh").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed profile JSON: ") + e.what());
    }
    validate(p);
    return p;
}

HouseholdProfile load_profile(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot open profile " + path.string());
    return path.extension() == ".json" ? read_canonical_json(in) : read_canonical_csv(in);
}

void save_profile(const std::filesystem::path& path, const HouseholdProfile& p, Format format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArgumentError("cannot write " + path.string());
    if (format == Format::Json) write_canonical_json(out, p);
    else write_canonical_csv(out, p);
}

}  // namespace pvbess::profiles
