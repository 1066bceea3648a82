#include "pvbess/cli.hpp"

#include "pvbess/errors.hpp"
#include "pvbess/lite_bess.hpp"
#include "pvbess/metrics.hpp"
#include "pvbess/profiles.hpp"
#include "pvbess/schedulers.hpp"
#include "pvbess/sizing.hpp"
#include "pvbess/svg.hpp"
#include "pvbess/synthetic.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace pvbess::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct BatteryOptions {
    double soc_min = 0.10;
    double soc_max = 0.95;
    double soc_init = 0.10;
    std::optional<double> max_rate;

    battery::BatteryConfig make(double capacity) const {
        battery::BatteryConfig cfg{capacity, soc_min, soc_max, soc_init};
        if (max_rate) cfg.max_rate = *max_rate;
        battery::validate(cfg);
        return cfg;
    }
};

struct SchedulerOptions {
    std::string config_path;
    std::optional<int> horizon;
    std::optional<int> soc_grid;
    std::optional<std::uint64_t> seed;
    std::optional<int> episodes;
    std::string forecast;

    schedulers::SchedulerSpec make(const std::string& kind_name) const {
        schedulers::SchedulerSpec spec;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw ArgumentError("cannot open scheduler config " + config_path);
            nlohmann::json j;
            try {
                in >> j;
            } catch (const nlohmann::json::exception& e) {
                throw ArgumentError(config_path + ": " + e.what());
            }
            spec = schedulers::spec_from_json(j);
        }
        if (!kind_name.empty()) {
            auto kind = schedulers::parse_kind(kind_name);
            if (!kind) throw ArgumentError("unknown scheduler '" + kind_name + "'");
            spec.kind = *kind;
        }
        if (horizon) spec.horizon = *horizon;
        if (soc_grid) spec.soc_grid_points = *soc_grid;
        if (seed) spec.seed = *seed;
        if (episodes) spec.q.episodes = *episodes;
        if (forecast == "persistence") spec.forecast = schedulers::Forecast::Persistence;
        else if (!forecast.empty() && forecast != "perfect") throw ArgumentError("unknown forecast '" + forecast + "'");
        schedulers::validate(spec);
        return spec;
    }
};

std::vector<double> parse_range(const std::string& text) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ArgumentError("bad range '" + text + "', expected lo:hi:step");
        }
    }
    if (parts.size() != 3) throw ArgumentError("bad range '" + text + "', expected lo:hi:step");
    return sizing::make_axis(parts[0], parts[1], parts[2]);
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ArgumentError("cannot create output directory " + dir.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArgumentError("cannot write " + path.string());
    out << text;
}

ordered_json battery_json(const BatteryOptions& b) {
    ordered_json j;
    j["soc_min_frac"] = b.soc_min;
    j["soc_max_frac"] = b.soc_max;
    j["soc_init_frac"] = b.soc_init;
    if (b.max_rate) j["max_rate"] = *b.max_rate;
    return j;
}

ordered_json manifest(const std::string& command, const std::vector<std::string>& inputs, const fs::path& out) {
    ordered_json j;
    j["command"] = command;
    j["tool_version"] = kToolVersion;
    j["inputs"] = inputs;
    j["output_dir"] = out.string();
    return j;
}

ordered_json metrics_json(const metrics::Metrics& m, const profiles::AnnualTotals& totals) {
    ordered_json j;
    j["sc"] = m.sc;
    j["ss"] = m.ss;
    j["rho"] = m.rho;
    j["sc_plus_ss"] = m.sc_plus_ss;
    j["balance_residual"] = m.balance_residual;
    j["sc_soc_adjusted"] = m.sc_soc_adjusted;
    j["ss_soc_adjusted"] = m.ss_soc_adjusted;
    j["total_gen"] = totals.total_gen;
    j["total_load"] = totals.total_load;
    j["avg_gen_power"] = totals.avg_gen_power;
    if (totals.total_load > 0.0) {
        const double asym = metrics::asymptotic_rho(totals);
        j["asymptotic_rho"] = asym;
        j["type"] = std::string(sizing::to_string(sizing::classify(asym)));
    }
    return j;
}

std::string type_of(const profiles::AnnualTotals& totals) {
    if (!(totals.total_load > 0.0)) return "n/a";
    return std::string(sizing::to_string(sizing::classify(metrics::asymptotic_rho(totals))));
}

int cmd_ingest(const std::string& input, const fs::path& out_dir, const std::string& categories,
               const std::string& format_name) {
    const auto format = profiles::parse_format(format_name);
    if (!format) throw ArgumentError("unknown format '" + format_name + "'");
    const auto cats = profiles::parse_category_list(categories);
    std::ifstream in(input, std::ios::binary);
    if (!in) throw ArgumentError("cannot open " + input);
    const auto households = profiles::parse_ausgrid_csv(in, cats);
    if (households.empty()) throw ValidationError(input + ": no household with generation data");

    ensure_dir(out_dir);
    std::string summary = "household,total_gen,total_load,asymptotic_rho,type\n";
    const std::string ext = *format == profiles::Format::Json ? ".json" : ".csv";
    for (const auto& p : households) {
        profiles::save_profile(out_dir / fmt::format("household_{}{}", p.household_id, ext), p, *format);
        const auto totals = profiles::annual_totals(p);
        const double rho = totals.total_load > 0.0 ? metrics::asymptotic_rho(totals) : 0.0;
        summary += fmt::format("{},{:.6f},{:.6f},{:.6f},{}\n", p.household_id, totals.total_gen, totals.total_load,
                               rho, type_of(totals));
    }
    write_text(out_dir / "summary.csv", summary);
    auto m = manifest("ingest", {input}, out_dir);
    ordered_json cat_list = ordered_json::array();
    for (auto c : cats) cat_list.push_back(std::string(profiles::to_string(c)));
    m["load_categories"] = cat_list;
    m["format"] = format_name;
    m["households"] = households.size();
    write_text(out_dir / "manifest.json", m.dump(2) + "\n");
    std::cout << fmt::format("ingested {} household(s) into {}\n", households.size(), out_dir.string());
    return kOk;
}

int cmd_analyze(const std::string& input, double capacity, const std::string& scheduler_name,
                const SchedulerOptions& sched, const BatteryOptions& batt, const fs::path& out_dir) {
    const auto profile = profiles::load_profile(input);
    const auto spec = sched.make(scheduler_name);
    const auto cfg = batt.make(capacity);
    const auto totals = profiles::annual_totals(profile);

    const auto started = std::chrono::steady_clock::now();
    const auto trace = schedulers::dispatch(spec, profile, cfg);
    const auto m = metrics::compute(trace, totals, cfg);
    const double elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();

    std::cout << fmt::format("household {}  scheduler {}  capacity {} kWh\n", profile.household_id,
                             schedulers::to_string(spec.kind), capacity);
    std::cout << fmt::format("SC {:.4f}  SS {:.4f}  rho {:.4f}  SC+SS {:.4f}  runtime {:.2f} ms\n", m.sc, m.ss, m.rho,
                             m.sc_plus_ss, elapsed_ms);

    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        ordered_json j;
        j["household"] = profile.household_id;
        j["scenario"] = fmt::format("{}@{}kWh", schedulers::to_string(spec.kind), capacity);
        j["capacity"] = capacity;
        j["metrics"] = metrics_json(m, totals);
        write_text(out_dir / "metrics.json", j.dump(2) + "\n");
        std::ofstream trace_out(out_dir / "trace.csv", std::ios::binary);
        write_trace_csv(trace_out, trace, profile);
        auto man = manifest("analyze", {input}, out_dir);
        man["capacity"] = capacity;
        man["battery"] = battery_json(batt);
        man["scheduler"] = schedulers::to_json(spec);
        man["seed"] = spec.seed;
        write_text(out_dir / "manifest.json", man.dump(2) + "\n");
    }
    return kOk;
}

int cmd_compare(const std::string& input, std::vector<double> capacities, const std::string& capacity_range,
                const std::vector<std::string>& scheduler_names, const SchedulerOptions& sched,
                const BatteryOptions& batt, const fs::path& out_dir) {
    const auto profile = profiles::load_profile(input);
    const auto totals = profiles::annual_totals(profile);
    if (!capacity_range.empty()) capacities = parse_range(capacity_range);
    if (capacities.empty()) throw ArgumentError("compare needs --capacity or --capacity-range");
    std::vector<schedulers::SchedulerSpec> specs;
    for (const auto& name : scheduler_names) specs.push_back(sched.make(name));
    if (specs.empty()) specs.push_back(sched.make("greedy"));

    std::string table = "scheduler,capacity,sc,ss,rho,sc_plus_ss\n";
    std::vector<svg::Series> sc_series, ss_series;
    bool any_failed = false;
    std::cout << fmt::format("{:<12} {:>9} {:>8} {:>8} {:>8} {:>8}\n", "scheduler", "capacity", "SC", "SS", "rho",
                             "SC+SS");
    for (const auto& spec : specs) {
        const std::string name(schedulers::to_string(spec.kind));
        svg::Series sc{name, {}, {}}, ss{name, {}, {}};
        for (double c : capacities) {
            try {
                const auto cfg = batt.make(c);
                const auto m = metrics::compute(schedulers::dispatch(spec, profile, cfg), totals, cfg);
                table += fmt::format("{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f}\n", name, c, m.sc, m.ss, m.rho,
                                     m.sc_plus_ss);
                std::cout << fmt::format("{:<12} {:>9.2f} {:>8.4f} {:>8.4f} {:>8.4f} {:>8.4f}\n", name, c, m.sc, m.ss,
                                         m.rho, m.sc_plus_ss);
                sc.x.push_back(c);
                sc.y.push_back(m.sc);
                ss.x.push_back(c);
                ss.y.push_back(m.ss);
            } catch (const InvariantViolation&) {
                throw;
            } catch (const std::exception& e) {
                any_failed = true;
                table += fmt::format("{},{:.6f},,,,\n", name, c);
                std::cerr << fmt::format("{} at {} kWh failed: {}\n", name, c, e.what());
            }
        }
        sc_series.push_back(std::move(sc));
        ss_series.push_back(std::move(ss));
    }
    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        write_text(out_dir / "compare.csv", table);
        write_text(out_dir / "sc.svg", svg::line_chart(sc_series, fmt::format("SC, household {}", profile.household_id),
                                                       "battery capacity [kWh]", "SC"));
        write_text(out_dir / "ss.svg", svg::line_chart(ss_series, fmt::format("SS, household {}", profile.household_id),
                                                       "battery capacity [kWh]", "SS"));
        auto man = manifest("compare", {input}, out_dir);
        man["capacities"] = capacities;
        nlohmann::json list = nlohmann::json::array();
        for (const auto& s : specs) list.push_back(schedulers::to_json(s));
        man["schedulers"] = list;
        man["battery"] = battery_json(batt);
        write_text(out_dir / "manifest.json", man.dump(2) + "\n");
    }
    return any_failed ? kInputError : kOk;
}

int cmd_optimize(const std::string& input, std::optional<double> budget, const sizing::CostModel& model,
                 const std::string& capacity_range, const std::string& factor_range, const std::string& scheduler_name,
                 const SchedulerOptions& sched, const BatteryOptions& batt, const fs::path& out_dir) {
    const auto profile = profiles::load_profile(input);
    const auto spec = sched.make(scheduler_name);
    sizing::validate(model);
    batt.make(0.0);
    const auto capacities = capacity_range.empty() ? sizing::default_capacity_axis() : parse_range(capacity_range);
    const auto factors = factor_range.empty() ? sizing::default_factor_axis() : parse_range(factor_range);
    const auto grid = sizing::sweep(profile, capacities, factors, spec, batt.make(0.0), model);

    double max_cost = 0.0;
    for (const auto& cell : grid.cells) max_cost = std::max(max_cost, cell.cost);
    const double limit = budget.value_or(max_cost);

    std::optional<sizing::OperatingPoint> best;
    int code = kOk;
    try {
        best = sizing::optimal_point(grid, model, limit);
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        code = kInfeasible;
    }
    if (best)
        std::cout << fmt::format(
            "optimum: capacity {:.2f} kWh, factor x{:.2f}, SC+SS {:.4f}, rho {:.4f}, cost {:.2f} (budget {:.2f})\n",
            best->capacity, best->factor, best->sc_plus_ss, best->rho, best->cost, limit);

    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        std::ofstream grid_out(out_dir / "grid.csv", std::ios::binary);
        sizing::write_grid_csv(grid_out, grid);
        ordered_json result;
        result["household"] = profile.household_id;
        result["budget"] = limit;
        if (best) {
            result["feasible"] = true;
            result["capacity"] = best->capacity;
            result["factor"] = best->factor;
            result["sc_plus_ss"] = best->sc_plus_ss;
            result["rho"] = best->rho;
            result["cost"] = best->cost;
        } else {
            result["feasible"] = false;
        }
        write_text(out_dir / "optimum.json", result.dump(2) + "\n");
        write_text(out_dir / "heatmap.svg",
                   svg::heatmap(grid, model, limit, best, fmt::format("SC+SS, household {}", profile.household_id)));
        auto man = manifest("optimize", {input}, out_dir);
        man["scheduler"] = schedulers::to_json(spec);
        man["cost_model"] = {{"c_batt", model.c_batt}, {"c_gen", model.c_gen}};
        man["budget"] = limit;
        man["capacity_axis"] = {capacities.front(), capacities.back(), capacities.size()};
        man["factor_axis"] = {factors.front(), factors.back(), factors.size()};
        man["battery"] = battery_json(batt);
        man["seed"] = spec.seed;
        write_text(out_dir / "manifest.json", man.dump(2) + "\n");
    }
    return code;
}

int cmd_synth(const fs::path& out, std::uint64_t seed, int days, double gen_to_load, double annual_load,
              const std::string& format_name) {
    const auto format = profiles::parse_format(format_name);
    if (!format) throw ArgumentError("unknown format '" + format_name + "'");
    synthetic::Params params;
    params.household_id = static_cast<int>(seed % 100000);
    params.days = days;
    params.gen_to_load = gen_to_load;
    params.annual_load_kwh = annual_load;
    const auto p = synthetic::household(params, seed);
    if (out.has_parent_path()) ensure_dir(out.parent_path());
    profiles::save_profile(out, p, *format);
    std::cout << fmt::format("wrote {} slots to {}\n", p.slots(), out.string());
    return kOk;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"PV + battery household dispatch, SC/SS analysis and capacity sizing"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    SchedulerOptions sched;
    BatteryOptions batt;
    auto add_battery = [&](CLI::App* sub) {
        sub->add_option("--soc-min", batt.soc_min, "minimum SOC fraction")->capture_default_str();
        sub->add_option("--soc-max", batt.soc_max, "maximum SOC fraction")->capture_default_str();
        sub->add_option("--soc-init", batt.soc_init, "initial SOC fraction")->capture_default_str();
        sub->add_option("--max-rate", batt.max_rate, "per-slot charge/discharge limit, kWh");
    };
    auto add_scheduler = [&](CLI::App* sub) {
        sub->add_option("--scheduler-config", sched.config_path, "JSON scheduler config");
        sub->add_option("--horizon", sched.horizon, "MPC horizon in slots");
        sub->add_option("--soc-grid", sched.soc_grid, "DP/MPC SOC grid points");
        sub->add_option("--seed", sched.seed, "seed for random and q_learning schedulers");
        sub->add_option("--episodes", sched.episodes, "Q-learning training episodes");
        sub->add_option("--forecast", sched.forecast, "MPC forecast: perfect or persistence");
    };

    std::string input, out, categories = "GC,CL", format = "csv", scheduler = "greedy", capacity_range, factor_range;
    std::vector<double> capacities;
    std::vector<std::string> scheduler_list;
    double capacity = 0.0;
    std::optional<double> budget;
    sizing::CostModel model;

    auto* ingest = app.add_subcommand("ingest", "parse an Ausgrid solar home CSV into canonical profiles");
    ingest->add_option("--input", input, "Ausgrid CSV")->required();
    ingest->add_option("--out", out, "output directory")->required();
    ingest->add_option("--load-categories", categories, "categories summed into load")->capture_default_str();
    ingest->add_option("--format", format, "csv or json")->capture_default_str();

    auto* analyze = app.add_subcommand("analyze", "dispatch one profile and report SC, SS and rho");
    analyze->add_option("--input", input, "canonical profile")->required();
    analyze->add_option("--capacity", capacity, "battery capacity, kWh")->capture_default_str();
    analyze->add_option("--scheduler", scheduler, "greedy, random, dp_optimal, mpc, q_learning")->capture_default_str();
    analyze->add_option("--out", out, "output directory");
    add_scheduler(analyze);
    add_battery(analyze);

    auto* compare = app.add_subcommand("compare", "cross schedulers with battery capacities");
    compare->add_option("--input", input, "canonical profile")->required();
    compare->add_option("--capacity", capacities, "comma-separated capacities, kWh")->delimiter(',');
    compare->add_option("--capacity-range", capacity_range, "lo:hi:step, kWh");
    compare->add_option("--scheduler", scheduler_list, "comma-separated schedulers")->delimiter(',');
    compare->add_option("--out", out, "output directory");
    add_scheduler(compare);
    add_battery(compare);

    auto* optimize = app.add_subcommand("optimize", "sweep capacity x PV scale and pick the budget optimum");
    optimize->add_option("--input", input, "canonical profile")->required();
    optimize->add_option("--budget", budget, "maximum c_batt*capacity + c_gen*avg_gen_power");
    optimize->add_option("--c-batt", model.c_batt, "cost per kWh of battery")->capture_default_str();
    optimize->add_option("--c-gen", model.c_gen, "cost per kW of average generation")->capture_default_str();
    optimize->add_option("--capacity-range", capacity_range, "lo:hi:step, kWh (default 0:60:0.5)");
    optimize->add_option("--factor-range", factor_range, "lo:hi:step (default 0.1:6:0.05)");
    optimize->add_option("--scheduler", scheduler, "scheduler used per cell")->capture_default_str();
    optimize->add_option("--out", out, "output directory");
    add_scheduler(optimize);
    add_battery(optimize);

    std::uint64_t synth_seed = 0;
    int synth_days = 365;
    double synth_ratio = 0.8, synth_load = 5000.0;
    auto* synth = app.add_subcommand("synth", "write a synthetic household profile");
    synth->add_option("--out", out, "profile path")->required();
    synth->add_option("--seed", synth_seed, "seed")->capture_default_str();
    synth->add_option("--days", synth_days, "number of days")->capture_default_str();
    synth->add_option("--gen-to-load", synth_ratio, "total generation over total load")->capture_default_str();
    synth->add_option("--annual-load", synth_load, "annual load, kWh")->capture_default_str();
    synth->add_option("--format", format, "csv or json")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (*ingest) return cmd_ingest(input, out, categories, format);
        if (*analyze) return cmd_analyze(input, capacity, scheduler, sched, batt, out);
        if (*compare) return cmd_compare(input, capacities, capacity_range, scheduler_list, sched, batt, out);
        if (*optimize)
            return cmd_optimize(input, budget, model, capacity_range, factor_range, scheduler, sched, batt, out);
        if (*synth) return cmd_synth(out, synth_seed, synth_days, synth_ratio, synth_load, format);
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return kInfeasible;
    } catch (const ArgumentError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << input << ": " << e.what() << '\n';
        return kInputError;
    } catch (const ValidationError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternalError;
    }
    return kInputError;
}

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"pvbess"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace pvbess::cli
