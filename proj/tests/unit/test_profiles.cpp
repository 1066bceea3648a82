#include "pvbess/diagnostics.hpp"
#include "pvbess/errors.hpp"
#include "pvbess/profiles.hpp"
#include "pvbess/synthetic.hpp"

#include "oracles.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

using namespace pvbess;
using namespace pvbess::profiles;
using std::chrono::sys_days;
namespace cr = std::chrono;

namespace {

const char* kHeader =
    "Customer,Generator Capacity,Postcode,Consumption Category,date,0:30,1:00,1:30,2:00,2:30,3:00,3:30,4:00,4:30,"
    "5:00,5:30,6:00,6:30,7:00,7:30,8:00,8:30,9:00,9:30,10:00,10:30,11:00,11:30,12:00,12:30,13:00,13:30,14:00,"
    "14:30,15:00,15:30,16:00,16:30,17:00,17:30,18:00,18:30,19:00,19:30,20:00,20:30,21:00,21:30,22:00,22:30,"
    "23:00,23:30,0:00\n";

std::string row(int customer, const char* cat, const char* date, double value) {
    std::string s = std::to_string(customer) + ",2.2,2000," + cat + "," + date;
    for (int k = 0; k < 48; ++k) s += "," + std::to_string(value);
    return s + "\n";
}

std::vector<HouseholdProfile> parse(const std::string& text, const CategorySet& cats = default_load_categories()) {
    std::istringstream in(text);
    return parse_ausgrid_csv(in, cats);
}

double total(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

}  // namespace

TEST(Categories, ParseAndList) {
    EXPECT_EQ(parse_category("GG"), Category::GG);
    EXPECT_EQ(parse_category("cl"), Category::CL);
    EXPECT_FALSE(parse_category("XX").has_value());
    EXPECT_EQ(parse_category_list("GC,CL"), (CategorySet{Category::GC, Category::CL}));
    EXPECT_EQ(parse_category_list("GC"), (CategorySet{Category::GC}));
    EXPECT_THROW(parse_category_list("GC,XX"), ArgumentError);
    EXPECT_THROW(parse_category_list(""), ArgumentError);
}

TEST(AusgridDate, Formats) {
    const sys_days expected{cr::year{2012} / cr::July / 1};
    EXPECT_EQ(parse_ausgrid_date("1/07/2012"), expected);
    EXPECT_EQ(parse_ausgrid_date("01/07/2012"), expected);
    EXPECT_EQ(parse_ausgrid_date("1-Jul-12"), expected);
    EXPECT_EQ(parse_ausgrid_date("1-Jul-2012"), expected);
    EXPECT_FALSE(parse_ausgrid_date("32/01/2012").has_value());
    EXPECT_FALSE(parse_ausgrid_date("29/02/2011").has_value());
    EXPECT_FALSE(parse_ausgrid_date("yesterday").has_value());
}

TEST(AusgridParse, OneCustomerTwoDaysGives96Slots) {
    const auto out = parse(std::string("title line\n") + kHeader + row(7, "GG", "1/07/2012", 0.25) +
                           row(7, "GC", "1/07/2012", 0.5) + row(7, "GG", "2/07/2012", 0.25) +
                           row(7, "GC", "2/07/2012", 0.5));
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].household_id, 7);
    EXPECT_EQ(out[0].slots(), 96u);
    EXPECT_EQ(out[0].days.size(), 2u);
    EXPECT_DOUBLE_EQ(total(out[0].generation), 24.0);
    EXPECT_DOUBLE_EQ(total(out[0].load), 48.0);
}

TEST(AusgridParse, LoadIsSumOfSelectedCategories) {
    const std::string text =
        std::string(kHeader) + row(1, "GG", "1/07/2012", 0.0) + row(1, "GC", "1/07/2012", 1.0) + row(1, "CL", "1/07/2012", 0.5);
    const auto both = parse(text);
    for (double v : both[0].load) EXPECT_DOUBLE_EQ(v, 1.5);
    const auto gc_only = parse(text, {Category::GC});
    for (double v : gc_only[0].load) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(AusgridParse, FixtureMatchesColumnSums) {
    ScopedWarningCapture warnings;
    std::ifstream in(testutil::fixture("ausgrid_small.csv"));
    const auto profiles = parse_ausgrid_csv(in);
    const auto sums = oracle::ausgrid_column_sums(testutil::fixture("ausgrid_small.csv"));

    ASSERT_EQ(profiles.size(), 2u);  // customer 3 has no generation rows
    for (const auto& p : profiles) {
        const auto& s = sums.at(p.household_id);
        const auto t = annual_totals(p);
        EXPECT_NEAR(t.total_gen, s.gen, 1e-9);
        EXPECT_NEAR(t.total_load, s.gc + s.cl, 1e-9);
    }
    // Customer 1 misses 3 July entirely and the CL row of 2 July.
    const auto& c1 = profiles[0];
    EXPECT_EQ(c1.days.size(), 3u);
    EXPECT_EQ(c1.slots(), 144u);
    EXPECT_EQ(c1.days[2], (sys_days{cr::year{2012} / cr::July / 4}));
    EXPECT_EQ(c1.slot_start(96), cr::sys_seconds{sys_days{cr::year{2012} / cr::July / 4}});

    const auto msgs = warnings.messages();
    ASSERT_EQ(msgs.size(), 2u);
    EXPECT_NE(msgs[0].find("customer 1"), std::string::npos);
    EXPECT_NE(msgs[0].find("1 day"), std::string::npos);
    EXPECT_NE(msgs[1].find("customer 3"), std::string::npos);
}

TEST(AusgridParse, MissingCategoryZeroFills) {
    std::ifstream in(testutil::fixture("ausgrid_small.csv"));
    ScopedWarningCapture quiet;
    const auto c1 = parse_ausgrid_csv(in, {Category::CL})[0];
    // CL rows of the fixture are zero from 6:00 on; 2 July has no CL row at all.
    for (std::size_t i = 48; i < 96; ++i) EXPECT_EQ(c1.load[i], 0.0);
    EXPECT_GT(c1.load[0], 0.0);
}

TEST(AusgridParse, Errors) {
    try {
        parse(std::string(kHeader) + row(1, "GG", "1/07/2012", 0.1) + "1,2.2,2000,GG,2/07/2012,0.1,0.2\n");
        FAIL() << "short row accepted";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
    try {
        parse(std::string(kHeader) + row(1, "GG", "1/07/2012", -0.1));
        FAIL() << "negative value accepted";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    EXPECT_THROW(parse(std::string(kHeader) + row(1, "XX", "1/07/2012", 0.1)), ParseError);
    EXPECT_THROW(parse(std::string(kHeader) + row(1, "GG", "1/13/2012", 0.1)), ParseError);
    EXPECT_THROW(parse(std::string(kHeader) + row(1, "GG", "1/07/2012", 0.1) + row(1, "GG", "01-Jul-12", 0.2)),
                 ValidationError);
    EXPECT_THROW(parse(""), ParseError);
    EXPECT_THROW(parse("\n\n"), ParseError);
    EXPECT_THROW(parse(row(1, "GG", "1/07/2012", 0.1)), ParseError);
    EXPECT_THROW(parse("Customer,Generator Capacity,Postcode\n"), ParseError);
}

TEST(Profile, ValidateRejectsBrokenSeries) {
    auto p = make_profile(1, std::vector<double>(48, 0.1), std::vector<double>(48, 0.2));
    EXPECT_NO_THROW(validate(p));
    auto q = p;
    q.load.pop_back();
    EXPECT_THROW(validate(q), ValidationError);
    q = p;
    q.generation[3] = -1.0;
    EXPECT_THROW(validate(q), ValidationError);
    q = p;
    q.load[3] = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(validate(q), ValidationError);
    q = p;
    q.days.push_back(q.days.front());
    EXPECT_THROW(validate(q), ValidationError);
    EXPECT_THROW(make_profile(1, std::vector<double>(47, 0.1), std::vector<double>(47, 0.1)), ValidationError);
    EXPECT_NO_THROW(make_profile(1, {0, 3, 3, 0}, {1, 1, 1, 3}, sys_days{cr::year{2012} / 1 / 1}, 360));
}

TEST(ScaleGeneration, IdentityInverseAndComposition) {
    const auto p = synthetic::household({.household_id = 5, .days = 20}, 11);
    const auto same = scale_generation(p, 1.0);
    EXPECT_EQ(same.generation, p.generation);
    EXPECT_EQ(same.load, p.load);

    const auto back = scale_generation(scale_generation(p, 2.0), 0.5);
    EXPECT_EQ(back.generation, p.generation);  // powers of two are exact
    EXPECT_DOUBLE_EQ(back.gen_scale, 1.0);

    const double a = 1.7, b = 0.37;
    const auto ab = scale_generation(p, a * b);
    const auto a_then_b = scale_generation(scale_generation(p, a), b);
    for (std::size_t i = 0; i < p.slots(); ++i)
        EXPECT_LE(std::abs(ab.generation[i] - a_then_b.generation[i]), 1e-12 * std::abs(ab.generation[i]));
    EXPECT_NEAR(a_then_b.gen_scale, a * b, 1e-15);
    EXPECT_EQ(a_then_b.load, p.load);
}

TEST(ScaleGeneration, RatioScalesLinearly) {
    const auto p = synthetic::household({.days = 30, .gen_to_load = 0.20}, 3);
    const auto t = annual_totals(scale_generation(p, 4.05));
    EXPECT_NEAR(t.total_gen / t.total_load, 0.81, 1e-6);
}

TEST(ScaleGeneration, RejectsBadFactors) {
    const auto p = make_profile(1, std::vector<double>(48, 0.1), std::vector<double>(48, 0.2));
    for (double f : {0.0, -1.0, std::numeric_limits<double>::infinity(), std::numeric_limits<double>::quiet_NaN()})
        EXPECT_THROW(scale_generation(p, f), ArgumentError) << f;
}

TEST(AnnualTotals, ConstantAndZeroSeries) {
    const auto t = annual_totals(make_profile(1, std::vector<double>(48, 0.5), std::vector<double>(48, 0.2)));
    EXPECT_DOUBLE_EQ(t.total_gen, 24.0);
    EXPECT_DOUBLE_EQ(t.avg_gen_power, 1.0);
    EXPECT_EQ(t.slots, 48u);
    const auto z = annual_totals(make_profile(1, std::vector<double>(48, 0.0), std::vector<double>(48, 0.2)));
    EXPECT_EQ(z.total_gen, 0.0);
    EXPECT_EQ(z.avg_gen_power, 0.0);
}

TEST(AnnualTotals, AdditiveUnderConcatenation) {
    const auto p = synthetic::household({.household_id = 9, .days = 12}, 4);
    const auto head = slice_days(p, 0, 5);
    const auto tail = slice_days(p, 5, 7);
    const auto joined = concatenate(head, tail);
    EXPECT_EQ(joined.generation, p.generation);
    EXPECT_EQ(joined.days, p.days);
    const auto th = annual_totals(head), tt = annual_totals(tail), tp = annual_totals(p);
    EXPECT_NEAR(th.total_gen + tt.total_gen, tp.total_gen, 1e-9 * tp.total_gen);
    EXPECT_NEAR(th.total_load + tt.total_load, tp.total_load, 1e-9 * tp.total_load);
    EXPECT_THROW(concatenate(tail, head), ArgumentError);
    EXPECT_THROW(slice_days(p, 10, 5), ArgumentError);
}

TEST(CanonicalFormat, CsvRoundTrip) {
    auto p = synthetic::household({.household_id = 42, .days = 3}, 8);
    p = scale_generation(p, 1.5);
    std::stringstream first;
    write_canonical_csv(first, p);
    std::istringstream in1(first.str());
    const auto q = read_canonical_csv(in1);
    EXPECT_EQ(q.household_id, 42);
    EXPECT_EQ(q.days, p.days);
    EXPECT_DOUBLE_EQ(q.gen_scale, 1.5);
    for (std::size_t i = 0; i < p.slots(); ++i) {
        EXPECT_NEAR(q.generation[i], p.generation[i], 5e-7);
        EXPECT_NEAR(q.load[i], p.load[i], 5e-7);
    }
    std::stringstream second;
    write_canonical_csv(second, q);
    EXPECT_EQ(second.str(), first.str());
    std::istringstream in2(second.str());
    const auto r = read_canonical_csv(in2);
    for (std::size_t i = 0; i < p.slots(); ++i) {
        EXPECT_NEAR(r.generation[i], q.generation[i], 1e-9);
        EXPECT_NEAR(r.load[i], q.load[i], 1e-9);
    }
}

TEST(CanonicalFormat, JsonRoundTripAndFiles) {
    std::ifstream in(testutil::fixture("ausgrid_small.csv"));
    ScopedWarningCapture quiet;
    const auto p = parse_ausgrid_csv(in)[0];  // has a gap day
    testutil::TempDir dir;
    for (auto fmt : {Format::Json, Format::Csv}) {
        const auto path = dir / (fmt == Format::Json ? "p.json" : "p.csv");
        save_profile(path, p, fmt);
        const auto q = load_profile(path);
        EXPECT_EQ(q.days, p.days);
        ASSERT_EQ(q.slots(), p.slots());
        for (std::size_t i = 0; i < p.slots(); ++i) {
            EXPECT_NEAR(q.generation[i], p.generation[i], 1e-9);
            EXPECT_NEAR(q.load[i], p.load[i], 1e-9);
        }
    }
}

TEST(CanonicalFormat, CsvLayoutAndErrors) {
    const auto p = make_profile(3, std::vector<double>(48, 0.125), std::vector<double>(48, 1.0));
    std::stringstream out;
    write_canonical_csv(out, p);
    const std::string text = out.str();
    EXPECT_NE(text.find("timestamp,gen_kwh,load_kwh\n2012-07-01T00:00,0.125000,1.000000\n"), std::string::npos);
    EXPECT_NE(text.find("2012-07-01T23:30,0.125000,1.000000\n"), std::string::npos);

    std::istringstream bad_header("a,b,c\n");
    EXPECT_THROW(read_canonical_csv(bad_header), ParseError);
    std::istringstream bad_value("timestamp,gen_kwh,load_kwh\n2012-07-01T00:00,x,1\n");
    try {
        read_canonical_csv(bad_value);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    std::istringstream partial_day("timestamp,gen_kwh,load_kwh\n2012-07-01T00:00,0,1\n");
    EXPECT_THROW(read_canonical_csv(partial_day), ValidationError);
    EXPECT_THROW(load_profile("/nonexistent/profile.csv"), ArgumentError);
}
