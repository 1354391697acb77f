#include <doctest.h>

#include <cstdlib>

#include "flexgrid/errors.hpp"
#include "flexgrid/json_io.hpp"
#include "flexgrid/model.hpp"

using namespace flexgrid;

namespace {

SiteConfig small_config() {
    SiteConfig c;
    c.site_name = "unit";
    c.floor_area_m2 = 1000.0;

    FlexAsset battery;
    battery.id = "bat";
    battery.name = "battery";
    battery.kind = AssetKind::storage();
    battery.rated_power_kw = 36.0;
    battery.energy_capacity_kwh = 48.0;
    battery.round_trip_efficiency = 0.9;
    battery.sheddable_s = 1.0;
    battery.controllable_c = 1.0;
    battery.acceptable_a = 1.0;
    c.assets.push_back(battery);

    FlexAsset hvac;
    hvac.id = "hvac";
    hvac.name = "hvac";
    hvac.kind = AssetKind::load(LoadClass::ShiftableProfile);
    hvac.rated_power_kw = 50.0;
    hvac.sheddable_s = 1.0;
    hvac.controllable_c = 0.8;
    hvac.acceptable_a = 0.5;
    c.assets.push_back(hvac);

    FlexibilityParameters row;
    row.asset_id = "bat";
    row.product_id = "dr";
    row.flexible_power_kw = 36.0;
    row.max_duration_h = 4.0;
    row.max_activations_per_day = 1;
    row.min_recovery_h = 2.0;
    c.matrix.rows.push_back(row);

    row.asset_id = "hvac";
    row.flexible_power_kw = 20.0;
    row.rebound = PowerPulse{10.0, 1.0};
    c.matrix.rows.push_back(row);

    c.total_load.start = make_timestamp(2018, 1, 15);
    c.total_load.step_minutes = 15;
    c.total_load.season = Season::Winter;
    c.total_load.values_kw.assign(96, 100.0);

    LoadProfile hv = c.total_load;
    hv.values_kw.assign(96, 40.0);
    c.per_asset_profiles["hvac"] = hv;
    return c;
}

bool has_violation(const std::vector<Violation>& vs, ViolationCode code, const std::string& field) {
    for (const auto& v : vs) {
        if (v.code == code && v.field.find(field) != std::string::npos) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("calendar timestamps round-trip and know their weekday") {
    Timestamp t = parse_iso8601("2018-01-15T11:30:00");
    CHECK(format_iso8601(t) == "2018-01-15T11:30:00");
    CHECK(weekday_of(t) == 0);  // a Monday
    CHECK(weekday_of(parse_iso8601("2018-07-16T00:00:00")) == 0);
    CHECK(weekday_of(parse_iso8601("2018-01-21T00:00:00")) == 6);  // Sunday
    CHECK(hour_of_day(t) == doctest::Approx(11.5));
    CHECK(format_iso8601(parse_iso8601("2018-01-15")) == "2018-01-15T00:00:00");
    CHECK_THROWS_AS(parse_iso8601("not a date"), ParseError);
    CHECK_THROWS_AS(parse_iso8601("2018-13-01T00:00:00"), DomainError);
}

TEST_CASE("weekly calendar window membership") {
    WeeklyCalendar cal;
    cal.windows[0] = {{8.0, 12.0}, {14.0, 18.0}};
    CHECK(cal.permits(0, 8.0));
    CHECK(cal.permits(0, 11.99));
    CHECK_FALSE(cal.permits(0, 12.0));  // end is exclusive
    CHECK_FALSE(cal.permits(0, 13.0));
    CHECK(cal.permits(0, 14.0));
    CHECK_FALSE(cal.permits(1, 9.0));
    CHECK(cal.well_formed());

    cal.windows[0] = {{8.0, 12.0}, {11.0, 13.0}};
    CHECK_FALSE(cal.well_formed());
    cal.windows[0] = {{-1.0, 5.0}};
    CHECK_FALSE(cal.well_formed());
    CHECK(WeeklyCalendar::always().permits(3, 23.75));
    CHECK(WeeklyCalendar::always().is_always());
}

TEST_CASE("validate_site accepts a well-formed config") {
    CHECK(validate_site(small_config()).empty());
}

TEST_CASE("validate_site flags a matrix row referencing an unknown asset") {
    SiteConfig c = small_config();
    c.matrix.rows[0].asset_id = "b99";
    auto vs = validate_site(c);
    CHECK(has_violation(vs, ViolationCode::UnknownAsset, "b99"));
}

TEST_CASE("validate_site flags S outside [0,1]") {
    SiteConfig c = small_config();
    c.assets[1].sheddable_s = 1.2;
    auto vs = validate_site(c);
    CHECK(has_violation(vs, ViolationCode::RangeViolation, "sheddable_S"));
}

TEST_CASE("validate_site reports one broken invariant per mutation") {
    // Mutating exactly one invariant must surface at least one violation
    // naming the offending field.
    struct Case {
        void (*mutate)(SiteConfig&);
        ViolationCode code;
        const char* field;
    };
    const Case cases[] = {
        {[](SiteConfig& c) { c.assets[1].controllable_c = -0.1; },
         ViolationCode::RangeViolation, "controllable_C"},
        {[](SiteConfig& c) { c.assets[1].acceptable_a = 2.0; },
         ViolationCode::RangeViolation, "acceptable_A"},
        {[](SiteConfig& c) { c.assets[0].energy_capacity_kwh.reset(); },
         ViolationCode::MissingField, "energy_capacity_kWh"},
        {[](SiteConfig& c) { c.assets[1].energy_capacity_kwh = 10.0; },
         ViolationCode::MissingField, "energy_capacity_kWh"},
        {[](SiteConfig& c) { c.assets[0].round_trip_efficiency = 1.5; },
         ViolationCode::RangeViolation, "round_trip_efficiency"},
        {[](SiteConfig& c) { c.matrix.rows.push_back(c.matrix.rows[0]); },
         ViolationCode::DuplicateRow, "matrix"},
        {[](SiteConfig& c) { c.matrix.rows[0].flexible_power_kw = 99.0; },
         ViolationCode::RangeViolation, "flexible_power_kW"},
        {[](SiteConfig& c) { c.matrix.rows[0].max_duration_h = 0.0; },
         ViolationCode::RangeViolation, "max_duration_h"},
        {[](SiteConfig& c) { c.matrix.rows[0].availability.windows[2] = {{4.0, 2.0}}; },
         ViolationCode::OverlappingAvailability, "availability"},
        {[](SiteConfig& c) { c.total_load.values_kw[10] = -5.0; },
         ViolationCode::ProfileInvariant, "values_kw"},
        {[](SiteConfig& c) { c.total_load.step_minutes = 7; },
         ViolationCode::InvalidValue, "step_minutes"},
        {[](SiteConfig& c) { c.per_asset_profiles["hvac"].values_kw[5] = 500.0; },
         ViolationCode::ProfileInvariant, "hvac"},
        {[](SiteConfig& c) { c.floor_area_m2 = 0.0; },
         ViolationCode::RangeViolation, "floor_area_m2"},
    };
    for (const auto& tc : cases) {
        SiteConfig c = small_config();
        tc.mutate(c);
        auto vs = validate_site(c);
        CAPTURE(tc.field);
        REQUIRE_FALSE(vs.empty());
        CHECK(has_violation(vs, tc.code, tc.field));
    }
}

TEST_CASE("total_load_at looks up the profile and bounds-checks") {
    SiteConfig c = small_config();
    c.total_load.values_kw = {100.0, 120.0, 140.0};
    CHECK(total_load_at(c, 2) == 140.0);
    CHECK_THROWS_AS(total_load_at(c, 3), IndexOutOfRange);
}

TEST_CASE("total_load_at is finite and nonnegative across a valid config") {
    SiteConfig c = small_config();
    for (std::size_t t = 0; t < c.total_load.size(); ++t) {
        double v = total_load_at(c, t);
        CHECK(v >= 0.0);
        CHECK(v == v);
    }
}

TEST_CASE("reference config: winter sample-day peak is about 140 kW") {
    const char* data = std::getenv("FLEXGRID_DATA");
    REQUIRE(data != nullptr);
    std::string dir = std::string(data) + "/reference_site";
    SiteConfig c = parse_site_json(read_text_file(dir + "/site.json"), dir);
    CHECK(validate_site(c).empty());
    double peak = 0.0;
    for (std::size_t t = 0; t < c.total_load.size(); ++t) peak = std::max(peak, total_load_at(c, t));
    CHECK(peak == doctest::Approx(140.0).epsilon(0.01));
}

TEST_CASE("site config JSON round-trips to an identical structure") {
    SiteConfig c = small_config();
    c.assessment = AssessmentSetup{{"bat", "hvac"}, "dr", {}};
    c.assessment->windows["winter"]["1h"] = make_timestamp(2018, 1, 15, 11);
    c.products.push_back({"dr", 4.0});
    c.notes = "round trip";
    c.matrix.rows[1].availability.windows[5] = {{6.0, 18.0}};
    c.matrix.rows[1].preload = PowerPulse{2.0, 0.5};
    c.matrix.rows[1].disutility_unit = "EUR";
    c.seasonal_profiles["summer"] = {c.total_load, {{"hvac", c.per_asset_profiles["hvac"]}}};
    c.seasonal_profiles["summer"].total_load.season = Season::Summer;

    SiteConfig back = parse_site_json(site_to_json(c));
    CHECK(back == c);
    // Canonical text is stable too.
    CHECK(site_to_json(back) == site_to_json(c));
}

TEST_CASE("matrix JSON round-trips") {
    SiteConfig c = small_config();
    FlexibilityMatrix back = parse_matrix_json(matrix_to_json(c.matrix));
    CHECK(back == c.matrix);
}

TEST_CASE("malformed JSON reports the byte offset") {
    try {
        parse_site_json("{\"format_version\": 1, oops");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("byte") != std::string::npos);
    }
}

TEST_CASE("profile CSV parses the documented shape") {
    std::string csv =
        "timestamp,load_kw\n"
        "2018-01-15T00:00:00,100\n"
        "2018-01-15T00:15:00,120.5\n"
        "2018-01-15T00:30:00,140\n";
    LoadProfile p = parse_profile_csv(csv, Season::Winter);
    CHECK(p.step_minutes == 15);
    CHECK(p.values_kw == std::vector<double>{100.0, 120.5, 140.0});
    CHECK(format_iso8601(p.start) == "2018-01-15T00:00:00");
    // Round-trip through the writer.
    LoadProfile back = parse_profile_csv(profile_to_csv(p), Season::Winter);
    CHECK(back == p);
}

TEST_CASE("profile CSV rejects malformed input") {
    CHECK_THROWS_AS(parse_profile_csv("time,load\n", Season::Winter), ParseError);
    CHECK_THROWS_AS(parse_profile_csv("timestamp,load_kw\n2018-01-15T00:00:00,1\n", Season::Winter),
                    ParseError);
    // Non-uniform spacing.
    CHECK_THROWS_AS(parse_profile_csv("timestamp,load_kw\n"
                                      "2018-01-15T00:00:00,1\n"
                                      "2018-01-15T00:15:00,2\n"
                                      "2018-01-15T00:45:00,3\n",
                                      Season::Winter),
                    ParseError);
    // Decreasing timestamps.
    CHECK_THROWS_AS(parse_profile_csv("timestamp,load_kw\n"
                                      "2018-01-15T01:00:00,1\n"
                                      "2018-01-15T00:45:00,2\n",
                                      Season::Winter),
                    ParseError);
    // Negative load.
    CHECK_THROWS_AS(parse_profile_csv("timestamp,load_kw\n"
                                      "2018-01-15T00:00:00,-1\n"
                                      "2018-01-15T00:15:00,2\n",
                                      Season::Winter),
                    ParseError);
}
