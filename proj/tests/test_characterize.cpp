#include <doctest.h>

#include <cstdint>
#include <cstdlib>

#include "flexgrid/characterize.hpp"
#include "flexgrid/errors.hpp"
#include "flexgrid/json_io.hpp"
#include "flexgrid/model.hpp"

using namespace flexgrid;

namespace {

// Deterministic uniform doubles for the property checks (engine-only use of
// the stdlib keeps the draws reproducible across platforms).
struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed) {}
    double unit() {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        return static_cast<double>((state >> 11) & ((1ULL << 53) - 1)) / (1ULL << 53);
    }
};

AuditAnswers hvac_answers() {
    AuditAnswers a;
    a.asset_id = "hvac";
    a.audit_type = 2;
    a.is_sheddable = true;
    a.shed_fraction = 1.0;
    a.has_control_point = true;
    a.controllable_fraction = 1.0;
    a.acceptable_fraction = 0.1;
    a.shift_or_curtail = FlexAction::Shift;
    a.rebound_expected = true;
    return a;
}

}  // namespace

TEST_CASE("flexibility fraction follows S * min(C, A)") {
    CHECK(flexibility_fraction(0.0, 0.8, 0.5) == 0.0);
    CHECK(flexibility_fraction(1.0, 1.0, 1.0) == 1.0);
    CHECK(flexibility_fraction(1.0, 0.5, 0.3) == doctest::Approx(0.3));
    CHECK_THROWS_AS(flexibility_fraction(1.2, 0.5, 0.5), DomainError);
    CHECK_THROWS_AS(flexibility_fraction(0.5, -0.1, 0.5), DomainError);
    CHECK_THROWS_AS(flexibility_fraction(0.5, 0.5, 1.01), DomainError);
}

TEST_CASE("resource potential scales the load level") {
    CHECK(resource_potential(0.0, 100.0) == 0.0);
    CHECK(resource_potential(1.0, 140.0) == 140.0);
    CHECK(resource_potential(0.26, 140.0) == doctest::Approx(36.4));
    CHECK_THROWS_AS(resource_potential(1.5, 10.0), DomainError);
    CHECK_THROWS_AS(resource_potential(0.5, -1.0), DomainError);
}

TEST_CASE("flexibility fraction: bound, monotonicity and linearity properties") {
    Rng rng(20180115);
    for (int i = 0; i < 1500; ++i) {
        double s = rng.unit(), c = rng.unit(), a = rng.unit();
        double f = flexibility_fraction(s, c, a);
        CHECK(f >= 0.0);
        CHECK(f <= 1.0);
        // F never exceeds any single factor.
        CHECK(f <= std::min({s, c, a}) + 1e-12);

        // Monotone nondecreasing in each argument.
        double bump = rng.unit() * (1.0 - s);
        CHECK(flexibility_fraction(s + bump, c, a) >= f - 1e-12);
        bump = rng.unit() * (1.0 - c);
        CHECK(flexibility_fraction(s, c + bump, a) >= f - 1e-12);
        bump = rng.unit() * (1.0 - a);
        CHECK(flexibility_fraction(s, c, a + bump) >= f - 1e-12);

        // Resource potential is linear in the load.
        double load = rng.unit() * 500.0;
        double k = rng.unit() * 4.0;
        CHECK(resource_potential(f, k * load) ==
              doctest::Approx(k * resource_potential(f, load)).epsilon(1e-12));
    }
}

TEST_CASE("classify_load decision table") {
    AuditAnswers a = hvac_answers();
    CHECK(classify_load(a) == LoadClass::ShiftableProfile);

    a.rebound_expected = false;
    CHECK(classify_load(a) == LoadClass::ShiftableVolume);

    a.shift_or_curtail = FlexAction::Curtail;
    CHECK(classify_load(a) == LoadClass::CurtailableReducible);

    a.shift_or_curtail = FlexAction::Disconnect;
    CHECK(classify_load(a) == LoadClass::CurtailableDisconnectable);

    a = hvac_answers();
    a.is_sheddable = false;
    CHECK(classify_load(a) == LoadClass::Inflexible);

    a = hvac_answers();
    a.has_control_point = false;
    CHECK(classify_load(a) == LoadClass::Inflexible);

    a = hvac_answers();
    a.acceptable_fraction = 0.0;
    CHECK(classify_load(a) == LoadClass::Inflexible);

    a = hvac_answers();
    a.shift_or_curtail = FlexAction::None;
    CHECK(classify_load(a) == LoadClass::Inflexible);

    // Deterministic: same answers, same class.
    CHECK(classify_load(hvac_answers()) == classify_load(hvac_answers()));
}

TEST_CASE("characterize_site eliminates inflexible loads") {
    FlexAsset lighting;
    lighting.id = "light";
    lighting.kind = AssetKind::load(LoadClass::Inflexible);
    lighting.rated_power_kw = 10.0;

    AuditAnswers a;
    a.asset_id = "light";
    a.is_sheddable = false;

    FlexibilityMatrix m = characterize_site({lighting}, {a}, {{"dr", 4.0}});
    CHECK(m.rows.empty());
}

TEST_CASE("characterize_site passes storage ratings straight through") {
    FlexAsset bat;
    bat.id = "bat";
    bat.kind = AssetKind::storage();
    bat.rated_power_kw = 36.0;
    bat.energy_capacity_kwh = 48.0;
    bat.round_trip_efficiency = 0.95;

    FlexibilityMatrix m = characterize_site({bat}, {}, {{"dr", 4.0}});
    REQUIRE(m.rows.size() == 1);
    CHECK(m.rows[0].asset_id == "bat");
    CHECK(m.rows[0].flexible_power_kw == 36.0);
    CHECK(m.rows[0].max_duration_h == 4.0);      // product event length
    CHECK(m.rows[0].tia_notice_h == 0.0);        // default
    CHECK(m.rows[0].max_activations_per_day == 1);
    CHECK(m.rows[0].min_recovery_h == 4.0);
    CHECK(m.rows[0].availability.is_always());
}

TEST_CASE("characterize_site applies Eq-style math to loads") {
    FlexAsset hvac;
    hvac.id = "hvac";
    hvac.kind = AssetKind::load(LoadClass::ShiftableProfile);
    hvac.rated_power_kw = 50.0;
    hvac.sheddable_s = 1.0;
    hvac.controllable_c = 1.0;
    hvac.acceptable_a = 0.1;

    AuditAnswers a = hvac_answers();
    FlexibilityMatrix m = characterize_site({hvac}, {a}, {{"dr", 4.0}});
    REQUIRE(m.rows.size() == 1);
    CHECK(m.rows[0].flexible_power_kw == doctest::Approx(5.0));
    // Rebound expected but not estimated: defaults to the flexible power over
    // half the event.
    REQUIRE(m.rows[0].rebound.has_value());
    CHECK(m.rows[0].rebound->power_kw == doctest::Approx(5.0));
    CHECK(m.rows[0].rebound->duration_h == doctest::Approx(2.0));
}

TEST_CASE("characterize_site emits one row per product and keeps pairs unique") {
    FlexAsset hvac;
    hvac.id = "hvac";
    hvac.kind = AssetKind::load(LoadClass::ShiftableVolume);
    hvac.rated_power_kw = 40.0;
    hvac.sheddable_s = 0.5;
    hvac.controllable_c = 1.0;
    hvac.acceptable_a = 1.0;

    AuditAnswers a = hvac_answers();
    a.shed_fraction = 0.5;
    a.acceptable_fraction = 1.0;
    a.rebound_expected = false;

    FlexibilityMatrix m = characterize_site({hvac}, {a}, {{"fast", 0.5}, {"slow", 4.0}});
    REQUIRE(m.rows.size() == 2);
    CHECK(m.rows[0].product_id == "fast");
    CHECK(m.rows[0].max_duration_h == 0.5);
    CHECK(m.rows[1].product_id == "slow");
    CHECK(m.rows[1].max_duration_h == 4.0);
    CHECK(m.rows[0].flexible_power_kw == doctest::Approx(20.0));

    // Emitted rows satisfy the matrix invariants when wrapped in a config.
    SiteConfig c;
    c.site_name = "x";
    c.floor_area_m2 = 10.0;
    c.assets = {hvac};
    c.matrix = m;
    c.total_load.start = make_timestamp(2018, 1, 15);
    c.total_load.step_minutes = 15;
    c.total_load.values_kw.assign(4, 50.0);
    CHECK(validate_site(c).empty());
}

TEST_CASE("characterize_site requires answers for every load") {
    FlexAsset hvac;
    hvac.id = "hvac";
    hvac.kind = AssetKind::load(LoadClass::ShiftableProfile);
    hvac.rated_power_kw = 50.0;
    CHECK_THROWS_AS(characterize_site({hvac}, {}, {{"dr", 4.0}}), MissingAnswers);
}

TEST_CASE("intake report: empty site is header-only") {
    SiteConfig c;
    c.site_name = "empty";
    c.floor_area_m2 = 100.0;
    std::string report = audit_intake_report(c, {});
    CHECK(report.find("empty") != std::string::npos);
    CHECK(report.find("missing: none") != std::string::npos);
}

TEST_CASE("intake report flags unanswered assets") {
    SiteConfig c;
    c.site_name = "partial";
    c.floor_area_m2 = 100.0;
    FlexAsset hvac;
    hvac.id = "ahu1";
    hvac.name = "AHU 1";
    hvac.kind = AssetKind::load(LoadClass::ShiftableProfile);
    hvac.rated_power_kw = 20.0;
    c.assets.push_back(hvac);
    std::string report = audit_intake_report(c, {});
    CHECK(report.find("UNANSWERED") != std::string::npos);
    CHECK(report.find("missing: ahu1") != std::string::npos);
}

TEST_CASE("intake report on the reference site names the HVAC candidates") {
    const char* data = std::getenv("FLEXGRID_DATA");
    REQUIRE(data != nullptr);
    std::string dir = std::string(data) + "/reference_site";
    SiteConfig c = parse_site_json(read_text_file(dir + "/site.json"), dir);
    auto answers = parse_answers_json(read_text_file(dir + "/answers.json"));
    std::string report = audit_intake_report(c, answers);
    CHECK(report.find("AHU") != std::string::npos);
    CHECK(report.find("VRF") != std::string::npos);
    CHECK(report.find("shiftable_profile") != std::string::npos);
    // Deterministic ordering by asset id.
    CHECK(report.find("battery  (") < report.find("hvac  ("));
    CHECK(report.find("hvac  (") < report.find("pv  ("));
}
