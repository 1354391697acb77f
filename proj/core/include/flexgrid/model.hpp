#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flexgrid/time.hpp"

namespace flexgrid {

enum class LoadClass {
    ShiftableProfile,
    ShiftableVolume,
    CurtailableReducible,
    CurtailableDisconnectable,
    Inflexible,
};

std::string to_string(LoadClass c);
LoadClass load_class_from_string(const std::string& text);

enum class AssetCategory { Load, Storage, Generation };

std::string to_string(AssetCategory c);
AssetCategory asset_category_from_string(const std::string& text);

// Load assets carry a LoadClass; storage and generation bypass the
// sheddable/controllable/acceptable categorization entirely.
struct AssetKind {
    AssetCategory category = AssetCategory::Load;
    std::optional<LoadClass> load_class;

    static AssetKind load(LoadClass c) { return {AssetCategory::Load, c}; }
    static AssetKind storage() { return {AssetCategory::Storage, std::nullopt}; }
    static AssetKind generation() { return {AssetCategory::Generation, std::nullopt}; }

    friend bool operator==(const AssetKind&, const AssetKind&) = default;
};

struct FlexAsset {
    std::string id;
    std::string name;
    AssetKind kind;
    double rated_power_kw = 0.0;
    std::optional<double> energy_capacity_kwh;  // storage only
    std::optional<double> round_trip_efficiency;  // storage only, in (0, 1]
    double sheddable_s = 0.0;     // S in [0, 1]
    double controllable_c = 0.0;  // C in [0, 1]
    double acceptable_a = 0.0;    // A in [0, 1]

    friend bool operator==(const FlexAsset&, const FlexAsset&) = default;
};

// Extra power drawn before (pre-load) or after (rebound) a flexibility action.
struct PowerPulse {
    double power_kw = 0.0;
    double duration_h = 0.0;

    friend bool operator==(const PowerPulse&, const PowerPulse&) = default;
};

// One flexibility-matrix row: the constraints of one (asset, product) pair.
struct FlexibilityParameters {
    std::string asset_id;
    std::string product_id;
    double flexible_power_kw = 0.0;
    double max_duration_h = 0.0;
    double tia_notice_h = 0.0;  // required notification lead time
    std::optional<PowerPulse> preload;
    std::optional<PowerPulse> rebound;
    WeeklyCalendar availability = WeeklyCalendar::always();
    double disutility_cost_per_event = 0.0;
    std::string disutility_unit;  // opaque currency/unit label
    double shed_time_s = 0.0;
    std::optional<int> max_activations_per_day;
    double min_recovery_h = 0.0;

    friend bool operator==(const FlexibilityParameters&, const FlexibilityParameters&) = default;
};

struct FlexibilityMatrix {
    std::vector<FlexibilityParameters> rows;

    std::vector<std::string> product_ids() const;  // unique, sorted

    friend bool operator==(const FlexibilityMatrix&, const FlexibilityMatrix&) = default;
};

// Uniformly sampled kW time series over one sample day (or longer).
struct LoadProfile {
    Timestamp start;
    int step_minutes = 15;
    std::vector<double> values_kw;
    Season season = Season::Winter;

    Timestamp time_at(std::size_t step) const;
    std::size_t size() const { return values_kw.size(); }

    friend bool operator==(const LoadProfile&, const LoadProfile&) = default;
};

// A flexibility product offered to the site: matrix rows are characterized
// per (asset, product) and the product's event length is the fallback
// maximum duration.
struct ProductSpec {
    std::string id;
    double event_duration_h = 1.0;

    friend bool operator==(const ProductSpec&, const ProductSpec&) = default;
};

// Scenario windows and stack ordering used by the assessment module.
struct AssessmentSetup {
    std::vector<std::string> stack;  // asset ids, cumulative order
    std::string product_id;
    // season -> event start per duration key ("1h", "4h").
    std::map<std::string, std::map<std::string, Timestamp>> windows;

    friend bool operator==(const AssessmentSetup&, const AssessmentSetup&) = default;
};

struct SeasonProfiles {
    LoadProfile total_load;
    std::map<std::string, LoadProfile> per_asset;

    friend bool operator==(const SeasonProfiles&, const SeasonProfiles&) = default;
};

struct SiteConfig {
    std::string site_name;
    double floor_area_m2 = 0.0;
    std::string notes;
    std::vector<FlexAsset> assets;
    std::vector<ProductSpec> products;  // targeted flexibility products
    FlexibilityMatrix matrix;
    LoadProfile total_load;
    // Loads: consumption; generation: forecast output; storage entries may be
    // omitted (zero baseline assumed).
    std::map<std::string, LoadProfile> per_asset_profiles;
    // Additional seasons beyond the one carried by total_load.
    std::map<std::string, SeasonProfiles> seasonal_profiles;  // key = season name
    std::optional<AssessmentSetup> assessment;

    const FlexAsset* find_asset(const std::string& id) const;
    // Profile set for a season; falls back to the primary fields when the
    // season matches total_load.season. Throws MissingAsset-style errors via
    // callers; returns nullptr when the season is absent.
    struct ProfileView {
        const LoadProfile* total = nullptr;
        const std::map<std::string, LoadProfile>* per_asset = nullptr;
    };
    ProfileView profiles_for(Season season) const;

    friend bool operator==(const SiteConfig&, const SiteConfig&) = default;
};

enum class EventDirection { Decrease, Increase };

std::string to_string(EventDirection d);
EventDirection direction_from_string(const std::string& text);

// Simplified DR event envelope (stands in for a full protocol message).
struct FlexEventRequest {
    std::string product_id;
    Timestamp window_start;
    double duration_h = 0.0;
    EventDirection direction = EventDirection::Decrease;
    double min_power_kw = 0.0;
    double notice_given_h = 0.0;
    std::optional<std::vector<double>> energy_weight;  // per step in window

    friend bool operator==(const FlexEventRequest&, const FlexEventRequest&) = default;
};

enum class ViolationCode {
    UnknownAsset,
    RangeViolation,
    DuplicateRow,
    OverlappingAvailability,
    MissingField,
    InvalidValue,
    ProfileInvariant,
};

std::string to_string(ViolationCode c);

// A broken invariant. Violations are data, not failures: validation never throws.
struct Violation {
    ViolationCode code;
    std::string field;   // offending field or entity
    std::string detail;  // human-readable rule description

    std::string str() const;
};

// Checks every structural invariant of the config; empty result = valid.
std::vector<Violation> validate_site(const SiteConfig& config);

// Total site load at a timestep index. Throws IndexOutOfRange past the profile end.
double total_load_at(const SiteConfig& config, std::size_t t);

}  // namespace flexgrid
