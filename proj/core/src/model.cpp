#include "flexgrid/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "flexgrid/errors.hpp"

namespace flexgrid {

namespace {

bool in_unit(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

std::string to_string(LoadClass c) {
    switch (c) {
        case LoadClass::ShiftableProfile: return "shiftable_profile";
        case LoadClass::ShiftableVolume: return "shiftable_volume";
        case LoadClass::CurtailableReducible: return "curtailable_reducible";
        case LoadClass::CurtailableDisconnectable: return "curtailable_disconnectable";
        case LoadClass::Inflexible: return "inflexible";
    }
    return "inflexible";
}

LoadClass load_class_from_string(const std::string& text) {
    if (text == "shiftable_profile") return LoadClass::ShiftableProfile;
    if (text == "shiftable_volume") return LoadClass::ShiftableVolume;
    if (text == "curtailable_reducible") return LoadClass::CurtailableReducible;
    if (text == "curtailable_disconnectable") return LoadClass::CurtailableDisconnectable;
    if (text == "inflexible") return LoadClass::Inflexible;
    throw ParseError("unknown load class '" + text + "'");
}

std::string to_string(AssetCategory c) {
    switch (c) {
        case AssetCategory::Load: return "load";
        case AssetCategory::Storage: return "storage";
        case AssetCategory::Generation: return "generation";
    }
    return "load";
}

AssetCategory asset_category_from_string(const std::string& text) {
    if (text == "load") return AssetCategory::Load;
    if (text == "storage") return AssetCategory::Storage;
    if (text == "generation") return AssetCategory::Generation;
    throw ParseError("unknown asset kind '" + text + "'");
}

std::string to_string(EventDirection d) {
    return d == EventDirection::Decrease ? "decrease" : "increase";
}

EventDirection direction_from_string(const std::string& text) {
    if (text == "decrease") return EventDirection::Decrease;
    if (text == "increase") return EventDirection::Increase;
    throw ParseError("unknown event direction '" + text + "'");
}

std::vector<std::string> FlexibilityMatrix::product_ids() const {
    std::set<std::string> ids;
    for (const auto& r : rows) ids.insert(r.product_id);
    return {ids.begin(), ids.end()};
}

Timestamp LoadProfile::time_at(std::size_t step) const {
    return add_minutes(start, static_cast<std::int64_t>(step) * step_minutes);
}

const FlexAsset* SiteConfig::find_asset(const std::string& id) const {
    for (const auto& a : assets) {
        if (a.id == id) return &a;
    }
    return nullptr;
}

SiteConfig::ProfileView SiteConfig::profiles_for(Season season) const {
    if (total_load.season == season) return {&total_load, &per_asset_profiles};
    auto it = seasonal_profiles.find(to_string(season));
    if (it == seasonal_profiles.end()) return {};
    return {&it->second.total_load, &it->second.per_asset};
}

std::string to_string(ViolationCode c) {
    switch (c) {
        case ViolationCode::UnknownAsset: return "UnknownAsset";
        case ViolationCode::RangeViolation: return "RangeViolation";
        case ViolationCode::DuplicateRow: return "DuplicateRow";
        case ViolationCode::OverlappingAvailability: return "OverlappingAvailability";
        case ViolationCode::MissingField: return "MissingField";
        case ViolationCode::InvalidValue: return "InvalidValue";
        case ViolationCode::ProfileInvariant: return "ProfileInvariant";
    }
    return "InvalidValue";
}

std::string Violation::str() const {
    return to_string(code) + "(" + field + "): " + detail;
}

namespace {

void check_profile(const LoadProfile& p, const std::string& label, std::vector<Violation>& out) {
    if (p.step_minutes <= 0 || 60 % p.step_minutes != 0) {
        out.push_back({ViolationCode::InvalidValue, label + ".step_minutes",
                       "step must be a positive divisor of 60"});
    }
    if (p.values_kw.empty()) {
        out.push_back({ViolationCode::ProfileInvariant, label + ".values_kw",
                       "profile must be non-empty"});
    }
    for (std::size_t i = 0; i < p.values_kw.size(); ++i) {
        if (!finite_nonneg(p.values_kw[i])) {
            out.push_back({ViolationCode::ProfileInvariant, label + ".values_kw",
                           "value at step " + std::to_string(i) + " must be finite and >= 0"});
            break;
        }
    }
}

void check_profile_set(const SiteConfig& config, const LoadProfile& total,
                       const std::map<std::string, LoadProfile>& per_asset,
                       const std::string& label, std::vector<Violation>& out) {
    check_profile(total, label + ".total_load", out);
    for (const auto& [asset_id, profile] : per_asset) {
        if (config.find_asset(asset_id) == nullptr) {
            out.push_back({ViolationCode::UnknownAsset, label + ".per_asset_profiles",
                           "profile references unknown asset '" + asset_id + "'"});
        }
        check_profile(profile, label + ".per_asset_profiles[" + asset_id + "]", out);
        // Sub-metering may be partial, but no per-asset reading may exceed the total.
        std::size_t n = std::min(profile.values_kw.size(), total.values_kw.size());
        for (std::size_t t = 0; t < n; ++t) {
            if (profile.values_kw[t] > total.values_kw[t] + 1e-9) {
                out.push_back({ViolationCode::ProfileInvariant,
                               label + ".per_asset_profiles[" + asset_id + "]",
                               "exceeds total load at step " + std::to_string(t)});
                break;
            }
        }
    }
}

}  // namespace

std::vector<Violation> validate_site(const SiteConfig& config) {
    std::vector<Violation> out;

    if (!(std::isfinite(config.floor_area_m2) && config.floor_area_m2 > 0.0)) {
        out.push_back({ViolationCode::RangeViolation, "floor_area_m2", "must be positive"});
    }

    std::set<std::string> asset_ids;
    for (const auto& a : config.assets) {
        if (!asset_ids.insert(a.id).second) {
            out.push_back({ViolationCode::DuplicateRow, "assets", "duplicate asset id '" + a.id + "'"});
        }
        if (!in_unit(a.sheddable_s))
            out.push_back({ViolationCode::RangeViolation, "sheddable_S",
                           "asset '" + a.id + "': S must be in [0,1]"});
        if (!in_unit(a.controllable_c))
            out.push_back({ViolationCode::RangeViolation, "controllable_C",
                           "asset '" + a.id + "': C must be in [0,1]"});
        if (!in_unit(a.acceptable_a))
            out.push_back({ViolationCode::RangeViolation, "acceptable_A",
                           "asset '" + a.id + "': A must be in [0,1]"});
        if (!finite_nonneg(a.rated_power_kw))
            out.push_back({ViolationCode::RangeViolation, "rated_power_kW",
                           "asset '" + a.id + "': must be finite and >= 0"});

        bool is_storage = a.kind.category == AssetCategory::Storage;
        if (is_storage != a.energy_capacity_kwh.has_value()) {
            out.push_back({ViolationCode::MissingField, "energy_capacity_kWh",
                           "asset '" + a.id + "': present iff kind = storage"});
        }
        if (a.energy_capacity_kwh && !finite_nonneg(*a.energy_capacity_kwh)) {
            out.push_back({ViolationCode::RangeViolation, "energy_capacity_kWh",
                           "asset '" + a.id + "': must be finite and >= 0"});
        }
        if (is_storage) {
            if (!a.round_trip_efficiency ||
                !(std::isfinite(*a.round_trip_efficiency) && *a.round_trip_efficiency > 0.0 &&
                  *a.round_trip_efficiency <= 1.0)) {
                out.push_back({ViolationCode::RangeViolation, "round_trip_efficiency",
                               "asset '" + a.id + "': must be in (0,1] for storage"});
            }
        } else if (a.round_trip_efficiency) {
            out.push_back({ViolationCode::InvalidValue, "round_trip_efficiency",
                           "asset '" + a.id + "': only storage carries an efficiency"});
        }
        if (a.kind.category == AssetCategory::Load) {
            if (!a.kind.load_class) {
                out.push_back({ViolationCode::MissingField, "load_class",
                               "asset '" + a.id + "': loads carry a load class"});
            }
        } else if (a.kind.load_class) {
            out.push_back({ViolationCode::InvalidValue, "load_class",
                           "asset '" + a.id + "': storage/generation carry no load class"});
        }
    }

    std::set<std::pair<std::string, std::string>> row_keys;
    for (const auto& r : config.matrix.rows) {
        const FlexAsset* asset = config.find_asset(r.asset_id);
        if (asset == nullptr) {
            out.push_back({ViolationCode::UnknownAsset, r.asset_id,
                           "matrix row references unknown asset"});
        }
        if (!row_keys.insert({r.asset_id, r.product_id}).second) {
            out.push_back({ViolationCode::DuplicateRow, "matrix",
                           "duplicate (asset, product) pair (" + r.asset_id + ", " + r.product_id + ")"});
        }
        if (!finite_nonneg(r.flexible_power_kw)) {
            out.push_back({ViolationCode::RangeViolation, "flexible_power_kW",
                           "row (" + r.asset_id + ", " + r.product_id + "): must be finite and >= 0"});
        } else if (asset != nullptr && r.flexible_power_kw > asset->rated_power_kw + 1e-9) {
            out.push_back({ViolationCode::RangeViolation, "flexible_power_kW",
                           "row (" + r.asset_id + ", " + r.product_id +
                               "): exceeds the asset's rated power"});
        }
        if (!(std::isfinite(r.max_duration_h) && r.max_duration_h > 0.0)) {
            out.push_back({ViolationCode::RangeViolation, "max_duration_h",
                           "row (" + r.asset_id + ", " + r.product_id + "): must be positive"});
        }
        if (!finite_nonneg(r.tia_notice_h)) {
            out.push_back({ViolationCode::RangeViolation, "tia_notice_h",
                           "row (" + r.asset_id + ", " + r.product_id + "): must be >= 0"});
        }
        if (!finite_nonneg(r.disutility_cost_per_event)) {
            out.push_back({ViolationCode::RangeViolation, "disutility_cost_per_event",
                           "row (" + r.asset_id + ", " + r.product_id + "): must be >= 0"});
        }
        if (!finite_nonneg(r.shed_time_s)) {
            out.push_back({ViolationCode::RangeViolation, "shed_time_s",
                           "row (" + r.asset_id + ", " + r.product_id + "): must be >= 0"});
        }
        if (!finite_nonneg(r.min_recovery_h)) {
            out.push_back({ViolationCode::RangeViolation, "min_recovery_h",
                           "row (" + r.asset_id + ", " + r.product_id + "): must be >= 0"});
        }
        if (r.max_activations_per_day && *r.max_activations_per_day <= 0) {
            out.push_back({ViolationCode::RangeViolation, "max_activations_per_day",
                           "row (" + r.asset_id + ", " + r.product_id + "): must be positive"});
        }
        if (!r.availability.well_formed()) {
            out.push_back({ViolationCode::OverlappingAvailability, "availability",
                           "row (" + r.asset_id + ", " + r.product_id +
                               "): windows must be non-overlapping within [0,24)"});
        }
    }

    check_profile_set(config, config.total_load, config.per_asset_profiles, "", out);
    for (const auto& [season, set] : config.seasonal_profiles) {
        check_profile_set(config, set.total_load, set.per_asset, "seasonal_profiles[" + season + "]",
                          out);
    }

    if (config.assessment) {
        for (const auto& id : config.assessment->stack) {
            if (config.find_asset(id) == nullptr) {
                out.push_back({ViolationCode::UnknownAsset, "assessment.stack",
                               "stack references unknown asset '" + id + "'"});
            }
        }
    }

    return out;
}

double total_load_at(const SiteConfig& config, std::size_t t) {
    if (t >= config.total_load.values_kw.size()) {
        throw IndexOutOfRange("timestep " + std::to_string(t) + " past profile end (" +
                              std::to_string(config.total_load.values_kw.size()) + " steps)");
    }
    return config.total_load.values_kw[t];
}

}  // namespace flexgrid
