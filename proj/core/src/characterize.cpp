#include "flexgrid/characterize.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "flexgrid/errors.hpp"

namespace flexgrid {

namespace {

bool in_unit(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

const AuditAnswers* find_answers(const std::vector<AuditAnswers>& answers, const std::string& id) {
    for (const auto& a : answers) {
        if (a.asset_id == id) return &a;
    }
    return nullptr;
}

// Applied defaults for one row, for the intake report.
struct AppliedDefaults {
    std::vector<std::string> fields;
};

FlexibilityParameters assemble_row(const FlexAsset& asset, const ProductSpec& product,
                                   double flexible_power_kw, const ParameterEstimates& est,
                                   bool rebound_expected, AppliedDefaults* applied) {
    FlexibilityParameters row;
    row.asset_id = asset.id;
    row.product_id = product.id;
    row.flexible_power_kw = est.flexible_power_kw.value_or(flexible_power_kw);
    auto note = [&](const char* f) {
        if (applied) applied->fields.push_back(f);
    };
    if (est.max_duration_h) row.max_duration_h = *est.max_duration_h;
    else { row.max_duration_h = product.event_duration_h; note("max_duration_h"); }
    if (est.tia_notice_h) row.tia_notice_h = *est.tia_notice_h;
    else { row.tia_notice_h = 0.0; note("tia_notice_h"); }
    row.preload = est.preload;
    if (est.rebound) {
        row.rebound = est.rebound;
    } else if (rebound_expected) {
        // No magnitude known at audit time: assume the flexible power is paid
        // back over half the event.
        row.rebound = PowerPulse{row.flexible_power_kw, product.event_duration_h / 2.0};
        note("rebound");
    }
    if (est.availability) row.availability = *est.availability;
    else { row.availability = WeeklyCalendar::always(); note("availability"); }
    if (est.disutility_cost_per_event) row.disutility_cost_per_event = *est.disutility_cost_per_event;
    else { row.disutility_cost_per_event = 0.0; note("disutility_cost_per_event"); }
    row.disutility_unit = est.disutility_unit.value_or("");
    if (est.shed_time_s) row.shed_time_s = *est.shed_time_s;
    else { row.shed_time_s = 0.0; note("shed_time_s"); }
    if (est.max_activations_per_day) row.max_activations_per_day = *est.max_activations_per_day;
    else { row.max_activations_per_day = 1; note("max_activations_per_day"); }
    if (est.min_recovery_h) row.min_recovery_h = *est.min_recovery_h;
    else { row.min_recovery_h = product.event_duration_h; note("min_recovery_h"); }
    return row;
}

}  // namespace

std::string to_string(FlexAction a) {
    switch (a) {
        case FlexAction::Shift: return "shift";
        case FlexAction::Curtail: return "curtail";
        case FlexAction::Disconnect: return "disconnect";
        case FlexAction::None: return "none";
    }
    return "none";
}

FlexAction flex_action_from_string(const std::string& text) {
    if (text == "shift") return FlexAction::Shift;
    if (text == "curtail") return FlexAction::Curtail;
    if (text == "disconnect") return FlexAction::Disconnect;
    if (text == "none") return FlexAction::None;
    throw ParseError("unknown action '" + text + "'");
}

double flexibility_fraction(double sheddable, double controllable, double acceptable) {
    if (!in_unit(sheddable) || !in_unit(controllable) || !in_unit(acceptable)) {
        throw DomainError("S, C, A must each be in [0,1]");
    }
    return sheddable * std::min(controllable, acceptable);
}

double resource_potential(double fraction, double load_kw) {
    if (!in_unit(fraction)) throw DomainError("flexibility fraction must be in [0,1]");
    if (!(std::isfinite(load_kw) && load_kw >= 0.0)) throw DomainError("load must be >= 0 kW");
    return fraction * load_kw;
}

LoadClass classify_load(const AuditAnswers& a) {
    if (!a.is_sheddable || !a.has_control_point || a.acceptable_fraction == 0.0 ||
        a.shift_or_curtail == FlexAction::None) {
        return LoadClass::Inflexible;
    }
    switch (a.shift_or_curtail) {
        case FlexAction::Shift:
            return a.rebound_expected ? LoadClass::ShiftableProfile : LoadClass::ShiftableVolume;
        case FlexAction::Curtail:
            return LoadClass::CurtailableReducible;
        case FlexAction::Disconnect:
            return LoadClass::CurtailableDisconnectable;
        default:
            return LoadClass::Inflexible;
    }
}

FlexibilityMatrix characterize_site(const std::vector<FlexAsset>& assets,
                                    const std::vector<AuditAnswers>& answers,
                                    const std::vector<ProductSpec>& products) {
    FlexibilityMatrix matrix;
    for (const auto& asset : assets) {
        if (asset.kind.category == AssetCategory::Load) {
            const AuditAnswers* a = find_answers(answers, asset.id);
            if (a == nullptr) throw MissingAnswers(asset.id);
            if (classify_load(*a) == LoadClass::Inflexible) continue;  // eliminated
            double f = flexibility_fraction(a->shed_fraction, a->controllable_fraction,
                                            a->acceptable_fraction);
            double power = resource_potential(f, asset.rated_power_kw);
            for (const auto& product : products) {
                matrix.rows.push_back(
                    assemble_row(asset, product, power, a->parameter_estimates,
                                 a->rebound_expected, nullptr));
            }
        } else {
            // Storage and generation bypass the S/C/A categorization: the
            // rating (or forecast peak) enters the matrix directly.
            const AuditAnswers* a = find_answers(answers, asset.id);
            ParameterEstimates est = a ? a->parameter_estimates : ParameterEstimates{};
            for (const auto& product : products) {
                matrix.rows.push_back(
                    assemble_row(asset, product, asset.rated_power_kw, est, false, nullptr));
            }
        }
    }
    return matrix;
}

std::string audit_intake_report(const SiteConfig& config, const std::vector<AuditAnswers>& answers) {
    std::ostringstream out;
    out << "Flexibility audit intake: " << config.site_name << "\n";
    out << "Assets: " << config.assets.size() << ", floor area: " << config.floor_area_m2
        << " m2\n\n";

    auto sorted = config.assets;
    std::sort(sorted.begin(), sorted.end(),
              [](const FlexAsset& a, const FlexAsset& b) { return a.id < b.id; });

    std::vector<std::string> missing;
    for (const auto& asset : sorted) {
        const AuditAnswers* a = find_answers(answers, asset.id);
        out << asset.id << "  (" << asset.name << ")\n";
        out << "  kind: " << to_string(asset.kind.category);
        if (asset.kind.load_class) out << " / " << to_string(*asset.kind.load_class);
        out << "\n";
        if (asset.kind.category != AssetCategory::Load) {
            out << "  classification: bypasses S/C/A (rating "
                << asset.rated_power_kw << " kW enters the matrix directly)\n";
            if (a) out << "  audit type: " << a->audit_type << "\n";
            continue;
        }
        if (a == nullptr) {
            out << "  audit type: -\n  classification: UNANSWERED\n";
            missing.push_back(asset.id);
            continue;
        }
        out << "  audit type: " << a->audit_type << "\n";
        LoadClass cls = classify_load(*a);
        out << "  classification: " << to_string(cls);
        if (cls == LoadClass::Inflexible) {
            out << " (eliminated)";
        } else {
            double f = flexibility_fraction(a->shed_fraction, a->controllable_fraction,
                                            a->acceptable_fraction);
            out << ", F = " << f << ", potential "
                << resource_potential(f, asset.rated_power_kw) << " kW";
        }
        out << "\n";
        // Defaults that characterize_site would fill in for this asset.
        AppliedDefaults applied;
        ProductSpec probe{"(product)", 1.0};
        assemble_row(asset, probe, 0.0, a->parameter_estimates, a->rebound_expected, &applied);
        if (!applied.fields.empty()) {
            out << "  defaults applied:";
            for (const auto& f : applied.fields) out << " " << f;
            out << "\n";
        }
    }

    out << "\nmissing:";
    if (missing.empty()) {
        out << " none\n";
    } else {
        for (const auto& id : missing) out << " " << id;
        out << "\n";
    }
    return out.str();
}

}  // namespace flexgrid
