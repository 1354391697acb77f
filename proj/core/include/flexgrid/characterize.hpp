#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flexgrid/model.hpp"

namespace flexgrid {

enum class FlexAction { Shift, Curtail, Disconnect, None };

std::string to_string(FlexAction a);
FlexAction flex_action_from_string(const std::string& text);

// Partial FlexibilityParameters gathered during the audit; unset fields fall
// back to documented defaults when the matrix row is assembled.
struct ParameterEstimates {
    std::optional<double> flexible_power_kw;
    std::optional<double> max_duration_h;
    std::optional<double> tia_notice_h;
    std::optional<PowerPulse> preload;
    std::optional<PowerPulse> rebound;
    std::optional<WeeklyCalendar> availability;
    std::optional<double> disutility_cost_per_event;
    std::optional<std::string> disutility_unit;
    std::optional<double> shed_time_s;
    std::optional<int> max_activations_per_day;
    std::optional<double> min_recovery_h;

    friend bool operator==(const ParameterEstimates&, const ParameterEstimates&) = default;
};

// Structured intake of one asset's audit outcome (audit_type records the
// ISO 50002 depth, 1 = walkthrough .. 3 = investment grade; metadata only).
struct AuditAnswers {
    std::string asset_id;
    int audit_type = 1;
    bool is_sheddable = false;
    double shed_fraction = 0.0;
    bool has_control_point = false;
    double controllable_fraction = 0.0;
    double acceptable_fraction = 0.0;
    FlexAction shift_or_curtail = FlexAction::None;
    bool rebound_expected = false;
    ParameterEstimates parameter_estimates;

    friend bool operator==(const AuditAnswers&, const AuditAnswers&) = default;
};

// F = S * min(C, A). Throws DomainError outside the unit cube.
double flexibility_fraction(double sheddable, double controllable, double acceptable);

// R = F * L, in kW. Throws DomainError on F outside [0,1] or negative L.
double resource_potential(double fraction, double load_kw);

// Decision table over the audit answers; total and deterministic.
LoadClass classify_load(const AuditAnswers& answers);

// Runs the characterization pipeline: classifies each load, eliminates the
// inflexible ones, and emits one matrix row per (flexible asset, product).
// Storage and generation rows pass their ratings through directly.
FlexibilityMatrix characterize_site(const std::vector<FlexAsset>& assets,
                                    const std::vector<AuditAnswers>& answers,
                                    const std::vector<ProductSpec>& products);

// Plain-text intake summary: per-asset audit coverage, classification outcome,
// applied defaults and missing items. Deterministic ordering by asset id.
std::string audit_intake_report(const SiteConfig& config, const std::vector<AuditAnswers>& answers);

}  // namespace flexgrid
