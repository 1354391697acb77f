#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flexgrid/milp.hpp"
#include "flexgrid/model.hpp"

namespace flexgrid {

// Deliverable power variation per (timestep, resource) for one DR event.
// One resource per matrix row whose product matches the event.
struct EventImpactTable {
    std::vector<std::string> resource_ids;
    std::vector<FlexibilityParameters> rows;  // parallel to resource_ids
    std::vector<int> timesteps;               // profile-global step indices
    Timestamp window_start;
    double step_h = 0.25;
    EventDirection direction = EventDirection::Decrease;
    double min_power_kw = 0.0;                // from the event request
    std::vector<double> energy_weight;        // empty = uniform
    std::vector<std::vector<double>> impact_kw;    // [t][r], >= 0
    std::vector<std::vector<uint8_t>> available;   // [t][r]

    int n_steps() const { return static_cast<int>(timesteps.size()); }
    int n_resources() const { return static_cast<int>(resource_ids.size()); }
};

enum class ObjectiveKind { Revenue, BidDuration, PeakPower, StochasticCost };

std::string to_string(ObjectiveKind k);

// Pre/post-event power obligation (pre-load or rebound) attached to a schedule.
// Reported, not optimized: the assessment layer nets rebound off the benefit.
struct Obligation {
    std::string resource_id;
    double power_kw = 0.0;
    double duration_h = 0.0;
    bool before_event = false;  // true = pre-load, false = rebound
};

struct Schedule {
    std::vector<std::vector<uint8_t>> activation;  // Res(t,r)
    std::vector<uint8_t> bid_active;               // BidActive(t)
    std::vector<double> power_trace_kw;            // sum_r Res(t,r) * impact(t,r)
    double objective_value = 0.0;
    ObjectiveKind objective_kind = ObjectiveKind::Revenue;
    SolveStatus status = SolveStatus::Optimal;
    long node_count = 0;
    std::vector<Obligation> obligations;
};

struct ScheduleOptions {
    long node_cap = 100000;
    bool contiguous_bid = false;  // force BidActive to one contiguous block
};

// Builds the per-event impact table from the site's matrix and profiles.
// Availability requires the calendar to permit the step, the notice given to
// cover the TIA, and the event duration to fit the row's maximum.
// Impacts: loads deliver min(row power, F * L_asset(t)); storage is capped by
// energy_capacity * round_trip_efficiency / event duration; generation
// delivers its forecast output. Increase-direction events use load headroom
// instead and exclude generation.
EventImpactTable build_event_impact(const SiteConfig& config, const FlexEventRequest& event);

// Max sum_t sum_r Res(t,r) * impact(t,r) * weight(t) * step_h.
Schedule max_revenue_schedule(const EventImpactTable& table, const std::vector<double>& weights,
                              double step_h, const ScheduleOptions& options = {});

// Max sum_t BidActive(t) subject to delivered(t) >= BidActive(t) * min_power.
Schedule max_bid_duration_schedule(const EventImpactTable& table, double min_power_kw,
                                   const ScheduleOptions& options = {});

// Max over steps of the delivered power at the selected peak step.
Schedule max_peak_power_schedule(const EventImpactTable& table,
                                 const ScheduleOptions& options = {});

// Adds per-resource activation algebra to a problem already holding the
// Res(t,r) block laid out as var index = t * n_resources + r:
//   - activation-start indicators with sum <= max_activations_per_day,
//   - recovery: a resource that deactivates stays off for min_recovery_h more,
//   - windowed sums limiting any contiguous run to max_duration_h.
void apply_activation_constraints(MilpProblem& problem, const EventImpactTable& table);

// One cost scenario of the stochastic program (quantities are data; the
// import/export decisions are scenario-indexed).
struct CostScenario {
    double probability = 1.0;
    std::vector<double> energy_price_per_step;   // currency per kWh
    double peak_price = 0.0;                     // currency per kW of peak import
    std::vector<double> import_quantities_kw;    // baseline import before flexibility
    std::vector<double> export_price_per_step;   // currency per kWh
    std::vector<double> export_quantities_kw;    // exportable excess generation
};

struct Converter {
    std::string id;
    std::string resource_id;  // startup incurred when this resource activates
    double startup_cost = 0.0;
};

struct CurtailableDevice {
    std::string id;
    std::string resource_id;  // disutility incurred when this resource activates
    double disutility_cost = 0.0;
};

struct StochasticProgram {
    std::vector<CostScenario> scenarios;
    std::vector<Converter> converters;
    std::vector<CurtailableDevice> curtailable_devices;
};

// Two-stage deterministic equivalent: first-stage Res(t,r) shared across
// scenarios, scenario-indexed continuous import/export/peak. Minimizes the
// expected cost; objective_value is that expectation.
Schedule stochastic_schedule(const StochasticProgram& program, const EventImpactTable& table,
                             double step_h, const ScheduleOptions& options = {});

// CSV export: `timestep,resource,active,impact_kw`, one row per (step, resource).
std::string schedule_to_csv(const Schedule& schedule, const EventImpactTable& table);
// JSON summary: objective kind, value, duration, node count.
std::string schedule_summary_json(const Schedule& schedule, const EventImpactTable& table);

}  // namespace flexgrid
