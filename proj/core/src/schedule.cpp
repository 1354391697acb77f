#include "flexgrid/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include <json.hpp>

#include "flexgrid/characterize.hpp"
#include "flexgrid/errors.hpp"

namespace flexgrid {

namespace {

int res_var(int t, int r, int n_resources) { return t * n_resources + r; }

// Profile set covering [window_start, window_start + n steps); primary first,
// then seasonal sets in key order.
struct ProfileLookup {
    const LoadProfile* total = nullptr;
    const std::map<std::string, LoadProfile>* per_asset = nullptr;
};

bool covers(const LoadProfile& p, Timestamp start, int n_steps, int step_minutes) {
    if (p.step_minutes != step_minutes) return false;
    std::int64_t offset_s = start.seconds - p.start.seconds;
    if (offset_s < 0 || offset_s % (step_minutes * 60) != 0) return false;
    std::int64_t first = offset_s / (step_minutes * 60);
    return first + n_steps <= static_cast<std::int64_t>(p.values_kw.size());
}

ProfileLookup find_profiles(const SiteConfig& config, Timestamp start, int n_steps,
                            int step_minutes) {
    if (covers(config.total_load, start, n_steps, step_minutes)) {
        return {&config.total_load, &config.per_asset_profiles};
    }
    for (const auto& [season, set] : config.seasonal_profiles) {
        if (covers(set.total_load, start, n_steps, step_minutes)) {
            return {&set.total_load, &set.per_asset};
        }
    }
    return {};
}

const LoadProfile* asset_profile(const ProfileLookup& lookup, const std::string& asset_id) {
    auto it = lookup.per_asset->find(asset_id);
    return it == lookup.per_asset->end() ? nullptr : &it->second;
}

struct DecodeLayout {
    std::vector<int> bid_vars;  // empty unless the objective has BidActive
};

Schedule decode(const EventImpactTable& table, const MilpSolution& sol, ObjectiveKind kind,
                const DecodeLayout& layout) {
    const int T = table.n_steps();
    const int R = table.n_resources();
    Schedule s;
    s.objective_kind = kind;
    s.status = sol.status;
    s.node_count = sol.node_count;
    s.objective_value = sol.objective_value;
    s.activation.assign(T, std::vector<uint8_t>(R, 0));
    s.power_trace_kw.assign(T, 0.0);
    s.bid_active.assign(T, 0);
    if (sol.status != SolveStatus::Optimal && sol.values.empty()) return s;
    for (int t = 0; t < T; ++t) {
        for (int r = 0; r < R; ++r) {
            bool on = table.available[t][r] && sol.values[res_var(t, r, R)] > 0.5;
            s.activation[t][r] = on;
            if (on) s.power_trace_kw[t] += table.impact_kw[t][r];
        }
    }
    if (!layout.bid_vars.empty()) {
        for (int t = 0; t < T; ++t) s.bid_active[t] = sol.values[layout.bid_vars[t]] > 0.5;
    } else {
        for (int t = 0; t < T; ++t) {
            s.bid_active[t] = s.power_trace_kw[t] >= table.min_power_kw - tol::integrality;
        }
    }
    // Pre/post-event obligations of every resource that actually ran.
    for (int r = 0; r < R; ++r) {
        bool ran = false;
        for (int t = 0; t < T; ++t) ran = ran || s.activation[t][r];
        if (!ran) continue;
        const auto& row = table.rows[r];
        if (row.preload) {
            s.obligations.push_back({table.resource_ids[r], row.preload->power_kw,
                                     row.preload->duration_h, true});
        }
        if (row.rebound) {
            s.obligations.push_back({table.resource_ids[r], row.rebound->power_kw,
                                     row.rebound->duration_h, false});
        }
    }
    return s;
}

// Res(t,r) block, available cells free in [0,1], the rest pinned to 0.
MilpProblem make_res_problem(const EventImpactTable& table) {
    MilpProblem p;
    p.sense = Sense::Maximize;
    const int T = table.n_steps();
    const int R = table.n_resources();
    for (int t = 0; t < T; ++t) {
        for (int r = 0; r < R; ++r) {
            double hi = table.available[t][r] ? 1.0 : 0.0;
            p.add_var(VarKind::Binary, 0.0, hi);
        }
    }
    return p;
}

void add_contiguity(MilpProblem& p, const std::vector<int>& vars) {
    // At most one rising edge across the vector.
    std::vector<LinearTerm> total;
    for (std::size_t t = 0; t < vars.size(); ++t) {
        int start = p.add_var(VarKind::Continuous, 0.0, 1.0);
        std::vector<LinearTerm> terms{{vars[t], 1.0}, {start, -1.0}};
        if (t > 0) terms.push_back({vars[t - 1], -1.0});
        p.add_constraint(std::move(terms), Relation::LessEq, 0.0);
        total.push_back({start, 1.0});
    }
    p.add_constraint(std::move(total), Relation::LessEq, 1.0);
}

}  // namespace

std::string to_string(ObjectiveKind k) {
    switch (k) {
        case ObjectiveKind::Revenue: return "revenue";
        case ObjectiveKind::BidDuration: return "duration";
        case ObjectiveKind::PeakPower: return "peak";
        case ObjectiveKind::StochasticCost: return "stochastic";
    }
    return "revenue";
}

EventImpactTable build_event_impact(const SiteConfig& config, const FlexEventRequest& event) {
    EventImpactTable table;
    table.window_start = event.window_start;
    table.direction = event.direction;
    table.min_power_kw = event.min_power_kw;

    for (const auto& row : config.matrix.rows) {
        if (row.product_id == event.product_id) {
            table.resource_ids.push_back(row.asset_id);
            table.rows.push_back(row);
        }
    }
    if (table.rows.empty()) throw UnknownProduct("no matrix rows for product '" + event.product_id + "'");

    const int step_minutes = config.total_load.step_minutes;
    table.step_h = step_minutes / 60.0;
    double steps_exact = event.duration_h * 60.0 / step_minutes;
    int n = static_cast<int>(std::lround(steps_exact));
    if (std::abs(steps_exact - n) > 1e-9) {
        throw DomainError("event duration must be a whole multiple of the site step");
    }
    if (n <= 0) throw EmptyWindow("event window contains no steps");

    ProfileLookup profiles = find_profiles(config, event.window_start, n, step_minutes);
    if (profiles.total == nullptr) {
        throw IndexOutOfRange("event window is not covered by any load profile");
    }
    std::int64_t first = (event.window_start.seconds - profiles.total->start.seconds) /
                         (step_minutes * 60);
    for (int t = 0; t < n; ++t) table.timesteps.push_back(static_cast<int>(first) + t);

    if (event.energy_weight) {
        if (static_cast<int>(event.energy_weight->size()) != n) {
            throw DomainError("energy_weight length must equal the number of steps in the window");
        }
        for (double w : *event.energy_weight) {
            if (!(std::isfinite(w) && w >= 0.0)) throw DomainError("energy weights must be >= 0");
        }
        table.energy_weight = *event.energy_weight;
    }

    const int R = table.n_resources();
    table.impact_kw.assign(n, std::vector<double>(R, 0.0));
    table.available.assign(n, std::vector<uint8_t>(R, 0));

    for (int r = 0; r < R; ++r) {
        const auto& row = table.rows[r];
        const FlexAsset* asset = config.find_asset(row.asset_id);
        if (asset == nullptr) {
            throw DomainError("matrix row references unknown asset '" + row.asset_id + "'");
        }
        bool notice_ok = event.notice_given_h >= row.tia_notice_h - 1e-9;
        bool duration_ok = event.duration_h <= row.max_duration_h + 1e-9;
        const LoadProfile* profile = asset_profile(profiles, row.asset_id);

        double storage_cap_kw = 0.0;
        if (asset->kind.category == AssetCategory::Storage) {
            // Linearized energy budget: the usable energy is spread evenly
            // over the event, capping each step's impact.
            double budget_kwh = asset->energy_capacity_kwh.value_or(0.0) *
                                asset->round_trip_efficiency.value_or(1.0);
            storage_cap_kw = budget_kwh / event.duration_h;
        }

        for (int t = 0; t < n; ++t) {
            Timestamp step_time = add_minutes(event.window_start, static_cast<std::int64_t>(t) * step_minutes);
            bool avail = notice_ok && duration_ok && row.availability.permits(step_time);
            double impact = 0.0;
            switch (asset->kind.category) {
                case AssetCategory::Load: {
                    double f = flexibility_fraction(asset->sheddable_s, asset->controllable_c,
                                                    asset->acceptable_a);
                    if (profile != nullptr) {
                        double level = profile->values_kw[table.timesteps[t]];
                        double basis = event.direction == EventDirection::Decrease
                                           ? level
                                           : std::max(0.0, asset->rated_power_kw - level);
                        impact = std::min(row.flexible_power_kw, resource_potential(f, basis));
                    } else {
                        impact = row.flexible_power_kw;
                    }
                    break;
                }
                case AssetCategory::Storage:
                    impact = std::min(row.flexible_power_kw, storage_cap_kw);
                    break;
                case AssetCategory::Generation:
                    if (event.direction == EventDirection::Increase) {
                        impact = 0.0;  // forecast output cannot be ramped up
                    } else if (profile != nullptr) {
                        impact = std::min(row.flexible_power_kw,
                                          profile->values_kw[table.timesteps[t]]);
                    } else {
                        impact = row.flexible_power_kw;
                    }
                    break;
            }
            table.impact_kw[t][r] = impact;
            table.available[t][r] = avail;
        }
    }
    return table;
}

void apply_activation_constraints(MilpProblem& problem, const EventImpactTable& table) {
    const int T = table.n_steps();
    const int R = table.n_resources();
    for (int r = 0; r < R; ++r) {
        const auto& row = table.rows[r];

        if (row.max_activations_per_day) {
            // Start indicators: continuous in [0,1] works because the lower
            // bound Res(t)-Res(t-1) pins them to 1 exactly on a rising edge.
            std::vector<LinearTerm> count;
            for (int t = 0; t < T; ++t) {
                int s = problem.add_var(VarKind::Continuous, 0.0, 1.0);
                std::vector<LinearTerm> terms{{res_var(t, r, R), 1.0}, {s, -1.0}};
                if (t > 0) terms.push_back({res_var(t - 1, r, R), -1.0});
                problem.add_constraint(std::move(terms), Relation::LessEq, 0.0);
                count.push_back({s, 1.0});
            }
            problem.add_constraint(std::move(count),
                                   Relation::LessEq, static_cast<double>(*row.max_activations_per_day));
        }

        // Recovery: after Res drops, it stays off for min_recovery_h beyond
        // the first idle step:  Res(t-1) - Res(t) + Res(t+k) <= 1.
        int rec_steps = static_cast<int>(std::floor(row.min_recovery_h / table.step_h + 1e-9));
        for (int t = 1; t < T && rec_steps > 0; ++t) {
            for (int k = 1; k <= rec_steps && t + k < T; ++k) {
                problem.add_constraint({{res_var(t - 1, r, R), 1.0},
                                        {res_var(t, r, R), -1.0},
                                        {res_var(t + k, r, R), 1.0}},
                                       Relation::LessEq, 1.0);
            }
        }

        // Any contiguous run is at most max_duration_h: windowed sums of
        // D+1 consecutive steps stay <= D.
        int max_run = static_cast<int>(std::floor(row.max_duration_h / table.step_h + 1e-9));
        if (max_run < T) {
            for (int t = 0; t + max_run < T; ++t) {
                std::vector<LinearTerm> window;
                for (int i = t; i <= t + max_run; ++i) window.push_back({res_var(i, r, R), 1.0});
                problem.add_constraint(std::move(window), Relation::LessEq,
                                       static_cast<double>(max_run));
            }
        }
    }
}

Schedule max_revenue_schedule(const EventImpactTable& table, const std::vector<double>& weights,
                              double step_h, const ScheduleOptions& options) {
    const int T = table.n_steps();
    const int R = table.n_resources();
    if (static_cast<int>(weights.size()) != T) {
        throw DomainError("weights length must equal the timestep count");
    }
    for (double w : weights) {
        if (!(std::isfinite(w) && w >= 0.0)) throw DomainError("weights must be >= 0");
    }
    MilpProblem p = make_res_problem(table);
    for (int t = 0; t < T; ++t) {
        for (int r = 0; r < R; ++r) {
            p.objective[res_var(t, r, R)] = table.impact_kw[t][r] * weights[t] * step_h;
        }
    }
    apply_activation_constraints(p, table);
    MilpSolution sol = solve_milp(p, {options.node_cap});
    return decode(table, sol, ObjectiveKind::Revenue, {});
}

Schedule max_bid_duration_schedule(const EventImpactTable& table, double min_power_kw,
                                   const ScheduleOptions& options) {
    if (!(std::isfinite(min_power_kw) && min_power_kw >= 0.0)) {
        throw DomainError("min power must be >= 0");
    }
    const int T = table.n_steps();
    const int R = table.n_resources();
    MilpProblem p = make_res_problem(table);
    DecodeLayout layout;
    for (int t = 0; t < T; ++t) {
        layout.bid_vars.push_back(p.add_var(VarKind::Binary, 0.0, 1.0, 1.0));
    }
    // Delivered power must carry each active bid step: Eq-style coupling
    // sum_r Res(t,r) * impact(t,r) >= BidActive(t) * MinPower.
    for (int t = 0; t < T; ++t) {
        std::vector<LinearTerm> terms;
        for (int r = 0; r < R; ++r) {
            if (table.available[t][r]) terms.push_back({res_var(t, r, R), table.impact_kw[t][r]});
        }
        terms.push_back({layout.bid_vars[t], -min_power_kw});
        p.add_constraint(std::move(terms), Relation::GreaterEq, 0.0);
    }
    if (options.contiguous_bid) add_contiguity(p, layout.bid_vars);
    apply_activation_constraints(p, table);
    MilpSolution sol = solve_milp(p, {options.node_cap});
    Schedule s = decode(table, sol, ObjectiveKind::BidDuration, layout);
    return s;
}

Schedule max_peak_power_schedule(const EventImpactTable& table, const ScheduleOptions& options) {
    const int T = table.n_steps();
    const int R = table.n_resources();
    MilpProblem p = make_res_problem(table);

    std::vector<double> step_max(T, 0.0);
    double overall_max = 0.0;
    for (int t = 0; t < T; ++t) {
        for (int r = 0; r < R; ++r) {
            if (table.available[t][r]) step_max[t] += table.impact_kw[t][r];
        }
        overall_max = std::max(overall_max, step_max[t]);
    }

    // Auxiliary peak variable tied to one selected step.
    int peak = p.add_var(VarKind::Continuous, 0.0, overall_max, 1.0);
    std::vector<int> pick(T);
    for (int t = 0; t < T; ++t) pick[t] = p.add_var(VarKind::Binary, 0.0, 1.0);
    std::vector<LinearTerm> one;
    for (int t = 0; t < T; ++t) one.push_back({pick[t], 1.0});
    p.add_constraint(std::move(one), Relation::Equal, 1.0);
    for (int t = 0; t < T; ++t) {
        // peak <= delivered(t) + M_t * (1 - pick(t))
        std::vector<LinearTerm> terms{{peak, 1.0}, {pick[t], step_max[t]}};
        for (int r = 0; r < R; ++r) {
            if (table.available[t][r]) terms.push_back({res_var(t, r, R), -table.impact_kw[t][r]});
        }
        p.add_constraint(std::move(terms), Relation::LessEq, step_max[t]);
    }
    apply_activation_constraints(p, table);
    MilpSolution sol = solve_milp(p, {options.node_cap});
    return decode(table, sol, ObjectiveKind::PeakPower, {});
}

std::string schedule_to_csv(const Schedule& schedule, const EventImpactTable& table) {
    std::string out = "timestep,resource,active,impact_kw\n";
    char buf[64];
    for (int t = 0; t < table.n_steps(); ++t) {
        for (int r = 0; r < table.n_resources(); ++r) {
            std::snprintf(buf, sizeof buf, "%d,%s,%d,%.3f\n", table.timesteps[t],
                          table.resource_ids[r].c_str(), schedule.activation[t][r] ? 1 : 0,
                          table.impact_kw[t][r]);
            out += buf;
        }
    }
    return out;
}

std::string schedule_summary_json(const Schedule& schedule, const EventImpactTable& table) {
    nlohmann::json j;
    j["objective_kind"] = to_string(schedule.objective_kind);
    j["objective_value"] = schedule.objective_value;
    j["status"] = to_string(schedule.status);
    int duration = 0;
    for (uint8_t b : schedule.bid_active) duration += b;
    j["duration_steps"] = duration;
    j["node_count"] = schedule.node_count;
    j["window_start"] = format_iso8601(table.window_start);
    j["step_minutes"] = static_cast<int>(std::lround(table.step_h * 60.0));
    j["resources"] = table.resource_ids;
    nlohmann::json trace = nlohmann::json::array();
    for (double v : schedule.power_trace_kw) trace.push_back(v);
    j["power_trace_kw"] = trace;
    nlohmann::json obligations = nlohmann::json::array();
    for (const auto& o : schedule.obligations) {
        obligations.push_back({{"resource", o.resource_id},
                               {"power_kw", o.power_kw},
                               {"duration_h", o.duration_h},
                               {"when", o.before_event ? "before" : "after"}});
    }
    j["obligations"] = obligations;
    return j.dump(2) + "\n";
}

}  // namespace flexgrid
