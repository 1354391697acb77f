#include <cmath>

#include "flexgrid/errors.hpp"
#include "flexgrid/schedule.hpp"

namespace flexgrid {

namespace {

int res_var(int t, int r, int n_resources) { return t * n_resources + r; }

double scenario_value(const std::vector<double>& v, int t) {
    if (v.empty()) return 0.0;
    return t < static_cast<int>(v.size()) ? v[t] : v.back();
}

}  // namespace

Schedule stochastic_schedule(const StochasticProgram& program, const EventImpactTable& table,
                             double step_h, const ScheduleOptions& options) {
    const int T = table.n_steps();
    const int R = table.n_resources();
    const int S = static_cast<int>(program.scenarios.size());
    if (S == 0) throw ProbabilityMass("stochastic program needs at least one scenario");
    double mass = 0.0;
    for (const auto& sc : program.scenarios) {
        if (!(std::isfinite(sc.probability) && sc.probability >= 0.0)) {
            throw ProbabilityMass("scenario probabilities must be >= 0");
        }
        mass += sc.probability;
    }
    if (std::abs(mass - 1.0) > 1e-9) {
        throw ProbabilityMass("scenario probabilities must sum to 1");
    }

    // First stage: the shared Res(t,r) block; second stage: per-scenario
    // import/export quantities and an import peak.
    MilpProblem p;
    p.sense = Sense::Minimize;
    for (int t = 0; t < T; ++t) {
        for (int r = 0; r < R; ++r) {
            p.add_var(VarKind::Binary, 0.0, table.available[t][r] ? 1.0 : 0.0);
        }
    }

    std::vector<std::vector<int>> import_vars(S), export_vars(S);
    std::vector<int> peak_vars(S);
    for (int s = 0; s < S; ++s) {
        const auto& sc = program.scenarios[s];
        for (int t = 0; t < T; ++t) {
            double price = scenario_value(sc.energy_price_per_step, t);
            import_vars[s].push_back(p.add_var(VarKind::Continuous, 0.0, 1e9,
                                               sc.probability * price * step_h));
        }
        for (int t = 0; t < T; ++t) {
            double price = scenario_value(sc.export_price_per_step, t);
            double cap = scenario_value(sc.export_quantities_kw, t);
            export_vars[s].push_back(p.add_var(VarKind::Continuous, 0.0, std::max(0.0, cap),
                                               -sc.probability * price * step_h));
        }
        peak_vars[s] = p.add_var(VarKind::Continuous, 0.0, 1e9, sc.probability * sc.peak_price);

        for (int t = 0; t < T; ++t) {
            // Import after flexibility: import >= baseline - delivered.
            std::vector<LinearTerm> balance{{import_vars[s][t], 1.0}};
            for (int r = 0; r < R; ++r) {
                if (table.available[t][r]) balance.push_back({res_var(t, r, R), table.impact_kw[t][r]});
            }
            p.add_constraint(std::move(balance), Relation::GreaterEq,
                             scenario_value(sc.import_quantities_kw, t));
            // Peak premium covers the largest import step.
            p.add_constraint({{peak_vars[s], 1.0}, {import_vars[s][t], -1.0}},
                             Relation::GreaterEq, 0.0);
        }
    }

    // Converter startups and curtailment disutility: one indicator each,
    // forced on when the linked resource runs at any step.
    auto link_indicator = [&](const std::string& resource_id, double cost) {
        int v = p.add_var(VarKind::Binary, 0.0, 1.0, cost);
        for (int r = 0; r < R; ++r) {
            if (table.resource_ids[r] != resource_id) continue;
            for (int t = 0; t < T; ++t) {
                if (!table.available[t][r]) continue;
                p.add_constraint({{v, 1.0}, {res_var(t, r, R), -1.0}}, Relation::GreaterEq, 0.0);
            }
        }
        return v;
    };
    for (const auto& conv : program.converters) {
        link_indicator(conv.resource_id, conv.startup_cost);  // expected mass is 1
    }
    for (const auto& dev : program.curtailable_devices) {
        link_indicator(dev.resource_id, dev.disutility_cost);
    }

    apply_activation_constraints(p, table);
    MilpSolution sol = solve_milp(p, {options.node_cap});

    Schedule schedule;
    schedule.objective_kind = ObjectiveKind::StochasticCost;
    schedule.status = sol.status;
    schedule.node_count = sol.node_count;
    schedule.objective_value = sol.objective_value;
    schedule.activation.assign(T, std::vector<uint8_t>(R, 0));
    schedule.power_trace_kw.assign(T, 0.0);
    schedule.bid_active.assign(T, 0);
    if (sol.status != SolveStatus::Optimal && sol.values.empty()) return schedule;
    for (int t = 0; t < T; ++t) {
        for (int r = 0; r < R; ++r) {
            bool on = table.available[t][r] && sol.values[res_var(t, r, R)] > 0.5;
            schedule.activation[t][r] = on;
            if (on) schedule.power_trace_kw[t] += table.impact_kw[t][r];
        }
        schedule.bid_active[t] = schedule.power_trace_kw[t] >= table.min_power_kw - tol::integrality;
    }
    for (int r = 0; r < R; ++r) {
        bool ran = false;
        for (int t = 0; t < T; ++t) ran = ran || schedule.activation[t][r];
        if (!ran) continue;
        const auto& row = table.rows[r];
        if (row.preload) {
            schedule.obligations.push_back({table.resource_ids[r], row.preload->power_kw,
                                            row.preload->duration_h, true});
        }
        if (row.rebound) {
            schedule.obligations.push_back({table.resource_ids[r], row.rebound->power_kw,
                                            row.rebound->duration_h, false});
        }
    }
    return schedule;
}

}  // namespace flexgrid
