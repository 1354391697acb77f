#include "flexgrid/milp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>

#include "flexgrid/errors.hpp"

namespace flexgrid {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_problem(const MilpProblem& p) {
    auto n = static_cast<std::size_t>(p.n_vars);
    if (p.n_vars < 0 || p.kinds.size() != n || p.lower.size() != n || p.upper.size() != n ||
        p.objective.size() != n) {
        throw DomainError("problem arrays must all have n_vars entries");
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (std::isnan(p.lower[j]) || std::isnan(p.upper[j]) || !std::isfinite(p.objective[j])) {
            throw DomainError("bounds may not be NaN and objective must be finite");
        }
        if (p.lower[j] > p.upper[j]) {
            throw DomainError("variable " + std::to_string(j) + " has lower > upper");
        }
        if (p.kinds[j] == VarKind::Binary &&
            (p.lower[j] < -tol::integrality || p.upper[j] > 1.0 + tol::integrality)) {
            throw DomainError("binary variable " + std::to_string(j) + " has bounds outside [0,1]");
        }
    }
    for (const auto& c : p.constraints) {
        if (!std::isfinite(c.rhs)) throw DomainError("constraint rhs must be finite");
        for (const auto& t : c.terms) {
            if (t.var < 0 || t.var >= p.n_vars) throw DomainError("constraint references invalid variable");
            if (!std::isfinite(t.coeff)) throw DomainError("constraint coefficient must be finite");
        }
    }
}

// Bounded-variable revised simplex over equality form A x = b with slacks.
// Maximizes; minimization is handled by the callers via sign flips.
class Simplex {
public:
    enum State : uint8_t { AtLower, AtUpper, NbFree, Basic };

    Simplex(const MilpProblem& p, const std::vector<double>& lo, const std::vector<double>& up)
        : m_(static_cast<int>(p.constraints.size())), n_struct_(p.n_vars) {
        double sense = p.sense == Sense::Maximize ? 1.0 : -1.0;
        int n_total = n_struct_ + m_;
        cols_.assign(n_total, std::vector<double>(m_, 0.0));
        c_.assign(n_total, 0.0);
        l_.assign(n_total, 0.0);
        u_.assign(n_total, 0.0);
        b_.assign(m_, 0.0);
        for (int j = 0; j < n_struct_; ++j) {
            c_[j] = sense * p.objective[j];
            l_[j] = lo[j];
            u_[j] = up[j];
        }
        for (int i = 0; i < m_; ++i) {
            const auto& row = p.constraints[i];
            for (const auto& t : row.terms) cols_[t.var][i] += t.coeff;
            b_[i] = row.rhs;
            int s = n_struct_ + i;
            cols_[s][i] = 1.0;
            switch (row.rel) {
                case Relation::LessEq:    l_[s] = 0.0;   u_[s] = kInf; break;
                case Relation::GreaterEq: l_[s] = -kInf; u_[s] = 0.0;  break;
                case Relation::Equal:     l_[s] = 0.0;   u_[s] = 0.0;  break;
            }
        }
        iter_cap_ = 50L * (n_struct_ + m_);
        bland_after_ = std::min<long>(1000, iter_cap_ / 2);
    }

    // Returns Optimal/Infeasible/Unbounded; fills structural values on Optimal.
    SolveStatus run(std::vector<double>& values_out) {
        init_basis();
        if (!artificials_.empty()) {
            // Phase 1: drive artificial mass to zero.
            std::vector<double> saved_c(c_);
            for (double& cj : c_) cj = 0.0;
            for (int a : artificials_) c_[a] = -1.0;
            SolveStatus s = iterate();
            if (s != SolveStatus::Optimal) throw NumericalBreakdown("phase-1 simplex failed");
            double infeas = 0.0;
            for (int a : artificials_) infeas += std::abs(value_of(a));
            double scale = 1.0;
            for (double bi : b_) scale = std::max(scale, std::abs(bi));
            if (infeas > tol::feasibility * scale * 10.0) return SolveStatus::Infeasible;
            for (int a : artificials_) {
                l_[a] = 0.0;
                u_[a] = 0.0;
            }
            c_ = saved_c;
        }
        SolveStatus s = iterate();
        if (s == SolveStatus::Optimal) {
            refresh_basics();
            values_out.resize(n_struct_);
            for (int j = 0; j < n_struct_; ++j) values_out[j] = value_of(j);
        }
        return s;
    }

private:
    int m_;
    int n_struct_;
    std::vector<std::vector<double>> cols_;
    std::vector<double> c_, l_, u_, b_;
    std::vector<int> basis_;            // basic variable per row
    std::vector<int> row_of_;           // row of a basic variable, -1 otherwise
    std::vector<State> state_;
    std::vector<double> xb_;            // values of basic variables
    std::vector<std::vector<double>> binv_;
    std::vector<int> artificials_;
    long pivots_ = 0;
    long iter_cap_ = 0;
    long bland_after_ = 0;

    double nb_value(int j) const {
        switch (state_[j]) {
            case AtLower: return l_[j];
            case AtUpper: return u_[j];
            default: return 0.0;
        }
    }

    double value_of(int j) const {
        return state_[j] == Basic ? xb_[row_of_[j]] : nb_value(j);
    }

    void init_basis() {
        int n_total = static_cast<int>(cols_.size());
        state_.assign(n_total, AtLower);
        for (int j = 0; j < n_total; ++j) {
            if (std::isfinite(l_[j])) state_[j] = AtLower;
            else if (std::isfinite(u_[j])) state_[j] = AtUpper;
            else state_[j] = NbFree;
        }
        // Residual of each row with every structural variable at its bound.
        std::vector<double> r(b_);
        for (int j = 0; j < n_struct_; ++j) {
            double v = nb_value(j);
            if (v == 0.0) continue;
            for (int i = 0; i < m_; ++i) r[i] -= cols_[j][i] * v;
        }
        basis_.assign(m_, -1);
        xb_.assign(m_, 0.0);
        for (int i = 0; i < m_; ++i) {
            int s = n_struct_ + i;
            if (r[i] >= l_[s] - tol::feasibility && r[i] <= u_[s] + tol::feasibility) {
                basis_[i] = s;
                xb_[i] = r[i];
            } else {
                // Slack pinned at its nearest bound; an artificial covers the gap.
                double s_val = std::clamp(r[i], l_[s], u_[s]);
                state_[s] = (s_val == l_[s]) ? AtLower : AtUpper;
                double gap = r[i] - s_val;
                int a = static_cast<int>(cols_.size());
                cols_.emplace_back(m_, 0.0);
                cols_[a][i] = gap >= 0.0 ? 1.0 : -1.0;
                c_.push_back(0.0);
                l_.push_back(0.0);
                u_.push_back(kInf);
                state_.push_back(Basic);
                artificials_.push_back(a);
                basis_[i] = a;
                xb_[i] = std::abs(gap);
            }
            if (basis_[i] >= static_cast<int>(state_.size())) state_.resize(basis_[i] + 1, AtLower);
            state_[basis_[i]] = Basic;
        }
        row_of_.assign(cols_.size(), -1);
        for (int i = 0; i < m_; ++i) row_of_[basis_[i]] = i;
        binv_.assign(m_, std::vector<double>(m_, 0.0));
        for (int i = 0; i < m_; ++i) binv_[i][i] = 1.0;
        refactorize();
    }

    // Rebuilds B^-1 from the basis columns (Gauss-Jordan, partial pivoting)
    // and recomputes the basic values.
    void refactorize() {
        if (m_ == 0) return;
        std::vector<std::vector<double>> work(m_, std::vector<double>(2 * m_, 0.0));
        for (int i = 0; i < m_; ++i) {
            for (int r = 0; r < m_; ++r) work[r][i] = cols_[basis_[i]][r];
            work[i][m_ + i] = 1.0;
        }
        for (int col = 0; col < m_; ++col) {
            int piv = col;
            for (int r = col + 1; r < m_; ++r) {
                if (std::abs(work[r][col]) > std::abs(work[piv][col])) piv = r;
            }
            if (std::abs(work[piv][col]) < 1e-12) throw NumericalBreakdown("singular basis");
            std::swap(work[piv], work[col]);
            double inv = 1.0 / work[col][col];
            for (int k = col; k < 2 * m_; ++k) work[col][k] *= inv;
            for (int r = 0; r < m_; ++r) {
                if (r == col) continue;
                double f = work[r][col];
                if (f == 0.0) continue;
                for (int k = col; k < 2 * m_; ++k) work[r][k] -= f * work[col][k];
            }
        }
        for (int r = 0; r < m_; ++r) {
            for (int k = 0; k < m_; ++k) binv_[r][k] = work[r][m_ + k];
        }
        refresh_basics();
    }

    void refresh_basics() {
        if (m_ == 0) return;
        std::vector<double> rhs(b_);
        int n_total = static_cast<int>(cols_.size());
        for (int j = 0; j < n_total; ++j) {
            if (state_[j] == Basic) continue;
            double v = nb_value(j);
            if (v == 0.0) continue;
            for (int i = 0; i < m_; ++i) rhs[i] -= cols_[j][i] * v;
        }
        for (int i = 0; i < m_; ++i) {
            double acc = 0.0;
            for (int k = 0; k < m_; ++k) acc += binv_[i][k] * rhs[k];
            xb_[i] = acc;
        }
    }

    SolveStatus iterate() {
        int n_total = static_cast<int>(cols_.size());
        std::vector<double> y(m_), w(m_);
        while (true) {
            if (++pivots_ > iter_cap_) {
                throw NumericalBreakdown("simplex iteration cap (" + std::to_string(iter_cap_) +
                                         ") exceeded");
            }
            bool bland = pivots_ > bland_after_;
            // y = c_B B^-1
            for (int i = 0; i < m_; ++i) {
                double acc = 0.0;
                for (int k = 0; k < m_; ++k) acc += c_[basis_[k]] * binv_[k][i];
                y[i] = acc;
            }
            int enter = -1;
            double enter_dir = 0.0, best_score = tol::pivot;
            for (int j = 0; j < n_total; ++j) {
                if (state_[j] == Basic || u_[j] - l_[j] <= 0.0) continue;
                double d = c_[j];
                for (int i = 0; i < m_; ++i) d -= y[i] * cols_[j][i];
                double dir = 0.0;
                if ((state_[j] == AtLower || state_[j] == NbFree) && d > tol::pivot) dir = 1.0;
                else if ((state_[j] == AtUpper || state_[j] == NbFree) && d < -tol::pivot) dir = -1.0;
                if (dir == 0.0) continue;
                if (bland) { enter = j; enter_dir = dir; break; }
                if (std::abs(d) > best_score) {
                    best_score = std::abs(d);
                    enter = j;
                    enter_dir = dir;
                }
            }
            if (enter < 0) return SolveStatus::Optimal;

            // w = B^-1 A_enter
            for (int i = 0; i < m_; ++i) {
                double acc = 0.0;
                for (int k = 0; k < m_; ++k) acc += binv_[i][k] * cols_[enter][k];
                w[i] = acc;
            }

            double span = u_[enter] - l_[enter];  // +inf when either bound is open
            double t_best = std::isfinite(span) ? span : kInf;
            int leave_row = -1;
            for (int i = 0; i < m_; ++i) {
                double delta = -enter_dir * w[i];
                int k = basis_[i];
                double limit = kInf;
                if (delta > tol::pivot && std::isfinite(u_[k])) limit = (u_[k] - xb_[i]) / delta;
                else if (delta < -tol::pivot && std::isfinite(l_[k])) limit = (l_[k] - xb_[i]) / delta;
                if (limit < -0.0) limit = 0.0;
                if (limit < t_best - 1e-12 ||
                    (leave_row >= 0 && limit < t_best + 1e-12 && k < basis_[leave_row])) {
                    t_best = std::max(limit, 0.0);
                    leave_row = i;
                }
            }
            if (!std::isfinite(t_best)) return SolveStatus::Unbounded;

            if (leave_row < 0) {
                // Bound flip: the entering variable crosses to its other bound.
                state_[enter] = (state_[enter] == AtLower) ? AtUpper : AtLower;
                for (int i = 0; i < m_; ++i) xb_[i] += t_best * (-enter_dir * w[i]);
                continue;
            }

            int leaving = basis_[leave_row];
            double piv = w[leave_row];
            if (std::abs(piv) < tol::pivot) {
                refactorize();
                continue;
            }
            for (int i = 0; i < m_; ++i) {
                if (i != leave_row) xb_[i] += t_best * (-enter_dir * w[i]);
            }
            double enter_val = (state_[enter] == NbFree ? 0.0 : nb_value(enter)) + enter_dir * t_best;
            double delta_leave = -enter_dir * piv;
            state_[leaving] = delta_leave < 0.0 ? AtLower : AtUpper;
            if (!std::isfinite(nb_value(leaving))) state_[leaving] = NbFree;
            row_of_[leaving] = -1;
            basis_[leave_row] = enter;
            row_of_[enter] = leave_row;
            state_[enter] = Basic;
            xb_[leave_row] = enter_val;

            double inv = 1.0 / piv;
            for (int k = 0; k < m_; ++k) binv_[leave_row][k] *= inv;
            for (int i = 0; i < m_; ++i) {
                if (i == leave_row) continue;
                double f = w[i];
                if (f == 0.0) continue;
                for (int k = 0; k < m_; ++k) binv_[i][k] -= f * binv_[leave_row][k];
            }
            if (pivots_ % 100 == 0) refactorize();
        }
    }
};

double recompute_objective(const MilpProblem& p, const std::vector<double>& x) {
    double acc = 0.0;
    for (int j = 0; j < p.n_vars; ++j) acc += p.objective[j] * x[j];
    return acc;
}

MilpSolution solve_lp_bounds(const MilpProblem& p, const std::vector<double>& lo,
                             const std::vector<double>& up) {
    Simplex solver(p, lo, up);
    MilpSolution sol;
    sol.status = solver.run(sol.values);
    if (sol.status == SolveStatus::Optimal) sol.objective_value = recompute_objective(p, sol.values);
    return sol;
}

}  // namespace

int MilpProblem::add_var(VarKind kind, double lo, double hi, double obj_coeff) {
    kinds.push_back(kind);
    lower.push_back(lo);
    upper.push_back(hi);
    objective.push_back(obj_coeff);
    return n_vars++;
}

void MilpProblem::add_constraint(std::vector<LinearTerm> terms, Relation rel, double rhs) {
    constraints.push_back({std::move(terms), rel, rhs});
}

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
        case SolveStatus::CapExceeded: return "cap_exceeded";
    }
    return "infeasible";
}

MilpSolution solve_lp(const MilpProblem& problem) {
    validate_problem(problem);
    return solve_lp_bounds(problem, problem.lower, problem.upper);
}

MilpSolution solve_milp(const MilpProblem& problem, const SolverOptions& options) {
    validate_problem(problem);
    std::vector<int> binaries;
    for (int j = 0; j < problem.n_vars; ++j) {
        if (problem.kinds[j] == VarKind::Binary) binaries.push_back(j);
    }
    const double sgn = problem.sense == Sense::Maximize ? 1.0 : -1.0;

    struct Node {
        double key = 0.0;  // parent relaxation bound, in max-space
        long seq = 0;
        std::vector<std::pair<int, int>> fixings;
    };
    struct NodeOrder {
        bool operator()(const Node& a, const Node& b) const {
            if (a.key != b.key) return a.key < b.key;  // larger bound first
            return a.seq > b.seq;                      // then FIFO
        }
    };
    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    open.push({kInf, 0, {}});
    long seq = 1;
    long explored = 0;

    MilpSolution incumbent;
    bool have_incumbent = false;
    double inc_key = -kInf;

    std::vector<double> lo, up;
    while (!open.empty()) {
        if (explored >= options.node_cap) {
            MilpSolution out = incumbent;
            out.status = SolveStatus::CapExceeded;
            out.node_count = explored;
            return out;
        }
        Node node = open.top();
        open.pop();
        if (have_incumbent && node.key <= inc_key + 1e-9) continue;

        lo = problem.lower;
        up = problem.upper;
        for (auto [var, bit] : node.fixings) {
            lo[var] = bit;
            up[var] = bit;
        }
        ++explored;
        MilpSolution relax = solve_lp_bounds(problem, lo, up);
        if (relax.status == SolveStatus::Infeasible) continue;
        if (relax.status == SolveStatus::Unbounded) {
            relax.node_count = explored;
            relax.values.clear();
            return relax;
        }
        double key = sgn * relax.objective_value;
        if (have_incumbent && key <= inc_key + 1e-9) continue;

        int branch_var = -1;
        double best_frac = tol::integrality;
        for (int j : binaries) {
            double f = relax.values[j] - std::floor(relax.values[j]);
            double dist = std::min(f, 1.0 - f);
            if (dist > best_frac) {
                best_frac = dist;
                branch_var = j;
            }
        }
        if (branch_var < 0) {
            incumbent = relax;
            have_incumbent = true;
            inc_key = key;
            continue;
        }
        Node up_child{key, seq++, node.fixings};
        up_child.fixings.emplace_back(branch_var, 1);
        Node down_child{key, seq++, node.fixings};
        down_child.fixings.emplace_back(branch_var, 0);
        open.push(std::move(up_child));
        open.push(std::move(down_child));
    }

    if (!have_incumbent) {
        MilpSolution out;
        out.status = SolveStatus::Infeasible;
        out.node_count = explored;
        return out;
    }
    incumbent.status = SolveStatus::Optimal;
    incumbent.node_count = explored;
    return incumbent;
}

MilpSolution enumerate_oracle(const MilpProblem& problem) {
    validate_problem(problem);
    std::vector<int> binaries;
    for (int j = 0; j < problem.n_vars; ++j) {
        if (problem.kinds[j] == VarKind::Binary) binaries.push_back(j);
    }
    const int k = static_cast<int>(binaries.size());
    if (k > 20) throw TooManyBinaries("oracle supports at most 20 binaries, got " + std::to_string(k));
    const bool pure_binary = k == problem.n_vars;
    const double sgn = problem.sense == Sense::Maximize ? 1.0 : -1.0;

    MilpSolution best;
    bool found = false;
    double best_key = -kInf;
    long evaluated = 0;

    std::vector<double> lo, up, x;
    const std::uint64_t total = std::uint64_t{1} << k;
    for (std::uint64_t a = 0; a < total; ++a) {
        bool conflict = false;
        for (int i = 0; i < k; ++i) {
            int bit = static_cast<int>((a >> (k - 1 - i)) & 1u);  // first binary = MSB
            int var = binaries[i];
            if (bit < problem.lower[var] - tol::integrality ||
                bit > problem.upper[var] + tol::integrality) {
                conflict = true;
                break;
            }
        }
        if (conflict) continue;
        ++evaluated;

        if (pure_binary) {
            x.assign(problem.n_vars, 0.0);
            for (int i = 0; i < k; ++i) x[binaries[i]] = static_cast<double>((a >> (k - 1 - i)) & 1u);
            bool feasible = true;
            for (const auto& row : problem.constraints) {
                double lhs = 0.0;
                for (const auto& t : row.terms) lhs += t.coeff * x[t.var];
                double slack = tol::feasibility * (1.0 + std::abs(row.rhs));
                if ((row.rel == Relation::LessEq && lhs > row.rhs + slack) ||
                    (row.rel == Relation::GreaterEq && lhs < row.rhs - slack) ||
                    (row.rel == Relation::Equal && std::abs(lhs - row.rhs) > slack)) {
                    feasible = false;
                    break;
                }
            }
            if (!feasible) continue;
            double obj = recompute_objective(problem, x);
            if (!found || sgn * obj > best_key + 1e-9) {
                best.values = x;
                best.objective_value = obj;
                best_key = sgn * obj;
                found = true;
            }
            continue;
        }

        lo = problem.lower;
        up = problem.upper;
        for (int i = 0; i < k; ++i) {
            double bit = static_cast<double>((a >> (k - 1 - i)) & 1u);
            lo[binaries[i]] = bit;
            up[binaries[i]] = bit;
        }
        MilpSolution sub = solve_lp_bounds(problem, lo, up);
        if (sub.status == SolveStatus::Unbounded) {
            sub.node_count = evaluated;
            sub.values.clear();
            return sub;
        }
        if (sub.status != SolveStatus::Optimal) continue;
        if (!found || sgn * sub.objective_value > best_key + 1e-9) {
            best.values = sub.values;
            best.objective_value = sub.objective_value;
            best_key = sgn * sub.objective_value;
            found = true;
        }
    }

    best.status = found ? SolveStatus::Optimal : SolveStatus::Infeasible;
    best.node_count = evaluated;
    return best;
}

std::string write_lp_format(const MilpProblem& problem, const std::string& name) {
    auto num = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.12g", v);
        return std::string(buf);
    };
    std::string out = "\\ " + name + "\n";
    out += problem.sense == Sense::Maximize ? "Maximize\n" : "Minimize\n";
    out += " obj:";
    bool first = true;
    for (int j = 0; j < problem.n_vars; ++j) {
        double cj = problem.objective[j];
        if (cj == 0.0) continue;
        out += (first ? " " : (cj >= 0 ? " + " : " ")) + num(cj) + " x" + std::to_string(j);
        first = false;
    }
    if (first) out += " 0 x0";
    out += "\nSubject To\n";
    for (std::size_t i = 0; i < problem.constraints.size(); ++i) {
        const auto& row = problem.constraints[i];
        out += " c" + std::to_string(i) + ":";
        bool f = true;
        for (const auto& t : row.terms) {
            out += (f ? " " : (t.coeff >= 0 ? " + " : " ")) + num(t.coeff) + " x" + std::to_string(t.var);
            f = false;
        }
        if (f) out += " 0 x0";
        switch (row.rel) {
            case Relation::LessEq: out += " <= "; break;
            case Relation::Equal: out += " = "; break;
            case Relation::GreaterEq: out += " >= "; break;
        }
        out += num(row.rhs) + "\n";
    }
    out += "Bounds\n";
    for (int j = 0; j < problem.n_vars; ++j) {
        double lo = problem.lower[j], hi = problem.upper[j];
        std::string v = "x" + std::to_string(j);
        if (!std::isfinite(lo) && !std::isfinite(hi)) out += " " + v + " free\n";
        else if (!std::isfinite(lo)) out += " -inf <= " + v + " <= " + num(hi) + "\n";
        else if (!std::isfinite(hi)) out += " " + num(lo) + " <= " + v + "\n";
        else out += " " + num(lo) + " <= " + v + " <= " + num(hi) + "\n";
    }
    bool any_bin = false;
    for (int j = 0; j < problem.n_vars; ++j) {
        if (problem.kinds[j] == VarKind::Binary) {
            if (!any_bin) out += "Binary\n ";
            out += std::string(any_bin ? " " : "") + "x" + std::to_string(j);
            any_bin = true;
        }
    }
    if (any_bin) out += "\n";
    out += "End\n";
    return out;
}

}  // namespace flexgrid
