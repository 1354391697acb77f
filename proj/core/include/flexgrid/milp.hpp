#pragma once

#include <string>
#include <vector>

namespace flexgrid {

enum class VarKind { Continuous, Binary };
enum class Relation { LessEq, Equal, GreaterEq };
enum class Sense { Maximize, Minimize };

struct LinearTerm {
    int var = 0;
    double coeff = 0.0;
};

struct LinearConstraint {
    std::vector<LinearTerm> terms;  // sparse row
    Relation rel = Relation::LessEq;
    double rhs = 0.0;
};

// Generic LP/MILP instance. Binary variables must have bounds within [0, 1];
// +/-infinity bounds are permitted on continuous variables.
struct MilpProblem {
    int n_vars = 0;
    std::vector<VarKind> kinds;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<LinearConstraint> constraints;
    std::vector<double> objective;
    Sense sense = Sense::Maximize;

    // Returns the new variable's index.
    int add_var(VarKind kind, double lo, double hi, double obj_coeff = 0.0);
    void add_constraint(std::vector<LinearTerm> terms, Relation rel, double rhs);
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, CapExceeded };

std::string to_string(SolveStatus s);

struct MilpSolution {
    SolveStatus status = SolveStatus::Infeasible;
    std::vector<double> values;
    double objective_value = 0.0;
    long node_count = 0;  // branch-and-bound nodes explored
};

struct SolverOptions {
    long node_cap = 100000;
};

// Solver-wide tolerances, stated once.
namespace tol {
inline constexpr double pivot = 1e-9;
inline constexpr double feasibility = 1e-7;
inline constexpr double integrality = 1e-6;
}  // namespace tol

// Solves the LP relaxation (every variable treated as continuous).
// Throws NumericalBreakdown if pivoting stalls beyond 50*(n_vars + n_constraints)
// iterations.
MilpSolution solve_lp(const MilpProblem& problem);

// Branch-and-bound over the binary variables: best-first on the relaxation
// bound, branching on the most fractional binary (ties to the lowest index),
// round-up child explored first. Deterministic for identical inputs.
// Node-cap overrun is reported as status CapExceeded with the best incumbent
// attached.
MilpSolution solve_milp(const MilpProblem& problem, const SolverOptions& options = {});

// Exhaustive test oracle: fixes every assignment of the binaries, solves the
// continuous remainder, returns the best feasible result. Ties break to the
// lexicographically lowest assignment (first binary = most significant).
// Throws TooManyBinaries above 20 binaries.
MilpSolution enumerate_oracle(const MilpProblem& problem);

// Human-readable dump in the standard LP text format, for cross-checking with
// external solvers.
std::string write_lp_format(const MilpProblem& problem, const std::string& name = "problem");

}  // namespace flexgrid
