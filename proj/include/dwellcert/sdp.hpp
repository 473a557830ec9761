#pragma once

// Small-scale semidefinite feasibility/optimization in LMI standard form:
//
//   minimize c^T x   s.t.   F_j0 + sum_i x_i F_ji >= 0  (one cone per block),
//                           E x = f.
//
// Pure feasibility problems (all-zero objective) are classified by solving
// max t s.t. F_j(x) - t I >= 0, so the returned level doubles as a strictness
// margin for the paper-style strict inequalities.

#include <string>
#include <utility>
#include <vector>

#include "dwellcert/matrix.hpp"

namespace dwellcert {

struct SdpTerm {
    int var;  // -1 addresses the constant matrix F_0
    int row, col;
    double value;
};

struct SdpBlock {
    int dim = 0;
    std::vector<SdpTerm> terms;

    // Accumulates value at (row, col) of F_var; stores upper triangle only.
    void add(int var, int row, int col, double value) {
        if (value == 0.0) return;
        if (row > col) std::swap(row, col);
        terms.push_back({var, row, col, value});
    }

    SymMatrix constant_part(int) const;
    SymMatrix evaluate(const std::vector<double>& x) const;
};

struct SdpEquality {
    std::vector<std::pair<int, double>> terms;
    double rhs = 0.0;
};

struct SdpProblem {
    int num_vars = 0;
    std::vector<SdpBlock> blocks;
    std::vector<SdpEquality> equalities;
    std::vector<double> objective;  // empty == all-zero == pure feasibility

    bool pure_feasibility() const;
};

enum class SdpStatus { Feasible, Infeasible, Marginal, NumericalFailure };

const char* to_string(SdpStatus s);

struct SolverOptions {
    double feas_tol = 1e-7;   // dead band for the Feasible/Infeasible call
    double gap_tol = 1e-8;
    double res_tol = 1e-9;
    int max_iters = 200;
    double step_floor = 1e-12;
    double t_cap = 1.0;       // feasibility level is capped to keep max-t bounded
    int feas_var = -1;        // caller-provided strictness variable (explicit max-t
                              // formulations); -1 means none
    bool classify_only = false;  // return as soon as the sign of t is certain
    bool verbose = false;
};

struct SdpSolution {
    SdpStatus status = SdpStatus::NumericalFailure;
    std::vector<double> x;
    double margin = 0.0;      // min over blocks of lambda_min(F_j(x))
    int iterations = 0;
    double objective = 0.0;
    double feas_level = 0.0;  // optimal t for feasibility-classified problems
};

SdpSolution solve(const SdpProblem& p, const SolverOptions& opts = {});

// A-posteriori margin: min over blocks of lambda_min(F_j(x)). No iteration.
double verify(const SdpProblem& p, const std::vector<double>& x);

// Max equality violation |E x - f| (absolute).
double equality_violation(const SdpProblem& p, const std::vector<double>& x);

// Debug dump in SDPA sparse format (.dat-s). Equalities are eliminated first,
// so the file holds the reduced inequality-form problem.
void write_sdpa(const SdpProblem& p, const std::string& path);

}  // namespace dwellcert
