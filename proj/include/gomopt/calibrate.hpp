#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "gomopt/params.hpp"

namespace gomopt {

/// Cohort mortality table: (age, hazard) rows from an HMD-style extract.
struct CohortTable {
    int cohort_year = 0;
    std::vector<double> ages;
    std::vector<double> hazards;
    int dropped_rows = 0;  // zero/missing hazards removed on load

    size_t size() const { return ages.size(); }
};

/// Parse `age,rate` CSV. Rows with nonpositive hazard are dropped with a
/// warning count; malformed rows raise parse_error with the line number.
CohortTable load_cohort_csv(const std::string& path, int cohort_year = 0);
void save_cohort_csv(const CohortTable& table, std::ostream& os);

struct FitResult {
    std::map<std::string, double> values;
    std::map<std::string, double> std_errors;
    double loss = 0.0;  // sum of squared log-hazard errors
    int n_evals = 0;
    bool converged = false;

    /// Flat key=value serialization.
    void write(std::ostream& os) const;
};

/// OLS of log hazard on age: slope beta, intercept log m0 extrapolated to
/// anchor_age. Needs at least 8 rows.
FitResult fit_gompertz(const CohortTable& table, double anchor_age = 0.0);

struct SearchSpec {
    double a_min = 0.01, a_max = 0.5;
    double q_min = 0.1, q_max = 0.9;
    int max_iters = 120;
    double tol = 1e-6;      // simplex diameter in (log a, logit q)
    int restarts = 3;
    uint64_t seed = 7;
    int grid_points = 96;   // hazard grid per trial solve
};

/// Nelder-Mead objective/result trace for one simplex run.
using NmObjective = std::function<double(const std::vector<double>&)>;
struct NmOutcome {
    std::vector<double> best_x;
    double best_f = 0.0;
    int n_evals = 0;
    bool converged = false;
    std::vector<double> best_trace;  // best loss after each iteration
};
NmOutcome nelder_mead(const NmObjective& f, std::vector<double> x0, double step,
                      int max_iters, double tol);

/// Fit the efficacy parameters (a, q) by matching the model's endogenous
/// mortality curve to a late cohort, holding (beta, m0) fixed. Loss is the
/// sum of squared log-hazard errors; infeasible trials (the well-posedness
/// margin fails) score +inf. Runs `restarts` simplex searches concurrently.
FitResult fit_efficacy(const CohortTable& table_late, double beta, double m0,
                       const ModelParams& params, const SearchSpec& search = {});

}  // namespace gomopt
