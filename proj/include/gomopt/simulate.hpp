#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "gomopt/hjb.hpp"
#include "gomopt/params.hpp"

namespace gomopt {

struct SimConfig {
    long n_paths = 10000;
    double horizon = 200.0;   // years
    double dt = 1.0 / 52;     // step, at most weekly
    uint64_t seed = 1;
    double truncation_tol = 1e-3;  // advisory cap on the reported tail bound
    bool risky = false;
    double x0 = 1.0;
    double m_init = -1.0;     // initial hazard; < 0 means params.m0
    int threads = 0;          // 0: GOMPERTZ_OPT_THREADS or hardware
    bool record_death_times = false;
};

struct SimOutcome {
    std::vector<double> welfare;   // realized discounted utility per path
    std::vector<int> n_deaths;
    std::vector<double> tau1;      // first death time; +inf if censored
    std::vector<std::vector<double>> death_times;  // per path, if recorded
    double mean = 0.0;
    double std_err = 0.0;
    double truncation_bound = 0.0;  // mean analytic tail envelope at horizon
    long clamped_paths = 0;         // hazard clamped at the curve boundary

    /// Summary CSV; with per_path also one row per path
    /// (path,welfare,n_deaths,tau1).
    void write_csv(std::ostream& os, bool per_path = false) const;
};

/// Consumption/healthcare policy fed to the simulator, as wealth fractions.
struct PolicySpec {
    enum class Kind { Analytic, ConstantRates, Custom };
    Kind kind = Kind::ConstantRates;
    const PolicyCurve* curve = nullptr;
    double c = 0.0, h = 0.0;
    std::function<std::pair<double, double>(double t, double m, int n_deaths)> fn;
    double c_scale = 1.0, h_scale = 1.0;

    static PolicySpec analytic(const PolicyCurve& curve);
    static PolicySpec constant_rates(double c, double h);
    static PolicySpec custom(
        std::function<std::pair<double, double>(double, double, int)> fn);
    PolicySpec scaled(double c_scale, double h_scale) const;
};

/// Simulate household paths: exponential death clocks against the
/// accumulated hazard, wealth drift r + mu pi - c - h (plus GBM noise when
/// risky), and realized discounted utility of zeta^N X c.
SimOutcome simulate(const ModelParams& params, const EfficacyModel& efficacy,
                    const PolicySpec& policy, const SimConfig& config);

struct ProbeResult {
    double base_mean = 0.0;
    double perturbed_mean = 0.0;
    double gap = 0.0;       // base - perturbed
    double gap_std_err = 0.0;  // paired, common random numbers
    bool significant_worse = false;
};

/// Welfare comparison of the analytic policy against a scaled perturbation
/// (consumption and/or healthcare multiplied by the given factors), using
/// common random numbers across the two arms.
ProbeResult optimality_probe(const ModelParams& params,
                             const EfficacyModel& efficacy,
                             const PolicyCurve& curve, double c_scale,
                             double h_scale, const SimConfig& config);

}  // namespace gomopt
