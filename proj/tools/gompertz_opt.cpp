// Command-line front door: solve / profile / simulate / calibrate.
//
// Every run writes its artifacts under --out together with a
// run_manifest.json recording the command, the digest of the resolved
// configuration, the produced files, and the wall time, so any CSV can be
// traced back to the exact run that made it.
//
// Exit codes: 0 success, 1 config or input error, 2 validation failure,
// 3 convergence failure.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gomopt/baseline.hpp"
#include "gomopt/calibrate.hpp"
#include "gomopt/config.hpp"
#include "gomopt/errors.hpp"
#include "gomopt/hjb.hpp"
#include "gomopt/policy.hpp"
#include "gomopt/simulate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GridFlags {
    double m_min = 1e-5;
    double m_max = 20.0;
    int n = 256;
    std::string spacing = "log";

    gomopt::GridSpec spec() const {
        gomopt::GridSpec g;
        g.m_min = m_min;
        g.m_max = m_max;
        g.n_points = n;
        g.spacing = spacing == "linear" ? gomopt::GridSpec::Spacing::Linear
                                        : gomopt::GridSpec::Spacing::Log;
        return g;
    }
};

void add_grid_flags(CLI::App* cmd, GridFlags& grid) {
    cmd->add_option("--grid.min", grid.m_min, "lowest hazard node");
    cmd->add_option("--grid.max", grid.m_max, "highest hazard node");
    cmd->add_option("--grid.n", grid.n, "number of hazard nodes");
    cmd->add_option("--grid.spacing", grid.spacing, "log or linear")
        ->check(CLI::IsMember({"log", "linear"}));
}

std::string hash_hex(uint64_t h) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

class Manifest {
  public:
    Manifest(std::string command, const fs::path& out_dir, uint64_t config_hash)
        : command_(std::move(command)), out_dir_(out_dir),
          config_hash_(config_hash), start_(std::chrono::steady_clock::now()) {
        fs::create_directories(out_dir_);
    }

    fs::path path(const std::string& name) {
        outputs_.push_back(name);
        return out_dir_ / name;
    }

    void write() const {
        json j;
        j["command"] = command_;
        j["config_hash"] = hash_hex(config_hash_);
        j["outputs"] = outputs_;
        j["wall_time"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
                .count();
        std::ofstream os(out_dir_ / "run_manifest.json");
        os << j.dump(2) << '\n';
    }

  private:
    std::string command_;
    fs::path out_dir_;
    uint64_t config_hash_;
    std::vector<std::string> outputs_;
    std::chrono::steady_clock::time_point start_;
};

void require_valid(const gomopt::Config& cfg, gomopt::Regime regime,
                   double m_const = 0.0) {
    const auto report = gomopt::validate(cfg.params, cfg.efficacy, regime, m_const);
    if (!report.all_pass()) {
        std::cerr << report.summary();
        throw gomopt::validation_error("well-posedness check failed");
    }
}

int cmd_solve(const std::string& config_path, const std::string& out_dir,
              const GridFlags& grid, double tol) {
    const auto cfg = gomopt::load_config(config_path);
    require_valid(cfg, gomopt::Regime::AgingHealth);
    Manifest manifest("solve", out_dir, gomopt::config_hash(cfg.raw));
    const auto curve = gomopt::solve_u_star(cfg.params, cfg.efficacy, grid.spec(), tol);
    {
        std::ofstream os(manifest.path("policy_curve.csv"));
        curve.write_csv(os);
    }
    manifest.write();
    std::cout << "solved " << curve.size() << " nodes, beta_g = " << curve.beta_g
              << ", u(" << curve.m.front() << ") = " << curve.u.front() << ", u("
              << curve.m.back() << ") = " << curve.u.back() << '\n';
    return 0;
}

int cmd_profile(const std::string& config_path, const std::string& out_dir,
                const GridFlags& grid, double anchor_age, double anchor_hazard,
                double age_min, double age_max) {
    const auto cfg = gomopt::load_config(config_path);
    require_valid(cfg, gomopt::Regime::AgingHealth);
    Manifest manifest("profile", out_dir, gomopt::config_hash(cfg.raw));
    if (anchor_hazard <= 0.0) anchor_hazard = cfg.params.m0;
    const auto curve = gomopt::solve_u_star(cfg.params, cfg.efficacy, grid.spec());
    const auto profile = gomopt::endogenous_mortality(
        cfg.params, cfg.efficacy, curve, age_min, age_max, anchor_age, anchor_hazard,
        static_cast<int>(std::lround(age_max - age_min)) + 1);
    {
        std::ofstream os(manifest.path("age_profile.csv"));
        profile.write_csv(os);
    }
    {
        // Model hazard against the pure-Gompertz extrapolation from the same
        // anchor, in levels and logs, ready for semilog plotting.
        std::ofstream os(manifest.path("mortality_compare.csv"));
        os.precision(12);
        os << "age,model,gompertz,log_model,log_gompertz\n";
        for (size_t i = 0; i < profile.ages.size(); ++i) {
            const double age = profile.ages[i];
            const double gomp =
                anchor_hazard * std::exp(cfg.params.beta * (age - anchor_age));
            os << age << ',' << profile.mortality[i] << ',' << gomp << ','
               << std::log(profile.mortality[i]) << ',' << std::log(gomp) << '\n';
        }
    }
    manifest.write();
    std::cout << "profiled ages [" << age_min << ", " << age_max << "], hazard("
              << age_max << ") = " << profile.mortality.back() << '\n';
    return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 gomopt::SimConfig sim, const GridFlags& grid,
                 const std::string& policy_name, bool per_path) {
    const auto cfg = gomopt::load_config(config_path);
    Manifest manifest("simulate", out_dir, gomopt::config_hash(cfg.raw));
    const double m_init = sim.m_init < 0.0 ? cfg.params.m0 : sim.m_init;

    gomopt::PolicySpec policy;
    double analytic = 0.0;
    if (policy_name == "analytic") {
        require_valid(cfg, gomopt::Regime::AgingHealth);
        static gomopt::PolicyCurve curve;
        curve = gomopt::solve_u_star(cfg.params, cfg.efficacy, grid.spec());
        policy = gomopt::PolicySpec::analytic(curve);
        analytic =
            gomopt::value_function(sim.x0, m_init, curve, cfg.params, cfg.efficacy);
    } else {
        // Constant policy c0(m_init) with no healthcare: the closed-form
        // benchmark for constant mortality.
        require_valid(cfg, gomopt::Regime::ConstMortality, m_init);
        const double c = gomopt::c0(m_init, cfg.params);
        policy = gomopt::PolicySpec::constant_rates(c, 0.0);
        const double g1 = 1.0 - cfg.params.gamma;
        analytic = std::pow(sim.x0, g1) / g1 * std::pow(c, -cfg.params.gamma);
    }

    const auto outcome = gomopt::simulate(cfg.params, cfg.efficacy, policy, sim);
    {
        std::ofstream os(manifest.path("simulation.csv"));
        outcome.write_csv(os, per_path);
    }
    manifest.write();
    std::cout.precision(10);
    std::cout << "mean welfare  " << outcome.mean << " +/- " << outcome.std_err
              << "\nanalytic      " << analytic
              << "\ntail bound    " << outcome.truncation_bound << '\n';
    return 0;
}

int cmd_calibrate(const std::string& early_path, const std::string& late_path,
                  const std::string& config_path, const std::string& out_dir,
                  double anchor_age, gomopt::SearchSpec search) {
    gomopt::Config cfg;
    if (!config_path.empty()) cfg = gomopt::load_config(config_path);
    Manifest manifest("calibrate", out_dir, gomopt::config_hash(cfg.raw));

    const auto early = gomopt::load_cohort_csv(early_path);
    if (early.dropped_rows > 0)
        std::cerr << "note: dropped " << early.dropped_rows
                  << " nonpositive-hazard rows from " << early_path << '\n';
    const auto gompertz = gomopt::fit_gompertz(early, anchor_age);
    {
        std::ofstream os(manifest.path("gompertz_fit.txt"));
        gompertz.write(os);
    }
    const double beta = gompertz.values.at("beta");
    const double m0 = gompertz.values.at("m0");
    std::cout << "gompertz fit: beta = " << beta << ", m0 = " << m0 << '\n';

    if (!late_path.empty()) {
        const auto late = gomopt::load_cohort_csv(late_path);
        if (late.dropped_rows > 0)
            std::cerr << "note: dropped " << late.dropped_rows
                      << " nonpositive-hazard rows from " << late_path << '\n';
        const auto efficacy = gomopt::fit_efficacy(late, beta, m0, cfg.params, search);
        {
            std::ofstream os(manifest.path("efficacy_fit.txt"));
            efficacy.write(os);
        }
        const double a = efficacy.values.at("a");
        const double q = efficacy.values.at("q");
        std::cout << "efficacy fit: a = " << a << ", q = " << q
                  << ", loss = " << efficacy.loss
                  << (efficacy.converged ? "" : "  (not converged)") << '\n';

        // Fitted endogenous curve next to both cohorts for plotting.
        gomopt::ModelParams fitted(cfg.params.r, cfg.params.delta, beta,
                                   cfg.params.gamma, cfg.params.zeta, cfg.params.mu,
                                   cfg.params.sigma, m0);
        const auto eff = gomopt::EfficacyModel::isoelastic(a, q);
        gomopt::GridSpec grid;
        grid.m_min = std::min(1e-5, 0.5 * m0);
        grid.m_max = std::max(20.0 * late.hazards.back(), 0.2);
        const auto curve = gomopt::solve_u_star(fitted, eff, grid);
        const double age_max = std::max(early.ages.back(), late.ages.back());
        const auto profile = gomopt::endogenous_mortality(
            fitted, eff, curve, 0.0, age_max, anchor_age, m0,
            static_cast<int>(std::lround(age_max)) + 1);
        std::ofstream os(manifest.path("fitted_curve.csv"));
        os.precision(12);
        os << "age,model,gompertz\n";
        for (size_t i = 0; i < profile.ages.size(); ++i)
            os << profile.ages[i] << ',' << profile.mortality[i] << ','
               << m0 * std::exp(beta * (profile.ages[i] - anchor_age)) << '\n';
    }
    manifest.write();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal consumption, healthcare, and investment with Gompertz "
                 "mortality: solver, profiles, Monte Carlo, calibration"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    GridFlags grid;
    double tol = 1e-9;

    auto* solve = app.add_subcommand("solve", "solve the consumption ODE");
    solve->add_option("--config", config_path, "key=value config file")->required();
    solve->add_option("--out", out_dir, "output directory");
    solve->add_option("--tol", tol, "solver tolerance");
    add_grid_flags(solve, grid);

    double anchor_age = 0.0, anchor_hazard = -1.0, age_min = 0.0, age_max = 100.0;
    auto* profile = app.add_subcommand("profile", "age profiles under the policy");
    profile->add_option("--config", config_path, "key=value config file")->required();
    profile->add_option("--out", out_dir, "output directory");
    profile->add_option("--anchor-age", anchor_age, "age where the hazard is pinned");
    profile->add_option("--anchor-hazard", anchor_hazard,
                        "hazard at the anchor age (default: config m0)");
    profile->add_option("--age-min", age_min, "first output age");
    profile->add_option("--age-max", age_max, "last output age");
    add_grid_flags(profile, grid);

    gomopt::SimConfig sim;
    std::string policy_name = "analytic";
    bool per_path = false;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo welfare check");
    simulate->add_option("--config", config_path, "key=value config file")->required();
    simulate->add_option("--out", out_dir, "output directory");
    simulate->add_option("--seed", sim.seed, "RNG seed");
    simulate->add_option("--paths", sim.n_paths, "number of paths");
    simulate->add_option("--horizon", sim.horizon, "simulated years");
    simulate->add_option("--dt", sim.dt, "time step (at most weekly)");
    simulate->add_option("--m-init", sim.m_init, "initial hazard (default: config m0)");
    simulate->add_option("--policy", policy_name, "analytic or baseline")
        ->check(CLI::IsMember({"analytic", "baseline"}));
    simulate->add_flag("--risky", sim.risky, "include the risky asset");
    simulate->add_flag("--per-path", per_path, "emit one CSV row per path");
    add_grid_flags(simulate, grid);

    std::string early_path, late_path;
    gomopt::SearchSpec search;
    auto* calibrate = app.add_subcommand("calibrate", "fit cohort mortality data");
    calibrate->add_option("--early", early_path, "early cohort CSV (age,rate)")
        ->required();
    calibrate->add_option("--late", late_path,
                          "late cohort CSV; enables the efficacy fit");
    calibrate->add_option("--config", config_path, "preference parameters");
    calibrate->add_option("--out", out_dir, "output directory");
    calibrate->add_option("--anchor-age", anchor_age, "age where m0 is quoted");
    calibrate->add_option("--seed", search.seed, "restart seed");
    calibrate->add_option("--restarts", search.restarts, "simplex restarts");
    calibrate->add_option("--max-iters", search.max_iters, "simplex iterations");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return cmd_solve(config_path, out_dir, grid, tol);
        if (profile->parsed())
            return cmd_profile(config_path, out_dir, grid, anchor_age, anchor_hazard,
                               age_min, age_max);
        if (simulate->parsed())
            return cmd_simulate(config_path, out_dir, sim, grid, policy_name, per_path);
        return cmd_calibrate(early_path, late_path, config_path, out_dir, anchor_age,
                             search);
    } catch (const gomopt::parse_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const gomopt::validation_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const gomopt::convergence_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
