#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(GOMOPT_CLI_PATH) + " " + args +
                            " >/dev/null 2>/dev/null";
    const int rc = std::system(cmd.c_str());
    return rc < 0 ? rc : WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path tmp_dir(const std::string& name) {
    const auto d = fs::temp_directory_path() / name;
    fs::remove_all(d);
    return d;
}

std::string default_cfg() {
    return std::string(GOMOPT_DATA_DIR) + "/default.cfg";
}

// Column extraction from a simple CSV (no quoting anywhere in our outputs).
std::vector<double> column(const fs::path& file, size_t idx) {
    std::ifstream in(file);
    std::string line;
    std::getline(in, line);  // header
    std::vector<double> out;
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::string cell;
        for (size_t i = 0; i <= idx; ++i) std::getline(row, cell, ',');
        out.push_back(std::stod(cell));
    }
    return out;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("solve: artifacts, manifest, increasing consumption") {
    const auto out = tmp_dir("cli_solve");
    REQUIRE(run("solve --config " + default_cfg() + " --out " + out.string()) == 0);
    CHECK(fs::exists(out / "policy_curve.csv"));
    REQUIRE(fs::exists(out / "run_manifest.json"));
    const auto manifest = slurp(out / "run_manifest.json");
    CHECK(manifest.find("\"command\": \"solve\"") != std::string::npos);
    CHECK(manifest.find("config_hash") != std::string::npos);
    CHECK(manifest.find("policy_curve.csv") != std::string::npos);
    const auto u = column(out / "policy_curve.csv", 1);
    REQUIRE(u.size() == 256);
    for (size_t i = 1; i < u.size(); ++i) CHECK(u[i] > u[i - 1]);
}

TEST_CASE("exit codes: 1 for config trouble, 2 for validation") {
    CHECK(run("solve --config /nonexistent.cfg --out /tmp/cli_x") == 1);

    const auto bad = fs::temp_directory_path() / "cli_bad.cfg";
    {
        std::ofstream os(bad);
        os << "r = not_a_number\n";
    }
    CHECK(run("solve --config " + bad.string() + " --out /tmp/cli_x") == 1);

    // Efficacy strong enough to violate g(I((1-gamma)/gamma)) < beta.
    const auto hot = fs::temp_directory_path() / "cli_hot.cfg";
    {
        std::ofstream os(hot);
        os << "beta = 0.077\ngamma = 0.67\nzeta = 0.5\n"
           << "efficacy = isoelastic\na = 0.25\nq = 0.46\n";
    }
    CHECK(run("solve --config " + hot.string() + " --out /tmp/cli_x") == 2);
}

TEST_CASE("solve reruns are byte identical") {
    const auto out1 = tmp_dir("cli_rerun1");
    const auto out2 = tmp_dir("cli_rerun2");
    const std::string flags = " --grid.n 64 --grid.min 0.001 --grid.max 5";
    REQUIRE(run("solve --config " + default_cfg() + flags + " --out " +
                out1.string()) == 0);
    REQUIRE(run("solve --config " + default_cfg() + flags + " --out " +
                out2.string()) == 0);
    CHECK(slurp(out1 / "policy_curve.csv") == slurp(out2 / "policy_curve.csv"));
}

TEST_CASE("grid refinement leaves shared nodes in place") {
    const auto coarse = tmp_dir("cli_g64");
    const auto fine = tmp_dir("cli_g127");
    REQUIRE(run("solve --config " + default_cfg() + " --grid.n 64 --out " +
                coarse.string()) == 0);
    REQUIRE(run("solve --config " + default_cfg() + " --grid.n 127 --out " +
                fine.string()) == 0);
    const auto u64 = column(coarse / "policy_curve.csv", 1);
    const auto u127 = column(fine / "policy_curve.csv", 1);
    REQUIRE(u64.size() == 64);
    REQUIRE(u127.size() == 127);
    for (size_t i = 0; i < u64.size(); ++i)
        CHECK(std::abs(u64[i] - u127[2 * i]) <= 1e-6 * u64[i]);
}

TEST_CASE("profile: zero efficacy spends nothing on healthcare") {
    const auto cfg = fs::temp_directory_path() / "cli_zero.cfg";
    {
        std::ofstream os(cfg);
        os << "beta = 0.077\ngamma = 0.67\nzeta = 0.5\nm0 = 0.00019\n"
           << "efficacy = zero\n";
    }
    const auto out = tmp_dir("cli_prof0");
    REQUIRE(run("profile --config " + cfg.string() + " --out " + out.string()) == 0);
    for (double h : column(out / "age_profile.csv", 3)) CHECK(h == 0.0);
    CHECK(fs::exists(out / "mortality_compare.csv"));
}

TEST_CASE("simulate: fixed seed reruns are byte identical") {
    const auto out1 = tmp_dir("cli_sim1");
    const auto out2 = tmp_dir("cli_sim2");
    const std::string flags = " --paths 500 --horizon 80 --seed 7 --per-path";
    REQUIRE(run("simulate --config " + default_cfg() + flags + " --out " +
                out1.string()) == 0);
    REQUIRE(run("simulate --config " + default_cfg() + flags + " --out " +
                out2.string()) == 0);
    CHECK(slurp(out1 / "simulation.csv") == slurp(out2 / "simulation.csv"));
    CHECK(slurp(out1 / "simulation.csv").rfind(
              "mean,std_err,truncation_bound,n_paths,clamped_paths\n", 0) == 0);
}

TEST_CASE("calibrate: Gompertz fit on the shipped early cohort") {
    const auto out = tmp_dir("cli_cal");
    REQUIRE(run(std::string("calibrate --early ") + GOMOPT_DATA_DIR +
                "/cohort_1900.csv --out " + out.string()) == 0);
    const auto fit = slurp(out / "gompertz_fit.txt");
    CHECK(fit.find("beta=") != std::string::npos);
    CHECK(fit.find("m0=") != std::string::npos);
    CHECK(fit.find("converged=1") != std::string::npos);
}

}  // TEST_SUITE
