#include "gomopt/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "gomopt/errors.hpp"
#include "gomopt/hjb.hpp"
#include "gomopt/policy.hpp"
#include "gomopt/rng.hpp"

namespace gomopt {

CohortTable load_cohort_csv(const std::string& path, int cohort_year) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open cohort file: " + path);
    CohortTable table;
    table.cohort_year = cohort_year;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (line_no == 1) {
            if (line.rfind("age,rate", 0) != 0)
                throw parse_error(path + ":1: expected header 'age,rate'");
            continue;
        }
        std::istringstream row(line);
        std::string age_s, rate_s;
        if (!std::getline(row, age_s, ',') || !std::getline(row, rate_s))
            throw parse_error(path + ":" + std::to_string(line_no) +
                              ": malformed row '" + line + "'");
        double age, rate;
        try {
            size_t pa = 0, pr = 0;
            age = std::stod(age_s, &pa);
            rate = std::stod(rate_s, &pr);
            if (pa != age_s.size() || pr != rate_s.size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw parse_error(path + ":" + std::to_string(line_no) +
                              ": malformed row '" + line + "'");
        }
        if (!(rate > 0.0)) {
            ++table.dropped_rows;
            continue;
        }
        if (!table.ages.empty() && age <= table.ages.back())
            throw parse_error(path + ":" + std::to_string(line_no) +
                              ": ages must be strictly increasing");
        table.ages.push_back(age);
        table.hazards.push_back(rate);
    }
    return table;
}

void save_cohort_csv(const CohortTable& table, std::ostream& os) {
    os.precision(17);
    os << "age,rate\n";
    for (size_t i = 0; i < table.size(); ++i)
        os << table.ages[i] << ',' << table.hazards[i] << '\n';
}

void FitResult::write(std::ostream& os) const {
    os.precision(17);
    for (const auto& [key, value] : values) os << key << '=' << value << '\n';
    for (const auto& [key, value] : std_errors)
        os << "stderr_" << key << '=' << value << '\n';
    os << "loss=" << loss << "\nn_evals=" << n_evals
       << "\nconverged=" << (converged ? 1 : 0) << '\n';
}

FitResult fit_gompertz(const CohortTable& table, double anchor_age) {
    const size_t n = table.size();
    if (n < 8)
        throw validation_error("cohort fit needs at least 8 valid rows, got " +
                               std::to_string(n));
    double sx = 0.0, sy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sx += table.ages[i];
        sy += std::log(table.hazards[i]);
    }
    const double xbar = sx / n, ybar = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double dx = table.ages[i] - xbar;
        sxx += dx * dx;
        sxy += dx * (std::log(table.hazards[i]) - ybar);
    }
    if (!(sxx > 0.0)) throw validation_error("degenerate design: all ages equal");
    const double beta = sxy / sxx;
    const double log_m0 = ybar + beta * (anchor_age - xbar);

    double ssr = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double resid =
            std::log(table.hazards[i]) - (log_m0 + beta * (table.ages[i] - anchor_age));
        ssr += resid * resid;
    }
    const double sigma2 = n > 2 ? ssr / (n - 2) : 0.0;

    FitResult fit;
    fit.values["beta"] = beta;
    fit.values["m0"] = std::exp(log_m0);
    fit.std_errors["beta"] = std::sqrt(sigma2 / sxx);
    const double se_log_m0 =
        std::sqrt(sigma2 * (1.0 / n + (xbar - anchor_age) * (xbar - anchor_age) / sxx));
    fit.std_errors["m0"] = std::exp(log_m0) * se_log_m0;
    fit.loss = ssr;
    fit.n_evals = static_cast<int>(n);
    fit.converged = true;
    return fit;
}

NmOutcome nelder_mead(const NmObjective& f, std::vector<double> x0, double step,
                      int max_iters, double tol) {
    const size_t dim = x0.size();
    std::vector<std::vector<double>> simplex(dim + 1, x0);
    for (size_t i = 0; i < dim; ++i) simplex[i + 1][i] += step;
    std::vector<double> fv(dim + 1);
    NmOutcome out;
    for (size_t i = 0; i <= dim; ++i) fv[i] = f(simplex[i]);
    out.n_evals = static_cast<int>(dim) + 1;

    auto order = [&] {
        std::vector<size_t> idx(dim + 1);
        for (size_t i = 0; i <= dim; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return fv[a] < fv[b]; });
        std::vector<std::vector<double>> sx(dim + 1);
        std::vector<double> sf(dim + 1);
        for (size_t i = 0; i <= dim; ++i) {
            sx[i] = simplex[idx[i]];
            sf[i] = fv[idx[i]];
        }
        simplex.swap(sx);
        fv.swap(sf);
    };
    auto diameter = [&] {
        double d = 0.0;
        for (size_t i = 1; i <= dim; ++i)
            for (size_t j = 0; j < dim; ++j)
                d = std::max(d, std::abs(simplex[i][j] - simplex[0][j]));
        return d;
    };

    for (int iter = 0; iter < max_iters; ++iter) {
        order();
        out.best_trace.push_back(fv[0]);
        if (diameter() < tol && std::isfinite(fv[0])) {
            out.converged = true;
            break;
        }
        std::vector<double> centroid(dim, 0.0);
        for (size_t i = 0; i < dim; ++i)
            for (size_t j = 0; j < dim; ++j) centroid[j] += simplex[i][j] / dim;
        auto blend = [&](double coef) {
            std::vector<double> x(dim);
            for (size_t j = 0; j < dim; ++j)
                x[j] = centroid[j] + coef * (simplex[dim][j] - centroid[j]);
            return x;
        };
        const auto xr = blend(-1.0);
        const double fr = f(xr);
        ++out.n_evals;
        if (fr < fv[0]) {
            const auto xe = blend(-2.0);
            const double fe = f(xe);
            ++out.n_evals;
            if (fe < fr) {
                simplex[dim] = xe;
                fv[dim] = fe;
            } else {
                simplex[dim] = xr;
                fv[dim] = fr;
            }
        } else if (fr < fv[dim - 1]) {
            simplex[dim] = xr;
            fv[dim] = fr;
        } else {
            const auto xc = blend(fr < fv[dim] ? -0.5 : 0.5);
            const double fc = f(xc);
            ++out.n_evals;
            if (fc < std::min(fr, fv[dim])) {
                simplex[dim] = xc;
                fv[dim] = fc;
            } else {
                for (size_t i = 1; i <= dim; ++i) {
                    for (size_t j = 0; j < dim; ++j)
                        simplex[i][j] = 0.5 * (simplex[i][j] + simplex[0][j]);
                    fv[i] = f(simplex[i]);
                    ++out.n_evals;
                }
            }
        }
    }
    order();
    out.best_x = simplex[0];
    out.best_f = fv[0];
    return out;
}

FitResult fit_efficacy(const CohortTable& table_late, double beta, double m0,
                       const ModelParams& params, const SearchSpec& search) {
    if (table_late.size() < 8)
        throw validation_error("efficacy fit needs at least 8 valid rows");
    ModelParams base(params.r, params.delta, beta, params.gamma, params.zeta,
                     params.mu, params.sigma, m0);
    const double age_max = table_late.ages.back();
    const double haz_min = *std::min_element(table_late.hazards.begin(),
                                             table_late.hazards.end());
    const double haz_max = *std::max_element(table_late.hazards.begin(),
                                             table_late.hazards.end());
    GridSpec grid;
    grid.m_min = std::max(1e-7, 0.25 * std::min(m0, haz_min));
    grid.m_max = std::max(0.2, 20.0 * haz_max);
    grid.n_points = search.grid_points;

    std::mutex eval_mutex;
    int total_evals = 0;
    const double inf = std::numeric_limits<double>::infinity();
    auto objective = [&](const std::vector<double>& x) -> double {
        const double a = std::exp(x[0]);
        const double q = 1.0 / (1.0 + std::exp(-x[1]));
        {
            std::lock_guard<std::mutex> lock(eval_mutex);
            ++total_evals;
        }
        if (a < search.a_min || a > search.a_max || q < search.q_min || q > search.q_max)
            return inf;
        try {
            const EfficacyModel eff = EfficacyModel::isoelastic(a, q);
            if (!validate(base, eff, Regime::AgingHealth).all_pass()) return inf;
            const PolicyCurve curve = solve_u_star(base, eff, grid, 1e-8);
            const AgeProfile profile = endogenous_mortality(
                base, eff, curve, 0.0, age_max, 0.0, m0,
                static_cast<int>(std::lround(age_max)) + 1);
            double loss = 0.0;
            for (size_t i = 0; i < table_late.size(); ++i) {
                const double model =
                    lerp_table(profile.ages, profile.mortality, table_late.ages[i]);
                const double d = std::log(model) - std::log(table_late.hazards[i]);
                loss += d * d;
            }
            return loss;
        } catch (const std::exception&) {
            return inf;
        }
    };

    const double la_lo = std::log(search.a_min), la_hi = std::log(search.a_max);
    auto logit = [](double q) { return std::log(q / (1.0 - q)); };
    const double lq_lo = logit(search.q_min), lq_hi = logit(search.q_max);

    std::vector<NmOutcome> runs(static_cast<size_t>(std::max(1, search.restarts)));
    std::vector<std::thread> pool;
    for (size_t ri = 0; ri < runs.size(); ++ri) {
        pool.emplace_back([&, ri] {
            std::vector<double> x0(2);
            if (ri == 0) {
                x0[0] = 0.5 * (la_lo + la_hi);
                x0[1] = 0.5 * (lq_lo + lq_hi);
            } else {
                Rng rng(search.seed, ri);
                x0[0] = la_lo + (la_hi - la_lo) * rng.uniform();
                x0[1] = lq_lo + (lq_hi - lq_lo) * rng.uniform();
            }
            runs[ri] = nelder_mead(objective, x0, 0.4, search.max_iters, search.tol);
        });
    }
    for (auto& th : pool) th.join();

    size_t best = 0;
    for (size_t ri = 1; ri < runs.size(); ++ri)
        if (runs[ri].best_f < runs[best].best_f) best = ri;
    const NmOutcome& run = runs[best];
    if (!std::isfinite(run.best_f))
        throw validation_error(
            "no feasible (a, q) in the search box: every trial violated the "
            "well-posedness margin g(I((1-gamma)/gamma)) < beta");

    const double a_hat = std::exp(run.best_x[0]);
    const double q_hat = 1.0 / (1.0 + std::exp(-run.best_x[1]));
    const bool on_boundary =
        a_hat < search.a_min * 1.02 || a_hat > search.a_max * 0.98 ||
        q_hat < search.q_min + 0.01 || q_hat > search.q_max - 0.01;

    FitResult fit;
    fit.values["a"] = a_hat;
    fit.values["q"] = q_hat;
    const EfficacyModel eff = EfficacyModel::isoelastic(a_hat, q_hat);
    const double k = (1.0 - base.gamma) / base.gamma;
    fit.values["margin"] = beta - eff.value(eff.inverse_marginal(k));
    fit.values["on_boundary"] = on_boundary ? 1.0 : 0.0;
    fit.loss = run.best_f;
    fit.n_evals = total_evals;
    fit.converged = run.converged && !on_boundary;
    return fit;
}

}  // namespace gomopt
