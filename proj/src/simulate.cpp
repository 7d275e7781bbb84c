#include "gomopt/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <numeric>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <utility>

#include "gomopt/baseline.hpp"
#include "gomopt/errors.hpp"
#include "gomopt/policy.hpp"
#include "gomopt/rng.hpp"

namespace gomopt {

PolicySpec PolicySpec::analytic(const PolicyCurve& curve) {
    PolicySpec p;
    p.kind = Kind::Analytic;
    p.curve = &curve;
    return p;
}

PolicySpec PolicySpec::constant_rates(double c, double h) {
    if (c < 0.0 || h < 0.0)
        throw std::invalid_argument("policy rates must be nonnegative");
    PolicySpec p;
    p.kind = Kind::ConstantRates;
    p.c = c;
    p.h = h;
    return p;
}

PolicySpec PolicySpec::custom(
    std::function<std::pair<double, double>(double, double, int)> fn) {
    PolicySpec p;
    p.kind = Kind::Custom;
    p.fn = std::move(fn);
    return p;
}

PolicySpec PolicySpec::scaled(double c_scale, double h_scale) const {
    PolicySpec p = *this;
    p.c_scale *= c_scale;
    p.h_scale *= h_scale;
    return p;
}

void SimOutcome::write_csv(std::ostream& os, bool per_path) const {
    os.precision(17);
    os << "mean,std_err,truncation_bound,n_paths,clamped_paths\n";
    os << mean << ',' << std_err << ',' << truncation_bound << ','
       << welfare.size() << ',' << clamped_paths << '\n';
    if (per_path) {
        os << "path,welfare,n_deaths,tau1\n";
        for (size_t i = 0; i < welfare.size(); ++i)
            os << i << ',' << welfare[i] << ',' << n_deaths[i] << ',' << tau1[i]
               << '\n';
    }
}

namespace {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("GOMPERTZ_OPT_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

struct PathResult {
    double welfare;
    double tail_bound;
    double tau1;
    int deaths;
    bool clamped;
};

class PathSimulator {
  public:
    PathSimulator(const ModelParams& params, const EfficacyModel& efficacy,
                  const PolicySpec& policy, const SimConfig& config)
        : params_(params), eff_(efficacy), policy_(policy), config_(config),
          one_minus_gamma_(1.0 - params.gamma),
          zeta_jump_(std::pow(params.zeta, 1.0 - params.gamma)),
          pi_(config.risky ? params.merton_fraction() : 0.0) {
        if (config.dt > 1.0 / 52 + 1e-12)
            throw std::invalid_argument("simulation step must be at most 1/52 year");
        if (policy.kind == PolicySpec::Kind::Analytic) {
            if (!policy.curve) throw std::invalid_argument("analytic policy needs a curve");
            view_.emplace(*policy.curve, params, efficacy);
        }
        m_start_ = config.m_init >= 0.0 ? config.m_init : params.m0;
        if ((policy.kind == PolicySpec::Kind::Analytic ||
             policy.kind == PolicySpec::Kind::ConstantRates) &&
            !config.risky)
            build_schedule();
    }

    PathResult run(uint64_t path_index,
                   std::vector<double>* deaths_out) const {
        Rng rng(config_.seed, path_index);
        if (policy_.kind == PolicySpec::Kind::ConstantRates &&
            eff_.kind() == EfficacyModel::Kind::Zero && !config_.risky)
            return run_event_driven(rng, deaths_out);
        if (!schedule_.empty()) return run_scheduled(rng, deaths_out);
        const double dt = config_.dt;
        const double T = config_.horizon;
        const double g1 = one_minus_gamma_;

        double t = 0.0;
        double ln_x = std::log(config_.x0);
        double m = m_start_;
        int deaths = 0;
        // A = e^{-delta t} zeta^{(1-gamma) n} X^{1-gamma}
        double A = std::pow(config_.x0, g1);
        double welfare = 0.0;
        double acc = 0.0;
        double clock = rng.exponential();
        double tau1 = std::numeric_limits<double>::infinity();
        bool clamped = false;

        while (t < T - 1e-12) {
            const double span = std::min(dt, T - t);
            double c, h;
            lookup_policy(t, m, deaths, clamped, c, h);
            if (!(c >= 0.0) || !(h >= 0.0))
                throw std::invalid_argument(
                    "policy produced a negative rate at t = " + std::to_string(t));
            const double nu_m = params_.beta - eff_.value(h);
            const double m_end = m * std::exp(nu_m * span);
            const double step_hazard = 0.5 * span * (m + m_end);

            double sub = span;
            bool death = false;
            if (acc + step_hazard >= clock) {
                // Exact crossing of the exponential hazard within the step.
                const double need = clock - acc;
                sub = std::abs(nu_m) > 1e-14
                          ? std::log1p(nu_m * need / m) / nu_m
                          : need / m;
                sub = std::clamp(sub, 0.0, span);
                death = true;
            }

            double nu_x = params_.r + params_.mu * pi_ - c - h;
            double dlnx = nu_x * sub;
            if (config_.risky && pi_ != 0.0) {
                const double vol = params_.sigma * pi_;
                dlnx += -0.5 * vol * vol * sub + vol * std::sqrt(sub) * rng.normal();
            }
            const double rho = sub > 0.0 ? -params_.delta + g1 * dlnx / sub
                                         : -params_.delta;
            if (sub > 0.0 && c > 0.0) {
                const double uc = std::pow(c, g1) / g1;
                const double w = std::abs(rho) > 1e-14 ? std::expm1(rho * sub) / rho
                                                       : sub;
                welfare += A * uc * w;
            }
            A *= std::exp(rho * sub);
            ln_x += dlnx;
            t += sub;
            if (death) {
                m *= std::abs(nu_m) > 1e-14 ? std::exp(nu_m * sub) : 1.0;
                ++deaths;
                if (deaths == 1) tau1 = t;
                if (deaths_out) deaths_out->push_back(t);
                A *= zeta_jump_;
                acc = 0.0;
                clock = rng.exponential();
            } else {
                m = m_end;
                acc += step_hazard;
            }
            if (m > 1e12) {  // hazard overflow; remaining utility is negligible
                clamped = true;
                break;
            }
        }

        // Analytic tail envelope: |V| at the horizon with the conservative
        // consumption rate c0(M_T).
        double tail = 0.0;
        const double cm = (params_.delta + params_.zeta_factor() * m) / params_.gamma +
                          (1.0 - 1.0 / params_.gamma) * params_.equivalent_safe_rate();
        if (cm > 0.0)
            tail = std::abs(A * std::pow(cm, -params_.gamma) / g1);
        return {welfare, tail, tau1, deaths, clamped};
    }

  private:
    // Constant rates, zero efficacy, no risky asset: everything between
    // deaths is deterministic and the hazard-clock crossing has a closed
    // form, so the path is simulated exactly with one step per death.
    PathResult run_event_driven(Rng& rng, std::vector<double>* deaths_out) const {
        const double T = config_.horizon;
        const double g1 = one_minus_gamma_;
        const double c = policy_.c * policy_.c_scale;
        const double h = policy_.h * policy_.h_scale;
        const double nu_x = params_.r + params_.mu * pi_ - c - h;
        const double rho = -params_.delta + g1 * nu_x;
        const double beta = params_.beta;
        const double uc = c > 0.0 ? std::pow(c, g1) / g1 : 0.0;

        double t = 0.0;
        double m = m_start_;
        int deaths = 0;
        double A = std::pow(config_.x0, g1);
        double welfare = 0.0;
        double tau1 = std::numeric_limits<double>::infinity();

        while (t < T - 1e-12) {
            const double need = rng.exponential();
            // Solve int_0^s m e^{beta v} dv = need for the next death time.
            double s;
            if (std::abs(beta) > 1e-14) {
                const double arg = beta * need / m;
                s = arg < 1e12 ? std::log1p(arg) / beta
                               : std::numeric_limits<double>::infinity();
            } else {
                s = need / m;
            }
            const double remaining = T - t;
            const double span = std::min(s, remaining);
            if (span > 0.0 && c > 0.0) {
                const double w = std::abs(rho) > 1e-14
                                     ? std::expm1(rho * span) / rho
                                     : span;
                welfare += A * uc * w;
            }
            A *= std::exp(rho * span);
            t += span;
            if (s >= remaining) break;  // next death falls beyond the horizon
            m *= std::abs(beta) > 1e-14 ? std::exp(beta * span) : 1.0;
            ++deaths;
            if (deaths == 1) tau1 = t;
            if (deaths_out) deaths_out->push_back(t);
            A *= zeta_jump_;
            if (m > 1e12) break;
        }

        double tail = 0.0;
        const double cm = (params_.delta + params_.zeta_factor() * m) / params_.gamma +
                          (1.0 - 1.0 / params_.gamma) * params_.equivalent_safe_rate();
        if (cm > 0.0)
            tail = std::abs(A * std::pow(cm, -params_.gamma) / g1);
        return {welfare, tail, tau1, deaths, false};
    }

    // With no risky asset and a policy that depends on (t, m) only, the
    // hazard and spending paths are the same on every simulated path (deaths
    // rescale utility, not the hazard). Precompute one step table so the
    // per-path loop needs no policy lookups or transcendentals away from
    // death events.
    struct Step {
        double span;       // step length (last step may be shorter)
        double m;          // hazard at the step start
        double nu_m;       // hazard log-growth rate over the step
        double hazard;     // trapezoid integral of the hazard over the step
        double rho;        // welfare decay rate -delta + (1-gamma) nu_x
        double uc;         // c^{1-gamma}/(1-gamma), 0 when c = 0
        double grow;       // exp(rho span)
        double w;          // expm1(rho span)/rho
    };

    void build_schedule() {
        const double T = config_.horizon;
        const double dt = config_.dt;
        const double g1 = one_minus_gamma_;
        double t = 0.0;
        double m = m_start_;
        while (t < T - 1e-12) {
            const double span = std::min(dt, T - t);
            double c, h;
            lookup_policy(t, m, 0, schedule_clamped_, c, h);
            if (!(c >= 0.0) || !(h >= 0.0))
                throw std::invalid_argument(
                    "policy produced a negative rate at t = " + std::to_string(t));
            Step s;
            s.span = span;
            s.m = m;
            s.nu_m = params_.beta - eff_.value(h);
            const double m_end = m * std::exp(s.nu_m * span);
            s.hazard = 0.5 * span * (m + m_end);
            const double nu_x = params_.r - c - h;
            s.rho = -params_.delta + g1 * nu_x;
            s.uc = c > 0.0 ? std::pow(c, g1) / g1 : 0.0;
            s.grow = std::exp(s.rho * span);
            s.w = std::abs(s.rho) > 1e-14 ? std::expm1(s.rho * span) / s.rho : span;
            schedule_.push_back(s);
            m = m_end;
            t += span;
            if (m > 1e12) break;  // remaining utility is negligible
        }
        schedule_m_final_ = m;
    }

    PathResult run_scheduled(Rng& rng, std::vector<double>* deaths_out) const {
        const double g1 = one_minus_gamma_;
        double t = 0.0;
        int deaths = 0;
        double A = std::pow(config_.x0, g1);
        double welfare = 0.0;
        double acc = 0.0;
        double clock = rng.exponential();
        double tau1 = std::numeric_limits<double>::infinity();

        for (const Step& step : schedule_) {
            if (acc + step.hazard < clock) {
                welfare += A * step.uc * step.w;
                A *= step.grow;
                acc += step.hazard;
                t += step.span;
                continue;
            }
            // One or more deaths inside this step; resolve them exactly
            // against the exponential hazard, policy frozen over the step.
            double s0 = 0.0;
            double m_loc = step.m;
            while (true) {
                const double rem = step.span - s0;
                const double m_end = m_loc * std::exp(step.nu_m * rem);
                const double hazard_rem = 0.5 * rem * (m_loc + m_end);
                if (acc + hazard_rem < clock) {
                    const double w = std::abs(step.rho) > 1e-14
                                         ? std::expm1(step.rho * rem) / step.rho
                                         : rem;
                    welfare += A * step.uc * w;
                    A *= std::exp(step.rho * rem);
                    acc += hazard_rem;
                    break;
                }
                const double need = clock - acc;
                double sub = std::abs(step.nu_m) > 1e-14
                                 ? std::log1p(step.nu_m * need / m_loc) / step.nu_m
                                 : need / m_loc;
                sub = std::clamp(sub, 0.0, rem);
                if (sub > 0.0) {
                    const double w = std::abs(step.rho) > 1e-14
                                         ? std::expm1(step.rho * sub) / step.rho
                                         : sub;
                    welfare += A * step.uc * w;
                    A *= std::exp(step.rho * sub);
                }
                m_loc *= std::abs(step.nu_m) > 1e-14 ? std::exp(step.nu_m * sub) : 1.0;
                s0 += sub;
                ++deaths;
                if (deaths == 1) tau1 = t + s0;
                if (deaths_out) deaths_out->push_back(t + s0);
                A *= zeta_jump_;
                acc = 0.0;
                clock = rng.exponential();
                if (s0 >= step.span - 1e-15) break;
            }
            t += step.span;
        }

        double tail = 0.0;
        const double m = schedule_m_final_;
        const double cm = (params_.delta + params_.zeta_factor() * m) / params_.gamma +
                          (1.0 - 1.0 / params_.gamma) * params_.equivalent_safe_rate();
        if (cm > 0.0)
            tail = std::abs(A * std::pow(cm, -params_.gamma) / g1);
        return {welfare, tail, tau1, deaths, schedule_clamped_};
    }

    void lookup_policy(double t, double m, int deaths, bool& clamped, double& c,
                       double& h) const {
        c = 0.0;
        h = 0.0;
        switch (policy_.kind) {
            case PolicySpec::Kind::ConstantRates:
                c = policy_.c;
                h = policy_.h;
                break;
            case PolicySpec::Kind::Analytic: {
                double mq = m;
                if (mq < view_->m_min() || mq > view_->m_max()) {
                    mq = std::clamp(mq, view_->m_min(), view_->m_max());
                    clamped = true;
                }
                const auto ch = view_->controls(mq);
                c = ch.c;
                h = ch.h;
                break;
            }
            case PolicySpec::Kind::Custom: {
                const auto ch = policy_.fn(t, m, deaths);
                c = ch.first;
                h = ch.second;
                break;
            }
        }
        c *= policy_.c_scale;
        h *= policy_.h_scale;
    }

    const ModelParams& params_;
    const EfficacyModel& eff_;
    const PolicySpec& policy_;
    const SimConfig& config_;
    double one_minus_gamma_;
    double zeta_jump_;
    double pi_;
    double m_start_ = 0.0;
    std::optional<PolicyView> view_;
    std::vector<Step> schedule_;
    double schedule_m_final_ = 0.0;
    bool schedule_clamped_ = false;
};

}  // namespace

SimOutcome simulate(const ModelParams& params, const EfficacyModel& efficacy,
                    const PolicySpec& policy, const SimConfig& config) {
    if (config.n_paths < 1) throw std::invalid_argument("need at least one path");
    const PathSimulator sim(params, efficacy, policy, config);
    const size_t n = static_cast<size_t>(config.n_paths);

    SimOutcome out;
    out.welfare.resize(n);
    out.n_deaths.resize(n);
    out.tau1.resize(n);
    if (config.record_death_times) out.death_times.resize(n);
    std::vector<double> tails(n);
    std::atomic<long> clamped{0};

    const int n_threads = std::min<long>(resolve_threads(config.threads),
                                         config.n_paths);
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&](size_t lo, size_t hi) {
        try {
            long local_clamped = 0;
            for (size_t i = lo; i < hi; ++i) {
                std::vector<double>* dt_out =
                    config.record_death_times ? &out.death_times[i] : nullptr;
                const PathResult r = sim.run(i, dt_out);
                out.welfare[i] = r.welfare;
                tails[i] = r.tail_bound;
                out.n_deaths[i] = r.deaths;
                out.tau1[i] = r.tau1;
                if (r.clamped) ++local_clamped;
            }
            clamped += local_clamped;
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };

    if (n_threads <= 1) {
        worker(0, n);
    } else {
        std::vector<std::thread> pool;
        const size_t chunk = (n + n_threads - 1) / n_threads;
        for (int ti = 0; ti < n_threads; ++ti) {
            const size_t lo = std::min(n, static_cast<size_t>(ti) * chunk);
            const size_t hi = std::min(n, lo + chunk);
            if (lo < hi) pool.emplace_back(worker, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    // Ordered reductions keep results independent of the thread layout.
    out.mean = std::accumulate(out.welfare.begin(), out.welfare.end(), 0.0) /
               static_cast<double>(n);
    double ss = 0.0;
    for (double w : out.welfare) ss += (w - out.mean) * (w - out.mean);
    out.std_err = n > 1 ? std::sqrt(ss / (static_cast<double>(n) *
                                          (static_cast<double>(n) - 1.0)))
                        : 0.0;
    out.truncation_bound =
        std::accumulate(tails.begin(), tails.end(), 0.0) / static_cast<double>(n);
    out.clamped_paths = clamped.load();
    return out;
}

ProbeResult optimality_probe(const ModelParams& params,
                             const EfficacyModel& efficacy,
                             const PolicyCurve& curve, double c_scale,
                             double h_scale, const SimConfig& config) {
    if (c_scale < 0.0 || c_scale > 2.0 || h_scale < 0.0 || h_scale > 2.0)
        throw std::invalid_argument("probe scales must lie in [0, 2]");
    const PolicySpec base = PolicySpec::analytic(curve);
    const SimOutcome a = simulate(params, efficacy, base, config);
    const SimOutcome b =
        simulate(params, efficacy, base.scaled(c_scale, h_scale), config);

    ProbeResult res;
    res.base_mean = a.mean;
    res.perturbed_mean = b.mean;
    const size_t n = a.welfare.size();
    double mean_diff = 0.0;
    for (size_t i = 0; i < n; ++i) mean_diff += a.welfare[i] - b.welfare[i];
    mean_diff /= static_cast<double>(n);
    double ss = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double d = a.welfare[i] - b.welfare[i] - mean_diff;
        ss += d * d;
    }
    res.gap = mean_diff;
    res.gap_std_err =
        n > 1 ? std::sqrt(ss / (static_cast<double>(n) *
                                (static_cast<double>(n) - 1.0)))
              : 0.0;
    res.significant_worse = res.gap > 2.0 * res.gap_std_err;
    return res;
}

}  // namespace gomopt
