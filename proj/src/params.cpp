#include "gomopt/params.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "gomopt/errors.hpp"

namespace gomopt {

ModelParams::ModelParams(double r_, double delta_, double beta_, double gamma_,
                         double zeta_, double mu_, double sigma_, double m0_)
    : r(r_), delta(delta_), beta(beta_), gamma(gamma_), zeta(zeta_), mu(mu_),
      sigma(sigma_), m0(m0_) {
    if (!(gamma > 0.0) || gamma == 1.0)
        throw validation_error("gamma must be positive and != 1 (got " +
                               std::to_string(gamma) + ")");
    if (zeta < 0.0 || zeta > 1.0)
        throw validation_error("zeta must lie in [0,1]");
    if (beta < 0.0) throw validation_error("beta must be nonnegative");
    if (mu != 0.0 && !(sigma > 0.0))
        throw validation_error("sigma must be positive when mu != 0");
    if (sigma < 0.0) throw validation_error("sigma must be nonnegative");
    if (m0 < 0.0) throw validation_error("m0 must be nonnegative");
}

double ModelParams::zeta_factor() const {
    // zeta = 0 with gamma > 1 gives zeta^(1-gamma) = +inf; propagate -inf so
    // downstream conditions fail visibly.
    return 1.0 - std::pow(zeta, 1.0 - gamma);
}

double ModelParams::equivalent_safe_rate() const {
    if (mu == 0.0) return r;
    return r + 0.5 * (mu / sigma) * (mu / sigma) / gamma;
}

double ModelParams::merton_fraction() const {
    if (mu == 0.0) return 0.0;
    return mu / (gamma * sigma * sigma);
}

double ModelParams::cbar() const {
    return delta / gamma + (1.0 - 1.0 / gamma) * equivalent_safe_rate();
}

EfficacyModel EfficacyModel::zero() { return EfficacyModel{}; }

EfficacyModel EfficacyModel::isoelastic(double a, double q) {
    if (!(a > 0.0)) throw validation_error("isoelastic efficacy requires a > 0");
    if (!(q > 0.0 && q < 1.0))
        throw validation_error("isoelastic efficacy requires q in (0,1)");
    EfficacyModel e;
    e.kind_ = Kind::Isoelastic;
    e.a_ = a;
    e.q_ = q;
    return e;
}

EfficacyModel EfficacyModel::custom(std::function<double(double)> g,
                                    std::function<double(double)> dg) {
    EfficacyModel e;
    e.kind_ = Kind::Custom;
    e.g_ = std::move(g);
    e.dg_ = std::move(dg);
    return e;
}

double EfficacyModel::value(double h) const {
    switch (kind_) {
        case Kind::Zero: return 0.0;
        case Kind::Isoelastic: return h <= 0.0 ? 0.0 : a_ * std::pow(h, q_) / q_;
        case Kind::Custom: return h <= 0.0 ? 0.0 : g_(h);
    }
    return 0.0;
}

double EfficacyModel::marginal(double h) const {
    switch (kind_) {
        case Kind::Zero: return 0.0;
        case Kind::Isoelastic: return a_ * std::pow(h, q_ - 1.0);
        case Kind::Custom: return dg_(h);
    }
    return 0.0;
}

double EfficacyModel::inverse_marginal(double y) const {
    if (!(y > 0.0)) throw std::domain_error("inverse marginal efficacy needs y > 0");
    switch (kind_) {
        case Kind::Zero: return 0.0;
        case Kind::Isoelastic: return std::pow(a_ / y, 1.0 / (1.0 - q_));
        case Kind::Custom: break;
    }
    // Safeguarded bisection on the decreasing g'.
    double lo = 1e-12, hi = 1e6;
    if (dg_(lo) <= y) return lo;
    if (dg_(hi) >= y) return hi;
    for (int i = 0; i < 200; ++i) {
        const double mid = std::sqrt(lo * hi);
        (dg_(mid) > y ? lo : hi) = mid;
        if (hi - lo <= 1e-10 * hi) break;
    }
    return 0.5 * (lo + hi);
}

EfficacyModel::Conjugate EfficacyModel::conjugate(double k) const {
    if (!(k > 0.0))
        throw std::domain_error("efficacy conjugate is +inf for slope k <= 0");
    if (kind_ == Kind::Zero) return {0.0, 0.0};
    const double h = inverse_marginal(k);
    return {value(h) - k * h, h};
}

bool ValidationReport::all_pass() const {
    for (const auto& c : conditions)
        if (!c.pass) return false;
    return true;
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    for (const auto& c : conditions)
        os << (c.pass ? "[pass] " : "[FAIL] ") << c.name << "  (lhs=" << c.lhs
           << ", rhs=" << c.rhs << ")\n";
    return os.str();
}

void ValidationReport::require() const {
    for (const auto& c : conditions)
        if (!c.pass)
            throw validation_error("condition failed: " + c.name + " (lhs=" +
                                   std::to_string(c.lhs) + ", rhs=" +
                                   std::to_string(c.rhs) + ")");
}

ValidationReport validate(const ModelParams& params, const EfficacyModel& efficacy,
                          Regime regime, double m_const) {
    ValidationReport rep;
    rep.regime = regime;
    const double req = params.equivalent_safe_rate();
    switch (regime) {
        case Regime::ConstMortality: {
            const double lhs =
                params.delta + params.zeta_factor() * m_const - (1.0 - params.gamma) * req;
            rep.conditions.push_back({"delta + (1-zeta^(1-gamma)) m - (1-gamma) r > 0",
                                      lhs, 0.0, lhs > 0.0});
            break;
        }
        case Regime::AgingNoHealth: {
            const bool case_i = params.gamma > 0.0 && params.gamma < 1.0 &&
                                params.zeta > 0.0 && params.zeta < 1.0 &&
                                params.cbar() > 0.0;
            const bool case_ii = params.gamma > 1.0 && params.zeta > 1.0;
            rep.conditions.push_back({"beta > 0", params.beta, 0.0, params.beta > 0.0});
            rep.conditions.push_back(
                {"(i) gamma, zeta in (0,1) and cbar > 0, or (ii) gamma, zeta > 1",
                 params.cbar(), 0.0, case_i || case_ii});
            break;
        }
        case Regime::AgingHealth: {
            rep.conditions.push_back({"0 < gamma < 1", params.gamma, 1.0,
                                      params.gamma > 0.0 && params.gamma < 1.0});
            rep.conditions.push_back(
                {"zeta in (0,1)", params.zeta, 1.0, params.zeta > 0.0 && params.zeta < 1.0});
            rep.conditions.push_back({"cbar > 0", params.cbar(), 0.0, params.cbar() > 0.0});
            rep.conditions.push_back({"beta > 0", params.beta, 0.0, params.beta > 0.0});
            double lhs = 0.0;
            bool ok = true;
            if (efficacy.kind() != EfficacyModel::Kind::Zero &&
                params.gamma > 0.0 && params.gamma < 1.0) {
                const double k = (1.0 - params.gamma) / params.gamma;
                lhs = efficacy.value(efficacy.inverse_marginal(k));
                ok = lhs < params.beta;
            } else if (efficacy.kind() == EfficacyModel::Kind::Zero) {
                ok = params.beta > 0.0;
            }
            rep.conditions.push_back(
                {"g(I((1-gamma)/gamma)) < beta", lhs, params.beta, ok});
            break;
        }
    }
    return rep;
}

std::vector<double> GridSpec::nodes() const {
    if (n_points < 16) throw validation_error("grid needs at least 16 points");
    if (!(m_max > m_min)) throw validation_error("grid needs m_max > m_min");
    if (spacing == Spacing::Log && !(m_min > 0.0))
        throw validation_error("log grid needs m_min > 0");
    std::vector<double> out(static_cast<size_t>(n_points));
    if (spacing == Spacing::Log) {
        const double l0 = std::log(m_min), l1 = std::log(m_max);
        for (int i = 0; i < n_points; ++i)
            out[static_cast<size_t>(i)] =
                std::exp(l0 + (l1 - l0) * i / (n_points - 1));
    } else {
        for (int i = 0; i < n_points; ++i)
            out[static_cast<size_t>(i)] = m_min + (m_max - m_min) * i / (n_points - 1);
    }
    out.front() = m_min;
    out.back() = m_max;
    return out;
}

}  // namespace gomopt
