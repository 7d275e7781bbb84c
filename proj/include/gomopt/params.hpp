#pragma once

#include <functional>
#include <string>
#include <vector>

namespace gomopt {

/// Economic, preference, and mortality parameters. All rates are per year.
/// Immutable after construction; the constructor enforces the structural
/// invariants (gamma > 0 and != 1, zeta in [0,1], beta >= 0, sigma > 0
/// whenever mu != 0, m0 >= 0). Regime-specific well-posedness is checked
/// separately by validate().
struct ModelParams {
    double r = 0.01;       // safe rate
    double delta = 0.01;   // time preference
    double beta = 0.077;   // natural mortality growth
    double gamma = 0.67;   // relative risk aversion
    double zeta = 0.5;     // wealth retained by survivors at each death
    double mu = 0.0;       // risky excess drift
    double sigma = 0.0;    // risky volatility
    double m0 = 0.00019;   // initial mortality hazard

    ModelParams() = default;
    ModelParams(double r_, double delta_, double beta_, double gamma_, double zeta_,
                double mu_ = 0.0, double sigma_ = 0.0, double m0_ = 0.00019);

    /// 1 - zeta^(1-gamma); the per-death discount on marginal utility.
    double zeta_factor() const;

    /// Equivalent safe rate r + mu^2 / (2 gamma sigma^2). Equals r when mu = 0.
    /// All consumption formulas use this rate, which absorbs the risky asset.
    double equivalent_safe_rate() const;

    /// Constant optimal fraction of wealth in the risky asset, mu/(gamma sigma^2).
    double merton_fraction() const;

    /// cbar = delta/gamma + (1 - 1/gamma) r_eq; consumption rate at zero mortality.
    double cbar() const;
};

/// Healthcare efficacy function g: spending rate -> reduction of mortality
/// growth. Strictly increasing, strictly concave, g(0) = 0.
class EfficacyModel {
  public:
    enum class Kind { Zero, Isoelastic, Custom };

    static EfficacyModel zero();
    /// g(h) = a h^q / q with a > 0, q in (0,1).
    static EfficacyModel isoelastic(double a, double q);
    /// User-supplied g and g'; the inverse marginal I is found by safeguarded
    /// bisection on g' over [1e-12, 1e6] with relative tolerance 1e-10.
    static EfficacyModel custom(std::function<double(double)> g,
                                std::function<double(double)> dg);

    Kind kind() const { return kind_; }
    double a() const { return a_; }
    double q() const { return q_; }

    /// g(h); 0 for the Zero model.
    double value(double h) const;
    /// g'(h).
    double marginal(double h) const;
    /// I(y) = (g')^{-1}(y); 0 for the Zero model.
    double inverse_marginal(double y) const;

    struct Conjugate {
        double value;   // S(k) = sup_h { g(h) - k h }
        double h_star;  // the maximizer I(k)
    };
    /// Concave conjugate at slope k > 0. Throws std::domain_error for k <= 0.
    Conjugate conjugate(double k) const;

  private:
    EfficacyModel() = default;
    Kind kind_ = Kind::Zero;
    double a_ = 0.0;
    double q_ = 0.0;
    std::function<double(double)> g_;
    std::function<double(double)> dg_;
};

enum class Regime { ConstMortality, AgingNoHealth, AgingHealth };

struct Condition {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = false;
};

struct ValidationReport {
    Regime regime = Regime::ConstMortality;
    std::vector<Condition> conditions;
    bool all_pass() const;
    std::string summary() const;
    /// Throws validation_error naming the first failed condition.
    void require() const;
};

/// Well-posedness report for the given regime. ConstMortality checks the
/// deferral condition delta + (1 - zeta^(1-gamma)) m - (1-gamma) r_eq > 0 at
/// the supplied hazard m_const; AgingNoHealth checks gamma, zeta in (0,1)
/// with cbar > 0 (or gamma, zeta > 1); AgingHealth additionally requires
/// g(I((1-gamma)/gamma)) < beta.
ValidationReport validate(const ModelParams& params, const EfficacyModel& efficacy,
                          Regime regime, double m_const = 0.0);

/// Hazard grid specification; nodes() materializes the strictly increasing
/// node sequence.
struct GridSpec {
    enum class Spacing { Log, Linear };
    double m_min = 1e-5;
    double m_max = 20.0;
    int n_points = 256;
    Spacing spacing = Spacing::Log;

    std::vector<double> nodes() const;
};

}  // namespace gomopt
