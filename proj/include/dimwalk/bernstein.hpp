#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dimwalk/numerics.hpp"
#include "dimwalk/report.hpp"

namespace dimwalk {

// Parametric jump measures mu on (0, inf). Each family is range-checked at
// construction so that int min{1, y} mu(dy) < inf holds automatically.

struct NullJump {};

/// mu(dy) = scale * a / Gamma(1-a) * y^{-1-a} dy, so the jump part of f is
/// exactly scale * u^a. The normalizing constant is precomputed.
struct StableJump {
    double index;  // a in (0,1)
    double scale;  // > 0
};

/// mu(dy) = shape * y^{-1} e^{-rate y} dy; jump part shape * log(1 + u/rate).
struct GammaJump {
    double shape;
    double rate;
};

/// mu(dy) = (2 sqrt(pi))^{-1} y^{-3/2} e^{-barrier^2 y} dy; jump part
/// sqrt(u + barrier^2) - barrier. barrier = 0 reduces to StableJump(1/2, 1).
struct InverseGaussianJump {
    double barrier;  // >= 0
};

/// mu(dy) = intensity * jump_rate * e^{-jump_rate y} dy (finite mass
/// `intensity`); jump part intensity * u / (jump_rate + u).
struct ExponentialCP {
    double intensity;
    double jump_rate;
};

/// mu = sum_i w_i delta_{y_i}; jump part sum_i w_i (1 - e^{-u y_i}).
struct FiniteAtomic {
    std::vector<std::pair<double, double>> atoms;  // (location > 0, weight > 0)
};

using LevyMeasure = std::variant<NullJump, StableJump, GammaJump,
                                 InverseGaussianJump, ExponentialCP, FiniteAtomic>;

/// A Bernstein function f(u) = drift * u + int_0^inf (1 - e^{-u y}) mu(dy),
/// the single source of truth for the characteristic exponent f(|xi|^2).
/// Immutable after construction; f(0) = 0 always.
class BernsteinSpec {
  public:
    static BernsteinSpec drift_only(double drift);
    static BernsteinSpec stable(double index, double scale = 1.0, double drift = 0.0);
    static BernsteinSpec gamma(double shape, double rate, double drift = 0.0);
    static BernsteinSpec inverse_gaussian(double barrier, double drift = 0.0);
    static BernsteinSpec exponential_cp(double intensity, double jump_rate,
                                        double drift = 0.0);
    static BernsteinSpec finite_atomic(std::vector<std::pair<double, double>> atoms,
                                       double drift = 0.0);

    double drift() const { return drift_; }
    const LevyMeasure& levy_measure() const { return measure_; }
    const std::string& name() const { return name_; }
    BernsteinSpec with_name(std::string name) const;

    bool has_closed_form() const { return static_cast<bool>(closed_form_); }
    double closed_form(double u) const;
    const std::string& closed_form_validity() const { return validity_; }

    /// Density of mu at y > 0. FiniteAtomic carries atoms, not a density.
    bool has_levy_density() const;
    double levy_density(double y) const;

    /// Total mass mu((0, inf)); +inf for the infinite-activity families.
    double levy_mass() const;

    nlohmann::json to_json() const;
    static BernsteinSpec from_json(const nlohmann::json& j);

  private:
    BernsteinSpec(double drift, LevyMeasure measure, std::string name);

    double drift_ = 0.0;
    LevyMeasure measure_;
    std::optional<std::function<double(double)>> closed_form_;
    std::string validity_;
    std::string name_;
};

/// f(u) via the closed form when present, else adaptive quadrature of the
/// jump integral. Nondecreasing in u; eval_f(spec, 0) = 0.
double eval_f(const BernsteinSpec& spec, double u,
              const numerics::QuadratureConfig& cfg = {});

/// Quadrature-only route (the independent cross-check of the closed form).
double eval_f_quadrature(const BernsteinSpec& spec, double u,
                         const numerics::QuadratureConfig& cfg = {});

/// Finite-difference test of the Bernstein sign pattern
/// (-1)^{n-1} f^{(n)}(r) >= -eps_fd for n = 1..n_max on a positive grid.
/// `eval_noise` declares extra evaluation noise for quadrature-backed
/// functions (defaults to exact arithmetic).
VerificationReport check_bernstein_signs(const std::function<double(double)>& fn,
                                         const std::string& subject,
                                         const std::vector<double>& grid, int n_max,
                                         double eval_noise = 0.0);
VerificationReport check_bernstein_signs(const BernsteinSpec& spec,
                                         const std::vector<double>& grid, int n_max);

/// Complete-monotonicity pattern (-1)^n g^{(n)}(r) >= -eps_fd, n = 0..n_max.
VerificationReport check_cm(const std::function<double(double)>& fn,
                            const std::string& subject,
                            const std::vector<double>& grid, int n_max,
                            double eval_noise = 0.0);

enum class HwVerdict { holds, fails, inconclusive };

std::string to_string(HwVerdict v);

struct HwOptions {
    double top_threshold = 10.0;   // ratio at grid top certifying divergence
    double stabilization = 0.01;   // successive-ratio band for a finite limit
    double low_ceiling = 1.0;      // nonincreasing ratio below this => finite
    int tail_points = 8;
};

struct HwResult {
    HwVerdict verdict = HwVerdict::inconclusive;
    std::vector<double> probe;   // witness abscissae
    std::vector<double> ratio;   // witness ratios f(r)/log r
};

std::vector<double> default_hw_probe();

/// Numeric verdict on lim f(r)/log r = inf over a geometric probe grid
/// spanning at least six decades. Evidence, not proof: thresholds are
/// configuration.
HwResult hartman_wintner(const BernsteinSpec& spec,
                         const std::vector<double>& r_probe = default_hw_probe(),
                         const HwOptions& options = {});

}  // namespace dimwalk
