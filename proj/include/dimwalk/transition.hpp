#pragma once

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dimwalk/radial.hpp"
#include "dimwalk/report.hpp"
#include "dimwalk/subordinator.hpp"

namespace dimwalk {

/// Raised when an operation's mathematical precondition fails (for example
/// the Fourier route on a symbol whose tail decays too slowly).
class PreconditionError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Which Brownian kernel multiplies the subordinator.
///
/// twice_speed (default): kernel (4 pi s)^{-k/2} e^{-r^2/(4s)}, whose mixture
/// inverts e^{-t f(|xi|^2)} exactly. paper_literal: the standard heat kernel
/// (2 pi s)^{-k/2} e^{-r^2/(2s)}, paired with the symbol f(|xi|^2 / 2).
enum class KernelConvention { twice_speed, paper_literal };

std::string to_string(KernelConvention c);

double heat_kernel(int k, double r, double s, KernelConvention convention);

/// Symbol exponent at frequency radius rho under the convention.
double symbol_exponent(const BernsteinSpec& spec, double rho,
                       KernelConvention convention);

enum class DensityRoute { mixture, fourier };

std::string to_string(DensityRoute r);

/// Transition density by the subordinator mixture: int kernel(r, s)
/// density(t, s) ds. At r = 0 the value may be +inf (detected, not an error).
double density_mixture(const SubordinatorModel& model, int k, double t, double r,
                       KernelConvention convention = KernelConvention::twice_speed,
                       const numerics::QuadratureConfig& cfg = {});

/// Transition density by radial Fourier inversion of e^{-t f(rho^2)} (or the
/// paper-literal exponent). Throws PreconditionError when the tail probe
/// finds the integrand non-integrable (the Hartman-Wintner growth condition
/// fails for this t and k).
double density_fourier(const BernsteinSpec& spec, int k, double t, double r,
                       KernelConvention convention = KernelConvention::twice_speed,
                       const numerics::QuadratureConfig& cfg = {});

/// Levy density m_k(r) of the subordinated process: the Gaussian mixture of
/// the subordinator's Levy measure (a finite sum for atomic measures).
double levy_density_at(const SubordinatorModel& model, int k, double r,
                       KernelConvention convention = KernelConvention::twice_speed,
                       const numerics::QuadratureConfig& cfg = {});

/// The atom e^{-ct} plus the radial profile p_t^k; densities integrate to
/// 1 - e^{-ct}, never renormalized.
struct TransitionDensity {
    int dim = 1;
    double time = 1.0;
    double atom_weight = 0.0;
    RadialProfile profile;
    DensityRoute route = DensityRoute::mixture;
    KernelConvention convention = KernelConvention::twice_speed;
    std::string model;

    nlohmann::json header_json() const;
};

struct LevyDensity {
    int dim = 1;
    RadialProfile profile;
    std::string model;

    nlohmann::json header_json() const;
};

TransitionDensity make_transition_density(
    const SubordinatorModel& model, int k, double t,
    DensityRoute route = DensityRoute::mixture,
    KernelConvention convention = KernelConvention::twice_speed,
    std::vector<double> grid = RadialProfile::default_grid(),
    const numerics::QuadratureConfig& cfg = {});

/// Geometric grid on [0.1, 10] (the Levy density blows up at the origin).
std::vector<double> default_levy_grid();

LevyDensity make_levy_density(
    const SubordinatorModel& model, int k,
    KernelConvention convention = KernelConvention::twice_speed,
    std::vector<double> grid = default_levy_grid(),
    const numerics::QuadratureConfig& cfg = {});

/// montee(lower.profile) against upper.profile, max error relative to the
/// upper peak; pass iff <= tolerance. Dims must differ by exactly 2 and the
/// times must match (mismatch is an error, disagreement is a failing report).
VerificationReport dimwalk_check(const TransitionDensity& lower,
                                 const TransitionDensity& upper,
                                 double tolerance = 1e-4);

VerificationReport levy_dimwalk_check(const LevyDensity& lower,
                                      const LevyDensity& upper,
                                      double tolerance = 1e-4);

/// Nonincreasing radial profile: finite-difference slope <= the documented
/// noise floor at every grid point. `eval_noise` declares the profile's
/// evaluation noise (quadrature tolerance), as in the sign-pattern checks.
VerificationReport unimodality_check(const TransitionDensity& td,
                                     double eval_noise = 1e-9);

/// t^{-1} int_shell p_t against int_shell m_k with Richardson extrapolation
/// in t on the empirically observed order; pass iff within 2e-2 relative.
VerificationReport vague_limit_check(
    const SubordinatorModel& model, int k,
    const std::vector<std::pair<double, double>>& shells,
    KernelConvention convention = KernelConvention::twice_speed,
    const numerics::QuadratureConfig& cfg = {});

}  // namespace dimwalk
