#pragma once

#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace dimwalk::numerics {

/// Raised when a quadrature or series fails to meet its tolerance; carries the
/// best residual estimate available at the point of failure.
class NumericError : public std::runtime_error {
  public:
    NumericError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

  private:
    double residual_;
};

struct QuadratureConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    int max_subdivisions = 4000;   // >= 16
    int oscillatory_blocks = 64;   // Bessel-zero-aligned panels before giving up

    void validate() const;
};

struct IntegralResult {
    double value = 0.0;
    double error = 0.0;  // absolute error estimate
    int subdivisions = 0;
};

using ScalarFn = std::function<double(double)>;

/// Gamma function. Thin wrapper over the C library implementation, which is
/// accurate to ~1 ulp; kept behind this name so every module shares one entry
/// point for the constants appearing in density normalizations.
double gamma_fn(double x);
double log_gamma(double x);

/// Bessel function of the first kind J_nu(x), nu >= -1/2, x >= 0.
/// Power series below the regime switch x = max(12, 2 nu), Hankel's
/// asymptotic expansion above it.
double bessel_j(double nu, double x);

/// First derivative d/dx J_nu(x) via J_nu' = (nu/x) J_nu - J_{nu+1}.
double bessel_j_prime(double nu, double x);

/// m-th positive zero of J_nu (m >= 1): McMahon expansion refined by Newton.
double bessel_j_zero(double nu, int m);

/// Adaptive Gauss-Kronrod (G7,K15) over [a, b].
IntegralResult integrate(const ScalarFn& fn, double a, double b,
                         const QuadratureConfig& cfg = {});

/// Adaptive quadrature over [a, inf) via the rational map x = a + t/(1-t).
/// The integrand must decay integrably (caller contract).
IntegralResult integrate_to_inf(const ScalarFn& fn, double a,
                                const QuadratureConfig& cfg = {});

/// Adaptive quadrature seeded with explicit breakpoints (sorted, >= 2).
IntegralResult integrate_seeded(const ScalarFn& fn,
                                const std::vector<double>& breakpoints,
                                const QuadratureConfig& cfg = {});

struct BlockSumResult {
    double value = 0.0;
    bool finite = true;
};

/// Dyadic-block sum of an eventually one-signed integrand: outward covers
/// [x0, inf) by blocks [x0 2^j, x0 2^{j+1}], inward covers (0, x0] by
/// [x0 2^{-j-1}, x0 2^{-j}]. Declared divergent (+/- the partial value,
/// finite = false) when the blocks have not begun shrinking within
/// `probe_blocks` refinements; a stably geometric tail is closed in ratio.
/// A positive `inward_floor` stops the inward march there and disables the
/// divergence verdict (the caller asserts the part below the floor is
/// negligible, e.g. past a Gaussian cutoff).
BlockSumResult sum_geometric_blocks(const ScalarFn& fn, double x0, bool outward,
                                    const QuadratureConfig& cfg = {},
                                    int probe_blocks = 40,
                                    double inward_floor = 0.0);

/// Oscillatory integral  int_0^inf fn(s) J_nu(s r) ds,  r > 0.
/// Panels between consecutive zeros of J_nu(. r); the alternating panel sums
/// are accelerated by iterated averaging (Euler transformation). A finite
/// `upper` sums panels exactly up to the cutoff instead. `scale_hint` names
/// the radius containing the integrand's structure so that a first zero far
/// beyond it (small r) cannot hide the integrand from the initial panel.
double integrate_bessel(const ScalarFn& fn, double nu, double r,
                        const QuadratureConfig& cfg = {},
                        double upper = std::numeric_limits<double>::infinity(),
                        double scale_hint = std::numeric_limits<double>::quiet_NaN());

/// Semi-infinite oscillatory integral with a fixed panel length `delta`
/// (chosen by the caller as half the shortest oscillation period, e.g.
/// pi/(r1 + r2) for a product of two radial oscillations). Panel sums are
/// Euler-accelerated exactly as in integrate_bessel.
double integrate_panels(const ScalarFn& fn, double delta,
                        const QuadratureConfig& cfg = {},
                        double scale_hint = std::numeric_limits<double>::quiet_NaN());

/// Central-difference estimate of the n-th derivative (n <= 8) with the
/// binomial stencil on [x - n h/2, x + n h/2]; error O(h^2) plus the
/// roundoff floor fd_noise_floor(n, h).
double finite_diff(const ScalarFn& fn, double x, int order, double h);

/// Documented finite-difference noise floor eps_fd(n, h) = C eps / h^n + C h^2
/// with C = 10. `noise` defaults to machine epsilon; callers differencing a
/// quadrature-backed function pass its evaluation noise instead.
double fd_noise_floor(int order, double h,
                      double noise = 2.220446049250313e-16);

/// Step size balancing truncation vs roundoff for an order-n central
/// difference of a function with evaluation noise `noise`.
double fd_optimal_step(int order, double noise = 2.220446049250313e-16);

}  // namespace dimwalk::numerics
