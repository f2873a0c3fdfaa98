#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dimwalk/radial.hpp"
#include "dimwalk/report.hpp"
#include "dimwalk/transition.hpp"

namespace dimwalk {

/// Smooth compactly supported radial test function. The polynomial bumps
/// amplitude * (1 - (r/R)^2)^m are C^{m-1}, have analytic derivatives and a
/// closed-form radial Fourier transform in every dimension, which keeps the
/// symbol route a single quadrature.
struct BumpParams {
    double radius;
    int order;
    double amplitude;
};

struct RadialTestFunction {
    std::function<double(double)> evaluate;
    std::function<double(double)> derivative;
    double support_radius = 1.0;
    std::string name;
    /// Closed-form F_k u(rho) under the (2 pi)^{-k} forward convention;
    /// empty for generic test functions (quadrature fallback).
    std::function<double(int, double)> transform;
    /// Set for polynomial bumps; the bump family closes under primitives.
    std::optional<BumpParams> bump;

    static RadialTestFunction polynomial_bump(double radius, int order,
                                              double amplitude = 1.0);

    RadialProfile as_profile(int dim, std::vector<double> grid) const;
};

/// F_k u(rho): the closed form when available, else a finite-domain Hankel
/// quadrature over the support.
double test_function_transform(const RadialTestFunction& u, int k, double rho,
                               const numerics::QuadratureConfig& cfg = {});

/// Generator applied through the symbol: A_k u(r) = -(2pi)^k F_k(psi F_k u)(r)
/// with psi(rho) = f(rho^2) (or the paper-literal exponent).
double apply_generator(const BernsteinSpec& spec, int k,
                       const RadialTestFunction& u, double r,
                       KernelConvention convention = KernelConvention::twice_speed,
                       const numerics::QuadratureConfig& cfg = {});

/// v(r) = int_0^r s u(s) ds - C with C = int_0^inf s u(s) ds: compactly
/// supported, v(r) = 0 for r >= R, analytic derivative r u(r).
RadialProfile primitive_profile(const RadialTestFunction& u,
                                const numerics::QuadratureConfig& cfg = {});

/// The primitive wrapped back up as a test function (closed form for
/// polynomial bumps: the primitive of bump_m is a scaled bump_{m+1}).
RadialTestFunction primitive_as_test_function(const RadialTestFunction& u,
                                              const numerics::QuadratureConfig& cfg = {});

/// The intertwining identity A_k u(r) = (1/r) d/dr A_{k-2} v(r), k >= 3,
/// with the primitive's constant already subtracted so A_{k-2} acts on a
/// compactly supported function. The outer derivative uses a 5-point stencil
/// tied to the grid spacing; pass iff the sup-norm-relative discrepancy stays
/// within `tolerance`.
VerificationReport intertwine_check(const BernsteinSpec& spec, int k,
                                    const RadialTestFunction& u,
                                    const std::vector<double>& grid,
                                    KernelConvention convention = KernelConvention::twice_speed,
                                    double tolerance = 1e-3,
                                    const numerics::QuadratureConfig& cfg = {});

}  // namespace dimwalk
