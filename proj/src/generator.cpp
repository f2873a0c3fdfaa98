#include "dimwalk/generator.hpp"

#include <cmath>

namespace dimwalk {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2.0 * kPi;

double bump_transform(double radius, int order, double amplitude, int k,
                      double rho) {
    // F_k[(1 - (|x|/R)^2)^m_+](rho)
    //   = (2pi)^{-k/2} 2^m m! R^k (R rho)^{-(k/2+m)} J_{k/2+m}(R rho).
    const double nu = 0.5 * k + order;
    double m_fact = 1.0;
    for (int i = 2; i <= order; ++i) m_fact *= i;
    const double front = amplitude * std::pow(kTwoPi, -0.5 * k) *
                         std::pow(2.0, order) * m_fact * std::pow(radius, k);
    const double z = radius * rho;
    if (z < 1e-6) {
        // small-argument limit of z^{-nu} J_nu(z), second order in z
        const double lead = std::pow(0.5, nu) / numerics::gamma_fn(nu + 1.0);
        return front * lead * (1.0 - z * z / (4.0 * (nu + 1.0)));
    }
    return front * std::pow(z, -nu) * numerics::bessel_j(nu, z);
}

}  // namespace

RadialTestFunction RadialTestFunction::polynomial_bump(double radius, int order,
                                                       double amplitude) {
    if (!(radius > 0.0))
        throw std::invalid_argument("polynomial_bump: radius must be > 0");
    if (order < 1) throw std::invalid_argument("polynomial_bump: order must be >= 1");
    RadialTestFunction f;
    f.support_radius = radius;
    f.name = "bump(R=" + std::to_string(radius) + ",m=" + std::to_string(order) + ")";
    f.evaluate = [radius, order, amplitude](double r) {
        if (r >= radius) return 0.0;
        const double x = 1.0 - (r / radius) * (r / radius);
        return amplitude * std::pow(x, order);
    };
    f.derivative = [radius, order, amplitude](double r) {
        if (r >= radius) return 0.0;
        const double x = 1.0 - (r / radius) * (r / radius);
        return -amplitude * 2.0 * order * r / (radius * radius) *
               std::pow(x, order - 1);
    };
    f.transform = [radius, order, amplitude](int k, double rho) {
        return bump_transform(radius, order, amplitude, k, rho);
    };
    f.bump = BumpParams{radius, order, amplitude};
    return f;
}

RadialProfile RadialTestFunction::as_profile(int dim, std::vector<double> grid) const {
    return RadialProfile(dim, evaluate, std::move(grid), derivative, support_radius);
}

double test_function_transform(const RadialTestFunction& u, int k, double rho,
                               const numerics::QuadratureConfig& cfg) {
    if (u.transform) return u.transform(k, rho);
    auto profile = u.as_profile(k, {0.0, u.support_radius});
    return fourier_radial(profile, rho, cfg);
}

double apply_generator(const BernsteinSpec& spec, int k,
                       const RadialTestFunction& u, double r,
                       KernelConvention convention,
                       const numerics::QuadratureConfig& cfg) {
    if (k < 1) throw std::invalid_argument("apply_generator: k must be >= 1");
    if (r < 0.0) throw std::invalid_argument("apply_generator: r must be >= 0");

    auto weighted = [&](double rho) {
        return symbol_exponent(spec, rho, convention) *
               test_function_transform(u, k, rho, cfg);
    };

    if (r == 0.0)
        throw std::invalid_argument(
            "apply_generator: evaluate at r > 0 (the oscillatory panels need "
            "a positive frequency; the identity checks all run on r > 0)");

    // The integrand carries two oscillations: J_{k/2-1}(rho r) from the
    // outer transform and the transform's own ~J(R rho) ringing from the
    // compact support. Panels at the combined frequency r + R keep both
    // components alternating under the panel sampling (r = R is the one
    // resonant exception; the checks keep their grids inside the support).
    const double nu = 0.5 * k - 1.0;
    auto integrand = [&](double rho) {
        return weighted(rho) * std::pow(rho, 0.5 * k) *
               numerics::bessel_j(nu, rho * r);
    };
    // The identity checks run at 1e-3..1e-5; an oscillatory double-transform
    // cannot meet 1e-10 from a bounded panel budget, so clamp the tolerance.
    // Near the support radius the beat frequency |R - r| collapses and the
    // accelerator needs the panel run to span several beat periods.
    const double radius = u.support_radius;
    const double delta = kPi / (r + radius);
    const double beat = std::max(std::abs(radius - r), 0.02 * radius);
    const int beat_blocks = static_cast<int>(10.0 * kPi / (delta * beat)) + 1;
    numerics::QuadratureConfig osc_cfg = cfg;
    osc_cfg.oscillatory_blocks =
        std::clamp(std::max(cfg.oscillatory_blocks, beat_blocks), 160, 1100);
    osc_cfg.rel_tol = std::max(cfg.rel_tol, 1e-8);
    osc_cfg.abs_tol = std::max(cfg.abs_tol, 1e-9);
    const double integral =
        numerics::integrate_panels(integrand, delta, osc_cfg, 8.0 / radius);
    return -std::pow(kTwoPi, 0.5 * k) * std::pow(r, 1.0 - 0.5 * k) * integral;
}

RadialProfile primitive_profile(const RadialTestFunction& u,
                                const numerics::QuadratureConfig& cfg) {
    const double radius = u.support_radius;
    auto sfn = [&u](double s) { return s * u.evaluate(s); };
    const double total = numerics::integrate(sfn, 0.0, radius, cfg).value;
    auto eval = [sfn, total, radius, cfg](double r) {
        if (r >= radius) return 0.0;
        return numerics::integrate(sfn, 0.0, r, cfg).value - total;
    };
    auto deriv = [&u](double r) { return r * u.evaluate(r); };
    std::vector<double> grid;
    for (int i = 0; i <= 32; ++i) grid.push_back(radius * i / 32.0);
    return RadialProfile(1, eval, std::move(grid), deriv, radius);
}

RadialTestFunction primitive_as_test_function(const RadialTestFunction& u,
                                              const numerics::QuadratureConfig& cfg) {
    // Polynomial bumps close under the primitive:
    //   int_0^r s (1-(s/R)^2)^m ds - C = -R^2/(2(m+1)) (1-(r/R)^2)^{m+1}.
    if (u.bump) {
        const auto& [R, m, amplitude] = *u.bump;
        return RadialTestFunction::polynomial_bump(
            R, m + 1, -amplitude * R * R / (2.0 * (m + 1.0)));
    }
    RadialTestFunction v;
    auto profile = primitive_profile(u, cfg);
    v.support_radius = u.support_radius;
    v.name = "primitive(" + u.name + ")";
    v.evaluate = [profile](double r) { return profile(r); };
    v.derivative = [profile](double r) { return profile.derivative(r); };
    return v;
}

VerificationReport intertwine_check(const BernsteinSpec& spec, int k,
                                    const RadialTestFunction& u,
                                    const std::vector<double>& grid,
                                    KernelConvention convention, double tolerance,
                                    const numerics::QuadratureConfig& cfg) {
    if (k < 3) throw std::invalid_argument("intertwine_check: requires k >= 3");
    if (grid.size() < 2)
        throw std::invalid_argument("intertwine_check: grid too small");

    const RadialTestFunction v = primitive_as_test_function(u, cfg);

    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < grid.size(); ++i)
        min_gap = std::min(min_gap, grid[i] - grid[i - 1]);
    const double h = std::clamp(0.5 * min_gap, 1e-3, 5e-2);

    VerificationReport rep;
    rep.check = "generator-intertwining";
    rep.subject = spec.name() + " k=" + std::to_string(k) + " " + u.name;
    rep.tolerance = tolerance;
    rep.grid_points = grid.size();

    double sup_lhs = 0.0, worst = 0.0, worst_r = 0.0;
    std::vector<double> lhs(grid.size()), rhs(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double r = grid[i];
        lhs[i] = apply_generator(spec, k, u, r, convention, cfg);
        auto g = [&](double x) {
            return apply_generator(spec, k - 2, v, x, convention, cfg);
        };
        const double d =
            (g(r - 2.0 * h) - 8.0 * g(r - h) + 8.0 * g(r + h) - g(r + 2.0 * h)) /
            (12.0 * h);
        rhs[i] = d / r;
        sup_lhs = std::max(sup_lhs, std::abs(lhs[i]));
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double err = std::abs(lhs[i] - rhs[i]);
        if (err > worst) {
            worst = err;
            worst_r = grid[i];
        }
    }
    rep.max_error = worst / std::max(sup_lhs, 1e-300);
    rep.pass = rep.max_error <= tolerance;
    rep.detail = "sup-relative discrepancy " + std::to_string(rep.max_error) +
                 " at r = " + std::to_string(worst_r);
    return rep;
}

}  // namespace dimwalk
