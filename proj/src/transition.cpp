#include "dimwalk/transition.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

namespace dimwalk {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Radius beyond which e^{-t f(rho^2)} has decayed below 1e-16.
double symbol_decay_radius(const BernsteinSpec& spec, double t,
                           KernelConvention convention) {
    double rho = 0.25;
    for (int i = 0; i < 140; ++i) {
        if (t * symbol_exponent(spec, rho, convention) > 37.0) return rho;
        rho *= 2.0;
    }
    return rho;
}

}  // namespace

std::string to_string(KernelConvention c) {
    return c == KernelConvention::twice_speed ? "default" : "paper-literal";
}

std::string to_string(DensityRoute r) {
    return r == DensityRoute::mixture ? "mixture" : "fourier";
}

double heat_kernel(int k, double r, double s, KernelConvention convention) {
    if (convention == KernelConvention::twice_speed)
        return std::pow(4.0 * kPi * s, -0.5 * k) * std::exp(-r * r / (4.0 * s));
    return std::pow(2.0 * kPi * s, -0.5 * k) * std::exp(-r * r / (2.0 * s));
}

double symbol_exponent(const BernsteinSpec& spec, double rho,
                       KernelConvention convention) {
    const double u = (convention == KernelConvention::twice_speed)
                         ? rho * rho
                         : 0.5 * rho * rho;
    return eval_f(spec, u);
}

double density_mixture(const SubordinatorModel& model, int k, double t, double r,
                       KernelConvention convention,
                       const numerics::QuadratureConfig& cfg) {
    if (k < 1) throw std::invalid_argument("density_mixture: k must be >= 1");
    if (!(t > 0.0) || r < 0.0)
        throw std::invalid_argument("density_mixture: requires t > 0, r >= 0");
    if (model.is_point_mass())
        return heat_kernel(k, r, model.spec().drift() * t, convention);
    if (!model.has_density())
        throw std::logic_error("density_mixture: no closed-form subordinator "
                               "density for '" + model.name() +
                               "'; use the Fourier route");

    auto integrand = [&](double s) {
        return heat_kernel(k, r, s, convention) * model.density(t, s);
    };
    // The kernel peaks near r^2/(2k); the subordinator mass lives on scales
    // of order t or t^2. Split blocks around the larger. For r > 0 the
    // Gaussian kernel cuts the integrand off below ~r^2/160 (e^{-40}); the
    // march stops there and divergence detection stays reserved for r = 0.
    const double x0 = std::max({r * r / (2.0 * k + 2.0), t, t * t, 1e-6});
    const double floor = (r > 0.0) ? r * r / 160.0 : 0.0;
    const auto inner =
        numerics::sum_geometric_blocks(integrand, x0, false, cfg, 40, floor);
    if (!inner.finite) return kInf;  // p_t(0+) = +inf
    const auto outer = numerics::sum_geometric_blocks(integrand, x0, true, cfg);
    return inner.value + outer.value;
}

double density_fourier(const BernsteinSpec& spec, int k, double t, double r,
                       KernelConvention convention,
                       const numerics::QuadratureConfig& cfg) {
    if (k < 1) throw std::invalid_argument("density_fourier: k must be >= 1");
    if (!(t > 0.0) || r < 0.0)
        throw std::invalid_argument("density_fourier: requires t > 0, r >= 0");

    // Tail probe: integrability of rho^{k-1} e^{-t f(rho^2)} requires
    // t f(rho^2) to outgrow (k + 1/2) log rho; this is where the
    // Hartman-Wintner growth condition bites for small t.
    double q_first = 0.0, q_last = 0.0;
    for (double rho : {1e3, 3e4, 1e6}) {
        const double q = t * symbol_exponent(spec, rho, convention) / std::log(rho);
        if (rho == 1e3) q_first = q;
        q_last = q;
    }
    if (!(q_last >= k + 0.5) || q_last < 0.9 * q_first)
        throw PreconditionError(
            "density_fourier: e^{-t f(rho^2)} rho^{k-1} fails the integrability "
            "probe for '" + spec.name() + "' at t = " + std::to_string(t) +
            ", k = " + std::to_string(k) +
            " (Hartman-Wintner growth condition violated at this scale)");

    auto symbol = [&spec, t, convention](double rho) {
        return std::exp(-t * symbol_exponent(spec, rho, convention));
    };
    const double decay = symbol_decay_radius(spec, t, convention);
    if (r == 0.0) {
        auto fn = [&symbol, k](double rho) {
            return symbol(rho) * std::pow(rho, k - 1.0);
        };
        const double head = numerics::integrate(fn, 0.0, decay, cfg).value;
        const auto tail = numerics::sum_geometric_blocks(fn, decay, true, cfg);
        if (!tail.finite) return kInf;
        return std::pow(2.0 * kPi, -k) * sphere_surface_area(k) *
               (head + tail.value);
    }
    const double nu = 0.5 * k - 1.0;
    auto fn = [&symbol, k](double rho) {
        return symbol(rho) * std::pow(rho, 0.5 * k);
    };
    const double integral =
        numerics::integrate_bessel(fn, nu, r, cfg, kInf, decay);
    return std::pow(2.0 * kPi, -0.5 * k) * std::pow(r, 1.0 - 0.5 * k) * integral;
}

double levy_density_at(const SubordinatorModel& model, int k, double r,
                       KernelConvention convention,
                       const numerics::QuadratureConfig& cfg) {
    if (k < 1) throw std::invalid_argument("levy_density_at: k must be >= 1");
    if (r < 0.0) throw std::invalid_argument("levy_density_at: requires r >= 0");
    const BernsteinSpec& spec = model.spec();
    if (const auto* fa = std::get_if<FiniteAtomic>(&spec.levy_measure())) {
        double acc = 0.0;
        for (const auto& [y, w] : fa->atoms)
            acc += w * heat_kernel(k, r, y, convention);
        return acc;
    }
    if (!spec.has_levy_density()) return 0.0;  // drift only: no jumps

    auto integrand = [&](double s) {
        return heat_kernel(k, r, s, convention) * spec.levy_density(s);
    };
    const double x0 = std::max(r * r / (2.0 * k + 2.0), 1.0);
    const double floor = (r > 0.0) ? r * r / 160.0 : 0.0;
    const auto inner =
        numerics::sum_geometric_blocks(integrand, x0, false, cfg, 40, floor);
    if (!inner.finite) return kInf;  // m_k(0+) for infinite-activity measures
    const auto outer = numerics::sum_geometric_blocks(integrand, x0, true, cfg);
    return inner.value + outer.value;
}

nlohmann::json TransitionDensity::header_json() const {
    return nlohmann::json{{"model", model},          {"k", dim},
                          {"t", time},               {"atom_weight", atom_weight},
                          {"convention", to_string(convention)},
                          {"route", to_string(route)}};
}

nlohmann::json LevyDensity::header_json() const {
    return nlohmann::json{{"model", model}, {"k", dim}, {"what", "levy-density"}};
}

TransitionDensity make_transition_density(const SubordinatorModel& model, int k,
                                          double t, DensityRoute route,
                                          KernelConvention convention,
                                          std::vector<double> grid,
                                          const numerics::QuadratureConfig& cfg) {
    std::function<double(double)> eval;
    if (route == DensityRoute::mixture) {
        eval = [model, k, t, convention, cfg](double r) {
            return density_mixture(model, k, t, r, convention, cfg);
        };
    } else {
        const BernsteinSpec spec = model.spec();
        // Fail the precondition now, not lazily at the first profile value.
        (void)density_fourier(spec, k, t, 1.0, convention, cfg);
        eval = [spec, k, t, convention, cfg](double r) {
            return density_fourier(spec, k, t, r, convention, cfg);
        };
    }
    std::optional<std::function<double(double)>> deriv;
    if (model.is_point_mass()) {
        const double s = model.spec().drift() * t;
        const double width = (convention == KernelConvention::twice_speed) ? 2.0 * s
                                                                           : s;
        deriv = [k, s, width, convention](double r) {
            return -r / width * heat_kernel(k, r, s, convention);
        };
    }
    TransitionDensity td{k,
                         t,
                         model.atom_weight(t),
                         RadialProfile(k, eval, std::move(grid), deriv),
                         route,
                         convention,
                         model.name()};
    return td;
}

std::vector<double> default_levy_grid() {
    std::vector<double> g(160);
    const double lo = std::log(0.1), hi = std::log(10.0);
    for (std::size_t i = 0; i < g.size(); ++i)
        g[i] = std::exp(lo + (hi - lo) * i / (g.size() - 1.0));
    return g;
}

LevyDensity make_levy_density(const SubordinatorModel& model, int k,
                              KernelConvention convention,
                              std::vector<double> grid,
                              const numerics::QuadratureConfig& cfg) {
    auto eval = [model, k, convention, cfg](double r) {
        return levy_density_at(model, k, r, convention, cfg);
    };
    return LevyDensity{k, RadialProfile(k, eval, std::move(grid)), model.name()};
}

namespace {

VerificationReport walk_check(const RadialProfile& lower,
                              const RadialProfile& upper, const std::string& name,
                              const std::string& subject, double r_min,
                              double r_max, double tolerance) {
    if (upper.dim() != lower.dim() + 2)
        throw std::invalid_argument(name + ": dimensions must differ by 2");
    auto lifted = montee(lower);

    VerificationReport rep;
    rep.check = name;
    rep.subject = subject;
    rep.tolerance = tolerance;

    double peak = 0.0;
    for (std::size_t i = 0; i < upper.grid().size(); ++i) {
        const double r = upper.grid()[i];
        if (r < r_min || r > r_max) continue;
        peak = std::max(peak, std::abs(upper.values()[i]));
    }
    if (peak == 0.0 || !std::isfinite(peak)) peak = 1.0;

    double worst = 0.0, worst_r = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < upper.grid().size(); ++i) {
        const double r = upper.grid()[i];
        if (r < r_min || r > r_max) continue;
        const double err = std::abs(lifted(r) - upper.values()[i]) / peak;
        if (err > worst) {
            worst = err;
            worst_r = r;
        }
        ++n;
    }
    rep.grid_points = n;
    rep.max_error = worst;
    rep.pass = worst <= tolerance;
    rep.detail = "max relative error " + std::to_string(worst) + " at r = " +
                 std::to_string(worst_r);
    return rep;
}

}  // namespace

VerificationReport dimwalk_check(const TransitionDensity& lower,
                                 const TransitionDensity& upper, double tolerance) {
    if (lower.time != upper.time)
        throw std::invalid_argument("dimwalk_check: times must match");
    return walk_check(lower.profile, upper.profile, "dimension-walk",
                      lower.model + " k=" + std::to_string(lower.dim) + "->" +
                          std::to_string(upper.dim) + " t=" + std::to_string(lower.time),
                      0.01, 10.0, tolerance);
}

VerificationReport levy_dimwalk_check(const LevyDensity& lower,
                                      const LevyDensity& upper, double tolerance) {
    // Checked away from the origin singularity.
    return walk_check(lower.profile, upper.profile, "levy-dimension-walk",
                      lower.model + " k=" + std::to_string(lower.dim) + "->" +
                          std::to_string(upper.dim),
                      0.1, 10.0, tolerance);
}

VerificationReport unimodality_check(const TransitionDensity& td,
                                     double eval_noise) {
    VerificationReport rep;
    rep.check = "unimodality";
    rep.subject = td.model + " k=" + std::to_string(td.dim) + " t=" +
                  std::to_string(td.time);
    rep.pass = true;
    rep.grid_points = td.profile.grid().size();

    double peak = 0.0;
    for (std::size_t i = 0; i < td.profile.grid().size(); ++i) {
        if (td.profile.grid()[i] <= 0.0) continue;  // p(0+) may be +inf
        const double v = td.profile.values()[i];
        if (std::isfinite(v)) peak = std::max(peak, std::abs(v));
    }
    const double scale = std::max(peak, 1e-300);

    for (double r : td.profile.grid()) {
        if (r <= 0.0) continue;
        double slope, floor;
        if (td.profile.has_derivative()) {
            slope = td.profile.derivative(r);
            floor = 1e-12 * scale;
        } else {
            const double h = std::min(1e-3 * (1.0 + r), 0.45 * r);
            slope = numerics::finite_diff([&](double x) { return td.profile(x); },
                                          r, 1, h);
            floor = numerics::fd_noise_floor(1, h, eval_noise * scale) *
                    std::max(1.0, scale);
        }
        rep.tolerance = std::max(rep.tolerance, floor);
        if (slope > floor) {
            rep.pass = false;
            if (slope > rep.max_error) {
                rep.max_error = slope;
                rep.detail = "positive slope at r = " + std::to_string(r);
            }
        }
    }
    if (rep.pass) rep.detail = "nonincreasing on the grid";
    return rep;
}

VerificationReport vague_limit_check(
    const SubordinatorModel& model, int k,
    const std::vector<std::pair<double, double>>& shells,
    KernelConvention convention, const numerics::QuadratureConfig& cfg) {
    VerificationReport rep;
    rep.check = "vague-limit";
    rep.subject = model.name() + " k=" + std::to_string(k);
    rep.tolerance = 2e-2;
    rep.pass = true;

    const double surf = sphere_surface_area(k);
    const std::vector<double> ts = {0.2, 0.1, 0.05, 0.025};
    for (const auto& [a, b] : shells) {
        if (!(a > 0.0) || !(b > a))
            throw std::invalid_argument("vague_limit_check: shells must satisfy 0 < a < b");
        auto mfn = [&](double r) {
            return levy_density_at(model, k, r, convention, cfg) *
                   std::pow(r, k - 1.0);
        };
        const double shell_nu = surf * numerics::integrate(mfn, a, b, cfg).value;

        std::vector<double> q;
        for (double t : ts) {
            auto fn = [&](double r) {
                return density_mixture(model, k, t, r, convention, cfg) *
                       std::pow(r, k - 1.0);
            };
            q.push_back(surf * numerics::integrate(fn, a, b, cfg).value / t);
        }

        double err;
        if (shell_nu < 1e-12) {
            // Trivial shell (no jump mass): the ladder must vanish too.
            err = std::abs(q[3]);
        } else {
            // Order of the t -> 0 convergence estimated from the coarsest
            // three ladder points, then Richardson on the finest two.
            const double d1 = q[1] - q[0], d2 = q[2] - q[1];
            const double alpha =
                std::log2(std::abs(d1) / std::max(std::abs(d2), 1e-300));
            if (!std::isfinite(alpha) || alpha < 0.2 || alpha > 6.0)
                throw numerics::NumericError(
                    "vague_limit_check: unstable t->0 extrapolation", alpha);
            const double extrap =
                q[3] + (q[3] - q[2]) / (std::pow(2.0, alpha) - 1.0);
            err = std::abs(extrap - shell_nu) / shell_nu;
        }
        rep.max_error = std::max(rep.max_error, err);
        if (err > rep.tolerance) {
            rep.pass = false;
            rep.detail = "shell [" + std::to_string(a) + ", " + std::to_string(b) +
                         "] relative error " + std::to_string(err);
        }
        ++rep.grid_points;
    }
    if (rep.pass) rep.detail = "extrapolated shell masses match the Levy measure";
    return rep;
}

}  // namespace dimwalk
