#include "dimwalk/radial.hpp"

#include <cmath>
#include <ostream>

namespace dimwalk {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2.0 * kPi;
}  // namespace

RadialProfile::RadialProfile(int dim, std::function<double(double)> evaluate,
                             std::vector<double> grid,
                             std::optional<std::function<double(double)>> derivative,
                             std::optional<double> support_hint)
    : dim_(dim),
      evaluate_(std::move(evaluate)),
      grid_(std::move(grid)),
      derivative_(std::move(derivative)),
      support_hint_(support_hint) {
    if (dim_ < 1) throw std::invalid_argument("RadialProfile: dim must be >= 1");
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        if (grid_[i] < 0.0)
            throw std::invalid_argument("RadialProfile: grid must be nonnegative");
        if (i > 0 && !(grid_[i] > grid_[i - 1]))
            throw std::invalid_argument("RadialProfile: grid must be sorted strictly");
    }
    values_.reserve(grid_.size());
    for (double r : grid_) values_.push_back(evaluate_(r));
}

double RadialProfile::derivative(double r) const {
    if (derivative_) return (*derivative_)(r);
    double h = 4e-3 * (1.0 + r);
    if (r > 0.0) h = std::min(h, 0.45 * r);  // keep the stencil positive
    const auto& f = evaluate_;
    return (f(r - 2.0 * h) - 8.0 * f(r - h) + 8.0 * f(r + h) - f(r + 2.0 * h)) /
           (12.0 * h);
}

std::vector<double> RadialProfile::default_grid() {
    std::vector<double> g;
    g.reserve(513);
    g.push_back(0.0);
    const double lo = std::log(1e-3), hi = std::log(12.0);
    for (int i = 0; i < 512; ++i) g.push_back(std::exp(lo + (hi - lo) * i / 511.0));
    return g;
}

void RadialProfile::write_csv(std::ostream& os) const {
    os << "r,value\n";
    char buf[64];
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", grid_[i], values_[i]);
        os << buf;
    }
}

double sphere_surface_area(int dim) {
    if (dim < 1) throw std::invalid_argument("sphere_surface_area: dim must be >= 1");
    return 2.0 * std::pow(kPi, 0.5 * dim) / numerics::gamma_fn(0.5 * dim);
}

double radial_integral(const RadialProfile& u, const numerics::QuadratureConfig& cfg) {
    const int k = u.dim();
    auto fn = [&u, k](double r) { return u(r) * std::pow(r, k - 1); };
    if (u.support_hint())
        return sphere_surface_area(k) *
               numerics::integrate(fn, 0.0, *u.support_hint(), cfg).value;
    return sphere_surface_area(k) * numerics::integrate_to_inf(fn, 0.0, cfg).value;
}

double fourier_radial(const RadialProfile& u, double r,
                      const numerics::QuadratureConfig& cfg) {
    const int k = u.dim();
    if (r < 0.0) throw std::invalid_argument("fourier_radial: r must be >= 0");
    if (r == 0.0) return std::pow(kTwoPi, -k) * radial_integral(u, cfg);
    const double nu = 0.5 * k - 1.0;
    auto fn = [&u, k](double s) { return u(s) * std::pow(s, 0.5 * k); };
    const double upper =
        u.support_hint() ? *u.support_hint() : std::numeric_limits<double>::infinity();
    const double scale_hint = u.support_hint()
                                  ? *u.support_hint()
                                  : (u.grid().empty() ? 12.0 : u.grid().back());
    const double integral = numerics::integrate_bessel(fn, nu, r, cfg, upper, scale_hint);
    return std::pow(kTwoPi, -0.5 * k) * std::pow(r, 1.0 - 0.5 * k) * integral;
}

double inverse_fourier_radial(const RadialProfile& u, double r,
                              const numerics::QuadratureConfig& cfg) {
    return std::pow(kTwoPi, u.dim()) * fourier_radial(u, r, cfg);
}

RadialProfile montee(const RadialProfile& u, const MonteeOptions& options) {
    // Parabolic fit u ~ a + b r^2 + c r^4 near the origin gives the even
    // extension's limit u'(r)/r -> 2b + 4c r^2.
    const double h0 = std::max(options.origin_cutoff, 1e-4);
    const double x1 = h0, x2 = 2.0 * h0;
    const double y0 = u(0.0), y1 = u(x1), y2 = u(x2);
    const double s1 = x1 * x1, s2 = x2 * x2;
    const double det = s1 * s2 * s2 - s2 * s1 * s1;
    const double b = ((y1 - y0) * s2 * s2 - (y2 - y0) * s1 * s1) / det;
    const double c = ((y2 - y0) * s1 - (y1 - y0) * s2) / det;

    auto eval = [u, options, b, c](double r) {
        if (r < options.origin_cutoff)
            return -(2.0 * b + 4.0 * c * r * r) / kTwoPi;
        return -u.derivative(r) / (kTwoPi * r);
    };
    return RadialProfile(u.dim() + 2, eval, u.grid(), std::nullopt, u.support_hint());
}

RadialProfile descente(const RadialProfile& u, const numerics::QuadratureConfig& cfg) {
    if (u.dim() < 3) throw std::invalid_argument("descente: requires dim >= 3");
    auto eval = [u, cfg](double r) {
        auto fn = [&u](double s) { return s * u(s); };
        if (u.support_hint()) {
            if (r >= *u.support_hint()) return 0.0;
            return kTwoPi * numerics::integrate(fn, r, *u.support_hint(), cfg).value;
        }
        return kTwoPi * numerics::integrate_to_inf(fn, r, cfg).value;
    };
    auto deriv = [u](double r) { return -kTwoPi * r * u(r); };
    return RadialProfile(u.dim() - 2, eval, u.grid(), deriv, u.support_hint());
}

}  // namespace dimwalk
