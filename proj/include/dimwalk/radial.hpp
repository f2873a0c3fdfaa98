#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "dimwalk/numerics.hpp"

namespace dimwalk {

/// A rotationally invariant function on R^k carried by its radial part:
/// a callable plus a cached sample grid, an optional analytic derivative and
/// an optional support hint (radius beyond which the profile is negligible
/// or identically zero).
class RadialProfile {
  public:
    RadialProfile(int dim, std::function<double(double)> evaluate,
                  std::vector<double> grid = default_grid(),
                  std::optional<std::function<double(double)>> derivative = {},
                  std::optional<double> support_hint = {});

    int dim() const { return dim_; }
    double operator()(double r) const { return evaluate_(r); }
    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }

    bool has_derivative() const { return static_cast<bool>(derivative_); }
    /// Analytic derivative when present, else a 5-point central difference
    /// with a step proportional to 1 + r (clipped to keep the stencil in
    /// (0, inf)).
    double derivative(double r) const;

    std::optional<double> support_hint() const { return support_hint_; }

    /// Geometric default grid on [1e-3, 12] with 512 points plus r = 0.
    static std::vector<double> default_grid();

    /// Columns "r,value".
    void write_csv(std::ostream& os) const;

  private:
    int dim_;
    std::function<double(double)> evaluate_;
    std::vector<double> grid_;
    std::vector<double> values_;
    std::optional<std::function<double(double)>> derivative_;
    std::optional<double> support_hint_;
};

/// Surface area of the unit sphere in R^k: 2 pi^{k/2} / Gamma(k/2).
/// Lives here, and only here, so every normalization shares one constant.
double sphere_surface_area(int dim);

/// int_{R^k} u(|x|) dx = sphere_surface_area(k) * int_0^inf u(r) r^{k-1} dr.
double radial_integral(const RadialProfile& u,
                       const numerics::QuadratureConfig& cfg = {});

/// Forward radial Fourier transform under the convention that places
/// (2 pi)^{-k} on the forward side:
///   F_k u(r) = (2 pi)^{-k/2} r^{1-k/2} int_0^inf u(s) s^{k/2} J_{k/2-1}(s r) ds,
/// with the r = 0 limit computed from the non-oscillatory radial integral.
double fourier_radial(const RadialProfile& u, double r,
                      const numerics::QuadratureConfig& cfg = {});

/// F_k^{-1} u(r) = (2 pi)^k F_k u(r) for rotationally invariant u.
double inverse_fourier_radial(const RadialProfile& u, double r,
                              const numerics::QuadratureConfig& cfg = {});

struct MonteeOptions {
    double origin_cutoff = 1e-2;  // below this, use the parabolic origin fit
    double fd_step_scale = 4e-3;  // h = scale * (1 + r) for the 5-point stencil
};

/// The dimension-walk step k -> k+2: r |-> -(1/2pi) u'(r)/r. The removable
/// singularity at the origin is handled by a 3-point parabolic fit in r^2.
RadialProfile montee(const RadialProfile& u, const MonteeOptions& options = {});

/// The inverse step k -> k-2 (k >= 3): r |-> 2 pi int_r^inf s u(s) ds.
/// Returned with the analytic derivative -2 pi r u(r).
RadialProfile descente(const RadialProfile& u,
                       const numerics::QuadratureConfig& cfg = {});

}  // namespace dimwalk
