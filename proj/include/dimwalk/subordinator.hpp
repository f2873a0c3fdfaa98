#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "dimwalk/bernstein.hpp"

namespace dimwalk {

/// Seeded randomness stream with hand-rolled transforms so identical seeds
/// give identical samples across platforms and thread counts. Substreams are
/// derived deterministically; one stream per concurrent consumer.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed);

    std::uint64_t seed() const { return seed_; }
    RandomStream substream(std::uint64_t index) const;

    double uniform();  // open interval (0, 1)
    double normal();   // standard normal (Box-Muller)
    double exponential(double rate);
    double gamma_variate(double shape);  // unit scale, Marsaglia-Tsang
    std::uint64_t poisson(double mean);

  private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

struct NegMomentResult {
    double value = std::numeric_limits<double>::infinity();  // route A
    std::optional<double> route_b;  // density route, when a density exists
    bool finite = false;
};

/// The law of the subordinator S_t attached to a Bernstein function:
/// P(S_t = 0) = e^{-c t}, a closed-form density where the family has one,
/// and an exact sampler for every family.
class SubordinatorModel {
  public:
    explicit SubordinatorModel(BernsteinSpec spec);

    const BernsteinSpec& spec() const { return spec_; }
    const std::string& name() const { return spec_.name(); }

    /// Pure drift: S_t = drift * t exactly (no absolutely continuous part).
    bool is_point_mass() const;

    /// Closed-form density of the absolutely continuous part: gamma,
    /// inverse-Gaussian, stable index 1/2 and compound Poisson (as a
    /// truncated Poisson-gamma series). Stable with a != 1/2 has none.
    bool has_density() const;
    double density(double t, double s) const;

    /// c with P(S_t = 0) = e^{-ct}: the total mass of mu when the drift
    /// vanishes and that mass is finite, +inf otherwise.
    double atom_rate() const;
    double atom_weight(double t) const;

    double sample(double t, RandomStream& stream) const;

    /// E S_t^{-kappa} by two routes: route A integrates e^{-t f(r)} r^{kappa-1}
    /// against the Laplace identity, route B integrates s^{-kappa} against the
    /// density when one exists. Routes agreeing within 1e-6 relative is an
    /// internal consistency assertion. Divergence is detected from the
    /// growth of geometric tail blocks and reported as +inf, not an error.
    NegMomentResult neg_moment(double kappa, double t,
                               const numerics::QuadratureConfig& cfg = {}) const;

  private:
    BernsteinSpec spec_;
};

}  // namespace dimwalk
