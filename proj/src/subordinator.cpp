#include "dimwalk/subordinator.hpp"

#include <cmath>

namespace dimwalk {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kSqrtPi = 1.7724538509055160272981674833411452;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

RandomStream RandomStream::substream(std::uint64_t index) const {
    return RandomStream(splitmix64(seed_ ^ splitmix64(index + 1)));
}

double RandomStream::uniform() {
    // 53 significand bits, shifted into the open interval.
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform(), u2 = uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    spare_ = mag * std::sin(2.0 * kPi * u2);
    has_spare_ = true;
    return mag * std::cos(2.0 * kPi * u2);
}

double RandomStream::exponential(double rate) {
    if (!(rate > 0.0)) throw std::invalid_argument("exponential: rate must be > 0");
    return -std::log(uniform()) / rate;
}

double RandomStream::gamma_variate(double shape) {
    if (!(shape > 0.0)) throw std::invalid_argument("gamma_variate: shape must be > 0");
    if (shape < 1.0)
        return gamma_variate(shape + 1.0) * std::pow(uniform(), 1.0 / shape);
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

std::uint64_t RandomStream::poisson(double mean) {
    if (mean < 0.0) throw std::invalid_argument("poisson: mean must be >= 0");
    if (mean == 0.0) return 0;
    if (mean > 30.0) return poisson(0.5 * mean) + poisson(0.5 * mean);
    const double limit = std::exp(-mean);
    std::uint64_t n = 0;
    double prod = uniform();
    while (prod > limit) {
        ++n;
        prod *= uniform();
    }
    return n;
}

SubordinatorModel::SubordinatorModel(BernsteinSpec spec) : spec_(std::move(spec)) {}

bool SubordinatorModel::is_point_mass() const {
    return std::holds_alternative<NullJump>(spec_.levy_measure());
}

bool SubordinatorModel::has_density() const {
    return std::visit(
        [](const auto& m) -> bool {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, StableJump>)
                return m.index == 0.5;
            else if constexpr (std::is_same_v<T, GammaJump> ||
                               std::is_same_v<T, InverseGaussianJump> ||
                               std::is_same_v<T, ExponentialCP>)
                return true;
            else
                return false;  // point mass / discrete jumps
        },
        spec_.levy_measure());
}

double SubordinatorModel::density(double t, double s) const {
    if (!(t > 0.0) || !(s > 0.0))
        throw std::invalid_argument("density: requires t > 0 and s > 0");
    if (!has_density())
        throw std::logic_error(
            "density: no closed form for '" + spec_.name() +
            "'; use the Fourier route for the transition density instead");
    // A positive drift shifts the whole law by drift * t.
    const double shift = spec_.drift() * t;
    if (s <= shift) return 0.0;
    const double y = s - shift;
    return std::visit(
        [t, y](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, StableJump>) {
                // Levy(c = sigma^2 t^2 / 2): sigma t e^{-sigma^2 t^2/4y} / (2 sqrt(pi) y^{3/2})
                const double st = m.scale * t;
                return st * std::exp(-st * st / (4.0 * y)) /
                       (2.0 * kSqrtPi * std::pow(y, 1.5));
            } else if constexpr (std::is_same_v<T, GammaJump>) {
                const double ct = m.shape * t;
                return std::exp(ct * std::log(m.rate) + (ct - 1.0) * std::log(y) -
                                m.rate * y - numerics::log_gamma(ct));
            } else if constexpr (std::is_same_v<T, InverseGaussianJump>) {
                const double b = m.barrier;
                return t * std::exp(-t * t / (4.0 * y) - b * b * y + b * t) /
                       (2.0 * kSqrtPi * std::pow(y, 1.5));
            } else if constexpr (std::is_same_v<T, ExponentialCP>) {
                // sum_{n >= 1} Pois(n; lambda t) Gamma(n, beta) density,
                // truncated once the Poisson tail drops below 1e-12.
                const double lt = m.intensity * t, beta = m.jump_rate;
                double pois = std::exp(-lt);     // P(N = 0)
                double gam = beta * std::exp(-beta * y);  // Gamma(1, beta) at y
                double acc = 0.0, tail = 1.0 - pois;
                for (int n = 1; n < 10000 && tail > 1e-12; ++n) {
                    pois *= lt / n;  // P(N = n)
                    acc += pois * gam;
                    tail -= pois;
                    gam *= beta * y / n;  // Gamma(n+1, beta) at y
                }
                return acc;
            } else {
                return 0.0;  // unreachable, has_density() guards
            }
        },
        spec_.levy_measure());
}

double SubordinatorModel::atom_rate() const {
    if (spec_.drift() > 0.0) return kInf;
    return spec_.levy_mass();
}

double SubordinatorModel::atom_weight(double t) const {
    const double c = atom_rate();
    return std::isinf(c) ? 0.0 : std::exp(-c * t);
}

double SubordinatorModel::sample(double t, RandomStream& stream) const {
    if (!(t > 0.0)) throw std::invalid_argument("sample: requires t > 0");
    const double drift_part = spec_.drift() * t;
    return drift_part +
           std::visit(
               [t, &stream](const auto& m) -> double {
                   using T = std::decay_t<decltype(m)>;
                   if constexpr (std::is_same_v<T, NullJump>) {
                       return 0.0;
                   } else if constexpr (std::is_same_v<T, StableJump>) {
                       if (m.index == 0.5) {
                           const double z = stream.normal();
                           const double st = m.scale * t;
                           return st * st / (2.0 * z * z);
                       }
                       // Kanter's representation of the one-sided stable law
                       // with Laplace transform e^{-u^a}, rescaled.
                       const double a = m.index;
                       const double v = kPi * stream.uniform();
                       const double w = stream.exponential(1.0);
                       const double core =
                           std::sin(a * v) *
                           std::pow(std::sin((1.0 - a) * v) / w, (1.0 - a) / a) /
                           std::pow(std::sin(v), 1.0 / a);
                       return std::pow(m.scale * t, 1.0 / a) * core;
                   } else if constexpr (std::is_same_v<T, GammaJump>) {
                       return stream.gamma_variate(m.shape * t) / m.rate;
                   } else if constexpr (std::is_same_v<T, InverseGaussianJump>) {
                       if (m.barrier == 0.0) {
                           const double z = stream.normal();
                           return t * t / (2.0 * z * z);
                       }
                       // Michael-Schucany-Haas with mu = t/(2b), lambda = t^2/2.
                       const double mu = t / (2.0 * m.barrier);
                       const double lam = 0.5 * t * t;
                       const double nu = stream.normal();
                       const double y = nu * nu;
                       const double x =
                           mu + mu * mu * y / (2.0 * lam) -
                           mu / (2.0 * lam) *
                               std::sqrt(4.0 * mu * lam * y + mu * mu * y * y);
                       return (stream.uniform() <= mu / (mu + x)) ? x : mu * mu / x;
                   } else if constexpr (std::is_same_v<T, ExponentialCP>) {
                       const std::uint64_t n = stream.poisson(m.intensity * t);
                       double acc = 0.0;
                       for (std::uint64_t i = 0; i < n; ++i)
                           acc += stream.exponential(m.jump_rate);
                       return acc;
                   } else {  // FiniteAtomic
                       double acc = 0.0;
                       for (const auto& [y, w] : m.atoms)
                           acc += y * static_cast<double>(stream.poisson(w * t));
                       return acc;
                   }
               },
               spec_.levy_measure());
}

NegMomentResult SubordinatorModel::neg_moment(double kappa, double t,
                                              const numerics::QuadratureConfig& cfg) const {
    if (!(kappa > 0.0) || !(t > 0.0))
        throw std::invalid_argument("neg_moment: requires kappa > 0 and t > 0");
    NegMomentResult res;
    if (!std::isinf(atom_rate())) return res;  // the atom at 0 makes it +inf

    if (is_point_mass()) {  // S_t = drift * t exactly
        res.value = std::pow(spec_.drift() * t, -kappa);
        res.finite = true;
        return res;
    }

    // Route A: Gamma(kappa)^{-1} int_0^inf e^{-t f(r)} r^{kappa-1} dr.
    // Head via w = r^kappa (flattens the r^{kappa-1} factor), tail in blocks.
    auto head_fn = [this, kappa, t](double w) {
        return std::exp(-t * eval_f(spec_, std::pow(w, 1.0 / kappa)));
    };
    const double head = numerics::integrate(head_fn, 0.0, 1.0, cfg).value / kappa;
    auto tail_fn = [this, kappa, t](double r) {
        return std::exp(-t * eval_f(spec_, r)) * std::pow(r, kappa - 1.0);
    };
    const auto tail = numerics::sum_geometric_blocks(tail_fn, 1.0, true, cfg);
    if (!tail.finite) return res;  // +inf
    res.value = (head + tail.value) / numerics::gamma_fn(kappa);
    res.finite = true;

    // Route B: int s^{-kappa} density(t, s) ds, when a density exists.
    if (has_density() && spec_.drift() == 0.0) {
        auto fn = [this, kappa, t](double s) {
            return std::pow(s, -kappa) * density(t, s);
        };
        const auto inner = numerics::sum_geometric_blocks(fn, 1.0, false, cfg);
        const auto outer = numerics::sum_geometric_blocks(fn, 1.0, true, cfg);
        if (inner.finite && outer.finite) {
            res.route_b = inner.value + outer.value;
            const double rel =
                std::abs(*res.route_b - res.value) / std::abs(res.value);
            if (rel > 1e-6)
                throw numerics::NumericError(
                    "neg_moment: density and Laplace routes disagree", rel);
        }
    }
    return res;
}

}  // namespace dimwalk
