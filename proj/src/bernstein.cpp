#include "dimwalk/bernstein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

namespace dimwalk {

namespace {

constexpr double kEps = 2.220446049250313e-16;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrtPi = 1.7724538509055160272981674833411452;

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

// sqrt(u + b^2) - b without cancellation for small u.
double sqrt_shift(double u, double b) { return u / (std::sqrt(u + b * b) + b); }

}  // namespace

BernsteinSpec::BernsteinSpec(double drift, LevyMeasure measure, std::string name)
    : drift_(drift), measure_(std::move(measure)), name_(std::move(name)) {
    require(drift_ >= 0.0, "BernsteinSpec: drift must be >= 0");
}

BernsteinSpec BernsteinSpec::with_name(std::string name) const {
    BernsteinSpec copy = *this;
    copy.name_ = std::move(name);
    return copy;
}

BernsteinSpec BernsteinSpec::drift_only(double drift) {
    BernsteinSpec s(drift, NullJump{}, "drift(" + std::to_string(drift) + ")");
    s.closed_form_ = [drift](double u) { return drift * u; };
    s.validity_ = "exact for all u >= 0";
    return s;
}

BernsteinSpec BernsteinSpec::stable(double index, double scale, double drift) {
    require(index > 0.0 && index < 1.0, "StableJump: index must be in (0,1)");
    require(scale > 0.0, "StableJump: scale must be > 0");
    BernsteinSpec s(drift, StableJump{index, scale}, "stable");
    s.closed_form_ = [index, scale, drift](double u) {
        return drift * u + scale * std::pow(u, index);
    };
    s.validity_ = "exact for all u >= 0";
    return s;
}

BernsteinSpec BernsteinSpec::gamma(double shape, double rate, double drift) {
    require(shape > 0.0 && rate > 0.0, "GammaJump: shape and rate must be > 0");
    BernsteinSpec s(drift, GammaJump{shape, rate}, "gamma");
    s.closed_form_ = [shape, rate, drift](double u) {
        return drift * u + shape * std::log1p(u / rate);
    };
    s.validity_ = "exact for all u >= 0";
    return s;
}

BernsteinSpec BernsteinSpec::inverse_gaussian(double barrier, double drift) {
    require(barrier >= 0.0, "InverseGaussianJump: barrier must be >= 0");
    BernsteinSpec s(drift, InverseGaussianJump{barrier}, "inverse-gaussian");
    s.closed_form_ = [barrier, drift](double u) {
        return drift * u + sqrt_shift(u, barrier);
    };
    s.validity_ = "exact for all u >= 0";
    return s;
}

BernsteinSpec BernsteinSpec::exponential_cp(double intensity, double jump_rate,
                                            double drift) {
    require(intensity > 0.0 && jump_rate > 0.0,
            "ExponentialCP: intensity and jump rate must be > 0");
    BernsteinSpec s(drift, ExponentialCP{intensity, jump_rate}, "exponential-cp");
    s.closed_form_ = [intensity, jump_rate, drift](double u) {
        return drift * u + intensity * u / (jump_rate + u);
    };
    s.validity_ = "exact for all u >= 0";
    return s;
}

BernsteinSpec BernsteinSpec::finite_atomic(
    std::vector<std::pair<double, double>> atoms, double drift) {
    require(!atoms.empty(), "FiniteAtomic: needs at least one atom");
    for (const auto& [y, w] : atoms)
        require(y > 0.0 && w > 0.0, "FiniteAtomic: atoms need y > 0 and w > 0");
    BernsteinSpec s(drift, FiniteAtomic{atoms}, "finite-atomic");
    s.closed_form_ = [atoms, drift](double u) {
        double acc = drift * u;
        for (const auto& [y, w] : atoms) acc += w * (-std::expm1(-u * y));
        return acc;
    };
    s.validity_ = "exact sum over atoms, all u >= 0";
    return s;
}

double BernsteinSpec::closed_form(double u) const {
    if (!closed_form_) throw std::logic_error("BernsteinSpec: no closed form");
    return (*closed_form_)(u);
}

bool BernsteinSpec::has_levy_density() const {
    return !std::holds_alternative<FiniteAtomic>(measure_) &&
           !std::holds_alternative<NullJump>(measure_);
}

double BernsteinSpec::levy_density(double y) const {
    require(y > 0.0, "levy_density: y must be > 0");
    return std::visit(
        [y](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, NullJump>) {
                return 0.0;
            } else if constexpr (std::is_same_v<T, StableJump>) {
                const double c =
                    m.scale * m.index / numerics::gamma_fn(1.0 - m.index);
                return c * std::pow(y, -1.0 - m.index);
            } else if constexpr (std::is_same_v<T, GammaJump>) {
                return m.shape * std::exp(-m.rate * y) / y;
            } else if constexpr (std::is_same_v<T, InverseGaussianJump>) {
                return std::exp(-m.barrier * m.barrier * y) /
                       (2.0 * kSqrtPi * std::pow(y, 1.5));
            } else if constexpr (std::is_same_v<T, ExponentialCP>) {
                return m.intensity * m.jump_rate * std::exp(-m.jump_rate * y);
            } else {
                throw std::logic_error(
                    "levy_density: FiniteAtomic has atoms, not a density");
            }
        },
        measure_);
}

double BernsteinSpec::levy_mass() const {
    return std::visit(
        [](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, NullJump>) {
                return 0.0;
            } else if constexpr (std::is_same_v<T, ExponentialCP>) {
                return m.intensity;
            } else if constexpr (std::is_same_v<T, FiniteAtomic>) {
                double acc = 0.0;
                for (const auto& [y, w] : m.atoms) acc += w;
                return acc;
            } else {
                return kInf;  // stable / gamma / IG pile up mass near 0
            }
        },
        measure_);
}

double eval_f(const BernsteinSpec& spec, double u,
              const numerics::QuadratureConfig& cfg) {
    require(u >= 0.0, "eval_f: u must be >= 0");
    if (u == 0.0) return 0.0;
    if (spec.has_closed_form()) return spec.closed_form(u);
    return eval_f_quadrature(spec, u, cfg);
}

double eval_f_quadrature(const BernsteinSpec& spec, double u,
                         const numerics::QuadratureConfig& cfg) {
    require(u >= 0.0, "eval_f_quadrature: u must be >= 0");
    if (u == 0.0) return 0.0;
    const double drift_part = spec.drift() * u;

    const LevyMeasure& m = spec.levy_measure();
    if (std::holds_alternative<NullJump>(m)) return drift_part;
    if (const auto* fa = std::get_if<FiniteAtomic>(&m)) {
        double acc = 0.0;
        for (const auto& [y, w] : fa->atoms) acc += w * (-std::expm1(-u * y));
        return drift_part + acc;
    }

    // Head [0,1]: substitute y = z^p to flatten the y^{-1-a} blow-up of the
    // density; p(1-a) >= 2 keeps the transformed integrand C^1 at 0.
    double singularity = 0.0;  // exponent a in y^{-1-a}
    if (const auto* st = std::get_if<StableJump>(&m)) singularity = st->index;
    if (std::holds_alternative<InverseGaussianJump>(m)) singularity = 0.5;
    const double p =
        std::max(1.0, std::ceil(2.0 / std::max(1.0 - singularity, 0.125)));

    auto integrand = [&spec, u](double y) {
        return -std::expm1(-u * y) * spec.levy_density(y);
    };
    auto head_fn = [&integrand, p](double z) {
        return integrand(std::pow(z, p)) * p * std::pow(z, p - 1.0);
    };
    const auto head = numerics::integrate(head_fn, 0.0, 1.0, cfg);

    // Tail [1, inf): a pure-power density decays too slowly for the rational
    // map, so peel off its analytic mass, mu([1,inf)) = int (1 - e^{-uy}) + e^{-uy}
    // split; what is left decays exponentially.
    double tail_mass = -1.0;
    if (const auto* st = std::get_if<StableJump>(&m)) {
        const double c = st->scale * st->index / numerics::gamma_fn(1.0 - st->index);
        tail_mass = c / st->index;  // int_1^inf y^{-1-a} dy = 1/a
    } else if (const auto* ig = std::get_if<InverseGaussianJump>(&m);
               ig != nullptr && ig->barrier == 0.0) {
        tail_mass = 1.0 / kSqrtPi;  // (2 sqrt(pi))^{-1} * int_1^inf y^{-3/2} dy
    }
    double tail;
    if (tail_mass >= 0.0) {
        auto damped = [&spec, u](double y) {
            return std::exp(-u * y) * spec.levy_density(y);
        };
        tail = tail_mass - numerics::integrate_to_inf(damped, 1.0, cfg).value;
    } else {
        tail = numerics::integrate_to_inf(integrand, 1.0, cfg).value;
    }
    return drift_part + head.value + tail;
}

namespace {

// Shared core for the two sign-pattern checks. `pattern_shift` is 1 for the
// Bernstein pattern (-1)^{n-1} and 0 for complete monotonicity (-1)^n.
VerificationReport check_sign_pattern(const std::function<double(double)>& fn,
                                      const std::string& check_name,
                                      const std::string& subject,
                                      const std::vector<double>& grid, int n_min,
                                      int n_max, int pattern_shift,
                                      double eval_noise) {
    if (n_max < n_min || n_max > 8)
        throw std::invalid_argument(check_name + ": order must be <= 8");
    if (grid.size() < 2)
        throw std::invalid_argument(check_name +
                                    ": grid too coarse for the requested order");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0))
            throw std::invalid_argument(check_name + ": grid must be positive");
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw std::invalid_argument(check_name + ": grid must be sorted strictly");
    }

    double scale = 0.0;
    for (double r : grid) scale = std::max(scale, std::abs(fn(r)));
    scale = std::max(scale, 1.0);

    VerificationReport rep;
    rep.check = check_name;
    rep.subject = subject;
    rep.grid_points = grid.size();
    rep.pass = true;
    rep.max_error = 0.0;
    rep.tolerance = 0.0;

    for (int n = std::max(n_min, 1); n <= n_max; ++n) {
        // Effective evaluation noise: relative rounding of values of size
        // `scale`, amplified by the 2^n stencil weight mass, plus any
        // declared quadrature noise; factor 4 is slack.
        const double noise =
            4.0 * std::max(1.0, std::pow(2.0, n) / 10.0) *
            std::max(kEps * scale, eval_noise);
        const double h_ref = numerics::fd_optimal_step(n, noise);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double r = grid[i];
            double gap = kInf;
            if (i > 0) gap = std::min(gap, r - grid[i - 1]);
            if (i + 1 < grid.size()) gap = std::min(gap, grid[i + 1] - r);
            double h = std::min({h_ref, 0.5 * gap, 1.8 * r / n});
            if (h < 0.25 * std::min(h_ref, 1.8 * r / n))
                throw std::invalid_argument(
                    check_name + ": grid spacing incompatible with order " +
                    std::to_string(n) + " differences");
            const double est = numerics::finite_diff(fn, r, n, h);
            const double sign = ((n - pattern_shift) % 2 == 0) ? 1.0 : -1.0;
            const double floor = numerics::fd_noise_floor(n, h, noise) * scale;
            const double signed_est = sign * est;
            if (signed_est < -floor) {
                rep.pass = false;
                if (-signed_est > rep.max_error) {
                    rep.max_error = -signed_est;
                    rep.tolerance = floor;
                    rep.detail = "sign violation at order " + std::to_string(n) +
                                 ", r = " + std::to_string(r);
                }
            } else {
                rep.tolerance = std::max(rep.tolerance, floor);
            }
        }
    }
    if (rep.pass && n_min == 0) {
        // CM order 0: the function itself must be nonnegative.
        for (double r : grid) {
            const double v = fn(r);
            if (v < -kEps * scale) {
                rep.pass = false;
                rep.max_error = std::max(rep.max_error, -v);
                rep.detail = "negative value at r = " + std::to_string(r);
            }
        }
    }
    if (rep.pass && rep.detail.empty())
        rep.detail = "orders " + std::to_string(n_min) + ".." + std::to_string(n_max);
    return rep;
}

}  // namespace

VerificationReport check_bernstein_signs(const std::function<double(double)>& fn,
                                         const std::string& subject,
                                         const std::vector<double>& grid, int n_max,
                                         double eval_noise) {
    return check_sign_pattern(fn, "bernstein-signs", subject, grid, 1, n_max, 1,
                              eval_noise);
}

VerificationReport check_bernstein_signs(const BernsteinSpec& spec,
                                         const std::vector<double>& grid, int n_max) {
    return check_bernstein_signs([&spec](double u) { return eval_f(spec, u); },
                                 spec.name(), grid, n_max);
}

VerificationReport check_cm(const std::function<double(double)>& fn,
                            const std::string& subject,
                            const std::vector<double>& grid, int n_max,
                            double eval_noise) {
    return check_sign_pattern(fn, "cm", subject, grid, 0, n_max, 0, eval_noise);
}

std::string to_string(HwVerdict v) {
    switch (v) {
        case HwVerdict::holds: return "holds";
        case HwVerdict::fails: return "fails";
        default: return "inconclusive";
    }
}

std::vector<double> default_hw_probe() {
    std::vector<double> probe(56);
    const double lo = std::log(10.0), hi = std::log(1e12);
    for (std::size_t i = 0; i < probe.size(); ++i)
        probe[i] = std::exp(lo + (hi - lo) * i / (probe.size() - 1.0));
    return probe;
}

HwResult hartman_wintner(const BernsteinSpec& spec,
                         const std::vector<double>& r_probe,
                         const HwOptions& options) {
    if (r_probe.size() < 12 || r_probe.front() <= 1.0)
        throw std::invalid_argument("hartman_wintner: probe must start above 1");
    if (std::log10(r_probe.back() / r_probe.front()) < 6.0)
        throw std::invalid_argument("hartman_wintner: probe must span >= 6 decades");

    HwResult res;
    res.probe = r_probe;
    res.ratio.reserve(r_probe.size());
    for (double r : r_probe) res.ratio.push_back(eval_f(spec, r) / std::log(r));

    const int tail = std::min<int>(options.tail_points, res.ratio.size() - 1);
    const std::size_t start = res.ratio.size() - tail;
    bool stabilized = true, nondecreasing = true, nonincreasing = true;
    for (std::size_t i = start; i < res.ratio.size(); ++i) {
        const double prev = res.ratio[i - 1], cur = res.ratio[i];
        if (std::abs(cur - prev) >
            options.stabilization * std::max(std::abs(cur), 1e-300))
            stabilized = false;
        if (cur < prev * (1.0 - 1e-9)) nondecreasing = false;
        if (cur > prev * (1.0 + 1e-9)) nonincreasing = false;
    }
    const double top = res.ratio.back();
    if (stabilized && std::isfinite(top)) {
        res.verdict = HwVerdict::fails;  // ratio converged to a finite limit
    } else if (nonincreasing && top <= options.low_ceiling) {
        res.verdict = HwVerdict::fails;  // bounded below log growth
    } else if (nondecreasing && top >= options.top_threshold) {
        res.verdict = HwVerdict::holds;
    } else {
        res.verdict = HwVerdict::inconclusive;
    }
    return res;
}

namespace {

std::string family_name(const LevyMeasure& m) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, NullJump>) return "null";
            else if constexpr (std::is_same_v<T, StableJump>) return "stable";
            else if constexpr (std::is_same_v<T, GammaJump>) return "gamma";
            else if constexpr (std::is_same_v<T, InverseGaussianJump>)
                return "inverse_gaussian";
            else if constexpr (std::is_same_v<T, ExponentialCP>)
                return "exponential_cp";
            else return "finite_atomic";
        },
        m);
}

}  // namespace

nlohmann::json BernsteinSpec::to_json() const {
    nlohmann::json j;
    j["name"] = name_;
    j["drift"] = drift_;
    nlohmann::json lm;
    lm["family"] = family_name(measure_);
    std::visit(
        [&lm](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, StableJump>) {
                lm["index"] = v.index;
                lm["scale"] = v.scale;
            } else if constexpr (std::is_same_v<T, GammaJump>) {
                lm["shape"] = v.shape;
                lm["rate"] = v.rate;
            } else if constexpr (std::is_same_v<T, InverseGaussianJump>) {
                lm["barrier"] = v.barrier;
            } else if constexpr (std::is_same_v<T, ExponentialCP>) {
                lm["intensity"] = v.intensity;
                lm["jump_rate"] = v.jump_rate;
            } else if constexpr (std::is_same_v<T, FiniteAtomic>) {
                lm["atoms"] = v.atoms;
            }
        },
        measure_);
    j["levy_measure"] = lm;
    return j;
}

BernsteinSpec BernsteinSpec::from_json(const nlohmann::json& j) {
    const double drift = j.value("drift", 0.0);
    const auto& lm = j.at("levy_measure");
    const std::string family = lm.at("family").get<std::string>();
    BernsteinSpec spec = [&]() {
        if (family == "null") return drift_only(drift);
        if (family == "stable")
            return stable(lm.at("index").get<double>(), lm.value("scale", 1.0), drift);
        if (family == "gamma")
            return gamma(lm.at("shape").get<double>(), lm.at("rate").get<double>(),
                         drift);
        if (family == "inverse_gaussian")
            return inverse_gaussian(lm.at("barrier").get<double>(), drift);
        if (family == "exponential_cp")
            return exponential_cp(lm.at("intensity").get<double>(),
                                  lm.at("jump_rate").get<double>(), drift);
        if (family == "finite_atomic")
            return finite_atomic(
                lm.at("atoms").get<std::vector<std::pair<double, double>>>(), drift);
        throw std::invalid_argument("BernsteinSpec: unknown family '" + family + "'");
    }();
    if (j.contains("name")) spec = spec.with_name(j.at("name").get<std::string>());
    return spec;
}

}  // namespace dimwalk
