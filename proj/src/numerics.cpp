#include "dimwalk/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace dimwalk::numerics {

namespace {

constexpr double kEps = 2.220446049250313e-16;
constexpr double kPi = 3.141592653589793238462643383279502884;

// G7,K15 nodes and weights on [-1, 1] (QUADPACK dqk15).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gauss_kronrod(const ScalarFn& fn, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    fv[7] = fn(c);
    for (int i = 0; i < 7; ++i) {
        fv[i] = fn(c - h * kXgk[i]);
        fv[14 - i] = fn(c + h * kXgk[i]);
    }
    double resk = 0.0, resg = 0.0, resabs = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double s = (i < 7) ? fv[i] + fv[14 - i] : fv[7];
        resk += kWgk[i] * s;
        resabs += kWgk[i] * ((i < 7) ? std::abs(fv[i]) + std::abs(fv[14 - i])
                                     : std::abs(fv[7]));
    }
    resg = kWg[3] * fv[7];
    for (int i = 1; i < 7; i += 2) resg += kWg[i / 2] * (fv[i] + fv[14 - i]);
    const double reskh = 0.5 * resk;
    double resasc = kWgk[7] * std::abs(fv[7] - reskh);
    for (int i = 0; i < 7; ++i)
        resasc += kWgk[i] * (std::abs(fv[i] - reskh) + std::abs(fv[14 - i] - reskh));
    resasc *= h;
    double err = std::abs((resk - resg) * h);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    err = std::max(err, 50.0 * kEps * resabs * std::abs(h));
    return {a, b, resk * h, err};
}

// Wynn's epsilon algorithm on a run of partial sums. Even columns estimate
// the limit; the returned error is the smallest change observed between
// consecutive even columns, paired with the value that achieved it. Handles
// several oscillatory transients at once (a product of Bessel factors and
// an algebraic envelope), where plain Euler averaging only damps one.
std::pair<double, double> shanks_accelerate(const std::vector<double>& sums) {
    std::vector<double> prev_col(sums.size() + 1, 0.0);  // eps_{-1} = 0
    std::vector<double> col(sums);
    double best = sums.back();
    double best_err = std::numeric_limits<double>::infinity();
    double last_even = sums.back();
    for (int k = 1; col.size() > 1; ++k) {
        std::vector<double> next(col.size() - 1);
        for (std::size_t i = 0; i + 1 < col.size(); ++i) {
            double d = col[i + 1] - col[i];
            if (std::abs(d) < 1e-305) d = (d >= 0.0) ? 1e-305 : -1e-305;
            next[i] = prev_col[i + 1] + 1.0 / d;
        }
        prev_col = std::move(col);
        col = std::move(next);
        if (k % 2 == 0) {
            const double cand = col.back();
            const double err = std::abs(cand - last_even);
            if (err < best_err && std::isfinite(cand)) {
                best_err = err;
                best = cand;
            }
            last_even = cand;
        }
    }
    return {best, best_err};
}

double bessel_j_series(double nu, double x) {
    const double q = 0.25 * x * x;
    double term = std::exp(nu * std::log(0.5 * x) - std::lgamma(nu + 1.0));
    double sum = term, comp = 0.0, abs_acc = std::abs(term);
    for (int m = 0; m < 400; ++m) {
        term *= -q / ((m + 1.0) * (nu + m + 1.0));
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        abs_acc += std::abs(term);
        if (std::abs(term) < kEps * abs_acc && m > 0.5 * x) break;
    }
    return sum;
}

double bessel_j_asymptotic(double nu, double x) {
    const double mu = 4.0 * nu * nu;
    double p = 1.0, q = 0.0;
    double c = 1.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 60; ++k) {
        const double num = mu - (2.0 * k + 1.0) * (2.0 * k + 1.0);
        const double next = c * num / (8.0 * (k + 1.0) * x);
        if (std::abs(next) >= prev) break;  // optimal truncation
        prev = std::abs(next);
        c = next;
        const int j = k + 1;
        const double sign = ((j / 2) % 2 == 0) ? 1.0 : -1.0;
        if (j % 2 == 0)
            p += sign * c;
        else
            q += sign * c;
        if (std::abs(c) < kEps) break;
    }
    const double chi = x - (0.5 * nu + 0.25) * kPi;
    return std::sqrt(2.0 / (kPi * x)) * (std::cos(chi) * p - std::sin(chi) * q);
}

}  // namespace

void QuadratureConfig::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
        throw std::invalid_argument("QuadratureConfig: tolerances must be positive");
    if (max_subdivisions < 16)
        throw std::invalid_argument("QuadratureConfig: max_subdivisions must be >= 16");
    if (oscillatory_blocks < 8)
        throw std::invalid_argument("QuadratureConfig: oscillatory_blocks must be >= 8");
}

double gamma_fn(double x) {
    if (x <= 0.0 && x == std::floor(x))
        throw std::domain_error("gamma_fn: pole at non-positive integer");
    return std::tgamma(x);
}

double log_gamma(double x) {
    if (x <= 0.0) throw std::domain_error("log_gamma: requires x > 0");
    return std::lgamma(x);
}

double bessel_j(double nu, double x) {
    if (nu < -0.5) throw std::invalid_argument("bessel_j: order must be >= -1/2");
    if (x < 0.0) throw std::invalid_argument("bessel_j: argument must be >= 0");
    if (x == 0.0) {
        if (nu == 0.0) return 1.0;
        if (nu > 0.0) return 0.0;
        throw std::domain_error("bessel_j: J_nu(0) diverges for nu < 0");
    }
    const double split = std::max(12.0, 2.0 * nu);
    const double v = (x < split) ? bessel_j_series(nu, x) : bessel_j_asymptotic(nu, x);
    if (std::isnan(v))
        throw NumericError("bessel_j: evaluation produced NaN", 0.0);
    return v;
}

double bessel_j_prime(double nu, double x) {
    if (x == 0.0) {
        if (nu == 1.0) return 0.5;
        if (nu == 0.0 || nu > 1.0) return 0.0;
        throw std::domain_error("bessel_j_prime: derivative diverges at 0");
    }
    return (nu / x) * bessel_j(nu, x) - bessel_j(nu + 1.0, x);
}

namespace {

double bessel_j_zero_uncached(double nu, int m) {
    const double mu = 4.0 * nu * nu;
    const double b = (m + 0.5 * nu - 0.25) * kPi;
    const double e = 8.0 * b;
    // McMahon's expansion, then safeguarded Newton.
    double z = b - (mu - 1.0) / e -
               4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * e * e * e);
    const double lo = b - 0.6 * kPi, hi = b + 0.6 * kPi;
    for (int it = 0; it < 8; ++it) {
        const double f = bessel_j(nu, z);
        const double fp = bessel_j_prime(nu, z);
        if (fp == 0.0) break;
        const double step = f / fp;
        z = std::clamp(z - step, lo, hi);
        if (std::abs(step) < 1e-14 * z) break;
    }
    return z;
}

}  // namespace

double bessel_j_zero(double nu, int m) {
    if (m < 1) throw std::invalid_argument("bessel_j_zero: m must be >= 1");
    if (nu < -0.5) throw std::invalid_argument("bessel_j_zero: order must be >= -1/2");
    // Zeros for one order are consumed in ascending runs by the panel
    // quadrature; memoize per thread.
    thread_local double cached_nu = std::numeric_limits<double>::quiet_NaN();
    thread_local std::vector<double> zeros;
    if (nu != cached_nu) {
        cached_nu = nu;
        zeros.clear();
    }
    while (static_cast<int>(zeros.size()) < m)
        zeros.push_back(bessel_j_zero_uncached(nu, static_cast<int>(zeros.size()) + 1));
    return zeros[m - 1];
}

IntegralResult integrate(const ScalarFn& fn, double a, double b,
                         const QuadratureConfig& cfg) {
    return integrate_seeded(fn, {a, b}, cfg);
}

IntegralResult integrate_seeded(const ScalarFn& fn,
                                const std::vector<double>& breakpoints,
                                const QuadratureConfig& cfg) {
    cfg.validate();
    if (breakpoints.size() < 2)
        throw std::invalid_argument("integrate: needs at least two breakpoints");
    const double a = breakpoints.front(), b = breakpoints.back();
    if (!(a < b)) {
        if (a == b) return {0.0, 0.0, 0};
        throw std::invalid_argument("integrate: requires a <= b");
    }
    std::priority_queue<Panel> heap;
    double total = 0.0, total_err = 0.0;
    int subdivisions = 0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        if (!(breakpoints[i] < breakpoints[i + 1]))
            throw std::invalid_argument("integrate: breakpoints must be sorted");
        Panel p = gauss_kronrod(fn, breakpoints[i], breakpoints[i + 1]);
        total += p.value;
        total_err += p.error;
        heap.push(p);
        ++subdivisions;
    }
    while (total_err > std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total))) {
        if (subdivisions >= cfg.max_subdivisions)
            throw NumericError("integrate: did not converge after " +
                                   std::to_string(subdivisions) + " subdivisions",
                               total_err);
        Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // Panel at roundoff width; accept its contribution as-is.
            if (heap.empty()) break;
            continue;
        }
        Panel left = gauss_kronrod(fn, worst.a, mid);
        Panel right = gauss_kronrod(fn, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++subdivisions;
    }
    return {total, total_err, subdivisions};
}

IntegralResult integrate_to_inf(const ScalarFn& fn, double a,
                                const QuadratureConfig& cfg) {
    auto mapped = [&fn, a](double t) {
        const double om = 1.0 - t;
        // Beyond the map's resolvable range an integrably-decaying fn has
        // vanished; 0 avoids inf/inf at the collapsed endpoint.
        if (om <= 1e-120) return 0.0;
        const double x = a + t / om;
        if (!std::isfinite(x)) return 0.0;
        const double v = fn(x);
        if (v == 0.0) return 0.0;
        return v / (om * om);
    };
    return integrate(mapped, 0.0, 1.0, cfg);
}

namespace {

// Breakpoints for [0, z1]: geometric refinement below the structure scale so
// a distant first Bessel zero cannot hide a compactly-scaled integrand from
// the seed panel's nodes.
std::vector<double> head_breakpoints(double z1, double scale_hint) {
    std::vector<double> pts{0.0};
    if (std::isfinite(scale_hint) && scale_hint > 0.0 && z1 > 4.0 * scale_hint) {
        double s = scale_hint * 5.96046447753906e-8;  // scale / 4^12
        while (s < scale_hint * 1.0001) {
            pts.push_back(s);
            s *= 4.0;
        }
    }
    pts.push_back(z1);
    return pts;
}

}  // namespace

namespace {

// Shared tail machinery: head integral up to `boundary(1)`, then panel sums
// over [boundary(m), boundary(m+1)] with iterated-averaging acceleration.
double accelerated_panel_tail(const ScalarFn& integrand,
                              const std::function<double(int)>& boundary,
                              const QuadratureConfig& cfg, double scale_hint,
                              const char* what) {
    QuadratureConfig panel_cfg = cfg;
    panel_cfg.rel_tol = 0.1 * cfg.rel_tol;
    panel_cfg.abs_tol = 0.1 * cfg.abs_tol;

    std::vector<double> partials;
    double sum =
        integrate_seeded(integrand, head_breakpoints(boundary(1), scale_hint),
                         panel_cfg)
            .value;
    partials.push_back(sum);
    // Strided windows let the accelerator span slow beat oscillations (a
    // product of two nearby frequencies) that a contiguous window misses.
    constexpr int kStrides[6] = {1, 2, 4, 8, 16, 32};
    double prev_est[6] = {sum, sum, sum, sum, sum, sum};
    bool primed[6] = {false, false, false, false, false, false};
    int quiet_panels = 0;
    for (int m = 1; m <= cfg.oscillatory_blocks; ++m) {
        const double p =
            integrate(integrand, boundary(m), boundary(m + 1), panel_cfg).value;
        sum += p;
        partials.push_back(sum);

        const double scale = std::max(std::abs(sum), cfg.abs_tol);
        if (std::abs(p) <= 0.01 * std::max(cfg.abs_tol, cfg.rel_tol * scale)) {
            if (++quiet_panels >= 2) return sum;  // decayed before oscillating
        } else {
            quiet_panels = 0;
        }

        for (int si = 0; si < 6; ++si) {
            const int stride = kStrides[si];
            const int count =
                std::min<int>(18, static_cast<int>(partials.size()) / stride);
            if (count < 6) break;
            std::vector<double> window(count);
            for (int j = 0; j < count; ++j)
                window[count - 1 - j] = partials[partials.size() - 1 - j * stride];
            auto [est, err] = shanks_accelerate(window);
            const double tol = std::max(cfg.abs_tol, cfg.rel_tol * std::abs(est));
            if (primed[si] && err <= tol && std::abs(est - prev_est[si]) <= tol)
                return est;
            prev_est[si] = est;
            primed[si] = true;
        }
    }
    throw NumericError(std::string(what) + ": panel acceleration did not converge",
                       std::abs(partials.back() - prev_est[0]));
}

}  // namespace

double integrate_bessel(const ScalarFn& fn, double nu, double r,
                        const QuadratureConfig& cfg, double upper,
                        double scale_hint) {
    cfg.validate();
    if (!(r > 0.0)) throw std::invalid_argument("integrate_bessel: requires r > 0");
    auto integrand = [&fn, nu, r](double s) { return fn(s) * bessel_j(nu, s * r); };

    if (std::isfinite(upper)) {
        QuadratureConfig panel_cfg = cfg;
        panel_cfg.rel_tol = 0.1 * cfg.rel_tol;
        panel_cfg.abs_tol = 0.1 * cfg.abs_tol;
        double sum = 0.0;
        const double z1 = std::min(upper, bessel_j_zero(nu, 1) / r);
        auto head = head_breakpoints(z1, std::min(scale_hint, upper));
        sum += integrate_seeded(integrand, head, panel_cfg).value;
        double lo = z1;
        for (int m = 2; lo < upper; ++m) {
            const double hi = std::min(upper, bessel_j_zero(nu, m) / r);
            if (hi > lo) sum += integrate(integrand, lo, hi, panel_cfg).value;
            lo = hi;
        }
        return sum;
    }

    return accelerated_panel_tail(
        integrand, [nu, r](int m) { return bessel_j_zero(nu, m) / r; }, cfg,
        scale_hint, "integrate_bessel");
}

double integrate_panels(const ScalarFn& fn, double delta,
                        const QuadratureConfig& cfg, double scale_hint) {
    cfg.validate();
    if (!(delta > 0.0))
        throw std::invalid_argument("integrate_panels: requires delta > 0");
    return accelerated_panel_tail(
        fn, [delta](int m) { return m * delta; }, cfg, scale_hint,
        "integrate_panels");
}

BlockSumResult sum_geometric_blocks(const ScalarFn& fn, double x0, bool outward,
                                    const QuadratureConfig& cfg, int probe_blocks,
                                    double inward_floor) {
    if (!(x0 > 0.0))
        throw std::invalid_argument("sum_geometric_blocks: x0 must be > 0");
    BlockSumResult out;
    const bool detect_divergence = outward || inward_floor <= 0.0;
    double prev = -1.0, prev_ratio = -1.0, ratio = -1.0;
    double lo = outward ? x0 : 0.5 * x0;
    const int max_blocks = 220;
    for (int j = 0; j < max_blocks; ++j) {
        const double block = integrate(fn, lo, 2.0 * lo, cfg).value;
        out.value += block;
        prev_ratio = ratio;
        ratio = (std::abs(prev) > 0.0) ? std::abs(block) / std::abs(prev) : -1.0;
        if (detect_divergence && j >= probe_blocks && std::abs(block) > 0.0 &&
            ratio >= 0.98) {
            out.finite = false;
            return out;
        }
        if (std::abs(block) <= std::max(cfg.abs_tol, 0.5e-12 * std::abs(out.value)) &&
            j > 2)
            return out;
        prev = block;
        lo = outward ? 2.0 * lo : 0.5 * lo;
        if (!outward && (lo < 1e-300 || lo < inward_floor)) return out;
    }
    // Out of blocks. A stably geometric tail below 1 still sums; anything
    // else is divergent-grade growth.
    if (ratio > 0.0 && ratio < 0.99 && std::abs(ratio - prev_ratio) < 2e-3) {
        out.value += prev * ratio / (1.0 - ratio);
        return out;
    }
    out.finite = false;
    return out;
}

double finite_diff(const ScalarFn& fn, double x, int order, double h) {
    if (order < 0 || order > 8)
        throw std::invalid_argument("finite_diff: order must be in [0, 8]");
    if (!(h > 0.0)) throw std::invalid_argument("finite_diff: step must be positive");
    if (order == 0) return fn(x);
    double binom = 1.0;
    double acc = 0.0;
    for (int i = 0; i <= order; ++i) {
        const double sign = (i % 2 == 0) ? 1.0 : -1.0;
        acc += sign * binom * fn(x + (0.5 * order - i) * h);
        binom *= static_cast<double>(order - i) / (i + 1.0);
    }
    return acc / std::pow(h, order);
}

double fd_noise_floor(int order, double h, double noise) {
    constexpr double kC = 10.0;
    return kC * noise / std::pow(h, order) + kC * h * h;
}

double fd_optimal_step(int order, double noise) {
    return std::pow(noise, 1.0 / (order + 2.0));
}

}  // namespace dimwalk::numerics
