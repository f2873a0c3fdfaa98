#include <doctest.h>

#include <cmath>
#include <nlohmann/json.hpp>

#include "dimwalk/bernstein.hpp"
#include "dimwalk/catalog.hpp"
#include "support/oracles.hpp"

using namespace dimwalk;

namespace {
const double kSqrtPi = std::sqrt(3.141592653589793238462643383279502884);
}

TEST_CASE("eval_f closed forms and oracle quadratures") {
    SUBCASE("pure drift") {
        const auto spec = BernsteinSpec::drift_only(1.0);
        CHECK(eval_f(spec, 4.0) == 4.0);
        CHECK(eval_f(spec, 0.0) == 0.0);
    }
    SUBCASE("stable 1/2: f(u) = sqrt(u)") {
        const auto spec = BernsteinSpec::stable(0.5, 1.0);
        CHECK(eval_f(spec, 9.0) == doctest::Approx(3.0).epsilon(1e-14));
        // Independent oracle: quadrature of (1 - e^{-u y}) (2 sqrt(pi))^{-1}
        // y^{-3/2} dy with the singularity removed by y = z^4.
        const double u = 9.0;
        auto head = [u](double z) {
            if (z == 0.0) return 0.0;
            const double y = z * z * z * z;
            return -std::expm1(-u * y) / (2.0 * kSqrtPi * std::pow(y, 1.5)) * 4.0 *
                   z * z * z;
        };
        // tail split: mu([1,inf)) = 1/sqrt(pi) minus the damped remainder
        auto damped = [u](double y) {
            return std::exp(-u * y) / (2.0 * kSqrtPi * std::pow(y, 1.5));
        };
        const double oracle = oracles::quad(head, 0.0, 1.0) + 1.0 / kSqrtPi -
                              oracles::quad_to_inf(damped, 1.0);
        CHECK(oracle == doctest::Approx(3.0).epsilon(1e-9));
        CHECK(eval_f_quadrature(spec, u) == doctest::Approx(oracle).epsilon(1e-8));
    }
    SUBCASE("compound Poisson: f(u) = 2u/(1+u)") {
        const auto spec = BernsteinSpec::exponential_cp(2.0, 1.0);
        CHECK(eval_f(spec, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
        auto integrand = [](double y) {
            return -std::expm1(-y) * 2.0 * std::exp(-y);
        };
        const double oracle = oracles::quad_to_inf(integrand, 0.0);
        CHECK(oracle == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(eval_f_quadrature(spec, 1.0) == doctest::Approx(oracle).epsilon(1e-8));
    }
}

TEST_CASE("closed form matches quadrature across the catalog") {
    for (const auto& entry : catalog()) {
        for (double u : {0.1, 0.5, 1.0, 4.0, 20.0}) {
            const double cf = eval_f(entry.spec, u);
            const double q = eval_f_quadrature(entry.spec, u);
            CHECK(std::abs(cf - q) <= 1e-8 * (1.0 + cf));
        }
    }
}

TEST_CASE("eval_f is nondecreasing with concave jump part") {
    const auto grid = oracles::geomspace(0.01, 100.0, 80);
    for (const auto& entry : catalog()) {
        double prev = 0.0, prev_u = 0.0;
        double prev_slope = std::numeric_limits<double>::infinity();
        for (double u : grid) {
            const double f = eval_f(entry.spec, u);
            CHECK(f >= prev - 1e-12 * (1.0 + f));
            const double jump_prev = prev - entry.spec.drift() * prev_u;
            const double jump = f - entry.spec.drift() * u;
            const double slope = (jump - jump_prev) / (u - prev_u);
            CHECK(slope <= prev_slope * (1.0 + 1e-9) + 1e-12);
            prev_slope = slope;
            prev = f;
            prev_u = u;
        }
    }
}

TEST_CASE("bernstein sign pattern checks") {
    const auto grid = oracles::geomspace(0.5, 50.0, 40);
    SUBCASE("linear function passes") {
        auto rep = check_bernstein_signs([](double u) { return u; }, "f(u)=u", grid, 3);
        CHECK(rep.pass);
    }
    SUBCASE("sqrt passes to order 5") {
        auto rep = check_bernstein_signs([](double u) { return std::sqrt(u); },
                                         "f(u)=sqrt(u)", grid, 5);
        CHECK(rep.pass);
    }
    SUBCASE("u^2 fails at order 2") {
        auto rep =
            check_bernstein_signs([](double u) { return u * u; }, "f(u)=u^2", grid, 2);
        CHECK_FALSE(rep.pass);
        CHECK(rep.detail.find("order 2") != std::string::npos);
        CHECK(rep.max_error > 1.0);  // the violation is f'' = 2
    }
    SUBCASE("whole catalog passes to order 5 on [0.1, 100]") {
        const auto wide = oracles::geomspace(0.1, 100.0, 50);
        for (const auto& entry : catalog()) {
            auto rep = check_bernstein_signs(entry.spec, wide, 5);
            INFO(entry.spec.name());
            CHECK(rep.pass);
        }
    }
}

TEST_CASE("complete monotonicity checks") {
    const auto grid = oracles::geomspace(0.1, 100.0, 50);
    SUBCASE("e^{-r} passes to order 8") {
        auto rep = check_cm([](double r) { return std::exp(-r); }, "exp(-r)", grid, 8);
        CHECK(rep.pass);
    }
    SUBCASE("e^{-t f} is CM for catalog Bernstein functions") {
        for (const auto& entry : catalog()) {
            for (double t : {0.1, 1.0, 5.0}) {
                auto g = [&entry, t](double r) {
                    return std::exp(-t * eval_f(entry.spec, r));
                };
                auto rep = check_cm(g, entry.spec.name(), grid, 5);
                INFO(entry.spec.name() << " t=" << t);
                CHECK(rep.pass);
            }
        }
    }
    SUBCASE("oscillating function fails") {
        auto rep =
            check_cm([](double r) { return std::sin(r) + 2.0; }, "sin+2", grid, 4);
        CHECK_FALSE(rep.pass);
    }
}

TEST_CASE("sign checks reject bad grids") {
    CHECK_THROWS_AS(check_cm([](double r) { return r; }, "x", {1.0}, 2),
                    std::invalid_argument);
    CHECK_THROWS_AS(check_cm([](double r) { return r; }, "x", {1.0, 0.5}, 2),
                    std::invalid_argument);
    CHECK_THROWS_AS(check_cm([](double r) { return r; }, "x", {-1.0, 0.5}, 2),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        check_cm([](double r) { return r; }, "x", {1.0, 1.0 + 1e-9, 1.0 + 2e-9}, 6),
        std::invalid_argument);
    CHECK_THROWS_AS(check_cm([](double r) { return r; }, "x", {1.0, 2.0}, 9),
                    std::invalid_argument);
}

TEST_CASE("hartman-wintner verdicts") {
    SUBCASE("sqrt holds") {
        auto res = hartman_wintner(BernsteinSpec::stable(0.5, 1.0));
        CHECK(res.verdict == HwVerdict::holds);
        CHECK(res.ratio.back() > res.ratio.front());
    }
    SUBCASE("log(1+u) fails with ratio near 1") {
        auto res = hartman_wintner(BernsteinSpec::gamma(1.0, 1.0));
        CHECK(res.verdict == HwVerdict::fails);
        CHECK(res.ratio.back() == doctest::Approx(1.0).epsilon(1e-6));
    }
    SUBCASE("bounded f fails with ratio near 0") {
        auto res = hartman_wintner(BernsteinSpec::exponential_cp(2.0, 1.0));
        CHECK(res.verdict == HwVerdict::fails);
        CHECK(res.ratio.back() < 0.1);
    }
    SUBCASE("catalog classification") {
        for (const auto& entry : catalog()) {
            auto res = hartman_wintner(entry.spec);
            INFO(entry.spec.name());
            CHECK(res.verdict == entry.expected_hw);
        }
    }
    SUBCASE("probe validation") {
        CHECK_THROWS_AS(
            hartman_wintner(BernsteinSpec::drift_only(1.0), oracles::geomspace(10, 100, 20)),
            std::invalid_argument);
    }
}

TEST_CASE("levy measure accessors") {
    const auto st = BernsteinSpec::stable(0.5, 1.0);
    CHECK(st.levy_density(1.0) ==
          doctest::Approx(0.5 / numerics::gamma_fn(0.5)).epsilon(1e-14));
    CHECK(st.levy_mass() == std::numeric_limits<double>::infinity());
    const auto cp = BernsteinSpec::exponential_cp(2.0, 1.0);
    CHECK(cp.levy_mass() == 2.0);
    const auto fa = BernsteinSpec::finite_atomic({{1.0, 0.5}, {2.0, 1.5}});
    CHECK(fa.levy_mass() == 2.0);
    CHECK_FALSE(fa.has_levy_density());
    CHECK_THROWS_AS(fa.levy_density(1.0), std::logic_error);
    CHECK(BernsteinSpec::drift_only(2.0).levy_mass() == 0.0);
}

TEST_CASE("spec construction is range-checked") {
    CHECK_THROWS_AS(BernsteinSpec::stable(1.5, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(BernsteinSpec::stable(0.5, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(BernsteinSpec::gamma(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(BernsteinSpec::inverse_gaussian(-0.5), std::invalid_argument);
    CHECK_THROWS_AS(BernsteinSpec::exponential_cp(2.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(BernsteinSpec::finite_atomic({{-1.0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(BernsteinSpec::drift_only(-1.0), std::invalid_argument);
}

TEST_CASE("json round trip preserves the function") {
    for (const auto& entry : catalog()) {
        const auto j = entry.spec.to_json();
        const auto back = BernsteinSpec::from_json(j);
        CHECK(back.name() == entry.spec.name());
        for (double u : {0.2, 1.0, 7.0})
            CHECK(eval_f(back, u) == doctest::Approx(eval_f(entry.spec, u)).epsilon(1e-14));
    }
    const auto fa = BernsteinSpec::finite_atomic({{1.0, 0.5}}, 0.25);
    const auto back = BernsteinSpec::from_json(fa.to_json());
    CHECK(eval_f(back, 3.0) == doctest::Approx(eval_f(fa, 3.0)).epsilon(1e-14));
}
