#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dimwalk/generator.hpp"
#include "dimwalk/subordinator.hpp"
#include "dimwalk/transition.hpp"

namespace dimwalk {

struct SimulationReport {
    std::string model;
    int k = 1;
    double t = 1.0;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::string statistic;
    double observed = 0.0;
    double predicted = 0.0;
    double tolerance = 0.0;  // 3 standard errors, or the stated budget
    bool pass = false;
    std::string detail;

    nlohmann::json to_json() const;
    std::string to_json_line() const;
};

/// n samples of X_t = B_{S_t} in R^k, row-major. Exact zeros are genuine
/// atoms: a compound-Poisson path with no jumps lands exactly at 0.
struct SampleBatch {
    int dim = 1;
    std::vector<double> data;

    std::size_t size() const { return data.size() / dim; }
    const double* row(std::size_t i) const { return data.data() + i * dim; }
    double radius(std::size_t i) const;
    bool is_zero(std::size_t i) const;
};

/// Deterministic for a fixed (model, k, t, n, seed) independent of
/// `threads`: samples are produced in fixed-size chunks, each from its own
/// derived substream.
SampleBatch sample_subordinated(const SubordinatorModel& model, int k, double t,
                                std::size_t n, std::uint64_t seed,
                                KernelConvention convention = KernelConvention::twice_speed,
                                int threads = 1);

void write_samples_csv(const SampleBatch& batch, double t, std::ostream& os);

/// Radial histogram against surface-weighted shell masses of p_t^k, plus the
/// exact-zero fraction against e^{-ct}. Pass iff the total variation over
/// the bins stays within 4 sqrt(bins/n) and the atom within 3 SE.
SimulationReport empirical_density_check(
    const SubordinatorModel& model, int k, double t, std::size_t n, int bins,
    std::uint64_t seed, KernelConvention convention = KernelConvention::twice_speed,
    int threads = 1);

/// Exact compound-Poisson paths: jump counts landing in radial shells are
/// Poisson with mean t nu_k(shell); checks mean, variance, the zero-jump
/// fraction e^{-lambda t} and independence across disjoint shells. Shells
/// may be unbounded: {a, inf} counts all jumps beyond radius a.
std::vector<SimulationReport> jump_count_check(
    const SubordinatorModel& model, int k, double t,
    const std::vector<std::pair<double, double>>& shells, std::size_t n_paths,
    std::uint64_t seed, KernelConvention convention = KernelConvention::twice_speed);

struct BoundedTestFunction {
    std::string name;
    std::function<double(double)> evaluate;
    double sup_norm = 1.0;
};

/// |d/dx P_t u| <= 4 ||u||_inf ||p_t||_inf + eps on x in [-5, 5], the
/// one-dimensional gradient estimate. Reports the observed ratio to the
/// bound. Requires a Hartman-Wintner-holding model (finite peak).
std::vector<SimulationReport> gradient_bound_check(
    const SubordinatorModel& model, double t,
    const std::vector<BoundedTestFunction>& test_functions,
    KernelConvention convention = KernelConvention::twice_speed);

/// Monte-Carlo E S_t^{-kappa} with a heavy-tail diagnostic: the estimate is
/// declared unstable when the top sample contributes more than 20% of the
/// sum. Compared against the quadrature route when that is finite;
/// instability is reported, not raised.
SimulationReport neg_moment_mc(const SubordinatorModel& model, double kappa,
                               double t, std::size_t n, std::uint64_t seed);

}  // namespace dimwalk
