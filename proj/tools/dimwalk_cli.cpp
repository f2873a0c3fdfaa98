// dimwalk: evaluate, verify and simulate radial Levy processes built by
// subordinating Brownian motion. Subcommands:
//   eval      tables of f(u), transition densities and Levy densities
//   verify    identity suites (cm, hw, dimwalk, intertwine, gradient,
//             vague-limit, all) as JSON-line reports; exit 0 iff all pass
//   simulate  seeded Monte-Carlo law checks and sample export
//
// Outputs are byte-stable for a fixed config and seed; timestamps only ever
// go to the metadata sidecar.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dimwalk/catalog.hpp"
#include "dimwalk/generator.hpp"
#include "dimwalk/simulation.hpp"
#include "dimwalk/transition.hpp"

namespace fs = std::filesystem;
using namespace dimwalk;

namespace {

struct RunConfig {
    std::string model = "stable12";
    int k = 1;
    double t = 1.0;
    double r_max = 12.0;
    int grid_n = 257;
    std::string route = "mixture";
    std::string convention = "default";
    std::string suite = "all";
    std::string what = "density";
    double u_value = 1.0;
    std::size_t n = 100000;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string out_dir;
    std::string svg_path;
    numerics::QuadratureConfig quad;

    // model parameter overrides
    std::optional<double> p_alpha, p_scale, p_shape, p_rate, p_barrier, p_lambda,
        p_beta, p_drift;
};

void apply_config_file(const std::string& path, RunConfig& rc) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
    nlohmann::json j;
    in >> j;
    rc.model = j.value("model", rc.model);
    rc.k = j.value("k", rc.k);
    rc.t = j.value("t", rc.t);
    rc.r_max = j.value("r_max", rc.r_max);
    rc.grid_n = j.value("grid_n", rc.grid_n);
    rc.route = j.value("route", rc.route);
    rc.convention = j.value("convention", rc.convention);
    rc.seed = j.value("seed", rc.seed);
    rc.n = j.value("n", rc.n);
    rc.threads = j.value("threads", rc.threads);
    if (j.contains("quadrature")) {
        const auto& q = j.at("quadrature");
        rc.quad.rel_tol = q.value("rel_tol", rc.quad.rel_tol);
        rc.quad.abs_tol = q.value("abs_tol", rc.quad.abs_tol);
        rc.quad.max_subdivisions = q.value("max_subdivisions", rc.quad.max_subdivisions);
        rc.quad.oscillatory_blocks =
            q.value("oscillatory_blocks", rc.quad.oscillatory_blocks);
    }
}

BernsteinSpec resolve_spec(const RunConfig& rc) {
    const std::string& m = rc.model;
    if (m.size() > 5 && m.substr(m.size() - 5) == ".json") {
        std::ifstream in(m);
        if (!in) throw CLI::ValidationError("--model", "cannot open " + m);
        nlohmann::json j;
        in >> j;
        return BernsteinSpec::from_json(j);
    }
    const double drift = rc.p_drift.value_or(m == "drift" ? 1.0 : 0.0);
    if (m == "drift") return BernsteinSpec::drift_only(drift).with_name("drift");
    if (m == "stable12")
        return BernsteinSpec::stable(0.5, rc.p_scale.value_or(1.0), drift)
            .with_name("stable12");
    if (m == "stable")
        return BernsteinSpec::stable(rc.p_alpha.value_or(0.5),
                                     rc.p_scale.value_or(1.0), drift)
            .with_name("stable");
    if (m == "gamma")
        return BernsteinSpec::gamma(rc.p_shape.value_or(1.0), rc.p_rate.value_or(1.0),
                                    drift)
            .with_name("gamma");
    if (m == "ig")
        return BernsteinSpec::inverse_gaussian(rc.p_barrier.value_or(1.0), drift)
            .with_name("ig");
    if (m == "cp")
        return BernsteinSpec::exponential_cp(rc.p_lambda.value_or(2.0),
                                             rc.p_beta.value_or(1.0), drift)
            .with_name("cp");
    throw CLI::ValidationError("--model", "unknown model '" + m + "'");
}

KernelConvention parse_convention(const std::string& s) {
    if (s == "default") return KernelConvention::twice_speed;
    if (s == "paper-literal") return KernelConvention::paper_literal;
    throw CLI::ValidationError("--convention", "use 'default' or 'paper-literal'");
}

std::vector<double> geometric_grid(double lo, double hi, int n) {
    std::vector<double> g(n);
    const double a = std::log(lo), b = std::log(hi);
    for (int i = 0; i < n; ++i) g[i] = std::exp(a + (b - a) * i / (n - 1.0));
    return g;
}

void write_svg_chart(const std::string& path, const std::vector<double>& xs,
                     const std::vector<double>& ys, const std::string& title) {
    const int w = 720, h = 420, pad = 48;
    double x_lo = xs.front(), x_hi = xs.back();
    double y_lo = 0.0, y_hi = 1e-300;
    for (double y : ys)
        if (std::isfinite(y)) {
            y_hi = std::max(y_hi, y);
            y_lo = std::min(y_lo, y);
        }
    if (y_hi == y_lo) y_hi = y_lo + 1.0;
    std::ofstream os(path);
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='"
       << h << "'>\n<rect width='100%' height='100%' fill='white'/>\n"
       << "<text x='" << w / 2 << "' y='20' text-anchor='middle' "
          "font-family='monospace'>"
       << title << "</text>\n<polyline fill='none' stroke='steelblue' "
          "stroke-width='1.5' points='";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!std::isfinite(ys[i])) continue;
        const double px = pad + (xs[i] - x_lo) / (x_hi - x_lo) * (w - 2 * pad);
        const double py = h - pad - (ys[i] - y_lo) / (y_hi - y_lo) * (h - 2 * pad);
        os << px << "," << py << " ";
    }
    os << "'/>\n<line x1='" << pad << "' y1='" << h - pad << "' x2='" << w - pad
       << "' y2='" << h - pad << "' stroke='black'/>\n<line x1='" << pad
       << "' y1='" << pad << "' x2='" << pad << "' y2='" << h - pad
       << "' stroke='black'/>\n</svg>\n";
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
    std::ofstream os(dir / name);
    if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
    return os;
}

void write_metadata(const fs::path& dir, const std::string& command) {
    // The only file that carries a timestamp, keeping data outputs byte-stable.
    std::ofstream os(dir / "metadata.json");
    os << nlohmann::json{{"command", command},
                         {"written_unix_time", static_cast<long long>(std::time(nullptr))}}
              .dump(2)
       << "\n";
}

int cmd_eval(const RunConfig& rc) {
    const BernsteinSpec spec = resolve_spec(rc);
    const KernelConvention conv = parse_convention(rc.convention);
    const SubordinatorModel model(spec);

    std::optional<fs::path> dir;
    if (!rc.out_dir.empty()) {
        dir = fs::path(rc.out_dir);
        fs::create_directories(*dir);
    }

    char line[96];
    if (rc.what == "f") {
        nlohmann::json header{{"model", spec.name()}, {"what", "f"}};
        std::ostringstream csv;
        csv << "u,f\n";
        if (rc.grid_n <= 1) {
            std::snprintf(line, sizeof(line), "%.17g,%.17g\n", rc.u_value,
                          eval_f(spec, rc.u_value, rc.quad));
            csv << line;
        } else {
            for (double u : geometric_grid(1e-3, std::max(rc.u_value, 1e-2), rc.grid_n)) {
                std::snprintf(line, sizeof(line), "%.17g,%.17g\n", u,
                              eval_f(spec, u, rc.quad));
                csv << line;
            }
        }
        std::cout << header.dump() << "\n" << csv.str();
        if (dir) {
            open_out(*dir, "header.json") << header.dump(2) << "\n";
            open_out(*dir, "curve.csv") << csv.str();
            write_metadata(*dir, "eval");
        }
        return 0;
    }

    std::vector<double> grid = geometric_grid(1e-3, rc.r_max, rc.grid_n);
    grid.insert(grid.begin(), 0.0);
    nlohmann::json header;
    std::vector<double> values;

    if (rc.what == "density") {
        const DensityRoute route =
            (rc.route == "fourier") ? DensityRoute::fourier : DensityRoute::mixture;
        if (rc.route != "fourier" && rc.route != "mixture")
            throw CLI::ValidationError("--route", "use 'mixture' or 'fourier'");
        auto td = make_transition_density(model, rc.k, rc.t, route, conv, grid, rc.quad);
        header = td.header_json();
        values = td.profile.values();
    } else if (rc.what == "levy") {
        grid.erase(grid.begin());  // the Levy density blows up at the origin
        auto ld = make_levy_density(model, rc.k, conv, grid, rc.quad);
        header = ld.header_json();
        values = ld.profile.values();
    } else {
        throw CLI::ValidationError("--what", "use 'f', 'density' or 'levy'");
    }

    std::ostringstream csv;
    csv << "r,value\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::snprintf(line, sizeof(line), "%.17g,%.17g\n", grid[i], values[i]);
        csv << line;
    }
    std::cout << header.dump() << "\n" << csv.str();
    if (dir) {
        open_out(*dir, "header.json") << header.dump(2) << "\n";
        open_out(*dir, "curve.csv") << csv.str();
        write_metadata(*dir, "eval");
    }
    if (!rc.svg_path.empty())
        write_svg_chart(rc.svg_path, grid, values,
                        spec.name() + " " + rc.what + " k=" + std::to_string(rc.k));
    return 0;
}

struct SuiteSelection {
    bool cm = false, hw = false, dimwalk_s = false, intertwine = false,
         gradient = false, vague = false;
};

SuiteSelection parse_suite(const std::string& s) {
    SuiteSelection sel;
    if (s == "all") return {true, true, true, true, true, true};
    if (s == "cm") sel.cm = true;
    else if (s == "hw") sel.hw = true;
    else if (s == "dimwalk") sel.dimwalk_s = true;
    else if (s == "intertwine") sel.intertwine = true;
    else if (s == "gradient") sel.gradient = true;
    else if (s == "vague-limit") sel.vague = true;
    else throw CLI::ValidationError("--suite", "unknown suite '" + s + "'");
    return sel;
}

int cmd_verify(const RunConfig& rc) {
    const SuiteSelection sel = parse_suite(rc.suite);
    const KernelConvention conv = parse_convention(rc.convention);

    // The non-Bernstein fixture exercises the failure path of the cm suite.
    const bool fixture = rc.model == "synthetic-nonbernstein";

    std::vector<std::string> names;
    if (rc.model == "catalog") {
        for (const auto& e : catalog()) names.push_back(e.spec.name());
    } else {
        names.push_back(rc.model);
    }

    std::vector<VerificationReport> reports;
    const auto sign_grid = geometric_grid(0.1, 100.0, 50);

    if (fixture) {
        if (!sel.cm) {
            std::cerr << "synthetic-nonbernstein is only a cm-suite fixture\n";
            return 2;
        }
        auto quad_fn = [](double x) { return x * x; };
        reports.push_back(
            check_bernstein_signs(quad_fn, "synthetic-nonbernstein", sign_grid, 2));
        reports.push_back(check_cm([&](double x) { return std::exp(-quad_fn(x)); },
                                   "exp(-u^2)", sign_grid, 3));
    } else {
        for (const auto& name : names) {
            RunConfig mrc = rc;
            mrc.model = name;
            const BernsteinSpec spec = resolve_spec(mrc);
            const SubordinatorModel model(spec);
            const bool in_catalog = [&] {
                for (const auto& e : catalog())
                    if (e.spec.name() == name) return true;
                return false;
            }();
            const HwResult hw = hartman_wintner(spec);

            if (sel.cm) {
                reports.push_back(check_bernstein_signs(spec, sign_grid, 5));
                for (double t : {0.1, 1.0, 5.0}) {
                    auto g = [&spec, t](double r) {
                        return std::exp(-t * eval_f(spec, r));
                    };
                    auto rep = check_cm(g, spec.name() + " exp(-" +
                                               std::to_string(t) + " f)",
                                        sign_grid, 5);
                    reports.push_back(rep);
                }
            }
            if (sel.hw) {
                VerificationReport rep;
                rep.check = "hartman-wintner";
                rep.subject = spec.name();
                rep.grid_points = hw.probe.size();
                rep.detail = "verdict: " + to_string(hw.verdict) +
                             ", top ratio " + std::to_string(hw.ratio.back());
                if (in_catalog) {
                    rep.pass = hw.verdict == catalog_entry(name).expected_hw;
                } else {
                    rep.pass = hw.verdict != HwVerdict::inconclusive;
                }
                reports.push_back(rep);
            }
            if (sel.dimwalk_s && (model.has_density() || model.is_point_mass())) {
                const auto grid = geometric_grid(0.01, 10.0, 60);
                // The k+2 profile must stay finite at the origin, i.e.
                // E S_t^{-(k+2)/2} < inf; for the gamma subordinator that
                // needs t > 3/2, so its ladder runs at later times.
                const bool singular_origin = !model.neg_moment(1.5, 0.5).finite;
                const std::vector<double> ts =
                    singular_origin ? std::vector<double>{2.0, 3.0}
                                    : std::vector<double>{0.5, 1.0};
                for (double t : ts) {
                    auto lower = make_transition_density(model, 1, t,
                                                         DensityRoute::mixture,
                                                         conv, grid, rc.quad);
                    auto upper = make_transition_density(model, 3, t,
                                                         DensityRoute::mixture,
                                                         conv, grid, rc.quad);
                    const double tol = model.is_point_mass() ? 1e-6 : 1e-4;
                    reports.push_back(dimwalk_check(lower, upper, tol));
                }
                auto l1 = make_levy_density(model, 1, conv);
                auto l3 = make_levy_density(model, 3, conv);
                reports.push_back(levy_dimwalk_check(l1, l3, 1e-4));
            }
            if (sel.intertwine && hw.verdict == HwVerdict::holds) {
                const auto grid = geometric_grid(0.2, 2.5, 10);
                for (int k : {3, 5}) {
                    for (int m : {3, 4}) {
                        auto u = RadialTestFunction::polynomial_bump(3.0, m);
                        reports.push_back(
                            intertwine_check(spec, k, u, grid, conv, 1e-3, rc.quad));
                    }
                }
            }
            if (sel.gradient && hw.verdict == HwVerdict::holds) {
                std::vector<BoundedTestFunction> fns = {
                    {"tanh-step", [](double x) { return std::tanh(2.0 * x); }, 1.0},
                    {"cosine", [](double x) { return std::cos(3.0 * x); }, 1.0},
                    {"chirp",
                     [](double x) { return std::sin(7.0 * x + 2.0 * std::sin(3.0 * x)); },
                     1.0},
                };
                for (double t : {0.5, 1.0}) {
                    for (const auto& srep : gradient_bound_check(model, t, fns, conv)) {
                        VerificationReport rep;
                        rep.check = "gradient-bound";
                        rep.subject = srep.model + " t=" + std::to_string(t) + " " +
                                      srep.statistic;
                        rep.pass = srep.pass;
                        rep.max_error = srep.observed;
                        rep.tolerance = srep.predicted + srep.tolerance;
                        rep.detail = srep.detail;
                        reports.push_back(rep);
                    }
                }
            }
            if (sel.vague && (model.has_density() || model.is_point_mass())) {
                std::vector<std::pair<double, double>> shells;
                if (name == "stable12") shells = {{1.0, 2.0}, {2.0, 4.0}};
                else if (name == "cp") shells = {{0.5, 3.0}};
                else if (name == "drift") shells = {{1.0, 2.0}};
                if (!shells.empty())
                    reports.push_back(
                        vague_limit_check(model, 1, shells, conv, rc.quad));
            }
        }
    }

    // Machine-readable stream with any failures last, then a human summary.
    std::stable_sort(reports.begin(), reports.end(),
                     [](const VerificationReport& a, const VerificationReport& b) {
                         return a.pass && !b.pass;
                     });
    std::size_t passed = 0;
    std::ostringstream stream;
    for (const auto& rep : reports) {
        stream << rep.to_json_line() << "\n";
        if (rep.pass) ++passed;
    }
    std::cout << stream.str();
    std::cerr << "verify: " << passed << "/" << reports.size() << " checks passed\n";
    if (!rc.out_dir.empty()) {
        fs::path dir(rc.out_dir);
        fs::create_directories(dir);
        open_out(dir, "reports.jsonl") << stream.str();
        write_metadata(dir, "verify");
    }
    const bool all_pass = passed == reports.size() && !reports.empty();
    return all_pass ? 0 : 1;
}

int cmd_simulate(const RunConfig& rc) {
    const BernsteinSpec spec = resolve_spec(rc);
    const KernelConvention conv = parse_convention(rc.convention);
    const SubordinatorModel model(spec);

    std::vector<SimulationReport> reports;
    reports.push_back(empirical_density_check(model, rc.k, rc.t, rc.n, 40, rc.seed,
                                              conv, rc.threads));
    if (std::get_if<ExponentialCP>(&spec.levy_measure()) != nullptr &&
        spec.drift() == 0.0) {
        std::vector<std::pair<double, double>> shells = {
            {0.0, std::numeric_limits<double>::infinity()}, {0.5, 1.5}};
        auto jumps = jump_count_check(model, rc.k, rc.t, shells,
                                      std::max<std::size_t>(rc.n / 10, 1000),
                                      rc.seed + 1, conv);
        reports.insert(reports.end(), jumps.begin(), jumps.end());
    }
    if (!std::isinf(model.atom_rate())) {
        // finite atom: nothing further
    } else if (model.is_point_mass()) {
        reports.push_back(neg_moment_mc(model, 1.0, rc.t, std::min(rc.n, std::size_t(10000)),
                                        rc.seed + 2));
    } else {
        reports.push_back(
            neg_moment_mc(model, 0.5, rc.t, rc.n, rc.seed + 2));
    }

    std::size_t passed = 0;
    std::ostringstream stream;
    for (const auto& rep : reports) {
        stream << rep.to_json_line() << "\n";
        if (rep.pass) ++passed;
    }
    std::cout << stream.str();
    std::cerr << "simulate: " << passed << "/" << reports.size() << " checks passed\n";

    if (!rc.out_dir.empty()) {
        fs::path dir(rc.out_dir);
        fs::create_directories(dir);
        open_out(dir, "reports.jsonl") << stream.str();
        auto batch = sample_subordinated(model, rc.k, rc.t,
                                         std::min(rc.n, std::size_t(100000)), rc.seed,
                                         conv, rc.threads);
        auto os = open_out(dir, "samples.csv");
        write_samples_csv(batch, rc.t, os);
        write_metadata(dir, "simulate");
    }
    return passed == reports.size() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"radial Levy processes from subordinated Brownian motion: "
                 "densities, dimension-walk identities, simulation"};
    app.require_subcommand(1);

    RunConfig rc;
    std::string config_path;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file")
            ->check(CLI::ExistingFile);
        cmd->add_option("--model", rc.model,
                        "catalog name (drift|stable12|stable|gamma|ig|cp), JSON "
                        "spec path, or synthetic-nonbernstein");
        cmd->add_option("--k", rc.k, "ambient dimension")->check(CLI::PositiveNumber);
        cmd->add_option("--t", rc.t, "time")->check(CLI::PositiveNumber);
        cmd->add_option("--convention", rc.convention,
                        "kernel convention: default|paper-literal");
        cmd->add_option("--seed", rc.seed, "randomness seed");
        cmd->add_option("--threads", rc.threads, "worker threads")
            ->check(CLI::Range(1, 64));
        cmd->add_option("--out", rc.out_dir, "output directory");
        cmd->add_option("--alpha", rc.p_alpha, "stable index");
        cmd->add_option("--scale", rc.p_scale, "stable scale");
        cmd->add_option("--shape", rc.p_shape, "gamma shape");
        cmd->add_option("--rate", rc.p_rate, "gamma rate");
        cmd->add_option("--barrier", rc.p_barrier, "inverse-Gaussian barrier");
        cmd->add_option("--lambda", rc.p_lambda, "compound-Poisson intensity");
        cmd->add_option("--beta", rc.p_beta, "compound-Poisson jump rate");
        cmd->add_option("--drift", rc.p_drift, "drift coefficient");
    };

    auto* eval = app.add_subcommand("eval", "tabulate f, densities or Levy densities");
    add_common(eval);
    eval->add_option("--what", rc.what, "f|density|levy");
    eval->add_option("--u", rc.u_value, "argument for --what f");
    eval->add_option("--r-max", rc.r_max, "grid top")->check(CLI::PositiveNumber);
    eval->add_option("--grid-n", rc.grid_n, "grid points")->check(CLI::Range(1, 100000));
    eval->add_option("--route", rc.route, "mixture|fourier");
    eval->add_option("--svg", rc.svg_path, "write a minimal SVG line chart");

    auto* verify = app.add_subcommand("verify", "run identity suites over the catalog");
    add_common(verify);
    verify->add_option("--suite", rc.suite,
                       "cm|hw|dimwalk|intertwine|gradient|vague-limit|all");

    auto* simulate = app.add_subcommand("simulate", "seeded Monte-Carlo law checks");
    add_common(simulate);
    simulate->add_option("--n", rc.n, "sample count")
        ->check(CLI::Range(std::size_t(1), std::size_t(100000000)));

    rc.model = "stable12";

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_path.empty()) {
            RunConfig file_rc;
            apply_config_file(config_path, file_rc);
            // flags the user set explicitly win over the config file
            auto keep = rc;
            rc = file_rc;
            auto* cmd = app.get_subcommands().front();
            auto overridden = [&](const std::string& flag) {
                const auto* opt = cmd->get_option_no_throw(flag);
                return opt != nullptr && opt->count() > 0;
            };
            if (overridden("--model")) rc.model = keep.model;
            if (overridden("--k")) rc.k = keep.k;
            if (overridden("--t")) rc.t = keep.t;
            if (overridden("--seed")) rc.seed = keep.seed;
            if (overridden("--threads")) rc.threads = keep.threads;
            if (overridden("--convention")) rc.convention = keep.convention;
            if (overridden("--out")) rc.out_dir = keep.out_dir;
            rc.suite = keep.suite;
            rc.what = keep.what;
            rc.route = keep.route;
            rc.u_value = keep.u_value;
            rc.r_max = keep.r_max;
            rc.grid_n = keep.grid_n;
            rc.svg_path = keep.svg_path;
            rc.p_alpha = keep.p_alpha;
            rc.p_scale = keep.p_scale;
            rc.p_shape = keep.p_shape;
            rc.p_rate = keep.p_rate;
            rc.p_barrier = keep.p_barrier;
            rc.p_lambda = keep.p_lambda;
            rc.p_beta = keep.p_beta;
            rc.p_drift = keep.p_drift;
            if (overridden("--n")) rc.n = keep.n;
        }
        if (app.got_subcommand("eval")) return cmd_eval(rc);
        if (app.got_subcommand("verify")) {
            if (verify->count("--model") == 0) rc.model = "catalog";
            return cmd_verify(rc);
        }
        if (app.got_subcommand("simulate")) return cmd_simulate(rc);
    } catch (const PreconditionError& e) {
        std::cerr << "precondition error: " << e.what() << "\n";
        return 3;
    } catch (const numerics::NumericError& e) {
        std::cerr << "numeric failure: " << e.what()
                  << " (residual " << e.residual() << ")\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
