#include "rtp/attacks.hpp"
#include "rtp/errors.hpp"
#include "rtp/jury.hpp"
#include "rtp/models.hpp"
#include "rtp/roots.hpp"
#include "rtp/scenario.hpp"
#include "rtp/sim.hpp"
#include "rtp/stability.hpp"
#include "rtp/sweep.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

// Shortest text that reads back to the same double.
std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string short_fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string prepare_out(const std::string& dir) {
    const std::string d = dir.empty() ? "." : dir;
    std::error_code ec;
    fs::create_directories(d, ec);
    if (ec) throw rtp::config_error("cannot create output directory " + d + ": " + ec.message());
    return d;
}

std::vector<double> parse_numbers(const std::string& spec, const std::string& what) {
    // Either a comma list or lo:hi[:step].
    std::vector<double> out;
    auto to_d = [&](const std::string& s) {
        try {
            std::size_t used = 0;
            double v = std::stod(s, &used);
            if (used == s.size()) return v;
        } catch (const std::exception&) {
        }
        throw rtp::config_error(what + ": not a number: '" + s + "'");
    };
    if (spec.find(':') != std::string::npos) {
        std::vector<std::string> f;
        std::istringstream in(spec);
        std::string x;
        while (std::getline(in, x, ':')) f.push_back(x);
        if (f.size() < 2 || f.size() > 3) throw rtp::config_error(what + ": range is lo:hi[:step]");
        const double lo = to_d(f[0]), hi = to_d(f[1]);
        const double step = f.size() == 3 ? to_d(f[2]) : 1.0;
        if (!(step > 0.0) || hi < lo) throw rtp::config_error(what + ": empty range");
        const long n = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
        for (long i = 0; i < n; ++i) {
            // Drop the rounding residue of lo + i * step (-0.8, not -0.7999999999999999).
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.12g", lo + static_cast<double>(i) * step);
            out.push_back(std::stod(buf));
        }
    } else {
        std::istringstream in(spec);
        std::string x;
        while (std::getline(in, x, ',')) {
            if (!x.empty()) out.push_back(to_d(x));
        }
    }
    if (out.empty()) throw rtp::config_error(what + ": no values");
    return out;
}

std::vector<double> h_grid(double lo, double hi, int n, bool linear) {
    if (!(lo > 0.0) || !(hi >= lo) || n < 1) throw rtp::config_error("h range must satisfy 0 < h-min <= h-max and points >= 1");
    std::vector<double> g;
    for (int i = 0; i < n; ++i) {
        const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
        g.push_back(linear ? lo + t * (hi - lo) : lo * std::pow(hi / lo, t));
    }
    return g;
}

rtp::PolyFamily parse_family(const std::string& s) {
    if (s == "scaling") return rtp::PolyFamily::scaling;
    if (s == "delay") return rtp::PolyFamily::delay;
    if (s == "scaled-delay" || s == "scaled_delay") return rtp::PolyFamily::scaled_delay;
    throw rtp::config_error("unknown family '" + s + "' (scaling, delay, scaled-delay)");
}

void print_summary(std::ostream& os, const rtp::Scenario& sc, const rtp::SimResult& r,
                   const std::vector<rtp::DayMetrics>& days, double rating) {
    os << "scenario: " << (sc.name.empty() ? "(unnamed)" : sc.name) << "\n";
    os << "status: " << rtp::to_string(r.status) << "\n";
    os << "converged: " << (r.convergent ? "true" : "false") << "\n";
    if (r.converged_at >= 0) os << "converged_at: " << r.converged_at << "\n";
    if (r.diverged_at >= 0) os << "diverged_at: " << r.diverged_at << "\n";
    os << "attack_start: " << r.attack_start << "\n";
    os << "final_lambda: " << fmt(r.trace.empty() ? 0.0 : r.trace.back().lambda) << "\n";
    os << "sigma_e: " << fmt(r.sigma_e) << " " << sc.units << "\n";
    os << "mean_h: " << fmt(r.mean_h) << "\n";
    if (!days.empty()) {
        os << "feeder_rating: " << fmt(rating) << " " << sc.units << "\n";
        os << "emergencies per day:";
        for (const auto& d : days) os << " " << short_fmt(d.emergency_frequency * static_cast<double>(sc.sim.periods_per_day()));
        os << "\n";
    }
}

int cmd_simulate(const std::string& scenario, const std::string& out, const std::vector<std::string>& sets,
                 long seed, bool seed_given) {
    rtp::Scenario sc;
    if (sets.empty() && !seed_given) {
        sc = rtp::load_scenario(scenario);
    } else {
        rtp::ConfigTable t = rtp::is_preset(scenario) ? rtp::parse_ini(rtp::preset_text(scenario))
                                                      : rtp::read_config_file(scenario);
        for (const auto& s : sets) {
            auto eq = s.find('=');
            if (eq == std::string::npos) throw rtp::config_error("--set expects section.key=value, got '" + s + "'");
            rtp::set_config_value(t, s.substr(0, eq), s.substr(eq + 1));
        }
        if (seed_given) rtp::set_config_value(t, "simulation.seed", std::to_string(seed));
        std::string base = ".";
        if (!rtp::is_preset(scenario)) {
            base = fs::path(scenario).parent_path().string();
            if (base.empty()) base = ".";
        }
        sc = rtp::build_scenario(t, base);
    }
    if (sc.rating_auto) sc.sim.feeder_rating = rtp::default_feeder_rating(sc.sim);

    const std::string dir = prepare_out(out.empty() ? sc.out_dir : out);
    const rtp::SimResult r = rtp::run(sc.sim);

    std::vector<rtp::DayMetrics> days;
    double rating = 0.0;
    if (sc.sim.feeder_rating) {
        rating = *sc.sim.feeder_rating;
        days = rtp::feeder_events(r.trace, rating, sc.sim.periods_per_day());
    }
    rtp::write_trace_csv((fs::path(dir) / "trace.csv").string(), r.trace);
    rtp::write_metrics_csv((fs::path(dir) / "metrics.csv").string(), days, r.sigma_e);

    std::ostringstream summary;
    print_summary(summary, sc, r, days, rating);
    std::ofstream((fs::path(dir) / "summary.txt").string()) << summary.str();
    std::cout << summary.str();
    return 0;
}

int cmd_sweep(const std::string& scenario, std::vector<std::string> axis_specs, const std::string& out, int workers,
              bool per_cell, long seed, bool seed_given) {
    rtp::ConfigTable t = rtp::is_preset(scenario) ? rtp::parse_ini(rtp::preset_text(scenario))
                                                  : rtp::read_config_file(scenario);
    std::string base = ".";
    if (!rtp::is_preset(scenario)) {
        base = fs::path(scenario).parent_path().string();
        if (base.empty()) base = ".";
    }
    if (seed_given) rtp::set_config_value(t, "simulation.seed", std::to_string(seed));
    const rtp::Scenario sc = rtp::build_scenario(t, base);
    if (axis_specs.empty()) axis_specs = sc.sweep_axes;
    if (axis_specs.empty()) throw rtp::config_error("sweep: empty grid (no --axis given and no [sweep] axes in the scenario)");
    std::vector<rtp::SweepAxis> axes;
    for (const auto& a : axis_specs) axes.push_back(rtp::parse_axis(a));

    const std::string dir = prepare_out(out.empty() ? sc.out_dir : out);
    rtp::SweepOptions opt;
    opt.workers = workers;
    opt.per_cell_seeds = per_cell;
    const auto rows = rtp::run_sweep(t, axes, base, opt);
    const std::string path = (fs::path(dir) / "sweep.csv").string();
    rtp::write_sweep_csv(path, axes, rows);

    std::size_t failed = 0, conv = 0;
    for (const auto& r : rows) {
        if (!r.error.empty()) ++failed;
        if (r.converged) ++conv;
    }
    std::cout << "cells: " << rows.size() << "\nconverged: " << conv << "\nfailed: " << failed << "\nwrote: " << path
              << "\n";
    return 0;
}

int cmd_ros(const std::string& family, double rho, int tau, double gamma, double epsilon, double h_min, double h_max,
            int points, bool linear, int scan, double tol, int workers, const std::string& out) {
    rtp::FamilyParams fp;
    fp.family = parse_family(family);
    fp.rho = rho;
    fp.tau = tau;
    fp.gamma = gamma;
    fp.mu = rtp::mu_ceo(gamma, epsilon);
    try {
        fp.validate();
    } catch (const rtp::domain_error& e) {
        throw rtp::config_error(e.what());
    }
    rtp::BoundaryOptions opt;
    opt.scan_points = scan;
    opt.tol = tol;
    opt.workers = workers;
    const auto curve = rtp::boundary_curve(fp, h_grid(h_min, h_max, points, linear), opt);

    const std::string dir = prepare_out(out);
    const std::string path = (fs::path(dir) / "ros.csv").string();
    std::ofstream os(path);
    if (!os) throw rtp::ingestion_error("cannot write " + path);
    os << "h,eta_bar,single_crossing,intervals\n";
    for (const auto& s : curve.samples) {
        std::string iv;
        for (const auto& [a, b] : s.intervals) iv += (iv.empty() ? "" : ";") + fmt(a) + ":" + fmt(b);
        os << fmt(s.h) << "," << fmt(s.eta_bar) << "," << (s.single_crossing ? 1 : 0) << "," << iv << "\n";
    }
    double lo = 1.0;
    for (const auto& s : curve.samples) lo = std::min(lo, s.eta_bar);
    std::cout << "family: " << family << "\nsamples: " << curve.samples.size()
              << "\nnon_increasing: " << (curve.non_increasing ? "true" : "false") << "\nmin_eta_bar: " << fmt(lo)
              << "\nwrote: " << path << "\n";
    return 0;
}

int cmd_ros_limit(const std::string& family, const std::string& rhos, const std::string& taus,
                  const std::string& gammas, double epsilon, bool validate, const std::string& out) {
    const rtp::PolyFamily fam = parse_family(family);
    if (fam == rtp::PolyFamily::scaled_delay) throw rtp::config_error("ros-limit supports the scaling and delay families");
    const auto rho_list = parse_numbers(rhos, "--rho");
    const auto second = fam == rtp::PolyFamily::delay ? parse_numbers(taus, "--tau") : parse_numbers(gammas, "--gamma");

    const std::string dir = prepare_out(out);
    const std::string path = (fs::path(dir) / "ros_limit.csv").string();
    std::ofstream os(path);
    if (!os) throw rtp::ingestion_error("cannot write " + path);
    os << "rho,tau_or_gamma,eta_limit" << (validate ? ",jury_h1e10,agrees" : "") << "\n";

    int mismatches = 0;
    for (double rho : rho_list) {
        for (double x : second) {
            rtp::FamilyParams fp;
            fp.family = fam;
            fp.rho = rho;
            double limit = 0.0;
            if (fam == rtp::PolyFamily::delay) {
                if (x != std::floor(x) || x < 1) throw rtp::config_error("--tau values must be positive integers");
                fp.tau = static_cast<int>(x);
                try {
                    fp.validate();
                } catch (const rtp::domain_error& e) {
                    throw rtp::config_error(e.what());
                }
                limit = rtp::delay_ros_limit(rho, fp.tau);
            } else {
                fp.gamma = x;
                fp.mu = rtp::mu_ceo(x, epsilon);
                try {
                    fp.validate();
                } catch (const rtp::domain_error& e) {
                    throw rtp::config_error(e.what());
                }
                limit = rtp::scaling_ros_limit(rho, x, fp.mu);
            }
            os << fmt(rho) << "," << (fam == rtp::PolyFamily::delay ? std::to_string(fp.tau) : fmt(x))
               << "," << fmt(limit);
            if (validate) {
                rtp::BoundaryOptions bo;
                bo.tol = 1e-7;
                const double jury = rtp::eta_bar_at(fp, 1e10, bo).eta_bar;
                const bool ok = std::abs(jury - limit) <= 1e-4;
                if (!ok) ++mismatches;
                os << "," << fmt(jury) << "," << (ok ? 1 : 0);
            }
            os << "\n";
            std::cout << family << " rho=" << short_fmt(rho)
                      << (fam == rtp::PolyFamily::delay ? " tau=" + std::to_string(fp.tau) : " gamma=" + short_fmt(x))
                      << " limit=" << short_fmt(limit) << "\n";
        }
    }
    std::cout << "wrote: " << path << "\n";
    if (mismatches > 0) {
        std::cerr << "error: " << mismatches << " limit(s) disagree with the Jury test at h=1e10\n";
        return kExitRuntime;
    }
    return 0;
}

int cmd_jury(const std::string& coeffs) {
    const auto c = parse_numbers(coeffs, "coefficients");
    rtp::CharPoly p;
    try {
        p = rtp::make_poly(c);
    } catch (const rtp::domain_error& e) {
        throw rtp::config_error(e.what());
    }
    const auto verdict = rtp::jury_test(p);
    const auto roots = rtp::roots_in_unit_circle(p);
    std::cout << rtp::to_string(verdict) << "\nmax_root_modulus: " << fmt(roots.max_modulus) << "\n";
    return 0;
}

int cmd_fit_supply(const std::string& csv, const std::vector<std::string>& scale) {
    double houses = 0, share = 0, population = 0;
    bool have_h = false, have_s = false, have_p = false;
    for (const auto& kv : scale) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw rtp::config_error("--scale expects key=value, got '" + kv + "'");
        const std::string k = kv.substr(0, eq);
        const double v = parse_numbers(kv.substr(eq + 1), "--scale " + k).front();
        if (k == "houses") houses = v, have_h = true;
        else if (k == "share") share = v, have_s = true;
        else if (k == "population") population = v, have_p = true;
        else throw rtp::config_error("--scale: unknown key '" + k + "' (houses, share, population)");
    }
    if (!scale.empty() && !(have_h && have_s && have_p))
        throw rtp::config_error("--scale needs houses=, share= and population=");

    if (!fs::exists(csv)) throw rtp::config_error("cannot open " + csv);
    const auto fit = rtp::fit_linear_supply(rtp::read_xy_csv(csv));
    std::cout << "p: " << fmt(fit.params.p) << "\nq: " << fmt(fit.params.q) << "\nr_squared: " << fmt(fit.r_squared)
              << "\nresidual_rms: " << fmt(fit.residual_rms) << "\nresidual_max: " << fmt(fit.residual_max)
              << "\nn: " << fit.n << "\n";
    if (!scale.empty()) {
        const auto s = rtp::scale_supply(fit.params, houses, share, population);
        std::cout << "scaled_p: " << fmt(s.p) << "\nscaled_q: " << fmt(s.q) << "\n";
    }
    return 0;
}

int cmd_stability_map(double p, double q, double b, const std::string& eps, const std::string& lstar,
                      const std::string& mode, int prices, int periods, double eta, int workers,
                      const std::string& out) {
    rtp::ProbabilityOptions opt;
    opt.prices = prices;
    opt.max_periods = periods;
    opt.mode = rtp::parse_controller_mode(mode);
    opt.eta = eta;
    const rtp::LinearSupplyParams sup{p, q};
    try {
        sup.validate();
    } catch (const rtp::domain_error& e) {
        throw rtp::config_error(e.what());
    }
    const auto cells = rtp::stability_map(sup, b, parse_numbers(eps, "--epsilon"), parse_numbers(lstar, "--lambda-star"),
                                          opt, workers);
    const std::string dir = prepare_out(out);
    const std::string path = (fs::path(dir) / "stability_map.csv").string();
    std::ofstream os(path);
    if (!os) throw rtp::ingestion_error("cannot write " + path);
    os << "epsilon,lambda_star,probability\n";
    std::size_t binary = 0;
    for (const auto& c : cells) {
        os << fmt(c.epsilon) << "," << fmt(c.lambda_star) << "," << fmt(c.probability) << "\n";
        if (c.probability <= 0.05 || c.probability >= 0.95) ++binary;
    }
    std::cout << "cells: " << cells.size() << "\nnear_0_or_1: " << binary << "\nwrote: " << path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Real-time pricing feedback loops under price integrity attacks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "rtp 1.0");

    std::string out;
    int workers = 0;
    long seed = 0;
    bool validate = false;

    auto* sim = app.add_subcommand("simulate", "Run one scenario; writes trace.csv, metrics.csv and summary.txt");
    std::string scenario;
    std::vector<std::string> sets;
    sim->add_option("scenario", scenario, "Scenario file (INI or JSON) or preset name")->required();
    sim->add_option("--out", out, "Output directory");
    auto* sim_seed = sim->add_option("--seed", seed, "Override [simulation] seed");
    sim->add_option("--set", sets, "Override a key: section.key=value (repeatable)");

    auto* sw = app.add_subcommand("sweep", "Run a parameter grid; writes sweep.csv");
    std::vector<std::string> axes;
    bool per_cell = false;
    sw->add_option("scenario", scenario, "Base scenario file or preset name")->required();
    sw->add_option("--axis", axes, "Grid axis: section.key=v1,v2,... or section.key=lo:hi[:step] (repeatable)");
    sw->add_option("--out", out, "Output directory");
    sw->add_option("--workers", workers, "Worker threads (0 = all cores)");
    auto* sw_seed = sw->add_option("--seed", seed, "Override [simulation] seed");
    sw->add_flag("--per-cell-seeds", per_cell, "Derive a distinct seed for every cell");

    auto* ros = app.add_subcommand("ros", "Stability boundary eta_bar(h) for one attack family; writes ros.csv");
    std::string family = "delay";
    double rho = 1.0, gamma = 1.0, epsilon = -0.8, h_min = 0.01, h_max = 100.0, tol = 1e-5;
    int tau = 1, points = 41, scan = 200;
    bool linear = false;
    ros->add_option("--family", family, "scaling, delay or scaled-delay")->capture_default_str();
    ros->add_option("--rho", rho, "Compromised fraction")->capture_default_str();
    ros->add_option("--tau", tau, "Delay in periods")->capture_default_str();
    ros->add_option("--gamma", gamma, "Scaling factor")->capture_default_str();
    ros->add_option("--epsilon", epsilon, "CEO elasticity used for mu")->capture_default_str();
    ros->add_option("--h-min", h_min)->capture_default_str();
    ros->add_option("--h-max", h_max)->capture_default_str();
    ros->add_option("--points", points, "Number of h samples")->capture_default_str();
    ros->add_flag("--linear", linear, "Linear h spacing (default logarithmic)");
    ros->add_option("--scan", scan, "eta pre-scan points")->capture_default_str();
    ros->add_option("--tol", tol, "Bisection tolerance on eta")->capture_default_str();
    ros->add_option("--workers", workers, "Worker threads (0 = all cores)");
    ros->add_option("--out", out, "Output directory");

    auto* rl = app.add_subcommand("ros-limit", "Uniform ROS limits; writes ros_limit.csv");
    std::string rho_list = "1", tau_list = "1", gamma_list = "0.5";
    rl->add_option("--family", family, "scaling or delay")->capture_default_str();
    rl->add_option("--rho", rho_list, "List or range of rho")->capture_default_str();
    rl->add_option("--tau", tau_list, "List or range of tau (delay)")->capture_default_str();
    rl->add_option("--gamma", gamma_list, "List or range of gamma (scaling)")->capture_default_str();
    rl->add_option("--epsilon", epsilon, "CEO elasticity (scaling)")->capture_default_str();
    rl->add_flag("--validate", validate, "Cross-check every limit against the Jury test at h=1e10");
    rl->add_option("--out", out, "Output directory");

    auto* jury = app.add_subcommand("jury", "Jury test on a polynomial (descending coefficients)");
    std::string coeffs;
    jury->add_option("coefficients", coeffs, "Comma-separated, highest power first")->required();

    auto* fit = app.add_subcommand("fit-supply", "Least-squares linear supply fit to price,supply CSV");
    std::string csv;
    std::vector<std::string> scale;
    fit->add_option("csv", csv, "CSV with a header and price,supply rows")->required();
    fit->add_option("--scale", scale, "houses=N share=S population=P")->expected(3);

    auto* map = app.add_subcommand("stability-map", "Convergence-probability map over (epsilon, lambda*)");
    double p = 152, q = 4503, b = 0, eta = 0.5;
    std::string eps_spec = "-0.9:-0.1:0.1", lstar_spec = "2:100:2", mode = "direct_feedback";
    int prices = 100, periods = 2000;
    map->add_option("--p", p)->capture_default_str();
    map->add_option("--q", q)->capture_default_str();
    map->add_option("--b", b, "Baseline demand")->capture_default_str();
    map->add_option("--epsilon", eps_spec, "List or range")->capture_default_str();
    map->add_option("--lambda-star", lstar_spec, "List or range")->capture_default_str();
    map->add_option("--mode", mode, "direct_feedback, adaptive or fixed")->capture_default_str();
    map->add_option("--eta", eta)->capture_default_str();
    map->add_option("--prices", prices, "Initial prices per cell")->capture_default_str();
    map->add_option("--periods", periods, "Periods per run")->capture_default_str();
    map->add_option("--workers", workers, "Worker threads (0 = all cores)");
    map->add_option("--out", out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (*sim) return cmd_simulate(scenario, out, sets, seed, sim_seed->count() > 0);
        if (*sw) return cmd_sweep(scenario, axes, out, workers, per_cell, seed, sw_seed->count() > 0);
        if (*ros)
            return cmd_ros(family, rho, tau, gamma, epsilon, h_min, h_max, points, linear, scan, tol, workers, out);
        if (*rl) return cmd_ros_limit(family, rho_list, tau_list, gamma_list, epsilon, validate, out);
        if (*jury) return cmd_jury(coeffs);
        if (*fit) return cmd_fit_supply(csv, scale);
        if (*map) return cmd_stability_map(p, q, b, eps_spec, lstar_spec, mode, prices, periods, eta, workers, out);
    } catch (const rtp::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}
