// Command-line front end: stability analysis and simulation of two-population
// rate models with distributed delays.
//
// Exit codes: 0 success, 2 usage/config error, 3 solver non-convergence,
// 4 kernel domain error.

#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wcdd/wcdd.hpp"

namespace {

using nlohmann::json;

struct Config {
    wcdd::ModelParams model;
    wcdd::Activation activation;
    json raw;
};

const std::set<std::string> kConfigKeys = {
    "a", "b", "c", "d", "theta_u", "theta_v", "delta",
    "kernel", "tau", "grid_n", "arc_tol", "tau_max", "alpha", "beta",
    "dt", "t_end", "record_stride", "perturbation", "method", "equilibrium_index",
    "quadrature_cutoff", "alpha_min", "alpha_max", "beta_min", "beta_max",
    "res_alpha", "res_beta"};

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config " + path + ": " + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config " + path + ": top level must be an object");
    for (const auto& [key, _] : j.items())
        if (!kConfigKeys.count(key))
            throw std::invalid_argument("config " + path + ": unknown key \"" + key + "\"");
    Config cfg;
    cfg.raw = j;
    for (const char* key : {"a", "b", "c", "d", "theta_u", "theta_v", "delta"})
        if (!j.contains(key) || !j[key].is_number())
            throw std::invalid_argument("config " + path + ": missing numeric key \"" +
                                        std::string(key) + "\"");
    cfg.model.a = j["a"].get<double>();
    cfg.model.b = j["b"].get<double>();
    cfg.model.c = j["c"].get<double>();
    cfg.model.d = j["d"].get<double>();
    cfg.model.theta_u = j["theta_u"].get<double>();
    cfg.model.theta_v = j["theta_v"].get<double>();
    cfg.activation.delta = j["delta"].get<double>();
    if (!(cfg.activation.delta > 0.0))
        throw std::invalid_argument("config " + path + ": delta must be > 0");
    return cfg;
}

wcdd::AnalysisOptions apply_tol_overrides(wcdd::AnalysisOptions opts,
                                          const std::vector<std::string>& overrides) {
    for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--tol-override expects key=value, got \"" + kv + "\"");
        const std::string key = kv.substr(0, eq);
        double value = 0.0;
        try {
            std::size_t used = 0;
            value = std::stod(kv.substr(eq + 1), &used);
            if (used != kv.size() - eq - 1) throw std::invalid_argument("trailing junk");
        } catch (const std::exception&) {
            throw std::invalid_argument("--tol-override " + key + ": bad numeric value");
        }
        if (key == "marginal_band") opts.marginal_band = value;
        else if (key == "nondelayed_tol") opts.nondelayed_tol = value;
        else if (key == "saddle_node_tol") opts.saddle_node_tol = value;
        else if (key == "root_tol") opts.root_tol = value;
        else if (key == "theta_step") opts.theta_step = value;
        else if (key == "arc_tol") opts.arc_tol = value;
        else if (key == "clip_alpha") opts.clip_alpha = value;
        else if (key == "clip_beta") opts.clip_beta = value;
        else if (key == "critical_rel_tol") opts.critical_rel_tol = value;
        else if (key == "verify_offset") opts.verify_offset = value;
        else throw std::invalid_argument("--tol-override: unknown key \"" + key + "\"");
    }
    return opts;
}

// FILE.csv -> FILE.<tag>.json; anything else gets the suffix appended
std::string sibling_json_path(const std::string& base, const std::string& tag) {
    const std::string suffix = ".csv";
    if (base.size() > suffix.size() && base.compare(base.size() - suffix.size(), suffix.size(), suffix) == 0)
        return base.substr(0, base.size() - suffix.size()) + "." + tag + ".json";
    return base + "." + tag + ".json";
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output file: " + path);
    out << content;
}

struct Cli {
    std::string config_path;
    std::string output;
    std::string format = "csv";
    long seed = 0; // accepted for interface stability; nothing is stochastic
    std::vector<std::string> tol_overrides;

    Config cfg;
    wcdd::AnalysisOptions opts;

    template <class T>
    std::optional<T> cfg_get(const char* key) const {
        if (cfg.raw.contains(key)) return cfg.raw[key].get<T>();
        return std::nullopt;
    }

    wcdd::KernelSpec need_kernel(const std::string& flag_value) const {
        if (!flag_value.empty()) return wcdd::parse_kernel(flag_value);
        if (auto s = cfg_get<std::string>("kernel")) return wcdd::parse_kernel(*s);
        throw std::invalid_argument("kernel required: pass --kernel or set \"kernel\" in the config");
    }

    double need_tau(const CLI::Option* opt, double flag_value, bool allow_zero = false) const {
        double tau;
        if (opt->count() > 0) tau = flag_value;
        else if (auto t = cfg_get<double>("tau")) tau = *t;
        else throw std::invalid_argument("tau required: pass --tau or set \"tau\" in the config");
        if (tau < 0.0 || (!allow_zero && tau == 0.0))
            throw std::invalid_argument("tau must be " + std::string(allow_zero ? ">= 0" : "> 0"));
        return tau;
    }

    void emit(const std::string& content) const {
        if (output.empty()) std::cout << content;
        else write_file(output, content);
    }
};

int cmd_equilibria(const Cli& cli, int grid_n) {
    const auto res = wcdd::find_equilibria(cli.cfg.model, cli.cfg.activation, grid_n);
    if (res.equilibria.empty()) {
        std::cerr << "error: no equilibrium converged (" << res.failed_candidates
                  << " candidates failed)\n";
        return 3;
    }
    if (cli.format == "json") {
        cli.emit(wcdd::io::equilibria_json(res).dump(2) + "\n");
    } else {
        std::ostringstream os;
        wcdd::io::write_equilibria_csv(os, res);
        cli.emit(os.str());
    }
    return 0;
}

int cmd_boundary(const Cli& cli, const std::string& kernel_flag, const CLI::Option* tau_opt,
                 double tau_flag, const CLI::Option* arc_opt, double arc_flag) {
    const auto kernel = cli.need_kernel(kernel_flag);
    const double tau = cli.need_tau(tau_opt, tau_flag);
    wcdd::AnalysisOptions opts = cli.opts;
    if (arc_opt->count() > 0) opts.arc_tol = arc_flag;
    else if (auto a = cli.cfg_get<double>("arc_tol")) opts.arc_tol = *a;
    const auto boundary = wcdd::build_boundary(kernel, tau, opts);
    const std::string codim2 = wcdd::io::codim2_json(boundary).dump(2) + "\n";
    std::ostringstream os;
    wcdd::io::write_boundary_csv(os, boundary);
    if (!cli.output.empty()) {
        write_file(cli.output, os.str());
        write_file(sibling_json_path(cli.output, "codim2"), codim2);
        std::cout << codim2;
    } else if (cli.format == "json") {
        std::cout << codim2;
    } else {
        std::cout << os.str();
    }
    return 0;
}

int cmd_critical_tau(const Cli& cli, const std::string& kernel_flag, const CLI::Option* tau_max_opt,
                     double tau_max_flag, const CLI::Option* ab_opt[2], double alpha_flag,
                     double beta_flag) {
    const auto kernel = cli.need_kernel(kernel_flag);
    double tau_max = 50.0;
    if (tau_max_opt->count() > 0) tau_max = tau_max_flag;
    else if (auto t = cli.cfg_get<double>("tau_max")) tau_max = *t;

    double alpha, beta;
    const bool have_alpha = ab_opt[0]->count() > 0 || cli.cfg.raw.contains("alpha");
    const bool have_beta = ab_opt[1]->count() > 0 || cli.cfg.raw.contains("beta");
    if (have_alpha != have_beta)
        throw std::invalid_argument("alpha and beta must be given together");
    if (have_alpha) {
        alpha = ab_opt[0]->count() > 0 ? alpha_flag : cli.cfg.raw["alpha"].get<double>();
        beta = ab_opt[1]->count() > 0 ? beta_flag : cli.cfg.raw["beta"].get<double>();
    } else {
        const auto res = wcdd::find_equilibria(cli.cfg.model, cli.cfg.activation);
        if (res.equilibria.empty()) {
            std::cerr << "error: no equilibrium converged\n";
            return 3;
        }
        alpha = res.equilibria.front().alpha;
        beta = res.equilibria.front().beta;
    }
    const auto candidates = wcdd::critical_delay_candidates(kernel, alpha, beta, tau_max, cli.opts);
    const auto result = wcdd::critical_delay(kernel, alpha, beta, tau_max, cli.opts);
    cli.emit(wcdd::io::critical_delay_json(kernel, alpha, beta, tau_max, result, candidates).dump(2) +
             "\n");
    return 0;
}

int cmd_simulate(const Cli& cli, const std::string& kernel_flag, const CLI::Option* tau_opt,
                 double tau_flag, CLI::App* sub, double dt, double t_end, int stride,
                 double perturbation, std::string method, int eq_index) {
    const double tau = cli.need_tau(tau_opt, tau_flag, /*allow_zero=*/true);
    wcdd::SimConfig sim;
    if (sub->count("--dt") > 0) sim.dt = dt;
    else if (auto v = cli.cfg_get<double>("dt")) sim.dt = *v;
    if (sub->count("--t-end") > 0) sim.t_end = t_end;
    else if (auto v = cli.cfg_get<double>("t_end")) sim.t_end = *v;
    if (sub->count("--record-stride") > 0) sim.record_stride = stride;
    else if (auto v = cli.cfg_get<int>("record_stride")) sim.record_stride = *v;
    if (auto v = cli.cfg_get<double>("quadrature_cutoff")) sim.quadrature_cutoff_mass = *v;
    if (sub->count("--perturbation") == 0)
        if (auto v = cli.cfg_get<double>("perturbation")) perturbation = *v;
    if (sub->count("--method") == 0)
        if (auto v = cli.cfg_get<std::string>("method")) method = *v;
    if (sub->count("--equilibrium-index") == 0)
        if (auto v = cli.cfg_get<int>("equilibrium_index")) eq_index = *v;

    const auto eqs = wcdd::find_equilibria(cli.cfg.model, cli.cfg.activation);
    if (eqs.equilibria.empty()) {
        std::cerr << "error: no equilibrium converged\n";
        return 3;
    }
    if (eq_index < 0 || eq_index >= static_cast<int>(eqs.equilibria.size()))
        throw std::invalid_argument("equilibrium_index out of range (found " +
                                    std::to_string(eqs.equilibria.size()) + ")");
    const auto& eq = eqs.equilibria[eq_index];
    const double u0 = eq.u + perturbation;
    const double v0 = eq.v + perturbation;

    wcdd::Trajectory traj;
    if (tau == 0.0) {
        traj = wcdd::simulate_nondelayed(cli.cfg.model, cli.cfg.activation, u0, v0, sim);
    } else {
        const auto kernel = cli.need_kernel(kernel_flag);
        const auto history = wcdd::HistoryFunction::constant(u0, v0);
        if (method == "auto") {
            switch (kernel.family) {
                case wcdd::KernelFamily::Dirac: method = "steps"; break;
                case wcdd::KernelFamily::Gamma: method = "chain"; break;
                case wcdd::KernelFamily::Uniform: method = "quadrature"; break;
            }
        }
        if (method == "steps") {
            if (kernel.family != wcdd::KernelFamily::Dirac)
                throw std::invalid_argument("method \"steps\" requires the dirac kernel");
            traj = wcdd::simulate_dirac(cli.cfg.model, cli.cfg.activation, tau, history, sim);
        } else if (method == "chain") {
            if (kernel.family != wcdd::KernelFamily::Gamma)
                throw std::invalid_argument("method \"chain\" requires a gamma kernel");
            traj = wcdd::simulate_gamma_chain(cli.cfg.model, cli.cfg.activation, tau, kernel.order,
                                              history, sim);
        } else if (method == "quadrature") {
            traj = wcdd::simulate_quadrature(cli.cfg.model, cli.cfg.activation, kernel, tau, history,
                                             sim);
        } else {
            throw std::invalid_argument("unknown method \"" + method +
                                        "\" (expected auto|steps|chain|quadrature)");
        }
    }

    const auto report = wcdd::detect_behavior(traj, eq.u, eq.v);
    const std::string behavior = wcdd::io::behavior_json(report, eq.u, eq.v).dump(2) + "\n";
    std::ostringstream os;
    wcdd::io::write_trajectory_csv(os, traj);
    if (!cli.output.empty()) {
        write_file(cli.output, os.str());
        write_file(sibling_json_path(cli.output, "behavior"), behavior);
    } else {
        std::cout << os.str();
    }
    std::cout << behavior;
    return 0;
}

int cmd_scan(const Cli& cli, const std::string& kernel_flag, const CLI::Option* tau_opt,
             double tau_flag, CLI::App* sub, double a_lo, double a_hi, double b_lo, double b_hi,
             int res_a, int res_b) {
    const auto kernel = cli.need_kernel(kernel_flag);
    const double tau = cli.need_tau(tau_opt, tau_flag);
    auto pick_d = [&](const char* flag, const char* key, double& val) {
        if (sub->count(flag) > 0) return;
        if (auto v = cli.cfg_get<double>(key)) val = *v;
    };
    auto pick_i = [&](const char* flag, const char* key, int& val) {
        if (sub->count(flag) > 0) return;
        if (auto v = cli.cfg_get<int>(key)) val = *v;
    };
    pick_d("--alpha-min", "alpha_min", a_lo);
    pick_d("--alpha-max", "alpha_max", a_hi);
    pick_d("--beta-min", "beta_min", b_lo);
    pick_d("--beta-max", "beta_max", b_hi);
    pick_i("--res-alpha", "res_alpha", res_a);
    pick_i("--res-beta", "res_beta", res_b);
    if (cli.format == "json")
        throw std::invalid_argument("scan emits CSV only; drop --format json");
    const auto rs = wcdd::region_scan(kernel, tau, a_lo, a_hi, b_lo, b_hi, res_a, res_b, cli.opts);
    std::ostringstream os;
    wcdd::io::write_raster_csv(os, rs);
    cli.emit(os.str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"stability analysis and simulation of two-population rate models with distributed delays"};
    app.require_subcommand(1);

    Cli cli;
    app.add_option("--config", cli.config_path, "model configuration JSON")->required();
    app.add_option("--output", cli.output, "write the primary document here instead of stdout");
    app.add_option("--format", cli.format, "csv|json (default csv)")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--seed", cli.seed, "reserved; analysis is deterministic");
    app.add_option("--tol-override", cli.tol_overrides, "tolerance override key=value (repeatable)");

    auto* sub_eq = app.add_subcommand("equilibria", "locate steady states and their (alpha, beta)");
    int grid_n = 16;
    sub_eq->add_option("--grid-n", grid_n, "Newton multi-start grid size per axis");

    auto* sub_boundary = app.add_subcommand("boundary", "stability region outline and codimension-2 points");
    std::string bd_kernel;
    double bd_tau = 0.0, bd_arc = 0.0;
    sub_boundary->add_option("--kernel", bd_kernel, "dirac | gamma:p=<int> | uniform:eps=<real>");
    auto* bd_tau_opt = sub_boundary->add_option("--tau", bd_tau, "mean delay");
    auto* bd_arc_opt = sub_boundary->add_option("--arc-tol", bd_arc, "curve sampling flatness");

    auto* sub_crit = app.add_subcommand("critical-tau", "smallest destabilizing mean delay");
    std::string ct_kernel;
    double ct_tau_max = 50.0, ct_alpha = 0.0, ct_beta = 0.0;
    sub_crit->add_option("--kernel", ct_kernel, "dirac | gamma:p=<int> | uniform:eps=<real>");
    auto* ct_tau_max_opt = sub_crit->add_option("--tau-max", ct_tau_max, "search horizon");
    const CLI::Option* ct_ab[2];
    ct_ab[0] = sub_crit->add_option("--alpha", ct_alpha, "use this alpha instead of the model equilibrium");
    ct_ab[1] = sub_crit->add_option("--beta", ct_beta, "use this beta instead of the model equilibrium");

    auto* sub_sim = app.add_subcommand("simulate", "integrate the delayed system from a perturbed equilibrium");
    std::string sim_kernel, sim_method = "auto";
    double sim_tau = 0.0, sim_dt = 1e-3, sim_t_end = 50.0, sim_pert = 1e-3;
    int sim_stride = 1, sim_eq_index = 0;
    sub_sim->add_option("--kernel", sim_kernel, "dirac | gamma:p=<int> | uniform:eps=<real>");
    auto* sim_tau_opt = sub_sim->add_option("--tau", sim_tau, "mean delay (0 = no delay)");
    sub_sim->add_option("--dt", sim_dt, "time step");
    sub_sim->add_option("--t-end", sim_t_end, "integration horizon");
    sub_sim->add_option("--record-stride", sim_stride, "record every n-th step");
    sub_sim->add_option("--perturbation", sim_pert, "offset added to the equilibrium state");
    sub_sim->add_option("--method", sim_method, "auto|steps|chain|quadrature");
    sub_sim->add_option("--equilibrium-index", sim_eq_index, "which equilibrium to perturb");

    auto* sub_scan = app.add_subcommand("scan", "verdict raster over an (alpha, beta) window");
    std::string sc_kernel;
    double sc_tau = 0.0, sc_a_lo = -10.0, sc_a_hi = 3.0, sc_b_lo = -5.0, sc_b_hi = 10.0;
    int sc_res_a = 41, sc_res_b = 41;
    sub_scan->add_option("--kernel", sc_kernel, "dirac | gamma:p=<int> | uniform:eps=<real>");
    auto* sc_tau_opt = sub_scan->add_option("--tau", sc_tau, "mean delay");
    sub_scan->add_option("--alpha-min", sc_a_lo);
    sub_scan->add_option("--alpha-max", sc_a_hi);
    sub_scan->add_option("--beta-min", sc_b_lo);
    sub_scan->add_option("--beta-max", sc_b_hi);
    sub_scan->add_option("--res-alpha", sc_res_a);
    sub_scan->add_option("--res-beta", sc_res_b);

    // let global flags (--output, --format, ...) appear after the subcommand
    for (CLI::App* sc : {sub_eq, sub_boundary, sub_crit, sub_sim, sub_scan}) sc->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        cli.cfg = load_config(cli.config_path);
        cli.opts = apply_tol_overrides(wcdd::AnalysisOptions{}, cli.tol_overrides);
        if (sub_eq->parsed()) return cmd_equilibria(cli, grid_n);
        if (sub_boundary->parsed())
            return cmd_boundary(cli, bd_kernel, bd_tau_opt, bd_tau, bd_arc_opt, bd_arc);
        if (sub_crit->parsed())
            return cmd_critical_tau(cli, ct_kernel, ct_tau_max_opt, ct_tau_max, ct_ab, ct_alpha,
                                    ct_beta);
        if (sub_sim->parsed())
            return cmd_simulate(cli, sim_kernel, sim_tau_opt, sim_tau, sub_sim, sim_dt, sim_t_end,
                                sim_stride, sim_pert, sim_method, sim_eq_index);
        if (sub_scan->parsed())
            return cmd_scan(cli, sc_kernel, sc_tau_opt, sc_tau, sub_scan, sc_a_lo, sc_a_hi, sc_b_lo,
                            sc_b_hi, sc_res_a, sc_res_b);
        std::cerr << "error: no subcommand\n";
        return 2;
    } catch (const wcdd::kernel_domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const wcdd::convergence_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
