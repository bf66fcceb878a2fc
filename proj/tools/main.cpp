// Command-line front end: tableau dumps, simulations, convergence and
// symplecticity studies with machine-readable CSV/JSON output.

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "svi/svi.hpp"

namespace {

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw CLI::ValidationError(flag, "'" + item + "' is not a number");
        }
    }
    if (out.empty()) throw CLI::ValidationError(flag, "empty list");
    return out;
}

struct output_target {
    std::string path;  // empty: stdout

    void write(const std::string& text) const {
        if (path.empty()) {
            std::cout << text;
            return;
        }
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open output file " + path);
        f << text;
    }
};

struct problem_options {
    std::string method = "sprk";
    std::string kind = "gauss-legendre";
    std::size_t s = 2;
    std::string system;
    std::string params;
    std::string q_text, p_text;
    double tol = 1e-12;
    int max_iter = 50;

    svi::lagrangian_system make_sys() const {
        const std::vector<double> ps =
            params.empty() ? std::vector<double>{} : parse_list(params, "--params");
        return svi::make_system(system, ps);
    }

    svi::phase_state make_state(const svi::lagrangian_system& sys) const {
        svi::phase_state z{parse_list(q_text, "--q"), parse_list(p_text, "--p")};
        if (z.q.size() != sys.n || z.p.size() != sys.n)
            throw CLI::ValidationError("--q/--p", "expected " + std::to_string(sys.n) +
                                                      " components for " + sys.name);
        return z;
    }

    svi::solver_config config() const {
        svi::solver_config cfg;
        cfg.tol = tol;
        cfg.max_iter = max_iter;
        return cfg;
    }

    svi::method make_method(double h) const {
        return svi::make_method(svi::scheme_from_string(method),
                                svi::quadrature_from_string(kind), s, h);
    }
};

void add_problem_flags(CLI::App* cmd, problem_options& opt, bool with_method = true) {
    if (with_method)
        cmd->add_option("--method", opt.method, "integrator family: sprk | sg");
    cmd->add_option("--kind", opt.kind,
                    "quadrature family: gauss-legendre | gauss-lobatto | radau-iia | chebyshev");
    cmd->add_option("-s,--stages", opt.s, "stage count")->required();
    cmd->add_option("--tol", opt.tol, "stage solver residual tolerance");
    cmd->add_option("--max-iter", opt.max_iter, "stage solver iteration budget");
}

void add_state_flags(CLI::App* cmd, problem_options& opt) {
    cmd->add_option("--system", opt.system, "system name")->required();
    cmd->add_option("--params", opt.params, "comma-separated system parameters");
    cmd->add_option("--q", opt.q_text, "initial configuration, comma-separated")->required();
    cmd->add_option("--p", opt.p_text, "initial momentum, comma-separated")->required();
}

std::string simulate_csv(const svi::lagrangian_system& sys, const svi::trajectory& traj) {
    std::string out = "t";
    for (std::size_t d = 0; d < sys.n; ++d) out += ",q" + std::to_string(d);
    for (std::size_t d = 0; d < sys.n; ++d) out += ",p" + std::to_string(d);
    out += ",energy,newton_iters,residual\n";
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        out += svi::format_double(traj.times[k]);
        for (double v : traj.states[k].q) out += "," + svi::format_double(v);
        for (double v : traj.states[k].p) out += "," + svi::format_double(v);
        out += "," + svi::format_double(traj.energies[k]);
        if (k == 0) {
            out += ",0,0\n";
        } else {
            const svi::solve_report& rep = traj.reports[k - 1];
            out += "," + std::to_string(rep.iterations) + "," +
                   svi::format_double(rep.final_residual) + "\n";
        }
    }
    return out;
}

nlohmann::json simulate_json(const svi::lagrangian_system& sys, const svi::trajectory& traj) {
    nlohmann::json j;
    j["t"] = traj.times;
    auto components = [&](auto member) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& z : traj.states) rows.push_back(z.*member);
        return rows;
    };
    j["q"] = components(&svi::phase_state::q);
    j["p"] = components(&svi::phase_state::p);
    j["energy"] = traj.energies;
    nlohmann::json iters = nlohmann::json::array(), resid = nlohmann::json::array();
    for (const auto& rep : traj.reports) {
        iters.push_back(rep.iterations);
        resid.push_back(rep.final_residual);
    }
    j["newton_iters"] = std::move(iters);
    j["residual"] = std::move(resid);
    if (!traj.completed()) {
        j["failed_step"] = *traj.failed_step;
        j["failure_reason"] = traj.failure_reason;
    }
    (void)sys;
    return j;
}

int run_simulate(const problem_options& opt, double h, std::size_t steps,
                 const std::string& format, const output_target& out) {
    const svi::lagrangian_system sys = opt.make_sys();
    const svi::phase_state z0 = opt.make_state(sys);
    const svi::trajectory traj = svi::integrate(sys, opt.make_method(h), z0, steps, opt.config());
    if (format == "csv")
        out.write(simulate_csv(sys, traj));
    else
        out.write(simulate_json(sys, traj).dump(2) + "\n");
    if (!traj.completed()) {
        std::cerr << "solver failure at step " << *traj.failed_step << ": "
                  << traj.failure_reason << "\n";
        return 1;
    }
    return 0;
}

int run_converge(const problem_options& opt, double T, const std::string& h_list,
                 const std::string& format, const output_target& out) {
    const svi::lagrangian_system sys = opt.make_sys();
    const svi::phase_state z0 = opt.make_state(sys);
    const std::vector<double> hs = parse_list(h_list, "--h-list");
    const svi::convergence_study study = svi::convergence_order(
        sys, svi::scheme_from_string(opt.method), svi::quadrature_from_string(opt.kind), opt.s,
        z0, T, hs, opt.config());
    if (format == "csv") {
        std::string text = "h,error\n";
        for (std::size_t k = 0; k < study.h_values.size(); ++k)
            text += svi::format_double(study.h_values[k]) + "," +
                    svi::format_double(study.errors[k]) + "\n";
        text += "# slope=" + svi::format_double(study.slope) + "\n";
        out.write(text);
    } else {
        nlohmann::json j;
        j["h"] = study.h_values;
        j["error"] = study.errors;
        j["slope"] = study.slope;
        j["pairwise_orders"] = study.pairwise_orders;
        j["points_used"] = study.points_used;
        out.write(j.dump(2) + "\n");
    }
    return 0;
}

int run_check_symplectic(const problem_options& opt, double h, double fd_step,
                         const output_target& out) {
    const svi::lagrangian_system sys = opt.make_sys();
    const svi::phase_state z0 = opt.make_state(sys);
    const svi::symplecticity_report rep =
        svi::symplecticity_defect(sys, opt.make_method(h), z0, fd_step);
    nlohmann::json j;
    j["defect"] = rep.defect;
    j["fd_step"] = rep.fd_step;
    j["h"] = rep.h;
    out.write(j.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"symplectic variational integrators"};
    app.require_subcommand(1);
    // --h is the step size, so help keeps only its long spelling
    app.set_help_flag("--help", "print help and exit");

    problem_options opt;
    output_target out;
    std::string format = "csv";
    double h = 0.1, T = 1.0, fd_step = 1e-5;
    std::size_t steps = 100;
    std::string h_list;

    CLI::App* tab = app.add_subcommand("tableau", "dump the coefficient tables as JSON");
    tab->set_help_flag("--help", "print help and exit");
    add_problem_flags(tab, opt, /*with_method=*/false);
    tab->add_option("--format", format, "json");
    tab->add_option("--output", out.path, "output path (default stdout)");

    CLI::App* sim = app.add_subcommand("simulate", "integrate a trajectory");
    sim->set_help_flag("--help", "print help and exit");
    add_problem_flags(sim, opt);
    add_state_flags(sim, opt);
    sim->add_option("--h", h, "step size")->required();
    sim->add_option("--steps", steps, "number of steps")->required();
    sim->add_option("--format", format, "csv | json");
    sim->add_option("--output", out.path, "output path (default stdout)");

    CLI::App* conv = app.add_subcommand("converge", "step-size refinement study");
    conv->set_help_flag("--help", "print help and exit");
    add_problem_flags(conv, opt);
    add_state_flags(conv, opt);
    conv->add_option("-T,--time", T, "final time")->required();
    conv->add_option("--h-list", h_list, "comma-separated step sizes")->required();
    conv->add_option("--format", format, "csv | json");
    conv->add_option("--output", out.path, "output path (default stdout)");

    CLI::App* sym = app.add_subcommand("check-symplectic", "one-step symplecticity defect");
    sym->set_help_flag("--help", "print help and exit");
    add_problem_flags(sym, opt);
    add_state_flags(sym, opt);
    sym->add_option("--h", h, "step size")->required();
    sym->add_option("--fd-step", fd_step, "central-difference step for the map jacobian");
    sym->add_option("--output", out.path, "output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (tab->parsed()) {
            if (format != "csv" && format != "json") {
                std::cerr << "--format must be csv or json\n";
                return 2;
            }
            if (tab->count("--format") && format == "csv") {
                std::cerr << "tableau output is json only; pass --format json\n";
                return 2;
            }
            const svi::tableau t =
                svi::make_tableau(svi::quadrature_from_string(opt.kind), opt.s);
            out.write(svi::tableau_to_json(t).dump(2) + "\n");
            return 0;
        }
        if (format != "csv" && format != "json") {
            std::cerr << "--format must be csv or json\n";
            return 2;
        }
        if (sim->parsed()) return run_simulate(opt, h, steps, format, out);
        if (conv->parsed()) return run_converge(opt, T, h_list, format, out);
        if (sym->parsed()) return run_check_symplectic(opt, h, fd_step, out);
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        // zero weights / degenerate endpoints: the family/s combination is unusable
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    return 2;
}
