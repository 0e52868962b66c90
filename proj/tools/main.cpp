// selftrap: command-line front end for the two-mode self-trapping cooling model.
//
// Exit codes: 0 success, 2 invalid parameters, 3 solver failure, 4 fit rejection.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "selftrap/selftrap.hpp"

using json = nlohmann::json;
using namespace selftrap;

namespace {

struct GlobalOpts {
    std::string config_path;
    bool scaled = false;
    std::optional<double> eps2, delta1, delta2, kappa_a, drive_ratio, phase;
    std::string out_path;
    int threads = 1;
    std::string format = "csv";
};

ScaledParams resolve_params(const GlobalOpts& g) {
    ScaledParams p;
    bool have_any = false;
    if (!g.config_path.empty()) {
        std::ifstream in(g.config_path);
        if (!in) throw InvalidParameterError("cannot open config file: " + g.config_path);
        p = scaled_from_config(parse_config(in), g.scaled);
        have_any = true;
    }
    if (g.eps2) { p.eps2 = *g.eps2; have_any = true; }
    if (g.delta1) { p.delta1 = *g.delta1; have_any = true; }
    if (g.delta2) { p.delta2 = *g.delta2; have_any = true; }
    if (g.kappa_a) { p.kappaA = *g.kappa_a; have_any = true; }
    if (g.drive_ratio) { p.drive_ratio = *g.drive_ratio; have_any = true; }
    if (g.phase) { p.phase = *g.phase; have_any = true; }
    if (!have_any)
        throw InvalidParameterError("no parameters: pass --config or scaled flags (--eps2 ...)");
    p.validate();
    return p;
}

// stdout unless --out was given
class Output {
  public:
    explicit Output(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_.open(path);
            if (!file_) throw InvalidParameterError("cannot open output file: " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

  private:
    std::ofstream file_;
};

void emit(const GlobalOpts& g, const json& obj, const std::string& text) {
    Output out(g.out_path);
    if (g.format == "json")
        out.stream() << obj.dump(2) << '\n';
    else
        out.stream() << text;
}

std::string kv(const std::string& key, double value) { return key + " = " + fmt(value) + "\n"; }

json equilibrium_json(const Equilibrium& eq) {
    return json{{"x0", eq.x0},
                {"alpha1_re", eq.alpha1.real()},
                {"alpha1_im", eq.alpha1.imag()},
                {"alpha2_re", eq.alpha2.real()},
                {"alpha2_im", eq.alpha2.imag()},
                {"d1x", eq.d1x},
                {"d2x", eq.d2x},
                {"residual", eq.residual}};
}

std::string equilibrium_text(const Equilibrium& eq) {
    std::string s;
    s += kv("x0", eq.x0);
    s += kv("alpha1_re", eq.alpha1.real());
    s += kv("alpha1_im", eq.alpha1.imag());
    s += kv("alpha2_re", eq.alpha2.real());
    s += kv("alpha2_im", eq.alpha2.imag());
    s += kv("d1x", eq.d1x);
    s += kv("d2x", eq.d2x);
    s += kv("residual", eq.residual);
    return s;
}

int run_equilibrium(const GlobalOpts& g) {
    const ScaledParams p = resolve_params(g);
    const auto roots = find_equilibria(p);
    if (roots.empty()) throw NoEquilibriumError("no equilibrium in the search interval");
    const Equilibrium& eq = roots.front();
    const double w2 = mechanical_frequency_sq(eq, p);

    json obj = equilibrium_json(eq);
    obj["omega_m2"] = w2;
    obj["stable"] = w2 > 0.0;
    obj["n_roots"] = roots.size();
    if (w2 > 0.0) obj["omega_m"] = std::sqrt(w2);
    std::string text = equilibrium_text(eq);
    text += kv("omega_m2", w2);
    if (w2 > 0.0) text += kv("omega_m", std::sqrt(w2));
    text += "stable = " + std::string(w2 > 0.0 ? "1" : "0") + "\n";
    text += "n_roots = " + std::to_string(roots.size()) + "\n";
    if (roots.size() > 1) {
        json others = json::array();
        for (std::size_t i = 1; i < roots.size(); ++i) {
            others.push_back(equilibrium_json(roots[i]));
            text += kv("root" + std::to_string(i + 1) + "_x0", roots[i].x0);
        }
        obj["other_roots"] = others;
    }
    emit(g, obj, text);
    return 0;
}

int run_rates(const GlobalOpts& g) {
    const ScaledParams p = resolve_params(g);
    const Equilibrium eq = solve_equilibrium_deepest(p);
    const CoolingReport rep = cooling_rate(eq, p);
    const PhononRates ph = phonon_rates(eq, p);

    json obj = equilibrium_json(eq);
    obj["omega_m"] = rep.omega_m;
    obj["omega_m2"] = rep.omega_m2;
    obj["s1_plus"] = rep.s1_plus;
    obj["s1_minus"] = rep.s1_minus;
    obj["s2_plus"] = rep.s2_plus;
    obj["s2_minus"] = rep.s2_minus;
    obj["gamma"] = rep.gamma;
    obj["gamma_field1"] = rep.gamma_field1;
    obj["gamma_field2"] = rep.gamma_field2;
    obj["up_coeff"] = ph.up_coeff;
    obj["down_coeff"] = ph.down_coeff;
    if (rep.nmin) obj["nmin"] = *rep.nmin;

    std::string text = equilibrium_text(eq);
    text += kv("omega_m", rep.omega_m);
    text += kv("omega_m2", rep.omega_m2);
    text += kv("s1_plus", rep.s1_plus);
    text += kv("s1_minus", rep.s1_minus);
    text += kv("s2_plus", rep.s2_plus);
    text += kv("s2_minus", rep.s2_minus);
    text += kv("gamma", rep.gamma);
    text += kv("gamma_field1", rep.gamma_field1);
    text += kv("gamma_field2", rep.gamma_field2);
    text += kv("up_coeff", ph.up_coeff);
    text += kv("down_coeff", ph.down_coeff);
    if (rep.nmin) text += kv("nmin", *rep.nmin);
    emit(g, obj, text);
    return 0;
}

json sweep_json(const SweepGrid& grid) {
    json rows = json::array();
    for (int i1 = 0; i1 < grid.n1; ++i1)
        for (int i2 = 0; i2 < grid.n2; ++i2) {
            const std::size_t k = grid.idx(i1, i2);
            json row{{"delta1", grid.delta1_axis[i1]},
                     {"delta2", grid.delta2_axis[i2]},
                     {"stable", grid.stable[k] != 0}};
            if (grid.stable[k]) {
                row["d1x"] = grid.d1x[k];
                row["d2x"] = grid.d2x[k];
                row["x0"] = grid.x0[k];
                row["omegaM"] = grid.omega_m[k];
                row["gamma"] = grid.gamma[k];
                if (std::isfinite(grid.nmin[k])) row["nmin"] = grid.nmin[k];
            }
            rows.push_back(std::move(row));
        }
    return rows;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-mode self-trapping optomechanical cooling toolkit"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.config_path, "key = value parameter file");
    app.add_flag("--scaled", g.scaled, "interpret the config as scaled parameters");
    auto opt_d = [&](const char* name, std::optional<double>& slot, const char* help) {
        app.add_option_function<double>(name, [&slot](double v) { slot = v; }, help);
    };
    opt_d("--eps2", g.eps2, "scaled drive epsilon^2");
    opt_d("--delta1", g.delta1, "Delta_1 (units of A)");
    opt_d("--delta2", g.delta2, "Delta_2 (units of A)");
    opt_d("--kappa-a", g.kappa_a, "kappa_A = (kappa/2)/A");
    opt_d("--drive-ratio", g.drive_ratio, "drive amplitude ratio R");
    opt_d("--phase", g.phase, "mode dephasing phi (rad)");
    app.add_option("--out", g.out_path, "output path (default stdout)");
    app.add_option("--threads", g.threads, "worker threads for sweeps");
    app.add_option("--format", g.format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));

    auto* cmd_eq = app.add_subcommand("equilibrium", "solve the self-consistent steady state");
    auto* cmd_rates = app.add_subcommand("rates", "cooling rate and phonon occupancy at one point");

    auto* cmd_sweep = app.add_subcommand("sweep", "detuning-map sweep");
    double d1_min = -6.0, d1_max = 0.5, d2_min = -6.0, d2_max = 0.5;
    int n1 = 100, n2 = 100;
    cmd_sweep->add_option("--d1-min", d1_min);
    cmd_sweep->add_option("--d1-max", d1_max);
    cmd_sweep->add_option("--d2-min", d2_min);
    cmd_sweep->add_option("--d2-max", d2_max);
    cmd_sweep->add_option("--n1", n1, "grid points along Delta_1");
    cmd_sweep->add_option("--n2", n2, "grid points along Delta_2");

    auto* cmd_loci = app.add_subcommand("loci", "resonance loci over a detuning window");
    cmd_loci->add_option("--d1-min", d1_min);
    cmd_loci->add_option("--d1-max", d1_max);
    cmd_loci->add_option("--d2-min", d2_min);
    cmd_loci->add_option("--d2-max", d2_max);
    cmd_loci->add_option("--n1", n1);
    cmd_loci->add_option("--n2", n2);

    auto* cmd_sim = app.add_subcommand("simulate", "nonlinear trajectory and decay-rate fit");
    double t_end = 0.0, dx = 0.01, rtol = 1e-9, atol = 1e-12, fixed_h = 0.0;
    int stride = 1;
    bool no_fit = false;
    cmd_sim->add_option("--t-end", t_end, "integration time (0: auto from predicted rate)");
    cmd_sim->add_option("--dx", dx, "initial displacement from equilibrium");
    cmd_sim->add_option("--rtol", rtol);
    cmd_sim->add_option("--atol", atol);
    cmd_sim->add_option("--fixed-h", fixed_h, "use fixed-step RK4 with this step");
    cmd_sim->add_option("--stride", stride, "record every n-th step");
    cmd_sim->add_flag("--no-fit", no_fit, "write the trajectory only");

    auto* cmd_power = app.add_subcommand("power-scan", "SR/DR rates vs drive strength");
    double e2_min = 1.0, e2_max = 100.0;
    int np = 20;
    bool linear_spacing = false;
    cmd_power->add_option("--eps2-min", e2_min);
    cmd_power->add_option("--eps2-max", e2_max);
    cmd_power->add_option("--n", np);
    cmd_power->add_flag("--linear", linear_spacing, "linear instead of log spacing");

    auto* cmd_phase = app.add_subcommand("phase-sweep", "Gamma vs mode dephasing phi");
    double phi_min = 0.7 * constants::pi / 4, phi_max = 1.3 * constants::pi / 4;
    int nphi = 25;
    cmd_phase->add_option("--phi-min", phi_min);
    cmd_phase->add_option("--phi-max", phi_max);
    cmd_phase->add_option("--n", nphi);

    auto* cmd_find = app.add_subcommand("find-dr", "resonant operating-point finders");
    std::string kind = "dr-numeric";
    cmd_find->add_option("--kind", kind, "sr|dr|dr-numeric|symmetric")
        ->check(CLI::IsMember({"sr", "dr", "dr-numeric", "symmetric"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cmd_eq->parsed()) return run_equilibrium(g);
        if (cmd_rates->parsed()) return run_rates(g);

        if (cmd_sweep->parsed()) {
            const ScaledParams p = resolve_params(g);
            const SweepGrid grid =
                sweep_map(p, {d1_min, d1_max}, {d2_min, d2_max}, {n1, n2}, g.threads);
            Output out(g.out_path);
            if (g.format == "json")
                out.stream() << sweep_json(grid).dump(2) << '\n';
            else
                write_sweep_csv(out.stream(), grid);
            return 0;
        }

        if (cmd_loci->parsed()) {
            const ScaledParams p = resolve_params(g);
            const auto loci =
                resonance_loci(p, {d1_min, d1_max}, {d2_min, d2_max}, {n1, n2}, g.threads);
            Output out(g.out_path);
            if (g.format == "json") {
                json arr = json::array();
                for (const auto& locus : loci) {
                    json pts = json::array();
                    for (auto& [a, b] : locus.points) pts.push_back({a, b});
                    arr.push_back({{"kind", to_string(locus.kind)}, {"points", pts}});
                }
                out.stream() << arr.dump(2) << '\n';
            } else {
                write_loci_csv(out.stream(), loci);
            }
            return 0;
        }

        if (cmd_sim->parsed()) {
            const ScaledParams p = resolve_params(g);
            StepControl ctrl;
            if (fixed_h > 0.0) ctrl = StepControl::fixed_step(fixed_h, stride);
            ctrl.rtol = rtol;
            ctrl.atol = atol;
            ctrl.stride = stride;

            Trajectory traj;
            Equilibrium eq;
            double w2 = 0.0;
            std::optional<RateFit> fit;
            double gamma_linear = 0.0;
            if (t_end > 0.0) {
                eq = solve_equilibrium_deepest(p);
                w2 = mechanical_frequency_sq(eq, p);
                SimState init = equilibrium_state(eq);
                init.x += dx;
                traj = integrate(init, p, t_end, ctrl);
                if (w2 > 0.0) attach_energy(traj, eq.x0, w2);
                if (!no_fit) {
                    gamma_linear = cooling_rate(eq, p).gamma;
                    FitOptions fopt;
                    fopt.transient = 10.0 / p.kappaA;
                    fit = extract_rate(traj, eq.x0, w2, fopt);
                }
            } else {
                MeasureOptions mo;
                mo.dx = dx;
                mo.ctrl = ctrl;
                RateMeasurement m = measure_cooling_rate(p, mo);
                traj = std::move(m.trajectory);
                eq = m.eq;
                w2 = m.omega_m2;
                fit = m.fit;
                gamma_linear = m.gamma_linear;
            }

            Output out(g.out_path);
            write_trajectory_csv(out.stream(), traj);
            if (fit) {
                std::ostream& rep = g.out_path.empty() ? std::cerr : std::cout;
                if (g.format == "json") {
                    json obj{{"gamma_num", fit->gamma_num},
                             {"r_squared", fit->r_squared},
                             {"window", {fit->window.first, fit->window.second}},
                             {"truncated", fit->truncated},
                             {"gamma_linear", gamma_linear}};
                    rep << obj.dump(2) << '\n';
                } else {
                    rep << kv("gamma_num", fit->gamma_num) << kv("r_squared", fit->r_squared)
                        << kv("window_start", fit->window.first)
                        << kv("window_end", fit->window.second)
                        << kv("gamma_linear", gamma_linear)
                        << "truncated = " << (fit->truncated ? "1" : "0") << '\n';
                }
            }
            return 0;
        }

        if (cmd_power->parsed()) {
            const ScaledParams p = resolve_params(g);
            const auto pts = power_scan(p, e2_min, e2_max, np, !linear_spacing);
            Output out(g.out_path);
            if (g.format == "json") {
                json arr = json::array();
                for (const auto& pt : pts)
                    arr.push_back({{"eps2", pt.eps2},
                                   {"gamma_sr", pt.gamma_sr_full},
                                   {"gamma_dr", pt.gamma_dr_full},
                                   {"omegaM_over_kappaA", pt.omega_over_kappa},
                                   {"sr_ok", pt.sr_ok},
                                   {"dr_ok", pt.dr_ok}});
                out.stream() << arr.dump(2) << '\n';
            } else {
                write_power_csv(out.stream(), pts);
            }
            return 0;
        }

        if (cmd_phase->parsed()) {
            const ScaledParams p = resolve_params(g);
            const auto pts = phase_sweep(p, phi_min, phi_max, nphi);
            Output out(g.out_path);
            if (g.format == "json") {
                json arr = json::array();
                for (const auto& pt : pts)
                    arr.push_back({{"phi", pt.phi}, {"gamma", pt.gamma}, {"ok", pt.ok}});
                out.stream() << arr.dump(2) << '\n';
            } else {
                write_phase_csv(out.stream(), pts);
            }
            return 0;
        }

        if (cmd_find->parsed()) {
            const ScaledParams p = resolve_params(g);
            const double eps = p.eps();
            ResonancePoint rp;
            if (kind == "sr") {
                rp = sr_detunings(eps, p.kappaA, p.drive_ratio);
            } else if (kind == "dr") {
                if (p.drive_ratio > 0.7)
                    std::cerr << "warning: small-angle DR finder is unreliable for R > 0.7; "
                                 "consider --kind dr-numeric\n";
                rp = dr_detunings(eps, p.kappaA, p.drive_ratio);
            } else if (kind == "dr-numeric") {
                rp = dr_detunings_numeric(eps, p.kappaA, p.drive_ratio);
            } else {
                const auto [w, gamma_opt] = symmetric_dr(eps, p.kappaA);
                rp.omega_m = w;
                rp.gamma_predicted = gamma_opt;
                const double off = 0.5 * (1.0 + std::cos(constants::pi / 4));
                rp.delta1 = -w - off;
                rp.delta2 = -w - off;
                rp.kind = ResonanceKind::dr_symmetric;
            }
            json obj{{"kind", to_string(rp.kind)},
                     {"delta1", rp.delta1},
                     {"delta2", rp.delta2},
                     {"omega_m", rp.omega_m},
                     {"gamma_predicted", rp.gamma_predicted}};
            std::string text;
            text += "kind = " + std::string(to_string(rp.kind)) + "\n";
            text += kv("delta1", rp.delta1);
            text += kv("delta2", rp.delta2);
            text += kv("omega_m", rp.omega_m);
            text += kv("gamma_predicted", rp.gamma_predicted);
            emit(g, obj, text);
            return 0;
        }
    } catch (const InvalidParameterError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const FitRejectedError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const SolverError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
