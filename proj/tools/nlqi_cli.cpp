// Command-line front end: coefficient spectra, zero crossings, effective
// Hamiltonian dumps, expansion verification, sensitivity curves, Monte Carlo
// estimation, and one-axis-twisting simulation. All outputs are plot-ready
// CSV/JSON; detuning flags are quoted relative to the F=1 -> F'=0 transition.

#include <CLI11.hpp>

#include <cstdint>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nlqi/nlqi.hpp"

using nlohmann::json;
using namespace nlqi;

namespace {

struct GlobalOptions {
    std::string constants_path;
    std::string klein_path;
    std::string output_path;
    std::uint64_t seed = 0;
};

AtomicConstants resolve_constants(const GlobalOptions& g) {
    return g.constants_path.empty() ? AtomicConstants::rb87_d2()
                                    : AtomicConstants::from_json_file(g.constants_path);
}

KleinTable resolve_table(const GlobalOptions& g) {
    return g.klein_path.empty() ? KleinTable::canonical()
                                : KleinTable::from_json_file(g.klein_path);
}

void emit(const GlobalOptions& g, const std::string& content) {
    if (g.output_path.empty())
        std::cout << content;
    else
        write_file_atomic(g.output_path, content);
}

json detuning_json(const DetuningSet& d) {
    return json{{"delta_MHz", d.delta},
                {"delta_Fprime_MHz", d.delta_Fprime},
                {"Delta_MHz", d.Delta}};
}

json field_json(const FieldConfig& f) {
    return json{{"g_plus", {f.g_plus.real(), f.g_plus.imag()}},
                {"g_minus", {f.g_minus.real(), f.g_minus.imag()}}};
}

json matrix_json(const Eigen::MatrixXcd& m) {
    json re = json::array(), im = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json re_row = json::array(), im_row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            re_row.push_back(m(r, c).real());
            im_row.push_back(m(r, c).imag());
        }
        re.push_back(re_row);
        im.push_back(im_row);
    }
    return json{{"re", re}, {"im", im}};
}

std::vector<double> log_spaced(double lo, double hi, int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i)
        out.push_back(lo * std::pow(hi / lo, n == 1 ? 0.0 : double(i) / (n - 1)));
    return out;
}

// exit codes: 0 success, 1 usage or domain error, 2 I/O error
int run_action(const std::function<int()>& action) {
    try {
        return action();
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonlinear atom-light interface toolkit for the Rb-87 D2 line"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions global;
    app.add_option("--constants", global.constants_path,
                   "atomic constants JSON (default: built-in Rb-87 D2 values)");
    app.add_option("--klein-table", global.klein_path,
                   "perturbation coefficient table JSON (default: built-in)");
    app.add_option("--output", global.output_path, "output file path (default: stdout)");
    auto* seed_opt = app.add_option("--seed", global.seed, "random seed");

    std::function<int()> action;

    // ---------------- spectra ----------------
    {
        auto* cmd = app.add_subcommand(
            "spectra", "coefficient spectra over a detuning grid, CSV");
        auto min = std::make_shared<double>(0), max = std::make_shared<double>(0),
             step = std::make_shared<double>(0);
        auto guard = std::make_shared<double>(kPoleTolMHz);
        cmd->add_option("--min", *min, "grid start, MHz")->required();
        cmd->add_option("--max", *max, "grid end, MHz")->required();
        cmd->add_option("--step", *step, "grid step, MHz")->required();
        cmd->add_option("--pole-guard", *guard, "masking radius around poles, MHz");
        cmd->callback([&, min, max, step, guard] {
            action = [&, min, max, step, guard]() -> int {
                const auto constants = resolve_constants(global);
                const auto table = spectra(constants, *min, *max, *step, *guard);
                std::ostringstream csv;
                csv << "detuning_MHz,alpha1,alpha2,beta0J,beta0N,beta1,beta2\n";
                for (const auto& row : table.rows)
                    csv << fmt_double(row.delta) << ',' << fmt_double(row.alpha1) << ','
                        << fmt_double(row.alpha2) << ',' << fmt_double(row.beta0_J) << ','
                        << fmt_double(row.beta0_N) << ',' << fmt_double(row.beta1) << ','
                        << fmt_double(row.beta2) << '\n';
                for (double m : table.masked)
                    std::cerr << "masked pole-adjacent grid point at delta = " << m
                              << " MHz\n";
                emit(global, csv.str());
                return 0;
            };
        });
    }

    // ---------------- roots ----------------
    {
        auto* cmd = app.add_subcommand(
            "roots", "zero crossings of a named coefficient, JSON");
        auto name = std::make_shared<std::string>();
        auto lo = std::make_shared<double>(0), hi = std::make_shared<double>(0);
        auto tol = std::make_shared<double>(1e-6);
        cmd->add_option("--coefficient", *name, "one of alpha1 alpha2 beta0J beta0N beta1 beta2")
            ->required();
        cmd->add_option("--min", *lo, "interval start, MHz")->required();
        cmd->add_option("--max", *hi, "interval end, MHz")->required();
        cmd->add_option("--tol", *tol, "root refinement tolerance, MHz");
        cmd->callback([&, name, lo, hi, tol] {
            action = [&, name, lo, hi, tol]() -> int {
                const auto constants = resolve_constants(global);
                const auto records = find_roots(constants, *name, *lo, *hi, *tol);
                json out = json::array();
                for (const auto& r : records)
                    out.push_back(json{{"coefficient", r.coefficient},
                                       {"root_MHz", r.root_MHz},
                                       {"bracket_lo", r.bracket_lo},
                                       {"bracket_hi", r.bracket_hi}});
                emit(global, out.dump(2) + "\n");
                return 0;
            };
        });
    }

    // ---------------- heff ----------------
    {
        auto* cmd = app.add_subcommand(
            "heff", "effective Hamiltonian on the F=1 manifold, JSON");
        auto delta = std::make_shared<double>(0);
        auto gp_re = std::make_shared<double>(1), gp_im = std::make_shared<double>(0);
        auto gm_re = std::make_shared<double>(0), gm_im = std::make_shared<double>(0);
        auto strong = std::make_shared<bool>(false);
        cmd->add_option("--detuning", *delta, "laser detuning, MHz")->required();
        cmd->add_option("--gp-re", *gp_re, "Re g+, MHz");
        cmd->add_option("--gp-im", *gp_im, "Im g+, MHz");
        cmd->add_option("--gm-re", *gm_re, "Re g-, MHz");
        cmd->add_option("--gm-im", *gm_im, "Im g-, MHz");
        cmd->add_flag("--strong-field", *strong, "override the perturbative ceiling");
        cmd->callback([&, delta, gp_re, gp_im, gm_re, gm_im, strong] {
            action = [&, delta, gp_re, gp_im, gm_re, gm_im, strong]() -> int {
                const auto constants = resolve_constants(global);
                const auto table = resolve_table(global);
                const auto det = DetuningSet::from_constants(constants, *delta);
                const FieldConfig field{{*gp_re, *gp_im}, {*gm_re, *gm_im}};
                const auto h2 = effective_hamiltonian(2, field, det, table, *strong);
                const auto h4 = effective_hamiltonian(4, field, det, table, *strong);
                json out{{"detuning", detuning_json(det)},
                         {"field", field_json(field)},
                         {"h2_MHz", matrix_json(h2.matrix.mat)},
                         {"h4_MHz", matrix_json(h4.matrix.mat)}};
                emit(global, out.dump(2) + "\n");
                return 0;
            };
        });
    }

    // ---------------- verify ----------------
    {
        auto* cmd = app.add_subcommand(
            "verify", "exact-diagonalization convergence check of the expansion");
        auto delta = std::make_shared<double>(-300.0);
        auto gp_re = std::make_shared<double>(1), gp_im = std::make_shared<double>(0);
        auto gm_re = std::make_shared<double>(0.5527), gm_im = std::make_shared<double>(0.2337);
        auto eps_lo = std::make_shared<double>(5.0), eps_hi = std::make_shared<double>(50.0);
        auto eps_points = std::make_shared<int>(9);
        cmd->add_option("--detuning", *delta, "laser detuning, MHz");
        cmd->add_option("--gp-re", *gp_re, "Re g+, MHz");
        cmd->add_option("--gp-im", *gp_im, "Im g+, MHz");
        cmd->add_option("--gm-re", *gm_re, "Re g-, MHz");
        cmd->add_option("--gm-im", *gm_im, "Im g-, MHz");
        cmd->add_option("--eps-lo", *eps_lo, "smallest field scale factor");
        cmd->add_option("--eps-hi", *eps_hi, "largest field scale factor");
        cmd->add_option("--eps-points", *eps_points, "grid size");
        cmd->callback([&, delta, gp_re, gp_im, gm_re, gm_im, eps_lo, eps_hi, eps_points] {
            action = [&, delta, gp_re, gp_im, gm_re, gm_im, eps_lo, eps_hi,
                      eps_points]() -> int {
                const auto constants = resolve_constants(global);
                const auto table = resolve_table(global);
                const auto det = DetuningSet::from_constants(constants, *delta);
                const FieldConfig field{{*gp_re, *gp_im}, {*gm_re, *gm_im}};
                const auto grid = log_spaced(*eps_lo, *eps_hi, *eps_points);

                const auto s2 = convergence_scan(field, det, grid, {2}, table);
                const auto s24 = convergence_scan(field, det, grid, {2, 4}, table);
                const bool pass_2 = s2.slope >= 3.8 && s2.slope <= 4.2;
                const bool pass_24 = s24.slope >= 5.8 && s24.slope <= 6.2;

                json out{{"detuning", detuning_json(det)},
                         {"field", field_json(field)},
                         {"eps_grid", grid},
                         {"order2", {{"slope", s2.slope},
                                     {"window", {3.8, 4.2}},
                                     {"points_dropped", s2.points_dropped},
                                     {"pass", pass_2}}},
                         {"order2plus4", {{"slope", s24.slope},
                                          {"window", {5.8, 6.2}},
                                          {"points_dropped", s24.points_dropped},
                                          {"pass", pass_24}}},
                         {"pass", pass_2 && pass_24}};
                if (s2.points_dropped + s24.points_dropped > 0)
                    std::cerr << "warning: " << s2.points_dropped + s24.points_dropped
                              << " scan points at the numerical noise floor were dropped\n";
                emit(global, out.dump(2) + "\n");
                return (pass_2 && pass_24) ? 0 : 1;
            };
        });
    }

    // shared metrology options
    struct SenseOpts {
        double detuning = 0;
        bool detuning_set = false;
        double alpha1 = 0, beta1 = 0;
        bool couplings_set = false;
        double tau = 1.0;
        double gamma = 0;
        double wavelength_nm = 780.241;
        double pulse_us = 1.0;
        double area_mm2 = 1.0;
        double jz = 0.0;
        int trials = 400;
        bool paper_half = false;
    };
    auto add_coupling_options = [](CLI::App* cmd, const std::shared_ptr<SenseOpts>& o) {
        auto* det_opt = cmd->add_option_function<double>(
            "--detuning",
            [o](double v) {
                o->detuning = v;
                o->detuning_set = true;
            },
            "take couplings from the closed-form spectra at this detuning, MHz");
        auto* a_opt = cmd->add_option_function<double>(
            "--alpha1",
            [o](double v) {
                o->alpha1 = v;
                o->couplings_set = true;
            },
            "linear coupling, MHz per MHz^2");
        cmd->add_option_function<double>(
            "--beta1",
            [o](double v) {
                o->beta1 = v;
                o->couplings_set = true;
            },
            "nonlinear coupling, MHz per MHz^4");
        det_opt->excludes(a_opt);
        cmd->add_option("--tau", o->tau, "interaction time, us");
        cmd->add_option("--gamma", o->gamma,
                        "single-photon intensity, MHz^2/photon (default: from beam options)");
        cmd->add_option("--wavelength-nm", o->wavelength_nm, "beam wavelength");
        cmd->add_option("--pulse-us", o->pulse_us, "pulse duration");
        cmd->add_option("--area-mm2", o->area_mm2, "beam area");
        cmd->add_option("--jz", o->jz, "true collective spin value");
        cmd->add_option("--trials", o->trials, "Monte Carlo trials per point");
        cmd->add_flag("--paper-half", o->paper_half,
                      "use the halved nonlinear term in the sensitivity denominator");
    };
    auto scenario_from = [](const SenseOpts& o, const AtomicConstants& constants) {
        MetrologyScenario sc;
        if (o.detuning_set) {
            const auto d = DetuningSet::from_constants(constants, o.detuning);
            sc.alpha1 = closed_form_alpha(d).alpha1;
            sc.beta1 = closed_form_beta(d).beta1;
        } else if (o.couplings_set) {
            sc.alpha1 = o.alpha1;
            sc.beta1 = o.beta1;
        } else {
            throw DomainError("give either --detuning or explicit --alpha1/--beta1");
        }
        sc.tau_us = o.tau;
        if (o.gamma > 0) {
            sc.gamma = o.gamma;
        } else {
            BeamParameters beam;
            beam.omega_rad_s = 2 * M_PI * 2.99792458e8 / (o.wavelength_nm * 1e-9);
            beam.pulse_duration_s = o.pulse_us * 1e-6;
            beam.beam_area_m2 = o.area_mm2 * 1e-6;
            sc.gamma = beam.gamma_natural(constants.dipole_Cm);
        }
        sc.jz_true = o.jz;
        sc.convention = o.paper_half ? SensitivityConvention::PaperHalf
                                     : SensitivityConvention::Rederived;
        return sc;
    };

    // ---------------- sense ----------------
    {
        auto* cmd = app.add_subcommand(
            "sense", "sensitivity curve over photon number, CSV");
        auto opts = std::make_shared<SenseOpts>();
        auto s0_lo = std::make_shared<double>(0), s0_hi = std::make_shared<double>(0);
        auto points = std::make_shared<int>(12);
        add_coupling_options(cmd, opts);
        cmd->add_option("--s0-min", *s0_lo, "smallest photon-number Stokes magnitude")
            ->required();
        cmd->add_option("--s0-max", *s0_hi, "largest photon-number Stokes magnitude")
            ->required();
        cmd->add_option("--points", *points, "curve points (log spaced)");
        cmd->callback([&, opts, s0_lo, s0_hi, points] {
            action = [&, opts, s0_lo, s0_hi, points]() -> int {
                if (seed_opt->count() == 0)
                    throw DomainError("--seed is required for the Monte Carlo column");
                const auto constants = resolve_constants(global);
                const auto sc = scenario_from(*opts, constants);
                const auto s0s = log_spaced(*s0_lo, *s0_hi, *points);
                const auto rows = sensitivity_curve(sc, s0s, opts->trials, global.seed);
                std::ostringstream csv;
                csv << "N_L,delta_JZ_analytic,delta_JZ_montecarlo,mc_stderr\n";
                std::vector<std::pair<double, double>> curve;
                for (const auto& r : rows) {
                    csv << fmt_double(r.n_l) << ',' << fmt_double(r.delta_jz_analytic) << ','
                        << fmt_double(r.delta_jz_montecarlo) << ',' << fmt_double(r.mc_stderr)
                        << '\n';
                    curve.emplace_back(r.n_l, r.delta_jz_analytic);
                }
                std::cerr << "fitted log-log slope of the analytic curve: "
                          << fit_loglog_slope(curve) << "\n";
                emit(global, csv.str());
                return 0;
            };
        });
    }

    // ---------------- montecarlo ----------------
    {
        auto* cmd = app.add_subcommand(
            "montecarlo", "shot-noise Monte Carlo estimate of J_Z at one intensity, CSV");
        auto opts = std::make_shared<SenseOpts>();
        auto s0 = std::make_shared<double>(0);
        add_coupling_options(cmd, opts);
        cmd->add_option("--s0", *s0, "photon-number Stokes magnitude")->required();
        cmd->callback([&, opts, s0] {
            action = [&, opts, s0]() -> int {
                if (seed_opt->count() == 0)
                    throw DomainError("--seed is required for montecarlo");
                const auto constants = resolve_constants(global);
                auto sc = scenario_from(*opts, constants);
                sc.s0_hat = *s0;
                const auto mc = monte_carlo_estimate(sc, opts->trials, global.seed);
                std::ostringstream csv;
                csv << "trials,seed,jz_true,estimator_mean,estimator_std,delta_jz_analytic\n"
                    << mc.trials << ',' << mc.seed << ',' << fmt_double(sc.jz_true) << ','
                    << fmt_double(mc.mean) << ',' << fmt_double(mc.stddev) << ','
                    << fmt_double(mc.analytic_delta) << '\n';
                emit(global, csv.str());
                return 0;
            };
        });
    }

    // ---------------- twist ----------------
    {
        auto* cmd = app.add_subcommand(
            "twist", "one-axis-twisting evolution in the fixed photon sector, JSON");
        auto photons = std::make_shared<int>(100);
        auto chi_t = std::make_shared<double>(0);
        auto tilt = std::make_shared<double>(0);
        auto cap = std::make_shared<int>(kTwistingPhotonCap);
        cmd->add_option("--photons", *photons, "photon number N")->required();
        cmd->add_option("--chi-t", *chi_t, "dimensionless twisting strength")->required();
        cmd->add_option("--tilt", *tilt, "initial tilt from +X toward +Z, radians");
        cmd->add_option("--cap", *cap, "dense-state size cap");
        cmd->callback([&, photons, chi_t, tilt, cap] {
            action = [&, photons, chi_t, tilt, cap]() -> int {
                const auto rep = twisting_evolve(*photons, *chi_t, *tilt, *cap);
                json cov = json::array();
                for (int r = 0; r < 3; ++r)
                    cov.push_back({rep.moments.covariance(r, 0), rep.moments.covariance(r, 1),
                                   rep.moments.covariance(r, 2)});
                json out{{"N", rep.n_photons},
                         {"chi_t", rep.chi_t},
                         {"tilt", rep.tilt},
                         {"mean_S", {rep.moments.mean(0), rep.moments.mean(1),
                                     rep.moments.mean(2)}},
                         {"covariance", cov},
                         {"min_variance", rep.min_variance},
                         {"qfi", rep.qfi}};
                emit(global, out.dump(2) + "\n");
                return 0;
            };
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    return run_action(action);
}
