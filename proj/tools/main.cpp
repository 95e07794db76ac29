// Command-line front end: spectrum | cancellation | dips | calibrate | fit |
// oracle | acceptance. All file output is CSV with `#` metadata headers plus
// a JSON sidecar of resolved parameters.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "acceptance.hpp"

namespace {

using namespace omnoise;

json resolved_metadata(const RunConfig& rc, const SteadyState& ss) {
    json j;
    j["solver"] = solver_name(rc.spectrum.solver);
    j["quadrature"] = rc.spectrum.quadrature == Quadrature::X ? "x" : "y";
    j["port"] = (rc.spectrum.mode_k == 1 && rc.spectrum.mirror_l == 1) ? "t2"
                                                                       : "r1";
    j["grid"] = {{"fmin_hz", rc.grid.fmin_hz},
                 {"fmax_hz", rc.grid.fmax_hz},
                 {"points", rc.grid.points}};
    for (int k = 0; k < 2; ++k) {
        json o;
        o["kappa_hz"] = rad_to_hz(rc.system.optical[k].kappa());
        o["detuning0_hz"] = rad_to_hz(rc.system.optical[k].detuning0);
        o["detuning_hz"] = rad_to_hz(ss.detuning[k]);
        o["power_w"] = rc.system.optical[k].power;
        o["alpha_re"] = ss.alpha[k].real();
        o["alpha_im"] = ss.alpha[k].imag();
        o["photon_number"] = std::norm(ss.alpha[k]);
        j["optical"].push_back(o);
    }
    for (int m = 0; m < 2; ++m) {
        json o;
        o["omega_m_hz"] = rad_to_hz(rc.system.mechanical[m].omega_m);
        o["gamma_m_hz"] = rad_to_hz(rc.system.mechanical[m].gamma_m);
        o["n_th"] = rc.system.mechanical[m].n_th;
        o["xbar"] = ss.xbar[m];
        j["mechanical"].push_back(o);
    }
    for (int jj = 0; jj < 2; ++jj)
        for (int k = 0; k < 2; ++k)
            j["couplings_g0_hz"][jj][k] =
                rad_to_hz(rc.system.couplings.g0[jj][k]);
    j["noise"] = {{"gamma_eps_strength",
                   {rc.system.noise.gamma_eps_strength[0],
                    rc.system.noise.gamma_eps_strength[1]}},
                  {"gamma_eps_bw_hz",
                   {rad_to_hz(rc.system.noise.gamma_eps_bw[0]),
                    rad_to_hz(rc.system.noise.gamma_eps_bw[1])}},
                  {"gamma_l_strength_hz",
                   {rad_to_hz(rc.system.noise.gamma_l_strength[0]),
                    rad_to_hz(rc.system.noise.gamma_l_strength[1])}},
                  {"gamma_phi_bw_hz",
                   {rad_to_hz(rc.system.noise.gamma_phi_bw[0]),
                    rad_to_hz(rc.system.noise.gamma_phi_bw[1])}}};
    j["steady_state_residual"] = steady_state_residual(rc.system, ss);
    return j;
}

void apply_overrides(RunConfig& rc, const std::string& solver,
                     const std::string& quadrature, const std::string& port,
                     double fmin, double fmax, int points) {
    if (!solver.empty())
        rc.spectrum.solver = solver == "rwa" ? Solver::Rwa : Solver::Full;
    if (!quadrature.empty())
        rc.spectrum.quadrature =
            quadrature == "y" ? Quadrature::Y : Quadrature::X;
    if (!port.empty()) {
        rc.spectrum.mode_k = port == "t2" ? 1 : 0;
        rc.spectrum.mirror_l = port == "t2" ? 1 : 0;
    }
    if (fmin > 0.0) rc.grid.fmin_hz = fmin;
    if (fmax > 0.0) rc.grid.fmax_hz = fmax;
    if (points > 0) rc.grid.points = points;
}

SpectrumResult compute_spectrum(const RunConfig& rc, const SteadyState& ss) {
    const auto grid =
        make_grid(rc.system, hz_to_rad(rc.grid.fmin_hz),
                  hz_to_rad(rc.grid.fmax_hz), rc.grid.points);
    SpectrumResult spec =
        psd(rc.system, ss, selector_from(rc), grid, rc.spectrum.solver);
    if (rc.detection.enabled)
        apply_detection(spec, rc.detection.a_factor, rc.detection.shot_floor,
                        rc.detection.electronic_floor);
    return spec;
}

void write_outputs(const SpectrumResult& spec, const json& meta,
                   const std::string& out_dir, const std::string& stem) {
    std::filesystem::create_directories(out_dir);
    write_spectrum_csv(spec, out_dir + "/" + stem + ".csv");
    std::ofstream mf(out_dir + "/" + stem + ".meta.json");
    mf << meta.dump(2) << "\n";
    std::cout << "wrote " << out_dir << "/" << stem << ".csv\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-membrane optomechanics noise spectra"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", solver, quadrature, port;
    std::string csv_path, report_path = "acceptance_report.json";
    std::string configs_dir = "configs";
    double fmin = 0.0, fmax = 0.0, tol_scale = 1.0;
    double g1_init = 0.0, g2_init = 0.0;
    int points = 0, criterion = 0, n_lorentz = 0;
    std::uint64_t seed = 0;
    bool keep_series = false;
    std::size_t decimation = 1;
    std::vector<double> centers_hz;
    double halfwidth_hz = 100.0;
    double v_car = 0.0, v_sb = 0.0, v_om = 0.0, power_w = 67e-6;
    double wavelength_m = 1.064e-6, bw_hz = 10.0, phidot = 0.0;

    auto add_common = [&](CLI::App* sub, bool need_config = true) {
        auto* opt = sub->add_option("--config", config_path, "run config JSON");
        if (need_config) opt->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--solver", solver)
            ->check(CLI::IsMember({"full", "rwa"}));
        sub->add_option("--quadrature", quadrature)
            ->check(CLI::IsMember({"x", "y"}));
        sub->add_option("--port", port)->check(CLI::IsMember({"t2", "r1"}));
        sub->add_option("--fmin", fmin, "grid start (Hz)");
        sub->add_option("--fmax", fmax, "grid end (Hz)");
        sub->add_option("--points", points, "grid points");
        sub->add_option("--seed", seed, "RNG seed override");
    };

    auto* sp = app.add_subcommand("spectrum", "analytic output-quadrature PSD");
    add_common(sp);
    auto* ca = app.add_subcommand("cancellation",
                                  "homodyne spectrum with window metrics");
    add_common(ca);
    auto* di = app.add_subcommand("dips", "locate spectral dips");
    add_common(di);
    di->add_option("--csv", csv_path, "analyze an existing spectrum CSV");

    auto* cal = app.add_subcommand("calibrate", "lock-in calibration chain");
    cal->add_option("--vcar", v_car)->required();
    cal->add_option("--vsb", v_sb)->required();
    cal->add_option("--vomega", v_om, "V at the modulation frequency");
    cal->add_option("--power-w", power_w, "pump power (W)");
    cal->add_option("--wavelength-m", wavelength_m);
    cal->add_option("--bw", bw_hz, "measurement bandwidth (Hz)");
    cal->add_option("--phidot", phidot, "phase-noise amplitude");

    auto* fi = app.add_subcommand("fit", "coupling or Lorentzian fits");
    add_common(fi, false);
    fi->add_option("--csv", csv_path, "measured spectrum CSV")->required();
    fi->add_option("--g1-init", g1_init, "initial g0_12 (Hz)");
    fi->add_option("--g2-init", g2_init, "initial g0_22 (Hz)");
    fi->add_option("--lorentzians", n_lorentz, "fit N Lorentzian peaks");
    fi->add_option("--center-hz", centers_hz, "peak window centers (Hz)");
    fi->add_option("--halfwidth-hz", halfwidth_hz, "peak window halfwidth (Hz)");

    auto* orc = app.add_subcommand("oracle", "stochastic time-domain check");
    add_common(orc);
    orc->add_flag("--keep-series", keep_series, "also write the time series");
    orc->add_option("--decimation", decimation, "series decimation factor");

    auto* acc = app.add_subcommand("acceptance", "run the acceptance criteria");
    acc->add_option("--configs", configs_dir, "bundled configs directory");
    acc->add_option("--report", report_path, "JSON report path");
    acc->add_option("--criterion", criterion, "run a single criterion (1-9)");
    acc->add_option("--tol-scale", tol_scale, "scale all tolerance bands");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sp->parsed() || ca->parsed() || (di->parsed() && csv_path.empty())) {
            RunConfig rc = load_run_config(config_path);
            if (ca->parsed()) {
                rc.spectrum.quadrature = Quadrature::Y;
                rc.spectrum.mode_k = 0;
                rc.spectrum.mirror_l = 0;
            }
            apply_overrides(rc, solver, quadrature, port, fmin, fmax, points);
            const SteadyState ss = solve_steady_state(rc.system);
            SpectrumResult spec = compute_spectrum(rc, ss);

            if (di->parsed()) {
                std::vector<std::pair<double, double>> windows;
                for (const auto& m : rc.system.mechanical)
                    windows.push_back({m.omega_m, 30.0 * m.gamma_m});
                for (const auto& d : dip_finder(spec, windows))
                    std::cout << "dip at " << rad_to_hz(d.omega_min)
                              << " Hz, depth " << d.depth_db << " dB\n";
                return 0;
            }

            if (ca->parsed()) {
                // Window metrics: interior minimum between the two thermal
                // peaks, emitted only when both peaks and the dip exist.
                const auto& m = rc.system.mechanical;
                std::size_t ipk[2] = {0, 0};
                bool have_peaks = true;
                for (int j = 0; j < 2; ++j) {
                    double best = -1.0;
                    bool found = false;
                    for (std::size_t i = 0; i < spec.omega.size(); ++i)
                        if (std::abs(spec.omega[i] - m[j].omega_m) <=
                                10.0 * m[j].gamma_m &&
                            spec.values[i] > best) {
                            best = spec.values[i];
                            ipk[j] = i;
                            found = true;
                        }
                    have_peaks = have_peaks && found;
                }
                if (have_peaks && ipk[0] + 1 < ipk[1]) {
                    std::size_t imin = ipk[0] + 1;
                    for (std::size_t i = ipk[0] + 1; i < ipk[1]; ++i)
                        if (spec.values[i] < spec.values[imin]) imin = i;
                    const double ref =
                        std::min(spec.values[ipk[0]], spec.values[ipk[1]]);
                    if (imin > ipk[0] && imin < ipk[1] &&
                        spec.values[imin] < ref) {
                        std::size_t lo = imin, hi = imin;
                        while (lo > ipk[0] && spec.values[lo] < ref) --lo;
                        while (hi < ipk[1] && spec.values[hi] < ref) ++hi;
                        spec.metadata["window_min_hz"] =
                            omnoise::detail::fmt_double(
                                rad_to_hz(spec.omega[imin]));
                        spec.metadata["window_min_value"] =
                            omnoise::detail::fmt_double(spec.values[imin]);
                        spec.metadata["window_width_hz"] =
                            omnoise::detail::fmt_double(
                                rad_to_hz(spec.omega[hi] - spec.omega[lo]));
                    }
                }
            }

            write_outputs(spec, resolved_metadata(rc, ss), out_dir,
                          ca->parsed() ? "cancellation" : "spectrum");
            return 0;
        }

        if (di->parsed()) {  // CSV input path
            const SpectrumResult spec = read_spectrum_csv_file(csv_path);
            const double span =
                spec.omega.back() - spec.omega.front();
            for (const auto& d :
                 dip_finder(spec, {{(spec.omega.front() + spec.omega.back()) /
                                        2.0,
                                    span / 2.0}}))
                std::cout << "dip at " << rad_to_hz(d.omega_min)
                          << " Hz, depth " << d.depth_db << " dB\n";
            return 0;
        }

        if (cal->parsed()) {
            const double omega_L = two_pi * speed_of_light / wavelength_m;
            const auto r =
                calibrate(v_car, v_sb, v_om, power_w, omega_L, bw_hz, phidot);
            json j = {{"eps_m_sq", r.eps_m_sq},
                      {"eps_m", std::sqrt(r.eps_m_sq)},
                      {"a_factor", r.a_factor},
                      {"two_gamma_eps", 2.0 * r.gamma_eps_equiv},
                      {"two_gamma_l", 2.0 * r.gamma_l_equiv}};
            std::cout << j.dump(2) << "\n";
            return 0;
        }

        if (fi->parsed()) {
            const SpectrumResult measured = read_spectrum_csv_file(csv_path);
            if (n_lorentz > 0) {
                std::vector<std::pair<double, double>> windows;
                for (double c : centers_hz)
                    windows.push_back(
                        {hz_to_rad(c), hz_to_rad(halfwidth_hz)});
                const auto [peaks, rep] =
                    fit_lorentzians(measured, n_lorentz, windows);
                json j;
                for (const auto& pk : peaks)
                    j["peaks"].push_back(
                        {{"center_hz", rad_to_hz(pk.center)},
                         {"fwhm_hz", rad_to_hz(pk.fwhm)},
                         {"area", pk.area},
                         {"offset", pk.offset}});
                j["residual_norm"] = rep.residual_norm;
                std::cout << j.dump(2) << "\n";
                return 0;
            }
            RunConfig rc = load_run_config(config_path);
            apply_overrides(rc, solver, quadrature, port, fmin, fmax, points);
            CouplingFitOptions opts;
            opts.solver = rc.spectrum.solver;
            if (seed != 0) opts.seed = seed;
            std::array<double, 2> init{
                g1_init > 0.0 ? hz_to_rad(g1_init) : rc.system.couplings.g0[0][1],
                g2_init > 0.0 ? hz_to_rad(g2_init) : rc.system.couplings.g0[1][1]};
            const auto rep = fit_couplings(measured, rc.system,
                                           selector_from(rc), init, opts);
            json j = {{"g0_12_hz", rad_to_hz(rep.estimates(0))},
                      {"g0_22_hz", rad_to_hz(rep.estimates(1))},
                      {"sigma_g0_12_hz", rad_to_hz(rep.sigmas(0))},
                      {"sigma_g0_22_hz", rad_to_hz(rep.sigmas(1))},
                      {"residual_norm", rep.residual_norm},
                      {"warnings", rep.warnings}};
            std::cout << j.dump(2) << "\n";
            return 0;
        }

        if (orc->parsed()) {
            RunConfig rc = load_run_config(config_path);
            apply_overrides(rc, solver, quadrature, port, fmin, fmax, points);
            if (!rc.oracle)
                throw ConfigError("config has no oracle block");
            SimConfig sc;
            sc.dt = rc.oracle->dt_s;
            sc.duration = rc.oracle->duration_s;
            sc.seed = seed != 0 ? seed : rc.oracle->seed;
            sc.segment_samples = rc.oracle->segment_samples;
            sc.overlap = rc.oracle->overlap;
            const SteadyState ss = solve_steady_state(rc.system);
            const auto out = integrate(rc.system, ss, sc, selector_from(rc),
                                       keep_series, decimation);
            std::filesystem::create_directories(out_dir);
            write_spectrum_csv(out.psd, out_dir + "/welch.csv");
            if (keep_series) {
                std::ofstream f(out_dir + "/series.csv");
                f << "# dt_s=" << sc.dt * static_cast<double>(decimation)
                  << "\nsample\n";
                for (double x : out.series)
                    f << omnoise::detail::fmt_double(x) << "\n";
            }
            std::cout << "wrote " << out_dir << "/welch.csv ("
                      << out.psd.metadata.at("segments") << " segments)\n";
            return 0;
        }

        if (acc->parsed()) {
            acceptance::Context ctx{configs_dir, tol_scale};
            const auto rep = acceptance::run_all(ctx, criterion, &std::cout);
            std::ofstream f(report_path);
            f << acceptance::report_to_json(rep).dump(2) << "\n";
            std::cout << (rep.passed() ? "ALL PASS" : "FAILURES PRESENT")
                      << " (report: " << report_path << ")\n";
            return rep.passed() ? 0 : 4;
        }
    } catch (const omnoise::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const omnoise::UnsupportedPort& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const omnoise::Error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
