#pragma once

#include <fstream>
#include <optional>
#include <set>
#include <string>

#include <json.hpp>

#include "omnoise/oracle.hpp"
#include "omnoise/params.hpp"
#include "omnoise/spectrum.hpp"

namespace omnoise {

using json = nlohmann::json;

namespace detail {

inline void check_keys(const json& j, const std::set<std::string>& allowed,
                       const std::string& path) {
    if (!j.is_object()) throw ConfigError(path + ": expected an object");
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key))
            throw ConfigError(path + ": unknown key '" + key + "'");
}

inline double need_num(const json& j, const std::string& key,
                       const std::string& path) {
    if (!j.contains(key))
        throw ConfigError(path + ": missing key '" + key + "'");
    if (!j[key].is_number())
        throw ConfigError(path + "." + key + ": expected a number");
    return j[key].get<double>();
}

inline double opt_num(const json& j, const std::string& key, double fallback) {
    return j.contains(key) ? j[key].get<double>() : fallback;
}

}  // namespace detail

struct GridConfig {
    double fmin_hz = 0.0;
    double fmax_hz = 0.0;
    int points = 4001;
};

struct SpectrumConfig {
    Solver solver = Solver::Full;
    Quadrature quadrature = Quadrature::X;
    int mode_k = 1;    // 0 probe, 1 pump
    int mirror_l = 1;  // 0 input, 1 output
    bool one_sided = false;
};

struct DetectionConfig {
    double a_factor = 1.0;
    double shot_floor = 0.0;
    double electronic_floor = 0.0;
    bool enabled = false;
};

struct OracleConfig {
    double dt_s = 0.0;
    double duration_s = 0.0;
    std::uint64_t seed = 1;
    std::size_t segment_samples = 1 << 20;
    double overlap = 0.5;
};

struct RunConfig {
    SystemParams system;
    GridConfig grid;
    SpectrumConfig spectrum;
    DetectionConfig detection;
    std::optional<OracleConfig> oracle;
};

inline SystemParams parse_system(const json& j) {
    detail::check_keys(j,
                       {"optical", "mechanical", "couplings_g0_hz", "noise",
                        "lo_phase_rad", "include_loss_port"},
                       "system");
    SystemParams p;

    if (!j.contains("optical") || !j["optical"].is_array() ||
        j["optical"].size() != 2)
        throw ConfigError("system.optical: need exactly two modes (probe, pump)");
    for (int k = 0; k < 2; ++k) {
        const json& o = j["optical"][k];
        const std::string path = "system.optical[" + std::to_string(k) + "]";
        detail::check_keys(o,
                           {"name", "wavelength_m", "detuning0_hz", "kappa_hz",
                            "kappa1_hz", "kappa2_hz", "kappa_loss_hz",
                            "power_w"},
                           path);
        OpticalMode& m = p.optical[k];
        if (o.contains("wavelength_m"))
            m.omega_L = two_pi * speed_of_light / o["wavelength_m"].get<double>();
        m.detuning0 = hz_to_rad(detail::need_num(o, "detuning0_hz", path));
        if (o.contains("kappa1_hz") || o.contains("kappa2_hz")) {
            m.kappa1 = hz_to_rad(detail::need_num(o, "kappa1_hz", path));
            m.kappa2 = hz_to_rad(detail::need_num(o, "kappa2_hz", path));
            m.kappa_l = hz_to_rad(detail::opt_num(o, "kappa_loss_hz", 0.0));
        } else {
            // Only the total decay rate is known: split it evenly between the
            // mirrors, no internal loss, overridable with explicit keys.
            const double kappa = hz_to_rad(detail::need_num(o, "kappa_hz", path));
            m.kappa1 = kappa / 2.0;
            m.kappa2 = kappa / 2.0;
            m.kappa_l = 0.0;
        }
        m.power = detail::opt_num(o, "power_w", 0.0);
    }

    if (!j.contains("mechanical") || !j["mechanical"].is_array() ||
        j["mechanical"].size() != 2)
        throw ConfigError("system.mechanical: need exactly two modes");
    for (int jj = 0; jj < 2; ++jj) {
        const json& o = j["mechanical"][jj];
        const std::string path = "system.mechanical[" + std::to_string(jj) + "]";
        detail::check_keys(
            o, {"omega_m_hz", "gamma_m_hz", "temperature_k", "n_th",
                "mass_eff_kg"},
            path);
        MechanicalMode& m = p.mechanical[jj];
        m.omega_m = hz_to_rad(detail::need_num(o, "omega_m_hz", path));
        m.gamma_m = hz_to_rad(detail::need_num(o, "gamma_m_hz", path));
        m.mass_eff = detail::opt_num(o, "mass_eff_kg", 0.0);
        if (o.contains("n_th")) {
            m.n_th = o["n_th"].get<double>();
            m.temperature = detail::opt_num(o, "temperature_k", 0.0);
        } else {
            m.temperature = detail::need_num(o, "temperature_k", path);
            m.n_th = MechanicalMode::occupancy(m.temperature, m.omega_m);
        }
    }

    if (!j.contains("couplings_g0_hz"))
        throw ConfigError("system: missing couplings_g0_hz");
    const json& g = j["couplings_g0_hz"];
    if (!g.is_array() || g.size() != 2 || !g[0].is_array() || g[0].size() != 2 ||
        !g[1].is_array() || g[1].size() != 2)
        throw ConfigError("system.couplings_g0_hz: expected a 2x2 array");
    for (int jj = 0; jj < 2; ++jj)
        for (int k = 0; k < 2; ++k)
            p.couplings.g0[jj][k] = hz_to_rad(g[jj][k].get<double>());

    if (j.contains("noise")) {
        const json& n = j["noise"];
        detail::check_keys(n,
                           {"gamma_eps_strength", "gamma_eps_bw_hz",
                            "gamma_l_strength_hz", "gamma_phi_bw_hz"},
                           "system.noise");
        auto read_pair = [&](const char* key, std::array<double, 2>& out,
                             bool to_rad) {
            if (!n.contains(key)) return;
            const json& a = n[key];
            if (!a.is_array() || a.size() != 2)
                throw ConfigError(std::string("system.noise.") + key +
                                  ": expected [probe, pump]");
            for (int k = 0; k < 2; ++k)
                out[k] = to_rad ? hz_to_rad(a[k].get<double>())
                                : a[k].get<double>();
        };
        read_pair("gamma_eps_strength", p.noise.gamma_eps_strength, false);
        read_pair("gamma_eps_bw_hz", p.noise.gamma_eps_bw, true);
        read_pair("gamma_l_strength_hz", p.noise.gamma_l_strength, true);
        read_pair("gamma_phi_bw_hz", p.noise.gamma_phi_bw, true);
    }

    p.lo_phase = detail::opt_num(j, "lo_phase_rad", 0.0);
    p.include_loss_port =
        j.contains("include_loss_port") && j["include_loss_port"].get<bool>();
    p.validate();
    return p;
}

inline RunConfig parse_run_config(const json& j) {
    detail::check_keys(
        j, {"schema_version", "system", "grid", "spectrum", "detection",
            "oracle"},
        "(root)");
    if (!j.contains("schema_version") || j["schema_version"].get<int>() != 1)
        throw ConfigError("schema_version must be 1");
    if (!j.contains("system")) throw ConfigError("missing system block");

    RunConfig rc;
    rc.system = parse_system(j["system"]);

    if (j.contains("grid")) {
        const json& g = j["grid"];
        detail::check_keys(g, {"fmin_hz", "fmax_hz", "points"}, "grid");
        rc.grid.fmin_hz = detail::need_num(g, "fmin_hz", "grid");
        rc.grid.fmax_hz = detail::need_num(g, "fmax_hz", "grid");
        rc.grid.points = static_cast<int>(detail::opt_num(g, "points", 4001));
        if (!(rc.grid.fmax_hz > rc.grid.fmin_hz) || rc.grid.points < 2)
            throw ConfigError("grid: need fmax_hz > fmin_hz and points >= 2");
    }

    if (j.contains("spectrum")) {
        const json& s = j["spectrum"];
        detail::check_keys(s, {"solver", "quadrature", "port", "one_sided"},
                           "spectrum");
        if (s.contains("solver")) {
            const std::string v = s["solver"].get<std::string>();
            if (v == "full")
                rc.spectrum.solver = Solver::Full;
            else if (v == "rwa")
                rc.spectrum.solver = Solver::Rwa;
            else
                throw ConfigError("spectrum.solver: must be full|rwa");
        }
        if (s.contains("quadrature")) {
            const std::string v = s["quadrature"].get<std::string>();
            if (v == "x")
                rc.spectrum.quadrature = Quadrature::X;
            else if (v == "y")
                rc.spectrum.quadrature = Quadrature::Y;
            else
                throw ConfigError("spectrum.quadrature: must be x|y");
        }
        if (s.contains("port")) {
            const std::string v = s["port"].get<std::string>();
            if (v == "t2") {
                rc.spectrum.mode_k = 1;
                rc.spectrum.mirror_l = 1;
            } else if (v == "r1") {
                rc.spectrum.mode_k = 0;
                rc.spectrum.mirror_l = 0;
            } else {
                throw ConfigError("spectrum.port: must be t2|r1");
            }
        }
        if (s.contains("one_sided"))
            rc.spectrum.one_sided = s["one_sided"].get<bool>();
    }

    if (j.contains("detection")) {
        const json& d = j["detection"];
        detail::check_keys(d, {"a_factor", "shot_floor", "electronic_floor"},
                           "detection");
        rc.detection.enabled = true;
        rc.detection.a_factor = detail::opt_num(d, "a_factor", 1.0);
        rc.detection.shot_floor = detail::opt_num(d, "shot_floor", 0.0);
        rc.detection.electronic_floor =
            detail::opt_num(d, "electronic_floor", 0.0);
    }

    if (j.contains("oracle")) {
        const json& o = j["oracle"];
        detail::check_keys(
            o, {"dt_s", "duration_s", "seed", "segment_samples", "overlap"},
            "oracle");
        OracleConfig oc;
        oc.dt_s = detail::need_num(o, "dt_s", "oracle");
        oc.duration_s = detail::need_num(o, "duration_s", "oracle");
        oc.seed = static_cast<std::uint64_t>(detail::opt_num(o, "seed", 1));
        oc.segment_samples = static_cast<std::size_t>(
            detail::opt_num(o, "segment_samples", 1 << 20));
        oc.overlap = detail::opt_num(o, "overlap", 0.5);
        rc.oracle = oc;
    }
    return rc;
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file " + path);
    json j;
    try {
        f >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return parse_run_config(j);
}

inline QuadratureSelector selector_from(const RunConfig& rc) {
    QuadratureSelector sel;
    sel.which = rc.spectrum.quadrature;
    sel.mode_k = rc.spectrum.mode_k;
    sel.mirror_l = rc.spectrum.mirror_l;
    sel.lo_phase = rc.system.lo_phase;
    return sel;
}

}  // namespace omnoise
