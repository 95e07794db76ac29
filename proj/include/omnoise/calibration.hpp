#pragma once

#include <cmath>
#include <vector>

#include "omnoise/constants.hpp"
#include "omnoise/errors.hpp"
#include "omnoise/lockin.hpp"

namespace omnoise {

// Heterodyne beat of the AOM-modulated pump against the unmodulated probe.
// Amplitudes are in sqrt(photons/s).
struct BeatConfig {
    double eps_a = 0.0;      // carrier amplitude sqrt(P_pu / hbar omega_L)
    double eps_b = 0.0;      // probe amplitude
    double eps_m = 0.0;      // modulation amplitude
    double omega_mod = 0.0;  // modulation angular frequency Omega_m (rad/s)
    double delta = 0.0;      // pump-probe offset (rad/s)
    double duration = 1.0;   // s
    double sample_rate = 0.0;  // Hz

    std::vector<std::string> validate() const {
        std::vector<std::string> warnings;
        if (eps_a <= 0.0) throw ConfigError("carrier amplitude must be positive");
        if (eps_m >= 0.3 * eps_a)
            throw ConfigError("modulation too large: eps_m must be < 0.3 eps_a");
        if (eps_m > 0.1 * eps_a)
            warnings.push_back(
                "eps_m > 0.1 eps_a: small-modulation expansion degrades");
        if (sample_rate <= 0.0 || duration <= 0.0)
            throw ConfigError("sampling parameters must be positive");
        return warnings;
    }
};

// Photodiode intensity. The default is the small-modulation expansion with
// lines at DC, Omega_m, Delta and Omega_m +/- Delta; `exact` evaluates
// |eps_pu + eps_pr|^2 without expanding.
inline double beat_intensity(const BeatConfig& cfg, double t,
                             bool exact = false) {
    const double a2 = cfg.eps_a * cfg.eps_a;
    const double m2 = cfg.eps_m * cfg.eps_m;
    const double cm = std::cos(cfg.omega_mod * t);
    if (exact) {
        const double env2 = a2 + m2 * cm;
        return env2 + cfg.eps_b * cfg.eps_b +
               2.0 * cfg.eps_b * std::sqrt(env2) * std::cos(cfg.delta * t);
    }
    const double dc = a2 + cfg.eps_b * cfg.eps_b;
    return dc + m2 * cm + 2.0 * cfg.eps_a * cfg.eps_b * std::cos(cfg.delta * t) +
           (m2 / (2.0 * cfg.eps_a)) * cfg.eps_b *
               (std::cos((cfg.omega_mod + cfg.delta) * t) +
                std::cos((cfg.omega_mod - cfg.delta) * t));
}

// Sampled beat record scaled by a detector gain.
inline std::vector<double> synthesize_beat(const BeatConfig& cfg,
                                           double detector_gain = 1.0,
                                           bool exact = false) {
    const std::size_t n =
        static_cast<std::size_t>(cfg.duration * cfg.sample_rate);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = detector_gain *
                 beat_intensity(cfg, static_cast<double>(i) / cfg.sample_rate,
                                exact);
    return out;
}

struct CalibrationResult {
    double v_car = 0.0;
    double v_sb = 0.0;
    double v_omega_m = 0.0;
    double eps_m_sq = 0.0;        // photons/s
    double a_factor = 0.0;        // detector units per (photons/s)
    double gamma_eps_equiv = 0.0; // dimensionless; 2 Gamma_eps = eps_m^2 / BW
    double gamma_l_equiv = 0.0;   // 2 Gamma_L = phidot^2 / BW
};

// Calibration chain:
//   eps_m^2 = 4 (P_pu / hbar omega_L) V_sb / V_car
//   A = V_Om V_car / (4 eps_a^2 V_sb)
//   2 Gamma_eps = eps_m^2 / BW          2 Gamma_L = phidot^2 / BW
inline CalibrationResult calibrate(double v_car, double v_sb, double v_omega_m,
                                   double p_pump, double omega_L, double bw_hz,
                                   double phidot_amp = 0.0) {
    if (!(v_car > 0.0)) throw DivisionByZero("V_car must be positive");
    if (v_sb < 0.0) throw ConfigError("V_sb must be non-negative");
    if (!(bw_hz > 0.0)) throw ConfigError("measurement bandwidth must be positive");

    CalibrationResult r;
    r.v_car = v_car;
    r.v_sb = v_sb;
    r.v_omega_m = v_omega_m;
    const double eps_a_sq = p_pump / (hbar * omega_L);
    r.eps_m_sq = 4.0 * eps_a_sq * v_sb / v_car;
    if (v_omega_m != 0.0) {
        if (!(v_sb > 0.0))
            throw DivisionByZero("V_sb must be positive to estimate A");
        r.a_factor = v_omega_m * v_car / (4.0 * eps_a_sq * v_sb);
    }
    r.gamma_eps_equiv = r.eps_m_sq / (2.0 * bw_hz);
    r.gamma_l_equiv = phidot_amp * phidot_amp / (2.0 * bw_hz);
    return r;
}

// Strength of an equivalent flat (within BW) amplitude noise: 2 Gamma = eps_m^2 / BW.
inline double equivalent_gamma_eps(double eps_m, double bw_hz) {
    return eps_m * eps_m / (2.0 * bw_hz);
}

inline double equivalent_gamma_l(double phidot_amp, double bw_hz) {
    return phidot_amp * phidot_amp / (2.0 * bw_hz);
}

}  // namespace omnoise
