#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "omnoise/constants.hpp"
#include "omnoise/errors.hpp"

namespace omnoise {

// Index conventions used throughout:
//   optical mode k: 0 = probe, 1 = pump
//   mechanical mode j: 0 = membrane 1, 1 = membrane 2
//   mirror l: 0 = input, 1 = output
// All rates and frequencies are angular (rad/s).

struct OpticalMode {
    double omega_L = 0.0;    // mean laser angular frequency
    double detuning0 = 0.0;  // cavity-laser detuning before static shift
    double kappa1 = 0.0;     // input mirror decay rate
    double kappa2 = 0.0;     // output mirror decay rate
    double kappa_l = 0.0;    // internal loss rate
    double power = 0.0;      // laser power (W)

    double kappa() const { return kappa1 + kappa2 + kappa_l; }
    double omega_c() const { return omega_L + detuning0; }

    // E = sqrt(P kappa_1 / hbar omega_L), real by phase-reference choice.
    double drive_mean() const {
        if (power <= 0.0 || omega_L <= 0.0) return 0.0;
        return std::sqrt(power * kappa1 / (hbar * omega_L));
    }

    void validate() const {
        if (kappa1 < 0.0 || kappa2 < 0.0 || kappa_l < 0.0)
            throw ConfigError("optical decay rates must be non-negative");
        if (kappa() <= 0.0)
            throw ConfigError("total cavity decay rate must be positive");
        if (power < 0.0) throw ConfigError("laser power must be non-negative");
        if (power > 0.0 && omega_L <= 0.0)
            throw ConfigError("driven mode needs a positive laser frequency");
    }
};

struct MechanicalMode {
    double omega_m = 0.0;   // resonance angular frequency
    double gamma_m = 0.0;   // damping rate
    double mass_eff = 0.0;  // effective mass (kg), metadata only
    double n_th = 0.0;      // thermal occupancy
    double temperature = 0.0;  // bath temperature (K)

    // High-temperature occupancy n = kB T / (hbar omega).
    static double occupancy(double temperature_k, double omega) {
        return k_boltzmann * temperature_k / (hbar * omega);
    }

    static MechanicalMode from_temperature(double omega_m, double gamma_m,
                                           double temperature_k,
                                           double mass_eff = 0.0) {
        MechanicalMode m;
        m.omega_m = omega_m;
        m.gamma_m = gamma_m;
        m.temperature = temperature_k;
        m.n_th = occupancy(temperature_k, omega_m);
        m.mass_eff = mass_eff;
        return m;
    }

    void validate(std::vector<std::string>* warnings = nullptr) const {
        if (omega_m <= 0.0) throw ConfigError("omega_m must be positive");
        if (gamma_m <= 0.0) throw ConfigError("gamma_m must be positive");
        if (n_th < 0.0) throw ConfigError("n_th must be non-negative");
        if (warnings && gamma_m > omega_m / 10.0)
            warnings->push_back(
                "gamma_m > omega_m/10: high-Q steady-state form degrades");
    }
};

// g0[j][k]: coupling of membrane j to optical mode k. Sign carries the sign
// of d(omega_c)/dx.
struct CouplingMatrix {
    std::array<std::array<double, 2>, 2> g0{{{0.0, 0.0}, {0.0, 0.0}}};

    void validate() const {
        for (const auto& row : g0)
            for (double g : row)
                if (!std::isfinite(g))
                    throw ConfigError("coupling entries must be finite");
    }
};

// Lorentzian laser-noise parameters per laser k.
struct NoiseSpec {
    std::array<double, 2> gamma_eps_strength{0.0, 0.0};  // dimensionless
    std::array<double, 2> gamma_eps_bw{0.0, 0.0};        // rad/s
    std::array<double, 2> gamma_l_strength{0.0, 0.0};    // rad/s
    std::array<double, 2> gamma_phi_bw{0.0, 0.0};        // rad/s

    void validate() const {
        for (int k = 0; k < 2; ++k) {
            if (gamma_eps_strength[k] < 0.0 || gamma_l_strength[k] < 0.0)
                throw ConfigError("noise strengths must be non-negative");
            if (gamma_eps_bw[k] < 0.0 || gamma_phi_bw[k] < 0.0)
                throw ConfigError("noise bandwidths must be non-negative");
            if (gamma_eps_strength[k] > 0.0 && gamma_eps_bw[k] <= 0.0)
                throw ConfigError("amplitude noise needs a positive bandwidth");
            if (gamma_l_strength[k] > 0.0 && gamma_phi_bw[k] <= 0.0)
                throw ConfigError("phase noise needs a positive bandwidth");
        }
    }
};

struct SystemParams {
    std::array<OpticalMode, 2> optical;      // [0]=probe, [1]=pump
    std::array<MechanicalMode, 2> mechanical;
    CouplingMatrix couplings;
    NoiseSpec noise;
    double lo_phase = 0.0;       // homodyne quadrature angle (rad)
    bool include_loss_port = false;

    std::vector<std::string> validate() const {
        std::vector<std::string> warnings;
        for (const auto& o : optical) o.validate();
        for (const auto& m : mechanical) m.validate(&warnings);
        couplings.validate();
        noise.validate();
        if (std::abs(optical[0].detuning0) >
            1e-9 * std::max(1.0, optical[0].kappa()))
            warnings.push_back(
                "probe bare detuning is nonzero; the model assumes Delta_1 = 0");
        return warnings;
    }
};

}  // namespace omnoise
