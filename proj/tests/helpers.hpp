#pragma once

#include <string>

#include "omnoise/config.hpp"

namespace omnoise::testing {

// Fundamental-mode parameter set used across the suite: two membranes in a
// 119 kHz cavity, pump red-detuned by 240 kHz, amplitude noise on the pump.
inline SystemParams table1_params() {
    SystemParams p;
    p.optical[0].omega_L = two_pi * speed_of_light / 1.064e-6;
    p.optical[0].detuning0 = 0.0;
    p.optical[0].kappa1 = hz_to_rad(119e3) / 2.0;
    p.optical[0].kappa2 = hz_to_rad(119e3) / 2.0;
    p.optical[0].power = 3.8e-6;
    p.optical[1] = p.optical[0];
    p.optical[1].detuning0 = hz_to_rad(240e3);
    p.optical[1].power = 67e-6;
    p.mechanical[0] = MechanicalMode::from_temperature(
        hz_to_rad(226764.581), hz_to_rad(1.44), 300.0, 1.74e-10);
    p.mechanical[1] = MechanicalMode::from_temperature(
        hz_to_rad(231887.32), hz_to_rad(8.8), 300.0, 1.74e-10);
    p.couplings.g0 = {{{0.0, hz_to_rad(0.13)}, {0.0, hz_to_rad(0.39)}}};
    p.noise.gamma_eps_strength = {0.0, 3.35e12};
    p.noise.gamma_eps_bw = {0.0, hz_to_rad(2e6)};
    return p;
}

inline QuadratureSelector pump_transmission() {
    QuadratureSelector sel;
    sel.which = Quadrature::X;
    sel.mode_k = 1;
    sel.mirror_l = 1;
    return sel;
}

inline std::string config_path(const char* name) {
    return std::string(OMNOISE_SOURCE_DIR) + "/configs/" + name;
}

}  // namespace omnoise::testing
