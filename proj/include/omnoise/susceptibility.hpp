#pragma once

#include <complex>

#include "omnoise/params.hpp"
#include "omnoise/steady_state.hpp"

namespace omnoise {

// Bare cavity susceptibility 1/(kappa/2 - i(omega - Delta)).
inline cplx chi_c(double kappa, double detuning, double omega) {
    return 1.0 / cplx(kappa / 2.0, -(omega - detuning));
}

inline cplx chi_c(const OpticalMode& mode, double detuning, double omega) {
    return chi_c(mode.kappa(), detuning, omega);
}

// Bare mechanical susceptibility 1/(gamma/2 - i(omega - omega_m)).
inline cplx chi_m(double gamma_m, double omega_m, double omega) {
    return 1.0 / cplx(gamma_m / 2.0, -(omega - omega_m));
}

inline cplx chi_m(const MechanicalMode& mode, double omega) {
    return chi_m(mode.gamma_m, mode.omega_m, omega);
}

// sigma_k(omega) = i |alpha_k|^2 [chi_c*(-omega) - chi_c(omega)].
inline cplx sigma_k(const SteadyState& ss, const SystemParams& p, int k,
                    double omega) {
    const double kap = p.optical[k].kappa();
    const double det = ss.detuning[k];
    return cplx(0.0, 1.0) * std::norm(ss.alpha[k]) *
           (std::conj(chi_c(kap, det, -omega)) - chi_c(kap, det, omega));
}

// sigma_jk(omega) = g0_jk^2 sigma_k(omega).
inline cplx sigma_jk(const SteadyState& ss, const SystemParams& p, int j,
                     int k, double omega) {
    const double g0 = p.couplings.g0[j][k];
    return g0 * g0 * sigma_k(ss, p, k, omega);
}

namespace detail {

inline void check_pole(const cplx& inv, double scale, const char* what) {
    if (std::abs(inv) <= 1e-13 * scale)
        throw PoleError(std::string(what) +
                        " inverse susceptibility vanished at requested omega");
}

}  // namespace detail

// Dressed susceptibility: [chi'_mj]^-1 = [chi_mj]^-1 + i sum_k sigma_jk.
inline cplx chi_m_dressed(int j, const SteadyState& ss, const SystemParams& p,
                          double omega) {
    cplx inv = 1.0 / chi_m(p.mechanical[j], omega);
    double scale = std::abs(inv);
    for (int k = 0; k < 2; ++k) {
        const cplx s = cplx(0.0, 1.0) * sigma_jk(ss, p, j, k, omega);
        inv += s;
        scale += std::abs(s);
    }
    detail::check_pole(inv, scale, "dressed mechanical");
    return 1.0 / inv;
}

// Effective susceptibility in rotating wave approximation. The cross-membrane
// factor defaults to the dressed chi' of the other membrane; the bare variant
// is kept for comparison.
inline cplx chi_m_rwa(int j, const SteadyState& ss, const SystemParams& p,
                      double omega, bool bare_cross = false) {
    const int o = 1 - j;
    const cplx chi_cross = bare_cross ? chi_m(p.mechanical[o], omega)
                                      : chi_m_dressed(o, ss, p, omega);
    cplx inv = 1.0 / chi_m_dressed(j, ss, p, omega);
    double scale = std::abs(inv);
    const cplx s0 = sigma_k(ss, p, 0, omega);
    const cplx s1 = sigma_k(ss, p, 1, omega);
    const cplx sig[2] = {s0, s1};
    cplx cross = 0.0;
    for (int k = 0; k < 2; ++k)
        for (int kp = 0; kp < 2; ++kp)
            cross += p.couplings.g0[j][k] * p.couplings.g0[j][kp] * sig[k] *
                     sig[kp] * p.couplings.g0[o][k] * p.couplings.g0[o][kp];
    cross *= chi_cross;
    inv += cross;
    scale += std::abs(cross);
    detail::check_pole(inv, scale, "RWA mechanical");
    return 1.0 / inv;
}

}  // namespace omnoise
