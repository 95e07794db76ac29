#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

#include "omnoise/params.hpp"

namespace omnoise {

using cplx = std::complex<double>;

struct SteadyState {
    std::array<cplx, 2> alpha{};      // intracavity amplitudes
    std::array<double, 2> xbar{};     // static dimensionless displacements
    std::array<double, 2> detuning{}; // self-consistent detunings (rad/s)
    std::array<std::array<cplx, 2>, 2> g_eff{};  // g_jk = g0_jk * alpha_k

    // Distinct fixed points found from additional seeds, when any.
    std::vector<std::array<double, 2>> extra_branches;
};

namespace detail {

inline std::array<double, 2> steady_map(const SystemParams& p,
                                        const std::array<double, 2>& xbar,
                                        std::array<double, 2>* detuning_out,
                                        std::array<cplx, 2>* alpha_out) {
    std::array<double, 2> det{};
    std::array<cplx, 2> alpha{};
    for (int k = 0; k < 2; ++k) {
        det[k] = p.optical[k].detuning0;
        for (int j = 0; j < 2; ++j) det[k] -= p.couplings.g0[j][k] * xbar[j];
        alpha[k] = p.optical[k].drive_mean() /
                   cplx(p.optical[k].kappa() / 2.0, det[k]);
    }
    std::array<double, 2> xnew{};
    for (int j = 0; j < 2; ++j) {
        double s = 0.0;
        for (int k = 0; k < 2; ++k)
            s += p.couplings.g0[j][k] * std::norm(alpha[k]);
        xnew[j] = 2.0 * s / p.mechanical[j].omega_m;
    }
    if (detuning_out) *detuning_out = det;
    if (alpha_out) *alpha_out = alpha;
    return xnew;
}

}  // namespace detail

// Damped fixed-point iteration of the coupled system
// {alpha_k(Delta_k), xbar_j(|alpha_k|^2), Delta_k(xbar_j)}.
// Three seeds probe for bistable branches.
inline SteadyState solve_steady_state(const SystemParams& params,
                                      double rel_tol = 1e-12,
                                      int max_iter = 2000) {
    const double damping = 0.5;

    auto run_seed = [&](std::array<double, 2> x,
                        std::array<double, 2>* out) -> bool {
        for (int it = 0; it < max_iter; ++it) {
            const auto xn = detail::steady_map(params, x, nullptr, nullptr);
            double err = 0.0, scale = 0.0;
            for (int j = 0; j < 2; ++j) {
                err = std::max(err, std::abs(xn[j] - x[j]));
                scale = std::max(scale, std::abs(xn[j]));
                x[j] += damping * (xn[j] - x[j]);
            }
            if (err <= rel_tol * std::max(scale, 1e-300)) {
                *out = x;
                return true;
            }
        }
        return false;
    };

    std::array<double, 2> base{};
    const bool ok = run_seed({0.0, 0.0}, &base);
    if (!ok)
        throw ConvergenceError(
            "steady state did not converge from the unperturbed seed "
            "(possible bistability)");

    SteadyState ss;
    ss.xbar = base;
    detail::steady_map(params, ss.xbar, &ss.detuning, &ss.alpha);

    // Perturbed seeds; a distinct converged point signals bistability.
    for (double f : {0.8, 1.2}) {
        std::array<double, 2> x0{f * base[0], f * base[1]};
        std::array<double, 2> x{};
        if (run_seed(x0, &x)) {
            const double scale =
                std::max({std::abs(base[0]), std::abs(base[1]), 1e-12});
            if (std::abs(x[0] - base[0]) + std::abs(x[1] - base[1]) >
                1e-6 * scale)
                ss.extra_branches.push_back(x);
        }
    }

    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
            ss.g_eff[j][k] = params.couplings.g0[j][k] * ss.alpha[k];
    return ss;
}

// Largest relative residual of the three fixed-point equations.
inline double steady_state_residual(const SystemParams& p,
                                    const SteadyState& ss) {
    double r = 0.0;
    for (int k = 0; k < 2; ++k) {
        double det = p.optical[k].detuning0;
        for (int j = 0; j < 2; ++j) det -= p.couplings.g0[j][k] * ss.xbar[j];
        const double det_scale =
            std::max({std::abs(det), p.optical[k].kappa(), 1e-300});
        r = std::max(r, std::abs(det - ss.detuning[k]) / det_scale);

        const cplx a = p.optical[k].drive_mean() /
                       cplx(p.optical[k].kappa() / 2.0, ss.detuning[k]);
        const double a_scale = std::max(std::abs(a), 1e-300);
        r = std::max(r, std::abs(a - ss.alpha[k]) / a_scale);
    }
    for (int j = 0; j < 2; ++j) {
        double s = 0.0;
        for (int k = 0; k < 2; ++k)
            s += p.couplings.g0[j][k] * std::norm(ss.alpha[k]);
        const double xj = 2.0 * s / p.mechanical[j].omega_m;
        const double x_scale = std::max(std::abs(xj), 1e-300);
        if (xj != 0.0 || ss.xbar[j] != 0.0)
            r = std::max(r, std::abs(xj - ss.xbar[j]) / x_scale);
    }
    return r;
}

}  // namespace omnoise
