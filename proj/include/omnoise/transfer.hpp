#pragma once

#include <Eigen/Dense>
#include <complex>
#include <sstream>

#include "omnoise/noise_model.hpp"
#include "omnoise/susceptibility.hpp"

namespace omnoise {

// Fluctuation variable order: a_1, a_1+, a_2, a_2+, b_1, b_1+, b_2, b_2+.
inline constexpr int var_a(int k) { return 2 * k; }
inline constexpr int var_a_dag(int k) { return 2 * k + 1; }
inline constexpr int var_b(int j) { return 4 + 2 * j; }
inline constexpr int var_b_dag(int j) { return 4 + 2 * j + 1; }

using Matrix8c = Eigen::Matrix<cplx, 8, 8>;
using Matrix8Xc = Eigen::Matrix<cplx, 8, Eigen::Dynamic>;

struct TransferMatrix {
    Matrix8c M;    // system matrix over the 8 fluctuation variables
    Matrix8Xc N;   // input map over the noise basis
    Matrix8Xc T;   // M^-1 N
    double cond = 0.0;
    bool rwa = false;
};

namespace detail {

inline void fill_system(const SystemParams& p, const SteadyState& ss,
                        double omega, Matrix8c& M, Matrix8Xc& N) {
    const NoiseBasis basis(p.include_loss_port);
    M.setZero();
    N.setZero(8, basis.size());
    const cplx I(0.0, 1.0);

    for (int k = 0; k < 2; ++k) {
        const double kap = p.optical[k].kappa();
        const double det = ss.detuning[k];
        M(var_a(k), var_a(k)) = 1.0 / chi_c(kap, det, omega);
        M(var_a_dag(k), var_a_dag(k)) = 1.0 / std::conj(chi_c(kap, det, -omega));
        for (int j = 0; j < 2; ++j) {
            const cplx g = ss.g_eff[j][k];
            M(var_a(k), var_b(j)) = -I * g;
            M(var_a(k), var_b_dag(j)) = -I * g;
            M(var_a_dag(k), var_b(j)) = I * std::conj(g);
            M(var_a_dag(k), var_b_dag(j)) = I * std::conj(g);
        }
        const double sk1 = std::sqrt(p.optical[k].kappa1);
        const double sk2 = std::sqrt(p.optical[k].kappa2);
        N(var_a(k), basis.a_in(0, k)) = sk1;
        N(var_a(k), basis.a_in(1, k)) = sk2;
        N(var_a(k), basis.eps(k)) = sk1;  // eps is real: same entry in both rows
        N(var_a(k), basis.phidot(k)) = I * ss.alpha[k];
        N(var_a_dag(k), basis.a_in_dag(0, k)) = sk1;
        N(var_a_dag(k), basis.a_in_dag(1, k)) = sk2;
        N(var_a_dag(k), basis.eps(k)) = sk1;
        N(var_a_dag(k), basis.phidot(k)) = -I * std::conj(ss.alpha[k]);
        if (p.include_loss_port) {
            const double skl = std::sqrt(p.optical[k].kappa_l);
            N(var_a(k), basis.a_loss(k)) = skl;
            N(var_a_dag(k), basis.a_loss_dag(k)) = skl;
        }
    }

    for (int j = 0; j < 2; ++j) {
        const auto& m = p.mechanical[j];
        M(var_b(j), var_b(j)) = 1.0 / chi_m(m, omega);
        M(var_b_dag(j), var_b_dag(j)) = 1.0 / std::conj(chi_m(m, -omega));
        for (int k = 0; k < 2; ++k) {
            const cplx g = ss.g_eff[j][k];
            M(var_b(j), var_a(k)) = -I * std::conj(g);
            M(var_b(j), var_a_dag(k)) = -I * g;
            M(var_b_dag(j), var_a(k)) = I * std::conj(g);
            M(var_b_dag(j), var_a_dag(k)) = I * g;
        }
        const double sg = std::sqrt(m.gamma_m);
        N(var_b(j), basis.b_in(j)) = sg;
        N(var_b_dag(j), basis.b_in_dag(j)) = sg;
    }
}

}  // namespace detail

// Assembles M and N at omega and solves T = M^-1 N.
//
// Full path: direct 8x8 solve, guarded by a condition-number check.
//
// RWA path: the optical block is eliminated exactly (Schur complement onto
// the four mechanical variables), then the counter-rotating couplings between
// the b and b+ sectors are dropped, so the solved b_j reproduces the closed
// rotating-wave form and b_j+ its conjugate mirror.
inline TransferMatrix build_system(const SystemParams& p, const SteadyState& ss,
                                   double omega, bool rwa = false) {
    TransferMatrix tm;
    tm.rwa = rwa;
    detail::fill_system(p, ss, omega, tm.M, tm.N);

    Eigen::JacobiSVD<Matrix8c> svd(tm.M);
    const auto& sv = svd.singularValues();
    tm.cond = sv(0) / sv(sv.size() - 1);
    if (!(tm.cond < 1e14)) {
        std::ostringstream msg;
        msg << "system matrix is singular at omega = " << omega
            << " rad/s (cond = " << tm.cond << ")";
        throw SingularSystemError(msg.str());
    }

    if (!rwa) {
        tm.T = tm.M.partialPivLu().solve(tm.N);
        return tm;
    }

    using M4 = Eigen::Matrix<cplx, 4, 4>;
    using M4X = Eigen::Matrix<cplx, 4, Eigen::Dynamic>;
    const M4 Aoo = tm.M.topLeftCorner<4, 4>();
    const M4 Aom = tm.M.topRightCorner<4, 4>();
    const M4 Amo = tm.M.bottomLeftCorner<4, 4>();
    const M4 Amm = tm.M.bottomRightCorner<4, 4>();
    const auto lu_oo = Aoo.partialPivLu();
    const M4X No = tm.N.topRows<4>();
    const M4X Nm = tm.N.bottomRows<4>();

    M4 R = Amm - Amo * lu_oo.solve(Aom);
    M4X Rn = Nm - Amo * lu_oo.solve(No);
    // Counter-rotating entries couple the {b} and {b+} sectors
    // (even/odd index parity within the mechanical block).
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            if ((r % 2) != (c % 2)) R(r, c) = 0.0;

    const M4X Tb = R.partialPivLu().solve(Rn);
    const M4X Ta = lu_oo.solve(No - Aom * Tb);
    tm.T.resize(8, tm.N.cols());
    tm.T.topRows<4>() = Ta;
    tm.T.bottomRows<4>() = Tb;
    return tm;
}

}  // namespace omnoise
