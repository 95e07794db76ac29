#pragma once

#include <Eigen/Dense>

#include "omnoise/transfer.hpp"

namespace omnoise {

enum class Quadrature { X, Y };

// Output port: optical mode k read out at mirror l (0 = input/reflection,
// 1 = output/transmission). Natively supported: transmission of the pump
// (k=1, l=1) and reflection of the probe (k=0, l=0).
struct QuadratureSelector {
    Quadrature which = Quadrature::X;
    int mode_k = 1;
    int mirror_l = 1;
    double lo_phase = 0.0;
    bool allow_generic = false;
};

inline void check_port(const QuadratureSelector& sel) {
    if (sel.mode_k < 0 || sel.mode_k > 1 || sel.mirror_l < 0 || sel.mirror_l > 1)
        throw UnsupportedPort("port indices out of range");
    const bool native = (sel.mode_k == 1 && sel.mirror_l == 1) ||
                        (sel.mode_k == 0 && sel.mirror_l == 0);
    if (!native && !sel.allow_generic)
        throw UnsupportedPort(
            "only pump transmission (t2) and probe reflection (r1) are "
            "supported without the generic-port flag");
}

// Coefficients c_i(omega) such that the selected output quadrature is
// sum_i c_i(omega) n_i(omega) over the noise basis. Includes the input-output
// feed-through -X_in (or -Y_in); the laser amplitude noise rides on the input
// mirror field, so the feed-through picks up eps_k only for mirror l = 0.
inline Eigen::RowVectorXcd output_quadrature_row(const SystemParams& p,
                                                 const SteadyState& ss,
                                                 const QuadratureSelector& sel,
                                                 double omega,
                                                 bool rwa = false) {
    check_port(sel);
    const NoiseBasis basis(p.include_loss_port);
    const TransferMatrix tm = build_system(p, ss, omega, rwa);

    const int k = sel.mode_k;
    const int l = sel.mirror_l;
    const double kap_lk = (l == 0) ? p.optical[k].kappa1 : p.optical[k].kappa2;
    const cplx ep = std::polar(1.0, sel.lo_phase);
    const cplx em = std::conj(ep);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const cplx I(0.0, 1.0);

    Eigen::RowVectorXcd row_a = tm.T.row(var_a(k));
    Eigen::RowVectorXcd row_ad = tm.T.row(var_a_dag(k));
    Eigen::RowVectorXcd c(basis.size());

    if (sel.which == Quadrature::X) {
        c = std::sqrt(kap_lk) * inv_sqrt2 * (ep * row_ad + em * row_a);
        c(basis.a_in(l, k)) -= em * inv_sqrt2;
        c(basis.a_in_dag(l, k)) -= ep * inv_sqrt2;
        if (l == 0) c(basis.eps(k)) -= (ep + em) * inv_sqrt2;
    } else {
        c = std::sqrt(kap_lk) * inv_sqrt2 * I * (ep * row_ad - em * row_a);
        c(basis.a_in(l, k)) += I * em * inv_sqrt2;
        c(basis.a_in_dag(l, k)) -= I * ep * inv_sqrt2;
        if (l == 0) c(basis.eps(k)) -= I * (ep - em) * inv_sqrt2;
    }
    return c;
}

}  // namespace omnoise
