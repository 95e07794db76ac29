#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "omnoise/params.hpp"

namespace omnoise {

// Ordered noise-input basis. The index map is part of the public contract:
//   0..7   a_in,11  a_in,11+  a_in,21  a_in,21+  a_in,12  a_in,12+  a_in,22  a_in,22+
//          (mirror l = 1,2 nested inside laser k = 1,2)
//   8..11  b_in,1  b_in,1+  b_in,2  b_in,2+
//   12..13 eps_1  eps_2
//   14..15 phidot_1  phidot_2
//   16..19 (only with the loss port) a_in,l1  a_in,l1+  a_in,l2  a_in,l2+
class NoiseBasis {
public:
    explicit NoiseBasis(bool loss_port = false) : loss_port_(loss_port) {}

    int size() const { return loss_port_ ? 20 : 16; }
    bool has_loss_port() const { return loss_port_; }

    // mirror l in {0,1}, laser k in {0,1}
    int a_in(int l, int k) const { return 4 * k + 2 * l; }
    int a_in_dag(int l, int k) const { return a_in(l, k) + 1; }
    int b_in(int j) const { return 8 + 2 * j; }
    int b_in_dag(int j) const { return b_in(j) + 1; }
    int eps(int k) const { return 12 + k; }
    int phidot(int k) const { return 14 + k; }
    int a_loss(int k) const { return 16 + 2 * k; }
    int a_loss_dag(int k) const { return a_loss(k) + 1; }

    // Index of the conjugate partner; eps and phidot are real (self-paired).
    int conjugate_partner(int i) const {
        if (i >= 12 && i <= 15) return i;
        return (i % 2 == 0) ? i + 1 : i - 1;
    }

    std::vector<std::string> labels() const {
        std::vector<std::string> out;
        for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l) {
                out.push_back("a_in," + std::to_string(l + 1) +
                              std::to_string(k + 1));
                out.push_back(out.back() + "+");
            }
        for (int j = 0; j < 2; ++j) {
            out.push_back("b_in," + std::to_string(j + 1));
            out.push_back(out.back() + "+");
        }
        for (int k = 0; k < 2; ++k) out.push_back("eps_" + std::to_string(k + 1));
        for (int k = 0; k < 2; ++k)
            out.push_back("phidot_" + std::to_string(k + 1));
        if (loss_port_)
            for (int k = 0; k < 2; ++k) {
                out.push_back("a_in,l" + std::to_string(k + 1));
                out.push_back(out.back() + "+");
            }
        return out;
    }

private:
    bool loss_port_;
};

// Lorentzian PSD of the laser amplitude noise, Gamma_eps * 2 gamma^2 / (gamma^2 + w^2).
inline double amplitude_noise_psd(const NoiseSpec& spec, int k, double omega) {
    const double G = spec.gamma_eps_strength[k];
    if (G == 0.0) return 0.0;
    const double g = spec.gamma_eps_bw[k];
    return G * 2.0 * g * g / (g * g + omega * omega);
}

// Lorentzian PSD of the laser phase-frequency noise.
inline double phase_noise_psd(const NoiseSpec& spec, int k, double omega) {
    const double G = spec.gamma_l_strength[k];
    if (G == 0.0) return 0.0;
    const double g = spec.gamma_phi_bw[k];
    return G * 2.0 * g * g / (g * g + omega * omega);
}

// Frequency-dependent correlation matrix C(omega), interpreted through
// <n_i(w) n_j(w')> = 2 pi C_ij(w) delta(w + w'). With `symmetrized` the
// quantum correlators are replaced by their symmetric part (vacuum 1/2 per
// ordering, thermal n+1/2), matching what a classical stochastic integration
// can reproduce.
inline Eigen::MatrixXd correlation_matrix(const SystemParams& p, double omega,
                                          bool symmetrized = false) {
    const NoiseBasis basis(p.include_loss_port);
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(basis.size(), basis.size());
    for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
            C(basis.a_in(l, k), basis.a_in_dag(l, k)) =
                symmetrized ? 0.5 : 1.0;  // vacuum
            if (symmetrized) C(basis.a_in_dag(l, k), basis.a_in(l, k)) = 0.5;
        }
    for (int j = 0; j < 2; ++j) {
        const double n = p.mechanical[j].n_th;
        C(basis.b_in(j), basis.b_in_dag(j)) = symmetrized ? n + 0.5 : n + 1.0;
        C(basis.b_in_dag(j), basis.b_in(j)) = symmetrized ? n + 0.5 : n;
    }
    for (int k = 0; k < 2; ++k) {
        C(basis.eps(k), basis.eps(k)) = amplitude_noise_psd(p.noise, k, omega);
        C(basis.phidot(k), basis.phidot(k)) = phase_noise_psd(p.noise, k, omega);
    }
    if (p.include_loss_port)
        for (int k = 0; k < 2; ++k) {
            C(basis.a_loss(k), basis.a_loss_dag(k)) = symmetrized ? 0.5 : 1.0;
            if (symmetrized) C(basis.a_loss_dag(k), basis.a_loss(k)) = 0.5;
        }
    return C;
}

}  // namespace omnoise
