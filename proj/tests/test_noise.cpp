#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace omnoise;
using Catch::Approx;
using testing::table1_params;

TEST_CASE("noise basis index contract", "[noise]") {
    const NoiseBasis basis(false);
    REQUIRE(basis.size() == 16);
    // a_in,lk block: mirror nested inside laser
    REQUIRE(basis.a_in(0, 0) == 0);
    REQUIRE(basis.a_in_dag(0, 0) == 1);
    REQUIRE(basis.a_in(1, 0) == 2);
    REQUIRE(basis.a_in_dag(1, 0) == 3);
    REQUIRE(basis.a_in(0, 1) == 4);
    REQUIRE(basis.a_in(1, 1) == 6);
    REQUIRE(basis.b_in(0) == 8);
    REQUIRE(basis.b_in_dag(0) == 9);
    REQUIRE(basis.b_in(1) == 10);
    REQUIRE(basis.eps(0) == 12);
    REQUIRE(basis.eps(1) == 13);
    REQUIRE(basis.phidot(0) == 14);
    REQUIRE(basis.phidot(1) == 15);

    const NoiseBasis with_loss(true);
    REQUIRE(with_loss.size() == 20);
    REQUIRE(with_loss.a_loss(0) == 16);
    REQUIRE(with_loss.a_loss_dag(1) == 19);

    SECTION("conjugate pairing") {
        for (int i = 0; i < basis.size(); ++i) {
            REQUIRE(basis.conjugate_partner(basis.conjugate_partner(i)) == i);
            const bool real_input = (i >= 12 && i <= 15);
            REQUIRE((basis.conjugate_partner(i) == i) == real_input);
        }
    }
    SECTION("labels match the layout") {
        const auto lbl = with_loss.labels();
        REQUIRE(static_cast<int>(lbl.size()) == with_loss.size());
        REQUIRE(lbl[0] == "a_in,11");
        REQUIRE(lbl[7] == "a_in,22+");
        REQUIRE(lbl[8] == "b_in,1");
        REQUIRE(lbl[12] == "eps_1");
        REQUIRE(lbl[15] == "phidot_2");
        REQUIRE(lbl[16] == "a_in,l1");
    }
}

TEST_CASE("laser noise spectral densities", "[noise]") {
    NoiseSpec spec;
    spec.gamma_eps_strength = {0.0, 3.35e12};
    spec.gamma_eps_bw = {0.0, hz_to_rad(2e6)};
    spec.gamma_l_strength = {hz_to_rad(1.55e10), 0.0};
    spec.gamma_phi_bw = {hz_to_rad(1e6), 0.0};

    SECTION("zero-frequency level is 2 Gamma") {
        REQUIRE(amplitude_noise_psd(spec, 1, 0.0) ==
                Approx(2.0 * 3.35e12).epsilon(1e-14));
        REQUIRE(phase_noise_psd(spec, 0, 0.0) ==
                Approx(2.0 * hz_to_rad(1.55e10)).epsilon(1e-14));
    }
    SECTION("half power at the corner frequency, even in omega") {
        const double g = spec.gamma_eps_bw[1];
        REQUIRE(amplitude_noise_psd(spec, 1, g) ==
                Approx(3.35e12).epsilon(1e-14));
        for (double w : {0.1 * g, g, 5.0 * g})
            REQUIRE(amplitude_noise_psd(spec, 1, w) ==
                    amplitude_noise_psd(spec, 1, -w));
    }
    SECTION("silent channels stay zero") {
        REQUIRE(amplitude_noise_psd(spec, 0, 1.0) == 0.0);
        REQUIRE(phase_noise_psd(spec, 1, 1.0) == 0.0);
    }
    SECTION("white limit: flat within 1% when bandwidth >> band of interest") {
        NoiseSpec wide = spec;
        const double wm = hz_to_rad(230e3);
        wide.gamma_eps_bw[1] = 1000.0 * wm;
        const double s0 = amplitude_noise_psd(wide, 1, 0.0);
        for (double w = 0.0; w <= wm; w += wm / 8.0)
            REQUIRE(amplitude_noise_psd(wide, 1, w) ==
                    Approx(s0).epsilon(0.01));
    }
}

TEST_CASE("correlation matrix", "[noise]") {
    SystemParams p = table1_params();
    p.noise.gamma_l_strength = {0.0, hz_to_rad(1.55e10)};
    p.noise.gamma_phi_bw = {0.0, hz_to_rad(2e6)};
    const NoiseBasis basis(false);
    const double w = p.mechanical[0].omega_m;

    SECTION("quantum orderings") {
        const Eigen::MatrixXd C = correlation_matrix(p, w);
        for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l) {
                REQUIRE(C(basis.a_in(l, k), basis.a_in_dag(l, k)) == 1.0);
                REQUIRE(C(basis.a_in_dag(l, k), basis.a_in(l, k)) == 0.0);
            }
        for (int j = 0; j < 2; ++j) {
            const double n = p.mechanical[j].n_th;
            REQUIRE(C(basis.b_in(j), basis.b_in_dag(j)) == Approx(n + 1.0));
            REQUIRE(C(basis.b_in_dag(j), basis.b_in(j)) == Approx(n));
        }
        REQUIRE(C(basis.eps(1), basis.eps(1)) ==
                Approx(amplitude_noise_psd(p.noise, 1, w)));
        REQUIRE(C(basis.phidot(1), basis.phidot(1)) ==
                Approx(phase_noise_psd(p.noise, 1, w)));
        // distinct channels are uncorrelated
        REQUIRE(C(basis.a_in(0, 0), basis.a_in_dag(1, 0)) == 0.0);
        REQUIRE(C(basis.b_in(0), basis.b_in_dag(1)) == 0.0);
        REQUIRE(C(basis.eps(0), basis.eps(1)) == 0.0);
    }

    SECTION("symmetrized variant is symmetric with half-quanta") {
        const Eigen::MatrixXd C = correlation_matrix(p, w, true);
        REQUIRE((C - C.transpose()).cwiseAbs().maxCoeff() == 0.0);
        REQUIRE(C(basis.a_in(1, 1), basis.a_in_dag(1, 1)) == 0.5);
        REQUIRE(C(basis.b_in(0), basis.b_in_dag(0)) ==
                Approx(p.mechanical[0].n_th + 0.5));
        // classical channels are unchanged
        REQUIRE(C(basis.eps(1), basis.eps(1)) ==
                Approx(amplitude_noise_psd(p.noise, 1, w)));
    }

    SECTION("loss port rows appear only when requested") {
        SystemParams pl = p;
        pl.include_loss_port = true;
        const Eigen::MatrixXd C = correlation_matrix(pl, w);
        REQUIRE(C.rows() == 20);
        const NoiseBasis bl(true);
        REQUIRE(C(bl.a_loss(0), bl.a_loss_dag(0)) == 1.0);
    }
}
