#include <catch2/catch_amalgamated.hpp>

#include "acceptance.hpp"
#include "helpers.hpp"

using namespace omnoise;
using Catch::Approx;
using testing::table1_params;

namespace {
const double kappa = hz_to_rad(119e3);
const double delta = hz_to_rad(240e3);
}  // namespace

TEST_CASE("bare cavity susceptibility", "[model]") {
    SECTION("real 2/kappa on resonance") {
        const cplx v = chi_c(kappa, delta, delta);
        REQUIRE(v.real() == Approx(2.0 / kappa).epsilon(1e-14));
        REQUIRE(v.imag() == Approx(0.0).margin(1e-20));
    }
    SECTION("zero-frequency value against independent arithmetic") {
        const cplx v = chi_c(kappa, delta, 0.0);
        // 1/(kappa/2 + i Delta) evaluated separately
        REQUIRE(v.real() == Approx(1.5488518797302552e-07).epsilon(1e-12));
        REQUIRE(v.imag() == Approx(-6.247469766979181e-07).epsilon(1e-12));
    }
    SECTION("decays at large detuning from resonance") {
        REQUIRE(std::abs(chi_c(kappa, delta, 1e12)) < 1e-11);
        REQUIRE(std::abs(chi_c(kappa, delta, -1e12)) < 1e-11);
    }
}

TEST_CASE("bare mechanical susceptibility", "[model]") {
    const double wm = hz_to_rad(226764.581);
    const double gm = hz_to_rad(1.44);
    REQUIRE(chi_m(gm, wm, wm) == cplx(2.0 / gm, 0.0));
    REQUIRE(std::abs(chi_m(gm, wm, wm)) ==
            Approx(0.22104853207207686).epsilon(1e-12));
    // wm + gm/2 rounds in the last place of wm, so allow ~1e3 ulp slack
    const double p0 = std::norm(chi_m(gm, wm, wm));
    REQUIRE(std::norm(chi_m(gm, wm, wm + gm / 2.0)) ==
            Approx(p0 / 2.0).epsilon(1e-9));
    REQUIRE(std::norm(chi_m(gm, wm, wm - gm / 2.0)) ==
            Approx(p0 / 2.0).epsilon(1e-9));
}

TEST_CASE("optical self-energy sigma_k", "[model]") {
    SystemParams p = table1_params();
    SteadyState ss = solve_steady_state(p);
    const double w = p.mechanical[0].omega_m;

    SECTION("vanishes at zero detuning") {
        REQUIRE(std::abs(sigma_k(ss, p, 0, w)) < 1e-30);
    }
    SECTION("vanishes without intracavity field") {
        SystemParams p0 = p;
        p0.optical[1].power = 0.0;
        SteadyState ss0 = solve_steady_state(p0);
        REQUIRE(std::abs(sigma_k(ss0, p0, 1, w)) == 0.0);
    }
    SECTION("matches the defining bracket evaluated independently") {
        const double kap = p.optical[1].kappa();
        const double det = ss.detuning[1];
        const cplx lhs = sigma_k(ss, p, 1, w);
        const cplx bracket =
            std::conj(1.0 / cplx(kap / 2.0, -(-w - det))) -
            1.0 / cplx(kap / 2.0, -(w - det));
        const cplx rhs = cplx(0.0, 1.0) * std::norm(ss.alpha[1]) * bracket;
        REQUIRE(std::abs(lhs - rhs) < 1e-14 * std::abs(rhs));
    }
}

TEST_CASE("dressed susceptibility", "[model]") {
    SystemParams p = table1_params();

    SECTION("reduces to bare form without coupling") {
        SystemParams p0 = p;
        p0.couplings = {};
        SteadyState ss0 = solve_steady_state(p0);
        for (double w : {0.9, 1.0, 1.1})
            for (int j = 0; j < 2; ++j) {
                const double om = w * p0.mechanical[j].omega_m;
                REQUIRE(std::abs(chi_m_dressed(j, ss0, p0, om) /
                                     chi_m(p0.mechanical[j], om) -
                                 1.0) < 1e-13);
            }
    }

    SECTION("optical spring reverses with the detuning sign") {
        auto argmax = [&](const SystemParams& pp) {
            SteadyState ss = solve_steady_state(pp);
            const double wm = pp.mechanical[1].omega_m;
            const double gm = pp.mechanical[1].gamma_m;
            double best = -1.0, wbest = wm;
            for (double w = wm - 6.0 * gm; w <= wm + 6.0 * gm; w += gm / 200.0) {
                const double v = std::norm(chi_m_dressed(1, ss, pp, w));
                if (v > best) {
                    best = v;
                    wbest = w;
                }
            }
            return wbest - wm;
        };
        SystemParams red = p, blue = p;
        blue.optical[1].detuning0 = -p.optical[1].detuning0;
        const double shift_red = argmax(red);
        const double shift_blue = argmax(blue);
        REQUIRE(shift_red * shift_blue < 0.0);
    }

    SECTION("red detuning broadens the effective linewidth") {
        SteadyState ss = solve_steady_state(p);
        for (int j = 0; j < 2; ++j) {
            const cplx inv = 1.0 / chi_m_dressed(j, ss, p, p.mechanical[j].omega_m);
            REQUIRE(inv.real() >= p.mechanical[j].gamma_m / 2.0);
        }
    }
}

TEST_CASE("rotating-wave effective susceptibility", "[model]") {
    SystemParams p = table1_params();
    SteadyState ss = solve_steady_state(p);

    SECTION("reduces to the dressed form when the partner is decoupled") {
        SystemParams p1 = p;
        p1.couplings.g0[1] = {0.0, 0.0};  // membrane 2 decoupled
        SteadyState ss1 = solve_steady_state(p1);
        const double w = p1.mechanical[0].omega_m;
        REQUIRE(std::abs(chi_m_rwa(0, ss1, p1, w) /
                             chi_m_dressed(0, ss1, p1, w) -
                         1.0) < 1e-13);
    }

    SECTION("matches the linear-system solve with counter-rotating terms dropped") {
        const double wm = p.mechanical[0].omega_m;
        for (double off : {-4.0, -1.0, 0.0, 1.5, 4.0}) {
            const double w = wm + off * p.mechanical[0].gamma_m;
            const Eigen::RowVectorXcd closed =
                acceptance::detail::closed_rwa_row(p, ss, 0, w);
            const Eigen::RowVectorXcd solved =
                build_system(p, ss, w, true).T.row(var_b(0));
            const double scale = closed.cwiseAbs().maxCoeff();
            REQUIRE((solved - closed).cwiseAbs().maxCoeff() < 1e-10 * scale);
        }
    }
}

TEST_CASE("steady state", "[model]") {
    SystemParams p = table1_params();

    SECTION("decoupled fixed point in one step") {
        SystemParams p0 = p;
        p0.couplings = {};
        SteadyState ss = solve_steady_state(p0);
        REQUIRE(ss.xbar[0] == 0.0);
        REQUIRE(ss.xbar[1] == 0.0);
        REQUIRE(ss.detuning[1] == p0.optical[1].detuning0);
        const cplx expect = p0.optical[1].drive_mean() /
                            cplx(p0.optical[1].kappa() / 2.0,
                                 p0.optical[1].detuning0);
        REQUIRE(std::abs(ss.alpha[1] - expect) < 1e-12 * std::abs(expect));
    }

    SECTION("undriven system stays dark") {
        SystemParams p0 = p;
        p0.optical[0].power = 0.0;
        p0.optical[1].power = 0.0;
        SteadyState ss = solve_steady_state(p0);
        REQUIRE(std::abs(ss.alpha[0]) == 0.0);
        REQUIRE(std::abs(ss.alpha[1]) == 0.0);
        REQUIRE(ss.xbar[0] == 0.0);
    }

    SECTION("pump photon number and residuals") {
        SteadyState ss = solve_steady_state(p);
        REQUIRE(p.optical[1].drive_mean() ==
                Approx(11582925588.116283).epsilon(1e-9));
        REQUIRE(std::norm(ss.alpha[1]) == Approx(5.5583973e7).epsilon(1e-2));
        REQUIRE(steady_state_residual(p, ss) < 1e-10);
        REQUIRE(ss.extra_branches.empty());
    }
}

TEST_CASE("frequency-domain system", "[model]") {
    SystemParams p = table1_params();
    SteadyState ss = solve_steady_state(p);
    const double w = p.mechanical[0].omega_m;

    SECTION("solution satisfies M T = N") {
        const TransferMatrix tm = build_system(p, ss, w, false);
        const double res = (tm.M * tm.T - tm.N).cwiseAbs().maxCoeff() /
                           tm.N.cwiseAbs().maxCoeff();
        REQUIRE(res < 1e-10);
    }

    SECTION("decoupled optical rows are bare cavity responses") {
        SystemParams p0 = p;
        p0.couplings = {};
        SteadyState ss0 = solve_steady_state(p0);
        const NoiseBasis basis(false);
        const TransferMatrix tm = build_system(p0, ss0, w, false);
        for (int k = 0; k < 2; ++k) {
            const cplx chi = chi_c(p0.optical[k].kappa(), ss0.detuning[k], w);
            REQUIRE(std::abs(tm.T(var_a(k), basis.a_in(0, k)) -
                             chi * std::sqrt(p0.optical[k].kappa1)) <
                    1e-12 * std::abs(chi));
            REQUIRE(std::abs(tm.T(var_a(k), basis.a_in(1, k)) -
                             chi * std::sqrt(p0.optical[k].kappa2)) <
                    1e-12 * std::abs(chi));
            REQUIRE(std::abs(tm.T(var_a(k), basis.phidot(k)) -
                             chi * cplx(0.0, 1.0) * ss0.alpha[k]) <
                    1e-12 * std::abs(chi) * std::abs(ss0.alpha[k]) + 1e-30);
        }
    }

    SECTION("creation rows mirror annihilation rows under conjugation") {
        const NoiseBasis basis(false);
        const TransferMatrix tp = build_system(p, ss, w, false);
        const TransferMatrix tn = build_system(p, ss, -w, false);
        for (int k = 0; k < 2; ++k)
            for (int i = 0; i < basis.size(); ++i) {
                const cplx lhs = tp.T(var_a_dag(k), i);
                const cplx rhs =
                    std::conj(tn.T(var_a(k), basis.conjugate_partner(i)));
                REQUIRE(std::abs(lhs - rhs) <=
                        1e-10 * tp.T.cwiseAbs().maxCoeff());
            }
    }
}

TEST_CASE("parameter validation", "[model]") {
    SystemParams p = table1_params();
    SECTION("negative decay rejected") {
        p.optical[0].kappa1 = -1.0;
        REQUIRE_THROWS_AS(p.validate(), ConfigError);
    }
    SECTION("amplitude noise needs a bandwidth") {
        p.noise.gamma_eps_bw[1] = 0.0;
        REQUIRE_THROWS_AS(p.validate(), ConfigError);
    }
    SECTION("nonzero probe detuning warns") {
        p.optical[0].detuning0 = hz_to_rad(10.0);
        REQUIRE_FALSE(p.validate().empty());
    }
}
