#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "omnoise/fitting.hpp"

using namespace omnoise;
using Catch::Approx;
using testing::pump_transmission;
using testing::table1_params;

namespace {

SpectrumResult sample_peaks(const std::vector<LorentzianPeak>& peaks,
                            double lo, double hi, double step,
                            double rel_noise = 0.0, std::uint64_t seed = 1) {
    SpectrumResult s;
    NormalSampler rng(seed);
    for (double w = lo; w <= hi; w += step) {
        double v = 0.0;
        for (const auto& p : peaks) v += p.value(w) - p.offset;
        v += peaks.front().offset;
        if (rel_noise > 0.0) v *= 1.0 + rel_noise * rng();
        s.omega.push_back(w);
        s.values.push_back(v);
    }
    return s;
}

}  // namespace

TEST_CASE("single Lorentzian recovery", "[fitting]") {
    LorentzianPeak truth;
    truth.center = 2000.0;
    truth.fwhm = 30.0;
    truth.area = 5.0;
    truth.offset = 0.2;
    const auto data = sample_peaks({truth}, 1500.0, 2500.0, 1.0);

    const auto [peaks, rep] = fit_lorentzians(data, 1, {{2030.0, 200.0}});
    REQUIRE(rep.converged);
    REQUIRE(peaks.size() == 1);
    REQUIRE(peaks[0].center == Approx(truth.center).epsilon(1e-6));
    REQUIRE(peaks[0].fwhm == Approx(truth.fwhm).epsilon(1e-4));
    REQUIRE(peaks[0].area == Approx(truth.area).epsilon(1e-4));
    REQUIRE(peaks[0].offset == Approx(truth.offset).margin(1e-3));
    REQUIRE(rep.sigmas.size() == rep.estimates.size());
}

TEST_CASE("two noisy peaks", "[fitting]") {
    LorentzianPeak p1{2.0e3, 25.0, 3.0, 0.1};
    LorentzianPeak p2{2.4e3, 60.0, 2.1, 0.1};
    const auto data = sample_peaks({p1, p2}, 1.6e3, 2.8e3, 0.5, 0.01, 321);

    const auto [peaks, rep] =
        fit_lorentzians(data, 2, {{1.98e3, 150.0}, {2.43e3, 200.0}});
    REQUIRE(rep.converged);
    REQUIRE(peaks[0].center == Approx(p1.center).margin(0.1 * p1.fwhm));
    REQUIRE(peaks[1].center == Approx(p2.center).margin(0.1 * p2.fwhm));
    REQUIRE(peaks[0].fwhm == Approx(p1.fwhm).epsilon(0.05));
    REQUIRE(peaks[1].fwhm == Approx(p2.fwhm).epsilon(0.05));
    REQUIRE(peaks[0].area == Approx(p1.area).epsilon(0.05));
}

TEST_CASE("fit guards", "[fitting]") {
    LorentzianPeak truth{2000.0, 30.0, 5.0, 0.2};
    const auto data = sample_peaks({truth}, 1500.0, 2500.0, 1.0);

    SECTION("window with too few points") {
        REQUIRE_THROWS_AS(fit_lorentzians(data, 1, {{2000.0, 5.0}}),
                          WindowTooCoarse);
    }
    SECTION("one window per peak required") {
        REQUIRE_THROWS_AS(fit_lorentzians(data, 2, {{2000.0, 100.0}}),
                          ConfigError);
    }
    SECTION("flat data has no resolvable peak") {
        SpectrumResult flat;
        for (double w = 0.0; w <= 400.0; w += 1.0) {
            flat.omega.push_back(w);
            flat.values.push_back(1.0);
        }
        REQUIRE_THROWS_AS(fit_lorentzians(flat, 1, {{200.0, 100.0}}),
                          DegenerateWindow);
    }
}

TEST_CASE("coupling recovery from a synthetic spectrum", "[fitting]") {
    SystemParams p = table1_params();
    const SteadyState ss = solve_steady_state(p);
    const QuadratureSelector sel = pump_transmission();

    std::vector<double> grid;
    for (int j = 0; j < 2; ++j) {
        const double wm = p.mechanical[j].omega_m;
        const double gm = p.mechanical[j].gamma_m;
        for (double w = wm - 12.0 * gm; w <= wm + 12.0 * gm; w += gm / 3.0)
            grid.push_back(w);
    }
    std::sort(grid.begin(), grid.end());
    const SpectrumResult data = psd(p, ss, sel, grid);

    const double g1 = p.couplings.g0[0][1];
    const double g2 = p.couplings.g0[1][1];
    CouplingFitOptions opts;
    opts.n_starts = 1;
    const FitReport rep =
        fit_couplings(data, p, sel, {1.3 * g1, 0.75 * g2}, opts);
    REQUIRE(rep.converged);
    REQUIRE(std::abs(rep.estimates(0)) == Approx(g1).epsilon(0.01));
    REQUIRE(std::abs(rep.estimates(1)) == Approx(g2).epsilon(0.01));
    REQUIRE(rep.warnings.empty());
}

TEST_CASE("coupling fit flags unidentifiable data", "[fitting]") {
    // A band far from both mechanical resonances carries almost no coupling
    // information; the fit must warn rather than report confident estimates.
    SystemParams p = table1_params();
    const SteadyState ss = solve_steady_state(p);
    const QuadratureSelector sel = pump_transmission();

    std::vector<double> grid;
    for (double f = 50e3; f <= 60e3; f += 500.0) grid.push_back(hz_to_rad(f));
    SpectrumResult data = psd(p, ss, sel, grid);
    NormalSampler rng(17);
    for (double& v : data.values) v *= 1.0 + 5e-3 * rng();

    CouplingFitOptions opts;
    opts.n_starts = 1;
    const FitReport rep = fit_couplings(
        data, p, sel, {p.couplings.g0[0][1], p.couplings.g0[1][1]}, opts);
    REQUIRE_FALSE(rep.warnings.empty());
}

TEST_CASE("coupling fit rejects non-positive spectra", "[fitting]") {
    SystemParams p = table1_params();
    const QuadratureSelector sel = pump_transmission();
    SpectrumResult data;
    data.omega = {1.0, 2.0};
    data.values = {1.0, 0.0};
    REQUIRE_THROWS_AS(fit_couplings(data, p, sel, {1.0, 1.0}), ConfigError);
}
