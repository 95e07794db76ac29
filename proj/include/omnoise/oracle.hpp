#pragma once

#include <fftw3.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "omnoise/quadrature.hpp"
#include "omnoise/rng.hpp"
#include "omnoise/spectrum.hpp"
#include "omnoise/transfer.hpp"

namespace omnoise {

// Ornstein-Uhlenbeck process with <x(t)x(t')> = Gamma gamma e^{-gamma|t-t'|}.
struct OuProcess {
    double strength = 0.0;   // Gamma
    double bandwidth = 0.0;  // gamma (rad/s)
    double x = 0.0;
};

// Exact discretization: stationary statistics hold for any dt.
inline void step_ou(OuProcess& p, double dt, double gauss) {
    const double e = std::exp(-p.bandwidth * dt);
    p.x = p.x * e +
          std::sqrt(p.strength * p.bandwidth * (1.0 - e * e)) * gauss;
}

struct SimConfig {
    double dt = 0.0;
    double duration = 0.0;
    std::uint64_t seed = 1;
    std::size_t segment_samples = 1 << 16;  // Welch segment length
    double overlap = 0.5;
    bool classical_mode = true;  // symmetrized vacuum/thermal inputs

    void validate(const SystemParams& p) const {
        if (!(dt > 0.0) || !(duration > 0.0))
            throw ConfigError("dt and duration must be positive");
        double fmax = 0.0;
        for (const auto& m : p.mechanical)
            fmax = std::max(fmax, m.omega_m / two_pi);
        for (const auto& o : p.optical) fmax = std::max(fmax, o.kappa() / two_pi);
        for (int k = 0; k < 2; ++k) {
            if (p.noise.gamma_eps_strength[k] > 0.0)
                fmax = std::max(fmax, p.noise.gamma_eps_bw[k] / two_pi);
            if (p.noise.gamma_l_strength[k] > 0.0)
                fmax = std::max(fmax, p.noise.gamma_phi_bw[k] / two_pi);
        }
        if (dt > 1.0 / (20.0 * fmax))
            throw ConfigError("dt too coarse: need dt <= 1/(20 f_max)");
    }
};

// Time-domain drift matrix of the linearized system; the frequency-domain
// system matrix at omega = 0 is its negative.
inline Matrix8c drift_matrix(const SystemParams& p, const SteadyState& ss) {
    Matrix8c M;
    Matrix8Xc N;
    detail::fill_system(p, ss, 0.0, M, N);
    return -M;
}

inline void check_stability(const SystemParams& p, const SteadyState& ss) {
    const Matrix8c A = drift_matrix(p, ss);
    Eigen::ComplexEigenSolver<Matrix8c> es(A, false);
    for (int i = 0; i < 8; ++i) {
        const cplx ev = es.eigenvalues()(i);
        if (ev.real() >= 0.0) {
            std::ostringstream msg;
            msg << "drift matrix has a non-decaying eigenvalue " << ev;
            throw UnstableSystem(msg.str());
        }
    }
}

// One step of the linearized Langevin dynamics. The stiff diagonal of each
// mode is propagated by its exact exponential; couplings and noises enter
// explicitly (stable for g dt << 1, unlike plain explicit Euler at Q >> 1).
class LangevinStepper {
public:
    LangevinStepper(const SystemParams& p, const SteadyState& ss,
                    const SimConfig& cfg)
        : p_(p), ss_(ss), cfg_(cfg), rng_(cfg.seed) {
        check_stability(p, ss);
        for (int k = 0; k < 2; ++k) {
            const auto& o = p.optical[k];
            decay_a_[k] = std::exp(-cplx(o.kappa() / 2.0, ss.detuning[k]) *
                                   cfg.dt);
            sk1_[k] = std::sqrt(o.kappa1);
            sk2_[k] = std::sqrt(o.kappa2);
            skl_[k] = std::sqrt(o.kappa_l);
            ou_eps_[k] = {p.noise.gamma_eps_strength[k],
                          p.noise.gamma_eps_bw[k], 0.0};
            ou_phi_[k] = {p.noise.gamma_l_strength[k], p.noise.gamma_phi_bw[k],
                          0.0};
        }
        for (int j = 0; j < 2; ++j) {
            const auto& m = p.mechanical[j];
            decay_b_[j] = std::exp(-cplx(m.gamma_m / 2.0, m.omega_m) * cfg.dt);
            sg_[j] = std::sqrt(m.gamma_m);
            mech_sigma_[j] = std::sqrt((m.n_th + 0.5) / 2.0);
        }
        sqrt_dt_ = std::sqrt(cfg.dt);
        // Thermalize the OU states so records start stationary.
        for (int k = 0; k < 2; ++k) {
            if (ou_eps_[k].strength > 0.0)
                ou_eps_[k].x = std::sqrt(ou_eps_[k].strength *
                                         ou_eps_[k].bandwidth) * rng_();
            if (ou_phi_[k].strength > 0.0)
                ou_phi_[k].x = std::sqrt(ou_phi_[k].strength *
                                         ou_phi_[k].bandwidth) * rng_();
        }
    }

    // Advances one dt. Port vacuum draws for the current interval are kept
    // so the output feed-through uses the same realization.
    void step() {
        for (int k = 0; k < 2; ++k) {
            xi1_[k] = noise_enabled ? vac_draw() : cplx(0.0);
            xi2_[k] = noise_enabled ? vac_draw() : cplx(0.0);
        }

        cplx da[2], db[2];
        const cplx I(0.0, 1.0);
        for (int k = 0; k < 2; ++k) {
            cplx mech = 0.0;
            for (int j = 0; j < 2; ++j)
                mech += ss_.g_eff[j][k] * (b[j] + std::conj(b[j]));
            cplx drive = I * mech + sk1_[k] * ou_eps_[k].x +
                         I * ss_.alpha[k] * ou_phi_[k].x;
            cplx noise = sk1_[k] * xi1_[k] + sk2_[k] * xi2_[k];
            if (p_.include_loss_port && noise_enabled)
                noise += skl_[k] * vac_draw();
            da[k] = decay_a_[k] * (a[k] + cfg_.dt * drive + sqrt_dt_ * noise);
        }
        for (int j = 0; j < 2; ++j) {
            cplx opt = 0.0;
            for (int k = 0; k < 2; ++k)
                opt += std::conj(ss_.g_eff[j][k]) * a[k] +
                       ss_.g_eff[j][k] * std::conj(a[k]);
            const cplx xi =
                noise_enabled ? mech_sigma_[j] * cplx(rng_(), rng_())
                              : cplx(0.0);
            db[j] = decay_b_[j] * (b[j] + cfg_.dt * (I * opt) +
                                   sqrt_dt_ * sg_[j] * xi);
        }
        for (int k = 0; k < 2; ++k) a[k] = da[k];
        for (int j = 0; j < 2; ++j) b[j] = db[j];

        if (noise_enabled) {
            for (int k = 0; k < 2; ++k) {
                if (ou_eps_[k].strength > 0.0)
                    step_ou(ou_eps_[k], cfg_.dt, rng_());
                if (ou_phi_[k].strength > 0.0)
                    step_ou(ou_phi_[k], cfg_.dt, rng_());
            }
        }
    }

    // Output quadrature sample built from the current state and the port
    // vacuum draw of the last step.
    double output(const QuadratureSelector& sel) const {
        const int k = sel.mode_k;
        const int l = sel.mirror_l;
        const double kap_lk =
            (l == 0) ? p_.optical[k].kappa1 : p_.optical[k].kappa2;
        const cplx ep = std::polar(1.0, sel.lo_phase);
        const cplx em = std::conj(ep);
        const cplx xi = (l == 0 ? xi1_[k] : xi2_[k]) / sqrt_dt_;
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        const double eps = ou_eps_[k].x;
        if (sel.which == Quadrature::X) {
            const cplx field =
                std::sqrt(kap_lk) * (std::conj(a[k]) * ep + a[k] * em);
            cplx in = std::conj(xi) * ep + xi * em;
            if (l == 0) in += eps * (ep + em);
            return ((field - in) * inv_sqrt2).real();
        }
        const cplx I(0.0, 1.0);
        const cplx field =
            std::sqrt(kap_lk) * I * (std::conj(a[k]) * ep - a[k] * em);
        cplx in = I * (std::conj(xi) * ep - xi * em);
        if (l == 0) in += I * eps * (ep - em);
        return ((field - in) * inv_sqrt2).real();
    }

    cplx a[2] = {0.0, 0.0};
    cplx b[2] = {0.0, 0.0};
    bool noise_enabled = true;

    const OuProcess& ou_eps(int k) const { return ou_eps_[k]; }

private:
    cplx vac_draw() { return cplx(rng_(), rng_()) * 0.5; }

    SystemParams p_;
    SteadyState ss_;
    SimConfig cfg_;
    NormalSampler rng_;
    cplx decay_a_[2], decay_b_[2];
    double sk1_[2], sk2_[2], skl_[2], sg_[2], mech_sigma_[2];
    double sqrt_dt_ = 0.0;
    OuProcess ou_eps_[2], ou_phi_[2];
    cplx xi1_[2], xi2_[2];
};

// Hann-windowed averaged periodogram. Values are the two-sided PSD in the
// repo convention: for x with <x(t)x(0)> = s^2 delta(t) the level is s^2.
class WelchAccumulator {
public:
    WelchAccumulator(std::size_t segment, double dt, double overlap = 0.5)
        : n_(segment), dt_(dt),
          hop_(std::max<std::size_t>(
              1, static_cast<std::size_t>(segment * (1.0 - overlap)))),
          buf_(segment), window_(segment), in_(segment),
          spec_(segment / 2 + 1, 0.0) {
        for (std::size_t i = 0; i < n_; ++i)
            window_[i] =
                0.5 * (1.0 - std::cos(two_pi * static_cast<double>(i) /
                                      static_cast<double>(n_)));
        wss_ = 0.0;
        for (double w : window_) wss_ += w * w;
        out_ = fftw_alloc_complex(n_ / 2 + 1);
        plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n_), in_.data(), out_,
                                     FFTW_ESTIMATE);
    }
    WelchAccumulator(const WelchAccumulator&) = delete;
    WelchAccumulator& operator=(const WelchAccumulator&) = delete;
    ~WelchAccumulator() {
        fftw_destroy_plan(plan_);
        fftw_free(out_);
    }

    void push(double x) {
        buf_[fill_++] = x;
        if (fill_ == n_) {
            flush_segment();
            std::copy(buf_.begin() + static_cast<std::ptrdiff_t>(hop_),
                      buf_.end(), buf_.begin());
            fill_ = n_ - hop_;
        }
    }

    std::size_t segments() const { return n_segments_; }

    SpectrumResult result() const {
        if (n_segments_ == 0)
            throw TooShortSeries("no complete Welch segment accumulated");
        SpectrumResult r;
        const double df = 1.0 / (static_cast<double>(n_) * dt_);
        r.omega.resize(spec_.size());
        r.values.resize(spec_.size());
        const double norm =
            dt_ / (wss_ * static_cast<double>(n_segments_));
        for (std::size_t i = 0; i < spec_.size(); ++i) {
            r.omega[i] = two_pi * df * static_cast<double>(i);
            r.values[i] = spec_[i] * norm;
        }
        r.metadata["convention"] = "two-sided angular PSD (Welch, Hann)";
        r.metadata["segments"] = std::to_string(n_segments_);
        return r;
    }

private:
    void flush_segment() {
        for (std::size_t i = 0; i < n_; ++i) in_[i] = buf_[i] * window_[i];
        fftw_execute(plan_);
        for (std::size_t i = 0; i < spec_.size(); ++i)
            spec_[i] += out_[i][0] * out_[i][0] + out_[i][1] * out_[i][1];
        ++n_segments_;
    }

    std::size_t n_;
    double dt_;
    std::size_t hop_;
    std::vector<double> buf_, window_, in_;
    std::vector<double> spec_;
    double wss_ = 0.0;
    std::size_t fill_ = 0;
    std::size_t n_segments_ = 0;
    fftw_complex* out_;
    fftw_plan plan_;
};

// Expected value of a Hann-windowed Welch bin for an analytic two-sided PSD:
//   E[P_k] = dt / (2 pi wss) * Int S(w) |W(w - w_k)|^2 dw
// with W the window DTFT. Accounts for both in-bin averaging and spectral
// leakage, so narrow analytic features can be compared fairly against the
// estimator even when they are unresolved at the bin width.
inline double expected_welch_bin(const std::function<double(double)>& S,
                                 double omega_k, std::size_t n, double dt,
                                 int halfbins = 4, int sub = 64) {
    const double N = static_cast<double>(n);
    const double dw = two_pi / (N * dt);
    auto dirichlet = [&](double x) -> cplx {
        // sum_{m=0}^{N-1} e^{i x m dt}
        const double h = x * dt / 2.0;
        const double s = std::sin(h);
        if (std::abs(s) < 1e-14)
            return std::polar(N, (N - 1.0) * h);
        return std::polar(std::sin(N * h) / s, (N - 1.0) * h);
    };
    auto window_power = [&](double x) {
        const cplx w = 0.5 * dirichlet(x) - 0.25 * dirichlet(x - dw) -
                       0.25 * dirichlet(x + dw);
        return std::norm(w);
    };
    const double wss = 3.0 * N / 8.0;  // sum of squared Hann samples
    const double step = dw / sub;
    double acc = 0.0;
    for (int m = -halfbins * sub; m < halfbins * sub; ++m) {
        const double x = (m + 0.5) * step;
        acc += S(omega_k + x) * window_power(x);
    }
    return acc * step * dt / (two_pi * wss);
}

inline SpectrumResult welch_psd(const std::vector<double>& series, double dt,
                                std::size_t segment, double overlap = 0.5) {
    if (series.size() < segment)
        throw TooShortSeries("series shorter than one Welch segment");
    WelchAccumulator acc(segment, dt, overlap);
    for (double x : series) acc.push(x);
    return acc.result();
}

struct OracleOutput {
    SpectrumResult psd;
    std::vector<double> series;  // only if keep_series
};

// Full pipeline: stochastic integration of the linearized dynamics with the
// selected output quadrature streamed into a Welch estimator.
inline OracleOutput integrate(const SystemParams& p, const SteadyState& ss,
                              const SimConfig& cfg,
                              const QuadratureSelector& sel,
                              bool keep_series = false,
                              std::size_t series_decimation = 1) {
    cfg.validate(p);
    check_port(sel);
    LangevinStepper stepper(p, ss, cfg);
    WelchAccumulator acc(cfg.segment_samples, cfg.dt, cfg.overlap);
    const std::size_t n_steps =
        static_cast<std::size_t>(cfg.duration / cfg.dt);
    OracleOutput out;
    // Discard a transient of five cavity/mechanical lifetimes.
    double slowest = p.mechanical[0].gamma_m;
    for (const auto& m : p.mechanical) slowest = std::min(slowest, m.gamma_m);
    std::size_t n_warm = static_cast<std::size_t>(
        std::min(5.0 / (slowest * cfg.dt), 0.1 * static_cast<double>(n_steps)));
    for (std::size_t i = 0; i < n_warm; ++i) stepper.step();
    for (std::size_t i = 0; i < n_steps; ++i) {
        stepper.step();
        const double x = stepper.output(sel);
        acc.push(x);
        if (keep_series && i % series_decimation == 0) out.series.push_back(x);
    }
    out.psd = acc.result();
    out.psd.metadata["seed"] = std::to_string(cfg.seed);
    out.psd.metadata["dt"] = std::to_string(cfg.dt);
    return out;
}

}  // namespace omnoise
