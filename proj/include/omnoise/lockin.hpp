#pragma once

#include <cmath>
#include <vector>

#include "omnoise/constants.hpp"
#include "omnoise/errors.hpp"

namespace omnoise {

// Direct-form-I biquad.
struct Biquad {
    double b0 = 1.0, b1 = 0.0, b2 = 0.0, a1 = 0.0, a2 = 0.0;
    double x1 = 0.0, x2 = 0.0, y1 = 0.0, y2 = 0.0;

    double process(double x) {
        const double y = b0 * x + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2;
        x2 = x1;
        x1 = x;
        y2 = y1;
        y1 = y;
        return y;
    }
};

// RBJ low-pass section.
inline Biquad lowpass_biquad(double fc_hz, double fs_hz, double q) {
    const double w0 = two_pi * fc_hz / fs_hz;
    const double alpha = std::sin(w0) / (2.0 * q);
    const double cw = std::cos(w0);
    const double a0 = 1.0 + alpha;
    Biquad b;
    b.b0 = (1.0 - cw) / 2.0 / a0;
    b.b1 = (1.0 - cw) / a0;
    b.b2 = b.b0;
    b.a1 = -2.0 * cw / a0;
    b.a2 = (1.0 - alpha) / a0;
    return b;
}

// Fourth-order Butterworth low-pass as two cascaded biquads.
struct Butterworth4 {
    Biquad s1, s2;
    Butterworth4(double fc_hz, double fs_hz)
        : s1(lowpass_biquad(fc_hz, fs_hz, 0.54119610)),
          s2(lowpass_biquad(fc_hz, fs_hz, 1.30656296)) {}
    double process(double x) { return s2.process(s1.process(x)); }
};

// Lock-in demodulation: mix with a quadrature pair at f_demod, low-pass both
// arms with a fourth-order filter of cutoff bw/2 (a band-pass of full width
// bw centered on f_demod), and report the steady-state magnitude.
inline double lock_in(const std::vector<double>& signal, double fs_hz,
                      double f_demod_hz, double bw_hz = 19.0) {
    if (!(fs_hz > 4.0 * f_demod_hz))
        throw ConfigError("lock_in requires sample_rate > 4 * f_demod");
    const double duration = static_cast<double>(signal.size()) / fs_hz;
    if (duration < 10.0 / bw_hz)
        throw InsufficientSettling(
            "lock_in needs a record at least 10/bw long");

    Butterworth4 fi(bw_hz / 2.0, fs_hz), fq(bw_hz / 2.0, fs_hz);
    const double w = two_pi * f_demod_hz / fs_hz;
    const std::size_t n = signal.size();
    const std::size_t n_settle = n / 2;  // settling time is ~4/bw << duration/2
    double acc = 0.0;
    std::size_t count = 0;
    // Recursive phasor for the reference oscillator drifts; regenerate exactly.
    for (std::size_t i = 0; i < n; ++i) {
        const double ph = w * static_cast<double>(i);
        const double vi = fi.process(signal[i] * std::cos(ph));
        const double vq = fq.process(-signal[i] * std::sin(ph));
        if (i >= n_settle) {
            acc += std::sqrt(vi * vi + vq * vq);
            ++count;
        }
    }
    return 2.0 * acc / static_cast<double>(count);
}

}  // namespace omnoise
