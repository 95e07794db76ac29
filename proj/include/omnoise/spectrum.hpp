#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "omnoise/quadrature.hpp"

namespace omnoise {

struct SpectrumResult {
    std::vector<double> omega;   // rad/s, sorted
    std::vector<double> values;  // PSD under the repo convention
    std::map<std::string, std::string> metadata;
};

enum class Solver { Full, Rwa };

inline const char* solver_name(Solver s) {
    return s == Solver::Full ? "full" : "rwa";
}

// Base linspace over [omega_min, omega_max] refined near each mechanical
// resonance to at least 16 points per linewidth.
inline std::vector<double> make_grid(const SystemParams& p, double omega_min,
                                     double omega_max, int points = 4001) {
    if (!(omega_max > omega_min) || points < 2)
        throw ConfigError("invalid frequency grid");
    std::vector<double> w;
    w.reserve(points);
    const double step = (omega_max - omega_min) / (points - 1);
    for (int i = 0; i < points; ++i) w.push_back(omega_min + i * step);
    for (const auto& m : p.mechanical) {
        const double fine = m.gamma_m / 16.0;
        const double lo = std::max(omega_min, m.omega_m - 40.0 * m.gamma_m);
        const double hi = std::min(omega_max, m.omega_m + 40.0 * m.gamma_m);
        for (double x = lo; x <= hi; x += fine) w.push_back(x);
    }
    std::sort(w.begin(), w.end());
    w.erase(std::unique(w.begin(), w.end(),
                        [](double a, double b) {
                            return std::abs(a - b) < 1e-9 * std::max(1.0, std::abs(a));
                        }),
            w.end());
    return w;
}

// Single-frequency PSD: S(w) = sum_ij c_i(w) C_ij(w) c_j(-w).
// The global 2 pi from the delta-function contraction is dropped; the result
// is the two-sided PSD in angular-frequency convention.
inline double psd_at(const SystemParams& p, const SteadyState& ss,
                     const QuadratureSelector& sel, double omega, Solver solver,
                     double* im_ratio = nullptr, bool symmetrized = false) {
    const bool rwa = (solver == Solver::Rwa);
    const Eigen::RowVectorXcd cp = output_quadrature_row(p, ss, sel, omega, rwa);
    const Eigen::RowVectorXcd cm = output_quadrature_row(p, ss, sel, -omega, rwa);
    const Eigen::MatrixXd C = correlation_matrix(p, omega, symmetrized);
    const cplx s = cp * C * cm.transpose();
    if (im_ratio)
        *im_ratio = std::abs(s.imag()) / std::max(std::abs(s.real()), 1e-300);
    return s.real();
}

// PSD over a grid. Frequency points are independent; evaluation is
// data-parallel with deterministic output ordering.
inline SpectrumResult psd(const SystemParams& p, const SteadyState& ss,
                          const QuadratureSelector& sel,
                          const std::vector<double>& omega_grid,
                          Solver solver = Solver::Full, int n_threads = 0) {
    for (std::size_t i = 0; i + 1 < omega_grid.size(); ++i)
        if (!(omega_grid[i] < omega_grid[i + 1]) ||
            !std::isfinite(omega_grid[i]))
            throw ConfigError("frequency grid must be sorted and finite");

    SpectrumResult out;
    out.omega = omega_grid;
    out.values.assign(omega_grid.size(), 0.0);

    if (n_threads <= 0)
        n_threads = static_cast<int>(
            std::min<std::size_t>(std::thread::hardware_concurrency(),
                                  1 + omega_grid.size() / 256));
    n_threads = std::max(n_threads, 1);

    std::vector<std::string> errors(n_threads);
    std::size_t clamped = 0;
    auto work = [&](int tid) {
        try {
            for (std::size_t i = tid; i < omega_grid.size();
                 i += static_cast<std::size_t>(n_threads))
                out.values[i] = psd_at(p, ss, sel, omega_grid[i], solver);
        } catch (const std::exception& e) {
            errors[tid] = e.what();
        }
    };
    if (n_threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(work, t);
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors)
        if (!e.empty()) throw SingularSystemError(e);

    double vmax = 0.0;
    for (double v : out.values) vmax = std::max(vmax, std::abs(v));
    for (double& v : out.values)
        if (v < 0.0) {
            if (v < -1e-12 * vmax)
                throw Error("PSD came out significantly negative");
            v = 0.0;
            ++clamped;
        }

    out.metadata["convention"] =
        "two-sided angular PSD; S(w)=sum c_i(w) C_ij(w) c_j(-w), 2pi dropped";
    out.metadata["solver"] = solver_name(solver);
    out.metadata["clamped_points"] = std::to_string(clamped);
    return out;
}

// Detection-chain mapping to measured units: A * S + additive floors.
inline void apply_detection(SpectrumResult& s, double a_factor,
                            double shot_floor = 0.0,
                            double electronic_floor = 0.0) {
    for (double& v : s.values)
        v = a_factor * v + shot_floor + electronic_floor;
    s.metadata["a_factor"] = std::to_string(a_factor);
}

struct Dip {
    double omega_min = 0.0;  // location of the local minimum
    double value = 0.0;      // PSD at the minimum
    double depth_db = 0.0;   // depth below the window-edge baseline
};

// Local minima per window, depth relative to the window-edge baseline.
inline std::vector<Dip> dip_finder(
    const SpectrumResult& spec,
    const std::vector<std::pair<double, double>>& windows) {
    std::vector<Dip> dips;
    for (const auto& [center, halfwidth] : windows) {
        const double lo = center - halfwidth, hi = center + halfwidth;
        std::size_t first = spec.omega.size(), last = 0;
        for (std::size_t i = 0; i < spec.omega.size(); ++i)
            if (spec.omega[i] >= lo && spec.omega[i] <= hi) {
                first = std::min(first, i);
                last = std::max(last, i);
            }
        if (first >= spec.omega.size() || last <= first + 6)
            throw WindowTooCoarse(
                "window needs at least 8 grid points to resolve a dip");

        std::size_t imin = first;
        for (std::size_t i = first; i <= last; ++i)
            if (spec.values[i] < spec.values[imin]) imin = i;
        if (imin == first || imin == last) continue;  // no interior minimum

        const double baseline =
            std::min(spec.values[first], spec.values[last]);
        if (!(spec.values[imin] < baseline)) continue;
        Dip d;
        d.omega_min = spec.omega[imin];
        d.value = spec.values[imin];
        d.depth_db = 10.0 * std::log10(baseline /
                                       std::max(spec.values[imin], 1e-300));
        if (d.depth_db < 0.1) continue;  // flat to numerical noise
        dips.push_back(d);
    }
    return dips;
}

}  // namespace omnoise
