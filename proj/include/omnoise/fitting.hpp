#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "omnoise/rng.hpp"
#include "omnoise/spectrum.hpp"

namespace omnoise {

struct FitReport {
    Eigen::VectorXd estimates;
    Eigen::VectorXd sigmas;  // 1-sigma from the Gauss-Newton covariance
    double residual_norm = 0.0;
    bool converged = false;
    int iterations = 0;
    std::vector<std::string> warnings;
};

namespace detail {

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

inline Eigen::MatrixXd numeric_jacobian(const ResidualFn& f,
                                        const Eigen::VectorXd& x,
                                        const Eigen::VectorXd& r0) {
    const double rel = 1e-6;
    Eigen::MatrixXd J(r0.size(), x.size());
    for (int j = 0; j < x.size(); ++j) {
        const double h = rel * std::max(std::abs(x(j)), 1e-12);
        Eigen::VectorXd xp = x, xm = x;
        xp(j) += h;
        xm(j) -= h;
        J.col(j) = (f(xp) - f(xm)) / (2.0 * h);
    }
    return J;
}

// Levenberg-Marquardt with numeric central-difference Jacobians.
inline FitReport levenberg_marquardt(const ResidualFn& f, Eigen::VectorXd x,
                                     int max_iter = 200) {
    FitReport rep;
    Eigen::VectorXd r = f(x);
    double cost = 0.5 * r.squaredNorm();
    double lambda = 1e-3;
    Eigen::MatrixXd J;

    int it = 0;
    for (; it < max_iter; ++it) {
        J = numeric_jacobian(f, x, r);
        const Eigen::VectorXd g = J.transpose() * r;
        if (g.norm() < 1e-8 * std::max(cost, 1e-300)) {
            rep.converged = true;
            break;
        }
        const Eigen::MatrixXd H = J.transpose() * J;
        bool stepped = false;
        for (int tries = 0; tries < 40; ++tries) {
            Eigen::MatrixXd Hl = H;
            Hl.diagonal() += lambda * H.diagonal().cwiseMax(1e-12);
            const Eigen::VectorXd dx = Hl.ldlt().solve(-g);
            const Eigen::VectorXd xn = x + dx;
            const Eigen::VectorXd rn = f(xn);
            const double cn = 0.5 * rn.squaredNorm();
            if (std::isfinite(cn) && cn < cost) {
                x = xn;
                r = rn;
                const double dc = cost - cn;
                cost = cn;
                lambda = std::max(lambda * 0.3, 1e-12);
                stepped = true;
                if (dc < 1e-14 * std::max(cost, 1e-300)) {
                    rep.converged = true;
                    it = max_iter;  // terminate outer loop
                }
                break;
            }
            lambda *= 8.0;
        }
        if (!stepped) {
            rep.converged = true;  // cannot improve beyond numerical floor
            break;
        }
    }

    rep.estimates = x;
    rep.residual_norm = std::sqrt(2.0 * cost);
    rep.iterations = std::min(it, max_iter);
    // Parameter covariance from the Gauss-Newton approximation.
    J = numeric_jacobian(f, x, r);
    const int dof = std::max<int>(1, static_cast<int>(r.size() - x.size()));
    const double s2 = r.squaredNorm() / dof;
    const Eigen::MatrixXd cov =
        s2 * (J.transpose() * J)
                 .completeOrthogonalDecomposition()
                 .pseudoInverse();
    rep.sigmas = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
    return rep;
}

}  // namespace detail

struct LorentzianPeak {
    double center = 0.0;  // rad/s
    double fwhm = 0.0;    // rad/s
    double area = 0.0;    // integral over omega
    double offset = 0.0;  // shared baseline

    double value(double omega) const {
        const double hw = fwhm / 2.0;
        const double d = omega - center;
        return offset + area * hw / pi / (d * d + hw * hw);
    }
};

// Nonlinear least squares for n Lorentzian peaks plus a common offset over the
// union of the given windows (center, halfwidth).
inline std::pair<std::vector<LorentzianPeak>, FitReport> fit_lorentzians(
    const SpectrumResult& spectrum, int n_peaks,
    const std::vector<std::pair<double, double>>& init_windows) {
    if (static_cast<int>(init_windows.size()) != n_peaks)
        throw ConfigError("fit_lorentzians needs one init window per peak");

    std::vector<double> w, y;
    for (std::size_t i = 0; i < spectrum.omega.size(); ++i)
        for (const auto& [c, hw] : init_windows)
            if (std::abs(spectrum.omega[i] - c) <= hw) {
                w.push_back(spectrum.omega[i]);
                y.push_back(spectrum.values[i]);
                break;
            }
    for (const auto& [c, hw] : init_windows) {
        int count = 0;
        for (double x : w)
            if (std::abs(x - c) <= hw) ++count;
        if (count < 20)
            throw WindowTooCoarse("each window needs at least 20 points");
    }

    double ymax = -std::numeric_limits<double>::infinity();
    double ymin = std::numeric_limits<double>::infinity();
    for (double v : y) {
        ymax = std::max(ymax, v);
        ymin = std::min(ymin, v);
    }
    if (!(ymax > ymin) || ymax - ymin < 1e-3 * std::abs(ymax))
        throw DegenerateWindow("no resolvable peak above the baseline");

    // Parameters: [offset, (center, log fwhm, log area) x n].
    Eigen::VectorXd x(1 + 3 * n_peaks);
    x(0) = ymin;
    for (int pk = 0; pk < n_peaks; ++pk) {
        const auto& [c, hw] = init_windows[pk];
        double best = c, best_v = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < w.size(); ++i)
            if (std::abs(w[i] - c) <= hw && y[i] > best_v) {
                best_v = y[i];
                best = w[i];
            }
        const double fwhm0 = hw / 4.0;
        const double area0 =
            std::max((best_v - ymin) * pi * fwhm0 / 2.0, 1e-300);
        x(1 + 3 * pk) = best;
        x(2 + 3 * pk) = std::log(fwhm0);
        x(3 + 3 * pk) = std::log(area0);
    }

    const double yscale = std::max(std::abs(ymax), 1e-300);
    auto model = [&](const Eigen::VectorXd& q, double omega) {
        double v = q(0);
        for (int pk = 0; pk < n_peaks; ++pk) {
            const double c = q(1 + 3 * pk);
            const double hw = std::exp(q(2 + 3 * pk)) / 2.0;
            const double area = std::exp(q(3 + 3 * pk));
            const double d = omega - c;
            v += area * hw / pi / (d * d + hw * hw);
        }
        return v;
    };
    auto resid = [&](const Eigen::VectorXd& q) {
        Eigen::VectorXd r(w.size());
        for (std::size_t i = 0; i < w.size(); ++i)
            r(i) = (model(q, w[i]) - y[i]) / yscale;
        return r;
    };

    FitReport rep = detail::levenberg_marquardt(resid, x);
    if (!rep.converged)
        throw NoConvergence("Lorentzian fit did not converge");

    std::vector<LorentzianPeak> peaks;
    for (int pk = 0; pk < n_peaks; ++pk) {
        LorentzianPeak lp;
        lp.center = rep.estimates(1 + 3 * pk);
        lp.fwhm = std::exp(rep.estimates(2 + 3 * pk));
        lp.area = std::exp(rep.estimates(3 + 3 * pk));
        lp.offset = rep.estimates(0);
        const auto& [c, hw] = init_windows[pk];
        if (lp.fwhm > 2.0 * hw || std::abs(lp.center - c) > hw)
            throw DegenerateWindow("fitted peak escaped its window");
        peaks.push_back(lp);
    }
    return {peaks, rep};
}

struct CouplingFitOptions {
    int n_starts = 3;
    std::uint64_t seed = 1234;
    bool fit_scale = false;  // also fit an overall detection scale
    Solver solver = Solver::Full;
};

// Least-squares fit of the pump-column couplings (g0_12, g0_22) [and an
// optional overall scale] to a measured spectrum. Log-space cost: spectra
// span decades near the resonances.
inline FitReport fit_couplings(const SpectrumResult& measured,
                               const SystemParams& base,
                               const QuadratureSelector& sel,
                               const std::array<double, 2>& g0_init,
                               const CouplingFitOptions& opts = {}) {
    std::vector<double> logy(measured.values.size());
    for (std::size_t i = 0; i < measured.values.size(); ++i) {
        if (!(measured.values[i] > 0.0))
            throw ConfigError("coupling fit needs strictly positive spectra");
        logy[i] = std::log(measured.values[i]);
    }

    auto forward = [&](double g1, double g2) {
        SystemParams p = base;
        p.couplings.g0[0][1] = g1;
        p.couplings.g0[1][1] = g2;
        const SteadyState ss = solve_steady_state(p);
        return psd(p, ss, sel, measured.omega, opts.solver);
    };

    const int np = opts.fit_scale ? 3 : 2;
    auto resid = [&](const Eigen::VectorXd& q) {
        const SpectrumResult m = forward(q(0), q(1));
        const double log_scale = opts.fit_scale ? q(2) : 0.0;
        Eigen::VectorXd r(logy.size());
        for (std::size_t i = 0; i < logy.size(); ++i)
            r(i) = std::log(std::max(m.values[i], 1e-300)) + log_scale - logy[i];
        return r;
    };

    NormalSampler rng(opts.seed);
    FitReport best;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int s = 0; s < opts.n_starts; ++s) {
        Eigen::VectorXd x0(np);
        if (s == 0) {
            x0(0) = g0_init[0];
            x0(1) = g0_init[1];
        } else {
            // multiplicative perturbations spanning roughly x1/2 .. x2
            x0(0) = g0_init[0] * std::exp(0.5 * rng());
            x0(1) = g0_init[1] * std::exp(0.5 * rng());
        }
        if (opts.fit_scale) x0(np - 1) = 0.0;
        FitReport rep = detail::levenberg_marquardt(resid, x0, 100);
        const double c = rep.residual_norm;
        if (c < best_cost) {
            best_cost = c;
            best = rep;
        }
    }
    if (!best.converged) throw NoConvergence("coupling fit did not converge");

    // Identifiability probe: a +1% parameter nudge should move the cost.
    const Eigen::VectorXd r0 = resid(best.estimates);
    const double c0 = r0.squaredNorm();
    for (int j = 0; j < 2; ++j) {
        Eigen::VectorXd xq = best.estimates;
        xq(j) *= 1.01;
        if (xq(j) == best.estimates(j)) xq(j) = 1e-6;
        const double cq = resid(xq).squaredNorm();
        if (std::abs(cq - c0) <= 0.01 * std::max(c0, 1e-300))
            best.warnings.push_back("IdentifiabilityWarning: cost flat along g0_" +
                                    std::to_string(j + 1) + "2");
    }
    return best;
}

}  // namespace omnoise
