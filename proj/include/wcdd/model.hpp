#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wcdd/errors.hpp"

namespace wcdd {

// Two-population rate model with distributed delay acting on the recurrent
// input:
//   u' = -u + f(theta_u + (h * (a u + b v))(t))
//   v' = -v + f(theta_v + (h * (c u + d v))(t))
// where * is convolution against the delay kernel and f is the logistic
// activation below.
struct ModelParams {
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
    double theta_u = 0.0, theta_v = 0.0;
};

struct Activation {
    double delta = 1.0; // steepness, > 0

    double value(double x) const { return 1.0 / (1.0 + std::exp(-delta * x)); }

    // f'(x) = delta f (1 - f), evaluated from the value for one exp() call
    double slope(double x) const {
        const double f = value(x);
        return delta * f * (1.0 - f);
    }
};

// Steady state together with the local linearization data:
//   phi1 = f'(theta_u + a u* + b v*), phi2 = f'(theta_v + c u* + d v*)
//   alpha = a phi1 + d phi2,          beta = (a d - b c) phi1 phi2
struct Equilibrium {
    double u = 0.0, v = 0.0;
    double phi1 = 0.0, phi2 = 0.0;
    double alpha = 0.0, beta = 0.0;
};

struct EquilibriumSearch {
    std::vector<Equilibrium> equilibria; // sorted by u, then v
    int failed_candidates = 0;           // grid starts whose Newton run did not converge
};

namespace detail {

// Damped Newton on the 2x2 steady-state system
//   r1 = -u + f(theta_u + a u + b v),  r2 = -v + f(theta_v + c u + d v).
// Returns true on ||r||_inf < tol within the iteration budget. Steps
// backtrack on the squared residual norm: the Newton direction is a strict
// descent direction for it whenever the Jacobian is nonsingular, and a full
// step with steep activations can otherwise cycle between saturated corners.
inline bool newton_equilibrium(const ModelParams& m, const Activation& f,
                               double& u, double& v, double tol, int max_iter) {
    auto residual = [&](double uu, double vv, double& r1, double& r2) {
        r1 = -uu + f.value(m.theta_u + m.a * uu + m.b * vv);
        r2 = -vv + f.value(m.theta_v + m.c * uu + m.d * vv);
    };
    double r1, r2;
    residual(u, v, r1, r2);
    for (int it = 0; it < max_iter; ++it) {
        if (std::max(std::abs(r1), std::abs(r2)) < tol) return true;
        const double x1 = m.theta_u + m.a * u + m.b * v;
        const double x2 = m.theta_v + m.c * u + m.d * v;
        const double s1 = f.slope(x1), s2 = f.slope(x2);
        // Jacobian of (r1, r2)
        const double j11 = -1.0 + s1 * m.a, j12 = s1 * m.b;
        const double j21 = s2 * m.c, j22 = -1.0 + s2 * m.d;
        const double det = j11 * j22 - j12 * j21;
        if (std::abs(det) < 1e-14) return false;
        const double du = (-r1 * j22 + r2 * j12) / det;
        const double dv = (-r2 * j11 + r1 * j21) / det;
        const double base = r1 * r1 + r2 * r2;
        bool moved = false;
        double step = 1.0;
        for (int half = 0; half < 30; ++half, step *= 0.5) {
            const double un = u + step * du, vn = v + step * dv;
            // f maps into (0, 1), so roots live in a small box
            if (std::abs(un) > 10.0 || std::abs(vn) > 10.0) continue;
            double t1, t2;
            residual(un, vn, t1, t2);
            if (t1 * t1 + t2 * t2 <= base * (1.0 - 0.25 * step)) {
                u = un;
                v = vn;
                r1 = t1;
                r2 = t2;
                moved = true;
                break;
            }
        }
        if (!moved) return false;
    }
    return std::max(std::abs(r1), std::abs(r2)) < tol;
}

} // namespace detail

// Characteristic parameters of the linearization at (u, v). Throws if (u, v)
// fails the steady-state residual check, so callers cannot feed it a
// non-equilibrium by accident.
inline std::pair<double, double> characteristic_params(const ModelParams& m, const Activation& f,
                                                       double u, double v,
                                                       double residual_tol = 1e-8) {
    const double x1 = m.theta_u + m.a * u + m.b * v;
    const double x2 = m.theta_v + m.c * u + m.d * v;
    const double r1 = -u + f.value(x1);
    const double r2 = -v + f.value(x2);
    if (std::max(std::abs(r1), std::abs(r2)) >= residual_tol)
        throw std::invalid_argument("characteristic_params: point is not an equilibrium (residual " +
                                    std::to_string(std::max(std::abs(r1), std::abs(r2))) + ")");
    const double phi1 = f.slope(x1);
    const double phi2 = f.slope(x2);
    const double alpha = m.a * phi1 + m.d * phi2;
    const double beta = (m.a * m.d - m.b * m.c) * phi1 * phi2;
    return {alpha, beta};
}

// Multi-start Newton over a grid_n x grid_n lattice of starts in (0,1)^2
// (f's range), deduplicating converged roots to 1e-7.
inline EquilibriumSearch find_equilibria(const ModelParams& m, const Activation& f,
                                         int grid_n = 16, double tol = 1e-12) {
    if (grid_n < 1) throw std::invalid_argument("find_equilibria: grid_n must be >= 1");
    EquilibriumSearch out;
    std::vector<std::pair<double, double>> roots;
    for (int i = 0; i < grid_n; ++i) {
        for (int j = 0; j < grid_n; ++j) {
            double u = (i + 0.5) / grid_n;
            double v = (j + 0.5) / grid_n;
            if (!detail::newton_equilibrium(m, f, u, v, tol, 80)) {
                ++out.failed_candidates;
                continue;
            }
            bool dup = false;
            for (const auto& r : roots)
                if (std::abs(r.first - u) < 1e-7 && std::abs(r.second - v) < 1e-7) { dup = true; break; }
            if (!dup) roots.emplace_back(u, v);
        }
    }
    std::sort(roots.begin(), roots.end());
    for (const auto& r : roots) {
        Equilibrium e;
        e.u = r.first;
        e.v = r.second;
        const double x1 = m.theta_u + m.a * e.u + m.b * e.v;
        const double x2 = m.theta_v + m.c * e.u + m.d * e.v;
        e.phi1 = f.slope(x1);
        e.phi2 = f.slope(x2);
        e.alpha = m.a * e.phi1 + m.d * e.phi2;
        e.beta = (m.a * m.d - m.b * m.c) * e.phi1 * e.phi2;
        out.equilibria.push_back(e);
    }
    return out;
}

} // namespace wcdd
