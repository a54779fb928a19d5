#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wcdd/dde.hpp"

namespace wcdd {

enum class BehaviorKind { Decay, LimitCycle, Irregular };

inline std::string to_string(BehaviorKind k) {
    switch (k) {
        case BehaviorKind::Decay: return "decay";
        case BehaviorKind::LimitCycle: return "limit_cycle";
        case BehaviorKind::Irregular: return "irregular";
    }
    return "?";
}

struct BehaviorThresholds {
    double settle_fraction = 0.5;    // portion of the run discarded as transient
    double decay_distance = 1e-6;    // max distance to equilibrium over the final stretch
    double period_variation = 0.01;  // (max - min) / mean over consecutive peak spacings
    double amplitude_variation = 0.02;
    int min_peaks = 5;
};

struct BehaviorReport {
    BehaviorKind kind = BehaviorKind::Irregular;
    double amplitude = 0.0;          // half the peak-to-trough range of u over the tail
    std::optional<double> period;    // mean peak spacing, set for limit cycles
    double final_distance = 0.0;     // max distance to equilibrium over the last tenth of the tail
    int peak_count = 0;
};

// Classifies the tail of a trajectory relative to the given equilibrium.
// Pragmatic rules: decay when the final stretch hugs the equilibrium;
// limit cycle when enough consecutive peaks of u agree in spacing and height;
// everything else is irregular.
inline BehaviorReport detect_behavior(const Trajectory& traj, double u_eq, double v_eq,
                                      const BehaviorThresholds& thr = {}) {
    const std::size_t n = traj.t.size();
    if (n < 32) throw std::invalid_argument("detect_behavior: trajectory too short");
    std::size_t start = static_cast<std::size_t>(thr.settle_fraction * n);
    if (start > n - 16) start = n - 16;

    BehaviorReport rep;
    double u_min = traj.u[start], u_max = traj.u[start];
    for (std::size_t i = start; i < n; ++i) {
        u_min = std::min(u_min, traj.u[i]);
        u_max = std::max(u_max, traj.u[i]);
    }
    rep.amplitude = 0.5 * (u_max - u_min);

    const std::size_t fin = std::max<std::size_t>(start + (n - start) * 9 / 10, n - 8);
    for (std::size_t i = fin; i < n; ++i)
        rep.final_distance = std::max(rep.final_distance,
                                      std::hypot(traj.u[i] - u_eq, traj.v[i] - v_eq));

    if (rep.final_distance < thr.decay_distance) {
        rep.kind = BehaviorKind::Decay;
        return rep;
    }

    // interior maxima of u with parabolic refinement of (time, height)
    std::vector<double> peak_t, peak_h;
    for (std::size_t i = start + 1; i + 1 < n; ++i) {
        if (traj.u[i - 1] < traj.u[i] && traj.u[i] >= traj.u[i + 1]) {
            const double y0 = traj.u[i - 1], y1 = traj.u[i], y2 = traj.u[i + 1];
            const double denom = y0 - 2.0 * y1 + y2;
            double shift = 0.0;
            if (std::abs(denom) > 1e-300) shift = 0.5 * (y0 - y2) / denom;
            shift = std::clamp(shift, -0.5, 0.5);
            const double dtl = traj.t[i + 1] - traj.t[i];
            peak_t.push_back(traj.t[i] + shift * dtl);
            peak_h.push_back(y1 - 0.25 * (y0 - y2) * shift);
        }
    }
    rep.peak_count = static_cast<int>(peak_t.size());
    if (rep.peak_count < thr.min_peaks) return rep; // irregular

    // judge regularity on the most recent peaks
    const std::size_t use = std::min<std::size_t>(peak_t.size(), 12);
    const std::size_t off = peak_t.size() - use;
    std::vector<double> periods;
    for (std::size_t i = off + 1; i < peak_t.size(); ++i)
        periods.push_back(peak_t[i] - peak_t[i - 1]);
    double p_mean = 0.0;
    for (double p : periods) p_mean += p;
    p_mean /= periods.size();
    double p_lo = periods[0], p_hi = periods[0];
    for (double p : periods) {
        p_lo = std::min(p_lo, p);
        p_hi = std::max(p_hi, p);
    }
    double h_lo = peak_h[off] - u_eq, h_hi = peak_h[off] - u_eq, h_mean = 0.0;
    for (std::size_t i = off; i < peak_h.size(); ++i) {
        const double h = peak_h[i] - u_eq;
        h_lo = std::min(h_lo, h);
        h_hi = std::max(h_hi, h);
        h_mean += h;
    }
    h_mean /= use;
    if (p_mean > 0.0 && (p_hi - p_lo) / p_mean < thr.period_variation && h_mean > 0.0 &&
        (h_hi - h_lo) / h_mean < thr.amplitude_variation) {
        rep.kind = BehaviorKind::LimitCycle;
        rep.period = p_mean;
    }
    return rep;
}

} // namespace wcdd
