#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "wcdd/errors.hpp"
#include "wcdd/kernel.hpp"
#include "wcdd/model.hpp"

namespace wcdd {

// Initial data on (-inf, 0]. Either a constant state or a natural cubic
// spline through samples at nonpositive times, extended by constants beyond
// the sampled range.
class HistoryFunction {
public:
    static HistoryFunction constant(double u0, double v0) {
        HistoryFunction h;
        h.const_u_ = u0;
        h.const_v_ = v0;
        return h;
    }

    static HistoryFunction sampled(std::vector<double> times, std::vector<double> u,
                                   std::vector<double> v) {
        if (times.size() != u.size() || times.size() != v.size())
            throw std::invalid_argument("history: times/u/v must have equal lengths");
        if (times.empty()) throw std::invalid_argument("history: needs at least one sample");
        for (std::size_t i = 0; i < times.size(); ++i) {
            if (times[i] > 1e-12) throw std::invalid_argument("history: sample times must be <= 0");
            if (i > 0 && !(times[i] > times[i - 1]))
                throw std::invalid_argument("history: sample times must be strictly increasing");
        }
        HistoryFunction h;
        if (times.size() == 1) {
            h.const_u_ = u[0];
            h.const_v_ = v[0];
            return h;
        }
        h.t_ = std::move(times);
        h.u_ = std::move(u);
        h.v_ = std::move(v);
        h.mu_ = natural_spline_moments(h.t_, h.u_);
        h.mv_ = natural_spline_moments(h.t_, h.v_);
        return h;
    }

    bool is_constant() const { return t_.empty(); }

    std::pair<double, double> operator()(double t) const {
        if (t_.empty()) return {const_u_, const_v_};
        if (t <= t_.front()) return {u_.front(), v_.front()};
        if (t >= t_.back()) return {u_.back(), v_.back()};
        const auto it = std::upper_bound(t_.begin(), t_.end(), t);
        const std::size_t i = static_cast<std::size_t>(it - t_.begin()) - 1;
        return {spline_eval(i, t, u_, mu_), spline_eval(i, t, v_, mv_)};
    }

private:
    // second derivatives of the natural cubic spline (Thomas algorithm)
    static std::vector<double> natural_spline_moments(const std::vector<double>& t,
                                                      const std::vector<double>& y) {
        const std::size_t n = t.size();
        std::vector<double> m(n, 0.0);
        if (n < 3) return m;
        std::vector<double> diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double h0 = t[i] - t[i - 1];
            const double h1 = t[i + 1] - t[i];
            diag[i] = 2.0 * (h0 + h1);
            upper[i] = h1;
            rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
        }
        for (std::size_t i = 2; i + 1 < n; ++i) {
            const double w = (t[i] - t[i - 1]) / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        for (std::size_t i = n - 2; i >= 1; --i) {
            m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];
            if (i == 1) break;
        }
        return m;
    }

    double spline_eval(std::size_t i, double t, const std::vector<double>& y,
                       const std::vector<double>& m) const {
        const double h = t_[i + 1] - t_[i];
        const double a = (t_[i + 1] - t) / h;
        const double b = (t - t_[i]) / h;
        return a * y[i] + b * y[i + 1] +
               ((a * a * a - a) * m[i] + (b * b * b - b) * m[i + 1]) * h * h / 6.0;
    }

    double const_u_ = 0.0, const_v_ = 0.0;
    std::vector<double> t_, u_, v_, mu_, mv_;
};

struct SimConfig {
    double dt = 1e-3;
    double t_end = 50.0;
    int record_stride = 1;
    double quadrature_cutoff_mass = 1e-10; // gamma-kernel tail mass dropped by the quadrature solver
};

struct Trajectory {
    std::vector<double> t, u, v;
    std::vector<std::string> aux_names;      // chain solver: x1..xp, y1..yp
    std::vector<std::vector<double>> aux;    // aux[k][i], same length as t
    KernelSpec kernel;
    double tau = 0.0;
    ModelParams params;
    Activation activation;
};

namespace detail {

struct Recorder {
    Trajectory* traj;
    int stride;
    long next = 0;

    void operator()(long step, double t, double u, double v, const double* aux = nullptr,
                    std::size_t n_aux = 0, bool final = false) {
        if (step < next && !final) return;
        if (final && !traj->t.empty() && traj->t.back() == t) return;
        traj->t.push_back(t);
        traj->u.push_back(u);
        traj->v.push_back(v);
        for (std::size_t k = 0; k < n_aux; ++k) traj->aux[k].push_back(aux[k]);
        next = step + stride;
    }
};

inline void check_sim_config(const SimConfig& cfg) {
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("simulate: dt must be > 0");
    if (!(cfg.t_end > 0.0)) throw std::invalid_argument("simulate: t_end must be > 0");
    if (cfg.record_stride < 1) throw std::invalid_argument("simulate: record_stride must be >= 1");
}

// cubic Hermite value on [t0, t0 + h] at fraction s
inline double hermite(double y0, double d0, double y1, double d1, double h, double s) {
    const double s2 = s * s, s3 = s2 * s;
    return (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * h * d0 +
           (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * h * d1;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Point-delay solver: method of steps, RK4 with cubic Hermite dense output.
// The step is snapped to an integer fraction of tau so every delayed argument
// falls on a node or half-node and breakpoints stay on the grid.
// ---------------------------------------------------------------------------
inline Trajectory simulate_dirac(const ModelParams& m, const Activation& f, double tau,
                                 const HistoryFunction& history, const SimConfig& cfg) {
    detail::check_sim_config(cfg);
    if (!(tau > 0.0)) throw std::invalid_argument("simulate_dirac: tau must be > 0");
    if (cfg.dt > tau * (1.0 + 1e-12)) throw std::invalid_argument("simulate_dirac: step exceeds delay");
    const long mlag = std::max(1L, std::lround(tau / cfg.dt));
    const double dt = tau / static_cast<double>(mlag);
    const long n = static_cast<long>(std::ceil(cfg.t_end / dt - 1e-9));

    std::vector<double> u(n + 1), v(n + 1), du(n + 1), dv(n + 1);
    auto deriv = [&](double uu, double vv, double ud, double vd, double& ou, double& ov) {
        ou = -uu + f.value(m.theta_u + m.a * ud + m.b * vd);
        ov = -vv + f.value(m.theta_v + m.c * ud + m.d * vd);
    };
    // delayed state at node j (+ half a step when half is set)
    auto delayed = [&](long j, bool half) -> std::pair<double, double> {
        if (half) {
            const double tq = (j + 0.5) * dt;
            if (tq <= 0.0) return history(tq);
            return {detail::hermite(u[j], du[j], u[j + 1], du[j + 1], dt, 0.5),
                    detail::hermite(v[j], dv[j], v[j + 1], dv[j + 1], dt, 0.5)};
        }
        if (j <= 0) return history(j * dt);
        return {u[j], v[j]};
    };

    std::tie(u[0], v[0]) = history(0.0);
    {
        const auto [ud, vd] = history(-tau);
        deriv(u[0], v[0], ud, vd, du[0], dv[0]);
    }

    Trajectory out;
    out.kernel = KernelSpec::dirac();
    out.tau = tau;
    out.params = m;
    out.activation = f;
    detail::Recorder rec{&out, cfg.record_stride};
    rec(0, 0.0, u[0], v[0]);

    for (long i = 0; i < n; ++i) {
        const long j = i - mlag;
        double k1u, k1v, k2u, k2v, k3u, k3v, k4u, k4v;
        {
            const auto [ud, vd] = delayed(j, false);
            deriv(u[i], v[i], ud, vd, k1u, k1v);
        }
        {
            const auto [ud, vd] = delayed(j, true);
            deriv(u[i] + 0.5 * dt * k1u, v[i] + 0.5 * dt * k1v, ud, vd, k2u, k2v);
            deriv(u[i] + 0.5 * dt * k2u, v[i] + 0.5 * dt * k2v, ud, vd, k3u, k3v);
        }
        {
            const auto [ud, vd] = delayed(j + 1, false);
            deriv(u[i] + dt * k3u, v[i] + dt * k3v, ud, vd, k4u, k4v);
        }
        u[i + 1] = u[i] + dt / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        v[i + 1] = v[i] + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        {
            const auto [ud, vd] = delayed(j + 1, false);
            deriv(u[i + 1], v[i + 1], ud, vd, du[i + 1], dv[i + 1]);
        }
        rec(i + 1, (i + 1) * dt, u[i + 1], v[i + 1], nullptr, 0, i + 1 == n);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Gamma-kernel solver: linear chain trick. The convolved inputs are produced
// by p first-order stages relaxing at rate p/tau; the last stage replaces the
// integral exactly. State layout: [u, v, x1..xp, y1..yp].
// ---------------------------------------------------------------------------
inline Trajectory simulate_gamma_chain(const ModelParams& m, const Activation& f, double tau, int p,
                                       const HistoryFunction& history, const SimConfig& cfg) {
    detail::check_sim_config(cfg);
    if (!(tau > 0.0)) throw std::invalid_argument("simulate_gamma_chain: tau must be > 0");
    if (p < 1) throw std::invalid_argument("simulate_gamma_chain: order must be >= 1");
    const double rate = p / tau;
    const std::size_t dim = 2 + 2 * static_cast<std::size_t>(p);

    auto deriv = [&](const std::vector<double>& y, std::vector<double>& dy) {
        const double* x = y.data() + 2;
        const double* yc = y.data() + 2 + p;
        dy[0] = -y[0] + f.value(m.theta_u + x[p - 1]);
        dy[1] = -y[1] + f.value(m.theta_v + yc[p - 1]);
        const double w1 = m.a * y[0] + m.b * y[1];
        const double w2 = m.c * y[0] + m.d * y[1];
        dy[2] = rate * (w1 - x[0]);
        dy[2 + p] = rate * (w2 - yc[0]);
        for (int k = 1; k < p; ++k) {
            dy[2 + k] = rate * (x[k - 1] - x[k]);
            dy[2 + p + k] = rate * (yc[k - 1] - yc[k]);
        }
    };

    std::vector<double> y(dim), dy(dim), y2(dim), k1(dim), k2(dim), k3(dim), k4(dim);
    std::tie(y[0], y[1]) = history(0.0);
    if (history.is_constant()) {
        const double w1 = m.a * y[0] + m.b * y[1];
        const double w2 = m.c * y[0] + m.d * y[1];
        for (int k = 0; k < p; ++k) {
            y[2 + k] = w1;
            y[2 + p + k] = w2;
        }
    } else {
        // stage k holds the history convolved against an order-(k+1) Erlang
        // density; composite Simpson over the effective support
        const double span = (p + 60.0) / rate;
        const int N = 8192;
        const double hstep = span / N;
        for (int k = 0; k < p; ++k) {
            double acc1 = 0.0, acc2 = 0.0;
            for (int i = 0; i <= N; ++i) {
                const double s = i * hstep;
                double g;
                if (s == 0.0) {
                    g = (k == 0) ? rate : 0.0;
                } else {
                    g = std::exp((k + 1) * std::log(rate) + k * std::log(s) - rate * s -
                                 std::lgamma(k + 1));
                }
                const double wgt = (i == 0 || i == N) ? 1.0 : (i % 2 ? 4.0 : 2.0);
                const auto [hu, hv] = history(-s);
                acc1 += wgt * g * (m.a * hu + m.b * hv);
                acc2 += wgt * g * (m.c * hu + m.d * hv);
            }
            y[2 + k] = acc1 * hstep / 3.0;
            y[2 + p + k] = acc2 * hstep / 3.0;
        }
    }

    const long n = static_cast<long>(std::ceil(cfg.t_end / cfg.dt - 1e-9));
    const double dt = cfg.dt;

    Trajectory out;
    out.kernel = KernelSpec::gamma(p);
    out.tau = tau;
    out.params = m;
    out.activation = f;
    out.aux.resize(2 * p);
    for (int k = 0; k < p; ++k) out.aux_names.push_back("x" + std::to_string(k + 1));
    for (int k = 0; k < p; ++k) out.aux_names.push_back("y" + std::to_string(k + 1));
    detail::Recorder rec{&out, cfg.record_stride};
    rec(0, 0.0, y[0], y[1], y.data() + 2, 2 * p);

    for (long i = 0; i < n; ++i) {
        deriv(y, k1);
        for (std::size_t s = 0; s < dim; ++s) y2[s] = y[s] + 0.5 * dt * k1[s];
        deriv(y2, k2);
        for (std::size_t s = 0; s < dim; ++s) y2[s] = y[s] + 0.5 * dt * k2[s];
        deriv(y2, k3);
        for (std::size_t s = 0; s < dim; ++s) y2[s] = y[s] + dt * k3[s];
        deriv(y2, k4);
        for (std::size_t s = 0; s < dim; ++s)
            y[s] += dt / 6.0 * (k1[s] + 2.0 * k2[s] + 2.0 * k3[s] + k4[s]);
        rec(i + 1, (i + 1) * dt, y[0], y[1], y.data() + 2, 2 * p, i + 1 == n);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Direct-quadrature solver (gamma and uniform kernels): Heun steps with the
// distributed term evaluated by a trapezoid rule over the kernel support.
// Discrete weights are normalized to unit mass so equilibria are preserved
// exactly. Used as the cross-check for the structural solvers.
// ---------------------------------------------------------------------------
inline Trajectory simulate_quadrature(const ModelParams& m, const Activation& f, const KernelSpec& k,
                                      double tau, const HistoryFunction& history,
                                      const SimConfig& cfg) {
    detail::check_sim_config(cfg);
    if (!(tau > 0.0)) throw std::invalid_argument("simulate_quadrature: tau must be > 0");
    if (k.family == KernelFamily::Dirac)
        throw kernel_domain_error("simulate_quadrature: point delays have no density; use simulate_dirac");

    const double dt = cfg.dt;
    std::vector<double> lag;     // offsets r_j > ordered ascending
    std::vector<double> weight;  // normalized quadrature weights
    if (k.family == KernelFamily::Gamma) {
        const int p = k.order;
        const double rate = p / tau;
        // radius R with upper-tail mass below the cutoff
        double r_hi = tau;
        auto tail = [&](double r) {
            // Q(p, rate r) = e^-x sum_{j<p} x^j/j!
            const double x = rate * r;
            double term = std::exp(-x), acc = term;
            for (int j = 1; j < p; ++j) {
                term *= x / j;
                acc += term;
            }
            return acc;
        };
        while (tail(r_hi) > cfg.quadrature_cutoff_mass && r_hi < 1e6 * tau) r_hi *= 2.0;
        const long K = std::max(8L, static_cast<long>(std::ceil(r_hi / dt)));
        lag.resize(K + 1);
        weight.resize(K + 1);
        for (long j = 0; j <= K; ++j) {
            lag[j] = j * dt;
            const double w = (j == 0 || j == K) ? 0.5 * dt : dt;
            weight[j] = w * density(k, tau, lag[j]);
        }
    } else {
        const double lo = tau * (1.0 - k.half_width);
        const double hi = tau * (1.0 + k.half_width);
        const long M = std::max(16L, static_cast<long>(std::ceil((hi - lo) / dt)));
        lag.resize(M + 1);
        weight.resize(M + 1);
        const double step = (hi - lo) / M;
        for (long j = 0; j <= M; ++j) {
            lag[j] = lo + j * step;
            weight[j] = (j == 0 || j == M) ? 0.5 * step : step;
            weight[j] *= density(k, tau, lag[j]);
        }
    }
    double mass = 0.0;
    for (double w : weight) mass += w;
    for (double& w : weight) w /= mass;

    const long n = static_cast<long>(std::ceil(cfg.t_end / dt - 1e-9));
    std::vector<double> u(n + 2), v(n + 2);
    std::tie(u[0], v[0]) = history(0.0);

    // state at arbitrary time: history for s <= 0, else linear interpolation
    // on the step grid (valid up to the last filled index)
    auto state = [&](double s, long filled) -> std::pair<double, double> {
        if (s <= 0.0) return history(s);
        double idx = s / dt;
        long j = static_cast<long>(idx);
        if (j >= filled) j = filled - 1;
        const double frac = std::clamp(idx - j, 0.0, 1.0);
        return {u[j] + frac * (u[j + 1] - u[j]), v[j] + frac * (v[j + 1] - v[j])};
    };
    auto conv = [&](double t, long filled, double& i1, double& i2) {
        i1 = i2 = 0.0;
        for (std::size_t j = 0; j < lag.size(); ++j) {
            const auto [us, vs] = state(t - lag[j], filled);
            i1 += weight[j] * (m.a * us + m.b * vs);
            i2 += weight[j] * (m.c * us + m.d * vs);
        }
    };

    Trajectory out;
    out.kernel = k;
    out.tau = tau;
    out.params = m;
    out.activation = f;
    detail::Recorder rec{&out, cfg.record_stride};
    rec(0, 0.0, u[0], v[0]);

    for (long i = 0; i < n; ++i) {
        double i1, i2;
        conv(i * dt, i, i1, i2);
        const double fu0 = -u[i] + f.value(m.theta_u + i1);
        const double fv0 = -v[i] + f.value(m.theta_v + i2);
        u[i + 1] = u[i] + dt * fu0; // predictor, overwritten by the corrector
        v[i + 1] = v[i] + dt * fv0;
        conv((i + 1) * dt, i + 1, i1, i2);
        const double fu1 = -u[i + 1] + f.value(m.theta_u + i1);
        const double fv1 = -v[i + 1] + f.value(m.theta_v + i2);
        u[i + 1] = u[i] + 0.5 * dt * (fu0 + fu1);
        v[i + 1] = v[i] + 0.5 * dt * (fv0 + fv1);
        rec(i + 1, (i + 1) * dt, u[i + 1], v[i + 1], nullptr, 0, i + 1 == n);
    }
    return out;
}

// tau = 0: the distributed term collapses to the instantaneous feed.
inline Trajectory simulate_nondelayed(const ModelParams& m, const Activation& f, double u0, double v0,
                                      const SimConfig& cfg) {
    detail::check_sim_config(cfg);
    auto deriv = [&](double uu, double vv, double& ou, double& ov) {
        ou = -uu + f.value(m.theta_u + m.a * uu + m.b * vv);
        ov = -vv + f.value(m.theta_v + m.c * uu + m.d * vv);
    };
    const long n = static_cast<long>(std::ceil(cfg.t_end / cfg.dt - 1e-9));
    const double dt = cfg.dt;
    double u = u0, v = v0;

    Trajectory out;
    out.kernel = KernelSpec::dirac();
    out.tau = 0.0;
    out.params = m;
    out.activation = f;
    detail::Recorder rec{&out, cfg.record_stride};
    rec(0, 0.0, u, v);
    for (long i = 0; i < n; ++i) {
        double k1u, k1v, k2u, k2v, k3u, k3v, k4u, k4v;
        deriv(u, v, k1u, k1v);
        deriv(u + 0.5 * dt * k1u, v + 0.5 * dt * k1v, k2u, k2v);
        deriv(u + 0.5 * dt * k2u, v + 0.5 * dt * k2v, k3u, k3v);
        deriv(u + dt * k3u, v + dt * k3v, k4u, k4v);
        u += dt / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        rec(i + 1, (i + 1) * dt, u, v, nullptr, 0, i + 1 == n);
    }
    return out;
}

} // namespace wcdd
