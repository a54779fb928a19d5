#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>
#include <string_view>

#include "wcdd/errors.hpp"

namespace wcdd {

enum class KernelFamily { Dirac, Gamma, Uniform };

// Normalized delay kernel with mean delay tau (tau is supplied per call, not
// stored here, so one spec can be reused across the tau sweeps).
//
//   Dirac          h(s) = delta(s - tau)
//   Gamma, order p h(s) = (p/tau)^p s^(p-1) e^(-p s/tau) / (p-1)!
//   Uniform        h(s) = 1/(2 eps tau) on [tau(1-eps), tau(1+eps)]
struct KernelSpec {
    KernelFamily family = KernelFamily::Dirac;
    int order = 0;        // Gamma only, p >= 1
    double half_width = 0.0; // Uniform only, eps in (0, 1]

    static KernelSpec dirac() { return {KernelFamily::Dirac, 0, 0.0}; }

    static KernelSpec gamma(int p) {
        if (p < 1) throw std::invalid_argument("gamma kernel order must be >= 1, got " + std::to_string(p));
        return {KernelFamily::Gamma, p, 0.0};
    }

    static KernelSpec uniform(double eps) {
        if (!(eps > 0.0) || !(eps <= 1.0))
            throw std::invalid_argument("uniform kernel half-width must lie in (0, 1], got " + std::to_string(eps));
        return {KernelFamily::Uniform, 0, eps};
    }

    bool operator==(const KernelSpec&) const = default;
};

// Grammar: "dirac" | "gamma:p=<int>" | "uniform:eps=<real>".
inline KernelSpec parse_kernel(std::string_view text) {
    auto fail = [&](std::string_view token) -> KernelSpec {
        throw std::invalid_argument("bad kernel string \"" + std::string(text) +
                                    "\": offending token \"" + std::string(token) + "\"");
    };
    if (text == "dirac") return KernelSpec::dirac();
    auto colon = text.find(':');
    std::string_view head = text.substr(0, colon);
    if (head == "gamma") {
        if (colon == std::string_view::npos) return fail(head);
        std::string_view arg = text.substr(colon + 1);
        if (arg.substr(0, 2) != "p=") return fail(arg);
        std::string digits(arg.substr(2));
        std::size_t used = 0;
        int p = 0;
        try {
            p = std::stoi(digits, &used);
        } catch (const std::exception&) {
            return fail(arg);
        }
        if (used != digits.size() || p < 1) return fail(arg);
        return KernelSpec::gamma(p);
    }
    if (head == "uniform") {
        if (colon == std::string_view::npos) return fail(head);
        std::string_view arg = text.substr(colon + 1);
        if (arg.substr(0, 4) != "eps=") return fail(arg);
        std::string digits(arg.substr(4));
        std::size_t used = 0;
        double eps = 0.0;
        try {
            eps = std::stod(digits, &used);
        } catch (const std::exception&) {
            return fail(arg);
        }
        if (used != digits.size() || !(eps > 0.0) || !(eps <= 1.0)) return fail(arg);
        return KernelSpec::uniform(eps);
    }
    return fail(head);
}

inline std::string to_string(const KernelSpec& k) {
    switch (k.family) {
        case KernelFamily::Dirac: return "dirac";
        case KernelFamily::Gamma: return "gamma:p=" + std::to_string(k.order);
        case KernelFamily::Uniform: {
            char buf[48];
            std::snprintf(buf, sizeof buf, "uniform:eps=%.17g", k.half_width);
            return buf;
        }
    }
    return "?";
}

// Density h(s) for mean delay tau. The Dirac family has no density; callers
// that need it (plots, quadrature) must special-case it.
inline double density(const KernelSpec& k, double tau, double s) {
    if (!(tau > 0.0)) throw std::invalid_argument("density requires tau > 0");
    switch (k.family) {
        case KernelFamily::Dirac:
            throw kernel_domain_error("dirac kernel has no density function");
        case KernelFamily::Gamma: {
            if (s < 0.0) return 0.0;
            const int p = k.order;
            const double rate = p / tau;
            // (rate^p / (p-1)!) s^(p-1) e^(-rate s), evaluated in log space
            double lg = p * std::log(rate) - std::lgamma(p);
            if (s == 0.0) return p == 1 ? rate : 0.0;
            lg += (p - 1) * std::log(s) - rate * s;
            return std::exp(lg);
        }
        case KernelFamily::Uniform: {
            const double lo = tau * (1.0 - k.half_width);
            const double hi = tau * (1.0 + k.half_width);
            return (s >= lo && s <= hi) ? 1.0 / (2.0 * k.half_width * tau) : 0.0;
        }
    }
    return 0.0;
}

// Laplace transform of the density at mean delay tau.
inline std::complex<double> laplace(const KernelSpec& k, double tau, std::complex<double> z) {
    if (!(tau > 0.0)) throw std::invalid_argument("laplace requires tau > 0");
    switch (k.family) {
        case KernelFamily::Dirac:
            return std::exp(-tau * z);
        case KernelFamily::Gamma: {
            const double p = k.order;
            return std::pow(p / (p + tau * z), p);
        }
        case KernelFamily::Uniform: {
            const double e = k.half_width;
            const std::complex<double> w = e * tau * z;
            if (std::abs(w) < 1e-8) {
                // sinh(w)/w = 1 + w^2/6 + w^4/120 + ...
                const std::complex<double> w2 = w * w;
                return std::exp(-tau * z) * (1.0 + w2 / 6.0 + w2 * w2 / 120.0);
            }
            return std::exp(-tau * z) * std::sinh(w) / w;
        }
    }
    return {};
}

// Polar decomposition of the *scaled* transform: with z = i omega / tau,
// H(i omega/tau) = rho(omega) e^(-i theta(omega)) where omega is the scaled
// frequency (crossing frequency times tau). rho > 0 on the supported range.
struct PolarTransform {
    double rho = 1.0;
    double theta = 0.0;
    double omega = 0.0;
};

// Largest scaled frequency for which the polar form is valid (rho > 0).
inline double polar_omega_limit(const KernelSpec& k) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (k.family) {
        case KernelFamily::Dirac: return inf;
        case KernelFamily::Gamma: return inf;
        case KernelFamily::Uniform: return std::numbers::pi / k.half_width;
    }
    return inf;
}

inline PolarTransform polar_transform(const KernelSpec& k, double omega) {
    if (!(omega >= 0.0)) throw kernel_domain_error("polar form requires omega >= 0");
    switch (k.family) {
        case KernelFamily::Dirac:
            return {1.0, omega, omega};
        case KernelFamily::Gamma: {
            const double p = k.order;
            const double rho = std::pow(p / std::hypot(p, omega), p);
            const double theta = p * std::atan(omega / p);
            return {rho, theta, omega};
        }
        case KernelFamily::Uniform: {
            const double e = k.half_width;
            if (omega >= polar_omega_limit(k))
                throw kernel_domain_error("uniform kernel polar form valid only for omega < pi/eps");
            const double x = e * omega;
            const double rho = x < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
            return {rho, omega, omega};
        }
    }
    return {};
}

// d(theta)/d(omega); used to pace frequency scans so each step advances the
// phase by a roughly constant amount.
inline double polar_theta_slope(const KernelSpec& k, double omega) {
    if (k.family == KernelFamily::Gamma) {
        const double r = omega / k.order;
        return 1.0 / (1.0 + r * r);
    }
    return 1.0;
}

} // namespace wcdd
