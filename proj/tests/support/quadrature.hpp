#pragma once

// Adaptive Simpson quadrature used by tests to cross-check kernel densities
// and transforms against their closed forms.

#include <cmath>
#include <complex>
#include <functional>

namespace testsupport {

namespace detail {

template <class F, class T>
T simpson_rec(const F& f, double a, double b, T fa, T fm, T fb, T whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const T flm = f(lm), frm = f(rm);
    const T left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const T right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const T delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, tol * 0.5, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, tol * 0.5, depth - 1);
}

} // namespace detail

// Pre-split into fixed panels so far-off narrow features (a kernel bump deep
// inside a wide window) cannot hide from the first Simpson stencil.
template <class T = double, class F>
T integrate(const F& f, double a, double b, double tol = 1e-12, int depth = 40, int panels = 64) {
    T total{};
    for (int i = 0; i < panels; ++i) {
        const double pa = a + (b - a) * i / panels;
        const double pb = a + (b - a) * (i + 1) / panels;
        const T fa = f(pa), fb = f(pb), fm = f(0.5 * (pa + pb));
        const T whole = (pb - pa) / 6.0 * (fa + 4.0 * fm + fb);
        total += detail::simpson_rec(f, pa, pb, fa, fm, fb, whole, tol / panels, depth);
    }
    return total;
}

} // namespace testsupport
