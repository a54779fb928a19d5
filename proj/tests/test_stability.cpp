#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "wcdd/stability.hpp"
#include "support/charroots.hpp"

using namespace wcdd;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
// benchmark characteristic parameters (two-population system with
// a = d = -6, b = c = 3, theta_u = 0.1, theta_v = 0.2, delta = 40)
constexpr double kAlpha = -31.811819912868300;
constexpr double kBeta = 188.84609316346350;
} // namespace

TEST_CASE("nondelayed classifier covers both threshold pieces") {
    CHECK(classify_nondelayed(2.5, 10.0).verdict == Verdict::Unstable);
    CHECK(classify_nondelayed(2.5, 10.0).cause == "alpha >= 2");
    CHECK(classify_nondelayed(1.5, 0.4).verdict == Verdict::Unstable);
    CHECK(classify_nondelayed(1.5, 0.4).cause == "alpha >= beta + 1");
    CHECK(classify_nondelayed(0.0, 0.0).verdict == Verdict::Stable);
    CHECK(classify_nondelayed(1.5, 0.7).verdict == Verdict::Stable);
    CHECK(classify_nondelayed(kAlpha, kBeta).verdict == Verdict::Stable);
    CHECK(classify_nondelayed(2.0, 5.0).verdict == Verdict::Marginal);
    CHECK(classify_nondelayed(2.0 - 1e-12, 5.0).verdict == Verdict::Marginal);
    CHECK(classify_nondelayed(-0.3, -1.3 + 1e-13).verdict == Verdict::Marginal);
}

TEST_CASE("kernel-independent half-space tests") {
    CHECK(delay_independent_test(0.3, 0.5) == DelayIndependent::StableForAllKernels);
    CHECK(delay_independent_test(-0.5, -0.4) == DelayIndependent::StableForAllKernels);
    CHECK(delay_independent_test(0.5, -0.9) == DelayIndependent::UnstableForAllKernels);
    CHECK(delay_independent_test(3.0, 1.5) == DelayIndependent::UnstableForAllKernels);
    CHECK(delay_independent_test(kAlpha, kBeta) == DelayIndependent::Indeterminate);
    CHECK(delay_independent_test(0.6, 0.4) == DelayIndependent::Indeterminate); // |a|+|b| = 1
}

TEST_CASE("fold test matches beta = alpha - 1 away from the corner") {
    CHECK(saddle_node_test(3.0, 2.0));
    CHECK(saddle_node_test(0.5, -0.5));
    CHECK_FALSE(saddle_node_test(2.0, 1.0)); // excluded corner
    CHECK_FALSE(saddle_node_test(1.0, 0.5));
}

TEST_CASE("frequency equation root and slope factor, point delay") {
    const auto ot = find_omega_tau(KernelSpec::dirac(), 1.0);
    REQUIRE(ot.has_value());
    CHECK_THAT(ot->omega, WithinRel(2.0287578381104342, 1e-12));
    CHECK_THAT(ot->mu, WithinRel(-2.2618263341146514, 1e-12));
    // defining relations hold at the root
    CHECK_THAT(ot->omega * std::cos(ot->omega) + std::sin(ot->omega), WithinAbs(0.0, 1e-11));
    CHECK_THAT(ot->mu * std::cos(ot->omega), WithinRel(1.0, 1e-11));
}

TEST_CASE("frequency equation root, strong gamma closed forms") {
    for (double tau : {0.25, 1.0, 3.0}) {
        CAPTURE(tau);
        const auto ot = find_omega_tau(KernelSpec::gamma(2), tau);
        REQUIRE(ot.has_value());
        CHECK_THAT(ot->omega, WithinRel(2.0 * std::sqrt(1.0 + tau), 1e-11));
        CHECK_THAT(ot->mu, WithinRel(-(2.0 + tau) * (2.0 + tau) / tau, 1e-11));
    }
}

TEST_CASE("frequency equation has no root for the weak gamma kernel") {
    CHECK_FALSE(find_omega_tau(KernelSpec::gamma(1), 0.3).has_value());
    CHECK_FALSE(find_omega_tau(KernelSpec::gamma(1), 10.0).has_value());
}

TEST_CASE("frequency equation root, uniform kernel") {
    // theta(omega) = omega as for the point delay, so the root agrees; the
    // slope factor differs through rho
    const auto ot = find_omega_tau(KernelSpec::uniform(0.5), 1.0);
    REQUIRE(ot.has_value());
    CHECK_THAT(ot->omega, WithinRel(2.0287578381104342, 1e-12));
    CHECK_THAT(ot->mu, WithinRel(-2.7019274272931555, 1e-12));

    const auto full = find_omega_tau(KernelSpec::uniform(1.0), 1.0);
    REQUIRE(full.has_value());
    CHECK_THAT(full->omega, WithinRel(2.0287578381104342, 1e-12));
}

TEST_CASE("hopf curve points solve the characteristic equation") {
    using testsupport::cplx;
    const double tau = 0.8;
    for (double omega : {0.3, 1.0, 1.9}) {
        CAPTURE(omega);
        const auto [a, b] = hopf_curve_point(KernelSpec::dirac(), tau, omega);
        const cplx z{0.0, omega / tau};
        CHECK_THAT(std::abs(testsupport::dirac_char(tau, a, b, z)), WithinAbs(0.0, 1e-10));
    }
    for (double omega : {0.4, 1.5, 3.0}) {
        CAPTURE(omega);
        const auto [a, b] = hopf_curve_point(KernelSpec::gamma(2), tau, omega);
        const auto poly = testsupport::gamma_char_poly(2, tau, a, b);
        cplx acc = 0.0;
        const cplx z{0.0, omega / tau};
        for (auto it = poly.rbegin(); it != poly.rend(); ++it) acc = acc * z + *it;
        CHECK_THAT(std::abs(acc), WithinAbs(0.0, 1e-9));
    }
}

TEST_CASE("hopf curve rejects nonpositive frequencies and delays") {
    CHECK_THROWS_AS(hopf_curve_point(KernelSpec::dirac(), 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(hopf_curve_point(KernelSpec::dirac(), 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(find_omega_tau(KernelSpec::dirac(), -1.0), std::invalid_argument);
}

TEST_CASE("bounded outline carries exact corner points") {
    const auto b = build_boundary(KernelSpec::dirac(), 1.0);
    REQUIRE(b.bounded);
    const double mu = b.crossing->mu;

    CHECK(b.curve.front().omega == 0.0);
    CHECK(b.curve.front().alpha == 2.0);
    CHECK(b.curve.front().beta == 1.0);
    CHECK(b.curve.back().omega == b.crossing->omega);
    CHECK(b.curve.back().alpha == 2.0 * mu);
    CHECK(b.curve.back().beta == mu * mu);
    REQUIRE(b.zero_hopf.has_value());
    CHECK((*b.zero_hopf)[0] == 1.0 + mu);
    CHECK((*b.zero_hopf)[1] == mu);
    CHECK(b.true_edge_count == b.polygon.size());

    for (std::size_t i = 1; i < b.curve.size(); ++i) CHECK(b.curve[i].omega > b.curve[i - 1].omega);

    // interior samples satisfy the curve equations
    for (std::size_t i = 1; i + 1 < b.curve.size(); i += b.curve.size() / 7) {
        const auto& s = b.curve[i];
        const auto [a, bb] = hopf_curve_point(KernelSpec::dirac(), 1.0, s.omega);
        CHECK_THAT(s.alpha, WithinAbs(a, 1e-12));
        CHECK_THAT(s.beta, WithinAbs(bb, 1e-12));
    }
}

TEST_CASE("strong gamma outline at tau = 1 has the known corner set") {
    const auto b = build_boundary(KernelSpec::gamma(2), 1.0);
    REQUIRE(b.bounded);
    REQUIRE(b.double_hopf.has_value());
    REQUIRE(b.zero_hopf.has_value());
    CHECK_THAT((*b.double_hopf)[0], WithinRel(-18.0, 1e-10));
    CHECK_THAT((*b.double_hopf)[1], WithinRel(81.0, 1e-10));
    CHECK_THAT((*b.zero_hopf)[0], WithinRel(-8.0, 1e-10));
    CHECK_THAT((*b.zero_hopf)[1], WithinRel(-9.0, 1e-10));
    CHECK(b.bt[0] == 2.0);
    CHECK(b.bt[1] == 1.0);
}

TEST_CASE("unbounded outline marches past the clip frame") {
    AnalysisOptions opts;
    opts.clip_alpha = -50.0;
    opts.clip_beta = 500.0;
    const auto b = build_boundary(KernelSpec::gamma(1), 1.0, opts);
    CHECK_FALSE(b.bounded);
    CHECK_FALSE(b.double_hopf.has_value());
    CHECK(b.true_edge_count < b.polygon.size());
    const auto& last = b.curve.back();
    CHECK((last.alpha <= -50.0 || last.beta >= 500.0));
    CHECK(region_contains(b, 0.0, 0.0));
    CHECK(region_contains(b, -30.0, 100.0)); // weak gamma keeps far-left points stable
    CHECK_FALSE(region_contains(b, -30.0, -40.0));
    CHECK_FALSE(region_contains(b, 3.0, 1.5));
}

TEST_CASE("origin is inside every bounded region") {
    for (const auto& k : {KernelSpec::dirac(), KernelSpec::gamma(2), KernelSpec::gamma(3),
                          KernelSpec::uniform(0.5), KernelSpec::uniform(1.0)}) {
        for (double tau : {0.2, 1.0, 4.0}) {
            CAPTURE(to_string(k), tau);
            const auto b = build_boundary(k, tau);
            REQUIRE(b.bounded);
            CHECK(region_contains(b, 0.0, 0.0));
        }
    }
}

TEST_CASE("classification of the benchmark point across kernels and delays") {
    // point delay: tau* = 0.0674893
    CHECK(classify(KernelSpec::dirac(), 0.05, kAlpha, kBeta).verdict == Verdict::Stable);
    CHECK(classify(KernelSpec::dirac(), 0.05, kAlpha, kBeta).cause ==
          "inside delay-dependent stability region");
    CHECK(classify(KernelSpec::dirac(), 0.08, kAlpha, kBeta).verdict == Verdict::Unstable);
    // strong gamma: tau* = 0.202917
    CHECK(classify(KernelSpec::gamma(2), 0.19, kAlpha, kBeta).verdict == Verdict::Stable);
    CHECK(classify(KernelSpec::gamma(2), 0.21, kAlpha, kBeta).verdict == Verdict::Unstable);
    // uniform eps = 0.5: tau* = 0.0756976
    CHECK(classify(KernelSpec::uniform(0.5), 0.07, kAlpha, kBeta).verdict == Verdict::Stable);
    CHECK(classify(KernelSpec::uniform(0.5), 0.08, kAlpha, kBeta).verdict == Verdict::Unstable);
    // weak gamma: stable for every delay
    for (double tau : {0.07, 0.5, 1.0, 10.0, 100.0})
        CHECK(classify(KernelSpec::gamma(1), tau, kAlpha, kBeta).verdict == Verdict::Stable);
}

TEST_CASE("delay-independent causes are reported") {
    const auto stable = classify(KernelSpec::dirac(), 1.0, 0.2, 0.3);
    CHECK(stable.verdict == Verdict::Stable);
    CHECK(stable.cause == "|alpha| + |beta| < 1");
    const auto unstable = classify(KernelSpec::dirac(), 1.0, 1.0, -0.5);
    CHECK(unstable.verdict == Verdict::Unstable);
    CHECK(unstable.cause == "beta < alpha - 1");
}

TEST_CASE("points hugging the outline are marginal") {
    const auto b = build_boundary(KernelSpec::dirac(), 1.0);
    // midpoint of the fold edge (exact geometry, sag-free)
    const double mu = b.crossing->mu;
    const double ax = 0.5 * (2.0 + 1.0 + mu);
    const auto res = classify(b, ax, ax - 1.0);
    CHECK(res.verdict == Verdict::Marginal);
    CHECK(res.distance_to_boundary < 1e-6);

    const auto off = classify(b, ax, ax - 1.0 + 1e-3);
    CHECK(off.verdict != Verdict::Marginal);
}

TEST_CASE("classifier agrees with characteristic-root counting, point delay") {
    const double tau = 1.0;
    const auto b = build_boundary(KernelSpec::dirac(), tau);
    for (double alpha = -5.5; alpha <= 2.5; alpha += 1.0) {
        for (double beta = -3.25; beta <= 7.25; beta += 1.5) {
            if (boundary_distance(b, alpha, beta) < 0.05) continue;
            CAPTURE(alpha, beta);
            const auto verdict = classify(b, alpha, beta).verdict;
            const int roots = testsupport::dirac_unstable_root_count(tau, alpha, beta);
            CHECK((verdict == Verdict::Stable) == (roots == 0));
        }
    }
}

TEST_CASE("classifier agrees with polynomial roots, strong gamma") {
    const double tau = 0.7;
    const auto b = build_boundary(KernelSpec::gamma(2), tau);
    for (double alpha = -6.3; alpha <= 2.4; alpha += 1.1) {
        for (double beta = -3.1; beta <= 8.3; beta += 1.3) {
            if (boundary_distance(b, alpha, beta) < 0.05) continue;
            CAPTURE(alpha, beta);
            const auto verdict = classify(b, alpha, beta).verdict;
            const double rightmost = testsupport::gamma_rightmost_real_part(2, tau, alpha, beta);
            CHECK((verdict == Verdict::Stable) == (rightmost < 0.0));
        }
    }
}

TEST_CASE("classifier agrees with polynomial roots, weak gamma") {
    const double tau = 2.0;
    const auto b = build_boundary(KernelSpec::gamma(1), tau);
    for (double alpha = -7.3; alpha <= 2.4; alpha += 1.2) {
        for (double beta = -3.6; beta <= 9.1; beta += 1.4) {
            if (boundary_distance(b, alpha, beta) < 0.05) continue;
            CAPTURE(alpha, beta);
            const auto verdict = classify(b, alpha, beta).verdict;
            const double rightmost = testsupport::gamma_rightmost_real_part(1, tau, alpha, beta);
            CHECK((verdict == Verdict::Stable) == (rightmost < 0.0));
        }
    }
}

TEST_CASE("region raster is consistent with pointwise classification") {
    const auto rs = region_scan(KernelSpec::dirac(), 1.0, -4.0, 2.0, -2.0, 5.0, 7, 8);
    REQUIRE(rs.alphas.size() == 7);
    REQUIRE(rs.betas.size() == 8);
    REQUIRE(rs.verdicts.size() == 56);
    CHECK(rs.alphas.front() == -4.0);
    CHECK(rs.alphas.back() == 2.0);
    const auto b = build_boundary(KernelSpec::dirac(), 1.0);
    for (std::size_t i = 0; i < rs.alphas.size(); ++i)
        for (std::size_t j = 0; j < rs.betas.size(); ++j)
            CHECK(rs.verdicts[i * rs.betas.size() + j] ==
                  classify(b, rs.alphas[i], rs.betas[j]).verdict);
    CHECK_THROWS_AS(region_scan(KernelSpec::dirac(), 1.0, 0.0, 1.0, 0.0, 1.0, 1, 5),
                    std::invalid_argument);
}
