#include <catch2/catch_amalgamated.hpp>

#include "wcdd/model.hpp"

using namespace wcdd;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// two-population benchmark system used across the suite
const ModelParams kBench{-6.0, 3.0, 3.0, -6.0, 0.1, 0.2};
const Activation kBenchAct{40.0};

} // namespace

TEST_CASE("logistic activation spot values") {
    const Activation f{40.0};
    CHECK(f.value(0.0) == 0.5);
    CHECK_THAT(f.slope(0.0), WithinRel(10.0, 1e-14));
    CHECK_THAT(f.value(-0.066217), WithinRel(0.066070413602722482, 1e-13));
    CHECK_THAT(f.slope(-0.066217), WithinRel(2.4682045619635067, 1e-13));
    CHECK_THAT(f.slope(-0.062190), WithinRel(2.8337697309114580, 1e-13));
    CHECK_THAT(f.value(0.05), WithinRel(0.88079707797788244, 1e-13));
    CHECK_THAT(f.slope(0.05), WithinRel(4.1997434161402607, 1e-13));
}

TEST_CASE("activation slope matches a centered difference") {
    // points where f is not saturated; near saturation the difference
    // quotient is cancellation-limited and says nothing about the formula
    const Activation f{7.3};
    for (double x : {-0.4, 0.0, 0.45, 0.9}) {
        const double h = 1e-6;
        const double fd = (f.value(x + h) - f.value(x - h)) / (2.0 * h);
        CHECK_THAT(f.slope(x), WithinRel(fd, 1e-7));
    }
}

TEST_CASE("benchmark system has exactly one equilibrium with known data") {
    const auto res = find_equilibria(kBench, kBenchAct);
    REQUIRE(res.equilibria.size() == 1);
    const auto& e = res.equilibria.front();
    CHECK_THAT(e.u, WithinRel(0.066069389366356211, 1e-11));
    CHECK_THAT(e.v, WithinRel(0.076732973740970725, 1e-11));
    CHECK_THAT(e.phi1, WithinRel(2.4681690062045211, 1e-10));
    CHECK_THAT(e.phi2, WithinRel(2.8338009792735289, 1e-10));
    CHECK_THAT(e.alpha, WithinRel(-31.811819912868300, 1e-10));
    CHECK_THAT(e.beta, WithinRel(188.84609316346350, 1e-10));
}

TEST_CASE("equilibria satisfy the steady-state equations") {
    const auto res = find_equilibria(kBench, kBenchAct);
    for (const auto& e : res.equilibria) {
        const double r1 = -e.u + kBenchAct.value(kBench.theta_u + kBench.a * e.u + kBench.b * e.v);
        const double r2 = -e.v + kBenchAct.value(kBench.theta_v + kBench.c * e.u + kBench.d * e.v);
        CHECK_THAT(r1, WithinAbs(0.0, 1e-12));
        CHECK_THAT(r2, WithinAbs(0.0, 1e-12));
    }
}

TEST_CASE("decoupled bistable wiring yields nine equilibria") {
    // u and v decouple; each scalar equation u = f(-4 + 8u) with delta = 2
    // has three roots, so the product system has nine
    const ModelParams m{8.0, 0.0, 0.0, 8.0, -4.0, -4.0};
    const Activation f{2.0};
    const auto res = find_equilibria(m, f, 24);
    CHECK(res.equilibria.size() == 9);
    for (const auto& e : res.equilibria) {
        CHECK_THAT(-e.u + f.value(m.theta_u + 8.0 * e.u), WithinAbs(0.0, 1e-11));
        CHECK_THAT(-e.v + f.value(m.theta_v + 8.0 * e.v), WithinAbs(0.0, 1e-11));
    }
    // middle equilibrium u = v = 0.5 must be among them
    bool has_center = false;
    for (const auto& e : res.equilibria)
        if (std::abs(e.u - 0.5) < 1e-9 && std::abs(e.v - 0.5) < 1e-9) has_center = true;
    CHECK(has_center);
}

TEST_CASE("characteristic parameters recomputed from a converged point") {
    const auto res = find_equilibria(kBench, kBenchAct);
    REQUIRE_FALSE(res.equilibria.empty());
    const auto& e = res.equilibria.front();
    const auto [alpha, beta] = characteristic_params(kBench, kBenchAct, e.u, e.v);
    CHECK_THAT(alpha, WithinRel(e.alpha, 1e-14));
    CHECK_THAT(beta, WithinRel(e.beta, 1e-14));
}

TEST_CASE("characteristic parameters refuse non-equilibrium points") {
    CHECK_THROWS_AS(characteristic_params(kBench, kBenchAct, 0.3, 0.3), std::invalid_argument);
}

TEST_CASE("equilibria come out sorted and deduplicated") {
    const ModelParams m{8.0, 0.0, 0.0, 8.0, -4.0, -4.0};
    const Activation f{2.0};
    const auto res = find_equilibria(m, f, 24);
    for (std::size_t i = 1; i < res.equilibria.size(); ++i) {
        const auto& p = res.equilibria[i - 1];
        const auto& q = res.equilibria[i];
        CHECK((p.u < q.u || (p.u == q.u && p.v < q.v)));
        CHECK((std::abs(p.u - q.u) > 1e-7 || std::abs(p.v - q.v) > 1e-7));
    }
}

TEST_CASE("grid size is validated") {
    CHECK_THROWS_AS(find_equilibria(kBench, kBenchAct, 0), std::invalid_argument);
}
