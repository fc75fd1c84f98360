#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cir/oracles.hpp"
#include "cir/schemes_two_factor.hpp"

using namespace cir;

namespace {

TwoFactorParams symmetric_unit() {
    // d1 = 8, d2 = 4, all couplings 1
    return TwoFactorParams(2.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0);
}

}  // namespace

TEST_CASE("split step: decoupled zero-noise evaluation") {
    // lambda12 = lambda22 = 0 and integer degrees -> k1 = l1 = 0,
    // y1' = y1 e^{-lambda11 D}.
    TwoFactorParams p(2.0, 1.0, 1.0, 0.0, 1.0, 0.0, 1.0, 1.0, 1.0, 1.0);
    auto [d1, d2] = two_factor_split_degrees(p);
    std::vector<double> z1(std::size_t(d1), 0.0), z2(std::size_t(d2), 0.0);
    const PairState next = two_factor_split_step(p, 0.1, {1.0, 1.0}, z1, z2);
    CHECK(next.y1 == doctest::Approx(1.0 * std::exp(-0.1)));
    CHECK(next.y2 == doctest::Approx(1.0 * std::exp(-0.1)));
}

TEST_CASE("split step: delegation to the exact step") {
    TwoFactorParams p = symmetric_unit();
    auto [d1, d2] = two_factor_split_degrees(p);
    CHECK(d1 == 8);
    CHECK(d2 == 4);
    std::vector<double> z1(8), z2(4);
    std::mt19937_64 gen(5);
    std::normal_distribution<double> n01;
    for (auto& z : z1) z = n01(gen);
    for (auto& z : z2) z = n01(gen);
    const PairState s{0.7, 0.3};
    const PairState next = two_factor_split_step(p, 0.1, s, z1, z2);
    // k1 = 0, l1 = 0 here, so v1 = y1 + D lambda12 y2 and the update is the
    // plain exact step of the sub-process.
    const double v1 = 0.7 + 0.1 * 0.3;
    const double v2 = 0.3 + 0.1 * 0.7;
    CHECK(next.y1 == exact_cir_step(2.0, 1.0, 1.0, v1, 0.1, z1));
    CHECK(next.y2 == exact_cir_step(1.0, 1.0, 1.0, v2, 0.1, z2));
}

TEST_CASE("split step: zero-noise value at the documented point") {
    TwoFactorParams p = symmetric_unit();
    std::vector<double> z1(8, 0.0), z2(4, 0.0);
    const PairState next = two_factor_split_step(p, 0.1, {1.0, 1.0}, z1, z2);
    // v1 = 1.1 (k1 = 0); a zero-noise exact draw decays to v1 e^{-lambda11 D}.
    CHECK(next.y1 == doctest::Approx(1.1 * std::exp(-0.1)).epsilon(1e-12));
    // The step's conditional mean adds the theta-driven part on top:
    // E y1' = v1 e^{-D} + (k2/lambda11)(1 - e^{-D}) ~ 1.1857 (checked via MC below).
}

TEST_CASE("split step: conditional mean matches the exact sub-process mean") {
    TwoFactorParams p = symmetric_unit();
    const double delta = 0.1;
    const double v1 = 1.0 + delta * 1.0 * 1.0;  // 1.1
    const double expected_mean = v1 * std::exp(-delta) + 2.0 * (1.0 - std::exp(-delta));
    CHECK(expected_mean == doctest::Approx(1.1856463237676365));
    GaussianStream g1(SeedSpec{404, 0, 0}), g2(SeedSpec{404, 0, 1});
    std::vector<double> z1(8), z2(4);
    const int n = 200000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        for (auto& z : z1) z = g1.next();
        for (auto& z : z2) z = g2.next();
        const PairState next = two_factor_split_step(p, delta, {1.0, 1.0}, z1, z2);
        sum += next.y1;
        sumsq += next.y1 * next.y1;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sumsq / n - mean * mean) / n);
    CHECK(std::abs(mean - expected_mean) < 3.0 * se);
}

TEST_CASE("squared step: zero-noise evaluations") {
    TwoFactorParams p(2.0, 1.0, 1.0, 0.0, 1.0, 0.0, 1.0, 1.0, 4.0, 1.0);
    const PairState next = two_factor_squared_step(p, 0.1, {4.0, 1.0}, 0.0, 0.0);
    CHECK(next.y1 == doctest::Approx(3.775));  // 4*0.9 + 0.1*(2 - 0.25)
    const PairState origin = two_factor_squared_step(p, 0.1, {0.0, 0.0}, 0.0, 0.0);
    CHECK(origin.y1 == doctest::Approx(0.1 * (2.0 - 0.25)));
    CHECK(origin.y2 == doctest::Approx(0.1 * (1.0 - 0.25)));
}

TEST_CASE("squared step: outputs are nonnegative for any increments") {
    TwoFactorParams p = symmetric_unit();
    std::mt19937_64 gen(77);
    std::normal_distribution<double> n01;
    for (int i = 0; i < 10000; ++i) {
        const double dw1 = 0.3 * n01(gen), dw2 = 0.3 * n01(gen);
        const PairState next =
            two_factor_squared_step(p, 0.1, {2.0 * std::abs(n01(gen)), 2.0 * std::abs(n01(gen))},
                                    dw1, dw2);
        CHECK(next.y1 >= 0.0);
        CHECK(next.y2 >= 0.0);
    }
}

TEST_CASE("cross step: y2 = 0 kills the first coordinate's diffusion") {
    TwoFactorParams p(2.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0);
    const PairState next = two_factor_cross_step(p, 0.1, {1.0, 0.0}, 0.7, -0.4);
    CHECK(next.y1 == doctest::Approx(1.0 * 0.9 + 0.1 * 2.0));
}

TEST_CASE("cross step: documented zero-noise point") {
    TwoFactorParams p = symmetric_unit();
    const PairState next = two_factor_cross_step(p, 0.1, {1.0, 1.0}, 0.0, 0.0);
    CHECK(next.y1 == doctest::Approx(1.175));
}

TEST_CASE("cross step: negative radicand raises DomainError") {
    // y1 = 0, lambda12 = 0, y2 > 4k/sigma1^2 makes the radicand negative.
    TwoFactorParams p(2.0, 1.0, 1.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 100.0);
    CHECK_THROWS_AS(two_factor_cross_step(p, 0.1, {0.0, 100.0}, 0.0, 0.0), DomainError);
}

TEST_CASE("pair path: n = 1 reproduces the squared step") {
    TwoFactorParams p(2.0, 1.0, 1.0, 0.0, 1.0, 0.0, 1.0, 1.0, 4.0, 1.0);
    GridSpec g(0.1, 1);
    const auto r = simulate_pair_path(p, g, SchemeSpec::of(SchemeKind::TwoFactorSquared),
                                      SeedSpec{3, 0, 0});
    REQUIRE(r.values1.size() == 2);
    BrownianPath path = make_brownian_path(SeedSpec{3, 0, 0}, g, 2);
    const PairState next = two_factor_squared_step(p, 0.1, {4.0, 1.0},
                                                   path.increments[0][0], path.increments[1][0]);
    CHECK(r.values1[1] == next.y1);
    CHECK(r.values2[1] == next.y2);
}

TEST_CASE("pair path: parallel update is order independent by construction") {
    // Both coordinates read only time-t_k state, so swapping evaluation order
    // cannot change anything; check the step against manually swapped math.
    TwoFactorParams p = symmetric_unit();
    const PairState s{0.4, 1.7};
    const PairState forward = two_factor_squared_step(p, 0.1, s, 0.2, -0.3);
    // Recompute with coordinate 2 first.
    const double r2 = s.y2 * (1.0 - p.lambda21 * 0.1) + 0.1 * p.lambda22 * s.y1 +
                      0.1 * (p.l - p.sigma2 * p.sigma2 / 4.0);
    const double z2 = 0.5 * p.sigma2 * (-0.3) + std::sqrt(r2);
    const double r1 = s.y1 * (1.0 - p.lambda11 * 0.1) + 0.1 * p.lambda12 * s.y2 +
                      0.1 * (p.k - p.sigma1 * p.sigma1 / 4.0);
    const double z1 = 0.5 * p.sigma1 * 0.2 + std::sqrt(r1);
    CHECK(forward.y2 == z2 * z2);
    CHECK(forward.y1 == z1 * z1);
}

TEST_CASE("pair path: decoupling makes terminal values uncorrelated") {
    TwoFactorParams p(2.0, 1.0, 1.0, 0.0, 1.0, 0.0, 1.0, 1.0, 1.0, 1.0);
    GridSpec g(1.0, 16);
    const int n = 100000;
    double s1 = 0.0, s2 = 0.0, s11 = 0.0, s22 = 0.0, s12 = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto r = simulate_pair_path(p, g, SchemeSpec::of(SchemeKind::TwoFactorSquared),
                                          SeedSpec{606, std::uint32_t(i), 0});
        const double a = r.values1.back(), b = r.values2.back();
        s1 += a;
        s2 += b;
        s11 += a * a;
        s22 += b * b;
        s12 += a * b;
    }
    const double m1 = s1 / n, m2 = s2 / n;
    const double v1 = s11 / n - m1 * m1, v2 = s22 / n - m2 * m2;
    const double cov = s12 / n - m1 * m2;
    const double corr = cov / std::sqrt(v1 * v2);
    CHECK(std::abs(corr) < 3.0 / std::sqrt(double(n)));
}

TEST_CASE("pair path: positivity for both schemes over random valid configs") {
    std::mt19937_64 gen(81);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int checked = 0;
    while (checked < 60) {
        TwoFactorParams p(0.5 + 3.0 * u(gen), 0.5 + 3.0 * u(gen), u(gen), u(gen), u(gen),
                          u(gen), 0.3 + 0.8 * u(gen), 0.3 + 0.8 * u(gen), 3.0 * u(gen),
                          3.0 * u(gen));
        GridSpec g(1.0, 32);
        for (SchemeKind kind : {SchemeKind::TwoFactorSplitExact, SchemeKind::TwoFactorSquared}) {
            if (!validate_two_factor(p, g, kind).valid) continue;
            const auto r = simulate_pair_path(p, g, SchemeSpec::of(kind),
                                              SeedSpec{std::uint64_t(checked), 0, 0});
            for (double y : r.values1) CHECK(y >= 0.0);
            for (double y : r.values2) CHECK(y >= 0.0);
            ++checked;
        }
    }
}

TEST_CASE("pair path: cross-diffusion abort is reported, not thrown") {
    TwoFactorParams p(2.0, 1.0, 0.1, 0.0, 0.1, 0.0, 1.5, 1.5, 0.0, 200.0);
    GridSpec g(1.0, 8);
    const auto r = simulate_pair_path(p, g, SchemeSpec::of(SchemeKind::TwoFactorCrossDiffusion),
                                      SeedSpec{1, 0, 0});
    CHECK(r.aborted);
    CHECK_FALSE(r.abort_reason.empty());
}

TEST_CASE("pair path means track the mean-ODE oracle") {
    TwoFactorParams p = symmetric_unit();
    GridSpec g(1.0, 64);
    const int n = 100000;
    double s1 = 0.0, s2 = 0.0, q1 = 0.0, q2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto r = simulate_pair_path(p, g, SchemeSpec::of(SchemeKind::TwoFactorSquared),
                                          SeedSpec{7007, std::uint32_t(i), 0});
        s1 += r.values1.back();
        s2 += r.values2.back();
        q1 += r.values1.back() * r.values1.back();
        q2 += r.values2.back() * r.values2.back();
    }
    const double m1 = s1 / n, m2 = s2 / n;
    const double se1 = std::sqrt((q1 / n - m1 * m1) / n);
    const double se2 = std::sqrt((q2 / n - m2 * m2) / n);
    const auto ode = oracles::two_factor_mean_ode(p, 1.0, 1024);
    // Scheme mean map is explicit Euler on the mean ODE; its bias at this
    // delta is computable and small, folded into the band below.
    double e1 = p.x10, e2 = p.x20;
    for (int i = 0; i < g.n_steps; ++i) {
        const double n1 = e1 * (1.0 - p.lambda11 * g.delta()) + g.delta() * p.lambda12 * e2 +
                          g.delta() * p.k;
        const double n2 = e2 * (1.0 - p.lambda21 * g.delta()) + g.delta() * p.lambda22 * e1 +
                          g.delta() * p.l;
        e1 = n1;
        e2 = n2;
    }
    const double bias1 = std::abs(e1 - ode.back().m1);
    const double bias2 = std::abs(e2 - ode.back().m2);
    CHECK(std::abs(m1 - ode.back().m1) < 3.0 * se1 + bias1);
    CHECK(std::abs(m2 - ode.back().m2) < 3.0 * se2 + bias2);
}
