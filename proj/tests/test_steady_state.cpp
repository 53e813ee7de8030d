#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "ptcav/steady_state.hpp"

using namespace ptcav;

namespace {

Params fig3(double kappa_over_kc) {
    Params p;
    p.g0 = 0.1;
    p.f0 = 0.005;
    p.gamma0 = 0.0113;
    p.kappa = kappa_over_kc * critical_coupling(p);
    return p;
}

Params three_to_one(double gamma0, double f0, double kappa) {
    Params p;
    p.gamma0 = gamma0;
    p.f0 = f0;
    p.g0 = 3 * f0;
    p.kappa = kappa;
    return p;
}

Params random_lasing(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Params p;
    p.gamma0 = 0.001 + 0.02 * u(rng);
    p.f0 = 0.001 + 0.05 * u(rng);
    p.g0 = p.f0 + 2 * p.gamma0 * (1.05 + 5 * u(rng));
    return p;
}

} // namespace

TEST_CASE("PT branch at g0 = 3 f0") {
    const double g = 0.005;
    const Params p = three_to_one(g, 0.02, 5 * g);
    const auto s = pt_symmetric_branch(p);
    CHECK(s.g_sat == doctest::Approx(3 * g).epsilon(1e-15));
    CHECK(s.f_sat == doctest::Approx(g).epsilon(1e-15));
    CHECK(s.net_gain == doctest::Approx(2 * g).epsilon(1e-15));
    CHECK(s.net_loss == doctest::Approx(2 * g).epsilon(1e-15));
    CHECK(s.eta == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(s.rho == 1.0);
    CHECK(s.regime == Regime::PTSymmetric);
    REQUIRE(s.detunings.size() == 2);
    CHECK(s.detunings[0] == doctest::Approx(std::sqrt(25.0 - 4.0) * g).epsilon(1e-14));
    CHECK(s.detunings[1] == -s.detunings[0]);
}

TEST_CASE("PT branch at the fig. 3 parameters") {
    const Params p = fig3(2.0);
    const auto s = pt_symmetric_branch(p);
    CHECK(s.n1 == doctest::Approx(3.2035398230088497).epsilon(1e-13));
    CHECK(s.n2 == doctest::Approx(s.n1).epsilon(1e-14));
    CHECK(s.detunings[0] == doctest::Approx(std::sqrt(3.0) * critical_coupling(p)).epsilon(1e-14));
    CHECK(s.eta == doctest::Approx(0.05).epsilon(1e-14));
    CHECK(efficiency_pt(p) == doctest::Approx(0.05).epsilon(1e-15));
    // both frequency branches solve the stationarity equations
    CHECK(stationarity_residual(s.amplitudes(), s.detunings[0], p) < 1e-14);
    AnalyticSteadyState<double> mirrored = s;
    mirrored.phase = std::numbers::pi - s.phase;
    CHECK(stationarity_residual(mirrored.amplitudes(), s.detunings[1], p) < 1e-14);
    // the published sin(phase) = gamma0/kappa does not
    AnalyticSteadyState<double> published = s;
    published.phase = std::asin(p.gamma0 / p.kappa);
    CHECK(stationarity_residual(published.amplitudes(), s.detunings[0], p) > 1e-3);
}

TEST_CASE("PT branch preconditions") {
    Params p = fig3(2.0);
    p.kappa = 0.5 * critical_coupling(p);
    CHECK_THROWS_WITH_AS(pt_symmetric_branch(p), doctest::Contains("kappa > kappa_c"), Error);
    p.kappa = critical_coupling(p);
    CHECK_THROWS_AS(pt_symmetric_branch(p), Error);
    Params weak = fig3(2.0);
    weak.g0 = weak.f0 + weak.gamma0;
    CHECK_THROWS_WITH_AS(pt_symmetric_branch(weak), doctest::Contains("2*gamma0"), Error);
    Params inverted = fig3(2.0);
    inverted.g0 = inverted.f0 / 2;
    CHECK_THROWS_AS(efficiency_pt(inverted), Error);
}

TEST_CASE("efficiency on the PT branch") {
    CHECK(efficiency_pt(three_to_one(0.005, 0.02, 0.02)) == doctest::Approx(1.0 / 3).epsilon(1e-15));
    Params p = fig3(3.0);
    p.f0 = 0;
    p.kappa = 3 * critical_coupling(p);
    CHECK(efficiency_pt(p) == 0.0);
}

TEST_CASE("broken branch closed forms") {
    const double g = 0.005;
    SUBCASE("at kappa_c = 2 gamma0 it meets the PT value") {
        Params p = three_to_one(g, 0.02, 2 * g);
        p.kappa = 2 * g * (1 - 1e-15);
        // the exceptional point itself is rejected
        CHECK_THROWS_AS(pt_broken_branch(p), Error);
        p.kappa = 2 * g * (1 - 1e-8);
        const auto s = pt_broken_branch(p);
        CHECK(s.net_gain == doctest::Approx(2 * g).epsilon(1e-7));
        CHECK(s.net_loss == 2 * g);
        CHECK(s.n2 / s.n1 == doctest::Approx(1.0).epsilon(1e-7));
        CHECK(s.eta == doctest::Approx(1.0 / 3).epsilon(1e-7));
        CHECK(continuity_gap(p) == doctest::Approx(0.0).epsilon(1e-15));
    }
    SUBCASE("kappa = gamma0") {
        const auto s = pt_broken_branch(three_to_one(g, 0.02, g));
        CHECK(s.n2 / s.n1 == doctest::Approx(0.25).epsilon(1e-14));
        CHECK(s.eta == doctest::Approx(1.0 / 6).epsilon(1e-14));
        CHECK(s.net_gain == doctest::Approx(g / 2).epsilon(1e-14));
        CHECK(s.f_sat == g);
        CHECK(s.phase == doctest::Approx(-std::numbers::pi / 2));
        CHECK(s.rho == doctest::Approx(0.5));
        CHECK(s.detunings == std::vector<double>{0.0});
        CHECK(s.source == SolutionSource::ClosedFormBroken);
    }
    SUBCASE("decoupled limit") {
        const auto s = pt_broken_branch(three_to_one(g, 0.02, 1e-9));
        CHECK(s.eta < 1e-12);
        CHECK(s.n2 / s.n1 < 1e-12);
    }
    SUBCASE("preconditions") {
        CHECK_THROWS_AS(pt_broken_branch(three_to_one(g, 0.02, 0.0)), Error);
        CHECK_THROWS_AS(pt_broken_branch(three_to_one(g, 0.02, 3 * g)), Error);
    }
    SUBCASE("mismatch away from g0 = 3 f0") {
        Params p;
        p.gamma0 = 0.0113;
        p.f0 = 0.005;
        p.g0 = 20 * p.f0;
        CHECK(std::abs(continuity_gap(p)) > 0.1);
    }
}

TEST_CASE("broken efficiency grows with coupling") {
    const Params base = three_to_one(0.004, 0.03, 0.0);
    const double kc = critical_coupling(base);
    double prev = -1;
    for (int k = 1; k < 200; ++k) {
        Params p = base;
        p.kappa = kc * k / 200.0;
        const double eta = pt_broken_branch(p).eta;
        CHECK(eta > prev);
        prev = eta;
    }
}

TEST_CASE("PT branch identities on random draws") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int draw = 0; draw < 100; ++draw) {
        Params p = random_lasing(rng);
        p.kappa = critical_coupling(p) * (1.01 + 4 * u(rng));
        const auto s = pt_symmetric_branch(p);
        CHECK(std::abs(s.g_sat - s.f_sat - 2 * p.gamma0) <= 1e-14 * s.g_sat);
        CHECK(std::abs(s.n1 - s.n2) <= 1e-14 * std::max(1.0, s.n1));
        CHECK(s.g_sat > 0);
        CHECK(s.g_sat <= p.g0);
        CHECK(s.f_sat > 0);
        CHECK(s.f_sat <= p.f0);
        CHECK(stationarity_residual(s.amplitudes(), s.detunings[0], p) < 1e-12);

        // efficiency does not depend on kappa
        Params other = p;
        other.kappa *= 1.7;
        CHECK(pt_symmetric_branch(other).eta == s.eta);
    }
}

TEST_CASE("self-consistent solver reproduces the PT closed form") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int draw = 0; draw < 60; ++draw) {
        Params p = random_lasing(rng);
        p.kappa = critical_coupling(p) * (1.01 + 4 * u(rng));
        const auto closed = pt_symmetric_branch(p);
        const auto solved = self_consistent_solve(p, SolveMode::Rotating);
        REQUIRE(solved.solved());
        CHECK(solved.residual < 1e-12);
        CHECK(solved.state.n1 == doctest::Approx(closed.n1).epsilon(1e-10));
        CHECK(solved.state.n2 == doctest::Approx(closed.n2).epsilon(1e-10));
        CHECK(solved.state.g_sat == doctest::Approx(closed.g_sat).epsilon(1e-10));
        CHECK(solved.state.f_sat == doctest::Approx(closed.f_sat).epsilon(1e-10));
        CHECK(solved.state.detunings[0] == doctest::Approx(closed.detunings[0]).epsilon(1e-10));
        CHECK(solved.state.phase == doctest::Approx(closed.phase).epsilon(1e-9));
        CHECK(solved.state.source == SolutionSource::SelfConsistent);
    }
}

TEST_CASE("self-consistent solver: stationary branch") {
    SUBCASE("residual contract on broken-regime draws") {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int draw = 0; draw < 60; ++draw) {
            Params p = random_lasing(rng);
            p.kappa = critical_coupling(p) * (0.02 + 0.95 * u(rng));
            const auto solved = self_consistent_solve(p, SolveMode::Stationary);
            if (!solved.solved())
                continue;
            const auto& s = solved.state;
            CHECK(solved.residual < 1e-12);
            const double det = (s.g_sat - p.gamma0) * (s.f_sat + p.gamma0);
            CHECK(det == doctest::Approx(p.kappa * p.kappa).epsilon(1e-12));
            CHECK(s.n2 / s.n1 ==
                  doctest::Approx(p.kappa * p.kappa / std::pow(p.gamma0 + s.f_sat, 2)).epsilon(1e-12));
            CHECK(s.n1 >= 0);
            CHECK(s.n2 >= 0);
        }
    }
    SUBCASE("g0 = 20 f0: stationary solution differs from the pinned closed form") {
        Params p;
        p.gamma0 = 0.0113;
        p.f0 = 0.005;
        p.g0 = 20 * p.f0;
        p.kappa = 0.5 * critical_coupling(p);
        const auto solved = self_consistent_solve(p, SolveMode::Stationary);
        REQUIRE(solved.solved());
        const auto closed = pt_broken_branch(p);
        CHECK(std::abs(solved.state.f_sat - p.gamma0) > 1e-4);
        CHECK(std::abs(solved.state.n1 - closed.n1) > 1e-3);
        CHECK(stationarity_residual(closed.amplitudes(), 0.0, p) > 1e-3);
    }
    SUBCASE("rotating mode has no solution below kappa_c") {
        const auto r = self_consistent_solve(fig3(0.5), SolveMode::Rotating);
        CHECK_FALSE(r.solved());
        CHECK(r.status == SolveStatus::NoSolution);
        CHECK_FALSE(r.detail.empty());
    }
    SUBCASE("sub-threshold gain has no lasing solution") {
        Params p = fig3(2.0);
        p.g0 = p.f0 + p.gamma0;
        CHECK_FALSE(self_consistent_solve(p, SolveMode::Rotating).solved());
    }
}

TEST_CASE("self-consistent solver: decoupled cavities") {
    Params p = fig3(1.0);
    p.kappa = 0;
    for (SolveMode mode : {SolveMode::Rotating, SolveMode::Stationary}) {
        const auto r = self_consistent_solve(p, mode);
        REQUIRE(r.solved());
        CHECK(r.state.n1 == doctest::Approx(p.g0 / p.gamma0 - 1).epsilon(1e-15));
        CHECK(r.state.n2 == 0.0);
    }
    p.g0 = p.gamma0 * 0.9;
    p.f0 = 0;
    CHECK_FALSE(self_consistent_solve(p, SolveMode::Stationary).solved());
}

TEST_CASE("bifurcation sweep") {
    const double g = 0.005;
    const Params p = three_to_one(g, 0.02, 0.0);
    const double kc = critical_coupling(p);
    SUBCASE("exceptional point merges the branches") {
        const std::vector<double> grid{kc};
        const auto rows = bifurcation_sweep(p, std::span<const double>(grid));
        CHECK(rows[0].regime == Regime::ExceptionalPoint);
        CHECK(rows[0].detuning_plus == 0.0);
        CHECK(rows[0].detuning_minus == 0.0);
    }
    SUBCASE("kappa = 4 gamma0") {
        const std::vector<double> grid{4 * g};
        const auto rows = bifurcation_sweep(p, std::span<const double>(grid));
        CHECK(rows[0].kappa_over_kappac == doctest::Approx(2.0));
        CHECK(rows[0].detuning_plus == doctest::Approx(2 * std::sqrt(3.0) * g).epsilon(1e-14));
        CHECK(rows[0].detuning_minus == doctest::Approx(-2 * std::sqrt(3.0) * g).epsilon(1e-14));
        CHECK(rows[0].net_gain == doctest::Approx(2 * g).epsilon(1e-14));
    }
    SUBCASE("kappa = gamma0 on the broken side") {
        const std::vector<double> grid{g, 1.5 * g};
        const auto rows = bifurcation_sweep(p, std::span<const double>(grid));
        CHECK(rows[0].net_gain == doctest::Approx(g / 2).epsilon(1e-14));
        CHECK(rows[1].net_gain / rows[0].net_gain == doctest::Approx(2.25).epsilon(1e-14));
        CHECK(rows[0].detuning_plus == 0.0);
        CHECK(rows[0].regime == Regime::PTBroken);
    }
    SUBCASE("grid validation") {
        const std::vector<double> bad{0.0, 1.0};
        CHECK_THROWS_AS(bifurcation_sweep(p, std::span<const double>(bad)), Error);
    }
}
