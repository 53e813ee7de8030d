#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "ptcav/linear_transfer.hpp"

using namespace ptcav;

namespace {
Params symmetric(double gamma0, double kappa) {
    Params p;
    p.gamma0 = p.gamma1 = p.gamma2 = gamma0;
    p.kappa = kappa;
    return p;
}

// Brute-force maximum of the efficiency over drive frequency: dense scan
// followed by golden-section refinement around the best sample.
double brute_force_peak(const Params& p, double half_span) {
    const int n = 20001;
    double best_w = p.omega0, best = -1;
    for (int k = 0; k < n; ++k) {
        const double w = p.omega0 - half_span + 2 * half_span * k / (n - 1);
        const double e = efficiency_conventional(w, p);
        if (e > best) {
            best = e;
            best_w = w;
        }
    }
    double a = best_w - 2 * half_span / (n - 1), b = best_w + 2 * half_span / (n - 1);
    const double phi = (std::sqrt(5.0) - 1) / 2;
    for (int it = 0; it < 200; ++it) {
        const double c = b - phi * (b - a), d = a + phi * (b - a);
        if (efficiency_conventional(c, p) > efficiency_conventional(d, p))
            b = d;
        else
            a = c;
    }
    return std::max(best, efficiency_conventional((a + b) / 2, p));
}
} // namespace

TEST_CASE("no coupling means no transmission") {
    Params p = symmetric(0.01, 0.0);
    for (double w : {0.9, 1.0, 1.3})
        CHECK(std::abs(transmission(w, p)) == 0.0);
}

TEST_CASE("lossless symmetric ports at kappa = gamma transmit fully on resonance") {
    Params p;
    p.gamma1 = p.gamma2 = 0.02;
    p.kappa = 0.02;
    const auto t = transmission(p.omega0, p);
    CHECK(std::abs(t) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(t.real() == doctest::Approx(0.0));
    CHECK(t.imag() == doctest::Approx(-1.0));
}

TEST_CASE("symmetric case at kappa = 2 gamma0 transmits a quarter on resonance") {
    const Params p = symmetric(0.005, 0.01);
    CHECK(efficiency_conventional(1.0, p) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("reflection limits") {
    Params p;
    p.gamma1 = p.gamma2 = 0.03;
    CHECK(reflection(1.0, p).real() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(reflection(1.0, p).imag() == doctest::Approx(0.0));

    Params closed = symmetric(0.01, 0.02);
    closed.gamma1 = 0;
    for (double w : {0.5, 1.0, 1.7}) {
        CHECK(reflection(w, closed).real() == -1.0);
        CHECK(reflection(w, closed).imag() == 0.0);
    }
}

TEST_CASE("closed symmetric formula agrees with the general transmission") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 500; ++k) {
        const double g0 = 0.001 + 0.05 * u(rng);
        const Params p = symmetric(g0, 0.2 * u(rng));
        const double delta = 0.3 * (u(rng) - 0.5);
        const std::complex<double> i(0, 1);
        const auto denom = p.kappa * p.kappa + std::pow(i * delta + 2 * g0, 2);
        const double closed = std::norm(2 * p.kappa * g0 / denom);
        CHECK(efficiency_conventional(p.omega0 - delta, p) == doctest::Approx(closed).epsilon(1e-12));
    }
}

TEST_CASE("optimal frequencies") {
    const double g0 = 0.004;
    CHECK(optimal_frequencies(symmetric(g0, 2 * g0)) == std::vector<double>{1.0});
    CHECK(optimal_frequencies(symmetric(g0, g0)) == std::vector<double>{1.0});
    const auto w = optimal_frequencies(symmetric(g0, 2.5 * g0));
    REQUIRE(w.size() == 2);
    CHECK(w[0] == doctest::Approx(1.0 - 1.5 * g0).epsilon(1e-15));
    CHECK(w[1] == doctest::Approx(1.0 + 1.5 * g0).epsilon(1e-15));

    Params asym = symmetric(g0, 0.01);
    asym.gamma2 = 2 * g0;
    CHECK_THROWS_AS(optimal_frequencies(asym), Error);
}

TEST_CASE("efficiency at the optimal detuning is a quarter and matches a brute-force peak") {
    const double g0 = 0.005;
    for (double ratio : {2.0, 2.5, 3.0, 4.0, 7.0}) {
        const Params p = symmetric(g0, ratio * g0);
        // |kappa^2 + (i Delta + 2 gamma0)^2| = 4 gamma0 kappa at Delta^2 = kappa^2 - 4 gamma0^2
        const double d2 = p.kappa * p.kappa - 4 * g0 * g0;
        const std::complex<double> i(0, 1);
        const double modulus = std::abs(p.kappa * p.kappa + std::pow(i * std::sqrt(d2) + 2 * g0, 2));
        CHECK(modulus == doctest::Approx(4 * g0 * p.kappa).epsilon(1e-12));
        for (double w : optimal_frequencies(p))
            CHECK(efficiency_conventional(w, p) == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(brute_force_peak(p, 3 * p.kappa) == doctest::Approx(0.25).epsilon(1e-10));
    }
}

TEST_CASE("optimal frequencies beat random drive frequencies") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int draw = 0; draw < 20; ++draw) {
        const double g0 = 0.001 + 0.01 * u(rng);
        const Params p = symmetric(g0, g0 * (2.0 + 6 * u(rng)));
        double best = 0;
        for (double w : optimal_frequencies(p))
            best = std::max(best, efficiency_conventional(w, p));
        for (int k = 0; k < 10000; ++k) {
            const double w = p.omega0 + 4 * p.kappa * (u(rng) - 0.5);
            CHECK(efficiency_conventional(w, p) <= best + 1e-12);
        }
    }
}

TEST_CASE("flux is conserved without intrinsic loss and absorbed with it") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int draw = 0; draw < 1000; ++draw) {
        Params p;
        p.gamma1 = 0.1 * u(rng) + 1e-6;
        p.gamma2 = 0.1 * u(rng) + 1e-6;
        p.kappa = 0.1 * u(rng);
        const double w = 1.0 + 0.4 * (u(rng) - 0.5);
        const double total = std::norm(reflection(w, p)) + std::norm(transmission(w, p));
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

        p.gamma0 = 0.05 * u(rng) + 1e-4;
        p.kappa += 1e-6;
        CHECK(std::norm(reflection(w, p)) + std::norm(transmission(w, p)) < 1.0);
    }
}

TEST_CASE("symmetric efficiency is even in the detuning") {
    const Params p = symmetric(0.003, 0.011);
    for (double d = 0; d < 0.05; d += 0.0013)
        CHECK(efficiency_conventional(1.0 + d, p) == doctest::Approx(efficiency_conventional(1.0 - d, p)).epsilon(1e-13));
}

TEST_CASE("spectrum invariants") {
    const Params p = symmetric(0.005, 0.017);
    std::vector<double> grid;
    for (int k = 0; k < 301; ++k)
        grid.push_back(0.95 + 0.1 * k / 300);
    const auto s = transfer_spectrum(p, std::span<const double>(grid));
    REQUIRE(s.efficiency.size() == grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        CHECK(s.efficiency[k] == doctest::Approx(std::norm(s.transmission[k])).epsilon(1e-14));
        CHECK(s.efficiency[k] >= 0.0);
        CHECK(s.efficiency[k] <= 1.0);
    }
}

TEST_CASE("conventional sweep") {
    const double g0 = 0.005;
    const Params p = symmetric(g0, 0.0);

    SUBCASE("single point at kappa = 2 gamma0") {
        const std::vector<double> grid{2 * g0};
        const auto rows = conventional_sweep(p, std::span<const double>(grid), 1.0);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].kappa == 2 * g0);
        CHECK(rows[0].efficiency == doctest::Approx(0.25).epsilon(1e-15));
    }
    SUBCASE("zero coupling") {
        const std::vector<double> grid{0.0};
        const auto rows = conventional_sweep(p, std::span<const double>(grid), 1.3);
        CHECK(rows[0].efficiency == 0.0);
    }
    SUBCASE("rises then falls with the peak at 2 gamma0") {
        std::vector<double> grid;
        for (int k = 1; k <= 400; ++k)
            grid.push_back(4 * 2 * g0 * k / 400.0);
        const auto rows = conventional_sweep(p, std::span<const double>(grid), 1.0);
        const auto peak = std::max_element(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
            return a.efficiency < b.efficiency;
        });
        const auto at = static_cast<std::size_t>(peak - rows.begin());
        CHECK(rows[at].kappa == doctest::Approx(2 * g0).epsilon(1e-12));
        for (std::size_t k = 1; k <= at; ++k)
            CHECK(rows[k].efficiency > rows[k - 1].efficiency);
        for (std::size_t k = at + 1; k < rows.size(); ++k)
            CHECK(rows[k].efficiency < rows[k - 1].efficiency);
    }
    SUBCASE("grid must increase") {
        const std::vector<double> grid{0.1, 0.1};
        CHECK_THROWS_AS(conventional_sweep(p, std::span<const double>(grid), 1.0), Error);
        CHECK_THROWS_AS(conventional_sweep(p, std::span<const double>(), 1.0), Error);
    }
}

TEST_CASE("a lossless pole is reported, not returned as infinity") {
    Params p;
    p.kappa = 0.5;
    // gamma0 = gamma1 = gamma2 = 0: pole where kappa = |omega0 - omega|
    try {
        (void)transmission(1.5, p);
        FAIL("expected singularity");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Singularity);
    }
    const std::vector<double> grid{0.5};
    const auto rows = conventional_sweep(p, std::span<const double>(grid), 0.5);
    REQUIRE(rows[0].singular.has_value());
    CHECK(std::isnan(rows[0].efficiency));
}

TEST_CASE("extended precision instantiation") {
    SystemParams<long double> p;
    p.gamma0 = p.gamma1 = p.gamma2 = 0.005L;
    p.kappa = 0.01L;
    CHECK(std::abs(static_cast<double>(efficiency_conventional(1.0L, p) - 0.25L)) < 1e-18);
}
