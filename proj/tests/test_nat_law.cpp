#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "germ/nat_law.hpp"
#include "test_support.hpp"

using germ::NatLaw;
using germ::RngStream;

namespace {

std::vector<NatLaw> specimen_laws() {
    return {
        NatLaw::finite_support({0.25, 0.0, 0.75}),
        NatLaw::finite_support({0.1, 0.4, 0.3, 0.2}),
        NatLaw::poisson(2.0),
        NatLaw::poisson(0.37),
        NatLaw::mixed_poisson({{0.4, 1.0}, {0.6, 3.0}}),
        NatLaw::geometric(0.35),
    };
}

}  // namespace

TEST_CASE("pgf(1) = 1 for every variant") {
    for (const auto& law : specimen_laws()) REQUIRE(law.pgf(1.0) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("pgf closed forms match the truncated series oracle") {
    for (const auto& law : specimen_laws())
        for (double t : {0.0, 0.2, 0.5, 0.8, 0.99, 1.0})
            REQUIRE(law.pgf(t) == Catch::Approx(oracle::pgf_derivative_series(law, t, 0)).margin(1e-10));
}

TEST_CASE("pgf derivatives match the series oracle up to order 4") {
    for (const auto& law : specimen_laws())
        for (unsigned k : {1u, 2u, 3u, 4u})
            for (double t : {0.0, 0.5, 1.0})
                REQUIRE(law.pgf_derivative(t, k) ==
                        Catch::Approx(oracle::pgf_derivative_series(law, t, k)).margin(1e-8));
}

TEST_CASE("pgf frozen values") {
    REQUIRE(NatLaw::poisson(2.0).pgf(1.0) == Catch::Approx(1.0).margin(1e-12));
    // exp(-2)
    REQUIRE(NatLaw::poisson(2.0).pgf(0.0) == Catch::Approx(0.1353352832366127).margin(1e-9));
    // 0.4 e^-1 + 0.6 e^-3, oracle value
    REQUIRE(NatLaw::mixed_poisson({{0.4, 1.0}, {0.6, 3.0}}).pgf(0.0) ==
            Catch::Approx(0.1770240174892953).margin(1e-9));
    // exp(-1) at t = 0.5 for Poisson(2)
    REQUIRE(NatLaw::poisson(2.0).pgf_derivative(0.5, 0) ==
            Catch::Approx(0.3678794411714423).margin(1e-9));
}

TEST_CASE("derivative frozen values at t=1") {
    REQUIRE(NatLaw::poisson(2.0).pgf_derivative(1.0, 1) == Catch::Approx(2.0).margin(1e-12));
    REQUIRE(NatLaw::finite_support({0.25, 0.0, 0.75}).pgf_derivative(1.0, 1) ==
            Catch::Approx(1.5).margin(1e-12));
}

TEST_CASE("factorial moments") {
    REQUIRE(NatLaw::poisson(3.0).factorial_moment(2) == Catch::Approx(9.0).margin(1e-9));
    REQUIRE(NatLaw::finite_support({0.0, 1.0}).factorial_moment(2) == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(NatLaw::mixed_poisson({{0.5, 1.0}, {0.5, 3.0}}).factorial_moment(1) ==
            Catch::Approx(2.0).margin(1e-12));
    // cross-check against the truncated sum for every specimen
    for (const auto& law : specimen_laws())
        for (unsigned k : {1u, 2u, 3u}) {
            double direct = 0.0;
            for (std::uint64_t n = k; n < 4000; ++n) {
                double falling = 1.0;
                for (unsigned j = 0; j < k; ++j) falling *= static_cast<double>(n - j);
                direct += law.pmf(n) * falling;
            }
            REQUIRE(law.factorial_moment(k) == Catch::Approx(direct).margin(1e-8));
        }
}

TEST_CASE("ordinary moments via Stirling numbers match the series") {
    for (const auto& law : specimen_laws())
        for (unsigned k : {1u, 2u, 3u})
            REQUIRE(law.moment(k) == Catch::Approx(oracle::moment_series(law, k)).margin(1e-8));
}

TEST_CASE("geometric moments are finite for every order") {
    auto law = NatLaw::geometric(0.5);
    for (unsigned k = 1; k <= 8; ++k) {
        REQUIRE(std::isfinite(law.factorial_moment(k)));
        // E[(T)_k] = k! (q/p)^k for the failures-count convention
        double expected = 1.0;
        for (unsigned j = 1; j <= k; ++j) expected *= static_cast<double>(j) * (0.5 / 0.5);
        REQUIRE(law.factorial_moment(k) == Catch::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("pmf and tail agree") {
    for (const auto& law : specimen_laws()) {
        for (std::uint64_t n : {0u, 1u, 3u, 10u}) {
            double suffix = 0.0;
            for (std::uint64_t m = n; m < 4000; ++m) suffix += law.pmf(m);
            REQUIRE(law.tail(n) == Catch::Approx(suffix).margin(1e-10));
        }
        REQUIRE(law.tail(0) == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("log-space pmf stays finite for large rates") {
    auto law = NatLaw::poisson(1e4);
    REQUIRE(std::isfinite(law.pmf(10000)));
    REQUIRE(law.pmf(10000) > 0.0);
    REQUIRE(law.pgf(0.9999) == Catch::Approx(std::exp(1e4 * (0.9999 - 1.0))).epsilon(1e-9));
}

TEST_CASE("domain errors") {
    auto law = NatLaw::poisson(1.0);
    REQUIRE_THROWS_AS(law.pgf(1.5), germ::ModuleError);
    REQUIRE_THROWS_AS(law.pgf(-0.1), germ::ModuleError);
    REQUIRE_THROWS_AS(NatLaw::finite_support({0.5, 0.6}), germ::ConfigError);
    REQUIRE_THROWS_AS(NatLaw::poisson(0.0), germ::ConfigError);
    REQUIRE_THROWS_AS(NatLaw::mixed_poisson({{0.5, 1.0}, {0.6, 2.0}}), germ::ConfigError);
    REQUIRE_THROWS_AS(NatLaw::geometric(1.0), germ::ConfigError);
}

TEST_CASE("sampler matches pmf on a finite-support law") {
    auto law = NatLaw::finite_support({0.2, 0.0, 0.5, 0.3});
    RngStream rng(20240817);
    const int reps = 100000;
    std::vector<int> counts(4, 0);
    for (int i = 0; i < reps; ++i) ++counts[law.sample(rng)];
    for (std::size_t n = 0; n < 4; ++n) {
        double freq = static_cast<double>(counts[n]) / reps;
        REQUIRE(freq == Catch::Approx(law.pmf(n)).margin(0.01));
    }
    REQUIRE(counts[1] == 0);
}

TEST_CASE("sampler means converge for parametric laws") {
    RngStream rng(7);
    for (const auto& law : specimen_laws()) {
        double acc = 0.0;
        const int reps = 100000;
        for (int i = 0; i < reps; ++i) acc += static_cast<double>(law.sample(rng));
        REQUIRE(acc / reps == Catch::Approx(law.mean()).margin(0.05));
    }
}

TEST_CASE("pooled sums agree with repeated draws in distribution") {
    for (const auto& law : specimen_laws()) {
        RngStream rng(99);
        const std::uint64_t parents = 40;
        const int reps = 20000;
        double acc = 0.0, acc2 = 0.0;
        for (int i = 0; i < reps; ++i) {
            double s = static_cast<double>(law.sample_sum(rng, parents));
            acc += s;
            acc2 += s * s;
        }
        const double mean = acc / reps;
        const double var = acc2 / reps - mean * mean;
        const double want_mean = static_cast<double>(parents) * law.mean();
        const double want_var =
            static_cast<double>(parents) * (law.moment(2) - law.mean() * law.mean());
        REQUIRE(mean == Catch::Approx(want_mean).margin(5.0 * std::sqrt(want_var / reps) + 1e-9));
        REQUIRE(var == Catch::Approx(want_var).epsilon(0.1));
    }
}

TEST_CASE("streams are independent and reproducible") {
    RngStream a(42, 1), b(42, 1), c(42, 2);
    REQUIRE(a() == b());
    REQUIRE(a() == b());
    bool differ = false;
    for (int i = 0; i < 8; ++i) differ |= (b() != c());
    REQUIRE(differ);
}
