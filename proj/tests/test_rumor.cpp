#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "germ/rumor.hpp"
#include "germ/rumor_criteria.hpp"
#include "germ/rumor_sim.hpp"
#include "test_support.hpp"

using germ::NatLaw;
using germ::OffspringLaw;
using germ::RadiusLaw;
using germ::RumorModel;
using germ::RumorOutcome;
using germ::SeriesKind;

namespace {

OffspringLaw single_type_stations(NatLaw total) {
    return OffspringLaw::indep_diffusion(std::move(total), {1.0});
}

RumorModel poisson_pareto_firework(double lambda, double lambda0) {
    return RumorModel::homogeneous(RumorModel::Kind::Firework,
                                   single_type_stations(NatLaw::poisson(lambda)),
                                   {RadiusLaw::pareto(lambda0)});
}

}  // namespace

TEST_CASE("radius law tails and cdfs") {
    auto pareto = RadiusLaw::pareto(1.0);
    REQUIRE(pareto.tail(0) == 1.0);
    REQUIRE(pareto.tail(1) == 1.0);  // capped head
    REQUIRE(pareto.tail(4) == Catch::Approx(0.25));
    REQUIRE(pareto.cdf(4.0) == Catch::Approx(0.75));
    REQUIRE(pareto.cdf(3.5) == Catch::Approx(0.75));  // ceil to 4
    REQUIRE(pareto.harmonic_weight() == Catch::Approx(1.0));

    auto geo = RadiusLaw::geometric_tail(0.5);
    REQUIRE(geo.tail(3) == Catch::Approx(0.125));
    REQUIRE(geo.harmonic_weight() == 0.0);

    auto fin = RadiusLaw::finite_support({0.1, 0.0, 0.9});
    REQUIRE(fin.tail(1) == Catch::Approx(0.9));
    REQUIRE(fin.tail(2) == Catch::Approx(0.9));
    REQUIRE(fin.tail(3) == Catch::Approx(0.0));

    auto expl = RadiusLaw::explicit_tail({0.9, 0.9}, 0.0);
    REQUIRE(expl.tail(2) == Catch::Approx(0.9));
    REQUIRE(expl.tail(5) == 0.0);
    REQUIRE_THROWS_AS(RadiusLaw::explicit_tail({1.0}, 0.0), germ::ConfigError);

    auto mix = RadiusLaw::mixture({{0.5, RadiusLaw::pareto(0.5)}, {0.5, RadiusLaw::pareto(4.0)}});
    REQUIRE(mix.harmonic_weight() == Catch::Approx(0.5 / 0.5 + 0.5 / 4.0));
    REQUIRE(mix.tail(10) == Catch::Approx(0.5 * 0.2 + 0.5 * 0.025));
}

TEST_CASE("radius sampling matches the tails") {
    germ::RngStream rng(11);
    auto pareto = RadiusLaw::pareto(1.0);
    const int reps = 200000;
    int ge4 = 0, ge10 = 0;
    for (int i = 0; i < reps; ++i) {
        auto r = pareto.sample(rng);
        ge4 += r >= 4;
        ge10 += r >= 10;
    }
    REQUIRE(static_cast<double>(ge4) / reps == Catch::Approx(0.25).margin(0.005));
    REQUIRE(static_cast<double>(ge10) / reps == Catch::Approx(0.10).margin(0.005));

    auto geo = RadiusLaw::geometric_tail(0.5);
    int ge3 = 0;
    for (int i = 0; i < reps; ++i) ge3 += geo.sample(rng) >= 3;
    REQUIRE(static_cast<double>(ge3) / reps == Catch::Approx(0.125).margin(0.005));
}

TEST_CASE("max-radius cdf is the generating function at the radius vector") {
    // two-type all-to-one stations: beta phi(r1) + (1-beta) phi(r2)
    const double beta = 0.5, lambda = 2.0;
    auto model = RumorModel::homogeneous(
        RumorModel::Kind::Firework,
        OffspringLaw::all_to_one(NatLaw::poisson(lambda), {beta, 1.0 - beta}),
        {RadiusLaw::pareto(0.5), RadiusLaw::pareto(4.0)});
    for (double t : {0.0, 1.0, 3.0, 10.0}) {
        double r1 = RadiusLaw::pareto(0.5).cdf(t);
        double r2 = RadiusLaw::pareto(4.0).cdf(t);
        double phi1 = std::exp(lambda * (r1 - 1.0));
        double phi2 = std::exp(lambda * (r2 - 1.0));
        REQUIRE(germ::max_radius_cdf(model, 0, t) ==
                Catch::Approx(beta * phi1 + (1 - beta) * phi2).margin(1e-12));
    }
    // at t = 0 the value is the mass of the empty configuration
    REQUIRE(germ::max_radius_cdf(poisson_pareto_firework(1.5, 1.0), 0, 0.0) ==
            Catch::Approx(std::exp(-1.5)).margin(1e-12));
    // monotone in t
    auto m = poisson_pareto_firework(1.5, 1.0);
    double prev = 0.0;
    for (std::uint64_t t = 0; t <= 50; ++t) {
        double c = germ::max_radius_cdf(m, 0, static_cast<double>(t));
        REQUIRE(c >= prev - 1e-15);
        prev = c;
    }
}

TEST_CASE("homogeneous firework dichotomy on the Pareto family") {
    auto sup = firework_homog_series(poisson_pareto_firework(1.5, 1.0));
    REQUIRE(sup.series.kind == SeriesKind::Converges);
    REQUIRE(sup.outcome == RumorOutcome::Survives);
    REQUIRE(sup.series.method.name == "pareto-exponent");
    REQUIRE(sup.series.method.exponent == Catch::Approx(1.5));

    auto sub = firework_homog_series(poisson_pareto_firework(0.5, 1.0));
    REQUIRE(sub.series.kind == SeriesKind::Diverges);
    REQUIRE(sub.outcome == RumorOutcome::Dies);

    // classification flips exactly when lambda crosses lambda0
    for (double lambda : {0.5, 0.9, 1.1, 1.5}) {
        auto v = firework_homog_series(poisson_pareto_firework(lambda, 1.0));
        REQUIRE((v.outcome == RumorOutcome::Survives) == (lambda > 1.0));
    }
}

TEST_CASE("diverging partial sums grow between checkpoints") {
    auto sub = firework_homog_series(poisson_pareto_firework(0.5, 1.0), 10000);
    double s3 = 0, s4 = 0;
    for (const auto& [n, s] : sub.series.partial_sums) {
        if (n == 1000) s3 = s;
        if (n == 10000) s4 = s;
    }
    REQUIRE(s3 > 0.0);
    REQUIRE(s4 > 2.0 * s3);  // sqrt(10) growth for the n^{-1/2} terms
}

TEST_CASE("deterministic relay and escaping mass converge trivially") {
    // stations always present, radius always at least 2: zero factor
    auto relay = RumorModel::homogeneous(
        RumorModel::Kind::Firework,
        single_type_stations(NatLaw::finite_support({0.0, 1.0})),
        {RadiusLaw::finite_support({0.0, 0.0, 1.0})});
    auto v = firework_homog_series(relay, 100);
    REQUIRE(v.series.kind == SeriesKind::Converges);
    REQUIRE(v.outcome == RumorOutcome::Survives);

    auto escaping = RumorModel::homogeneous(
        RumorModel::Kind::Firework, single_type_stations(NatLaw::poisson(1.0)),
        {RadiusLaw::explicit_tail({0.5, 0.4}, 0.1)});
    auto e = firework_homog_series(escaping, 200);
    REQUIRE(e.series.kind == SeriesKind::Converges);
}

TEST_CASE("homogeneous reverse firework W criterion") {
    auto harmonic = RumorModel::homogeneous(RumorModel::Kind::ReverseFirework,
                                            single_type_stations(NatLaw::poisson(1.0)),
                                            {RadiusLaw::pareto(1.0)});
    auto v = reverse_homog_W(harmonic);
    REQUIRE(v.outcome == RumorOutcome::SurvivesAS);
    REQUIRE(v.series.kind == SeriesKind::Diverges);

    auto thin = RumorModel::homogeneous(RumorModel::Kind::ReverseFirework,
                                        single_type_stations(NatLaw::poisson(1.0)),
                                        {RadiusLaw::geometric_tail(0.5)});
    REQUIRE(reverse_homog_W(thin).outcome == RumorOutcome::Dies);

    auto twoterm = RumorModel::homogeneous(RumorModel::Kind::ReverseFirework,
                                           single_type_stations(NatLaw::poisson(1.0)),
                                           {RadiusLaw::explicit_tail({0.5}, 0.0)});
    auto w = reverse_homog_W(twoterm, 100);
    REQUIRE(w.outcome == RumorOutcome::Dies);
    // W is a finite sum here: every term beyond i=1 vanishes
    REQUIRE(w.series.partial_sums.back().second ==
            Catch::Approx(w.series.partial_sums.front().second));
}

TEST_CASE("heterogeneous firework sufficient condition") {
    // homogeneous instance agrees with the homogeneous classifier
    auto homog = poisson_pareto_firework(1.5, 1.0);
    auto hv = firework_hetero_series(homog, 2000);
    REQUIRE(hv.outcome == RumorOutcome::Survives);

    // alternating Poisson(2)/Poisson(1.8): period-averaged exponent 1.9
    auto alternating = RumorModel::heterogeneous(
        RumorModel::Kind::Firework, {},
        {single_type_stations(NatLaw::poisson(2.0)), single_type_stations(NatLaw::poisson(1.8))},
        {}, {{RadiusLaw::pareto(1.0)}, {RadiusLaw::pareto(1.0)}});
    auto av = firework_hetero_series(alternating, 2000);
    REQUIRE(av.outcome == RumorOutcome::Survives);
    REQUIRE(av.series.method.exponent == Catch::Approx(1.9));

    // subcritical: the series diverges but the theorem has no converse
    auto sub = firework_hetero_series(poisson_pareto_firework(0.5, 1.0), 2000);
    REQUIRE(sub.series.kind == SeriesKind::Diverges);
    REQUIRE(sub.outcome == RumorOutcome::Undecided);
}

TEST_CASE("heterogeneous reverse firework conditions") {
    // homogeneous divergent instance matches the W classifier
    auto harmonic = RumorModel::homogeneous(RumorModel::Kind::ReverseFirework,
                                            single_type_stations(NatLaw::poisson(1.0)),
                                            {RadiusLaw::pareto(1.0)});
    REQUIRE(reverse_hetero_checks(harmonic).outcome == RumorOutcome::SurvivesAS);

    // uniformly thin radii: both sufficient conditions fail
    auto thin = RumorModel::homogeneous(RumorModel::Kind::ReverseFirework,
                                        single_type_stations(NatLaw::poisson(1.0)),
                                        {RadiusLaw::geometric_tail(0.5)});
    auto tv = reverse_hetero_checks(thin, 500);
    REQUIRE(tv.outcome == RumorOutcome::Undecided);

    // periodic Poisson rates in [1,2] with Pareto radii: uniform divergence
    auto periodic = RumorModel::heterogeneous(
        RumorModel::Kind::ReverseFirework, {},
        {single_type_stations(NatLaw::poisson(1.0)), single_type_stations(NatLaw::poisson(2.0))},
        {}, {{RadiusLaw::pareto(1.0)}});
    REQUIRE(reverse_hetero_checks(periodic).outcome == RumorOutcome::SurvivesAS);
}

TEST_CASE("single-station counterpart preserves the max-radius law") {
    // identity on single-type models
    auto single = poisson_pareto_firework(1.5, 1.0);
    auto reduced = single_station_counterpart(single);
    for (std::uint64_t t = 1; t <= 20; ++t)
        REQUIRE(germ::max_radius_cdf(reduced, 0, t) ==
                Catch::Approx(germ::max_radius_cdf(single, 0, t)).margin(1e-12));

    // two-type independent diffusion mixes the radius laws by the row
    const double beta = 0.5;
    auto nu = RumorModel::homogeneous(
        RumorModel::Kind::Firework,
        OffspringLaw::indep_diffusion(NatLaw::poisson(1.2), {beta, 1.0 - beta}),
        {RadiusLaw::pareto(0.5), RadiusLaw::pareto(4.0)});
    auto counterpart = single_station_counterpart(nu);
    REQUIRE(counterpart.type_count() == 1);
    // effective harmonic weight beta/0.5 + (1-beta)/4 = 1.125, lambda0 = 8/9
    REQUIRE(counterpart.radius_at(0, 0).harmonic_weight() == Catch::Approx(1.125));
    for (std::uint64_t t = 1; t <= 100; ++t)
        REQUIRE(germ::max_radius_cdf(counterpart, 0, t) ==
                Catch::Approx(germ::max_radius_cdf(nu, 0, t)).margin(1e-12));

    auto a2o = RumorModel::homogeneous(
        RumorModel::Kind::Firework,
        OffspringLaw::all_to_one(NatLaw::poisson(1.2), {beta, 1.0 - beta}),
        {RadiusLaw::pareto(0.5), RadiusLaw::pareto(4.0)});
    REQUIRE_THROWS_AS(single_station_counterpart(a2o), germ::ModuleError);
}

TEST_CASE("germ transfer on the mixed-Poisson firework") {
    // mu: mixed Poisson stations (alpha at lambda-eps, rest at lambda+eps)
    const double lambda = 1.5, eps = 0.4, alpha = 0.3;
    auto mu = RumorModel::homogeneous(
        RumorModel::Kind::Firework,
        single_type_stations(
            NatLaw::mixed_poisson({{alpha, lambda - eps}, {1.0 - alpha, lambda + eps}})),
        {RadiusLaw::pareto(1.0)});
    auto nu = poisson_pareto_firework(lambda, 1.0);

    germ::FamilyPair pair({mu.station_at(0)}, {nu.station_at(0)});
    auto order = germ::certify_germ(pair);
    REQUIRE(order.kind == germ::OrderKind::GermDominates);
    REQUIRE(order.certified);

    const double T = std::ceil(1.0 / (1.0 - order.delta)) + 1.0;
    auto res = germ_rumor_transfer(mu, nu, order, T);
    REQUIRE(res.assumption_ok);
    REQUIRE(res.outcome == germ::TransferOutcome::TransferSurvival);
    REQUIRE(res.nu_verdict.outcome == RumorOutcome::Survives);
}

TEST_CASE("germ transfer in both directions on the two-type example") {
    const double beta = 0.5, l10 = 0.5, l20 = 4.0;
    const double lambda0 = 1.0 / (beta / l10 + (1.0 - beta) / l20);  // 8/9
    std::vector<RadiusLaw> radii{RadiusLaw::pareto(l10), RadiusLaw::pareto(l20)};

    auto make = [&](double lambda, germ::OffspringKind kind) {
        OffspringLaw law = kind == germ::OffspringKind::AllToOne
                               ? OffspringLaw::all_to_one(NatLaw::poisson(lambda), {beta, beta})
                               : kind == germ::OffspringKind::Balanced
                                   ? OffspringLaw::balanced(NatLaw::poisson(lambda), {1, 1})
                                   : OffspringLaw::indep_diffusion(NatLaw::poisson(lambda),
                                                                   {beta, beta});
        return RumorModel::homogeneous(RumorModel::Kind::Firework, std::move(law), radii);
    };

    // lambda below the effective rate: the independent model dies, and it
    // pgf-dominates the all-to-one one, which therefore dies too
    {
        const double lambda = 0.7;
        REQUIRE(lambda < lambda0);
        auto nu = make(lambda, germ::OffspringKind::IndepDiffusion);
        auto mu2 = make(lambda, germ::OffspringKind::AllToOne);
        germ::FamilyPair pair({nu.station_at(0)}, {mu2.station_at(0)});
        auto order = check_pgf_order(pair);
        REQUIRE(order.kind == germ::OrderKind::PgfDominates);
        auto res = germ_rumor_transfer(nu, mu2, order, 1.0);
        REQUIRE(res.outcome == germ::TransferOutcome::TransferExtinction);
        REQUIRE(res.mu_verdict.outcome == RumorOutcome::Dies);
    }

    // lambda above the effective rate: the independent model survives, and
    // the balanced model pgf-dominates it, so it survives as well
    {
        const double lambda = 1.2;
        REQUIRE(lambda > lambda0);
        auto nu = make(lambda, germ::OffspringKind::IndepDiffusion);
        auto mu1 = make(lambda, germ::OffspringKind::Balanced);
        germ::FamilyPair pair({mu1.station_at(0)}, {nu.station_at(0)});
        auto order = check_pgf_order(pair);
        REQUIRE(order.kind == germ::OrderKind::PgfDominates);
        auto res = germ_rumor_transfer(mu1, nu, order, 1.0);
        REQUIRE(res.outcome == germ::TransferOutcome::TransferSurvival);
    }
}

TEST_CASE("transfer on identical models is consistent with the model's own verdict") {
    auto model = poisson_pareto_firework(1.5, 1.0);
    germ::FamilyPair pair({model.station_at(0)}, {model.station_at(0)});
    auto order = check_pgf_order(pair);
    auto res = germ_rumor_transfer(model, model, order, 1.0);
    REQUIRE(res.outcome == germ::TransferOutcome::TransferSurvival);

    auto dying = poisson_pareto_firework(0.5, 1.0);
    germ::FamilyPair dpair({dying.station_at(0)}, {dying.station_at(0)});
    auto dres = germ_rumor_transfer(dying, dying, check_pgf_order(dpair), 1.0);
    REQUIRE(dres.outcome == germ::TransferOutcome::TransferExtinction);
}

TEST_CASE("simulated reach with a per-site jump bound") {
    // one station everywhere, radius 2 with probability 0.9 else 0
    auto model = RumorModel::homogeneous(
        RumorModel::Kind::Firework, single_type_stations(NatLaw::finite_support({0.0, 1.0})),
        {RadiusLaw::finite_support({0.1, 0.0, 0.9})});
    const std::uint64_t N = 10;
    auto res = simulate_rumor(model, N, 20000, germ::SimMode::Annealed, 5);
    REQUIRE(res.excluded == 0);
    REQUIRE(res.conditioned_frequency >=
            std::pow(0.9, static_cast<double>(N)) - 3.0 * res.stderr_);
}

TEST_CASE("annealed reach matches the frontier chain oracle") {
    auto model = poisson_pareto_firework(1.5, 1.0);
    const std::uint64_t N = 200;
    const double lambda = 1.5, p0 = std::exp(-lambda);
    auto cdf = [&](std::uint64_t y, std::uint64_t t) {
        double g = germ::max_radius_cdf(model, y, static_cast<double>(t));
        if (y == 0) return t == 0 ? 0.0 : (g - p0) / (1.0 - p0);  // origin conditioned
        return t == 0 ? 0.0 : g;
    };
    const double exact = oracle::firework_reach_dp(cdf, N);
    auto sim = simulate_rumor(model, N, 10000, germ::SimMode::Annealed, 31);
    REQUIRE(exact > 0.05);
    REQUIRE(sim.conditioned_frequency == Catch::Approx(exact).margin(0.02));
}

TEST_CASE("no stations at the origin means no rumor") {
    // the origin law is deterministically empty; other sites are fine
    auto empty_root = OffspringLaw::explicit_atoms(1, {{{0}, 1.0}});
    auto model = RumorModel::heterogeneous(
        RumorModel::Kind::Firework, {empty_root},
        {single_type_stations(NatLaw::poisson(2.0))}, {{RadiusLaw::pareto(1.0)}},
        {{RadiusLaw::pareto(1.0)}});
    auto res = simulate_rumor(model, 20, 2000, germ::SimMode::Annealed, 9);
    REQUIRE(res.raw_frequency == 0.0);
    REQUIRE(res.excluded == 2000);
    REQUIRE_THROWS_AS(germ::draw_environment(model, 10, 3, true), germ::ModuleError);
}

TEST_CASE("quenched environments are reproducible and sensitive to the seed") {
    auto model = poisson_pareto_firework(1.5, 1.0);
    auto a = germ::draw_environment(model, 50, 42, true);
    auto b = germ::draw_environment(model, 50, 42, true);
    REQUIRE(a == b);
    auto r1 = simulate_rumor(model, 100, 3000, germ::SimMode::Quenched, 7, 42, true);
    auto r2 = simulate_rumor(model, 100, 3000, germ::SimMode::Quenched, 7, 42, true);
    REQUIRE(r1.conditioned_frequency == r2.conditioned_frequency);
    REQUIRE(r1.excluded == 0);
}

TEST_CASE("reverse firework simulation reaches through listeners") {
    // every site holds one listener with radius >= 1 w.p. 0.95
    auto model = RumorModel::homogeneous(
        RumorModel::Kind::ReverseFirework,
        single_type_stations(NatLaw::finite_support({0.0, 1.0})),
        {RadiusLaw::finite_support({0.05, 0.95})});
    auto res = simulate_rumor(model, 10, 20000, germ::SimMode::Annealed, 13);
    // the chain advances only through consecutive hearers
    REQUIRE(res.conditioned_frequency ==
            Catch::Approx(std::pow(0.95, 10.0)).margin(0.02));
}
