#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "germ/bpve.hpp"
#include "germ/brw.hpp"
#include "germ/config.hpp"
#include "germ/orders.hpp"
#include "germ/report.hpp"
#include "germ/rumor_criteria.hpp"
#include "germ/rumor_sim.hpp"

namespace germ {

// Bundled reference experiments. Each entry records its parameters (with the
// defining formulas where a derived constant matters) and reproduces the
// module-level numbers for that configuration.
struct NamedExample {
    std::string name;
    std::string summary;
    Json params;
    std::function<Json(const Json& params, std::uint64_t seed)> run;
};

namespace examples {

inline FamilyPair mixed_vs_poisson_pair(double lambda, double eps, double alpha) {
    std::vector<double> row{1.0};
    return FamilyPair(
        {OffspringLaw::indep_diffusion(
            NatLaw::mixed_poisson({{alpha, lambda - eps}, {1.0 - alpha, lambda + eps}}), row)},
        {OffspringLaw::indep_diffusion(NatLaw::poisson(lambda), row)});
}

inline Json run_mix(const Json& p, std::uint64_t) {
    const double lambda = p.at("lambda"), eps = p.at("eps"), alpha = p.at("alpha");
    auto pair = mixed_vs_poisson_pair(lambda, eps, alpha);
    Json out;
    out["pgf_check"] = to_json(check_pgf_order(pair));
    auto germv = certify_germ(pair);
    out["germ"] = to_json(germv);
    // mixing-law condition at the certified rung
    std::vector<MixComponent> L1{{alpha, lambda - eps}, {1.0 - alpha, lambda + eps}};
    std::vector<MixComponent> L2{{1.0, lambda}};
    double delta = germv.kind == OrderKind::GermDominates ? std::max(germv.delta, 0.99) : 0.99;
    out["mixing_condition"] = Json{{"delta", delta},
                                   {"holds", mixed_poisson_germ(L1, L2, delta)}};
    return out;
}

inline Json run_mix2(const Json& p, std::uint64_t) {
    const double eps = p.at("eps");
    const std::vector<double> lambdas = p.at("lambdas");
    const std::vector<double> alphas = p.at("alphas");
    double alpha_sup = 0.0, M = 0.0;
    for (double a : alphas) alpha_sup = std::max(alpha_sup, a);
    for (double l : lambdas) M = std::max(M, l);
    // delta from exp((M+eps)(delta-1)) > M/(M+(1-2 sup alpha) eps)
    const double delta =
        1.0 + std::log(M / (M + (1.0 - 2.0 * alpha_sup) * eps)) / (M + eps) / 2.0;
    Json sites = Json::array();
    bool all = true;
    for (std::size_t y = 0; y < lambdas.size(); ++y) {
        bool ok = mixed_poisson_germ(
            {{alphas[y], lambdas[y] - eps}, {1.0 - alphas[y], lambdas[y] + eps}},
            {{1.0, lambdas[y]}}, delta);
        all = all && ok;
        sites.push_back(Json{{"lambda", lambdas[y]}, {"alpha", alphas[y]}, {"holds", ok}});
    }
    return Json{{"delta", delta}, {"uniform", all}, {"sites", sites}};
}

inline Json run_nonind(const Json& p, std::uint64_t, bool balanced_side) {
    const double lambda = p.at("lambda");
    std::vector<double> row{0.5, 0.5};
    auto indep = OffspringLaw::indep_diffusion(NatLaw::poisson(lambda), row);
    Json out;
    if (balanced_side) {
        auto bal = OffspringLaw::balanced(NatLaw::poisson(lambda), {1, 1}, {}, 1e-14);
        out["order"] = to_json(check_pgf_order(FamilyPair({bal}, {indep})));
        out["direction"] = "balanced dominates independent diffusion";
    } else {
        auto a2o = OffspringLaw::all_to_one(NatLaw::poisson(lambda), row);
        out["order"] = to_json(check_pgf_order(FamilyPair({indep}, {a2o})));
        out["direction"] = "independent diffusion dominates one-type placement";
    }
    return out;
}

// Mixed-Poisson perturbation of a projectable walk: certify the order per
// site with one uniform delta, transfer the extinction bound, and verify the
// fixed points directly.
inline Json run_fbrw_chain(const Json& p, std::uint64_t) {
    const double eps = p.at("eps");
    const std::vector<double> hat = p.at("hat_lambdas");
    const std::vector<double> alphas = p.at("alphas");
    const double comparison_rate = p.at("comparison_rate");
    const std::size_t d = hat.size();
    Matrix P(d, std::vector<double>(d, 1.0 / static_cast<double>(d)));

    std::vector<OffspringLaw> mu_laws, nu_laws;
    for (std::size_t x = 0; x < d; ++x) {
        mu_laws.push_back(OffspringLaw::indep_diffusion(
            NatLaw::mixed_poisson({{alphas[x], hat[x] - eps}, {1.0 - alphas[x], hat[x] + eps}}),
            P[x]));
        nu_laws.push_back(OffspringLaw::indep_diffusion(NatLaw::poisson(comparison_rate), P[x]));
    }
    BrwModel mu(mu_laws), nu(nu_laws);

    double delta = 0.0;
    for (std::size_t x = 0; x < d; ++x) {
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 100; ++it) {
            double mid = 0.5 * (lo + hi);
            (mixed_poisson_germ({{alphas[x], hat[x] - eps}, {1.0 - alphas[x], hat[x] + eps}},
                                {{1.0, comparison_rate}}, mid)
                 ? hi
                 : lo) = mid;
        }
        delta = std::max(delta, std::min(1.0 - 1e-9, hi + 1e-6));
    }

    auto q_nu = extinction_vector(nu);
    auto q_mu = extinction_vector(mu);
    auto bound = germ_transfer_bound(q_nu.q, delta);
    bool transfer_holds = true, mu_survives_everywhere = true;
    for (std::size_t x = 0; x < d; ++x) {
        transfer_holds = transfer_holds && q_mu.q[x] <= bound[x] + 1e-6;
        mu_survives_everywhere = mu_survives_everywhere && q_mu.q[x] < 1.0;
    }
    return Json{{"uniform_delta", delta},
                {"q_nu", to_json(q_nu)},
                {"q_mu", to_json(q_mu)},
                {"transfer_bound", bound},
                {"bound_holds", transfer_holds},
                {"mu_survives_everywhere", mu_survives_everywhere}};
}

inline Json run_bpve0(const Json& p, std::uint64_t seed) {
    SequenceRule a;
    a.limit = 1.0;
    a.coeff = 1.0;
    a.offset = p.at("offset");
    a.expo = 2.0;
    const std::uint64_t horizon = p.at("horizon");
    const std::uint64_t reps = p.at("reps");
    Json out;
    out["analysis"] = to_json(survival_binary(a, horizon));
    out["simulation"] =
        to_json(simulate_bpve(BpveModel::bernoulli_seq(a), horizon, reps, 1000000, seed));
    return out;
}

inline Json run_bpve1(const Json& p, std::uint64_t seed) {
    auto law = config::parse_nat_law(p.at("law"), "params.law");
    auto model = BpveModel::constant(law);
    SequenceRule a;
    a.limit = 1.0;
    a.coeff = 1.0;
    a.offset = 2.0;
    a.expo = 2.0;
    Json out;
    out["head_criterion"] = to_json(check_example_bpve1(model));
    out["weighted_head_k1"] = to_json(check_prop_bpve1(model, 1));
    out["germ_vs_binary"] =
        to_json(germ_compare_bpve(model, BpveModel::bernoulli_seq(a), p.at("delta"), 0, 300));
    out["simulation"] = to_json(simulate_bpve(model, 200, p.at("reps"), 1000000, seed));
    return out;
}

inline Json run_firework_mixed(const Json& p, std::uint64_t seed) {
    const double lambda = p.at("lambda"), eps = p.at("eps"), alpha = p.at("alpha");
    const double lambda0 = p.at("lambda0");
    auto mu = RumorModel::homogeneous(
        RumorModel::Kind::Firework,
        OffspringLaw::indep_diffusion(
            NatLaw::mixed_poisson({{alpha, lambda - eps}, {1.0 - alpha, lambda + eps}}), {1.0}),
        {RadiusLaw::pareto(lambda0)});
    auto nu = RumorModel::homogeneous(
        RumorModel::Kind::Firework,
        OffspringLaw::indep_diffusion(NatLaw::poisson(lambda), {1.0}),
        {RadiusLaw::pareto(lambda0)});

    auto order = certify_germ(FamilyPair({mu.station_at(0)}, {nu.station_at(0)}));
    const double T =
        order.kind == OrderKind::GermDominates
            ? std::ceil(1.0 / (lambda0 * (1.0 - order.delta))) + 1.0
            : 1.0;
    auto transfer = germ_rumor_transfer(mu, nu, order, T);

    const std::uint64_t n_sites = p.at("n_sites");
    const std::uint64_t reps = p.at("reps");
    auto sim = simulate_rumor(mu, n_sites, reps, SimMode::Quenched, seed, seed + 1, true);

    return Json{{"order", to_json(order)},
                {"comparison_T", T},
                {"transfer", to_json(transfer)},
                {"quenched_sim", to_json(sim)}};
}

inline Json run_nonid(const Json& p, std::uint64_t) {
    const double beta = p.at("beta");
    const double l10 = p.at("lambda_10"), l20 = p.at("lambda_20");
    const double lambda0 = 1.0 / (beta / l10 + (1.0 - beta) / l20);
    std::vector<RadiusLaw> radii{RadiusLaw::pareto(l10), RadiusLaw::pareto(l20)};

    Json out;
    out["effective_lambda0"] = lambda0;
    out["effective_lambda0_formula"] = "1 / (beta/lambda_10 + (1-beta)/lambda_20)";

    {
        const double lambda = p.at("lambda_extinct");
        auto nu = RumorModel::homogeneous(
            RumorModel::Kind::Firework,
            OffspringLaw::indep_diffusion(NatLaw::poisson(lambda), {beta, 1.0 - beta}), radii);
        auto mu2 = RumorModel::homogeneous(
            RumorModel::Kind::Firework,
            OffspringLaw::all_to_one(NatLaw::poisson(lambda), {beta, 1.0 - beta}), radii);
        auto order = check_pgf_order(FamilyPair({nu.station_at(0)}, {mu2.station_at(0)}));
        out["extinction_side"] = Json{{"lambda", lambda},
                                      {"order", to_json(order)},
                                      {"transfer", to_json(germ_rumor_transfer(nu, mu2, order, 1.0))}};
    }
    {
        const double lambda = p.at("lambda_survive");
        auto nu = RumorModel::homogeneous(
            RumorModel::Kind::Firework,
            OffspringLaw::indep_diffusion(NatLaw::poisson(lambda), {beta, 1.0 - beta}), radii);
        auto mu1 = RumorModel::homogeneous(
            RumorModel::Kind::Firework,
            OffspringLaw::balanced(NatLaw::poisson(lambda), {1, 1}, {}, 1e-14), radii);
        auto order = check_pgf_order(FamilyPair({mu1.station_at(0)}, {nu.station_at(0)}));
        out["survival_side"] = Json{{"lambda", lambda},
                                    {"order", to_json(order)},
                                    {"transfer", to_json(germ_rumor_transfer(mu1, nu, order, 1.0))}};
    }
    return out;
}

inline Json run_nonid_mixed(const Json& p, std::uint64_t) {
    const double beta = p.at("beta");
    const double l10 = p.at("lambda_10"), l20 = p.at("lambda_20");
    const double lambda0 = 1.0 / (beta / l10 + (1.0 - beta) / l20);
    std::vector<RadiusLaw> radii{RadiusLaw::pareto(l10), RadiusLaw::pareto(l20)};
    Json out;
    out["effective_lambda0"] = lambda0;

    // extinction chain, applied twice: Poisson bridge above the mixture,
    // then the one-type placement below the independent mixture
    {
        const double l1 = p.at("extinct_rate_low"), l2 = p.at("extinct_rate_high");
        const double alpha = p.at("extinct_alpha"), bridge = p.at("extinct_bridge");
        auto mixed_total = NatLaw::mixed_poisson({{alpha, l1}, {1.0 - alpha, l2}});
        auto bar_nu = RumorModel::homogeneous(
            RumorModel::Kind::Firework,
            OffspringLaw::indep_diffusion(NatLaw::poisson(bridge), {beta, 1.0 - beta}), radii);
        auto nu = RumorModel::homogeneous(
            RumorModel::Kind::Firework,
            OffspringLaw::indep_diffusion(mixed_total, {beta, 1.0 - beta}), radii);
        auto mu2 = RumorModel::homogeneous(
            RumorModel::Kind::Firework,
            OffspringLaw::all_to_one(mixed_total, {beta, 1.0 - beta}), radii);
        auto order1 = check_pgf_order(FamilyPair({bar_nu.station_at(0)}, {nu.station_at(0)}));
        auto step1 = germ_rumor_transfer(bar_nu, nu, order1, 1.0);
        auto order2 = check_pgf_order(FamilyPair({nu.station_at(0)}, {mu2.station_at(0)}));
        auto step2 = germ_rumor_transfer(nu, mu2, order2, 1.0);
        out["extinction_chain"] = Json{{"bridge_rate", bridge},
                                       {"step1", to_json(step1)},
                                       {"step2", to_json(step2)}};
    }
    // survival chain for the balanced placement above the independent mixture
    {
        const double l1 = p.at("survive_rate_low"), l2 = p.at("survive_rate_high");
        const double alpha = p.at("survive_alpha");
        auto mixed_total = NatLaw::mixed_poisson({{alpha, l1}, {1.0 - alpha, l2}});
        auto nu = RumorModel::homogeneous(
            RumorModel::Kind::Firework,
            OffspringLaw::indep_diffusion(mixed_total, {beta, 1.0 - beta}), radii);
        auto mu1 = RumorModel::homogeneous(
            RumorModel::Kind::Firework,
            OffspringLaw::balanced(mixed_total, {1, 1}, {}, 1e-14), radii);
        auto order = check_pgf_order(FamilyPair({mu1.station_at(0)}, {nu.station_at(0)}));
        out["survival_chain"] = Json{{"order", to_json(order)},
                                     {"transfer", to_json(germ_rumor_transfer(mu1, nu, order, 1.0))}};
    }
    return out;
}

}  // namespace examples

inline const std::vector<NamedExample>& named_examples() {
    static const std::vector<NamedExample> catalogue = {
        {"mix",
         "mixed-Poisson vs Poisson totals: germ order holds, pgf order fails at 0",
         Json{{"lambda", 2.0}, {"eps", 1.0}, {"alpha", 0.4}},
         examples::run_mix},
        {"mix2",
         "site-indexed mixed-Poisson perturbations with one uniform delta",
         Json{{"eps", 0.5}, {"lambdas", {1.0, 2.0, 3.0}}, {"alphas", {0.1, 0.3, 0.45}}},
         examples::run_mix2},
        {"nonind1",
         "balanced type assignment dominates independent diffusion",
         Json{{"lambda", 1.2}},
         [](const Json& p, std::uint64_t s) { return examples::run_nonind(p, s, true); }},
        {"nonind2",
         "independent diffusion dominates one-type placement",
         Json{{"lambda", 1.2}},
         [](const Json& p, std::uint64_t s) { return examples::run_nonind(p, s, false); }},
        {"fbrw",
         "mixed-Poisson walk kept alive by comparison with a supercritical projectable walk",
         Json{{"eps", 0.3},
              {"hat_lambdas", {1.5, 2.0, 2.5}},
              {"alphas", {0.2, 0.3, 0.4}},
              {"comparison_rate", 1.5}},
         examples::run_fbrw_chain},
        {"fbrw2",
         "same chain pinned to the infimum rate: inf hat-lambda > 1, sup alpha < 1/2",
         Json{{"eps", 0.2},
              {"hat_lambdas", {1.4, 1.8, 2.2}},
              {"alphas", {0.45, 0.25, 0.1}},
              {"comparison_rate", 1.2}},
         examples::run_fbrw_chain},
        {"bpve0",
         "binary offspring with a_n = 1 - 1/(n+offset)^2: survival probability 1/2",
         Json{{"offset", 2.0}, {"horizon", 1000}, {"reps", 100000}},
         examples::run_bpve0},
        {"bpve1",
         "head-mass criterion and germ comparison against the binary schedule",
         Json{{"law", Json{{"type", "finite"}, {"probs", {0.2, 0.0, 0.8}}}},
              {"delta", 0.9},
              {"reps", 20000}},
         examples::run_bpve1},
        {"fireworkmixedpoisson1",
         "mixed-Poisson firework survives through the germ transfer despite subcritical stretches",
         Json{{"lambda", 1.5}, {"eps", 0.4}, {"alpha", 0.3}, {"lambda0", 1.0},
              {"n_sites", 200}, {"reps", 10000}},
         examples::run_firework_mixed},
        {"nonid",
         "two emitter types, one subcritical and one supercritical radius law",
         Json{{"beta", 0.5}, {"lambda_10", 0.5}, {"lambda_20", 4.0},
              {"lambda_extinct", 0.7}, {"lambda_survive", 1.2}},
         examples::run_nonid},
        {"nonidMP",
         "the two-type emitters with mixed-Poisson station counts, transfer applied twice",
         Json{{"beta", 0.5}, {"lambda_10", 0.5}, {"lambda_20", 4.0},
              {"extinct_rate_low", 0.5}, {"extinct_rate_high", 2.0},
              {"extinct_alpha", 0.95}, {"extinct_bridge", 0.6},
              {"survive_rate_low", 1.0}, {"survive_rate_high", 2.0},
              {"survive_alpha", 0.3}},
         examples::run_nonid_mixed},
    };
    return catalogue;
}

inline const NamedExample& find_named_example(const std::string& name) {
    for (const auto& e : named_examples())
        if (e.name == name) return e;
    throw ConfigError("unknown named example '" + name + "'");
}

inline Json list_named_examples() {
    Json out = Json::array();
    for (const auto& e : named_examples())
        out.push_back(Json{{"name", e.name}, {"summary", e.summary}, {"params", e.params}});
    return out;
}

}  // namespace germ
