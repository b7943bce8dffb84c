#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "germ/bpve.hpp"
#include "germ/brw.hpp"
#include "germ/errors.hpp"
#include "germ/orders.hpp"
#include "germ/rumor_criteria.hpp"
#include "germ/rumor_sim.hpp"
#include "germ/series.hpp"

namespace germ {

using Json = nlohmann::json;

inline std::string to_string(OrderKind k) {
    switch (k) {
        case OrderKind::PgfDominates: return "pgf-dominates";
        case OrderKind::GermDominates: return "germ-dominates";
        case OrderKind::CounterexampleFound: return "counterexample";
        case OrderKind::Inconclusive: return "inconclusive";
    }
    return "?";
}

inline std::string to_string(SeriesKind k) {
    switch (k) {
        case SeriesKind::Converges: return "converges";
        case SeriesKind::Diverges: return "diverges";
        case SeriesKind::Undecided: return "undecided";
    }
    return "?";
}

inline std::string to_string(SeriesMethod::Tag t) {
    switch (t) {
        case SeriesMethod::Tag::ClosedForm: return "closed-form";
        case SeriesMethod::Tag::Kummer: return "kummer";
        case SeriesMethod::Tag::Comparison: return "comparison";
        case SeriesMethod::Tag::TruncationOnly: return "truncation-only";
    }
    return "?";
}

inline std::string to_string(RumorOutcome o) {
    switch (o) {
        case RumorOutcome::Survives: return "survives";
        case RumorOutcome::SurvivesAS: return "survives-as";
        case RumorOutcome::SurvivesPositive: return "survives-positive";
        case RumorOutcome::Dies: return "dies";
        case RumorOutcome::Undecided: return "undecided";
    }
    return "?";
}

inline std::string to_string(TransferOutcome o) {
    switch (o) {
        case TransferOutcome::TransferSurvival: return "transfer-survival";
        case TransferOutcome::TransferExtinction: return "transfer-extinction";
        case TransferOutcome::NotApplicable: return "not-applicable";
    }
    return "?";
}

inline std::string to_string(BpveVerdict v) {
    switch (v) {
        case BpveVerdict::Survives: return "survives";
        case BpveVerdict::Dies: return "dies";
        case BpveVerdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

inline std::string to_string(SurvivalVerdict v) {
    return v == SurvivalVerdict::Survives ? "survives" : "dies";
}

inline Json to_json(const OrderVerdict& v) {
    Json j{{"kind", to_string(v.kind)}, {"certified", v.certified}, {"method", v.method}};
    if (v.kind == OrderKind::GermDominates) j["delta"] = v.delta;
    if (v.kind == OrderKind::Inconclusive) j["max_delta_tried"] = v.max_delta_tried;
    if (v.kind == OrderKind::CounterexampleFound)
        j["witness"] = Json{{"site", v.witness_site},
                            {"point", v.witness_point},
                            {"g_mu", v.g_mu},
                            {"g_nu", v.g_nu}};
    return j;
}

inline Json to_json(const SeriesVerdict& v) {
    Json sums = Json::array();
    for (const auto& [n, s] : v.partial_sums) sums.push_back(Json::array({n, s}));
    Json method{{"tag", to_string(v.method.tag)}, {"name", v.method.name}};
    if (v.method.exponent != 0.0) method["exponent"] = v.method.exponent;
    if (v.method.tag == SeriesMethod::Tag::Kummer) {
        method["b_start"] = v.method.b_start;
        method["alpha"] = v.method.alpha;
        method["horizon"] = v.method.horizon;
    }
    return Json{{"kind", to_string(v.kind)}, {"method", method}, {"partial_sums", sums}};
}

inline Json to_json(const RumorVerdict& v) {
    Json j{{"outcome", to_string(v.outcome)}, {"series", to_json(v.series)}};
    if (!v.note.empty()) j["note"] = v.note;
    return j;
}

inline Json to_json(const TransferResult& v) {
    return Json{{"outcome", to_string(v.outcome)},
                {"assumption_ok", v.assumption_ok},
                {"mu", to_json(v.mu_verdict)},
                {"nu", to_json(v.nu_verdict)},
                {"note", v.note}};
}

inline Json to_json(const ExtinctionVector& v) {
    return Json{{"q", v.q},
                {"iterations", v.iterations},
                {"residual", v.residual},
                {"converged", v.converged}};
}

inline Json to_json(const FbrwResult& v) {
    return Json{{"verdict", to_string(v.verdict)},
                {"perron_root", v.perron_root},
                {"projected_moments", v.projected_moments}};
}

inline Json to_json(const McEstimate& v) {
    return Json{{"frequency", v.frequency},
                {"stderr", v.stderr_},
                {"reps", v.reps},
                {"seed", v.seed}};
}

inline Json to_json(const BpveMcEstimate& v) {
    return Json{{"frequency", v.frequency},
                {"stderr", v.stderr_},
                {"reps", v.reps},
                {"seed", v.seed}};
}

inline Json to_json(const RumorSimResult& v) {
    return Json{{"raw_frequency", v.raw_frequency},
                {"conditioned_frequency", v.conditioned_frequency},
                {"stderr", v.stderr_},
                {"reps", v.reps},
                {"excluded", v.excluded},
                {"seed", v.seed},
                {"mean_depth", v.mean_depth}};
}

inline Json to_json(const BinarySurvival& v) {
    Json j{{"verdict", to_string(v.verdict)},
           {"partial_product", v.partial_product},
           {"certificate", v.certificate}};
    if (v.limit) j["limit"] = *v.limit;
    return j;
}

inline Json to_json(const CriterionResult& v) {
    return Json{{"verdict", to_string(v.verdict)}, {"limsup", v.limsup}};
}

inline Json to_json(const MomentSeriesResult& v) {
    return Json{{"verdict", to_string(v.verdict)},
                {"series_partial", v.series_partial},
                {"inf_products", v.inf_products},
                {"certificate", v.certificate}};
}

inline Json to_json(const GermCompareResult& v) {
    return Json{{"holds", v.holds},
                {"worst_margin", v.worst_margin},
                {"witness_n", v.witness_n},
                {"witness_t", v.witness_t},
                {"tail_certified", v.tail_certified},
                {"certificate", v.certificate}};
}

// CSV writers: header row, comma separators, '.' decimals (std::to_string on
// doubles is locale-independent enough only via ostream with classic locale,
// so format through Json numbers instead).

inline void write_trajectory_csv(const std::string& path, const BrwTrajectory& traj) {
    std::ofstream out(path);
    if (!out) throw ModuleError("cannot open " + path);
    out << "generation,site,count\n";
    for (std::size_t gen = 0; gen < traj.occupation.size(); ++gen)
        for (std::size_t site = 0; site < traj.occupation[gen].size(); ++site)
            out << gen << "," << site << "," << traj.occupation[gen][site] << "\n";
}

inline void write_environment_csv(const std::string& path, const Environment& env) {
    std::ofstream out(path);
    if (!out) throw ModuleError("cannot open " + path);
    out << "site";
    if (!env.empty())
        for (std::size_t x = 0; x < env.front().size(); ++x) out << ",type" << x;
    out << "\n";
    for (std::size_t y = 0; y < env.size(); ++y) {
        out << y;
        for (auto c : env[y]) out << "," << c;
        out << "\n";
    }
}

}  // namespace germ
