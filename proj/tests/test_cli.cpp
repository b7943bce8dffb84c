#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "germ/config.hpp"
#include "germ/examples_catalog.hpp"
#include "germ/runner.hpp"

using germ::Json;

namespace {

std::string cli_path() {
#ifdef GERM_CLI_PATH
    return GERM_CLI_PATH;
#else
    return "";
#endif
}

int run_cli(const std::string& args) {
    const std::string cmd = cli_path() + " " + args + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("law parsing round trip") {
    auto poisson = germ::config::parse_nat_law(Json{{"type", "poisson"}, {"lambda", 2.0}}, "t");
    REQUIRE(poisson.poisson_rate() == 2.0);

    auto mixed = germ::config::parse_nat_law(
        Json{{"type", "mixed-poisson"},
             {"components", Json::array({Json{{"weight", 0.4}, {"rate", 1.0}},
                                         Json{{"weight", 0.6}, {"rate", 3.0}}})}},
        "t");
    REQUIRE(mixed.mix_components().size() == 2);

    auto law = germ::config::parse_offspring_law(
        Json{{"type", "indep-diffusion"},
             {"total", Json{{"type", "poisson"}, {"lambda", 2.0}}},
             {"row", {0.5, 0.5}}},
        "t");
    REQUIRE(law.kind() == germ::OffspringKind::IndepDiffusion);

    REQUIRE_THROWS_AS(germ::config::parse_nat_law(Json{{"type", "cauchy"}}, "t"),
                      germ::ConfigError);
    REQUIRE_THROWS_AS(germ::config::parse_nat_law(Json{{"type", "poisson"}}, "t"),
                      germ::ConfigError);
}

TEST_CASE("experiment dispatch and schema errors") {
    REQUIRE_THROWS_AS(germ::run_experiment(Json::object()), germ::ConfigError);
    REQUIRE_THROWS_AS(germ::run_experiment(Json{{"kind", "nope"}}), germ::ConfigError);
    REQUIRE_THROWS_AS(germ::run_experiment(Json::array()), germ::ConfigError);

    Json cfg{{"kind", "order-check"},
             {"mode", "pgf"},
             {"mu", Json::array({Json{{"type", "indep-diffusion"},
                                      {"total", Json{{"type", "poisson"}, {"lambda", 3.0}}},
                                      {"row", {1.0}}}})},
             {"nu", Json::array({Json{{"type", "indep-diffusion"},
                                      {"total", Json{{"type", "poisson"}, {"lambda", 2.0}}},
                                      {"row", {1.0}}}})}};
    auto report = germ::run_experiment(cfg);
    REQUIRE(report.at("schema") == 1);
    REQUIRE(report.at("results").at("verdict").at("kind") == "pgf-dominates");
}

TEST_CASE("reports are byte-identical for a fixed config and seed") {
    Json cfg{{"kind", "bpve"},
             {"task", "simulate"},
             {"seed", 77},
             {"horizon", 200},
             {"reps", 5000},
             {"model", Json{{"tail", Json{{"kind", "constant"},
                                          {"law", Json{{"type", "finite"},
                                                       {"probs", {0.25, 0.0, 0.75}}}}}}}}};
    auto a = germ::run_experiment(cfg).dump(2);
    auto b = germ::run_experiment(cfg).dump(2);
    REQUIRE(a == b);

    germ::RunOverrides o;
    o.seed = 78;
    auto c = germ::run_experiment(cfg, o).dump(2);
    REQUIRE(a != c);
}

TEST_CASE("named example registry") {
    auto catalogue = germ::list_named_examples();
    REQUIRE(catalogue.size() >= 11);

    const auto& nonid = germ::find_named_example("nonid");
    REQUIRE(nonid.params.contains("beta"));
    REQUIRE(nonid.params.contains("lambda_10"));
    REQUIRE(nonid.params.contains("lambda_20"));
    REQUIRE_THROWS_AS(germ::find_named_example("unknown"), germ::ConfigError);
}

TEST_CASE("bpve0 example reproduces the telescoping limit and frequency") {
    Json cfg{{"kind", "named-example"},
             {"name", "bpve0"},
             {"seed", 5},
             {"params", Json{{"reps", 20000}}}};
    auto report = germ::run_experiment(cfg);
    const auto& res = report.at("results");
    REQUIRE(res.at("analysis").at("limit").get<double>() == Catch::Approx(0.5).margin(1e-15));
    REQUIRE(res.at("analysis").at("verdict") == "survives");
    REQUIRE(res.at("simulation").at("frequency").get<double>() ==
            Catch::Approx(1002.0 / 2002.0).margin(0.012));
}

TEST_CASE("mix example certifies germ dominance and refutes pgf dominance") {
    auto report = germ::run_experiment(Json{{"kind", "named-example"}, {"name", "mix"}});
    const auto& res = report.at("results");
    REQUIRE(res.at("pgf_check").at("kind") == "counterexample");
    REQUIRE(res.at("pgf_check").at("witness").at("point") == Json::array({0.0}));
    REQUIRE(res.at("pgf_check").at("witness").at("g_mu").get<double>() ==
            Catch::Approx(0.1770240174892953).margin(1e-6));
    REQUIRE(res.at("germ").at("kind") == "germ-dominates");
    REQUIRE(res.at("germ").at("delta").get<double>() < 1.0);
    REQUIRE(res.at("germ").at("certified") == true);
    REQUIRE(res.at("mixing_condition").at("holds") == true);
}

TEST_CASE("nonid example transfers in both directions") {
    auto report = germ::run_experiment(Json{{"kind", "named-example"}, {"name", "nonid"}});
    const auto& res = report.at("results");
    REQUIRE(res.at("effective_lambda0").get<double>() == Catch::Approx(8.0 / 9.0));
    REQUIRE(res.at("extinction_side").at("transfer").at("outcome") == "transfer-extinction");
    REQUIRE(res.at("survival_side").at("transfer").at("outcome") == "transfer-survival");
}

TEST_CASE("csv writers emit header plus rows") {
    namespace fs = std::filesystem;
    auto dir = fs::temp_directory_path() / "germ_csv_test";
    fs::create_directories(dir);

    germ::BrwTrajectory traj;
    traj.occupation = {{1, 0}, {0, 2}};
    germ::write_trajectory_csv((dir / "t.csv").string(), traj);
    std::ifstream in(dir / "t.csv");
    std::string line;
    std::getline(in, line);
    REQUIRE(line == "generation,site,count");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    REQUIRE(rows == 4);

    germ::Environment env{{2, 0}, {0, 1}};
    germ::write_environment_csv((dir / "e.csv").string(), env);
    std::ifstream ein(dir / "e.csv");
    std::getline(ein, line);
    REQUIRE(line == "site,type0,type1");
    fs::remove_all(dir);
}

TEST_CASE("report files are written atomically into the out dir") {
    namespace fs = std::filesystem;
    auto dir = fs::temp_directory_path() / "germ_report_test";
    fs::remove_all(dir);
    germ::write_report(Json{{"schema", 1}}, dir.string());
    REQUIRE(fs::exists(dir / "report.json"));
    REQUIRE_FALSE(fs::exists(dir / "report.json.tmp"));
    fs::remove_all(dir);
}

TEST_CASE("cli exit codes") {
    if (cli_path().empty()) {
        SUCCEED("cli path not wired in");
        return;
    }
    REQUIRE(run_cli("--list-examples") == 0);
    REQUIRE(run_cli("--example mix") == 0);
    REQUIRE(run_cli("--example unknown") == 1);
    REQUIRE(run_cli("--config /nonexistent.json") == 1);
    REQUIRE(run_cli("") == 1);

    namespace fs = std::filesystem;
    auto dir = fs::temp_directory_path() / "germ_cli_test";
    fs::create_directories(dir);
    {
        std::ofstream bad(dir / "bad.json");
        bad << "{\"kind\": \"brw\"}";  // missing model: schema error
    }
    REQUIRE(run_cli("--config " + (dir / "bad.json").string()) == 1);
    {
        // schema-valid but the projection is invalid at run time: module error
        std::ofstream mod(dir / "module.json");
        mod << R"({"kind":"brw","task":"fbrw","g":[0,0],
                   "model":{"laws":[
                     {"type":"indep-diffusion","total":{"type":"poisson","lambda":1.0},"row":[0.5,0.5]},
                     {"type":"indep-diffusion","total":{"type":"poisson","lambda":2.0},"row":[0.5,0.5]}]}})";
    }
    REQUIRE(run_cli("--config " + (dir / "module.json").string()) == 2);
    {
        std::ofstream ok(dir / "ok.json");
        ok << R"({"kind":"brw","task":"extinction",
                  "model":{"laws":[
                    {"type":"indep-diffusion","total":{"type":"finite","probs":[0.25,0.0,0.75]},"row":[1.0]}]}})";
    }
    REQUIRE(run_cli("--config " + (dir / "ok.json").string() + " --out " + (dir / "out").string()) == 0);
    REQUIRE(fs::exists(dir / "out" / "report.json"));
    fs::remove_all(dir);
}
