#include <catch2/catch_amalgamated.hpp>

#include "ncg/analysis.hpp"
#include "ncg/harness.hpp"
#include "ncg/json_io.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

using namespace ncg;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int code;
    std::string out;
};

fs::path work_dir() {
    static fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("ncg_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

RunResult run_cli(const std::string& args) {
    auto out_file = work_dir() / "out.txt";
    std::string cmd = std::string(NCG_CLI_PATH) + " " + args + " > " + out_file.string() + " 2>&1";
    int status = std::system(cmd.c_str());
    int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(out_file);
    std::ostringstream ss;
    ss << in.rdbuf();
    return {code, ss.str()};
}

std::string write_game(const Game& g, const std::string& name) {
    auto path = work_dir() / name;
    std::ofstream out(path);
    out << game_to_json(g).dump(2) << "\n";
    return path.string();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("validate subcommand") {
    auto ok = run_cli("validate " + write_game(pigou(1.0), "pigou1.json"));
    CHECK(ok.code == 0);

    Game bad;
    int a = bad.add_resource("dead", PriceFunction::polynomial({0.0}));
    int k = bad.add_group("k");
    bad.add_strategy(k, "s", {{a, 1.0}});
    auto res = run_cli("validate " + write_game(bad, "bad.json"));
    CHECK(res.code == 1);
    CHECK(res.out.find("free strategy") != std::string::npos);
}

TEST_CASE("poa subcommand matches the library") {
    auto path = write_game(pigou(1.0), "pigou_poa.json");
    auto res = run_cli("poa " + path + " --demand g:1");
    REQUIRE(res.code == 0);
    CHECK(res.out.find("poa 1.33333") != std::string::npos);

    auto lib = price_of_anarchy(pigou(1.0), {1.0});
    std::ostringstream expect;
    expect.precision(12);
    expect << lib.poa;
    CHECK(res.out.find("poa " + expect.str()) != std::string::npos);
}

TEST_CASE("solve subcommand writes the profile") {
    Game g;
    int u1 = g.add_resource("u1", PriceFunction::polynomial({1.0, 2.0}));
    int u2 = g.add_resource("u2", PriceFunction::polynomial({1.0, 3.0}));
    int k = g.add_group("up");
    g.add_strategy(k, "a", {{u1, 1.0}});
    g.add_strategy(k, "b", {{u2, 1.0}});
    auto game_path = write_game(g, "upper.json");
    auto out_path = (work_dir() / "solve.json").string();
    auto res = run_cli("solve " + game_path + " --mode we --demand up:10 -o " + out_path);
    REQUIRE(res.code == 0);
    auto j = Json::parse(read_file(out_path));
    CHECK(j["converged"].get<bool>());
    CHECK(std::abs(j["profile"]["a"].get<double>() - 6.0) < 1e-6);
    CHECK(std::abs(j["profile"]["b"].get<double>() - 4.0) < 1e-6);

    auto so = run_cli("solve " + game_path + " --mode so --demand up:10 -o " + out_path);
    REQUIRE(so.code == 0);
    auto js = Json::parse(read_file(out_path));
    CHECK(std::abs(js["profile"]["a"].get<double>() - 6.0) < 1e-5);
}

TEST_CASE("usage errors exit with 2") {
    CHECK(run_cli("frobnicate").code == 2);
    CHECK(run_cli("poa").code == 2);                    // missing required argument
    CHECK(run_cli("solve --bogus-flag x.json").code == 2);
    CHECK(run_cli("").code == 2);                       // subcommand required
}

TEST_CASE("help exists for every subcommand") {
    CHECK(run_cli("--help").code == 0);
    for (std::string sub :
         {"validate", "solve", "poa", "scale", "analyze", "ingest", "builtin", "random", "pigou"}) {
        auto res = run_cli(sub + " --help");
        INFO(sub);
        CHECK(res.code == 0);
        CHECK(res.out.find("Usage") != std::string::npos);
    }
}

TEST_CASE("builtin and random emit loadable deterministic games") {
    auto res = run_cli("builtin --list");
    REQUIRE(res.code == 0);
    CHECK(res.out.find("double_limits") != std::string::npos);

    auto path_a = (work_dir() / "b1.json").string();
    auto path_b = (work_dir() / "b2.json").string();
    REQUIRE(run_cli("builtin pigou4 -o " + path_a).code == 0);
    auto g = game_from_json(Json::parse(read_file(path_a)));
    CHECK(validate_game(g).ok());
    CHECK(g.n_strategies() == 2);

    REQUIRE(run_cli("random --seed 7 -o " + path_a).code == 0);
    REQUIRE(run_cli("random --seed 7 -o " + path_b).code == 0);
    CHECK(read_file(path_a) == read_file(path_b));
    REQUIRE(run_cli("random --seed 8 -o " + path_b).code == 0);
    CHECK(read_file(path_a) != read_file(path_b));
    CHECK(run_cli("builtin nope").code == 2);
}

TEST_CASE("scale subcommand emits deterministic csv") {
    auto game_path = write_game(double_limits(), "dl.json");
    auto path_file = (work_dir() / "path.json").string();
    {
        std::ofstream out(path_file);
        out << R"({"phases":[{"modulus":1,"residue":0,"groups":[)"
            << R"({"group":"up","theta":1,"p":"2"},{"group":"low","theta":1,"p":"1"}]}]})" << "\n";
    }
    auto csv_a = (work_dir() / "a.csv").string();
    auto csv_b = (work_dir() / "b.csv").string();
    REQUIRE(run_cli("scale " + game_path + " --path " + path_file +
                    " --grid 1:64:geometric --no-timing -o " + csv_a).code == 0);
    REQUIRE(run_cli("scale " + game_path + " --path " + path_file +
                    " --grid 1:64:geometric --no-timing -o " + csv_b).code == 0);
    CHECK(read_file(csv_a) == read_file(csv_b));
    CHECK(read_file(csv_a).find("phase,n,T,C_ne,C_so,poa,gap_ne,gap_so,eps_so,ms") == 0);

    // golden check against the library on one record
    auto run = scale_poa(double_limits(), DemandPath::single({{1.0, Rat(2)}, {1.0, Rat(1)}}),
                         parse_grid("1:64:geometric"));
    CHECK(read_file(csv_a) == to_csv(run, false));
}

TEST_CASE("analyze subcommand reports decomposition and gauges") {
    auto game_path = write_game(double_limits(), "dl2.json");
    auto path_file = (work_dir() / "nsq.json").string();
    {
        std::ofstream out(path_file);
        out << R"({"phases":[{"modulus":1,"residue":0,"groups":[)"
            << R"({"group":"up","theta":1,"p":"2"},{"group":"low","theta":1,"p":"1"}]}]})" << "\n";
    }
    auto json_out = (work_dir() / "analyze.json").string();
    auto res = run_cli("analyze " + game_path + " --path " + path_file + " -o " + json_out);
    REQUIRE(res.code == 0);
    CHECK(res.out.find("mdg components: 2") != std::string::npos);
    CHECK(res.out.find("predicted total-cost growth exponent 4") != std::string::npos);

    auto j = Json::parse(read_file(json_out));
    CHECK(j["decomposition"]["phases"][0]["levels"][0]["groups"][0] == "up");
    CHECK(j["decomposition"]["phases"][0]["levels"][0]["alpha"] == 1);
    CHECK(j["decomposition"]["phases"][0]["levels"][1]["verdict"] == "negligible");
    CHECK(j["decomposition"]["phases"][0]["predicted_cost_exponent"] == 4);
    CHECK(j["limit_games"][0]["valid"] == true);
}

TEST_CASE("ingest subcommand round-trips through solve") {
    auto net_path = (work_dir() / "toy_net.tntp").string();
    auto trips_path = (work_dir() / "toy_trips.tntp").string();
    {
        std::ofstream net(net_path);
        net << "<NUMBER OF NODES> 4\n<NUMBER OF LINKS> 4\n<END OF METADATA>\n"
               "1 2 10.0 1 1 0.15 4 0 0 1 ;\n"
               "2 4 10.0 1 1 0.15 4 0 0 1 ;\n"
               "1 3 10.0 2 2 0.15 4 0 0 1 ;\n"
               "3 4 10.0 2 2 0.15 4 0 0 1 ;\n";
        std::ofstream trips(trips_path);
        trips << "<NUMBER OF ZONES> 4\n<END OF METADATA>\nOrigin 1\n 4 : 6.0;\n";
    }
    auto game_out = (work_dir() / "ingested.json").string();
    auto demands_out = (work_dir() / "demands.json").string();
    auto res = run_cli("ingest --net " + net_path + " --trips " + trips_path + " --k 2 -o " +
                       game_out + " --demands-out " + demands_out);
    REQUIRE(res.code == 0);
    CHECK(res.out.find("4 nodes") != std::string::npos);

    auto solve = run_cli("solve " + game_out + " --mode we --demand-file " + demands_out + " -o " +
                         (work_dir() / "ing_solve.json").string());
    CHECK(solve.code == 0);
    auto j = Json::parse(read_file((work_dir() / "ing_solve.json").string()));
    CHECK(j["converged"].get<bool>());
    CHECK(j["gap"].get<double>() <= 1e-9);
}

TEST_CASE("pigou subcommand exposes both formula variants") {
    auto derived = run_cli("pigou --beta 1 --T 1");
    REQUIRE(derived.code == 0);
    CHECK(derived.out.find("poa 1.33333") != std::string::npos);
    auto literal = run_cli("pigou --beta 1 --T 1 --paper-literal");
    REQUIRE(literal.code == 0);
    CHECK(literal.out.find("poa 1\n") != std::string::npos);
}
