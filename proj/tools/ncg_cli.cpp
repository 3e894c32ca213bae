// Command-line front end: validate, solve, poa, scale, analyze, ingest,
// plus access to the built-in corpus and the seeded random generator.
// Exit codes: 0 success, 1 validation/solve failure, 2 usage error.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ncg/analysis.hpp"
#include "ncg/harness.hpp"
#include "ncg/ingest.hpp"
#include "ncg/json_io.hpp"
#include "ncg/tntp.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

ncg::Game load_game(const std::string& path) {
    return ncg::game_from_json(ncg::Json::parse(read_file(path)));
}

/// Demand from "group:volume,group:volume" or a {"group": volume} JSON file.
ncg::DemandVector parse_demand(const ncg::Game& g, const std::string& inline_spec,
                               const std::string& file) {
    ncg::DemandVector d(static_cast<std::size_t>(g.n_groups()), 0.0);
    auto assign = [&](const std::string& group, double volume) {
        int k = g.find_group(group);
        if (k < 0) throw std::runtime_error("unknown group '" + group + "' in demand");
        d[static_cast<std::size_t>(k)] = volume;
    };
    if (!file.empty()) {
        auto j = ncg::Json::parse(read_file(file));
        for (auto it = j.begin(); it != j.end(); ++it) assign(it.key(), it.value().get<double>());
        return d;
    }
    std::istringstream in(inline_spec);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        auto colon = item.rfind(':');
        if (colon == std::string::npos) throw std::runtime_error("demand term needs group:volume: '" + item + "'");
        assign(item.substr(0, colon), std::stod(item.substr(colon + 1)));
    }
    return d;
}

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(12);
    ss << v;
    return ss.str();
}

int cmd_validate(const std::string& game_path) {
    auto g = load_game(game_path);
    auto report = ncg::validate_game(g);
    if (report.ok()) {
        std::cout << "ok: " << g.n_groups() << " groups, " << g.n_strategies() << " strategies, "
                  << g.n_resources() << " resources\n";
        return 0;
    }
    for (const auto& v : report.violations) std::cout << "violation: " << v.message << "\n";
    return 1;
}

int cmd_solve(const std::string& game_path, const std::string& mode, const std::string& demand,
              const std::string& demand_file, const std::string& out, ncg::SolverConfig cfg) {
    auto g = load_game(game_path);
    auto d = parse_demand(g, demand, demand_file);
    cfg.record_objective = false;
    auto result = mode == "so" ? ncg::solve_so(g, d, cfg) : ncg::solve_wardrop(g, d, cfg);
    auto j = ncg::solve_result_to_json(result, g);
    if (!out.empty())
        write_file(out, j.dump(2) + "\n");
    else
        std::cout << j.dump(2) << "\n";
    if (!result.converged) {
        std::cerr << "not converged: relative gap " << fmt(result.gap) << "\n";
        return 1;
    }
    return 0;
}

int cmd_poa(const std::string& game_path, const std::string& demand, const std::string& demand_file,
            const std::string& out, ncg::SolverConfig cfg) {
    auto g = load_game(game_path);
    auto d = parse_demand(g, demand, demand_file);
    cfg.record_objective = false;
    auto r = ncg::price_of_anarchy(g, d, cfg);
    if (r.defined)
        std::cout << "poa " << fmt(r.poa) << "\n";
    else
        std::cout << "poa undefined (optimal cost is zero)\n";
    std::cout << "c_ne " << fmt(r.c_ne) << "\nc_so " << fmt(r.c_so) << "\n";
    if (!out.empty()) write_file(out, ncg::poa_to_json(r).dump(2) + "\n");
    if (!r.ne.converged || !r.so.converged) {
        std::cerr << "not converged\n";
        return 1;
    }
    return 0;
}

int cmd_scale(const std::string& game_path, const std::string& path_file, const std::string& grid_spec,
              const std::string& out, const std::string& json_out, bool no_timing, int threads,
              ncg::SolverConfig cfg) {
    auto g = load_game(game_path);
    auto path = ncg::demand_path_from_json(ncg::Json::parse(read_file(path_file)), g);
    auto grid = ncg::parse_grid(grid_spec);
    auto run = ncg::scale_poa(g, path, grid, cfg, threads);
    std::string csv = ncg::to_csv(run, !no_timing);
    if (!out.empty())
        write_file(out, csv);
    else
        std::cout << csv;
    if (!json_out.empty()) {
        ncg::Json j;
        j["records"] = ncg::Json::array();
        for (const auto& r : run.records)
            j["records"].push_back({{"phase", r.phase},
                                    {"n", r.n},
                                    {"T", r.t},
                                    {"C_ne", r.c_ne},
                                    {"C_so", r.c_so},
                                    {"poa", r.poa},
                                    {"gap_ne", r.gap_ne},
                                    {"gap_so", r.gap_so},
                                    {"eps_so", r.eps_so},
                                    {"ms", no_timing ? 0.0 : r.ms},
                                    {"converged", r.converged}});
        try {
            auto report = ncg::convergence_report(run);
            j["convergence"] = ncg::Json::array();
            for (const auto& pc : report.phases)
                j["convergence"].push_back({{"phase", pc.phase},
                                            {"poa_last_minus_1", pc.poa_last_minus_1},
                                            {"monotone_nonincreasing", pc.monotone_nonincreasing},
                                            {"gamma_hat", pc.gamma_defined ? ncg::Json(pc.gamma_hat) : ncg::Json()},
                                            {"residual", pc.residual},
                                            {"verdict", pc.verdict}});
        } catch (const std::exception&) {
            // too few records for a convergence report; emit records only
        }
        write_file(json_out, j.dump(2) + "\n");
    }
    bool all = true;
    for (const auto& r : run.records) all = all && r.converged;
    if (!all) {
        std::cerr << "some records did not converge\n";
        return 1;
    }
    return 0;
}

int cmd_analyze(const std::string& game_path, const std::string& path_file, const std::string& out) {
    auto g = load_game(game_path);
    auto report = ncg::validate_game(g);
    if (!report.ok()) {
        for (const auto& v : report.violations) std::cout << "violation: " << v.message << "\n";
        return 1;
    }
    auto path = ncg::demand_path_from_json(ncg::Json::parse(read_file(path_file)), g);

    ncg::Json j;
    auto deg = ncg::degrees(g);
    std::cout << "degrees:\n";
    for (int k = 0; k < g.n_groups(); ++k)
        std::cout << "  group " << g.group_id(k) << ": rho_k = " << deg.group[k].to_string() << "\n";
    j["degrees"] = ncg::degrees_to_json(deg, g);

    auto comps = ncg::mdg_decompose(g);
    std::cout << "mdg components: " << comps.size() << "\n";
    j["mdg_components"] = ncg::Json::array();
    for (const auto& c : comps) {
        ncg::Json groups = ncg::Json::array();
        for (int k : c.groups) groups.push_back(g.group_id(k));
        j["mdg_components"].push_back(groups);
    }

    auto dec = ncg::asymptotic_decomposition(g, path);
    std::cout << ncg::to_table(dec, g);
    j["decomposition"] = ncg::decomposition_to_json(dec, g);

    std::vector<int> all_groups(static_cast<std::size_t>(g.n_groups()));
    for (int k = 0; k < g.n_groups(); ++k) all_groups[static_cast<std::size_t>(k)] = k;
    auto gauge = ncg::find_gauge(g, all_groups);
    j["gauge_search"] = ncg::Json::object();
    if (gauge) {
        auto gr = ncg::gauge_check(g, path, *gauge);
        std::cout << "gauge search: candidate x^" << gauge->power.to_string()
                  << (gauge->log_exponent != 0.0 ? "*ln^" + std::to_string(gauge->log_exponent) : "")
                  << " -> " << (gr.gaugeable ? "gaugeable" : "not gaugeable on this path") << "\n";
        j["gauge_search"]["candidate"] = ncg::Json{{"c", gauge->scale},
                                                   {"rho", ncg::rat_to_json(gauge->power)},
                                                   {"beta", gauge->log_exponent}};
        j["gauge_search"]["report"] = ncg::gauge_report_to_json(gr, g);
    } else {
        std::cout << "gauge search: no candidate satisfies G1'-G3' for the full group set\n";
        j["gauge_search"]["candidate"] = nullptr;
    }

    j["limit_games"] = ncg::Json::array();
    for (int pi = 0; pi < path.n_phases(); ++pi) {
        const auto& pd = dec.phases[static_cast<std::size_t>(pi)];
        ncg::Rat alpha = pd.levels.front().alpha;
        auto lim = ncg::build_limit_game(g, path, pi, alpha);
        std::cout << "phase " << pi << " limit game (alpha=" << alpha.to_string() << "): "
                  << (lim.valid ? "valid" : "invalid") << "\n";
        if (lim.valid && lim.poa_defined)
            std::cout << "  limit instance: ne_cost " << fmt(lim.ne_cost) << ", poa " << fmt(lim.poa) << "\n";
        for (const auto& diag : lim.diagnostics) std::cout << "  " << diag << "\n";
        j["limit_games"].push_back(ncg::limit_game_to_json(lim, g));
    }

    if (!out.empty()) write_file(out, j.dump(2) + "\n");
    return 0;
}

int cmd_ingest(const std::string& net_path, const std::string& trips_path, int k,
               const std::string& out, const std::string& demands_out) {
    auto net = ncg::tntp::parse_net(read_file(net_path));
    auto trips = ncg::tntp::parse_trips(read_file(trips_path));
    auto result = ncg::enumerate_paths(net, trips, k);
    auto report = ncg::validate_game(result.game);
    if (!report.ok()) {
        for (const auto& v : report.violations) std::cerr << "violation: " << v.message << "\n";
        return 1;
    }
    write_file(out, ncg::game_to_json(result.game).dump(2) + "\n");
    if (!demands_out.empty()) {
        ncg::Json d = ncg::Json::object();
        for (int g = 0; g < result.game.n_groups(); ++g)
            d[result.game.group_id(g)] = result.demand[static_cast<std::size_t>(g)];
        write_file(demands_out, d.dump(2) + "\n");
    }
    std::cout << "ingested " << net.nodes << " nodes, " << net.links.size() << " links, "
              << result.game.n_groups() << " OD pairs, " << result.game.n_strategies()
              << " path strategies\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"non-atomic congestion game solver and asymptotics toolkit"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    ncg::SolverConfig cfg;
    std::string game_path, demand, demand_file, out, json_out, mode = "we";
    std::string path_file, grid_spec = "1:16384:geometric";
    std::string net_path, trips_path, name;
    bool no_timing = false, list = false, paper_literal = false;
    int k = 8, threads = 0;
    std::uint64_t seed = 0;
    ncg::RandomGameSpec rnd;
    double beta = 1.0, T = 1.0;

    auto add_solver_opts = [&](CLI::App* cmd) {
        cmd->add_option("--gap-tol", cfg.gap_tolerance, "relative gap tolerance");
        cmd->add_option("--max-iters", cfg.max_iterations, "iteration cap");
    };

    auto* validate = app.add_subcommand("validate", "check a game file");
    validate->add_option("game", game_path, "game JSON")->required();

    auto* solve = app.add_subcommand("solve", "compute an equilibrium (we) or optimum (so)");
    solve->add_option("game", game_path)->required();
    solve->add_option("--mode", mode, "we|so")->check(CLI::IsMember({"we", "so"}));
    solve->add_option("--demand", demand, "inline demand group:volume,...");
    solve->add_option("--demand-file", demand_file, "JSON demand file");
    solve->add_option("-o,--out", out, "result JSON path");
    add_solver_opts(solve);

    auto* poa = app.add_subcommand("poa", "price of anarchy at one demand");
    poa->add_option("game", game_path)->required();
    poa->add_option("--demand", demand);
    poa->add_option("--demand-file", demand_file);
    poa->add_option("-o,--out", out);
    add_solver_opts(poa);

    auto* scale = app.add_subcommand("scale", "PoA along a demand path");
    scale->add_option("game", game_path)->required();
    scale->add_option("--path", path_file, "demand path JSON")->required();
    scale->add_option("--grid", grid_spec, "n grid start:end:geometric[:factor]|linear[:step]");
    scale->add_option("-o,--out", out, "CSV output path");
    scale->add_option("--json", json_out, "JSON report path");
    scale->add_flag("--no-timing", no_timing, "zero the ms column for byte-stable output");
    scale->add_option("--threads", threads, "worker threads (default NCG_THREADS or hardware)");
    add_solver_opts(scale);

    auto* analyze = app.add_subcommand("analyze", "degrees, components, decomposition, gauges, limits");
    analyze->add_option("game", game_path)->required();
    analyze->add_option("--path", path_file, "demand path JSON")->required();
    analyze->add_option("-o,--out", out, "JSON report path");

    auto* ingest = app.add_subcommand("ingest", "build a game from TNTP files");
    ingest->add_option("--net", net_path, "network file")->required();
    ingest->add_option("--trips", trips_path, "trip table")->required();
    ingest->add_option("--k", k, "paths per OD pair");
    ingest->add_option("-o,--out", out, "game JSON path")->required();
    ingest->add_option("--demands-out", demand_file, "demand JSON path");

    auto* builtin = app.add_subcommand("builtin", "emit a built-in benchmark game");
    builtin->add_option("name", name, "pigou1|pigou4|double_limits|all_degree_equal|mdg_pair");
    builtin->add_flag("--list", list, "list names");
    builtin->add_option("-o,--out", out, "game JSON path");

    auto* random = app.add_subcommand("random", "emit a seeded random polynomial game");
    random->add_option("--seed", seed, "generator seed")->required();
    random->add_option("--groups", rnd.n_groups);
    random->add_option("--strategies", rnd.max_strategies_per_group);
    random->add_option("--resources", rnd.n_resources);
    random->add_option("--max-degree", rnd.max_degree);
    random->add_option("-o,--out", out, "game JSON path");

    auto* pigou_cmd = app.add_subcommand("pigou", "closed-form Pigou PoA");
    pigou_cmd->add_option("--beta", beta)->required();
    pigou_cmd->add_option("--T", T)->required();
    pigou_cmd->add_flag("--paper-literal", paper_literal, "reproduce the printed formula variant");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (validate->parsed()) return cmd_validate(game_path);
        if (solve->parsed()) return cmd_solve(game_path, mode, demand, demand_file, out, cfg);
        if (poa->parsed()) return cmd_poa(game_path, demand, demand_file, out, cfg);
        if (scale->parsed())
            return cmd_scale(game_path, path_file, grid_spec, out, json_out, no_timing, threads, cfg);
        if (analyze->parsed()) return cmd_analyze(game_path, path_file, out);
        if (ingest->parsed()) return cmd_ingest(net_path, trips_path, k, out, demand_file);
        if (builtin->parsed()) {
            auto corpus = ncg::builtin_games();
            if (list || name.empty()) {
                for (const auto& b : corpus) std::cout << b.name << "\n";
                return 0;
            }
            for (const auto& b : corpus) {
                if (b.name != name) continue;
                auto j = ncg::game_to_json(b.game);
                if (!out.empty())
                    write_file(out, j.dump(2) + "\n");
                else
                    std::cout << j.dump(2) << "\n";
                return 0;
            }
            std::cerr << "unknown builtin '" << name << "'\n";
            return 2;
        }
        if (random->parsed()) {
            auto g = ncg::random_game(seed, rnd);
            auto j = ncg::game_to_json(g);
            if (!out.empty())
                write_file(out, j.dump(2) + "\n");
            else
                std::cout << j.dump(2) << "\n";
            return 0;
        }
        if (pigou_cmd->parsed()) {
            std::cout << "poa " << fmt(ncg::pigou_poa_closed_form(beta, T, paper_literal)) << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
