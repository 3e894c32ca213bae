// Acceptance suite: one pass/fail line per criterion, non-zero exit when any
// criterion fails. Tolerances are pinned in this file.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ncg/analysis.hpp"
#include "ncg/harness.hpp"
#include "ncg/ingest.hpp"
#include "ncg/solver.hpp"
#include "ncg/tntp.hpp"
#include "support/oracles.hpp"

using namespace ncg;

namespace {

int failures = 0;
std::vector<std::string> details;

void report(int number, const std::string& name, bool pass) {
    std::printf("criterion %d (%s): %s\n", number, name.c_str(), pass ? "PASS" : "FAIL");
    if (!pass) {
        ++failures;
        for (const auto& d : details) std::printf("  - %s\n", d.c_str());
    }
    details.clear();
}

bool expect(bool ok, const std::string& what) {
    if (!ok) details.push_back(what);
    return ok;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Profile random_feasible(const Game& g, const DemandVector& d, std::mt19937_64& rng) {
    Profile f(g.n_strategies(), 0.0);
    for (int k = 0; k < g.n_groups(); ++k) {
        const auto& strategies = g.strategies_of(k);
        std::vector<double> w(strategies.size());
        double sum = 0.0;
        for (auto& v : w) {
            v = std::uniform_real_distribution<>(0.01, 1.0)(rng);
            sum += v;
        }
        for (std::size_t i = 0; i < strategies.size(); ++i) f[strategies[i]] = d[k] * w[i] / sum;
    }
    return f;
}

// --------------------------------------------------------------------------

void criterion_1_pigou_exactness() {
    auto start = std::chrono::steady_clock::now();
    bool ok = true;
    for (double beta : {1.0, 2.0, 4.0}) {
        auto g = pigou(beta);
        for (double t : {1.0, 4.0, 16.0, 256.0, 4096.0}) {
            auto r = price_of_anarchy(g, {t});
            double expected = pigou_poa_closed_form(beta, t);
            ok &= expect(r.defined && std::abs(r.poa - expected) <= 1e-4,
                         "beta=" + std::to_string(beta) + " T=" + std::to_string(t) + ": solver " +
                             std::to_string(r.poa) + " vs closed form " + std::to_string(expected));
        }
    }
    auto r11 = price_of_anarchy(pigou(1.0), {1.0});
    ok &= expect(std::abs(r11.poa - 4.0 / 3.0) <= 1e-4, "beta=1 T=1 must give 4/3");
    ok &= expect(std::abs(pigou_poa_closed_form(1.0, 1.0, true) - 1.0) <= 1e-12,
                 "paper-literal variant should evaluate to 1 at beta=1, T=1");
    double elapsed = seconds_since(start);
    ok &= expect(elapsed < 5.0, "runtime " + std::to_string(elapsed) + "s exceeds 5s");
    report(1, "pigou exactness", ok);
}

void criterion_2_convergence_to_one() {
    auto start = std::chrono::steady_clock::now();
    bool ok = true;

    struct Case {
        std::string name;
        Game game;
        DemandPath path;
        std::vector<long> grid;
    };
    std::vector<Case> cases;

    // pigou(4) under d(n) = n, T up to 16384
    cases.push_back({"pigou4", pigou(4.0), DemandPath::single({{1.0, Rat(1)}}),
                     parse_grid("1:16384:geometric")});

    // the double-limits game under the alternating sequence; interleave even
    // and odd n so both phase subsequences reach T around 1e4
    {
        DemandPath alt({
            DemandPhase{2, 0, {{1.0, Rat(1)}, {0.0, Rat(0)}}},
            DemandPhase{2, 1, {{0.0, Rat(0)}, {1.0, Rat(1)}}},
        });
        std::vector<long> grid;
        for (long v = 2; v <= 16384; v *= 2) {
            grid.push_back(v);
            grid.push_back(v + 1);
        }
        cases.push_back({"double_limits", double_limits(), alt, grid});
    }

    // equal degrees with a shared resource, T = 2n up to 16384
    cases.push_back({"all_degree_equal", all_degree_equal(),
                     DemandPath::single({{1.0, Rat(1)}, {1.0, Rat(1)}}),
                     parse_grid("1:8192:geometric")});

    // five seeded random polynomial games, at most 4 groups / 10 strategies
    for (std::uint64_t seed : {11ULL, 12ULL, 13ULL, 14ULL, 15ULL}) {
        RandomGameSpec spec;
        spec.n_groups = 1 + static_cast<int>(seed % 4);
        spec.max_strategies_per_group = 2;
        spec.n_resources = 5;
        spec.max_degree = 3;
        auto g = random_game(seed, spec);
        std::vector<PowerTerm> terms(static_cast<std::size_t>(g.n_groups()), PowerTerm{1.0, Rat(1)});
        long n_max = 16384 / (2 * g.n_groups()) * 2;  // T = groups * n around 1e4
        cases.push_back({"random" + std::to_string(seed), g, DemandPath::single(terms),
                         parse_grid("1:" + std::to_string(n_max) + ":geometric")});
    }

    for (auto& c : cases) {
        auto run = scale_poa(c.game, c.path, c.grid);
        int n_phases = c.path.n_phases();
        for (int phase = 0; phase < n_phases; ++phase) {
            std::vector<ScaleRecord> recs;
            for (const auto& r : run.records)
                if (r.phase == phase) recs.push_back(r);
            std::sort(recs.begin(), recs.end(),
                      [](const ScaleRecord& a, const ScaleRecord& b) { return a.t < b.t; });
            for (const auto& r : recs)
                ok &= expect(r.converged, c.name + ": record n=" + std::to_string(r.n) + " not converged");
            const auto& last = recs.back();
            ok &= expect(last.t >= 8000.0, c.name + ": top T only " + std::to_string(last.t));
            ok &= expect(last.poa - 1.0 <= 1e-2,
                         c.name + " phase " + std::to_string(phase) + ": PoA(n_max)-1 = " +
                             std::to_string(last.poa - 1.0));
            std::size_t tail = recs.size() > 5 ? recs.size() - 5 : 0;
            for (std::size_t i = tail; i + 1 < recs.size(); ++i)
                ok &= expect(recs[i + 1].poa <= recs[i].poa + 1e-6,
                             c.name + ": PoA increases at n=" + std::to_string(recs[i + 1].n));
        }
    }
    double elapsed = seconds_since(start);
    ok &= expect(elapsed < 120.0, "runtime " + std::to_string(elapsed) + "s exceeds 2min");
    report(2, "convergence to 1 on the corpus", ok);
}

void criterion_3_rate_check() {
    bool ok = true;

    // two-link degree-4 game: prices 1 + x^4 and 2 + 0.5 x^4
    Game g;
    int a = g.add_resource("a", PriceFunction::polynomial({1.0, 0.0, 0.0, 0.0, 1.0}));
    int b = g.add_resource("b", PriceFunction::polynomial({2.0, 0.0, 0.0, 0.0, 0.5}));
    int k = g.add_group("k");
    g.add_strategy(k, "s1", {{a, 1.0}});
    g.add_strategy(k, "s2", {{b, 1.0}});
    auto run = scale_poa(g, DemandPath::single({{1.0, Rat(1)}}), parse_grid("2:32:geometric:1.4142"));
    auto rep = convergence_report(run);
    ok &= expect(rep.phases[0].gamma_defined, "degree-4 fit undefined");
    if (!(rep.phases[0].gamma_hat >= 3.5 && rep.phases[0].gamma_hat <= 4.5)) {
        // diagnostic context: on same-degree parallel links the equilibrium
        // and optimal splits share one limit, so PoA - 1 decays at twice the
        // degree while the optimum-as-approximate-equilibrium eps decays at
        // the degree itself; report both fitted slopes
        std::vector<double> lx, ly;
        for (const auto& r : run.records)
            if (r.converged && r.eps_so > 0.0 && r.t >= 8.0) {
                lx.push_back(std::log(r.t));
                ly.push_back(std::log(r.eps_so));
            }
        auto eps_fit = ncg::detail::least_squares(lx, ly);
        ok &= expect(false, "degree-4 gamma_hat = " + std::to_string(rep.phases[0].gamma_hat) +
                                " (PoA-1 fit; eps_so decay fits " + std::to_string(-eps_fit.slope) +
                                ", matching the degree; the O(T^-4) upper bound holds)");
    }

    auto pigou_run = scale_poa(pigou(1.0), DemandPath::single({{1.0, Rat(1)}}),
                               parse_grid("1:16384:geometric"));
    auto pigou_rep = convergence_report(pigou_run);
    ok &= expect(pigou_rep.phases[0].gamma_defined, "pigou fit undefined");
    ok &= expect(pigou_rep.phases[0].gamma_hat >= 0.85 && pigou_rep.phases[0].gamma_hat <= 1.15,
                 "pigou gamma_hat = " + std::to_string(pigou_rep.phases[0].gamma_hat));
    report(3, "decay-rate estimates", ok);
}

void criterion_4_brute_force_oracle() {
    bool ok = true;
    int tested = 0;
    std::uint64_t seed = 0;
    while (tested < 20 && seed < 400) {
        ++seed;
        RandomGameSpec spec;
        spec.n_groups = 1 + static_cast<int>(seed % 2);
        spec.max_strategies_per_group = spec.n_groups == 1 ? 3 : 2;
        spec.n_resources = 4;
        spec.max_degree = 3;
        auto g = random_game(seed, spec);
        if (g.n_strategies() > 3 || g.n_strategies() < 2) continue;
        ++tested;

        detail::Rng rng(seed * 131 + 5);
        DemandVector d(static_cast<std::size_t>(g.n_groups()));
        for (auto& v : d) v = rng.uniform(0.5, 3.0);
        double t = total_demand(d);

        auto scan = oracle::grid_scan(g, d, 1e-4 * t);
        auto we = solve_wardrop(g, d);
        auto so = solve_so(g, d);
        ok &= expect(we.converged && so.converged, "seed " + std::to_string(seed) + ": no convergence");
        double we_cost = total_cost(g, we.profile);
        double so_cost = total_cost(g, so.profile);
        ok &= expect(std::abs(we_cost - scan.equilibrium_cost) <= 1e-3 * std::abs(scan.equilibrium_cost),
                     "seed " + std::to_string(seed) + ": WE cost " + std::to_string(we_cost) +
                         " vs grid " + std::to_string(scan.equilibrium_cost));
        ok &= expect(std::abs(so_cost - scan.optimal_cost) <= 1e-3 * std::abs(scan.optimal_cost),
                     "seed " + std::to_string(seed) + ": SO cost " + std::to_string(so_cost) +
                         " vs grid " + std::to_string(scan.optimal_cost));
    }
    ok &= expect(tested == 20, "only found " + std::to_string(tested) + " games with <= 3 strategies");
    report(4, "brute-force oracle agreement", ok);
}

void criterion_5_equilibrium_properties() {
    bool ok = true;
    std::mt19937_64 profile_rng(987654321);
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        RandomGameSpec spec;
        spec.n_groups = 1 + static_cast<int>(seed % 4);
        spec.max_strategies_per_group = 3;
        spec.n_resources = 5;
        spec.max_degree = 3;
        auto g = random_game(seed ^ 0xabcdef, spec);

        detail::Rng rng(seed * 7919 + 3);
        DemandVector d(static_cast<std::size_t>(g.n_groups()));
        for (auto& v : d) v = rng.uniform(0.2, 4.0);

        auto a = solve_wardrop(g, d);
        Profile spread(g.n_strategies(), 0.0);
        for (int k = 0; k < g.n_groups(); ++k)
            for (int s : g.strategies_of(k))
                spread[s] = d[k] / static_cast<double>(g.strategies_of(k).size());
        auto b = solve_wardrop(g, d, {}, &spread);
        ok &= expect(a.converged && b.converged, "seed " + std::to_string(seed) + ": WE not converged");
        double ca = total_cost(g, a.profile), cb = total_cost(g, b.profile);
        ok &= expect(std::abs(ca - cb) <= 1e-6 * std::max(std::abs(ca), 1e-30),
                     "seed " + std::to_string(seed) + ": two-start NE costs " + std::to_string(ca) +
                         " vs " + std::to_string(cb));

        ok &= expect(check_wardrop(g, d, a.profile).gap >= -1e-12, "negative gap (solved)");
        for (int rep = 0; rep < 3; ++rep)
            ok &= expect(check_wardrop(g, d, random_feasible(g, d, profile_rng)).gap >= -1e-12,
                         "negative gap (random profile)");

        auto so = solve_so(g, d);
        ok &= expect(so.converged, "seed " + std::to_string(seed) + ": SO not converged");
        double so_cost = total_cost(g, so.profile);
        for (int rep = 0; rep < 100; ++rep) {
            auto f = random_feasible(g, d, profile_rng);
            if (!(so_cost <= total_cost(g, f) + 1e-8)) {
                ok &= expect(false, "seed " + std::to_string(seed) + ": SO " + std::to_string(so_cost) +
                                        " beaten by a random profile " + std::to_string(total_cost(g, f)));
                break;
            }
        }
    }
    report(5, "equal NE cost, gap sign, SO dominance", ok);
}

void criterion_6_decomposition_prediction() {
    bool ok = true;
    auto g = double_limits();
    auto path = DemandPath::single({{1.0, Rat(2)}, {1.0, Rat(1)}});
    auto dec = asymptotic_decomposition(g, path);
    const auto& pd = dec.phases[0];
    ok &= expect(pd.levels.size() == 2, "expected two levels");
    ok &= expect(pd.levels[0].groups == std::vector<int>{0}, "K_0 should be the upper group");
    ok &= expect(pd.levels[0].alpha == Rat(1), "alpha_0 should be 1");
    ok &= expect(pd.levels[1].verdict == DecompositionLevel::Verdict::Negligible,
                 "lower level should be negligible");
    ok &= expect(pd.predicted_cost_exponent == Rat(4), "predicted growth exponent should be 4");

    auto run = scale_poa(g, path, parse_grid("1:512:geometric:1.4142"));
    auto rep = convergence_report(run, &dec);
    ok &= expect(rep.phases[0].measured_defined, "measured slope undefined");
    ok &= expect(std::abs(rep.phases[0].measured_cost_exponent - 4.0) <= 0.2,
                 "measured log-slope " + std::to_string(rep.phases[0].measured_cost_exponent));
    report(6, "decomposition prediction on double limits", ok);
}

void criterion_7_gauge_verdicts() {
    bool ok = true;
    auto p4 = pigou(4.0);
    auto single = DemandPath::single({{1.0, Rat(1)}});
    auto yes = gauge_check(p4, single, PowerLog{1.0, Rat(0), 0.0});
    ok &= expect(yes.gaugeable, "pigou(4) should be gaugeable with g = 1");
    ok &= expect(yes.q[0].kind == LimitKind::Infinite && yes.q[1].kind == LimitKind::Power,
                 "q verdicts with g = 1");
    auto no = gauge_check(p4, single, PowerLog{1.0, Rat(4), 0.0});
    ok &= expect(!no.gaugeable && !no.tight_group[0], "pigou(4) must not be gaugeable with g = x^4");

    auto g = double_limits();
    DemandPath alt({
        DemandPhase{2, 0, {{1.0, Rat(1)}, {0.0, Rat(0)}}},
        DemandPhase{2, 1, {{0.0, Rat(0)}, {1.0, Rat(1)}}},
    });
    std::set<std::pair<long, long>> seen;
    std::vector<PowerLog> candidates{{1.0, Rat(0), 0.0}};
    for (int a = 0; a < g.n_resources(); ++a) {
        auto key = asymptotic_key(g.price(a));
        if (key && seen.insert({key->index.num(), key->index.den()}).second)
            candidates.push_back({1.0, key->index, key->log_exponent});
    }
    for (const auto& gauge : candidates) {
        auto rep = gauge_check(g, alt, gauge);
        ok &= expect(!rep.gaugeable,
                     "alternating path should not be gaugeable with x^" + gauge.power.to_string());
    }
    ok &= expect(build_limit_game(g, alt, 0, Rat(1)).valid, "even phase limit game invalid");
    ok &= expect(build_limit_game(g, alt, 1, Rat(2)).valid, "odd phase limit game invalid");
    report(7, "gaugeability verdicts", ok);
}

void criterion_8_regvar_diagnostics() {
    bool ok = true;
    auto d = regvar_diagnostics(PriceFunction::power_log(1.0, Rat(2), 1.0));
    ok &= expect(std::abs(d.index_estimate - 2.0) <= 0.05,
                 "index estimate " + std::to_string(d.index_estimate));
    ok &= expect(std::abs(d.karamata_limit_estimate - 2.0) <= 0.05,
                 "karamata limit estimate " + std::to_string(d.karamata_limit_estimate));
    report(8, "regular-variation diagnostics", ok);
}

void criterion_9_ingestion() {
    bool ok = true;

    // toy round-trip
    std::string toy = "<NUMBER OF ZONES> 2\n<NUMBER OF NODES> 2\n<FIRST THRU NODE> 1\n"
                      "<NUMBER OF LINKS> 1\n<END OF METADATA>\n"
                      "1 2 1200.5 3 3 0.15 4 0 0 1 ;\n";
    auto toy_net = tntp::parse_net(toy);
    auto again = tntp::parse_net(tntp::write_net(toy_net));
    ok &= expect(tntp::write_net(again) == tntp::write_net(toy_net), "toy net round-trip drifted");

    std::string root = NCG_SOURCE_DIR;
    auto net = tntp::parse_net(read_file(root + "/data/siouxfalls_net.tntp"));
    auto trips = tntp::parse_trips(read_file(root + "/data/siouxfalls_trips.tntp"));
    auto reparsed = tntp::parse_net(tntp::write_net(net));
    ok &= expect(tntp::write_net(reparsed) == tntp::write_net(net), "sioux falls round-trip drifted");
    auto trips2 = tntp::parse_trips(tntp::write_trips(trips));
    ok &= expect(trips2.demand == trips.demand, "sioux falls trips round-trip drifted");

    ok &= expect(net.nodes == 24, "nodes = " + std::to_string(net.nodes));
    ok &= expect(net.links.size() == 76, "links = " + std::to_string(net.links.size()));
    ok &= expect(trips.positive_pairs() == 528,
                 "positive OD pairs = " + std::to_string(trips.positive_pairs()));

    auto start = std::chrono::steady_clock::now();
    auto res = enumerate_paths(net, trips, 4);
    ok &= expect(validate_game(res.game).ok(), "ingested game fails validation");
    ok &= expect(res.game.n_groups() == 528, "group per positive OD pair");

    SolverConfig cfg;
    cfg.gap_tolerance = 1e-6;
    cfg.max_iterations = 2000000;
    cfg.record_objective = false;
    auto we = solve_wardrop(res.game, res.demand, cfg);
    double elapsed = seconds_since(start);
    ok &= expect(we.converged && we.gap <= 1e-6,
                 "WE gap " + std::to_string(we.gap) + " converged=" + std::to_string(we.converged));
    ok &= expect(elapsed < 60.0, "ingestion+WE took " + std::to_string(elapsed) + "s");
    report(9, "TNTP ingestion and equilibrium", ok);
}

}  // namespace

int main() {
    criterion_1_pigou_exactness();
    criterion_2_convergence_to_one();
    criterion_3_rate_check();
    criterion_4_brute_force_oracle();
    criterion_5_equilibrium_properties();
    criterion_6_decomposition_prediction();
    criterion_7_gauge_verdicts();
    criterion_8_regvar_diagnostics();
    criterion_9_ingestion();
    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all acceptance criteria passed\n");
    return 0;
}
