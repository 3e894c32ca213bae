#include <catch2/catch_amalgamated.hpp>

#include "ncg/analysis.hpp"
#include "ncg/harness.hpp"

#include <set>

using namespace ncg;
using Catch::Matchers::WithinAbs;

namespace {

DemandPath alternating_path() {
    return DemandPath({
        DemandPhase{2, 0, {{1.0, Rat(1)}, {0.0, Rat(0)}}},
        DemandPhase{2, 1, {{0.0, Rat(0)}, {1.0, Rat(1)}}},
    });
}

}  // namespace

TEST_CASE("double-limits decomposition under d = (n^2, n)") {
    auto g = double_limits();
    auto path = DemandPath::single({{1.0, Rat(2)}, {1.0, Rat(1)}});
    auto rep = asymptotic_decomposition(g, path);
    REQUIRE(rep.phases.size() == 1);
    const auto& pd = rep.phases[0];
    REQUIRE(pd.levels.size() == 2);

    CHECK(pd.levels[0].groups == std::vector<int>{0});  // upper first
    CHECK(pd.levels[0].alpha == Rat(1));
    CHECK(pd.levels[0].t_exponent == Rat(2));
    CHECK(pd.levels[0].scaling_exponent == Rat(2));
    CHECK(pd.levels[0].cost_exponent == Rat(4));
    CHECK(pd.levels[0].verdict == DecompositionLevel::Verdict::Base);

    CHECK(pd.levels[1].groups == std::vector<int>{1});
    CHECK(pd.levels[1].alpha == Rat(2));
    CHECK(pd.levels[1].t_exponent == Rat(1));
    CHECK(pd.levels[1].scaling_exponent == Rat(2));  // equal scalings: beta finite
    CHECK(pd.levels[1].verdict == DecompositionLevel::Verdict::Negligible);

    CHECK(pd.predicted_cost_exponent == Rat(4));
}

TEST_CASE("equal degrees collapse to a single level") {
    auto g = all_degree_equal();
    auto path = DemandPath::single({{1.0, Rat(1)}, {1.0, Rat(1)}});
    auto rep = asymptotic_decomposition(g, path);
    REQUIRE(rep.phases.size() == 1);
    REQUIRE(rep.phases[0].levels.size() == 1);
    CHECK(rep.phases[0].levels[0].groups == std::vector<int>{0, 1});
    CHECK(rep.phases[0].levels[0].alpha == Rat(1));
    CHECK(rep.phases[0].predicted_cost_exponent == Rat(2));
}

TEST_CASE("single group decomposes trivially") {
    auto g = pigou(4.0);
    auto path = DemandPath::single({{2.0, Rat(1)}});
    auto rep = asymptotic_decomposition(g, path);
    REQUIRE(rep.phases[0].levels.size() == 1);
    CHECK(rep.phases[0].levels[0].groups == std::vector<int>{0});
    CHECK(rep.phases[0].levels[0].alpha == Rat(0));  // the constant link caps the group degree
}

TEST_CASE("an independent second level appears when the slow group has low degree") {
    // fast group: degree 0 (constant cheapest); slow group: degree 2.
    // d = (n^2, n): level 0 scaling n^0, level 1 scaling (n)^2 -> independent.
    Game g;
    int c = g.add_resource("c", PriceFunction::constant(1.0));
    int q = g.add_resource("q", PriceFunction::polynomial({0.0, 0.0, 1.0}));
    int fast = g.add_group("fast");
    g.add_strategy(fast, "fc", {{c, 1.0}});
    int slow = g.add_group("slow");
    g.add_strategy(slow, "sq", {{q, 1.0}});
    auto path = DemandPath::single({{1.0, Rat(2)}, {1.0, Rat(1)}});
    auto rep = asymptotic_decomposition(g, path);
    REQUIRE(rep.phases[0].levels.size() == 2);
    CHECK(rep.phases[0].levels[0].alpha == Rat(0));
    CHECK(rep.phases[0].levels[1].alpha == Rat(2));
    CHECK(rep.phases[0].levels[1].scaling_exponent == Rat(2));
    CHECK(rep.phases[0].levels[1].verdict == DecompositionLevel::Verdict::Independent);
    // level-1 cost n^3 dominates level-0 cost n^2
    CHECK(rep.phases[0].predicted_cost_exponent == Rat(3));
}

TEST_CASE("alternating path decomposes per phase") {
    auto g = double_limits();
    auto rep = asymptotic_decomposition(g, alternating_path());
    REQUIRE(rep.phases.size() == 2);
    // even phase: only the upper group grows; the lower has zero demand
    REQUIRE(rep.phases[0].levels.size() == 2);
    CHECK(rep.phases[0].levels[0].groups == std::vector<int>{0});
    CHECK(rep.phases[0].levels[1].verdict == DecompositionLevel::Verdict::ZeroDemand);
    CHECK(rep.phases[0].predicted_cost_exponent == Rat(2));
    // odd phase: alpha_0 = 2 from the lower group, and the idle upper group
    // falls into K_0 as well since its degree 1 <= alpha_0
    REQUIRE(rep.phases[1].levels.size() == 1);
    CHECK(rep.phases[1].levels[0].groups == std::vector<int>{0, 1});
    CHECK(rep.phases[1].levels[0].alpha == Rat(2));
    CHECK(rep.phases[1].predicted_cost_exponent == Rat(3));
}

TEST_CASE("decomposition partitions the groups with increasing degrees") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        auto g = random_game(seed, {4, 3, 6, 4});
        // demands with varied exponents per group
        std::vector<PowerTerm> terms;
        detail::Rng rng(seed * 77 + 1);
        for (int k = 0; k < g.n_groups(); ++k)
            terms.push_back({rng.uniform(0.5, 2.0), Rat(1 + rng.below(3), 1 + rng.below(2))});
        auto path = DemandPath::single(terms);
        auto rep = asymptotic_decomposition(g, path);
        const auto& pd = rep.phases[0];
        std::set<int> seen;
        Rat prev_alpha(-1);
        for (const auto& lv : pd.levels) {
            CHECK(prev_alpha < lv.alpha);
            prev_alpha = lv.alpha;
            for (int k : lv.groups) CHECK(seen.insert(k).second);
        }
        CHECK(static_cast<int>(seen.size()) == g.n_groups());
    }
}

TEST_CASE("pigou gauge verdicts") {
    auto g = pigou(4.0);
    auto path = DemandPath::single({{1.0, Rat(1)}});

    auto ok = gauge_check(g, path, PowerLog{1.0, Rat(0), 0.0});
    CHECK(ok.q[0].kind == LimitKind::Infinite);
    CHECK(ok.q[1].kind == LimitKind::Power);
    CHECK_THAT(ok.q[1].value, WithinAbs(1.0, 1e-12));
    CHECK(ok.tight_group[0]);
    CHECK(ok.g1);
    CHECK(ok.g2);
    CHECK(ok.g3);
    CHECK(ok.gaugeable);

    auto bad = gauge_check(g, path, PowerLog{1.0, Rat(4), 0.0});
    CHECK(bad.q[0].kind == LimitKind::Power);
    CHECK(bad.q[1].kind == LimitKind::Zero);
    CHECK_FALSE(bad.tight_group[0]);  // min over strategies hits the zero side
    CHECK_FALSE(bad.g3);
    CHECK_FALSE(bad.gaugeable);
}

TEST_CASE("the alternating example is scalable but not gaugeable") {
    auto g = double_limits();
    auto path = alternating_path();

    // each phase admits a valid limit game
    CHECK(build_limit_game(g, path, 0, Rat(1)).valid);
    CHECK(build_limit_game(g, path, 1, Rat(2)).valid);

    // but no gauge built from the game's parameters passes G1-G3 on the path
    std::vector<PowerLog> candidates;
    for (int a = 0; a < g.n_resources(); ++a) {
        auto key = asymptotic_key(g.price(a));
        REQUIRE(key.has_value());
        candidates.push_back(PowerLog{1.0, key->index, key->log_exponent});
    }
    candidates.push_back(PowerLog{1.0, Rat(0), 0.0});
    for (const auto& gauge : candidates) {
        auto rep = gauge_check(g, path, gauge);
        INFO("gauge x^" << gauge.power.to_string());
        CHECK_FALSE(rep.gaugeable);
    }
}

TEST_CASE("find_gauge locates subset gauges") {
    auto g = double_limits();

    auto up = find_gauge(g, {0});
    REQUIRE(up.has_value());
    CHECK(up->power == Rat(1));

    auto low = find_gauge(g, {1});
    REQUIRE(low.has_value());
    CHECK(low->power == Rat(2));

    // for both groups together, x^1 fails G2' on the lower group; x^2 works
    // (upper strategies drop to q = 0, which G2' allows, and the lower group
    // provides the positive finite side for G3')
    auto both = find_gauge(g, {0, 1});
    REQUIRE(both.has_value());
    CHECK(both->power == Rat(2));

    auto p = pigou(4.0);
    auto pg = find_gauge(p, {0});
    REQUIRE(pg.has_value());
    CHECK(pg->power == Rat(0));
}

TEST_CASE("subset gauge checks distinguish G2' and G3'") {
    auto g = double_limits();
    // gauge x^1: lower group has no finite strategy -> G2' fails on {1}
    auto r1 = gauge_check_subset(g, {1}, PowerLog{1.0, Rat(1), 0.0});
    CHECK_FALSE(r1.g2p);
    // gauge x^2: all upper strategies go to zero -> G2' holds, G3' fails on {0}
    auto r2 = gauge_check_subset(g, {0}, PowerLog{1.0, Rat(2), 0.0});
    CHECK(r2.g2p);
    CHECK_FALSE(r2.g3p);
}
