#include <doctest.h>

#include <cmath>

#include "srl/congestion.hpp"
#include "srl/errors.hpp"
#include "srl/game.hpp"
#include "srl/noise.hpp"
#include "srl/rng.hpp"

using namespace srl;

namespace {

// Small deterministic game generator for property checks.
Game random_game(std::uint64_t seed, int n1, int n2) {
    TrajectoryRng rng{seed, 0};
    std::vector<double> a(n1 * n2), b(n1 * n2);
    for (int i = 0; i < n1 * n2; ++i) {
        a[i] = rng.normal(0, i);
        b[i] = rng.normal(1, i);
    }
    return Game::two_player(n1, n2, a, b);
}

MixedProfile random_profile(const Game& game, std::uint64_t seed) {
    TrajectoryRng rng{seed, 1};
    MixedProfile x(game.players());
    int coord = 0;
    for (int k = 0; k < game.players(); ++k) {
        x[k].resize(game.num_actions(k));
        double sum = 0.0;
        for (double& v : x[k]) {
            v = -std::log(rng.uniform(7, coord++));
            sum += v;
        }
        for (double& v : x[k]) v /= sum;
    }
    return x;
}

}  // namespace

TEST_CASE("payoff vector on matching pennies") {
    const Game mp = matching_pennies();

    SUBCASE("uniform opponent zeroes the payoffs") {
        const auto v = mp.payoff_vector(0, uniform_profile(mp));
        CHECK(v[0] == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(v[1] == doctest::Approx(0.0).epsilon(1e-15));
    }
    SUBCASE("pure heads opponent") {
        const auto v = mp.payoff_vector(0, pure_profile(mp, {0, 0}));
        CHECK(v[0] == doctest::Approx(1.0));
        CHECK(v[1] == doctest::Approx(-1.0));
    }
}

TEST_CASE("single-player payoff vector is the payoff row") {
    const Game g = single_player({0.0, 1.0});
    const auto v = g.payoff_vector(0, {{0.3, 0.7}});
    CHECK(v[0] == 0.0);
    CHECK(v[1] == 1.0);
}

TEST_CASE("expected payoff identities") {
    const Game mp = matching_pennies();
    CHECK(mp.expected_payoff(0, uniform_profile(mp)) == doctest::Approx(0.0));

    // Zero-sum: u1 + u2 = 0 at random profiles.
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto x = random_profile(mp, s);
        CHECK(mp.expected_payoff(0, x) + mp.expected_payoff(1, x) ==
              doctest::Approx(0.0).epsilon(1e-12));
    }

    const Game degenerate({1, 1}, {{3.25}, {-7.5}});
    CHECK(degenerate.expected_payoff(0, uniform_profile(degenerate)) == 3.25);
}

TEST_CASE("expected payoff equals <payoff_vector, own strategy> bit for bit") {
    for (std::uint64_t s = 0; s < 30; ++s) {
        const Game g = random_game(s, 2 + s % 3, 2 + (s / 3) % 3);
        const auto x = random_profile(g, s + 100);
        for (int k = 0; k < g.players(); ++k) {
            const auto v = g.payoff_vector(k, x);
            double dot = 0.0;
            for (int a = 0; a < g.num_actions(k); ++a) dot += v[a] * x[k][a];
            CHECK(g.expected_payoff(k, x) == dot);
        }
    }
}

TEST_CASE("payoff vector is affine in each opponent component") {
    for (std::uint64_t s = 0; s < 25; ++s) {
        const Game g = random_game(s + 40, 3, 2);
        const auto xa = random_profile(g, 3 * s);
        const auto xb = random_profile(g, 3 * s + 1);
        const double lam = 0.37;
        for (int k = 0; k < 2; ++k) {
            const int j = 1 - k;  // vary the opponent's component only
            MixedProfile mix = xa;
            for (int a = 0; a < g.num_actions(j); ++a)
                mix[j][a] = lam * xa[j][a] + (1.0 - lam) * xb[j][a];
            MixedProfile other = xa;
            other[j] = xb[j];
            const auto v_mix = g.payoff_vector(k, mix);
            const auto v_a = g.payoff_vector(k, xa);
            const auto v_b = g.payoff_vector(k, other);
            for (int a = 0; a < g.num_actions(k); ++a)
                CHECK(v_mix[a] ==
                      doctest::Approx(lam * v_a[a] + (1.0 - lam) * v_b[a]).epsilon(1e-10));
        }
    }
}

TEST_CASE("nash gap") {
    const Game mp = matching_pennies();
    CHECK(nash_gap(mp, uniform_profile(mp)) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(nash_gap(mp, pure_profile(mp, {0, 0})) == doctest::Approx(2.0));

    const Game coord = coordination_2x2();
    CHECK(nash_gap(coord, pure_profile(coord, {0, 0})) == doctest::Approx(0.0));

    // Nonnegative everywhere.
    for (std::uint64_t s = 0; s < 40; ++s) {
        const Game g = random_game(s + 7, 2, 3);
        CHECK(nash_gap(g, random_profile(g, s)) >= 0.0);
    }
}

TEST_CASE("strict equilibrium predicate") {
    const Game coord = coordination_2x2(2.0, 1.0);
    CHECK(is_strict_nash(coord, {0, 0}));
    CHECK(is_strict_nash(coord, {1, 1}));
    CHECK_FALSE(is_strict_nash(coord, {0, 1}));

    const Game mp = matching_pennies();
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) CHECK_FALSE(is_strict_nash(mp, {a, b}));

    const Game trivial({1, 1}, {{0.0}, {0.0}});
    CHECK(is_strict_nash(trivial, {0, 0}));  // no deviations available
}

TEST_CASE("dominance margins") {
    SUBCASE("single player constant gap") {
        const Game g = single_player({0.0, 1.0});
        const auto d = dominance_margin(g, 0, 0, 1);
        CHECK(d.margin == doctest::Approx(1.0));
        CHECK_FALSE(d.degenerate);
    }
    SUBCASE("prisoners dilemma: cooperate dominated with margin 1") {
        const Game pd = prisoners_dilemma();
        CHECK(dominance_margin(pd, 0, 0, 1).margin == doctest::Approx(1.0));
        CHECK(dominance_margin(pd, 1, 0, 1).margin == doctest::Approx(1.0));
    }
    SUBCASE("matching pennies has no dominance") {
        const Game mp = matching_pennies();
        CHECK(dominance_margin(mp, 0, 0, 1).margin <= 0.0);
        CHECK(dominance_margin(mp, 0, 1, 0).margin <= 0.0);
    }
    SUBCASE("degenerate pair flagged") {
        const Game mp = matching_pennies();
        const auto d = dominance_margin(mp, 0, 1, 1);
        CHECK(d.degenerate);
        CHECK(d.margin == 0.0);
    }
    SUBCASE("positive margin implies negative reverse margin") {
        for (std::uint64_t s = 0; s < 40; ++s) {
            const Game g = random_game(s + 900, 3, 3);
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) {
                    if (a == b) continue;
                    if (dominance_margin(g, 0, a, b).margin > 0.0)
                        CHECK(dominance_margin(g, 0, b, a).margin < 0.0);
                }
        }
    }
    SUBCASE("mixed dominance agrees with pure on vertex strategies") {
        const Game pd = prisoners_dilemma();
        CHECK(mixed_dominance_margin(pd, 0, {1.0, 0.0}, {0.0, 1.0}) ==
              doctest::Approx(1.0));
    }
}

TEST_CASE("iterated elimination") {
    SUBCASE("prisoners dilemma solves to defect/defect") {
        const auto survivors = iterated_dominance_survivors(prisoners_dilemma());
        REQUIRE(survivors[0].size() == 1);
        REQUIRE(survivors[1].size() == 1);
        CHECK(survivors[0][0] == 1);
        CHECK(survivors[1][0] == 1);
    }
    SUBCASE("cascading elimination rounds") {
        // Column's middle action falls first; that exposes the row's second
        // action, whose removal in turn dominates the last column.
        std::vector<double> a = {3.0, 0.0, 3.0,
                                 2.0, 5.0, 2.0};
        std::vector<double> b = {2.0, 0.0, 1.0,
                                 1.0, 0.5, 2.0};
        const Game g = Game::two_player(2, 3, a, b);
        const auto survivors = iterated_dominance_survivors(g);
        CHECK(survivors[0] == std::vector<int>{0});
        CHECK(survivors[1] == std::vector<int>{0});
    }
    SUBCASE("matching pennies keeps everything") {
        const auto survivors = iterated_dominance_survivors(matching_pennies());
        CHECK(survivors[0].size() == 2);
        CHECK(survivors[1].size() == 2);
    }
}

TEST_CASE("profile sanitation") {
    const Game mp = matching_pennies();
    SUBCASE("tiny negatives are clamped") {
        const auto x = sanitize_profile(mp, {{1.0 + 1e-16, -1e-16}, {0.5, 0.5}});
        CHECK(x[0][1] == 0.0);
        CHECK(x[0][0] == doctest::Approx(1.0));
    }
    SUBCASE("real negatives are rejected") {
        CHECK_THROWS_AS(sanitize_profile(mp, {{1.1, -0.1}, {0.5, 0.5}}), ConfigError);
    }
    SUBCASE("bad sums are rejected") {
        CHECK_THROWS_AS(sanitize_profile(mp, {{0.6, 0.6}, {0.5, 0.5}}), ConfigError);
    }
}

TEST_CASE("game construction guards") {
    CHECK_THROWS_AS(Game({2, 2}, {{1.0, 2.0, 3.0}, {0, 0, 0, 0}}), ConfigError);
    CHECK_THROWS_AS(Game({2}, {{1.0, std::nan("")}}), ConfigError);
    // Zero-sum flag is checked entrywise.
    CHECK_THROWS_AS(Game({2, 2}, {{1, -1, -1, 1}, {-1, 1, 1, -0.5}}, true), ConfigError);
}

TEST_CASE("congestion game construction") {
    SUBCASE("two-route network payoffs") {
        const CongestionGame cg = build_congestion_game(two_route_network(1.0));
        // Shared route doubles the delay.
        CHECK(cg.game.payoff(0, {0, 0}) == doctest::Approx(-2.0));
        CHECK(cg.game.payoff(0, {0, 1}) == doctest::Approx(-1.0));
        CHECK(cg.game.payoff(1, {0, 1}) == doctest::Approx(-1.0));
        CHECK(is_strict_nash(cg.game, {0, 1}));
        CHECK(is_strict_nash(cg.game, {1, 0}));

        // Same-edge coordinates are perfectly correlated; opposite edges not.
        CHECK(cg.covariance_at(0, 2) == doctest::Approx(1.0));
        CHECK(cg.covariance_at(0, 3) == doctest::Approx(0.0));
        CHECK(cg.covariance_at(0, 0) == doctest::Approx(1.0));
    }
    SUBCASE("shared edge covariance") {
        const CongestionGame cg = build_congestion_game(shared_edge_network(1.0, 1.0, 1.0));
        // Paths {shared, fast} and {shared, slow}: one common unit-noise edge.
        CHECK(cg.covariance_at(0, 1) == doctest::Approx(1.0));
        CHECK(cg.covariance_at(0, 0) == doctest::Approx(2.0));
        CHECK(cg.covariance_at(1, 1) == doctest::Approx(2.0));
        // Dominated slow route with margin 1.
        CHECK(cg.game.payoff(0, {0}) == doctest::Approx(-1.0));
        CHECK(cg.game.payoff(0, {1}) == doctest::Approx(-2.0));
        CHECK(dominance_margin(cg.game, 0, 1, 0).margin == doctest::Approx(1.0));
    }
    SUBCASE("identical paths accumulate the full variance") {
        CongestionNetwork net;
        net.edges = {{"a", 0.0, 1.0, 0.5}, {"b", 0.0, 1.0, 2.0}};
        net.paths = {{{0, 1}, {0, 1}}};
        const CongestionGame cg = build_congestion_game(net);
        CHECK(cg.covariance_at(0, 0) == doctest::Approx(0.25 + 4.0));
        CHECK(cg.covariance_at(0, 1) == doctest::Approx(0.25 + 4.0));
    }
    SUBCASE("incidence matrix marks path membership") {
        const CongestionNetwork net = shared_edge_network();
        const auto inc = net.incidence_matrix();
        CHECK(inc[0][0] == 1);  // shared edge on both paths
        CHECK(inc[0][1] == 1);
        CHECK(inc[1][0] == 1);  // fast edge only on path 0
        CHECK(inc[1][1] == 0);
        CHECK(inc[2][1] == 1);
    }
    SUBCASE("covariance of random networks is symmetric psd") {
        // The correlated noise factorization rejects anything with an
        // eigenvalue below -1e-10, so construction doubles as the PSD check.
        TrajectoryRng rng{321, 0};
        for (std::uint64_t s = 0; s < 50; ++s) {
            CongestionNetwork net;
            const int n_edges = 2 + static_cast<int>(s % 4);
            for (int r = 0; r < n_edges; ++r)
                net.edges.push_back({"e" + std::to_string(r), rng.uniform(s, r),
                                     rng.uniform(s, 10 + r), 2.0 * rng.uniform(s, 20 + r)});
            const int n_players = 1 + static_cast<int>(s % 2);
            net.paths.resize(n_players);
            for (int k = 0; k < n_players; ++k)
                for (int a = 0; a < 2; ++a) {
                    std::vector<int> path;
                    for (int r = 0; r < n_edges; ++r)
                        if (rng.uniform(s, 30 + 8 * k + 4 * a + r) < 0.6)
                            path.push_back(r);
                    if (path.empty()) path.push_back(static_cast<int>(s) % n_edges);
                    net.paths[k].push_back(path);
                }
            const CongestionGame cg = build_congestion_game(net);
            for (int i = 0; i < cg.dim; ++i)
                for (int j = 0; j < cg.dim; ++j)
                    CHECK(cg.covariance_at(i, j) == cg.covariance_at(j, i));
            CHECK_NOTHROW(NoiseModel::correlated(cg.covariance, cg.dim));
        }
    }
    SUBCASE("validation rejects bad networks") {
        CongestionNetwork empty_path;
        empty_path.edges = {{"a", 0.0, 1.0, 0.0}};
        empty_path.paths = {{{}}};
        CHECK_THROWS_AS(build_congestion_game(empty_path), ConfigError);

        CongestionNetwork negative_sigma;
        negative_sigma.edges = {{"a", 0.0, 1.0, -1.0}};
        negative_sigma.paths = {{{0}}};
        CHECK_THROWS_AS(build_congestion_game(negative_sigma), ConfigError);
    }
}
