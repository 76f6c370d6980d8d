#include <gtest/gtest.h>

#include <map>

#include "coarse/generators.hpp"
#include "coarse/random.hpp"
#include "oracles.hpp"

using namespace coarse;

namespace {

std::vector<std::pair<Vertex, Vertex>> edge_pairs(const FiniteGraph& g) {
    std::vector<std::pair<Vertex, Vertex>> out;
    for (const auto& e : g.edges()) out.emplace_back(std::min(e.u, e.v), std::max(e.u, e.v));
    std::sort(out.begin(), out.end());
    return out;
}

// Composition of raw permutation tables, right to left, independent of
// PermAction::apply.
std::vector<Vertex> word_table(const std::vector<std::vector<Vertex>>& gens, const Word& w) {
    const std::size_t n = gens.front().size();
    std::vector<std::vector<Vertex>> inv(gens.size(), std::vector<Vertex>(n));
    for (std::size_t s = 0; s < gens.size(); ++s)
        for (Vertex x = 0; x < n; ++x) inv[s][gens[s][x]] = x;
    std::vector<Vertex> out(n);
    for (Vertex y = 0; y < n; ++y) {
        Vertex z = y;
        for (std::size_t i = w.size(); i-- > 0;) {
            const int l = w[i];
            z = l > 0 ? gens[l - 1][z] : inv[-l - 1][z];
        }
        out[y] = z;
    }
    return out;
}

}  // namespace

TEST(Generators, CycleOfFour) {
    EXPECT_EQ(edge_pairs(cycle_graph(4)), (std::vector<std::pair<Vertex, Vertex>>{{0, 1}, {0, 3}, {1, 2}, {2, 3}}));
}

TEST(Generators, RandomRegularDegrees) {
    auto g = random_regular_graph(10, 3, 7);
    for (Vertex v = 0; v < g.size(); ++v) EXPECT_EQ(g.degree(v), 3u);
    EXPECT_EQ(g.edge_count(), 15u);
}

TEST(Generators, RandomRegularIsSeedDeterministic) {
    EXPECT_EQ(random_regular_graph(60, 3, 11), random_regular_graph(60, 3, 11));
    EXPECT_FALSE(random_regular_graph(60, 3, 11) == random_regular_graph(60, 3, 12));
}

TEST(Generators, RandomRegularRejectsOddDegreeSum) {
    EXPECT_THROW(random_regular_graph(7, 3, 1), std::invalid_argument);
}

TEST(Generators, Torus3x3) {
    auto g = torus_graph(3, 3);
    EXPECT_EQ(g.size(), 9u);
    for (Vertex v = 0; v < 9; ++v) EXPECT_EQ(g.degree(v), 4u);
    EXPECT_EQ(diameter(g), 2u);
}

TEST(Generators, StarAndComplete) {
    auto s = star_graph(5);
    EXPECT_EQ(s.size(), 6u);
    EXPECT_EQ(s.degree(0), 5u);
    auto k = complete_graph(5);
    EXPECT_EQ(k.edge_count(), 10u);
}

TEST(Generators, ParseSpec) {
    auto spec = parse_graph_spec("random_regular 10 3 7");
    EXPECT_EQ(spec.family, Family::random_regular);
    EXPECT_EQ(generate(spec), random_regular_graph(10, 3, 7));
    EXPECT_EQ(generate(parse_graph_spec("torus 3 4")), torus_graph(3, 4));
    EXPECT_THROW(parse_graph_spec("moebius 4"), std::invalid_argument);
}

TEST(Girth, KnownValues) {
    EXPECT_EQ(girth(cycle_graph(5)), 5u);
    EXPECT_EQ(girth(path_graph(10)), kInfiniteGirth);
    EXPECT_EQ(girth(complete_graph(4)), 3u);
    EXPECT_EQ(girth(torus_graph(4, 4)), 4u);
}

TEST(Girth, MatchesShortestCycleThroughEdges) {
    // girth = min over edges uv of 1 + dist(u, v) without the edge
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 4 + rng() % 12;
        auto edges = oracle::random_connected(n, rng() % n, rng);
        auto g = FiniteGraph::from_edges(n, edges);
        unsigned best = oracle::kInf;
        for (std::size_t drop = 0; drop < edges.size(); ++drop) {
            auto rest = edges;
            rest.erase(rest.begin() + static_cast<long>(drop));
            auto d = oracle::floyd_warshall(n, rest);
            best = std::min(best, d[edges[drop].u][edges[drop].v] + 1);
        }
        const std::size_t expected = best >= oracle::kInf ? kInfiniteGirth : best;
        ASSERT_EQ(girth(g), expected);
    }
}

TEST(Schreier, CyclicShiftGivesCycle) {
    auto sg = schreier_graph(PermAction::cyclic_shift(5));
    EXPECT_EQ(edge_pairs(sg.graph), edge_pairs(cycle_graph(5)));
    EXPECT_EQ(sg.labels.size(), 5u);
}

TEST(Schreier, GridShiftsGiveTorus) {
    auto sg = schreier_graph(PermAction::grid_shifts(3, 3));
    EXPECT_EQ(edge_pairs(sg.graph), edge_pairs(torus_graph(3, 3)));
}

TEST(Schreier, IdentityGeneratorIsDisconnected) {
    PermAction a(4, {{0, 1, 2, 3}});
    EXPECT_THROW(schreier_graph(a), GraphError);
}

TEST(Schreier, RejectsNonBijection) {
    EXPECT_THROW(PermAction(3, {{0, 0, 1}}), GraphError);
}

TEST(Words, FreeReduction) {
    EXPECT_EQ(free_reduce({1, -1}), Word{});
    EXPECT_EQ(free_reduce({1, 2, -2, -1, 3}), Word{3});
    EXPECT_EQ(free_reduce({1, 1}), (Word{1, 1}));
}

TEST(Words, CountUpToLength) {
    // 2k words of length 1, 2k(2k-1) of length 2
    EXPECT_EQ(words_up_to(2, 2).size(), 4u + 12u);
    for (const auto& w : words_up_to(3, 3)) EXPECT_EQ(free_reduce(w), w);
}

TEST(Words, ApplyIsRightToLeft) {
    PermAction a(3, {{1, 2, 0}, {0, 2, 1}});
    // word "1 2" applies generator 2 first
    EXPECT_EQ(a.apply({1, 2}, 1), a.apply_letter(1, a.apply_letter(2, 1)));
    EXPECT_EQ(a.apply({1, -1}, 2), 2u);
}

TEST(Injectivity, ExactShiftIsFree) {
    auto rep = injectivity_report(PermAction::cyclic_shift(100), {{1}, {1, 1}, {-1}});
    EXPECT_EQ(rep.epsilon(), 0.0);
    EXPECT_EQ(rep.good, 100u);
}

TEST(Injectivity, IdentityGeneratorFailsEverywhere) {
    PermAction a(6, {{0, 1, 2, 3, 4, 5}});
    auto rep = injectivity_report(a, {{1}});
    EXPECT_EQ(rep.epsilon(), 1.0);
    EXPECT_EQ(rep.freeness_failures, 6u);
}

TEST(Injectivity, RandomPairGoldenAndBruteForce) {
    auto a = PermAction::random(50, 2, 2024);
    const auto words = words_up_to(2, 2);
    auto rep = injectivity_report(a, words);

    std::vector<std::vector<Vertex>> gens{a.generator(0), a.generator(1)};
    std::size_t good = 0;
    for (Vertex y = 0; y < 50; ++y) {
        bool ok = true;
        for (const auto& g : words) {
            const auto pg = word_table(gens, g);
            if (!free_reduce(g).empty() && pg[y] == y) ok = false;
            for (const auto& h : words) {
                const auto ph = word_table(gens, h);
                if (pg[ph[y]] != word_table(gens, concat(g, h))[y]) ok = false;
            }
        }
        good += ok;
    }
    EXPECT_EQ(rep.good, good);
    EXPECT_EQ(rep.multiplicativity_failures, 0u);
    EXPECT_EQ(rep.good, 42u);  // golden, seed 2024
}

TEST(Random, BelowIsInRangeAndDeterministic) {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) {
        const auto x = a.below(7);
        ASSERT_LT(x, 7u);
        ASSERT_EQ(x, b.below(7));
    }
    std::map<std::uint64_t, int> hist;
    Rng c(1);
    for (int i = 0; i < 70000; ++i) ++hist[c.below(7)];
    for (auto [v, count] : hist) EXPECT_NEAR(count, 10000, 500);
}
