#include <gtest/gtest.h>

#include <random>

#include "coarse/generators.hpp"
#include "coarse/graph.hpp"
#include "oracles.hpp"

using namespace coarse;

TEST(Bfs, CycleOfFour) {
    auto g = cycle_graph(4);
    EXPECT_EQ(bfs_distances(g, 0), (std::vector<Distance>{0, 1, 2, 1}));
}

TEST(Bfs, PathOfThree) {
    auto g = path_graph(3);
    EXPECT_EQ(bfs_distances(g, 0), (std::vector<Distance>{0, 1, 2}));
}

TEST(Bfs, Torus3x3) {
    auto g = torus_graph(3, 3);
    auto d = bfs_distances(g, 0);
    EXPECT_EQ(*std::max_element(d.begin(), d.end()), 2u);
    EXPECT_EQ(d[1 * 3 + 1], 2u);
}

TEST(Bfs, SourceOutOfRange) {
    auto g = cycle_graph(4);
    EXPECT_THROW(bfs_distances(g, 4), std::out_of_range);
}

TEST(Bfs, MatchesFloydWarshallOnRandomGraphs) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 2 + rng() % 30;
        auto edges = oracle::random_connected(n, rng() % (2 * n), rng);
        auto g = FiniteGraph::from_edges(n, edges);
        auto fw = oracle::floyd_warshall(n, edges);
        DistanceMatrix dm(g);
        for (Vertex s = 0; s < n; ++s) {
            auto d = bfs_distances(g, s);
            for (Vertex t = 0; t < n; ++t) {
                ASSERT_EQ(d[t], fw[s][t]);
                ASSERT_EQ(dm(s, t), fw[s][t]);
            }
        }
    }
}

TEST(Bfs, AliveMaskRestrictsPaths) {
    auto g = cycle_graph(6);
    std::vector<char> alive{1, 0, 1, 1, 1, 1};
    auto d = bfs_distances(g, 0, alive);
    EXPECT_EQ(d[2], 4u);
    EXPECT_EQ(d[1], kUnreachable);
}

TEST(Ball, CycleOfFiveRadiusOne) {
    EXPECT_EQ(ball(cycle_graph(5), 0, 1), (std::vector<Vertex>{0, 1, 4}));
}

TEST(Ball, RadiusZeroIsCentre) {
    auto g = torus_graph(4, 5);
    for (Vertex x = 0; x < g.size(); ++x) EXPECT_EQ(ball(g, x, 0), std::vector<Vertex>{x});
}

TEST(Ball, LargeRadiusCoversEverything) {
    EXPECT_EQ(ball(cycle_graph(5), 0, 3).size(), 5u);
}

TEST(Ball, SizeBoundHolds) {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 5 + rng() % 40;
        auto g = FiniteGraph::from_edges(n, oracle::random_connected(n, n, rng));
        for (Distance R = 0; R < 5; ++R)
            for (Vertex x = 0; x < n; ++x) ASSERT_LE(ball(g, x, R).size(), ball_size_bound(g.degree_bound(), R));
    }
}

TEST(Diameter, KnownValues) {
    EXPECT_EQ(diameter(cycle_graph(6)), 3u);
    EXPECT_EQ(diameter(complete_graph(4)), 1u);
    EXPECT_EQ(diameter(path_graph(10)), 9u);
    EXPECT_EQ(diameter(FiniteGraph(1, {}, 0)), 0u);
}

TEST(FiniteGraph, RejectsInvalidInput) {
    std::vector<Edge> loop{{0, 0}};
    EXPECT_THROW(FiniteGraph(2, loop, 2), GraphError);
    std::vector<Edge> dup{{0, 1}, {1, 0}};
    EXPECT_THROW(FiniteGraph(2, dup, 2), GraphError);
    std::vector<Edge> out_of_range{{0, 2}};
    EXPECT_THROW(FiniteGraph(2, out_of_range, 2), GraphError);
    std::vector<Edge> disconnected{{0, 1}};
    EXPECT_THROW(FiniteGraph(3, disconnected, 2), GraphError);
    std::vector<Edge> star{{0, 1}, {0, 2}, {0, 3}};
    EXPECT_THROW(FiniteGraph(4, star, 2), GraphError);
    EXPECT_THROW(FiniteGraph(0, {}, 0), GraphError);
}

TEST(CoarseDistance, SameLevelIsHopDistance) {
    GraphSeq seq({cycle_graph(4), cycle_graph(6)});
    EXPECT_EQ(coarse_distance(seq, {1, 0}, {1, 2}), 2u);
}

TEST(CoarseDistance, AcrossLevels) {
    GraphSeq seq({cycle_graph(4), cycle_graph(6)});
    EXPECT_EQ(coarse_distance(seq, {1, 0}, {2, 0}), 8u);
    EXPECT_EQ(coarse_distance(seq, {2, 5}, {1, 3}), 8u);
}

TEST(CoarseDistance, IdentityAndErrors) {
    GraphSeq seq({cycle_graph(4), cycle_graph(6)});
    EXPECT_EQ(coarse_distance(seq, {2, 3}, {2, 3}), 0u);
    EXPECT_THROW(coarse_distance(seq, {3, 0}, {1, 0}), std::out_of_range);
    EXPECT_THROW(coarse_distance(seq, {1, 4}, {1, 0}), std::out_of_range);
}

TEST(CoarseDistance, IsAMetricOnSmallUnion) {
    GraphSeq seq({path_graph(3), cycle_graph(5), torus_graph(3, 3)});
    std::vector<CoarsePoint> pts;
    for (std::size_t i = 1; i <= seq.size(); ++i)
        for (Vertex v = 0; v < seq.level(i).size(); ++v) pts.push_back({i, v});
    for (const auto& p : pts)
        for (const auto& q : pts) {
            const auto pq = coarse_distance(seq, p, q);
            ASSERT_EQ(pq, coarse_distance(seq, q, p));
            ASSERT_EQ(pq == 0, p.level == q.level && p.vertex == q.vertex);
            for (const auto& r : pts) ASSERT_LE(pq, coarse_distance(seq, p, r) + coarse_distance(seq, r, q));
        }
}

TEST(GraphSeq, SharedDegreeBound) {
    GraphSeq seq({cycle_graph(5), torus_graph(3, 3)});
    EXPECT_EQ(seq.degree_bound(), 4u);
    EXPECT_TRUE(seq.strictly_growing());
    EXPECT_THROW(GraphSeq({torus_graph(3, 3)}, 3), GraphError);
    EXPECT_EQ(seq.diameter_of(2), 2u);
}
