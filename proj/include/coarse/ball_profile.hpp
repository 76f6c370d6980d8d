// ball_profile.hpp - rooted R-ball isomorphism classes and their
// frequencies (Benjamini-Schramm local statistics).
#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "coarse/graph.hpp"

namespace coarse {

namespace detail {

// Canonical form of a small rooted graph by backtracking over vertex
// orderings that respect an isomorphism-invariant colouring, keeping the
// lexicographically least lower-triangular adjacency encoding.
class RootedCanonizer {
public:
    RootedCanonizer(std::vector<std::vector<char>> adj, std::vector<int> colour)
        : m_(adj.size()), adj_(std::move(adj)), colour_(std::move(colour)) {
        required_ = colour_;
        std::sort(required_.begin(), required_.end());
        perm_.assign(m_, 0);
        used_.assign(m_, 0);
    }

    std::string run() {
        search(0, 0, version_);
        std::string key = std::to_string(m_) + ":";
        for (char c : best_) key.push_back(c ? '1' : '0');
        return key;
    }

private:
    // state: 0 = prefix equal to best prefix, -1 = prefix strictly smaller.
    void search(std::size_t p, int state, std::size_t seen_version) {
        if (p == m_) {
            if (!has_best_ || state < 0) {
                best_ = current_;
                has_best_ = true;
                ++version_;
            }
            return;
        }
        const std::size_t offset = p * (p - 1) / 2;  // start of row p in the encoding
        for (std::size_t v = 0; v < m_; ++v) {
            if (used_[v] || colour_[v] != required_[p]) continue;
            if (version_ != seen_version) {
                // a new best was found below this prefix, so the prefix now matches it
                state = 0;
                seen_version = version_;
            }
            int next_state = state;
            if (has_best_ && state == 0) {
                int cmp = 0;
                for (std::size_t q = 0; q < p && cmp == 0; ++q) {
                    const char bit = adj_[v][perm_[q]];
                    const char ref = best_[offset + q];
                    if (bit != ref) cmp = bit < ref ? -1 : 1;
                }
                if (cmp > 0) continue;
                next_state = cmp;
            }
            perm_[p] = v;
            used_[v] = 1;
            for (std::size_t q = 0; q < p; ++q) current_.push_back(adj_[v][perm_[q]]);
            search(p + 1, next_state, version_);
            current_.resize(offset);
            used_[v] = 0;
        }
    }

    std::size_t m_;
    std::vector<std::vector<char>> adj_;
    std::vector<int> colour_;
    std::vector<int> required_;
    std::vector<std::size_t> perm_;
    std::vector<char> used_;
    std::vector<char> current_;
    std::vector<char> best_;
    bool has_best_ = false;
    std::size_t version_ = 0;
};

// Colour refinement seeded with (depth, degree inside the ball). Colours are
// ranks of sorted signatures, so they are canonical.
inline std::vector<int> refine_colours(const std::vector<std::vector<char>>& adj, const std::vector<Distance>& depth) {
    const std::size_t m = adj.size();
    std::vector<std::vector<long>> sig(m);
    for (std::size_t v = 0; v < m; ++v) {
        long deg = 0;
        for (std::size_t w = 0; w < m; ++w) deg += adj[v][w];
        sig[v] = {static_cast<long>(depth[v]), deg};
    }
    std::vector<int> colour(m, 0);
    std::size_t classes = 0;
    for (;;) {
        std::vector<std::vector<long>> distinct = sig;
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        for (std::size_t v = 0; v < m; ++v) {
            colour[v] = static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), sig[v]) - distinct.begin());
        }
        if (distinct.size() == classes) break;
        classes = distinct.size();
        for (std::size_t v = 0; v < m; ++v) {
            std::vector<long> nb;
            for (std::size_t w = 0; w < m; ++w)
                if (adj[v][w]) nb.push_back(colour[w]);
            std::sort(nb.begin(), nb.end());
            sig[v] = {colour[v]};
            sig[v].insert(sig[v].end(), nb.begin(), nb.end());
        }
    }
    return colour;
}

}  // namespace detail

struct RootedBallShape {
    std::string key;  // canonical encoding; equal keys <=> rooted-isomorphic balls
    std::size_t vertices = 0;
    std::size_t edges = 0;
    std::size_t root_degree = 0;
};

// Canonical description of the induced rooted ball B_R(x).
inline RootedBallShape rooted_ball_shape(const FiniteGraph& g, Vertex x, Distance radius) {
    auto dist = bfs_distances(g, x);
    std::vector<Vertex> members;
    for (Vertex v = 0; v < g.size(); ++v)
        if (dist[v] <= radius) members.push_back(v);
    const std::size_t m = members.size();
    std::vector<std::size_t> local(g.size(), SIZE_MAX);
    for (std::size_t i = 0; i < m; ++i) local[members[i]] = i;
    std::vector<std::vector<char>> adj(m, std::vector<char>(m, 0));
    std::vector<Distance> depth(m);
    std::size_t edges = 0;
    for (std::size_t i = 0; i < m; ++i) {
        depth[i] = dist[members[i]];
        for (Vertex w : g.neighbors(members[i])) {
            if (local[w] == SIZE_MAX) continue;
            adj[i][local[w]] = 1;
            if (members[i] < w) ++edges;
        }
    }
    const auto root_degree = static_cast<std::size_t>(std::count(adj[local[x]].begin(), adj[local[x]].end(), 1));
    auto colour = detail::refine_colours(adj, depth);
    detail::RootedCanonizer canon(std::move(adj), std::move(colour));
    RootedBallShape shape;
    shape.key = canon.run();
    shape.vertices = m;
    shape.edges = edges;
    shape.root_degree = root_degree;
    return shape;
}

struct BallClass {
    RootedBallShape shape;
    std::size_t count = 0;  // frequency = count / level size, exactly
    double frequency = 0.0;
};

struct BallProfile {
    Distance radius = 0;
    std::size_t level_size = 0;
    std::vector<BallClass> classes;  // sorted by decreasing count, then key
};

inline BallProfile ball_profile(const FiniteGraph& g, Distance radius) {
    std::map<std::string, BallClass> by_key;
    for (Vertex x = 0; x < g.size(); ++x) {
        auto shape = rooted_ball_shape(g, x, radius);
        auto& entry = by_key[shape.key];
        if (entry.count == 0) entry.shape = shape;
        ++entry.count;
    }
    BallProfile profile{radius, g.size(), {}};
    for (auto& [key, cls] : by_key) {
        cls.frequency = static_cast<double>(cls.count) / static_cast<double>(g.size());
        profile.classes.push_back(cls);
    }
    std::stable_sort(profile.classes.begin(), profile.classes.end(),
                     [](const BallClass& a, const BallClass& b) { return a.count > b.count; });
    return profile;
}

struct SequenceBallProfile {
    std::vector<BallProfile> levels;
    // Frequency of the reference class per level; empty without a reference.
    std::vector<double> reference_frequency;
};

// Profiles every level; when `reference` is given, also reports how often
// the reference rooted ball occurs at each level.
inline SequenceBallProfile ball_profile(const GraphSeq& seq, Distance radius,
                                        const RootedBallShape* reference = nullptr) {
    SequenceBallProfile out;
    for (const auto& g : seq.levels()) {
        out.levels.push_back(ball_profile(g, radius));
        if (reference) {
            double freq = 0.0;
            for (const auto& cls : out.levels.back().classes)
                if (cls.shape.key == reference->key) freq = cls.frequency;
            out.reference_frequency.push_back(freq);
        }
    }
    return out;
}

}  // namespace coarse
