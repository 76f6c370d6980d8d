// propa.hpp - property A witnesses: construction, verification in the exact
// and on-average senses, point removal, and almost-A extraction.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "coarse/graph.hpp"

namespace coarse {

inline constexpr double kNormalizationTolerance = 1e-12;

// Finitely supported probability vector, sorted by vertex.
using Distribution = std::vector<std::pair<Vertex, double>>;

inline double l1_distance(const Distribution& a, const Distribution& b) {
    double total = 0.0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() || ib != b.end()) {
        if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
            total += std::abs(ia->second);
            ++ia;
        } else if (ia == a.end() || ib->first < ia->first) {
            total += std::abs(ib->second);
            ++ib;
        } else {
            total += std::abs(ia->second - ib->second);
            ++ia;
            ++ib;
        }
    }
    return total;
}

inline double mass(const Distribution& d) {
    double s = 0.0;
    for (const auto& [v, w] : d) s += w;
    return s;
}

// Per-vertex probability vectors with declared support radius. A vertex
// with an empty vector is absent (removed by remove_points).
struct Witness {
    Distance radius = 0;
    std::vector<Distribution> vectors;
};

inline Witness uniform_ball_witness(const FiniteGraph& g, Distance radius) {
    Witness w{radius, std::vector<Distribution>(g.size())};
    for (Vertex x = 0; x < g.size(); ++x) {
        auto members = ball(g, x, radius);
        const double weight = 1.0 / static_cast<double>(members.size());
        for (Vertex y : members) w.vectors[x].emplace_back(y, weight);
    }
    return w;
}

inline Witness dirac_witness(const FiniteGraph& g) {
    Witness w{0, std::vector<Distribution>(g.size())};
    for (Vertex x = 0; x < g.size(); ++x) w.vectors[x] = {{x, 1.0}};
    return w;
}

// t steps of the lazy walk (I + P)/2 from x, truncated to B_S(x) and
// renormalized. A second candidate family next to uniform balls.
inline Witness lazy_walk_witness(const FiniteGraph& g, Distance radius, std::size_t steps) {
    Witness w{radius, std::vector<Distribution>(g.size())};
    std::vector<double> cur(g.size()), next(g.size());
    for (Vertex x = 0; x < g.size(); ++x) {
        auto members = ball(g, x, radius);
        std::vector<char> inside(g.size(), 0);
        for (Vertex y : members) inside[y] = 1;
        std::fill(cur.begin(), cur.end(), 0.0);
        cur[x] = 1.0;
        for (std::size_t t = 0; t < steps; ++t) {
            std::fill(next.begin(), next.end(), 0.0);
            for (Vertex v = 0; v < g.size(); ++v) {
                if (cur[v] == 0.0) continue;
                next[v] += 0.5 * cur[v];
                const double share = 0.5 * cur[v] / static_cast<double>(g.degree(v));
                for (Vertex u : g.neighbors(v)) next[u] += share;
            }
            std::swap(cur, next);
        }
        double total = 0.0;
        for (Vertex y : members) total += cur[y];
        for (Vertex y : members)
            if (cur[y] > 0.0) w.vectors[x].emplace_back(y, cur[y] / total);
    }
    return w;
}

enum class VariationMode { exact, average };

struct LevelVariation {
    double max_variation = 0.0;      // max over edges of ||eta_x - eta_y||_1
    double average_variation = 0.0;  // (1/|X_i|) sum_x sum_{y~x} ||xi_x - xi_y||_1
    std::size_t normalization_violations = 0;
    std::size_t support_violations = 0;
    bool structurally_valid() const { return normalization_violations == 0 && support_violations == 0; }
};

// Variation statistics on one graph. When `alive` is non-empty only
// vertices with alive[v] and edges between two such vertices count, and the
// average is still divided by the full |X_i|.
inline LevelVariation measure_variation(const FiniteGraph& g, const Witness& w, std::span<const char> alive = {}) {
    if (w.vectors.size() != g.size()) throw std::invalid_argument("witness size does not match graph");
    LevelVariation out;
    auto live = [&](Vertex v) { return alive.empty() || alive[v]; };
    for (Vertex x = 0; x < g.size(); ++x) {
        if (!live(x)) continue;
        const auto& vec = w.vectors[x];
        if (std::abs(mass(vec) - 1.0) > kNormalizationTolerance) ++out.normalization_violations;
        bool negative = false;
        for (const auto& [y, weight] : vec) negative = negative || weight < 0.0;
        if (negative) ++out.normalization_violations;
        if (!vec.empty()) {
            const auto support = ball(g, x, w.radius);
            for (const auto& [y, weight] : vec) {
                const bool in_ball = std::binary_search(support.begin(), support.end(), y);
                if (!in_ball || (!alive.empty() && !alive[y])) {
                    ++out.support_violations;
                    break;
                }
            }
        }
    }
    double edge_sum = 0.0;
    for (const Edge& e : g.edges()) {
        if (!live(e.u) || !live(e.v)) continue;
        const double var = l1_distance(w.vectors[e.u], w.vectors[e.v]);
        out.max_variation = std::max(out.max_variation, var);
        edge_sum += var;
    }
    out.average_variation = 2.0 * edge_sum / static_cast<double>(g.size());
    return out;
}

struct VariationReport {
    VariationMode mode = VariationMode::exact;
    double epsilon = 0.0;
    std::size_t tail_cutoff = 1;  // L0, 1-based
    std::vector<LevelVariation> levels;
    std::vector<double> achieved;  // the mode's statistic per level
    std::vector<double> tail_sup;  // sup of `achieved` over levels >= i
    bool structurally_valid = true;
    bool pass = false;
};

inline VariationReport verify_witness(const GraphSeq& seq, const std::vector<Witness>& witnesses, VariationMode mode,
                                      double epsilon, std::size_t tail_cutoff = 1) {
    if (witnesses.size() != seq.size()) throw std::invalid_argument("witness levels do not match sequence levels");
    VariationReport rep;
    rep.mode = mode;
    rep.epsilon = epsilon;
    rep.tail_cutoff = tail_cutoff;
    bool below = true;
    for (std::size_t i = 1; i <= seq.size(); ++i) {
        auto lv = measure_variation(seq.level(i), witnesses[i - 1]);
        const double stat = mode == VariationMode::exact ? lv.max_variation : lv.average_variation;
        rep.structurally_valid = rep.structurally_valid && lv.structurally_valid();
        if (i >= tail_cutoff && !(stat < epsilon)) below = false;
        rep.levels.push_back(lv);
        rep.achieved.push_back(stat);
    }
    rep.tail_sup.assign(rep.achieved.size(), 0.0);
    double run = 0.0;
    for (std::size_t i = rep.achieved.size(); i-- > 0;) {
        run = std::max(run, rep.achieved[i]);
        rep.tail_sup[i] = run;
    }
    rep.pass = rep.structurally_valid && below;
    return rep;
}

// Result of removing a vertex set W from a witness.
struct RemovalResult {
    Witness witness;            // empty vectors at removed vertices
    std::vector<char> alive;    // alive[v] == 0 iff v in W
    std::size_t declared_radius = 0;  // M = max_y |B_S(y)|
    std::size_t fallback_count = 0;   // survivors whose vector became a Dirac mass
};

// Conditions each surviving vector on the complement of W; a vector with no
// mass left outside W becomes the Dirac mass at its own vertex.
inline RemovalResult remove_points(const FiniteGraph& g, const Witness& w, const std::vector<Vertex>& removed) {
    if (w.vectors.size() != g.size()) throw std::invalid_argument("witness size does not match graph");
    RemovalResult out;
    out.alive.assign(g.size(), 1);
    for (Vertex v : removed) {
        if (v >= g.size()) throw std::out_of_range("removed vertex out of range");
        out.alive[v] = 0;
    }
    if (std::count(out.alive.begin(), out.alive.end(), 0) == static_cast<std::ptrdiff_t>(g.size())) {
        throw std::invalid_argument("cannot remove every vertex");
    }
    for (Vertex y = 0; y < g.size(); ++y) out.declared_radius = std::max(out.declared_radius, ball(g, y, w.radius).size());
    out.witness.radius = w.radius;
    out.witness.vectors.resize(g.size());
    for (Vertex x = 0; x < g.size(); ++x) {
        if (!out.alive[x]) continue;
        double kept = 0.0;
        for (const auto& [y, weight] : w.vectors[x])
            if (out.alive[y]) kept += weight;
        auto& vec = out.witness.vectors[x];
        if (kept > 0.0) {
            for (const auto& [y, weight] : w.vectors[x])
                if (out.alive[y] && weight > 0.0) vec.emplace_back(y, weight / kept);
        } else {
            vec = {{x, 1.0}};
            ++out.fallback_count;
        }
    }
    return out;
}

// Sum over neighbours of ||xi_x - xi_y||_1, for every x.
inline std::vector<double> vertex_variation_sums(const FiniteGraph& g, const Witness& w) {
    std::vector<double> sums(g.size(), 0.0);
    for (const Edge& e : g.edges()) {
        const double var = l1_distance(w.vectors[e.u], w.vectors[e.v]);
        sums[e.u] += var;
        sums[e.v] += var;
    }
    return sums;
}

// Z^k = {x : vertex sum > 1/k}.
inline std::vector<Vertex> almost_a_removal_set(const FiniteGraph& g, const Witness& w, std::size_t k) {
    const double threshold = 1.0 / static_cast<double>(k);
    auto sums = vertex_variation_sums(g, w);
    std::vector<Vertex> z;
    for (Vertex x = 0; x < g.size(); ++x)
        if (sums[x] > threshold) z.push_back(x);
    return z;
}

struct AlmostALevel {
    std::size_t k = 0;  // 0: no feasible k, nothing removed, nothing claimed
    std::vector<Vertex> removed;
    double density = 0.0;
    std::optional<RemovalResult> restricted;
};

// by_k[k-1][i-1] is the witness for threshold 1/k on level i. Each level
// takes the largest k whose removal set has density <= 1/k.
inline std::vector<AlmostALevel> extract_almost_a(const GraphSeq& seq,
                                                  const std::vector<std::vector<Witness>>& by_k) {
    for (const auto& family : by_k)
        if (family.size() != seq.size()) throw std::invalid_argument("witness family does not cover every level");
    std::vector<AlmostALevel> out;
    for (std::size_t i = 1; i <= seq.size(); ++i) {
        const auto& g = seq.level(i);
        AlmostALevel lvl;
        for (std::size_t k = by_k.size(); k >= 1; --k) {
            const auto& w = by_k[k - 1][i - 1];
            if (!measure_variation(g, w).structurally_valid()) {
                throw std::invalid_argument("witness for k=" + std::to_string(k) + " fails structural checks");
            }
            auto z = almost_a_removal_set(g, w, k);
            const double density = static_cast<double>(z.size()) / static_cast<double>(g.size());
            // |Z| <= n/k, compared in integers
            if (z.size() * k <= g.size() && z.size() < g.size()) {
                lvl.k = k;
                lvl.density = density;
                lvl.restricted = remove_points(g, w, z);
                lvl.removed = std::move(z);
                break;
            }
        }
        out.push_back(std::move(lvl));
    }
    return out;
}

}  // namespace coarse
