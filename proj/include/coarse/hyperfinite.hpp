// hyperfinite.hpp - bounded-size partitions with few cut edges: search,
// verification, and conversion to and from vertex-removal certificates.
//
// Size caps are strict in the partition form (every block has size < K) and
// non-strict in the removal form (every component has size <= K).
#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "coarse/graph.hpp"

namespace coarse {

class CertificateError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Partition {
    std::size_t K = 0;
    std::vector<std::size_t> block;  // block id per vertex
    std::vector<Edge> cut_edges;     // stored copy; verification recomputes it
    double cut_ratio = 0.0;

    std::size_t cut() const { return cut_edges.size(); }
};

using PartitionCert = std::vector<Partition>;  // one entry per level

// Relabels block ids in order of first appearance by vertex id.
inline std::vector<std::size_t> canonical_blocks(const std::vector<std::size_t>& block) {
    std::map<std::size_t, std::size_t> rename;
    std::vector<std::size_t> out(block.size());
    for (std::size_t v = 0; v < block.size(); ++v) {
        auto [it, inserted] = rename.emplace(block[v], rename.size());
        out[v] = it->second;
    }
    return out;
}

inline std::vector<Edge> cut_edges_of(const FiniteGraph& g, const std::vector<std::size_t>& block) {
    std::vector<Edge> cut;
    for (const Edge& e : g.edges())
        if (block[e.u] != block[e.v]) cut.push_back(e);
    return cut;
}

inline std::vector<std::size_t> block_sizes(const std::vector<std::size_t>& block) {
    std::vector<std::size_t> sizes;
    for (std::size_t b : block) {
        if (b >= sizes.size()) sizes.resize(b + 1, 0);
        ++sizes[b];
    }
    return sizes;
}

// Validates the assignment against the strict cap and fills the cut data.
inline Partition make_partition(const FiniteGraph& g, std::vector<std::size_t> block, std::size_t K) {
    if (block.size() != g.size()) {
        throw CertificateError("assignment covers " + std::to_string(block.size()) + " of " +
                               std::to_string(g.size()) + " vertices");
    }
    block = canonical_blocks(block);
    auto sizes = block_sizes(block);
    for (std::size_t b = 0; b < sizes.size(); ++b) {
        if (sizes[b] >= K) {
            throw CertificateError("block " + std::to_string(b) + " has size " + std::to_string(sizes[b]) +
                                   ", cap is < " + std::to_string(K));
        }
    }
    Partition p{K, std::move(block), {}, 0.0};
    p.cut_edges = cut_edges_of(g, p.block);
    p.cut_ratio = static_cast<double>(p.cut_edges.size()) / static_cast<double>(g.size());
    return p;
}

struct PartitionVerification {
    double epsilon = 0.0;
    std::size_t tail_cutoff = 1;
    std::vector<std::size_t> cuts;
    std::vector<double> ratios;
    std::vector<std::size_t> max_block;
    std::vector<double> tail_sup;
    bool pass = false;  // ratio <= eps at every level >= tail_cutoff
};

inline PartitionVerification verify_partition(const GraphSeq& seq, const PartitionCert& cert, double epsilon,
                                              std::size_t tail_cutoff = 1) {
    if (cert.size() != seq.size()) throw CertificateError("certificate levels do not match sequence levels");
    PartitionVerification out{epsilon, tail_cutoff, {}, {}, {}, {}, true};
    for (std::size_t i = 1; i <= seq.size(); ++i) {
        const auto& stored = cert[i - 1];
        auto fresh = make_partition(seq.level(i), stored.block, stored.K);
        auto sizes = block_sizes(fresh.block);
        out.cuts.push_back(fresh.cut());
        out.ratios.push_back(fresh.cut_ratio);
        out.max_block.push_back(*std::max_element(sizes.begin(), sizes.end()));
        if (i >= tail_cutoff && fresh.cut_ratio > epsilon) out.pass = false;
    }
    out.tail_sup.assign(out.ratios.size(), 0.0);
    double run = 0.0;
    for (std::size_t i = out.ratios.size(); i-- > 0;) {
        run = std::max(run, out.ratios[i]);
        out.tail_sup[i] = run;
    }
    return out;
}

// Lowest unassigned vertex seeds a BFS over unassigned vertices; whole
// layers are added while the block stays at size <= K-1.
inline Partition carve_greedy(const FiniteGraph& g, std::size_t K) {
    if (K < 2) throw std::invalid_argument("carve_greedy needs K >= 2 (blocks must have size < K)");
    constexpr std::size_t kNone = SIZE_MAX;
    std::vector<std::size_t> block(g.size(), kNone);
    std::vector<char> queued(g.size(), 0);
    std::size_t next_block = 0;
    for (Vertex seed = 0; seed < g.size(); ++seed) {
        if (block[seed] != kNone) continue;
        std::vector<Vertex> members{seed};
        std::vector<Vertex> layer{seed};
        queued[seed] = 1;
        for (;;) {
            std::vector<Vertex> next;
            for (Vertex v : layer) {
                for (Vertex w : g.neighbors(v)) {
                    if (block[w] != kNone || queued[w]) continue;
                    queued[w] = 1;
                    next.push_back(w);
                }
            }
            if (next.empty() || members.size() + next.size() > K - 1) {
                for (Vertex w : next) queued[w] = 0;
                break;
            }
            std::sort(next.begin(), next.end());
            members.insert(members.end(), next.begin(), next.end());
            layer = std::move(next);
        }
        for (Vertex v : members) block[v] = next_block;
        ++next_block;
    }
    return make_partition(g, std::move(block), K);
}

// Hill climbing: for each vertex in id order, apply the best strictly
// improving move among (a) moving it into a neighbouring block with room and
// (b) swapping it with a member of a neighbouring block. Stops at a local
// optimum or after max_iters applied moves.
inline Partition refine_local_search(const FiniteGraph& g, const Partition& start, std::size_t max_iters = 100000) {
    std::vector<std::size_t> block = start.block;
    const std::size_t K = start.K;
    std::vector<std::vector<Vertex>> members(g.size());
    for (Vertex v = 0; v < g.size(); ++v) members[block[v]].push_back(v);

    auto count_in = [&](Vertex v, std::size_t b) {
        std::size_t c = 0;
        for (Vertex w : g.neighbors(v)) c += block[w] == b;
        return c;
    };
    auto erase_member = [&](std::size_t b, Vertex v) {
        auto& m = members[b];
        m.erase(std::find(m.begin(), m.end(), v));
    };

    std::size_t applied = 0;
    bool improved = true;
    while (improved && applied < max_iters) {
        improved = false;
        for (Vertex v = 0; v < g.size() && applied < max_iters; ++v) {
            const std::size_t a = block[v];
            const long own = static_cast<long>(count_in(v, a));
            std::vector<std::size_t> targets;
            for (Vertex w : g.neighbors(v))
                if (block[w] != a && std::find(targets.begin(), targets.end(), block[w]) == targets.end())
                    targets.push_back(block[w]);
            std::sort(targets.begin(), targets.end());

            long best_gain = 0;
            std::size_t best_block = SIZE_MAX;
            Vertex best_swap = 0;
            bool best_is_swap = false;
            for (std::size_t b : targets) {
                const long into = static_cast<long>(count_in(v, b));
                if (members[b].size() + 1 < K && into - own > best_gain) {
                    best_gain = into - own;
                    best_block = b;
                    best_is_swap = false;
                }
                for (Vertex u : members[b]) {
                    const long adj = g.adjacent(u, v) ? 1 : 0;
                    const long gain = into + static_cast<long>(count_in(u, a)) - 2 * adj - own -
                                      static_cast<long>(count_in(u, b));
                    if (gain > best_gain) {
                        best_gain = gain;
                        best_block = b;
                        best_swap = u;
                        best_is_swap = true;
                    }
                }
            }
            if (best_block == SIZE_MAX) continue;
            erase_member(a, v);
            members[best_block].push_back(v);
            block[v] = best_block;
            if (best_is_swap) {
                erase_member(best_block, best_swap);
                members[a].push_back(best_swap);
                block[best_swap] = a;
            }
            ++applied;
            improved = true;
        }
    }
    return make_partition(g, std::move(block), K);
}

inline constexpr std::size_t kBruteForceMaxVertices = 10;

// Exact minimum cut over all partitions with blocks of size < K, by
// restricted-growth enumeration with size and cut-bound pruning.
inline Partition brute_force_optimal(const FiniteGraph& g, std::size_t K) {
    const std::size_t n = g.size();
    if (n > kBruteForceMaxVertices) throw std::invalid_argument("brute_force_optimal is limited to n <= 10");
    if (K < 2) throw std::invalid_argument("brute_force_optimal needs K >= 2");
    std::vector<std::size_t> cur(n, 0), best;
    std::vector<std::size_t> sizes(n + 1, 0);
    std::size_t best_cut = g.edge_count() + 1;

    auto rec = [&](auto&& self, Vertex v, std::size_t used_blocks, std::size_t cut) -> void {
        if (cut >= best_cut) return;
        if (v == n) {
            best_cut = cut;
            best = cur;
            return;
        }
        for (std::size_t b = 0; b <= used_blocks && b < n; ++b) {
            if (sizes[b] + 1 >= K) continue;
            std::size_t added = 0;
            for (Vertex w : g.neighbors(v))
                if (w < v && cur[w] != b) ++added;
            cur[v] = b;
            ++sizes[b];
            self(self, v + 1, std::max(used_blocks, b + 1), cut + added);
            --sizes[b];
        }
    };
    rec(rec, 0, 0, 0);
    return make_partition(g, best, K);
}

struct RemovalCert {
    std::size_t K = 0;        // components after removal have size <= K
    std::vector<Vertex> Z;    // sorted
    double density = 0.0;
};

// Sizes of connected components after deleting every edge incident to Z.
inline std::vector<std::size_t> components_after_removal(const FiniteGraph& g, const std::vector<Vertex>& Z,
                                                         std::vector<std::size_t>* component_of = nullptr) {
    std::vector<char> removed(g.size(), 0);
    for (Vertex z : Z) {
        if (z >= g.size()) throw CertificateError("removal vertex out of range");
        removed[z] = 1;
    }
    std::vector<std::size_t> comp(g.size(), SIZE_MAX);
    std::vector<std::size_t> sizes;
    for (Vertex s = 0; s < g.size(); ++s) {
        if (comp[s] != SIZE_MAX) continue;
        const std::size_t id = sizes.size();
        sizes.push_back(0);
        std::vector<Vertex> stack{s};
        comp[s] = id;
        while (!stack.empty()) {
            Vertex v = stack.back();
            stack.pop_back();
            ++sizes[id];
            if (removed[v]) continue;
            for (Vertex w : g.neighbors(v)) {
                if (removed[w] || comp[w] != SIZE_MAX) continue;
                comp[w] = id;
                stack.push_back(w);
            }
        }
    }
    if (component_of) *component_of = std::move(comp);
    return sizes;
}

inline RemovalCert make_removal(const FiniteGraph& g, std::vector<Vertex> Z, std::size_t K) {
    std::sort(Z.begin(), Z.end());
    Z.erase(std::unique(Z.begin(), Z.end()), Z.end());
    auto sizes = components_after_removal(g, Z);
    for (std::size_t s : sizes) {
        if (s > K) {
            throw CertificateError("component of size " + std::to_string(s) + " exceeds cap " + std::to_string(K));
        }
    }
    const double density = static_cast<double>(Z.size()) / static_cast<double>(g.size());
    return {K, std::move(Z), density};
}

// Z = endpoints of cut edges. Components after removal lie inside blocks, so
// the cap carries over unchanged.
inline RemovalCert partition_to_removal(const FiniteGraph& g, const Partition& p) {
    auto fresh = make_partition(g, p.block, p.K);
    std::vector<Vertex> Z;
    for (const Edge& e : fresh.cut_edges) {
        Z.push_back(e.u);
        Z.push_back(e.v);
    }
    return make_removal(g, std::move(Z), p.K);
}

// Blocks are the components after deleting edges incident to Z; each vertex
// of Z is its own block. Components have size <= K, so the partition cap
// becomes K + 1.
inline Partition removal_to_partition(const FiniteGraph& g, const RemovalCert& r) {
    std::vector<std::size_t> comp;
    auto sizes = components_after_removal(g, r.Z, &comp);
    for (std::size_t s : sizes) {
        if (s > r.K) throw CertificateError("removal certificate violates its cap");
    }
    return make_partition(g, comp, r.K + 1);
}

}  // namespace coarse
