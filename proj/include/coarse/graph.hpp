// graph.hpp - finite bounded-degree graphs, hop metrics, balls, and the
// coarse union metric on a sequence of graphs.
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace coarse {

using Vertex = std::uint32_t;
using Distance = std::uint32_t;

inline constexpr Distance kUnreachable = std::numeric_limits<Distance>::max();

struct Edge {
    Vertex u;
    Vertex v;
    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Raised when input violates a structural invariant (loops, multi-edges,
// degree bound, connectivity, out-of-range ids).
class GraphError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Simple, undirected, connected graph with sorted adjacency lists and a
// declared degree bound. Immutable after construction.
class FiniteGraph {
public:
    FiniteGraph(std::size_t n, std::span<const Edge> edges, std::size_t degree_bound)
        : adjacency_(n), degree_bound_(degree_bound) {
        if (n == 0) throw GraphError("graph must have at least one vertex");
        if (n > std::numeric_limits<Vertex>::max()) throw GraphError("too many vertices");
        for (const Edge& e : edges) {
            if (e.u >= n || e.v >= n) {
                throw GraphError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                                 ") out of range for n=" + std::to_string(n));
            }
            if (e.u == e.v) throw GraphError("self-loop at vertex " + std::to_string(e.u));
            adjacency_[e.u].push_back(e.v);
            adjacency_[e.v].push_back(e.u);
        }
        for (Vertex v = 0; v < n; ++v) {
            auto& nb = adjacency_[v];
            std::sort(nb.begin(), nb.end());
            if (std::adjacent_find(nb.begin(), nb.end()) != nb.end()) {
                throw GraphError("duplicate edge at vertex " + std::to_string(v));
            }
            if (nb.size() > degree_bound_) {
                throw GraphError("vertex " + std::to_string(v) + " has degree " + std::to_string(nb.size()) +
                                 " above bound " + std::to_string(degree_bound_));
            }
            edge_count_ += nb.size();
        }
        edge_count_ /= 2;
        if (!is_connected()) throw GraphError("graph is not connected");
    }

    // Degree bound defaults to the maximum degree.
    static FiniteGraph from_edges(std::size_t n, std::span<const Edge> edges) {
        std::vector<std::size_t> deg(n, 0);
        for (const Edge& e : edges) {
            if (e.u < n) ++deg[e.u];
            if (e.v < n) ++deg[e.v];
        }
        const std::size_t d = deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
        return FiniteGraph(n, edges, d);
    }

    std::size_t size() const noexcept { return adjacency_.size(); }
    std::size_t edge_count() const noexcept { return edge_count_; }
    std::size_t degree_bound() const noexcept { return degree_bound_; }
    std::size_t degree(Vertex v) const { return neighbors(v).size(); }

    std::span<const Vertex> neighbors(Vertex v) const {
        if (v >= size()) throw std::out_of_range("vertex " + std::to_string(v) + " out of range");
        return adjacency_[v];
    }

    bool adjacent(Vertex a, Vertex b) const {
        auto nb = neighbors(a);
        return std::binary_search(nb.begin(), nb.end(), b);
    }

    // Edges with u < v, lexicographically sorted.
    std::vector<Edge> edges() const {
        std::vector<Edge> out;
        out.reserve(edge_count_);
        for (Vertex u = 0; u < size(); ++u) {
            for (Vertex v : adjacency_[u]) {
                if (u < v) out.push_back({u, v});
            }
        }
        return out;
    }

    friend bool operator==(const FiniteGraph& a, const FiniteGraph& b) {
        return a.adjacency_ == b.adjacency_;
    }

private:
    bool is_connected() const {
        std::vector<char> seen(size(), 0);
        std::vector<Vertex> stack{0};
        seen[0] = 1;
        std::size_t count = 1;
        while (!stack.empty()) {
            Vertex v = stack.back();
            stack.pop_back();
            for (Vertex w : adjacency_[v]) {
                if (!seen[w]) {
                    seen[w] = 1;
                    ++count;
                    stack.push_back(w);
                }
            }
        }
        return count == size();
    }

    std::vector<std::vector<Vertex>> adjacency_;
    std::size_t degree_bound_ = 0;
    std::size_t edge_count_ = 0;
};

// Hop distances from `source`. When `alive` is non-empty, the search only
// walks through vertices with alive[v] != 0 and unreached vertices keep
// kUnreachable.
inline std::vector<Distance> bfs_distances(const FiniteGraph& g, Vertex source,
                                           std::span<const char> alive = {}) {
    if (source >= g.size()) {
        throw std::out_of_range("bfs source " + std::to_string(source) + " out of range");
    }
    std::vector<Distance> dist(g.size(), kUnreachable);
    std::vector<Vertex> queue;
    queue.reserve(g.size());
    dist[source] = 0;
    queue.push_back(source);
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const Vertex v = queue[head];
        for (Vertex w : g.neighbors(v)) {
            if (dist[w] != kUnreachable) continue;
            if (!alive.empty() && !alive[w]) continue;
            dist[w] = dist[v] + 1;
            queue.push_back(w);
        }
    }
    return dist;
}

// B_R(x) in ascending vertex order. Stops expanding at depth R.
inline std::vector<Vertex> ball(const FiniteGraph& g, Vertex x, Distance radius) {
    if (x >= g.size()) throw std::out_of_range("ball center out of range");
    std::vector<Vertex> members{x};
    std::vector<Distance> depth{0};
    std::vector<char> seen(g.size(), 0);
    seen[x] = 1;
    for (std::size_t head = 0; head < members.size(); ++head) {
        if (depth[head] == radius) continue;
        for (Vertex w : g.neighbors(members[head])) {
            if (seen[w]) continue;
            seen[w] = 1;
            members.push_back(w);
            depth.push_back(depth[head] + 1);
        }
    }
    std::sort(members.begin(), members.end());
    return members;
}

// Bounded-geometry cap: 1 + sum_{k=1..R} d (d-1)^{k-1}.
inline std::size_t ball_size_bound(std::size_t degree_bound, Distance radius) {
    std::size_t total = 1;
    std::size_t shell = degree_bound;
    for (Distance k = 1; k <= radius; ++k) {
        total += shell;
        shell *= (degree_bound > 0 ? degree_bound - 1 : 0);
    }
    return total;
}

inline Distance eccentricity(const FiniteGraph& g, Vertex x) {
    auto dist = bfs_distances(g, x);
    return *std::max_element(dist.begin(), dist.end());
}

inline Distance diameter(const FiniteGraph& g) {
    Distance best = 0;
    for (Vertex x = 0; x < g.size(); ++x) best = std::max(best, eccentricity(g, x));
    return best;
}

// Dense all-pairs hop distances, row-major n x n.
class DistanceMatrix {
public:
    explicit DistanceMatrix(const FiniteGraph& g) : n_(g.size()), data_(n_ * n_) {
        for (Vertex x = 0; x < n_; ++x) {
            auto row = bfs_distances(g, x);
            std::copy(row.begin(), row.end(), data_.begin() + static_cast<std::ptrdiff_t>(x * n_));
        }
        max_ = n_ == 0 ? 0 : *std::max_element(data_.begin(), data_.end());
    }

    std::size_t size() const noexcept { return n_; }
    Distance operator()(Vertex x, Vertex y) const { return data_[x * n_ + y]; }
    Distance max() const noexcept { return max_; }

private:
    std::size_t n_;
    std::vector<Distance> data_;
    Distance max_ = 0;
};

// Point of the coarse union; `level` is 1-based.
struct CoarsePoint {
    std::size_t level;
    Vertex vertex;
};

// Ordered levels X_1, X_2, ... sharing one degree bound. Diameters are
// computed once at construction.
class GraphSeq {
public:
    GraphSeq() = default;

    explicit GraphSeq(std::vector<FiniteGraph> levels) : levels_(std::move(levels)) {
        for (const auto& g : levels_) degree_bound_ = std::max(degree_bound_, g.degree_bound());
        diameters_.reserve(levels_.size());
        for (const auto& g : levels_) diameters_.push_back(diameter(g));
    }

    GraphSeq(std::vector<FiniteGraph> levels, std::size_t degree_bound) : GraphSeq(std::move(levels)) {
        for (std::size_t i = 0; i < levels_.size(); ++i) {
            const auto& g = levels_[i];
            for (Vertex v = 0; v < g.size(); ++v) {
                if (g.degree(v) > degree_bound) {
                    throw GraphError("level " + std::to_string(i + 1) + " exceeds shared degree bound " +
                                     std::to_string(degree_bound));
                }
            }
        }
        degree_bound_ = degree_bound;
    }

    std::size_t size() const noexcept { return levels_.size(); }
    bool empty() const noexcept { return levels_.empty(); }
    std::size_t degree_bound() const noexcept { return degree_bound_; }

    // 1-based access, X_i.
    const FiniteGraph& level(std::size_t i) const {
        check_level(i);
        return levels_[i - 1];
    }
    Distance diameter_of(std::size_t i) const {
        check_level(i);
        return diameters_[i - 1];
    }

    std::span<const FiniteGraph> levels() const noexcept { return levels_; }

    bool strictly_growing() const {
        for (std::size_t i = 1; i < levels_.size(); ++i) {
            if (levels_[i].size() <= levels_[i - 1].size()) return false;
        }
        return true;
    }

    void check_point(const CoarsePoint& p) const {
        check_level(p.level);
        if (p.vertex >= levels_[p.level - 1].size()) {
            throw std::out_of_range("vertex " + std::to_string(p.vertex) + " not in level " +
                                    std::to_string(p.level));
        }
    }

private:
    void check_level(std::size_t i) const {
        if (i == 0 || i > levels_.size()) {
            throw std::out_of_range("level " + std::to_string(i) + " outside 1.." + std::to_string(levels_.size()));
        }
    }

    std::vector<FiniteGraph> levels_;
    std::vector<Distance> diameters_;
    std::size_t degree_bound_ = 0;
};

// Same level: hop distance. Different levels i != j:
// diam(X_i) + diam(X_j) + i + j.
inline std::uint64_t coarse_distance(const GraphSeq& seq, const CoarsePoint& p, const CoarsePoint& q) {
    seq.check_point(p);
    seq.check_point(q);
    if (p.level == q.level) {
        if (p.vertex == q.vertex) return 0;
        return bfs_distances(seq.level(p.level), p.vertex)[q.vertex];
    }
    return std::uint64_t{seq.diameter_of(p.level)} + seq.diameter_of(q.level) + p.level + q.level;
}

}  // namespace coarse
