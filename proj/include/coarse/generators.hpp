// generators.hpp - graph families, girth, permutation actions, Schreier
// graphs, and (F, eps)-injectivity diagnostics of sofic approximations.
#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "coarse/graph.hpp"
#include "coarse/random.hpp"

namespace coarse {

enum class Family { cycle, path, torus, random_regular, star, complete };

// One member of a generated family. `a` is n (or width), `b` the torus
// height or the regular degree.
struct GraphSpec {
    Family family = Family::cycle;
    std::size_t a = 0;
    std::size_t b = 0;
    std::uint64_t seed = 0;
};

inline FiniteGraph cycle_graph(std::size_t n) {
    if (n < 3) throw GraphError("cycle needs n >= 3");
    std::vector<Edge> edges;
    for (Vertex v = 0; v < n; ++v) edges.push_back({v, static_cast<Vertex>((v + 1) % n)});
    return FiniteGraph(n, edges, 2);
}

inline FiniteGraph path_graph(std::size_t n) {
    if (n < 1) throw GraphError("path needs n >= 1");
    std::vector<Edge> edges;
    for (Vertex v = 0; v + 1 < n; ++v) edges.push_back({v, v + 1});
    return FiniteGraph(n, edges, n == 1 ? 0 : (n == 2 ? 1 : 2));
}

// Vertex (x, y) has id y * width + x.
inline FiniteGraph torus_graph(std::size_t width, std::size_t height) {
    if (width < 3 || height < 3) throw GraphError("torus sides must be >= 3");
    std::vector<Edge> edges;
    auto id = [width](std::size_t x, std::size_t y) { return static_cast<Vertex>(y * width + x); };
    for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < width; ++x) {
            edges.push_back({id(x, y), id((x + 1) % width, y)});
            edges.push_back({id(x, y), id(x, (y + 1) % height)});
        }
    }
    return FiniteGraph(width * height, edges, 4);
}

inline FiniteGraph star_graph(std::size_t leaves) {
    std::vector<Edge> edges;
    for (Vertex v = 1; v <= leaves; ++v) edges.push_back({0, v});
    return FiniteGraph(leaves + 1, edges, leaves);
}

inline FiniteGraph complete_graph(std::size_t n) {
    std::vector<Edge> edges;
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v = u + 1; v < n; ++v) edges.push_back({u, v});
    return FiniteGraph(n, edges, n - 1);
}

// Configuration model: shuffle the n*d half-edges, pair consecutive ones,
// reject the whole draw on a loop, a multi-edge, or a disconnected result.
inline FiniteGraph random_regular_graph(std::size_t n, std::size_t d, std::uint64_t seed,
                                        std::size_t max_attempts = 100000) {
    if (d < 3) throw GraphError("random_regular needs d >= 3");
    if ((n * d) % 2 != 0) throw GraphError("random_regular needs n*d even");
    if (n <= d) throw GraphError("random_regular needs n > d");
    Rng rng(seed);
    std::vector<Vertex> stubs(n * d);
    for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
        for (std::size_t i = 0; i < stubs.size(); ++i) stubs[i] = static_cast<Vertex>(i / d);
        rng.shuffle(std::span<Vertex>(stubs));
        std::vector<Edge> edges;
        edges.reserve(stubs.size() / 2);
        bool simple = true;
        for (std::size_t i = 0; i < stubs.size(); i += 2) {
            Vertex u = stubs[i], v = stubs[i + 1];
            if (u == v) {
                simple = false;
                break;
            }
            edges.push_back({std::min(u, v), std::max(u, v)});
        }
        if (!simple) continue;
        std::sort(edges.begin(), edges.end());
        if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) continue;
        try {
            return FiniteGraph(n, edges, d);
        } catch (const GraphError&) {
            continue;  // disconnected draw
        }
    }
    throw GraphError("random_regular: no simple connected draw within attempt budget");
}

inline FiniteGraph generate(const GraphSpec& spec) {
    switch (spec.family) {
        case Family::cycle: return cycle_graph(spec.a);
        case Family::path: return path_graph(spec.a);
        case Family::torus: return torus_graph(spec.a, spec.b);
        case Family::random_regular: return random_regular_graph(spec.a, spec.b, spec.seed);
        case Family::star: return star_graph(spec.a);
        case Family::complete: return complete_graph(spec.a);
    }
    throw GraphError("unknown family");
}

inline std::optional<Family> parse_family(const std::string& name) {
    if (name == "cycle") return Family::cycle;
    if (name == "path") return Family::path;
    if (name == "torus") return Family::torus;
    if (name == "random_regular") return Family::random_regular;
    if (name == "star") return Family::star;
    if (name == "complete") return Family::complete;
    return std::nullopt;
}

inline std::string family_name(Family f) {
    switch (f) {
        case Family::cycle: return "cycle";
        case Family::path: return "path";
        case Family::torus: return "torus";
        case Family::random_regular: return "random_regular";
        case Family::star: return "star";
        case Family::complete: return "complete";
    }
    return "?";
}

// Parses "cycle 10", "path 5", "torus 3 4", "random_regular 10 3 7",
// "star 5", "complete 4".
inline GraphSpec parse_graph_spec(const std::string& text) {
    std::istringstream in(text);
    std::string name;
    in >> name;
    auto fam = parse_family(name);
    if (!fam) throw std::invalid_argument("unknown graph family '" + name + "'");
    GraphSpec spec{*fam, 0, 0, 0};
    if (!(in >> spec.a)) throw std::invalid_argument("missing size in '" + text + "'");
    if (spec.family == Family::torus || spec.family == Family::random_regular) {
        if (!(in >> spec.b)) throw std::invalid_argument("missing second parameter in '" + text + "'");
    }
    if (spec.family == Family::random_regular) {
        if (!(in >> spec.seed)) throw std::invalid_argument("random_regular needs a seed in '" + text + "'");
    }
    return spec;
}

inline constexpr std::size_t kInfiniteGirth = 0;

// Length of the shortest cycle, or kInfiniteGirth for forests.
inline std::size_t girth(const FiniteGraph& g) {
    std::size_t best = SIZE_MAX;
    std::vector<Distance> dist(g.size());
    std::vector<Vertex> parent(g.size());
    std::vector<Vertex> queue;
    for (Vertex root = 0; root < g.size(); ++root) {
        std::fill(dist.begin(), dist.end(), kUnreachable);
        queue.assign(1, root);
        dist[root] = 0;
        parent[root] = root;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            Vertex v = queue[head];
            if (2 * std::size_t{dist[v]} + 1 >= best) break;
            for (Vertex w : g.neighbors(v)) {
                if (dist[w] == kUnreachable) {
                    dist[w] = dist[v] + 1;
                    parent[w] = v;
                    queue.push_back(w);
                } else if (parent[v] != w) {
                    best = std::min<std::size_t>(best, std::size_t{dist[v]} + dist[w] + 1);
                }
            }
        }
    }
    return best == SIZE_MAX ? kInfiniteGirth : best;
}

// A word in the generators: letter +j is generator j (1-based), -j its
// inverse. The empty word is the identity.
using Word = std::vector<int>;

inline Word free_reduce(const Word& w) {
    Word out;
    for (int letter : w) {
        if (!out.empty() && out.back() == -letter) {
            out.pop_back();
        } else {
            out.push_back(letter);
        }
    }
    return out;
}

inline Word concat(const Word& g, const Word& h) {
    Word out = g;
    out.insert(out.end(), h.begin(), h.end());
    return out;
}

// Permutations sigma(s) of {0..n-1}, one per generator, with inverse tables.
class PermAction {
public:
    PermAction(std::size_t n, std::vector<std::vector<Vertex>> generators)
        : n_(n), forward_(std::move(generators)) {
        for (std::size_t s = 0; s < forward_.size(); ++s) {
            const auto& p = forward_[s];
            if (p.size() != n_) throw GraphError("generator " + std::to_string(s + 1) + " has wrong length");
            std::vector<Vertex> inv(n_, kUnset);
            for (Vertex x = 0; x < n_; ++x) {
                if (p[x] >= n_ || inv[p[x]] != kUnset) {
                    throw GraphError("generator " + std::to_string(s + 1) + " is not a bijection");
                }
                inv[p[x]] = x;
            }
            inverse_.push_back(std::move(inv));
        }
    }

    std::size_t size() const noexcept { return n_; }
    std::size_t generator_count() const noexcept { return forward_.size(); }
    const std::vector<Vertex>& generator(std::size_t s) const { return forward_.at(s); }

    Vertex apply_letter(int letter, Vertex y) const {
        const std::size_t s = static_cast<std::size_t>(std::abs(letter));
        if (letter == 0 || s > forward_.size()) {
            throw std::out_of_range("word letter " + std::to_string(letter) + " out of range");
        }
        return letter > 0 ? forward_[s - 1][y] : inverse_[s - 1][y];
    }

    // sigma(s_1 ... s_k)(y) = sigma(s_1)(... sigma(s_k)(y)).
    Vertex apply(const Word& w, Vertex y) const {
        for (auto it = w.rbegin(); it != w.rend(); ++it) y = apply_letter(*it, y);
        return y;
    }

    std::vector<Vertex> permutation(const Word& w) const {
        std::vector<Vertex> out(n_);
        for (Vertex y = 0; y < n_; ++y) out[y] = apply(w, y);
        return out;
    }

    // Cyclic shift x -> x+1 on Z/n.
    static PermAction cyclic_shift(std::size_t n) {
        std::vector<Vertex> p(n);
        for (Vertex x = 0; x < n; ++x) p[x] = static_cast<Vertex>((x + 1) % n);
        return PermAction(n, {p});
    }

    // Z^2 acting on a width x height grid by row and column shifts.
    static PermAction grid_shifts(std::size_t width, std::size_t height) {
        const std::size_t n = width * height;
        std::vector<Vertex> sx(n), sy(n);
        for (std::size_t y = 0; y < height; ++y) {
            for (std::size_t x = 0; x < width; ++x) {
                sx[y * width + x] = static_cast<Vertex>(y * width + (x + 1) % width);
                sy[y * width + x] = static_cast<Vertex>(((y + 1) % height) * width + x);
            }
        }
        return PermAction(n, {sx, sy});
    }

    static PermAction random(std::size_t n, std::size_t k, std::uint64_t seed) {
        Rng rng(seed);
        std::vector<std::vector<Vertex>> gens;
        for (std::size_t s = 0; s < k; ++s) {
            std::vector<Vertex> p(n);
            for (Vertex x = 0; x < n; ++x) p[x] = x;
            rng.shuffle(std::span<Vertex>(p));
            gens.push_back(std::move(p));
        }
        return PermAction(n, std::move(gens));
    }

private:
    static constexpr Vertex kUnset = std::numeric_limits<Vertex>::max();
    std::size_t n_;
    std::vector<std::vector<Vertex>> forward_;
    std::vector<std::vector<Vertex>> inverse_;
};

// Undirected edge {x, sigma(s) x} tagged by generator (0-based).
struct LabeledEdge {
    Vertex from;
    Vertex to;
    std::size_t generator;
};

struct SchreierGraph {
    FiniteGraph graph;
    std::vector<LabeledEdge> labels;
};

// Parallel edges collapse in the graph; fixed points contribute no edge.
// Every non-loop generator step is kept in `labels`.
inline SchreierGraph schreier_graph(const PermAction& a) {
    std::vector<Edge> edges;
    std::vector<LabeledEdge> labels;
    for (std::size_t s = 0; s < a.generator_count(); ++s) {
        const auto& p = a.generator(s);
        for (Vertex x = 0; x < a.size(); ++x) {
            if (p[x] == x) continue;
            labels.push_back({x, p[x], s});
            edges.push_back({std::min(x, p[x]), std::max(x, p[x])});
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return {FiniteGraph(a.size(), edges, 2 * a.generator_count()), std::move(labels)};
}

// All freely reduced words of length 1..max_length over k generators, in
// shortlex order (letters ordered 1, -1, 2, -2, ...).
inline std::vector<Word> words_up_to(std::size_t k, std::size_t max_length) {
    std::vector<int> alphabet;
    for (int s = 1; s <= static_cast<int>(k); ++s) {
        alphabet.push_back(s);
        alphabet.push_back(-s);
    }
    std::vector<Word> out;
    std::vector<Word> frontier{Word{}};
    for (std::size_t len = 1; len <= max_length; ++len) {
        std::vector<Word> next;
        for (const Word& w : frontier) {
            for (int letter : alphabet) {
                if (!w.empty() && w.back() == -letter) continue;
                Word ext = w;
                ext.push_back(letter);
                next.push_back(ext);
            }
        }
        out.insert(out.end(), next.begin(), next.end());
        frontier = std::move(next);
    }
    return out;
}

struct InjectivityReport {
    std::size_t n = 0;
    std::size_t good = 0;  // |Y|
    std::vector<Vertex> good_points;
    std::size_t multiplicativity_failures = 0;  // points failing sigma(g)sigma(h)=sigma(gh)
    std::size_t freeness_failures = 0;          // points fixed by some non-identity g

    double good_fraction() const { return n == 0 ? 0.0 : static_cast<double>(good) / static_cast<double>(n); }
    double epsilon() const { return n == 0 ? 0.0 : static_cast<double>(n - good) / static_cast<double>(n); }
};

// Y = points where every pair g, h in F multiplies correctly and every g in
// F that is not freely trivial moves the point.
inline InjectivityReport injectivity_report(const PermAction& a, const std::vector<Word>& words) {
    if (words.empty()) throw std::invalid_argument("injectivity_report needs a nonempty word list");
    std::vector<std::vector<Vertex>> perms;
    std::vector<char> nontrivial;
    for (const Word& w : words) {
        perms.push_back(a.permutation(w));
        nontrivial.push_back(!free_reduce(w).empty());
    }
    std::vector<std::vector<Vertex>> products;  // index g * |F| + h
    for (const Word& g : words)
        for (const Word& h : words) products.push_back(a.permutation(concat(g, h)));

    InjectivityReport rep;
    rep.n = a.size();
    const std::size_t f = words.size();
    for (Vertex y = 0; y < a.size(); ++y) {
        bool mult_ok = true;
        for (std::size_t gi = 0; gi < f && mult_ok; ++gi)
            for (std::size_t hi = 0; hi < f && mult_ok; ++hi)
                mult_ok = perms[gi][perms[hi][y]] == products[gi * f + hi][y];
        bool free_ok = true;
        for (std::size_t gi = 0; gi < f && free_ok; ++gi) free_ok = !nontrivial[gi] || perms[gi][y] != y;
        if (!mult_ok) ++rep.multiplicativity_failures;
        if (!free_ok) ++rep.freeness_failures;
        if (mult_ok && free_ok) {
            ++rep.good;
            rep.good_points.push_back(y);
        }
    }
    return rep;
}

}  // namespace coarse
