// kernels.hpp - symmetric kernels on finite graphs: local and global
// conditional negative definiteness, spectral correction, radius selection,
// control functions, shell thresholds, spectral removal sets, and explicit
// Hilbert-space coordinates.
//
// A kernel K is conditionally negative definite (CND) on a vertex set S when
// sum_{a,b in S} l_a l_b K(a,b) <= 0 for every zero-sum l. On a ball B this is
// equivalent to lambda_max(P K|_B P) <= 0 with P = I - J/|B|, which is the
// test used throughout.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "coarse/graph.hpp"
#include "coarse/linalg.hpp"

namespace coarse {

// Single cut for every "<= 0" spectral assertion and for chi_(0,inf).
inline constexpr double kSpectralTol = 1e-9;

class KernelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class Kernel {
public:
    Kernel() = default;
    explicit Kernel(std::size_t n) : m_(n) {}

    explicit Kernel(DenseMatrix m) : m_(std::move(m)) {
        const std::size_t n = m_.size();
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) {
                if (!std::isfinite(m_(r, c))) throw KernelError("kernel entry is not finite");
                if (m_(r, c) != m_(c, r)) {
                    throw KernelError("kernel is not symmetric at (" + std::to_string(r) + "," + std::to_string(c) + ")");
                }
            }
        }
    }

    std::size_t size() const noexcept { return m_.size(); }
    double operator()(std::size_t x, std::size_t y) const { return m_(x, y); }
    void set(std::size_t x, std::size_t y, double v) {
        if (!std::isfinite(v)) throw KernelError("kernel entry is not finite");
        m_.set_sym(x, y, v);
    }
    const DenseMatrix& matrix() const noexcept { return m_; }

    // Limit-normalization statistic: max_x |K(x,x)|.
    double max_abs_diagonal() const {
        double s = 0.0;
        for (std::size_t x = 0; x < size(); ++x) s = std::max(s, std::abs(m_(x, x)));
        return s;
    }

    double max_abs_difference(const Kernel& other) const {
        if (other.size() != size()) throw KernelError("kernel sizes differ");
        double s = 0.0;
        for (std::size_t i = 0; i < m_.raw().size(); ++i) s = std::max(s, std::abs(m_.raw()[i] - other.m_.raw()[i]));
        return s;
    }

    friend bool operator==(const Kernel& a, const Kernel& b) { return a.m_.raw() == b.m_.raw(); }

private:
    DenseMatrix m_;
};

inline Kernel metric_kernel(const FiniteGraph& g) {
    DistanceMatrix dist(g);
    Kernel k(g.size());
    for (Vertex x = 0; x < g.size(); ++x)
        for (Vertex y = x + 1; y < g.size(); ++y) k.set(x, y, dist(x, y));
    return k;
}

// K restricted to `members`, in the given order.
inline DenseMatrix restrict_kernel(const Kernel& k, std::span<const Vertex> members) {
    DenseMatrix sub(members.size());
    for (std::size_t a = 0; a < members.size(); ++a)
        for (std::size_t b = 0; b < members.size(); ++b) sub(a, b) = k(members[a], members[b]);
    return sub;
}

// Largest eigenvalue of P K|_S P (unclamped); 0 for |S| <= 1.
inline double projected_top_eigenvalue(const Kernel& k, std::span<const Vertex> members) {
    if (members.size() <= 1) return 0.0;
    auto eig = jacobi_eigen(center(restrict_kernel(k, members)), false);
    return eig.values.back();
}

// B_R(x), keeping only alive vertices when a mask is given. Distances stay
// those of the full graph.
inline std::vector<Vertex> local_support(const FiniteGraph& g, Vertex x, Distance radius, std::span<const char> alive) {
    auto members = ball(g, x, radius);
    if (!alive.empty()) std::erase_if(members, [&](Vertex v) { return !alive[v]; });
    return members;
}

struct LocalSpectrumReport {
    Distance radius = 0;
    std::vector<double> b;   // lambda_max per vertex, 0 when <= kSpectralTol or removed
    double aggregate = 0.0;  // max_x b(x)
    std::optional<Vertex> argmax;  // first vertex attaining the aggregate when it is positive
};

inline LocalSpectrumReport local_spectra(const FiniteGraph& g, const Kernel& k, Distance radius,
                                         std::span<const char> alive = {}) {
    if (radius < 1) throw std::invalid_argument("local_spectra needs R >= 1");
    if (k.size() != g.size()) throw KernelError("kernel size does not match graph");
    LocalSpectrumReport rep{radius, std::vector<double>(g.size(), 0.0), 0.0, std::nullopt};
    std::map<std::vector<Vertex>, double> memo;  // identical balls share one eigenproblem
    for (Vertex x = 0; x < g.size(); ++x) {
        if (!alive.empty() && !alive[x]) continue;
        auto members = local_support(g, x, radius, alive);
        double top;
        if (members.size() == g.size()) {
            auto it = memo.find(members);
            if (it == memo.end()) it = memo.emplace(members, projected_top_eigenvalue(k, members)).first;
            top = it->second;
        } else {
            top = projected_top_eigenvalue(k, members);
        }
        rep.b[x] = top > kSpectralTol ? top : 0.0;
        if (rep.b[x] > rep.aggregate) {
            rep.aggregate = rep.b[x];
            rep.argmax = x;
        }
    }
    return rep;
}

struct CndVerdict {
    bool cnd = false;
    double b = 0.0;
    std::optional<Vertex> witness;  // vertex whose ball fails
};

inline CndVerdict is_locally_cnd(const FiniteGraph& g, const Kernel& k, Distance radius, double tol = kSpectralTol) {
    auto rep = local_spectra(g, k, radius);
    CndVerdict v{rep.aggregate <= tol, rep.aggregate, std::nullopt};
    if (!v.cnd) v.witness = rep.argmax;
    return v;
}

// lambda_max of P K P over the whole vertex set (unclamped).
inline double global_top_eigenvalue(const Kernel& k) {
    std::vector<Vertex> all(k.size());
    for (Vertex v = 0; v < k.size(); ++v) all[v] = v;
    return projected_top_eigenvalue(k, all);
}

inline bool is_globally_cnd(const Kernel& k, double tol = kSpectralTol) { return global_top_eigenvalue(k) <= tol; }

struct KernelCorrection {
    Kernel corrected;
    double b = 0.0;            // pre-correction aggregate
    double bound = 0.0;        // C = b * d^R
    double max_deviation = 0.0;
    double diagonal_shift = 0.0;  // max_x |K'(x,x) - K(x,x)|
    std::size_t projected_rank = 0;  // total rank of the subtracted projections
};

// K' = K - b * sum_j Q_j, where Q_j projects onto the eigenvectors of
// P K|_{B_R(x_j)} P with eigenvalue > tol, embedded into the full matrix.
// Summation runs over vertices in id order so the output is bit-stable.
inline KernelCorrection correct_kernel(const FiniteGraph& g, const Kernel& k, Distance radius,
                                       std::span<const char> alive = {}, double tol = kSpectralTol) {
    auto spectra = local_spectra(g, k, radius, alive);
    KernelCorrection out;
    out.b = spectra.aggregate;
    out.bound = out.b * std::pow(static_cast<double>(g.degree_bound()), static_cast<double>(radius));
    if (out.b == 0.0) {
        out.corrected = k;
        return out;
    }
    const std::size_t n = g.size();
    DenseMatrix sum(n);
    for (Vertex x = 0; x < n; ++x) {
        if (!alive.empty() && !alive[x]) continue;
        if (spectra.b[x] <= tol) continue;  // no eigenvalue above tol, Q_x = 0
        auto members = local_support(g, x, radius, alive);
        auto eig = jacobi_eigen(center(restrict_kernel(k, members)));
        const std::size_t m = members.size();
        for (std::size_t j = 0; j < m; ++j) {
            if (eig.values[j] <= tol) continue;
            ++out.projected_rank;
            for (std::size_t a = 0; a < m; ++a) {
                const double va = eig.vectors(a, j);
                for (std::size_t c = 0; c < m; ++c) sum(members[a], members[c]) += va * eig.vectors(c, j);
            }
        }
    }
    DenseMatrix corrected = k.matrix();
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = r; c < n; ++c) {
            const double delta = 0.5 * (sum(r, c) + sum(c, r));
            corrected.set_sym(r, c, k(r, c) - out.b * delta);
        }
    }
    out.corrected = Kernel(std::move(corrected));
    out.max_deviation = out.corrected.max_abs_difference(k);
    for (std::size_t x = 0; x < n; ++x)
        out.diagonal_shift = std::max(out.diagonal_shift, std::abs(out.corrected(x, x) - k(x, x)));
    return out;
}

struct RadiusChoice {
    Distance radius = 0;  // 0: no radius qualifies
    double b = 0.0;       // aggregate at the chosen radius
    double deviation_bound = 0.0;  // C = b * d^R at the chosen radius
    std::vector<double> b_by_radius;  // index R-1
};

// R_i = max{R in [1, min(diam, max_radius)] : b_R * d^R <= 1/R}.
inline RadiusChoice max_local_radius(const FiniteGraph& g, const Kernel& k, std::size_t degree_bound,
                                     Distance max_radius = kUnreachable, std::span<const char> alive = {}) {
    const Distance cap = std::min(diameter(g), max_radius);
    RadiusChoice out;
    for (Distance r = 1; r <= cap; ++r) {
        const double b = local_spectra(g, k, r, alive).aggregate;
        out.b_by_radius.push_back(b);
        const double c = b * std::pow(static_cast<double>(degree_bound), static_cast<double>(r));
        if (c <= 1.0 / static_cast<double>(r)) {
            out.radius = r;
            out.b = b;
            out.deviation_bound = c;
        }
    }
    return out;
}

inline std::vector<RadiusChoice> max_local_radius(const GraphSeq& seq, const std::vector<Kernel>& kernels,
                                                  Distance max_radius = kUnreachable) {
    if (kernels.size() != seq.size()) throw KernelError("kernel levels do not match sequence levels");
    std::vector<RadiusChoice> out;
    for (std::size_t i = 1; i <= seq.size(); ++i)
        out.push_back(max_local_radius(seq.level(i), kernels[i - 1], seq.degree_bound(), max_radius));
    return out;
}

// Row-major n x n retained-pair flags.
using PairMask = std::vector<char>;

struct ControlTable {
    // Indexed by shell l = 0..max nonempty shell.
    std::vector<std::optional<double>> raw_min;
    std::vector<std::optional<double>> raw_max;
    std::vector<double> rho1;  // inf_{l' >= l} raw_min(l')
    std::vector<double> rho2;  // max(sup_{l' <= l} raw_max(l'), rho1(l))
    std::vector<std::size_t> empty_shells;
};

namespace detail {

inline void accumulate_shells(const FiniteGraph& g, const Kernel& k, const PairMask* mask,
                              std::vector<std::optional<double>>& lo, std::vector<std::optional<double>>& hi) {
    DistanceMatrix dist(g);
    const std::size_t n = g.size();
    for (Vertex x = 0; x < n; ++x) {
        for (Vertex y = 0; y < n; ++y) {
            if (mask && !(*mask)[x * n + y]) continue;
            const std::size_t l = dist(x, y);
            if (l >= lo.size()) {
                lo.resize(l + 1);
                hi.resize(l + 1);
            }
            const double v = k(x, y);
            lo[l] = lo[l] ? std::min(*lo[l], v) : v;
            hi[l] = hi[l] ? std::max(*hi[l], v) : v;
        }
    }
}

inline ControlTable envelope(std::vector<std::optional<double>> lo, std::vector<std::optional<double>> hi) {
    while (!lo.empty() && !lo.back()) {
        lo.pop_back();
        hi.pop_back();
    }
    ControlTable t;
    const std::size_t shells = lo.size();
    t.rho1.assign(shells, 0.0);
    t.rho2.assign(shells, 0.0);
    double run_min = 0.0;
    for (std::size_t l = shells; l-- > 0;) {
        if (lo[l]) run_min = (l + 1 == shells) ? *lo[l] : std::min(run_min, *lo[l]);
        t.rho1[l] = run_min;
    }
    std::optional<double> run_max;
    for (std::size_t l = 0; l < shells; ++l) {
        if (hi[l]) run_max = run_max ? std::max(*run_max, *hi[l]) : *hi[l];
        else t.empty_shells.push_back(l);
        t.rho2[l] = run_max ? std::max(*run_max, t.rho1[l]) : t.rho1[l];
    }
    t.raw_min = std::move(lo);
    t.raw_max = std::move(hi);
    return t;
}

}  // namespace detail

struct ControlReport {
    std::vector<ControlTable> per_level;
    ControlTable pooled;
};

// Shell-wise kernel bounds over retained pairs, measured in the original
// graph metric. `masks`, when non-empty, holds one PairMask per level.
inline ControlReport control_functions(const GraphSeq& seq, const std::vector<Kernel>& kernels,
                                       const std::vector<PairMask>& masks = {}) {
    if (kernels.size() != seq.size()) throw KernelError("kernel levels do not match sequence levels");
    if (!masks.empty() && masks.size() != seq.size()) throw KernelError("mask levels do not match sequence levels");
    ControlReport out;
    std::vector<std::optional<double>> pool_lo, pool_hi;
    for (std::size_t i = 1; i <= seq.size(); ++i) {
        std::vector<std::optional<double>> lo, hi;
        const PairMask* mask = masks.empty() ? nullptr : &masks[i - 1];
        detail::accumulate_shells(seq.level(i), kernels[i - 1], mask, lo, hi);
        if (lo.size() > pool_lo.size()) {
            pool_lo.resize(lo.size());
            pool_hi.resize(hi.size());
        }
        for (std::size_t l = 0; l < lo.size(); ++l) {
            if (lo[l]) pool_lo[l] = pool_lo[l] ? std::min(*pool_lo[l], *lo[l]) : *lo[l];
            if (hi[l]) pool_hi[l] = pool_hi[l] ? std::max(*pool_hi[l], *hi[l]) : *hi[l];
        }
        out.per_level.push_back(detail::envelope(std::move(lo), std::move(hi)));
    }
    out.pooled = detail::envelope(std::move(pool_lo), std::move(pool_hi));
    return out;
}

struct OrderedPair {
    Vertex x;
    Vertex y;
    friend auto operator<=>(const OrderedPair&, const OrderedPair&) = default;
};

struct ShellThresholds {
    std::vector<OrderedPair> A;  // low outliers: K <= lower threshold
    std::vector<OrderedPair> B;  // high outliers: K >= upper threshold
    std::vector<Vertex> Z;       // vertices incident to A u B
    // Per shell k (index k, shell 0 unused): the chosen thresholds.
    // lower[k] = largest value put in A, upper[k] = least value put in B.
    std::vector<std::optional<double>> lower;
    std::vector<std::optional<double>> upper;
    std::vector<std::size_t> budget;  // floor(eps * |X_i| / 2^(k+1)) ordered pairs per side
    std::size_t removed_pairs = 0;    // |A u B|
    std::size_t level_size = 0;
    double mass = 0.0;                // |A u B| / |X_i|
    PairMask retained;                // complement of A u B (and of dead pairs)
};

// For each distance shell k >= 1, whole value classes are taken from the top
// (B) and from the bottom (A) while the lifted counting mass |pairs|/|X_i|
// stays within eps / 2^(k+1) per side, so |A u B| / |X_i| <= eps. Pairs are
// ordered; the diagonal is not thresholded. `alive` restricts to surviving
// vertices (pairs touching a dead vertex are neither counted nor retained).
inline ShellThresholds threshold_shells(const FiniteGraph& g, const Kernel& k, double epsilon,
                                        std::span<const char> alive = {}) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("threshold_shells needs eps > 0");
    const std::size_t n = g.size();
    DistanceMatrix dist(g);
    const Distance diam = dist.max();
    auto live = [&](Vertex v) { return alive.empty() || alive[v]; };

    std::vector<std::vector<std::pair<double, OrderedPair>>> shells(diam + 1);
    for (Vertex x = 0; x < n; ++x) {
        if (!live(x)) continue;
        for (Vertex y = 0; y < n; ++y) {
            if (x == y || !live(y)) continue;
            shells[dist(x, y)].push_back({k(x, y), {x, y}});
        }
    }

    ShellThresholds out;
    out.level_size = n;
    out.lower.resize(diam + 1);
    out.upper.resize(diam + 1);
    out.budget.assign(diam + 1, 0);
    out.retained.assign(n * n, 0);
    for (Vertex x = 0; x < n; ++x)
        for (Vertex y = 0; y < n; ++y) out.retained[x * n + y] = live(x) && live(y);

    std::vector<char> flagged(n * n, 0);
    for (Distance s = 1; s <= diam; ++s) {
        auto& shell = shells[s];
        const long double scaled = std::ldexp(static_cast<long double>(epsilon) * static_cast<long double>(n),
                                              -static_cast<int>(s + 1));
        const std::size_t cap = scaled >= static_cast<long double>(SIZE_MAX) ? SIZE_MAX
                                                                             : static_cast<std::size_t>(std::floor(scaled));
        out.budget[s] = cap;
        if (shell.empty()) continue;
        std::sort(shell.begin(), shell.end());

        // B: whole value classes from the top
        std::size_t take = 0;
        for (std::size_t end = shell.size(); end > 0;) {
            std::size_t begin = end;
            while (begin > 0 && shell[begin - 1].first == shell[end - 1].first) --begin;
            if (take + (end - begin) > cap) break;
            take += end - begin;
            end = begin;
        }
        for (std::size_t j = shell.size() - take; j < shell.size(); ++j) {
            out.B.push_back(shell[j].second);
            flagged[shell[j].second.x * n + shell[j].second.y] = 1;
        }
        if (take > 0) out.upper[s] = shell[shell.size() - take].first;

        // A: whole value classes from the bottom
        take = 0;
        for (std::size_t begin = 0; begin < shell.size();) {
            std::size_t end = begin;
            while (end < shell.size() && shell[end].first == shell[begin].first) ++end;
            if (take + (end - begin) > cap) break;
            take += end - begin;
            begin = end;
        }
        for (std::size_t j = 0; j < take; ++j) {
            out.A.push_back(shell[j].second);
            flagged[shell[j].second.x * n + shell[j].second.y] = 1;
        }
        if (take > 0) out.lower[s] = shell[take - 1].first;
    }
    std::sort(out.A.begin(), out.A.end());
    std::sort(out.B.begin(), out.B.end());

    std::vector<char> incident(n, 0);
    for (Vertex x = 0; x < n; ++x) {
        for (Vertex y = 0; y < n; ++y) {
            if (!flagged[x * n + y]) continue;
            ++out.removed_pairs;
            out.retained[x * n + y] = 0;
            incident[x] = incident[y] = 1;
        }
    }
    for (Vertex v = 0; v < n; ++v)
        if (incident[v]) out.Z.push_back(v);
    out.mass = static_cast<double>(out.removed_pairs) / static_cast<double>(n);
    return out;
}

inline std::vector<ShellThresholds> threshold_shells(const GraphSeq& seq, const std::vector<Kernel>& kernels,
                                                     double epsilon) {
    if (kernels.size() != seq.size()) throw KernelError("kernel levels do not match sequence levels");
    std::vector<ShellThresholds> out;
    for (std::size_t i = 1; i <= seq.size(); ++i) out.push_back(threshold_shells(seq.level(i), kernels[i - 1], epsilon));
    return out;
}

struct SpectralRemoval {
    double a = 0.0;                // least a >= 0 with |Z^a| <= |X_i| / i
    std::vector<Vertex> Z;         // {x : b(x) > a}
    std::vector<double> b;         // per-vertex local spectra
    std::vector<char> alive;       // complement of Z
};

// `level` is the 1-based index i; the removal budget is floor(|X_i| / i).
inline SpectralRemoval spectral_removal_set(const FiniteGraph& g, const Kernel& k, Distance radius, std::size_t level) {
    if (level == 0) throw std::invalid_argument("levels are 1-based");
    auto rep = local_spectra(g, k, radius);
    SpectralRemoval out;
    out.b = rep.b;
    const std::size_t budget = g.size() / level;
    if (budget < g.size()) {
        auto sorted = rep.b;
        std::sort(sorted.begin(), sorted.end(), std::greater<>());
        out.a = std::max(0.0, sorted[budget]);
    }
    out.alive.assign(g.size(), 1);
    for (Vertex x = 0; x < g.size(); ++x) {
        if (rep.b[x] > out.a) {
            out.Z.push_back(x);
            out.alive[x] = 0;
        }
    }
    return out;
}

inline std::vector<SpectralRemoval> spectral_removal_set(const GraphSeq& seq, const std::vector<Kernel>& kernels,
                                                         Distance radius) {
    if (kernels.size() != seq.size()) throw KernelError("kernel levels do not match sequence levels");
    std::vector<SpectralRemoval> out;
    for (std::size_t i = 1; i <= seq.size(); ++i)
        out.push_back(spectral_removal_set(seq.level(i), kernels[i - 1], radius, i));
    return out;
}

class NotCndError : public KernelError {
public:
    using KernelError::KernelError;
};

struct GnsEmbedding {
    Vertex basepoint = 0;
    std::size_t dimension = 0;
    std::vector<std::vector<double>> coordinates;  // f(x) in R^dimension
    double max_defect = 0.0;
    double min_gram_eigenvalue = 0.0;

    double squared_distance(Vertex x, Vertex y) const {
        double s = 0.0;
        for (std::size_t j = 0; j < dimension; ++j) {
            const double d = coordinates[x][j] - coordinates[y][j];
            s += d * d;
        }
        return s;
    }
};

// Gram matrix of the form <f,g> = -1/2 sum K(x,y) f(x) g(y) on the vectors
// delta_x - delta_{x0}; factor G = V V^T so that
// ||f(x) - f(y)||^2 = K(x,y) - K(x,x)/2 - K(y,y)/2. Eigenvalues within
// tol * max(1, ||G||_F) of zero are clamped; anything more negative means
// K is not CND and the embedding is refused.
inline GnsEmbedding gns_embed(const Kernel& k, Vertex basepoint, double tol = kSpectralTol) {
    const std::size_t n = k.size();
    if (basepoint >= n) throw std::out_of_range("basepoint out of range");
    DenseMatrix gram(n);
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = x; y < n; ++y)
            gram.set_sym(x, y, -0.5 * (k(x, y) - k(x, basepoint) - k(basepoint, y) + k(basepoint, basepoint)));
    const double cut = tol * std::max(1.0, gram.frobenius());
    auto eig = jacobi_eigen(gram);
    GnsEmbedding out;
    out.basepoint = basepoint;
    out.min_gram_eigenvalue = n ? eig.values.front() : 0.0;
    if (n && eig.values.front() < -cut) {
        throw NotCndError("kernel is not conditionally negative definite (Gram eigenvalue " +
                          std::to_string(eig.values.front()) + ")");
    }
    std::vector<std::size_t> kept;
    for (std::size_t j = 0; j < n; ++j)
        if (eig.values[j] > cut) kept.push_back(j);
    out.dimension = kept.size();
    out.coordinates.assign(n, std::vector<double>(kept.size(), 0.0));
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t c = 0; c < kept.size(); ++c)
            out.coordinates[x][c] = eig.vectors(x, kept[c]) * std::sqrt(eig.values[kept[c]]);
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = x + 1; y < n; ++y) {
            const double expected = k(x, y) - 0.5 * k(x, x) - 0.5 * k(y, y);
            out.max_defect = std::max(out.max_defect, std::abs(out.squared_distance(x, y) - expected));
        }
    }
    return out;
}

}  // namespace coarse
