// cnd_oracle.hpp - CND check that shares no code with the Jacobi path:
// shifted power iteration on the zero-sum subspace plus random sampling of
// zero-sum coefficient vectors.
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "coarse/graph.hpp"
#include "coarse/kernels.hpp"
#include "coarse/random.hpp"

namespace coarse {

struct OracleOptions {
    std::uint64_t seed = 1;
    std::size_t samples = 10000;
    std::size_t max_iterations = 200000;
    double tol = kSpectralTol;
};

namespace detail {

inline void project_zero_sum(std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    for (double& x : v) x -= mean;
}

inline double normalize(std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    s = std::sqrt(s);
    if (s > 0.0)
        for (double& x : v) x /= s;
    return s;
}

inline double quadratic_form(const std::vector<std::vector<double>>& a, const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < v.size(); ++j) row += a[i][j] * v[j];
        s += v[i] * row;
    }
    return s;
}

// Largest eigenvalue of the form restricted to zero-sum vectors. The
// constant direction is deflated by re-projecting every iterate; the shift
// s = max row sum + 1 makes the iteration converge to the top of the
// spectrum rather than the largest magnitude.
inline double power_top(const std::vector<std::vector<double>>& a, Rng& rng, std::size_t max_iterations) {
    const std::size_t m = a.size();
    if (m <= 1) return 0.0;
    double shift = 0.0;
    for (const auto& row : a) {
        double s = 0.0;
        for (double x : row) s += std::abs(x);
        shift = std::max(shift, s);
    }
    shift += 1.0;
    std::vector<double> v(m), w(m);
    for (double& x : v) x = rng.uniform(-1.0, 1.0);
    project_zero_sum(v);
    normalize(v);
    double mu = -shift;
    for (std::size_t it = 0; it < max_iterations; ++it) {
        for (std::size_t i = 0; i < m; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < m; ++j) row += a[i][j] * v[j];
            w[i] = row;
        }
        project_zero_sum(w);
        double rayleigh = 0.0, resid = 0.0;
        for (std::size_t i = 0; i < m; ++i) rayleigh += v[i] * w[i];
        for (std::size_t i = 0; i < m; ++i) resid += (w[i] - rayleigh * v[i]) * (w[i] - rayleigh * v[i]);
        mu = rayleigh;
        if (std::sqrt(resid) <= 1e-13 * shift) break;
        for (std::size_t i = 0; i < m; ++i) w[i] += shift * v[i];
        project_zero_sum(w);
        normalize(w);
        std::swap(v, w);
    }
    return mu;
}

}  // namespace detail

struct OracleVerdict {
    bool cnd = true;
    double power_top = 0.0;       // max over balls
    double max_sampled_form = 0.0;  // max over balls and samples (unit vectors)
};

// `radius` empty means the global test over all vertices.
inline OracleVerdict cnd_oracle(const FiniteGraph& g, const Kernel& k, std::optional<Distance> radius,
                                const OracleOptions& opt = {}) {
    Rng rng(opt.seed);
    OracleVerdict out{true, -INFINITY, -INFINITY};
    std::vector<std::vector<Vertex>> supports;
    if (radius) {
        for (Vertex x = 0; x < g.size(); ++x) supports.push_back(ball(g, x, *radius));
    } else {
        std::vector<Vertex> all(g.size());
        for (Vertex v = 0; v < g.size(); ++v) all[v] = v;
        supports.push_back(std::move(all));
    }
    for (const auto& members : supports) {
        const std::size_t m = members.size();
        if (m <= 1) {
            out.power_top = std::max(out.power_top, 0.0);
            continue;
        }
        std::vector<std::vector<double>> a(m, std::vector<double>(m));
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) a[i][j] = k(members[i], members[j]);
        out.power_top = std::max(out.power_top, detail::power_top(a, rng, opt.max_iterations));
        std::vector<double> v(m);
        for (std::size_t s = 0; s < opt.samples; ++s) {
            for (double& x : v) x = rng.uniform(-1.0, 1.0);
            detail::project_zero_sum(v);
            if (detail::normalize(v) == 0.0) continue;
            out.max_sampled_form = std::max(out.max_sampled_form, detail::quadratic_form(a, v));
        }
    }
    out.cnd = out.power_top <= opt.tol && !(out.max_sampled_form > opt.tol);
    return out;
}

}  // namespace coarse
