// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "coarse/cnd_oracle.hpp"
#include "coarse/pipeline.hpp"
#include "oracles.hpp"

using namespace coarse;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& check) {
    Outcome out;
    try {
        out = check();
    } catch (const std::exception& e) {
        out = {false, std::string("exception: ") + e.what()};
    }
    if (!out.pass) ++failures;
    std::printf("[%s] %2d %s: %s\n", out.pass ? "PASS" : "FAIL", id, title.c_str(), out.detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

Partition searched(const FiniteGraph& g, std::size_t K) { return refine_local_search(g, carve_greedy(g, K)); }

Kernel noisy_metric(const FiniteGraph& g, double noise, Rng& rng) {
    Kernel k = metric_kernel(g);
    for (Vertex x = 0; x < g.size(); ++x)
        for (Vertex y = x; y < g.size(); ++y) k.set(x, y, k(x, y) + rng.uniform(-noise, noise));
    return k;
}

Kernel squared_euclidean(std::size_t n, Rng& rng) {
    std::vector<std::array<double, 3>> p(n);
    for (auto& q : p)
        for (auto& c : q) c = rng.uniform(-2.0, 2.0);
    Kernel k(n);
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = x; y < n; ++y) {
            double s = 0.0;
            for (int c = 0; c < 3; ++c) s += (p[x][c] - p[y][c]) * (p[x][c] - p[y][c]);
            k.set(x, y, s);
        }
    return k;
}

// Certificates collected by criteria 1, 2 and 10 for the conversion check.
std::vector<std::pair<FiniteGraph, Partition>> corpus;

// Expander contrast goldens, recorded from the first verified run.
constexpr std::size_t kExpanderCut = 242;
constexpr std::size_t kCycleCut = 11;

Outcome hyperfinite_cycles() {
    const auto t0 = Clock::now();
    double worst = 0.0;
    std::vector<std::pair<FiniteGraph, Partition>> found;
    for (std::size_t n = 100; n <= 1000; n += 100) {
        auto g = cycle_graph(n);
        auto p = carve_greedy(g, 30);
        worst = std::max(worst, p.cut_ratio);
        found.emplace_back(std::move(g), std::move(p));
    }
    const double ms = ms_since(t0);
    corpus.insert(corpus.end(), found.begin(), found.end());
    return {worst <= 0.1 && ms < 1000.0, fmt("max cut ratio %.6f (limit 0.1), %.1f ms (limit 1000 ms)", worst, ms)};
}

Outcome oracle_sandwich() {
    std::size_t graphs = 0, below = 0, unequal_cycle_path = 0, oracle_mismatch = 0;
    auto check = [&](const FiniteGraph& g, bool must_equal) {
        ++graphs;
        for (std::size_t K : {2u, 3u, 4u}) {
            auto p = searched(g, K);
            const auto best = brute_force_optimal(g, K).cut();
            if (best != oracle::min_cut_exhaustive(g, K)) ++oracle_mismatch;
            if (p.cut() < best) ++below;
            if (must_equal && p.cut() != best) ++unequal_cycle_path;
            corpus.emplace_back(g, std::move(p));
        }
    };
    for (std::size_t n = 1; n <= 6; ++n)
        for (const auto& edges : oracle::connected_graphs_up_to_iso(n)) check(FiniteGraph::from_edges(n, edges), false);
    std::mt19937_64 rng(2718);
    for (std::size_t n : {7u, 8u})
        for (int t = 0; t < 60; ++t) check(FiniteGraph::from_edges(n, oracle::random_connected(n, rng() % 8, rng)), false);
    for (std::size_t n = 2; n <= 8; ++n) {
        check(path_graph(n), true);
        if (n >= 3) check(cycle_graph(n), true);
    }
    return {below == 0 && unequal_cycle_path == 0 && oracle_mismatch == 0,
            fmt("%zu graphs x K in {2,3,4}: %zu below optimum, %zu cycle/path gaps, %zu brute-force/oracle mismatches",
                graphs, below, unequal_cycle_path, oracle_mismatch)};
}

Outcome propa_arithmetic() {
    const auto t0 = Clock::now();
    double worst_max = 0.0, worst_avg = 0.0;
    std::size_t invalid = 0;
    for (Distance S = 1; S <= 10; ++S) {
        const double expect_max = 2.0 / (2.0 * S + 1.0), expect_avg = 4.0 / (2.0 * S + 1.0);
        for (std::size_t n : {std::size_t(2 * S + 2), std::size_t(2 * S + 3), std::size_t(4 * S + 5), std::size_t(200)}) {
            auto g = cycle_graph(n);
            auto v = measure_variation(g, uniform_ball_witness(g, S));
            invalid += !v.structurally_valid();
            worst_max = std::max(worst_max, std::abs(v.max_variation - expect_max));
            worst_avg = std::max(worst_avg, std::abs(v.average_variation - expect_avg));
        }
    }
    const double ms = ms_since(t0);
    return {worst_max <= 1e-12 && worst_avg <= 1e-12 && invalid == 0 && ms < 1000.0,
            fmt("max |var - 2/(2S+1)| = %.2e, max |avg - 4/(2S+1)| = %.2e (tol 1e-12), %zu invalid, %.1f ms", worst_max,
                worst_avg, invalid, ms)};
}

Outcome conversion_bound() {
    std::mt19937_64 rng(99);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 10 + rng() % 200;
        auto g = FiniteGraph::from_edges(n, oracle::random_connected(n, rng() % n, rng));
        auto p = searched(g, 2 + rng() % 20);
        corpus.emplace_back(std::move(g), std::move(p));
    }
    std::size_t violations = 0;
    for (const auto& [g, p] : corpus) {
        auto r = partition_to_removal(g, p);
        if (r.Z.size() > 2 * g.degree_bound() * p.cut()) ++violations;
        for (auto s : components_after_removal(g, r.Z))
            if (s >= p.K) ++violations;
    }
    return {violations == 0, fmt("%zu certificates, %zu violations of |Z| <= 2d|E| or component cap", corpus.size(), violations)};
}

Outcome correction_soundness() {
    const auto t0 = Clock::now();
    double worst_post = 0.0, worst_slack = -INFINITY, max_b = 0.0;
    std::size_t corrected = 0, bound_violations = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        auto g = random_regular_graph(200, 3, seed);
        Rng rng(seed);
        auto k = noisy_metric(g, 0.05 * static_cast<double>(1 + seed % 10), rng);
        auto corr = correct_kernel(g, k, 3);
        const double post = local_spectra(g, corr.corrected, 3).aggregate;
        worst_post = std::max(worst_post, post);
        const double bound = corr.b * 27.0;
        if (corr.max_deviation > bound) ++bound_violations;
        worst_slack = std::max(worst_slack, corr.max_deviation - bound);
        max_b = std::max(max_b, corr.b);
        corrected += corr.b > 0.0;
    }
    const double s = ms_since(t0) / 1000.0;
    return {worst_post <= 1e-9 && bound_violations == 0 && s < 30.0,
            fmt("max post-correction b' = %.2e (limit 1e-9), %zu/100 kernels corrected (max b %.3f), "
                "max deviation - 27b = %.3e, %.2f s (limit 30 s)",
                worst_post, corrected, max_b, worst_slack, s)};
}

Outcome oracle_equivalence() {
    Rng rng(606);
    std::size_t disagreements = 0, positives = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 3 + rng.below(10);
        std::mt19937_64 shape(static_cast<std::uint64_t>(trial));
        auto g = FiniteGraph::from_edges(n, oracle::random_connected(n, shape() % 6, shape));
        Kernel k;
        switch (trial % 3) {
            case 0: k = squared_euclidean(n, rng); break;
            case 1: k = noisy_metric(g, 0.5, rng); break;
            default: k = metric_kernel(g); break;
        }
        const Distance R = 1 + static_cast<Distance>(trial % 3);
        const bool mine = is_locally_cnd(g, k, R).cnd;
        positives += mine;
        disagreements += mine != cnd_oracle(g, k, R, {static_cast<std::uint64_t>(trial)}).cnd;
    }
    return {disagreements == 0, fmt("100 kernels (%zu locally CND), %zu disagreements", positives, disagreements)};
}

Outcome gns_roundtrip() {
    double worst_defect = 0.0, worst_end = 0.0;
    std::size_t not_cnd = 0;
    for (std::size_t n = 2; n <= 50; ++n) {
        auto g = path_graph(n);
        auto k = metric_kernel(g);
        if (!cnd_oracle(g, k, std::nullopt, {n}).cnd) ++not_cnd;
        auto e = gns_embed(k, 0);
        worst_defect = std::max(worst_defect, e.max_defect);
        worst_end = std::max(worst_end, std::abs(e.squared_distance(0, static_cast<Vertex>(n - 1)) - double(n - 1)));
    }
    return {not_cnd == 0 && worst_defect <= 1e-8 && worst_end <= 1e-8,
            fmt("P_2..P_50: %zu oracle CND failures, max defect %.2e, max |f(0)-f(n-1)|^2 - (n-1)| %.2e (tol 1e-8)",
                not_cnd, worst_defect, worst_end)};
}

// mass <= eps as an exact rational: removed * den <= num * n.
bool mass_within(const ShellThresholds& s, std::uint64_t num, std::uint64_t den) {
    return static_cast<std::uint64_t>(s.removed_pairs) * den <= num * static_cast<std::uint64_t>(s.level_size);
}

Outcome shell_thresholds() {
    std::vector<std::string> wrong;
    auto g = cycle_graph(100);
    auto clean = metric_kernel(g);
    for (double eps : {0.1, 1.0, 2.0, 4.0}) {
        auto s = threshold_shells(g, clean, eps);
        if (!s.A.empty() || !s.B.empty() || !s.Z.empty()) wrong.push_back(fmt("metric eps=%g", eps));
    }
    const std::vector<OrderedPair> outlier{{0, 5}, {5, 0}};
    const std::vector<Vertex> ends{0, 5};
    auto high = clean;
    high.set(0, 5, 1000.0);
    // shell 5 budget floor(eps * 100 / 64): 3 pairs at eps = 2 (the 2-pair class fits), 1 at eps = 1
    auto s2 = threshold_shells(g, high, 2.0);
    if (!s2.A.empty() || s2.B != outlier || s2.Z != ends) wrong.push_back("high outlier eps=2");
    auto s1 = threshold_shells(g, high, 1.0);
    if (!s1.A.empty() || !s1.B.empty() || !s1.Z.empty()) wrong.push_back("high outlier eps=1");
    auto low = clean;
    low.set(0, 5, -1000.0);
    auto sl = threshold_shells(g, low, 2.0);
    if (sl.A != outlier || !sl.B.empty() || sl.Z != ends) wrong.push_back("low outlier eps=2");

    std::size_t mass_checks = 0, mass_failures = 0;
    Rng rng(808);
    for (int t = 0; t < 50; ++t) {
        const std::size_t n = 10 + rng.below(60);
        std::mt19937_64 shape(static_cast<std::uint64_t>(t));
        auto h = FiniteGraph::from_edges(n, oracle::random_connected(n, shape() % n, shape));
        auto k = noisy_metric(h, 0.4, rng);
        for (std::uint64_t num : {1u, 3u, 8u}) {  // eps = num / 4
            ++mass_checks;
            mass_failures += !mass_within(threshold_shells(h, k, static_cast<double>(num) / 4.0), num, 4);
        }
    }
    for (const auto* s : {&s2, &s1, &sl}) {
        ++mass_checks;
        mass_failures += !mass_within(*s, s == &s1 ? 1 : 2, 1);
    }
    std::string bad;
    for (const auto& w : wrong) bad += (bad.empty() ? "" : ", ") + w;
    return {wrong.empty() && mass_failures == 0,
            fmt("predicted A/B/Z sets %s; %zu/%zu exact mass checks hold", wrong.empty() ? "all match" : bad.c_str(),
                mass_checks - mass_failures, mass_checks)};
}

Outcome sofic_diagnostics() {
    const std::vector<Word> F{{1}, {1, 1}, {-1}};
    std::size_t nonzero = 0, not_single = 0;
    for (std::size_t n = 3; n <= 200; ++n)
        if (injectivity_report(PermAction::cyclic_shift(n), F).epsilon() != 0.0) ++nonzero;
    for (std::size_t n = 8; n <= 200; ++n) {
        auto prof = ball_profile(cycle_graph(n), 3);
        if (prof.classes.size() != 1 || prof.classes[0].frequency != 1.0) ++not_single;
    }
    return {nonzero == 0 && not_single == 0,
            fmt("shift actions n=3..200: %zu with eps != 0; C_8..C_200 R=3 profiles: %zu not a single class of frequency 1",
                nonzero, not_single)};
}

Outcome expander_contrast() {
    auto expander = random_regular_graph(500, 3, 11);
    auto cycle = cycle_graph(500);
    auto pe = searched(expander, 50), pc = searched(cycle, 50);
    corpus.emplace_back(expander, pe);
    corpus.emplace_back(cycle, pc);
    const double factor = pe.cut_ratio / pc.cut_ratio;
    const bool golden = pe.cut() == kExpanderCut && pc.cut() == kCycleCut;
    return {factor >= 5.0 && golden,
            fmt("random 3-regular cut %zu/%zu = %.6f, C_500 cut %zu/%zu = %.6f, factor %.2f (limit 5), goldens %s",
                pe.cut(), expander.edge_count(), pe.cut_ratio, pc.cut(), cycle.edge_count(), pc.cut_ratio, factor,
                golden ? "match" : "DIFFER")};
}

Outcome determinism() {
    const std::vector<std::string> configs{
        "sizes = 100:1000:100\nanalyses = hyperfinite\nK = 30\nrefine = false\n",
        "sizes = 22,23,45,200\nanalyses = propa\nS = 10\n",
        "family = random_regular\nseed = 1\nsizes = 200,200\nnoise = 0.1\nR = 3\nanalyses = kernel\n",
        "family = path\nsizes = 2:50:8\nanalyses = embed\n",
        "family = random_regular\nseed = 5\nsizes = 40,80\nnoise = 0.2\nweak = true\nepsilon = 2\nanalyses = embed\n",
        "sizes = 8:200:32\naction = shift\nwords = 1; 1 1; -1\nR = 3\nreference = cycle 20\nanalyses = sofic,bs-profile\n",
        "family = random_regular\nseed = 11\nsizes = 500\nK = 50\nanalyses = hyperfinite\n",
    };
    std::size_t differing = 0;
    for (const auto& cfg : configs) {
        const auto a = to_json_text(run(parse_config(cfg)));
        const auto b = to_json_text(run(parse_config(cfg)));
        differing += a != b;
    }
    return {differing == 0, fmt("%zu pipeline configurations re-run, %zu with differing JSON", configs.size(), differing)};
}

}  // namespace

int main() {
    report(1, "hyperfinite cycles", hyperfinite_cycles);
    report(2, "oracle sandwich", oracle_sandwich);
    report(3, "property-A arithmetic", propa_arithmetic);
    report(4, "conversion bound", conversion_bound);
    report(5, "correction soundness", correction_soundness);
    report(6, "oracle equivalence", oracle_equivalence);
    report(7, "GNS roundtrip", gns_roundtrip);
    report(8, "shell thresholds", shell_thresholds);
    report(9, "sofic diagnostics", sofic_diagnostics);
    report(10, "expander contrast", expander_contrast);
    report(11, "determinism", determinism);
    std::printf("%d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
