// pipeline.hpp - configuration, analysis orchestration, and reports.
//
// A configuration is a key = value text file ('#' starts a comment). The
// same keys are accepted as CLI flags. Reports are JSON (the source of
// truth) with an optional flat CSV view per analysis. Verdicts are always
// finite-stage statements: "statistic below threshold at every level >= L0".
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "coarse/ball_profile.hpp"
#include "coarse/embedding.hpp"
#include "coarse/generators.hpp"
#include "coarse/graph.hpp"
#include "coarse/hyperfinite.hpp"
#include "coarse/io.hpp"
#include "coarse/kernels.hpp"
#include "coarse/propa.hpp"
#include "coarse/random.hpp"

namespace coarse {

inline constexpr const char* kToolName = "coarse-cert";
inline constexpr const char* kToolVersion = "0.1.0";

using Json = nlohmann::ordered_json;

// Invalid configuration; `field` names the offending key.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& message)
        : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct PipelineConfig {
    // sequence source
    std::string family = "cycle";  // a generator family, or "files"
    std::vector<std::size_t> sizes;
    std::size_t degree = 3;        // random_regular
    std::optional<std::uint64_t> seed;
    std::string sequence;          // family = files

    std::vector<std::string> analyses;

    double epsilon = 0.1;
    std::size_t K = 30;
    Distance S = 3;
    Distance R = 2;
    std::size_t L0 = 1;
    bool refine = true;
    std::size_t max_iters = 100000;
    std::vector<Distance> s_schedule;  // almost-A: radius of the witness for k = 1, 2, ...

    double noise = 0.0;         // symmetric uniform noise added to metric kernels
    Distance max_radius = 0;    // 0: search up to the diameter
    bool weak = false;
    Distance removal_radius = 1;

    std::string action = "shift";  // shift | grid | random
    std::size_t generators = 2;    // random actions
    std::vector<Word> words;       // empty: all reduced words of length <= 2

    std::optional<GraphSpec> reference;  // bs-profile reference rooted ball
    Vertex reference_root = 0;

    std::string output;
    std::map<std::string, std::string> echo;  // normalized key -> value as given
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline std::uint64_t parse_uint(const std::string& field, const std::string& v) {
    try {
        std::size_t pos = 0;
        if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative");
        const auto x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(field, "expected a non-negative integer, got '" + v + "'");
    }
}

inline double parse_double(const std::string& field, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(field, "expected a number, got '" + v + "'");
    }
}

inline bool parse_bool(const std::string& field, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(field, "expected true/false, got '" + v + "'");
}

// "a:b:c" (start:stop:step, inclusive) or "a,b,c".
inline std::vector<std::size_t> parse_sizes(const std::string& v) {
    std::vector<std::size_t> out;
    if (v.find(':') != std::string::npos) {
        auto parts = split(v, ':');
        if (parts.size() != 3) throw ConfigError("sizes", "range must be start:stop:step");
        const auto a = parse_uint("sizes", parts[0]), b = parse_uint("sizes", parts[1]), c = parse_uint("sizes", parts[2]);
        if (c == 0) throw ConfigError("sizes", "step must be positive");
        for (auto x = a; x <= b; x += c) out.push_back(static_cast<std::size_t>(x));
    } else {
        for (const auto& p : split(v, ',')) out.push_back(static_cast<std::size_t>(parse_uint("sizes", p)));
    }
    if (out.empty()) throw ConfigError("sizes", "no sizes given");
    return out;
}

inline std::vector<Word> parse_words(const std::string& v) {
    std::vector<Word> out;
    for (const auto& item : split(v, ';')) {
        std::istringstream in(item);
        Word w;
        int letter;
        while (in >> letter) {
            if (letter == 0) throw ConfigError("words", "letter 0 is not a generator");
            w.push_back(letter);
        }
        if (!in.eof()) throw ConfigError("words", "non-integer letter in '" + item + "'");
        out.push_back(std::move(w));
    }
    return out;
}

inline const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "family", "sizes", "degree", "seed", "sequence", "analyses", "epsilon", "K", "S", "R", "L0", "refine",
        "max_iters", "s_schedule", "noise", "max_radius", "weak", "removal_radius", "action", "generators", "words",
        "reference", "reference_root", "output"};
    return keys;
}

inline const std::set<std::string>& known_analyses() {
    static const std::set<std::string> names{"propa", "hyperfinite", "kernel", "embed", "sofic", "bs-profile"};
    return names;
}

}  // namespace detail

inline std::map<std::string, std::string> parse_key_values(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno), "expected 'key = value'");
        kv[detail::trim(line.substr(0, eq))] = detail::trim(line.substr(eq + 1));
    }
    return kv;
}

inline PipelineConfig make_config(const std::map<std::string, std::string>& kv) {
    using namespace detail;
    PipelineConfig c;
    for (const auto& [key, value] : kv) {
        if (!known_keys().count(key)) throw ConfigError(key, "unknown key");
        c.echo[key] = value;
    }
    auto get = [&](const std::string& key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        return it->second;
    };
    if (auto v = get("family")) c.family = *v;
    if (c.family != "files" && !parse_family(c.family)) throw ConfigError("family", "unknown family '" + c.family + "'");
    if (auto v = get("sizes")) c.sizes = parse_sizes(*v);
    if (auto v = get("degree")) c.degree = parse_uint("degree", *v);
    if (auto v = get("seed")) c.seed = parse_uint("seed", *v);
    if (auto v = get("sequence")) c.sequence = *v;
    if (auto v = get("analyses")) c.analyses = split(*v, ',');
    for (const auto& a : c.analyses)
        if (!known_analyses().count(a)) throw ConfigError("analyses", "unknown analysis '" + a + "'");
    if (auto v = get("epsilon")) c.epsilon = parse_double("epsilon", *v);
    if (auto v = get("K")) c.K = parse_uint("K", *v);
    if (auto v = get("S")) c.S = static_cast<Distance>(parse_uint("S", *v));
    if (auto v = get("R")) c.R = static_cast<Distance>(parse_uint("R", *v));
    if (auto v = get("L0")) c.L0 = parse_uint("L0", *v);
    if (auto v = get("refine")) c.refine = parse_bool("refine", *v);
    if (auto v = get("max_iters")) c.max_iters = parse_uint("max_iters", *v);
    if (auto v = get("s_schedule"))
        for (const auto& p : split(*v, ',')) c.s_schedule.push_back(static_cast<Distance>(parse_uint("s_schedule", p)));
    if (auto v = get("noise")) c.noise = parse_double("noise", *v);
    if (auto v = get("max_radius")) c.max_radius = static_cast<Distance>(parse_uint("max_radius", *v));
    if (auto v = get("weak")) c.weak = parse_bool("weak", *v);
    if (auto v = get("removal_radius")) c.removal_radius = static_cast<Distance>(parse_uint("removal_radius", *v));
    if (auto v = get("action")) c.action = *v;
    if (auto v = get("generators")) c.generators = parse_uint("generators", *v);
    if (auto v = get("words")) c.words = parse_words(*v);
    if (auto v = get("reference")) {
        try {
            c.reference = parse_graph_spec(*v);
        } catch (const std::exception& e) {
            throw ConfigError("reference", e.what());
        }
    }
    if (auto v = get("reference_root")) c.reference_root = static_cast<Vertex>(parse_uint("reference_root", *v));
    if (auto v = get("output")) c.output = *v;

    // cross-field preconditions
    if (c.family == "files" && c.sequence.empty()) throw ConfigError("sequence", "family = files needs a sequence file");
    if (c.family != "files" && c.sizes.empty() && !c.analyses.empty()) throw ConfigError("sizes", "no sizes given");
    if (!(c.epsilon > 0.0)) throw ConfigError("epsilon", "must be > 0");
    if (c.K < 2) throw ConfigError("K", "must be >= 2 (blocks have size < K)");
    if (c.R < 1) throw ConfigError("R", "must be >= 1");
    if (c.L0 < 1) throw ConfigError("L0", "levels are 1-based");
    if (c.removal_radius < 1) throw ConfigError("removal_radius", "must be >= 1");
    if (c.noise < 0.0) throw ConfigError("noise", "must be >= 0");
    if (c.action != "shift" && c.action != "grid" && c.action != "random") {
        throw ConfigError("action", "expected shift, grid, or random");
    }
    const bool random_family = c.family == "random_regular";
    const bool random_action = c.action == "random" &&
                               std::find(c.analyses.begin(), c.analyses.end(), "sofic") != c.analyses.end();
    if ((random_family || c.noise > 0.0 || random_action) && !c.seed) {
        throw ConfigError("seed", "a seed is mandatory when randomness is used");
    }
    return c;
}

inline PipelineConfig parse_config(const std::string& text) { return make_config(parse_key_values(text)); }

inline GraphSeq build_sequence(const PipelineConfig& c) {
    if (c.family == "files") return io::read_sequence(c.sequence);
    const Family fam = *parse_family(c.family);
    std::vector<FiniteGraph> levels;
    for (std::size_t i = 0; i < c.sizes.size(); ++i) {
        GraphSpec spec{fam, c.sizes[i], 0, 0};
        if (fam == Family::torus) spec.b = c.sizes[i];
        if (fam == Family::random_regular) {
            spec.b = c.degree;
            spec.seed = *c.seed + i;
        }
        levels.push_back(generate(spec));
    }
    return GraphSeq(std::move(levels));
}

// Metric kernel plus symmetric uniform noise in [-noise, noise] (diagonal
// included), seeded per level.
inline std::vector<Kernel> build_kernels(const GraphSeq& seq, double noise, std::uint64_t seed) {
    std::vector<Kernel> out;
    for (std::size_t i = 1; i <= seq.size(); ++i) {
        Kernel k = metric_kernel(seq.level(i));
        if (noise > 0.0) {
            Rng rng(seed * 1000003ULL + i);
            for (std::size_t x = 0; x < k.size(); ++x)
                for (std::size_t y = x; y < k.size(); ++y) k.set(x, y, k(x, y) + rng.uniform(-noise, noise));
        }
        out.push_back(std::move(k));
    }
    return out;
}

namespace detail {

inline Json verdict(const std::string& statement, bool holds, std::size_t L0, double threshold, double tolerance) {
    return {{"statement", statement}, {"holds", holds}, {"tail_cutoff", L0}, {"threshold", threshold},
            {"tolerance", tolerance}};
}

inline std::vector<double> tail_sup(const std::vector<double>& v) {
    std::vector<double> out(v.size());
    double run = -INFINITY;
    for (std::size_t i = v.size(); i-- > 0;) out[i] = run = std::max(run, v[i]);
    return out;
}

inline std::vector<std::size_t> level_ids(std::size_t n) {
    std::vector<std::size_t> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = i + 1;
    return ids;
}

inline bool all_from(const std::vector<double>& v, std::size_t L0, double threshold, bool strict) {
    for (std::size_t i = L0; i <= v.size(); ++i)
        if (strict ? !(v[i - 1] < threshold) : v[i - 1] > threshold) return false;
    return true;
}

// Partition search used by hyperfinite and sofic analyses.
inline Partition search_partition(const FiniteGraph& g, const PipelineConfig& c, std::size_t* greedy_cut = nullptr) {
    auto p = carve_greedy(g, c.K);
    if (greedy_cut) *greedy_cut = p.cut();
    if (c.refine) p = refine_local_search(g, p, c.max_iters);
    return p;
}

inline Json hyperfinite_analysis(const GraphSeq& seq, const PipelineConfig& c) {
    PartitionCert cert;
    std::vector<std::size_t> greedy;
    for (const auto& g : seq.levels()) {
        std::size_t gc = 0;
        cert.push_back(search_partition(g, c, &gc));
        greedy.push_back(gc);
    }
    auto ver = verify_partition(seq, cert, c.epsilon, c.L0);
    std::vector<std::size_t> n, blocks, zsize;
    std::vector<double> zdens;
    std::vector<bool> bound_ok;
    for (std::size_t i = 1; i <= seq.size(); ++i) {
        const auto& g = seq.level(i);
        n.push_back(g.size());
        blocks.push_back(block_sizes(cert[i - 1].block).size());
        auto rem = partition_to_removal(g, cert[i - 1]);
        zsize.push_back(rem.Z.size());
        zdens.push_back(rem.density);
        bound_ok.push_back(rem.Z.size() <= 2 * seq.degree_bound() * cert[i - 1].cut());
    }
    Json per_level = {{"level", level_ids(seq.size())}, {"n", n},          {"greedy_cut", greedy},
                      {"cut", ver.cuts},                {"cut_ratio", ver.ratios}, {"tail_sup", ver.tail_sup},
                      {"max_block", ver.max_block},     {"blocks", blocks}, {"removal_size", zsize},
                      {"removal_density", zdens},       {"removal_bound_ok", bound_ok}};
    return {{"name", "hyperfinite"},
            {"status", "ok"},
            {"parameters", {{"epsilon", c.epsilon}, {"K", c.K}, {"refine", c.refine}, {"max_iters", c.max_iters}}},
            {"per_level", per_level},
            {"verdicts",
             Json::array({verdict("cut_ratio <= epsilon at every level >= L0", ver.pass, c.L0, c.epsilon, 0.0)})},
            {"certificate", io::partition_cert_json(cert)}};
}

inline Json propa_analysis(const GraphSeq& seq, const PipelineConfig& c) {
    std::vector<Witness> ws;
    for (const auto& g : seq.levels()) ws.push_back(uniform_ball_witness(g, c.S));
    auto exact = verify_witness(seq, ws, VariationMode::exact, c.epsilon, c.L0);
    auto avg = verify_witness(seq, ws, VariationMode::average, c.epsilon, c.L0);
    std::vector<std::size_t> nv, sv;
    for (const auto& lv : exact.levels) {
        nv.push_back(lv.normalization_violations);
        sv.push_back(lv.support_violations);
    }
    Json per_level = {{"level", level_ids(seq.size())},
                      {"max_variation", exact.achieved},
                      {"max_variation_tail_sup", exact.tail_sup},
                      {"average_variation", avg.achieved},
                      {"average_variation_tail_sup", avg.tail_sup},
                      {"normalization_violations", nv},
                      {"support_violations", sv}};
    Json out = {{"name", "propa"},
                {"status", "ok"},
                {"parameters", {{"epsilon", c.epsilon}, {"S", c.S}, {"witness", "uniform_ball"}}},
                {"per_level", per_level},
                {"verdicts",
                 Json::array({verdict("max edge variation < epsilon at every level >= L0 (exact mode)", exact.pass, c.L0,
                                      c.epsilon, kNormalizationTolerance),
                              verdict("average variation < epsilon at every level >= L0 (on-average mode)", avg.pass,
                                      c.L0, c.epsilon, kNormalizationTolerance)})}};
    if (!c.s_schedule.empty()) {
        std::vector<std::vector<Witness>> by_k;
        for (Distance s : c.s_schedule) {
            std::vector<Witness> fam;
            for (const auto& g : seq.levels()) fam.push_back(uniform_ball_witness(g, s));
            by_k.push_back(std::move(fam));
        }
        auto levels = extract_almost_a(seq, by_k);
        std::vector<std::size_t> ks, zs;
        std::vector<double> dens, restricted_max;
        for (std::size_t i = 0; i < levels.size(); ++i) {
            ks.push_back(levels[i].k);
            zs.push_back(levels[i].removed.size());
            dens.push_back(levels[i].density);
            double mv = 0.0;
            if (levels[i].restricted)
                mv = measure_variation(seq.level(i + 1), levels[i].restricted->witness, levels[i].restricted->alive)
                         .max_variation;
            restricted_max.push_back(mv);
        }
        out["almost_a"] = {{"s_schedule", c.s_schedule},
                           {"per_level",
                            {{"level", level_ids(seq.size())},
                             {"k", ks},
                             {"removed", zs},
                             {"density", dens},
                             {"restricted_max_variation", restricted_max}}}};
    }
    return out;
}

inline Json kernel_analysis(const GraphSeq& seq, const PipelineConfig& c) {
    auto kernels = build_kernels(seq, c.noise, c.seed.value_or(0));
    std::vector<double> b, post_b, dev, bound, diag, a;
    std::vector<bool> cnd, bound_ok;
    std::vector<Json> witness;
    std::vector<std::size_t> zprime;
    for (std::size_t i = 1; i <= seq.size(); ++i) {
        const auto& g = seq.level(i);
        const auto& k = kernels[i - 1];
        auto verdict_i = is_locally_cnd(g, k, c.R);
        b.push_back(verdict_i.b);
        cnd.push_back(verdict_i.cnd);
        witness.push_back(verdict_i.witness ? Json(*verdict_i.witness) : Json(nullptr));
        auto corr = correct_kernel(g, k, c.R);
        post_b.push_back(local_spectra(g, corr.corrected, c.R).aggregate);
        dev.push_back(corr.max_deviation);
        const double C = corr.b * std::pow(static_cast<double>(seq.degree_bound()), static_cast<double>(c.R));
        bound.push_back(C);
        bound_ok.push_back(corr.max_deviation <= C);
        diag.push_back(corr.diagonal_shift);
        auto rem = spectral_removal_set(g, k, c.R, i);
        a.push_back(rem.a);
        zprime.push_back(rem.Z.size());
    }
    const bool all_cnd = all_from(b, c.L0, kSpectralTol, false);
    const bool all_post = all_from(post_b, 1, kSpectralTol, false);
    Json per_level = {{"level", level_ids(seq.size())},
                      {"b", b},
                      {"locally_cnd", cnd},
                      {"witness_vertex", witness},
                      {"corrected_b", post_b},
                      {"max_deviation", dev},
                      {"deviation_bound", bound},
                      {"bound_ok", bound_ok},
                      {"diagonal_shift", diag},
                      {"spectral_a", a},
                      {"spectral_removed", zprime}};
    return {{"name", "kernel"},
            {"status", "ok"},
            {"parameters", {{"R", c.R}, {"kernel", "metric"}, {"noise", c.noise}, {"seed", c.seed.value_or(0)}}},
            {"per_level", per_level},
            {"verdicts", Json::array({verdict("kernel locally CND at radius R at every level >= L0", all_cnd, c.L0, 0.0,
                                              kSpectralTol),
                                      verdict("corrected kernel locally CND at radius R at every level", all_post, 1,
                                              0.0, kSpectralTol)})}};
}

}  // namespace detail

inline Json embed_cert_json(const EmbedCert& cert, bool with_points) {
    Json levels = Json::array();
    for (const auto& lvl : cert.levels) {
        Json item = {{"level", lvl.level},
                     {"R", lvl.radius.radius},
                     {"b", lvl.radius.b},
                     {"C", lvl.radius.deviation_bound},
                     {"b_by_radius", lvl.radius.b_by_radius},
                     {"post_correction_b", lvl.post_correction_b},
                     {"max_deviation", lvl.correction ? lvl.correction->max_deviation : 0.0},
                     {"diagonal_shift", lvl.correction ? lvl.correction->diagonal_shift : 0.0},
                     {"removed", lvl.removed}};
        if (lvl.spectral_removal) item["spectral_removal"] = {{"a", lvl.spectral_removal->a}, {"Z", lvl.spectral_removal->Z}};
        if (lvl.shells) {
            Json lower = Json::array(), upper = Json::array();
            for (const auto& v : lvl.shells->lower) lower.push_back(io::optional_json(v));
            for (const auto& v : lvl.shells->upper) upper.push_back(io::optional_json(v));
            item["shells"] = {{"removed_pairs", lvl.shells->removed_pairs},
                              {"mass", lvl.shells->mass},
                              {"budget", lvl.shells->budget},
                              {"lower_threshold", lower},
                              {"upper_threshold", upper},
                              {"Z", lvl.shells->Z}};
        }
        item["control"] = io::control_table_json(lvl.control);
        if (lvl.coordinates) {
            Json coords = {{"basepoint", lvl.coordinates->basepoint},
                           {"dimension", lvl.coordinates->dimension},
                           {"max_defect", lvl.coordinates->max_defect}};
            if (with_points) coords["points"] = lvl.coordinates->coordinates;
            item["coordinates"] = coords;
        } else {
            item["coordinates"] = nullptr;
        }
        item["coordinates_note"] = lvl.coordinates_note;
        levels.push_back(item);
    }
    return {{"options",
             {{"max_radius", cert.options.max_radius == kUnreachable ? Json(nullptr) : Json(cert.options.max_radius)},
              {"weak", cert.options.weak},
              {"removal_radius", cert.options.removal_radius},
              {"epsilon", cert.options.epsilon},
              {"tol", cert.options.tol}}},
            {"radii_nondecreasing", cert.radii_nondecreasing},
            {"levels", levels},
            {"pooled_control", io::control_table_json(cert.pooled)}};
}

inline EmbedOptions embed_options(const PipelineConfig& c) {
    EmbedOptions opt;
    opt.max_radius = c.max_radius == 0 ? kUnreachable : c.max_radius;
    opt.weak = c.weak;
    opt.removal_radius = c.removal_radius;
    opt.epsilon = c.epsilon;
    return opt;
}

namespace detail {

inline Json embed_analysis(const GraphSeq& seq, const PipelineConfig& c) {
    auto kernels = build_kernels(seq, c.noise, c.seed.value_or(0));
    auto cert = embed_sequence(seq, kernels, embed_options(c));
    std::vector<std::size_t> R, dim, removed;
    std::vector<double> b, C, post, dev;
    std::vector<Json> defect;
    for (const auto& lvl : cert.levels) {
        R.push_back(lvl.radius.radius);
        b.push_back(lvl.radius.b);
        C.push_back(lvl.radius.deviation_bound);
        post.push_back(lvl.post_correction_b);
        dev.push_back(lvl.correction ? lvl.correction->max_deviation : 0.0);
        dim.push_back(lvl.coordinates ? lvl.coordinates->dimension : 0);
        defect.push_back(lvl.coordinates ? Json(lvl.coordinates->max_defect) : Json(nullptr));
        removed.push_back(lvl.removed.size());
    }
    bool positive = true;
    for (std::size_t i = c.L0; i <= R.size(); ++i) positive = positive && R[i - 1] >= 1;
    Json per_level = {{"level", level_ids(seq.size())}, {"R", R}, {"b", b}, {"C", C}, {"post_correction_b", post},
                      {"max_deviation", dev}, {"dimension", dim}, {"max_defect", defect}, {"removed", removed}};
    Json control = Json::array();
    for (const auto& lvl : cert.levels) control.push_back(io::control_table_json(lvl.control));
    return {{"name", "embed"},
            {"status", "ok"},
            {"parameters", {{"weak", c.weak}, {"epsilon", c.epsilon}, {"removal_radius", c.removal_radius},
                            {"max_radius", c.max_radius}, {"noise", c.noise}}},
            {"per_level", per_level},
            {"radii_nondecreasing", cert.radii_nondecreasing},
            {"control_tables", control},
            {"pooled_control", io::control_table_json(cert.pooled)},
            {"verdicts", Json::array({verdict("R_i >= 1 (b_R d^R <= 1/R for some R) at every level >= L0", positive,
                                              c.L0, 0.0, kSpectralTol),
                                      verdict("R_i non-decreasing over levels", cert.radii_nondecreasing, 1, 0.0,
                                              0.0)})}};
}

inline PermAction sofic_action(const PipelineConfig& c, std::size_t n, std::size_t level) {
    if (c.action == "shift") return PermAction::cyclic_shift(n);
    if (c.action == "grid") return PermAction::grid_shifts(n, n);
    return PermAction::random(n, c.generators, *c.seed + level);
}

inline Json sofic_analysis(const PipelineConfig& c) {
    if (c.sizes.empty()) throw ConfigError("sizes", "sofic analysis needs sizes");
    std::vector<FiniteGraph> graphs;
    std::vector<std::size_t> n, good, mult, freeness, girths;
    std::vector<double> eps;
    for (std::size_t i = 0; i < c.sizes.size(); ++i) {
        auto action = sofic_action(c, c.sizes[i], i + 1);
        auto words = c.words.empty() ? words_up_to(action.generator_count(), 2) : c.words;
        auto rep = injectivity_report(action, words);
        n.push_back(rep.n);
        good.push_back(rep.good);
        eps.push_back(rep.epsilon());
        mult.push_back(rep.multiplicativity_failures);
        freeness.push_back(rep.freeness_failures);
        auto sg = schreier_graph(action);
        girths.push_back(girth(sg.graph));
        graphs.push_back(std::move(sg.graph));
    }
    GraphSeq seq(std::move(graphs));
    std::vector<double> cut_ratio, avg_var, b;
    for (std::size_t i = 1; i <= seq.size(); ++i) {
        const auto& g = seq.level(i);
        cut_ratio.push_back(search_partition(g, c).cut_ratio);
        avg_var.push_back(measure_variation(g, uniform_ball_witness(g, c.S)).average_variation);
        b.push_back(local_spectra(g, metric_kernel(g), c.R).aggregate);
    }
    Json per_level = {{"level", level_ids(seq.size())},
                      {"n", n},
                      {"good_points", good},
                      {"injectivity_epsilon", eps},
                      {"multiplicativity_failures", mult},
                      {"freeness_failures", freeness},
                      {"girth", girths},
                      {"cut_ratio", cut_ratio},
                      {"average_variation", avg_var},
                      {"metric_kernel_b", b}};
    return {{"name", "sofic"},
            {"status", "ok"},
            {"parameters", {{"action", c.action}, {"words", c.words.empty() ? Json("all reduced words of length <= 2") : Json(c.words)},
                            {"epsilon", c.epsilon}, {"K", c.K}, {"S", c.S}, {"R", c.R}}},
            {"per_level", per_level},
            {"verdicts",
             Json::array({verdict("injectivity epsilon <= epsilon at every level >= L0", all_from(eps, c.L0, c.epsilon, false),
                                  c.L0, c.epsilon, 0.0),
                          verdict("cut ratio <= epsilon at every level >= L0", all_from(cut_ratio, c.L0, c.epsilon, false),
                                  c.L0, c.epsilon, 0.0),
                          verdict("average variation < epsilon at every level >= L0",
                                  all_from(avg_var, c.L0, c.epsilon, true), c.L0, c.epsilon, kNormalizationTolerance),
                          verdict("metric kernel locally CND at radius R at every level >= L0",
                                  all_from(b, c.L0, kSpectralTol, false), c.L0, 0.0, kSpectralTol)})}};
}

inline Json bs_profile_analysis(const GraphSeq& seq, const PipelineConfig& c) {
    std::optional<RootedBallShape> ref;
    if (c.reference) ref = rooted_ball_shape(generate(*c.reference), c.reference_root, c.R);
    auto prof = ball_profile(seq, c.R, ref ? &*ref : nullptr);
    std::vector<std::size_t> classes;
    std::vector<double> top;
    Json detail_levels = Json::array();
    for (const auto& lvl : prof.levels) {
        classes.push_back(lvl.classes.size());
        top.push_back(lvl.classes.front().frequency);
        Json cls = Json::array();
        for (const auto& cl : lvl.classes)
            cls.push_back({{"vertices", cl.shape.vertices}, {"edges", cl.shape.edges}, {"root_degree", cl.shape.root_degree},
                           {"count", cl.count}, {"frequency", cl.frequency}, {"key", cl.shape.key}});
        detail_levels.push_back(cls);
    }
    Json per_level = {{"level", level_ids(seq.size())}, {"classes", classes}, {"top_frequency", top}};
    Json out = {{"name", "bs-profile"}, {"status", "ok"}, {"parameters", {{"R", c.R}}}, {"per_level", per_level},
                {"classes", detail_levels}};
    if (ref) {
        out["per_level"]["reference_frequency"] = prof.reference_frequency;
        bool all_one = true;
        for (std::size_t i = c.L0; i <= prof.reference_frequency.size(); ++i)
            all_one = all_one && prof.reference_frequency[i - 1] == 1.0;
        out["verdicts"] = Json::array(
            {verdict("reference ball frequency == 1 at every level >= L0", all_one, c.L0, 1.0, 0.0)});
    }
    return out;
}

}  // namespace detail

struct Report {
    Json json;
    bool has_failure = false;
};

inline Json config_echo(const PipelineConfig& c) {
    Json echo = Json::object();
    for (const auto& [k, v] : c.echo) echo[k] = v;
    return echo;
}

// Runs analyses in declared order. A failing analysis is recorded with its
// error and does not stop the others. Throws on an unbuildable sequence.
inline Report run(const PipelineConfig& c) {
    Report rep;
    rep.json = {{"tool", kToolName}, {"version", kToolVersion}, {"config", config_echo(c)}};
    std::optional<GraphSeq> seq;
    auto needs_seq = [](const std::string& a) { return a != "sofic"; };
    if (std::any_of(c.analyses.begin(), c.analyses.end(), needs_seq)) {
        seq = build_sequence(c);
        std::vector<std::size_t> n, m, diam;
        for (std::size_t i = 1; i <= seq->size(); ++i) {
            n.push_back(seq->level(i).size());
            m.push_back(seq->level(i).edge_count());
            diam.push_back(seq->diameter_of(i));
        }
        rep.json["sequence"] = {{"levels", seq->size()},
                                {"degree_bound", seq->degree_bound()},
                                {"strictly_growing", seq->strictly_growing()},
                                {"per_level", {{"level", detail::level_ids(seq->size())}, {"n", n}, {"edges", m}, {"diameter", diam}}}};
    }
    Json analyses = Json::array();
    for (const auto& name : c.analyses) {
        try {
            if (name == "hyperfinite") analyses.push_back(detail::hyperfinite_analysis(*seq, c));
            else if (name == "propa") analyses.push_back(detail::propa_analysis(*seq, c));
            else if (name == "kernel") analyses.push_back(detail::kernel_analysis(*seq, c));
            else if (name == "embed") analyses.push_back(detail::embed_analysis(*seq, c));
            else if (name == "sofic") analyses.push_back(detail::sofic_analysis(c));
            else if (name == "bs-profile") analyses.push_back(detail::bs_profile_analysis(*seq, c));
        } catch (const std::exception& e) {
            analyses.push_back({{"name", name}, {"status", "failed"}, {"error", e.what()}});
            rep.has_failure = true;
        }
    }
    rep.json["analyses"] = analyses;
    return rep;
}

inline std::string to_json_text(const Report& rep) { return rep.json.dump(2) + "\n"; }

inline Report read_report(const std::string& text) {
    Report rep;
    rep.json = Json::parse(text);
    for (const auto& a : rep.json.value("analyses", Json::array()))
        if (a.value("status", "ok") != "ok") rep.has_failure = true;
    return rep;
}

namespace detail {

inline std::string csv_cell(const Json& v) {
    if (v.is_null()) return "";
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) return io::exact(v.get<double>());
    return v.dump();
}

// Column-oriented object of equal-length arrays -> CSV text.
inline std::string table_csv(const Json& table) {
    std::ostringstream out;
    std::vector<std::string> cols;
    std::size_t rows = 0;
    for (const auto& [key, col] : table.items()) {
        cols.push_back(key);
        rows = std::max(rows, col.size());
    }
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t i = 0; i < cols.size(); ++i) {
            const auto& col = table[cols[i]];
            out << (i ? "," : "") << (r < col.size() ? csv_cell(col[r]) : "");
        }
        out << '\n';
    }
    return out.str();
}

inline std::string control_csv(const Json& t) {
    Json table = {{"shell", Json::array()}, {"rho1", t["rho1"]}, {"rho2", t["rho2"]}, {"raw_min", t["raw_min"]},
                  {"raw_max", t["raw_max"]}};
    for (std::size_t l = 0; l < t["rho1"].size(); ++l) table["shell"].push_back(l);
    return table_csv(table);
}

}  // namespace detail

// CSV views: file name -> contents. One per-level table per analysis, plus
// one control-table file (one row per shell) for embed analyses.
inline std::map<std::string, std::string> csv_tables(const Report& rep) {
    std::map<std::string, std::string> files;
    if (rep.json.contains("sequence")) files["sequence.csv"] = detail::table_csv(rep.json["sequence"]["per_level"]);
    for (const auto& a : rep.json.value("analyses", Json::array())) {
        const auto name = a.value("name", std::string("analysis"));
        if (a.contains("per_level")) files[name + ".csv"] = detail::table_csv(a["per_level"]);
        if (a.contains("almost_a")) files[name + "_almost_a.csv"] = detail::table_csv(a["almost_a"]["per_level"]);
        if (a.contains("pooled_control")) files[name + "_control.csv"] = detail::control_csv(a["pooled_control"]);
    }
    return files;
}

inline void emit_json(const Report& rep, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto out = io::open_out(path);
    out << to_json_text(rep);
}

inline void emit_csv(const Report& rep, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& [name, text] : csv_tables(rep)) {
        auto out = io::open_out(dir / name);
        out << text;
    }
}

}  // namespace coarse
