// io.hpp - text and JSON file formats.
//
//   edge list      "n m d" then m lines "u v" (0-based)
//   sequence       one edge-list path per line, ordered by level; relative
//                  paths resolve against the sequence file's directory
//   perm action    "n k" then k lines of n space-separated images
//   word list      one word per line, signed generator indices; an empty
//                  line is the identity
//   witness CSV    header "level,vertex,support_vertex,weight"
//   kernel         first line "n"; then either n comma-separated rows, or
//                  whitespace triplets "x y value" (symmetric completion,
//                  missing entries 0)
//   partition JSON [{level, K, assignment, cut_ratio}, ...]
//   removal JSON   [{level, K, Z}, ...]
#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "coarse/generators.hpp"
#include "coarse/graph.hpp"
#include "coarse/hyperfinite.hpp"
#include "coarse/kernels.hpp"
#include "coarse/propa.hpp"
#include "json.hpp"

namespace coarse::io {

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::ifstream open_in(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw FormatError("cannot open " + p.string());
    return in;
}

inline std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw FormatError("cannot write " + p.string());
    return out;
}

// Doubles are written with 17 significant digits so they read back exactly.
inline std::string exact(double v) {
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

inline FiniteGraph read_edge_list(std::istream& in) {
    std::size_t n = 0, m = 0, d = 0;
    if (!(in >> n >> m >> d)) throw FormatError("edge list: expected header 'n m d'");
    std::vector<Edge> edges;
    edges.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        long long u, v;
        if (!(in >> u >> v)) throw FormatError("edge list: expected " + std::to_string(m) + " edges, got " + std::to_string(i));
        if (u < 0 || v < 0) throw FormatError("edge list: negative vertex id");
        edges.push_back({static_cast<Vertex>(u), static_cast<Vertex>(v)});
    }
    return FiniteGraph(n, edges, d);
}

inline FiniteGraph read_edge_list(const std::filesystem::path& p) {
    auto in = open_in(p);
    return read_edge_list(in);
}

inline void write_edge_list(std::ostream& out, const FiniteGraph& g) {
    out << g.size() << ' ' << g.edge_count() << ' ' << g.degree_bound() << '\n';
    for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

inline GraphSeq read_sequence(const std::filesystem::path& p) {
    auto in = open_in(p);
    std::vector<FiniteGraph> levels;
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto last = line.find_last_not_of(" \t\r");
        std::filesystem::path item = line.substr(first, last - first + 1);
        if (item.is_relative()) item = p.parent_path() / item;
        levels.push_back(read_edge_list(item));
    }
    if (levels.empty()) throw FormatError("sequence file lists no graphs: " + p.string());
    return GraphSeq(std::move(levels));
}

inline PermAction read_perm_action(std::istream& in) {
    std::size_t n = 0, k = 0;
    if (!(in >> n >> k)) throw FormatError("perm action: expected header 'n k'");
    std::vector<std::vector<Vertex>> gens(k, std::vector<Vertex>(n));
    for (auto& p : gens) {
        for (auto& x : p) {
            long long v;
            if (!(in >> v) || v < 0) throw FormatError("perm action: truncated or negative image");
            x = static_cast<Vertex>(v);
        }
    }
    return PermAction(n, std::move(gens));
}

inline void write_perm_action(std::ostream& out, const PermAction& a) {
    out << a.size() << ' ' << a.generator_count() << '\n';
    for (std::size_t s = 0; s < a.generator_count(); ++s) {
        const auto& p = a.generator(s);
        for (std::size_t x = 0; x < p.size(); ++x) out << (x ? " " : "") << p[x];
        out << '\n';
    }
}

inline std::vector<Word> read_words(std::istream& in) {
    std::vector<Word> words;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        Word w;
        int letter;
        while (ls >> letter) {
            if (letter == 0) throw FormatError("word list: letter 0 is not a generator");
            w.push_back(letter);
        }
        if (!ls.eof()) throw FormatError("word list: non-integer token in '" + line + "'");
        words.push_back(std::move(w));
    }
    return words;
}

inline void write_words(std::ostream& out, const std::vector<Word>& words) {
    for (const Word& w : words) {
        for (std::size_t i = 0; i < w.size(); ++i) out << (i ? " " : "") << w[i];
        out << '\n';
    }
}

inline void write_witness_csv(std::ostream& out, const std::vector<Witness>& levels) {
    out << "level,vertex,support_vertex,weight\n";
    for (std::size_t i = 0; i < levels.size(); ++i)
        for (std::size_t x = 0; x < levels[i].vectors.size(); ++x)
            for (const auto& [y, w] : levels[i].vectors[x]) out << i + 1 << ',' << x << ',' << y << ',' << exact(w) << '\n';
}

// The declared radius of each level is the largest support distance found.
inline std::vector<Witness> read_witness_csv(std::istream& in, const GraphSeq& seq) {
    std::vector<Witness> out(seq.size());
    for (std::size_t i = 0; i < seq.size(); ++i) out[i].vectors.resize(seq.level(i + 1).size());
    std::string line;
    if (!std::getline(in, line)) throw FormatError("witness CSV: missing header");
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        std::istringstream ls(line);
        std::string a, b, c, d;
        if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') || !std::getline(ls, c, ',') || !std::getline(ls, d)) {
            throw FormatError("witness CSV: malformed row '" + line + "'");
        }
        const std::size_t level = std::stoul(a);
        if (level == 0 || level > seq.size()) throw FormatError("witness CSV: level out of range");
        const auto x = static_cast<Vertex>(std::stoul(b));
        const auto y = static_cast<Vertex>(std::stoul(c));
        auto& w = out[level - 1];
        if (x >= w.vectors.size() || y >= w.vectors.size()) throw FormatError("witness CSV: vertex out of range");
        w.vectors[x].emplace_back(y, std::stod(d));
    }
    for (std::size_t i = 0; i < seq.size(); ++i) {
        const auto& g = seq.level(i + 1);
        auto& w = out[i];
        for (Vertex x = 0; x < g.size(); ++x) {
            auto& vec = w.vectors[x];
            std::sort(vec.begin(), vec.end());
            if (vec.empty()) continue;
            auto dist = bfs_distances(g, x);
            for (const auto& [y, weight] : vec) w.radius = std::max(w.radius, dist[y]);
        }
    }
    return out;
}

inline Kernel read_kernel(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw FormatError("kernel: missing size line");
    const std::size_t n = std::stoul(line);
    Kernel k(n);
    std::vector<std::string> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        rows.push_back(line);
    }
    const bool dense = !rows.empty() && rows.front().find(',') != std::string::npos;
    if (dense || (n == 1 && rows.size() == 1 && rows.front().find(' ') == std::string::npos)) {
        if (rows.size() != n) throw FormatError("kernel: expected " + std::to_string(n) + " rows");
        DenseMatrix m(n);
        for (std::size_t r = 0; r < n; ++r) {
            std::istringstream ls(rows[r]);
            std::string cell;
            std::size_t c = 0;
            while (std::getline(ls, cell, ',')) {
                if (c >= n) throw FormatError("kernel: row " + std::to_string(r) + " too long");
                m(r, c++) = std::stod(cell);
            }
            if (c != n) throw FormatError("kernel: row " + std::to_string(r) + " too short");
        }
        return Kernel(std::move(m));
    }
    for (const auto& row : rows) {
        std::istringstream ls(row);
        std::size_t x, y;
        double v;
        if (!(ls >> x >> y >> v)) throw FormatError("kernel: malformed triplet '" + row + "'");
        if (x >= n || y >= n) throw FormatError("kernel: triplet index out of range");
        k.set(x, y, v);
    }
    return k;
}

inline Kernel read_kernel(const std::filesystem::path& p) {
    auto in = open_in(p);
    return read_kernel(in);
}

inline void write_kernel(std::ostream& out, const Kernel& k) {
    out << k.size() << '\n';
    for (std::size_t r = 0; r < k.size(); ++r) {
        for (std::size_t c = 0; c < k.size(); ++c) out << (c ? "," : "") << exact(k(r, c));
        out << '\n';
    }
}

using Json = nlohmann::ordered_json;

inline Json partition_cert_json(const PartitionCert& cert) {
    Json arr = Json::array();
    for (std::size_t i = 0; i < cert.size(); ++i) {
        arr.push_back({{"level", i + 1}, {"K", cert[i].K}, {"assignment", cert[i].block}, {"cut_ratio", cert[i].cut_ratio}});
    }
    return arr;
}

// Rebuilds each level from its assignment; stored ratios are not trusted.
inline PartitionCert partition_cert_from_json(const Json& arr, const GraphSeq& seq) {
    if (!arr.is_array() || arr.size() != seq.size()) throw FormatError("partition JSON: level count mismatch");
    PartitionCert cert;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto& item = arr[i];
        if (item.at("level").get<std::size_t>() != i + 1) throw FormatError("partition JSON: levels out of order");
        cert.push_back(make_partition(seq.level(i + 1), item.at("assignment").get<std::vector<std::size_t>>(),
                                      item.at("K").get<std::size_t>()));
    }
    return cert;
}

inline Json removal_cert_json(const std::vector<RemovalCert>& certs) {
    Json arr = Json::array();
    for (std::size_t i = 0; i < certs.size(); ++i) arr.push_back({{"level", i + 1}, {"K", certs[i].K}, {"Z", certs[i].Z}});
    return arr;
}

inline std::vector<RemovalCert> removal_cert_from_json(const Json& arr, const GraphSeq& seq) {
    if (!arr.is_array() || arr.size() != seq.size()) throw FormatError("removal JSON: level count mismatch");
    std::vector<RemovalCert> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto& item = arr[i];
        if (item.at("level").get<std::size_t>() != i + 1) throw FormatError("removal JSON: levels out of order");
        out.push_back(make_removal(seq.level(i + 1), item.at("Z").get<std::vector<Vertex>>(), item.at("K").get<std::size_t>()));
    }
    return out;
}

inline Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

inline Json control_table_json(const ControlTable& t) {
    Json lo = Json::array(), hi = Json::array();
    for (const auto& v : t.raw_min) lo.push_back(optional_json(v));
    for (const auto& v : t.raw_max) hi.push_back(optional_json(v));
    return {{"shells", t.rho1.size()}, {"raw_min", lo}, {"raw_max", hi}, {"rho1", t.rho1}, {"rho2", t.rho2},
            {"empty_shells", t.empty_shells}};
}

}  // namespace coarse::io
