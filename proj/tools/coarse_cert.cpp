// coarse-cert: generate graph sequences and certify coarse-geometric
// properties level by level.
//
//   coarse-cert gen     --family cycle --sizes 100:1000:100 --output seq/
//   coarse-cert analyze --config run.cfg [--K 50 ...] [--csv tables/]
//   coarse-cert embed   --config run.cfg --output cert.json
//   coarse-cert report  report.json [--csv tables/]
//
// Exit codes: 0 ran, 1 invalid configuration or unreadable input,
// 2 at least one analysis failed.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "coarse/pipeline.hpp"

namespace fs = std::filesystem;
using namespace coarse;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kAnalysisFailed = 2;

// Every configuration key becomes a --key flag; flags override the file.
struct ConfigFlags {
    std::string config_path;
    std::map<std::string, std::string> values;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config,-c", config_path, "key = value configuration file");
        for (const auto& key : coarse::detail::known_keys()) {
            cmd->add_option("--" + key, values[key], "configuration key '" + key + "'");
        }
    }

    PipelineConfig load() const {
        std::map<std::string, std::string> kv;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw ConfigError("config", "cannot open " + config_path);
            std::stringstream buf;
            buf << in.rdbuf();
            kv = parse_key_values(buf.str());
        }
        for (const auto& [key, value] : values)
            if (!value.empty()) kv[key] = value;
        return make_config(kv);
    }
};

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    if (auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
    auto out = io::open_out(path);
    out << text;
}

int cmd_gen(const PipelineConfig& c) {
    if (c.family == "files") throw ConfigError("family", "gen needs a generator family");
    if (c.output.empty()) throw ConfigError("output", "gen needs an output directory");
    const auto seq = build_sequence(c);
    const fs::path dir = c.output;
    fs::create_directories(dir);
    auto list = io::open_out(dir / "sequence.txt");
    for (std::size_t i = 1; i <= seq.size(); ++i) {
        const auto name = "level_" + std::to_string(i) + ".txt";
        auto out = io::open_out(dir / name);
        io::write_edge_list(out, seq.level(i));
        list << name << '\n';
    }
    std::cerr << "wrote " << seq.size() << " levels to " << dir.string() << '\n';
    return kOk;
}

int cmd_analyze(const PipelineConfig& c, const std::string& csv_dir) {
    const auto rep = run(c);
    write_text(c.output, to_json_text(rep));
    if (!csv_dir.empty()) emit_csv(rep, csv_dir);
    for (const auto& a : rep.json["analyses"])
        if (a["status"] != "ok") std::cerr << "analysis " << a["name"].get<std::string>() << " failed: " << a["error"].get<std::string>() << '\n';
    return rep.has_failure ? kAnalysisFailed : kOk;
}

int cmd_embed(const PipelineConfig& c, bool with_points) {
    const auto seq = build_sequence(c);
    Json out = {{"tool", kToolName}, {"version", kToolVersion}, {"config", config_echo(c)}};
    try {
        const auto kernels = build_kernels(seq, c.noise, c.seed.value_or(0));
        out["embedding"] = embed_cert_json(embed_sequence(seq, kernels, embed_options(c)), with_points);
    } catch (const std::exception& e) {
        out["embedding"] = {{"status", "failed"}, {"error", e.what()}};
        write_text(c.output, out.dump(2) + "\n");
        std::cerr << "embed failed: " << e.what() << '\n';
        return kAnalysisFailed;
    }
    write_text(c.output, out.dump(2) + "\n");
    return kOk;
}

int cmd_report(const std::string& path, const std::string& csv_dir) {
    auto in = io::open_in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    const auto rep = read_report(buf.str());
    for (const auto& a : rep.json.value("analyses", Json::array())) {
        std::cout << a.value("name", std::string("?")) << ": " << a.value("status", std::string("?")) << '\n';
        if (a.contains("error")) std::cout << "  error: " << a["error"].get<std::string>() << '\n';
        for (const auto& v : a.value("verdicts", Json::array())) {
            std::cout << "  [" << (v["holds"].get<bool>() ? "holds" : "fails") << "] " << v["statement"].get<std::string>()
                      << " (L0=" << v["tail_cutoff"] << ", tol=" << v["tolerance"] << ")\n";
        }
    }
    if (!csv_dir.empty()) emit_csv(rep, csv_dir);
    return rep.has_failure ? kAnalysisFailed : kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Certify coarse-geometric properties of graph sequences"};
    app.require_subcommand(1);

    ConfigFlags gen_flags, analyze_flags, embed_flags;
    std::string analyze_csv, report_csv, report_path;
    bool no_points = false;

    auto* gen = app.add_subcommand("gen", "generate a graph sequence as edge-list files");
    gen_flags.attach(gen);
    auto* analyze = app.add_subcommand("analyze", "run the configured analyses and write a JSON report");
    analyze_flags.attach(analyze);
    analyze->add_option("--csv", analyze_csv, "also write per-level CSV tables into this directory");
    auto* embed = app.add_subcommand("embed", "write an embedding certificate with coordinates");
    embed_flags.attach(embed);
    embed->add_flag("--no-points", no_points, "omit coordinate vectors");
    auto* report = app.add_subcommand("report", "summarize a JSON report");
    report->add_option("report", report_path, "report file")->required();
    report->add_option("--csv", report_csv, "write per-level CSV tables into this directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen(gen_flags.load());
        if (analyze->parsed()) return cmd_analyze(analyze_flags.load(), analyze_csv);
        if (embed->parsed()) return cmd_embed(embed_flags.load(), !no_points);
        if (report->parsed()) return cmd_report(report_path, report_csv);
    } catch (const ConfigError& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return kInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    }
    return kOk;
}
