// embedding.hpp - per-level asymptotic coarse embedding certificates.
//
// Strong variant: choose R_i, correct the kernel at R_i, tabulate control
// functions, and produce coordinates when the corrected kernel is globally
// CND. Weak variant: first drop the spectral removal set, then the shell
// outliers, and certify on what remains (distances always in the original
// graph metric).
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "coarse/graph.hpp"
#include "coarse/kernels.hpp"

namespace coarse {

struct EmbedOptions {
    Distance max_radius = kUnreachable;  // cap on the R_i search
    bool weak = false;
    Distance removal_radius = 1;         // R for the spectral removal set (weak)
    double epsilon = 0.1;                // shell-threshold budget (weak)
    bool coordinates = true;
    double tol = kSpectralTol;
};

struct EmbedLevel {
    std::size_t level = 0;
    RadiusChoice radius;
    std::optional<KernelCorrection> correction;  // absent when R_i = 0
    double post_correction_b = 0.0;              // local spectra of K' at R_i
    ControlTable control;
    std::optional<SpectralRemoval> spectral_removal;  // weak only
    std::optional<ShellThresholds> shells;            // weak only
    std::vector<Vertex> removed;                      // weak only: Z' u Z
    std::optional<GnsEmbedding> coordinates;
    std::string coordinates_note;
};

struct EmbedCert {
    EmbedOptions options;
    std::vector<EmbedLevel> levels;
    ControlTable pooled;
    bool radii_nondecreasing = true;
};

namespace detail {

inline Kernel restrict_to(const Kernel& k, const std::vector<Vertex>& keep) {
    Kernel out(keep.size());
    for (std::size_t a = 0; a < keep.size(); ++a)
        for (std::size_t b = a; b < keep.size(); ++b) out.set(a, b, k(keep[a], keep[b]));
    return out;
}

}  // namespace detail

inline EmbedCert embed_sequence(const GraphSeq& seq, const std::vector<Kernel>& kernels, const EmbedOptions& opt = {}) {
    if (kernels.size() != seq.size()) throw KernelError("kernel levels do not match sequence levels");
    EmbedCert cert;
    cert.options = opt;
    std::vector<Kernel> certified;
    std::vector<PairMask> masks;
    for (std::size_t i = 1; i <= seq.size(); ++i) {
        const auto& g = seq.level(i);
        const auto& k = kernels[i - 1];
        EmbedLevel lvl;
        lvl.level = i;
        std::vector<char> alive;
        if (opt.weak) {
            lvl.spectral_removal = spectral_removal_set(g, k, opt.removal_radius, i);
            alive = lvl.spectral_removal->alive;
            lvl.shells = threshold_shells(g, k, opt.epsilon, alive);
            for (Vertex v : lvl.spectral_removal->Z) lvl.removed.push_back(v);
            for (Vertex v : lvl.shells->Z) lvl.removed.push_back(v);
            std::sort(lvl.removed.begin(), lvl.removed.end());
        }
        lvl.radius = max_local_radius(g, k, seq.degree_bound(), opt.max_radius, alive);
        Kernel current = k;
        if (lvl.radius.radius >= 1) {
            lvl.correction = correct_kernel(g, k, lvl.radius.radius, alive, opt.tol);
            current = lvl.correction->corrected;
            lvl.post_correction_b = local_spectra(g, current, lvl.radius.radius, alive).aggregate;
        }
        if (opt.coordinates) {
            std::vector<Vertex> keep;
            for (Vertex v = 0; v < g.size(); ++v)
                if (alive.empty() || alive[v]) keep.push_back(v);
            try {
                lvl.coordinates = gns_embed(detail::restrict_to(current, keep), 0, opt.tol);
                lvl.coordinates_note = alive.empty() ? "all vertices" : "surviving vertices in id order";
            } catch (const NotCndError& e) {
                lvl.coordinates_note = std::string("refused: ") + e.what();
            }
        }
        PairMask mask;
        if (opt.weak) mask = lvl.shells->retained;
        certified.push_back(std::move(current));
        masks.push_back(std::move(mask));
        cert.levels.push_back(std::move(lvl));
    }
    auto control = control_functions(seq, certified, opt.weak ? masks : std::vector<PairMask>{});
    for (std::size_t i = 0; i < cert.levels.size(); ++i) cert.levels[i].control = control.per_level[i];
    cert.pooled = control.pooled;
    for (std::size_t i = 1; i < cert.levels.size(); ++i)
        if (cert.levels[i].radius.radius < cert.levels[i - 1].radius.radius) cert.radii_nondecreasing = false;
    return cert;
}

}  // namespace coarse
