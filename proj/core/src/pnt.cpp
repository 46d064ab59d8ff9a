#include "holopnt/pnt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace holopnt::pnt {

using geometry::BlockTarget;
using geometry::StencilEngine;

namespace {

std::vector<std::vector<int>> sigma_sequences(int directions, int order) {
    std::vector<std::vector<int>> seqs = {{}};
    for (int k = 0; k < order; ++k) {
        std::vector<std::vector<int>> next;
        for (const auto& s : seqs) {
            for (int d = 0; d < directions; ++d) {
                std::vector<int> grown = s;
                grown.insert(grown.begin(), d);
                next.push_back(std::move(grown));
            }
        }
        seqs = std::move(next);
    }
    return seqs;
}

CMatrix direct_sum(const std::vector<const CMatrix*>& blocks) {
    Eigen::Index total = 0;
    for (const auto* b : blocks) total += b->rows();
    CMatrix out = CMatrix::Zero(total, total);
    Eigen::Index at = 0;
    for (const auto* b : blocks) {
        out.block(at, at, b->rows(), b->rows()) = *b;
        at += b->rows();
    }
    return out;
}

// A nonzero fully-commuting span realises phases of a single torus class;
// for threshold accounting its capability counts as 1, matching the
// treatment of coupled-oscillator systems as one-phase (Berry) resources.
int collapse_capability(int rank, bool abelian) {
    if (rank == 0) return 0;
    return abelian ? 1 : rank;
}

// Per-block, per-sample tensor tower. tensors[order][id] aligns across
// blocks and samples because ids enumerate identically everywhere.
struct BlockTower {
    int particle_number = 0;
    int dimension = 0;
    // [sample][order][id]
    std::vector<std::vector<std::vector<CMatrix>>> tensors;
};

struct FamilyScanResult {
    std::vector<int> rank_by_content;        // index n: rank at content <= n, all orders
    std::vector<bool> abelian_by_content;
    int dim_curvature = 0;                   // order-0 rank at full content
    int dim_holonomy = 0;
    int stagnation_order = 0;
    int orders_computed = 0;
    int samples_used = 0;
    bool abelian = false;
};

// Shared machinery: computes the derivative tower for a set of direct-sum
// blocks with early stopping on the full-content rank, then reports the rank
// at every content level n (blocks with particle_number <= n).
FamilyScanResult scan_blocks(const model::ModelSpec& spec,
                             const std::vector<BlockTarget>& targets,
                             const std::vector<int>& block_particles,
                             const std::vector<ParameterPoint>& sample_points, int n_max,
                             const ScanConfig& config) {
    const int m = static_cast<int>(spec.parameter_names.size());
    const std::vector<int> origin(m, 0);

    struct SampleState {
        std::vector<std::unique_ptr<spectral::FrameField>> fields;
        std::vector<std::unique_ptr<StencilEngine>> engines;
    };
    std::vector<SampleState> samples;
    for (const auto& p : sample_points) {
        SampleState st;
        bool ok = true;
        for (const auto& t : targets) {
            std::unique_ptr<spectral::FrameField> field;
            if (t.h0_frame.size() > 0) {
                field = spectral::isospectral_frame(spec, t.basis, t.h0_frame, p);
            } else {
                try {
                    const CMatrix h = model::hamiltonian_at(spec, p, t.basis);
                    const auto blocks = spectral::eigen_blocks(h, config.cluster_tol);
                    int index = -1;
                    double best = 1e300;
                    for (std::size_t i = 0; i < blocks.size(); ++i) {
                        const double d = std::abs(blocks[i].eigenvalue - t.eigenvalue);
                        if (d < best) {
                            best = d;
                            index = static_cast<int>(i);
                        }
                    }
                    if (index < 0 || blocks[index].dimension != t.dimension) {
                        ok = false;
                        break;
                    }
                    field = spectral::local_frame(spec, t.basis, p, index, config.cluster_tol);
                } catch (const FrameDegeneracyError&) {
                    ok = false;
                    break;
                }
            }
            st.engines.push_back(
                std::make_unique<StencilEngine>(*field, spec.parameter_names, config.fd));
            st.fields.push_back(std::move(field));
        }
        if (ok) samples.push_back(std::move(st));
    }
    if (samples.empty()) {
        throw FrameDegeneracyError("pnt scan: all sample points degenerate for a family");
    }

    std::vector<BlockTower> towers(targets.size());
    for (std::size_t b = 0; b < targets.size(); ++b) {
        towers[b].particle_number = block_particles[b];
        towers[b].dimension = targets[b].dimension;
        towers[b].tensors.resize(samples.size());
    }

    int ceiling = 0;
    for (const auto& t : targets) ceiling += t.dimension * t.dimension;

    FamilyScanResult result;
    result.samples_used = static_cast<int>(samples.size());

    std::vector<CMatrix> full_span;
    std::vector<int> rank_by_order;
    int last_growth = 0;
    int computed_orders = -1;
    for (int order = 0; order <= config.k_max; ++order) {
        const auto seqs = sigma_sequences(m, order);
        parallel_for(samples.size(), [&](std::size_t si) {
            for (std::size_t b = 0; b < targets.size(); ++b) {
                auto& engine = *samples[si].engines[b];
                std::vector<CMatrix> level;
                level.reserve(seqs.size() * m * (m - 1) / 2);
                for (const auto& seq : seqs) {
                    for (int mu = 0; mu < m; ++mu) {
                        for (int nu = mu + 1; nu < m; ++nu) {
                            level.push_back(engine.derivative(origin, seq, mu, nu));
                        }
                    }
                }
                towers[b].tensors[si].push_back(std::move(level));
            }
        });
        // Full-content rank for the stopping rule.
        for (std::size_t si = 0; si < samples.size(); ++si) {
            const std::size_t ids = towers.front().tensors[si][order].size();
            for (std::size_t id = 0; id < ids; ++id) {
                std::vector<const CMatrix*> blocks;
                for (const auto& tw : towers) blocks.push_back(&tw.tensors[si][order][id]);
                full_span.push_back(blocks.size() == 1 ? *blocks.front() : direct_sum(blocks));
            }
        }
        const auto stage = geometry::lie_algebra_dimension(full_span, config.rank);
        rank_by_order.push_back(stage.rank);
        computed_orders = order;
        if (order == 0) result.dim_curvature = stage.rank;
        result.dim_holonomy = stage.rank;
        result.abelian = stage.abelian;
        if (stage.rank > (order == 0 ? -1 : rank_by_order[order - 1])) last_growth = order;
        result.stagnation_order = last_growth;
        if (stage.rank >= ceiling) break;
        if (order - last_growth >= 2) break;
    }
    result.orders_computed = computed_orders;

    // Rank and Abelianness per content level.
    result.rank_by_content.assign(n_max + 1, 0);
    result.abelian_by_content.assign(n_max + 1, true);
    for (int n = 0; n <= n_max; ++n) {
        std::vector<std::size_t> included;
        for (std::size_t b = 0; b < towers.size(); ++b) {
            if (towers[b].particle_number <= n) included.push_back(b);
        }
        if (included.empty()) continue;
        std::vector<CMatrix> span;
        for (std::size_t si = 0; si < samples.size(); ++si) {
            for (int order = 0; order <= computed_orders; ++order) {
                const std::size_t ids = towers[included.front()].tensors[si][order].size();
                for (std::size_t id = 0; id < ids; ++id) {
                    std::vector<const CMatrix*> blocks;
                    for (std::size_t b : included) blocks.push_back(&towers[b].tensors[si][order][id]);
                    span.push_back(blocks.size() == 1 ? *blocks.front() : direct_sum(blocks));
                }
            }
        }
        const auto stage = geometry::lie_algebra_dimension(span, config.rank);
        result.rank_by_content[n] = stage.rank;
        result.abelian_by_content[n] = stage.abelian;
    }
    return result;
}

}  // namespace

std::vector<ParameterPoint> scan_sample_points(const model::ModelSpec& spec,
                                               const ScanConfig& config) {
    std::vector<ParameterPoint> points;
    if (spec.name == "kerr2") {
        ParameterPoint anchor;
        for (const auto& n : spec.parameter_names) anchor.set(n, 0.0);
        anchor.set("r4", 0.3);
        anchor.set("theta4", 0.7);
        points.push_back(std::move(anchor));
    } else if (spec.name == "fcg4") {
        ParameterPoint anchor;
        for (const auto& n : spec.parameter_names) {
            anchor.set(n, n.rfind("theta", 0) == 0 ? std::numbers::pi / 4 : 0.0);
        }
        points.push_back(std::move(anchor));
    }
    Rng rng(config.seed);
    const bool gaussian = spec.kind == model::Kind::isospectral_gaussian;
    for (int k = 0; k < config.random_samples; ++k) {
        ParameterPoint p;
        for (const auto& n : spec.parameter_names) {
            const bool amplitude = gaussian && !n.empty() && n.front() == 'r';
            p.set(n, amplitude ? rng.uniform(0.05, 0.3) : rng.uniform(0.3, 1.2));
        }
        points.push_back(std::move(p));
    }
    return points;
}

namespace {

PntReport scan_number_conserving(const model::ModelSpec& spec, const ScanConfig& config) {
    PntReport report;
    report.n_max = config.n_max;
    report.k_max = config.k_max;
    report.seed = config.seed;

    const auto samples = scan_sample_points(spec, config);
    report.base_point = samples.front();

    const auto families =
        spectral::family_across_layers(spec, report.base_point, config.n_max, config.cluster_tol);

    // Pre-compute H0 blocks per layer for isospectral gauges.
    std::vector<std::vector<spectral::EigenspaceBlock>> h0_per_layer;
    std::vector<fock::FockBasis> layer_bases;
    for (int n = 0; n <= config.n_max; ++n) {
        layer_bases.push_back(fock::enumerate_layer(spec.system, n));
        if (spec.is_isospectral()) {
            h0_per_layer.push_back(spectral::h0_blocks(spec, layer_bases.back(), config.cluster_tol));
        }
    }

    std::vector<FamilyScanResult> scans;
    for (const auto& family : families) {
        std::vector<BlockTarget> targets;
        std::vector<int> particles;
        for (const auto& block : family.blocks) {
            const int n = block.particle_number.value_or(0);
            if (spec.is_isospectral()) {
                const spectral::EigenspaceBlock* match = nullptr;
                for (const auto& hb : h0_per_layer[n]) {
                    if (std::abs(hb.eigenvalue - family.eigenvalue) <
                        1e-6 * std::max(1.0, std::abs(family.eigenvalue))) {
                        match = &hb;
                        break;
                    }
                }
                if (!match || match->dimension != block.dimension) {
                    throw NumericalError("isospectral family does not match its H0 block");
                }
                targets.push_back(BlockTarget::isospectral(layer_bases[n], match->frame));
            } else {
                targets.push_back(
                    BlockTarget::transported(layer_bases[n], family.eigenvalue, block.dimension));
            }
            particles.push_back(n);
        }
        scans.push_back(scan_blocks(spec, targets, particles, samples, config.n_max, config));
    }

    // Rows and the attainment curve.
    report.attainment.assign(config.n_max + 1, 0);
    int best_capability = -1;
    for (std::size_t l = 0; l < families.size(); ++l) {
        const auto& fam = families[l];
        const auto& scan = scans[l];
        EigenspaceReportRow row;
        row.label = fam.label;
        row.eigenvalue = fam.eigenvalue;
        row.degeneracy = fam.dimension();
        row.dim_curvature = scan.dim_curvature;
        row.dim_holonomy = scan.dim_holonomy;
        row.stagnation_order = scan.stagnation_order;
        row.abelian = scan.abelian;
        row.capability = collapse_capability(scan.dim_holonomy, scan.abelian);
        int needed = 0;
        for (int n = config.n_max; n >= 0; --n) {
            if (scan.rank_by_content[n] == scan.rank_by_content[config.n_max]) needed = n;
        }
        row.particles_needed = row.dim_holonomy == 0 ? 0 : needed;
        if (scan.samples_used < static_cast<int>(samples.size())) {
            row.warnings.push_back(std::to_string(samples.size() - scan.samples_used) +
                                   " sample point(s) skipped (frame degeneracy)");
        }
        if (row.capability > best_capability) {
            best_capability = row.capability;
            report.argmax_label = row.label;
        }
        report.rows.push_back(std::move(row));

        for (int n = 0; n <= config.n_max; ++n) {
            const int cap_n =
                collapse_capability(scan.rank_by_content[n], scan.abelian_by_content[n]);
            report.attainment[n] = std::max(report.attainment[n], cap_n);
        }
    }
    int n_t = config.n_max;
    for (int n = config.n_max; n >= 0; --n) {
        if (report.attainment[n] == report.attainment[config.n_max]) n_t = n;
    }
    report.n_t = n_t;
    report.notes.push_back("N_t certified up to N_max = " + std::to_string(config.n_max));
    return report;
}

struct GaussianEigenspace {
    double energy = 0.0;
    std::vector<fock::OccupationState> spanners;  // basis order
    int particles_needed = 0;
    bool complete = true;
};

std::vector<GaussianEigenspace> gaussian_eigenspaces(const model::ModelSpec& spec, int cutoff,
                                                     int n_max, double cluster_tol) {
    model::ModelSpec probe = spec;
    probe.system.cutoff_per_boson_mode = cutoff;
    const fock::FockBasis basis = fock::enumerate_truncated(probe.system);
    const CMatrix h0 = fock::operator_matrix(probe.hamiltonian, basis, ParameterPoint{});
    const double off_diag =
        max_abs(CMatrix(h0 - CMatrix(h0.diagonal().asDiagonal())));
    if (off_diag > 1e-12 * std::max(1.0, max_abs(h0))) {
        throw ConfigError("gaussian scan requires a base Hamiltonian diagonal in the number basis");
    }
    (void)cluster_tol;
    std::map<long long, GaussianEigenspace> by_energy;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const double e = h0(i, i).real();
        // Nano-unit quantisation; the diagonal energies of these models are
        // exact small integers, so collisions cannot occur at desk scale.
        const long long key = std::llround(e * 1e9);
        auto& space = by_energy[key];
        space.energy = e;
        space.spanners.push_back(basis.state(i));
        space.particles_needed =
            std::max(space.particles_needed, basis.state(i).total_particles());
    }
    std::vector<GaussianEigenspace> spaces;
    for (auto& [k, v] : by_energy) spaces.push_back(std::move(v));
    std::sort(spaces.begin(), spaces.end(),
              [](const GaussianEigenspace& a, const GaussianEigenspace& b) {
                  return a.energy < b.energy;
              });
    // Keep eigenspaces fully initialisable within n_max particles.
    std::vector<GaussianEigenspace> kept;
    for (auto& s : spaces) {
        if (s.particles_needed <= n_max) kept.push_back(std::move(s));
    }
    return kept;
}

PntReport scan_gaussian(const model::ModelSpec& spec, const ScanConfig& config) {
    PntReport report;
    report.n_max = config.n_max;
    report.k_max = config.k_max;
    report.seed = config.seed;

    if (!spec.system.cutoff_per_boson_mode) {
        throw ConfigError("gaussian scan needs system.cutoff");
    }
    int cutoff = *spec.system.cutoff_per_boson_mode;

    const auto samples = scan_sample_points(spec, config);
    report.base_point = samples.front();

    // Eigenspace completeness guard: growing the cutoff must not change any
    // scanned eigenspace's spanning set.
    {
        const auto small = gaussian_eigenspaces(spec, cutoff, config.n_max, config.cluster_tol);
        const auto big = gaussian_eigenspaces(spec, cutoff + config.cutoff_escalation,
                                              config.n_max, config.cluster_tol);
        std::map<long long, std::size_t> big_sizes;
        for (const auto& s : big) big_sizes[std::llround(s.energy * 1e9)] = s.spanners.size();
        for (const auto& s : small) {
            auto it = big_sizes.find(std::llround(s.energy * 1e9));
            if (it == big_sizes.end() || it->second != s.spanners.size()) {
                throw NumericalError(
                    "cutoff too small: eigenspace spanners change under escalation");
            }
        }
    }

    model::ModelSpec scan_spec = spec;
    fock::FockBasis basis = fock::enumerate_truncated(scan_spec.system);
    auto spaces = gaussian_eigenspaces(spec, cutoff, config.n_max, config.cluster_tol);

    // Cutoff convergence of the connection itself, escalating once if needed.
    if (config.check_cutoff && !spaces.empty()) {
        CMatrix probe_frame = CMatrix::Zero(basis.size(), spaces.front().spanners.size());
        for (std::size_t c = 0; c < spaces.front().spanners.size(); ++c) {
            probe_frame(basis.index_of(spaces.front().spanners[c]), c) = 1.0;
        }
        const double shift = geometry::cutoff_connection_shift(
            scan_spec, probe_frame, report.base_point, config.cutoff_escalation, config.fd);
        if (shift > config.cutoff_shift_tol) {
            cutoff += config.cutoff_escalation;
            scan_spec.system.cutoff_per_boson_mode = cutoff;
            basis = fock::enumerate_truncated(scan_spec.system);
            report.notes.push_back("cutoff escalated to " + std::to_string(cutoff) +
                                   " (connection shift " + std::to_string(shift) + ")");
            CMatrix frame2 = CMatrix::Zero(basis.size(), spaces.front().spanners.size());
            for (std::size_t c = 0; c < spaces.front().spanners.size(); ++c) {
                frame2(basis.index_of(spaces.front().spanners[c]), c) = 1.0;
            }
            const double shift2 = geometry::cutoff_connection_shift(
                scan_spec, frame2, report.base_point, config.cutoff_escalation, config.fd);
            if (shift2 > config.cutoff_shift_tol) {
                throw NumericalError("connection does not converge in the cutoff (shift " +
                                     std::to_string(shift2) + ")");
            }
        }
    }

    report.attainment.assign(config.n_max + 1, 0);
    int best_capability = -1;
    for (std::size_t l = 0; l < spaces.size(); ++l) {
        const auto& space = spaces[l];
        CMatrix frame = CMatrix::Zero(basis.size(), space.spanners.size());
        for (std::size_t c = 0; c < space.spanners.size(); ++c) {
            frame(basis.index_of(space.spanners[c]), c) = 1.0;
        }
        std::vector<BlockTarget> targets;
        targets.push_back(BlockTarget::isospectral(basis, frame));
        const FamilyScanResult scan = scan_blocks(scan_spec, targets, {space.particles_needed},
                                                  samples, config.n_max, config);

        EigenspaceReportRow row;
        row.label = static_cast<int>(l);
        row.eigenvalue = space.energy;
        row.degeneracy = static_cast<int>(space.spanners.size());
        row.particles_needed = space.particles_needed;
        row.dim_curvature = scan.dim_curvature;
        row.dim_holonomy = scan.dim_holonomy;
        row.stagnation_order = scan.stagnation_order;
        row.abelian = scan.abelian;
        row.capability = scan.dim_holonomy == 0 ? 0 : (scan.abelian ? 1 : scan.dim_holonomy);
        if (row.capability > best_capability) {
            best_capability = row.capability;
            report.argmax_label = row.label;
        }
        for (int n = space.particles_needed; n <= config.n_max; ++n) {
            report.attainment[n] = std::max(report.attainment[n], row.capability);
        }
        report.rows.push_back(std::move(row));
    }
    int n_t = config.n_max;
    for (int n = config.n_max; n >= 0; --n) {
        if (report.attainment[n] == report.attainment[config.n_max]) n_t = n;
    }
    report.n_t = n_t;
    report.notes.push_back("N_t certified up to N_max = " + std::to_string(config.n_max) +
                           " at cutoff " + std::to_string(cutoff));
    return report;
}

}  // namespace

PntReport pnt_scan(const model::ModelSpec& spec, const ScanConfig& config) {
    spec.validate();
    if (config.n_max < 0 || config.k_max < 0) throw InputError("n_max and k_max must be >= 0");
    if (spec.number_conserving()) return scan_number_conserving(spec, config);
    if (spec.kind == model::Kind::isospectral_gaussian) return scan_gaussian(spec, config);
    throw ConfigError("pnt_scan: unsupported model kind");
}

std::vector<EigenspaceReportRow> table_report(const model::ModelSpec& spec,
                                              const ScanConfig& config, int min_degeneracy) {
    if (spec.kind != model::Kind::isospectral_gaussian) {
        throw ConfigError("table_report requires a Gaussian-word model");
    }
    const PntReport report = scan_gaussian(spec, config);
    std::vector<EigenspaceReportRow> rows;
    for (const auto& row : report.rows) {
        if (row.degeneracy >= min_degeneracy || row.label <= 1) rows.push_back(row);
    }
    return rows;
}

PntReport composite_pnt(const model::ModelSpec& spec, const ScanConfig& config) {
    if (spec.kind != model::Kind::composite) {
        throw InputError("composite_pnt expects a composite model");
    }
    return pnt_scan(spec, config);
}

}  // namespace holopnt::pnt
