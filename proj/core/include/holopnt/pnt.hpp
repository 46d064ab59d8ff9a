#ifndef HOLOPNT_PNT_HPP
#define HOLOPNT_PNT_HPP

#include "holopnt/geometry.hpp"

#include <cstdint>

namespace holopnt::pnt {

struct ScanConfig {
    int n_max = 4;        // layer bound / spanner-occupation bound
    int k_max = 3;        // covariant-derivative order cap
    int random_samples = 3;
    std::uint64_t seed = 7041776;  // published default; override with --seed
    double cluster_tol = 1e-9;
    geometry::FdOptions fd;
    geometry::RankOptions rank;
    bool check_cutoff = true;      // Gaussian-word models: cutoff escalation guard
    int cutoff_escalation = 4;
    double cutoff_shift_tol = 1e-8;
};

struct EigenspaceReportRow {
    int label = 0;
    double eigenvalue = 0.0;
    int degeneracy = 0;        // at the scan truncation
    int particles_needed = 0;  // smallest content level attaining the row's rank
    int dim_curvature = 0;     // span rank of the curvature components alone
    int dim_holonomy = 0;      // span rank including covariant derivatives
    int stagnation_order = 0;
    bool abelian = false;
    int capability = 0;        // Abelian families collapse to  1 (one phase functional)
    std::vector<std::string> warnings;
};

struct PntReport {
    std::vector<EigenspaceReportRow> rows;
    int n_t = 0;
    int argmax_label = 0;
    std::vector<int> attainment;  // D(n) for n = 0..n_max
    int n_max = 0;
    int k_max = 0;
    std::uint64_t seed = 0;
    ParameterPoint base_point;
    std::vector<std::string> notes;  // truncation caveats, skipped content
};

// Particle-number-threshold scan. For number-conserving models the rows are
// eigenspace families across layers 0..n_max with curvature spans assembled
// as direct sums over their blocks; for Gaussian-word models the rows are
// base-Hamiltonian eigenspaces with all spanning occupations <= n_max.
// N_t is the least n whose attainment D(n) already equals D(n_max); the
// certificate is explicitly truncated at n_max.
PntReport pnt_scan(const model::ModelSpec& spec, const ScanConfig& config);

// Table rows of a Gaussian-word model: every eigenspace with degeneracy >=
// min_degeneracy plus the lowest two labels, keyed by (eigenvalue,
// degeneracy).
std::vector<EigenspaceReportRow> table_report(const model::ModelSpec& spec,
                                              const ScanConfig& config, int min_degeneracy = 5);

// PNT of a composite model by direct scan of the tensor-product system.
PntReport composite_pnt(const model::ModelSpec& spec, const ScanConfig& config);

// Deterministic scan sample points: model-specific anchors plus seeded
// uniform draws (exposed for tests and the CLI).
std::vector<ParameterPoint> scan_sample_points(const model::ModelSpec& spec,
                                               const ScanConfig& config);

}  // namespace holopnt::pnt

#endif
