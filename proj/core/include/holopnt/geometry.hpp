#ifndef HOLOPNT_GEOMETRY_HPP
#define HOLOPNT_GEOMETRY_HPP

#include "holopnt/spectral.hpp"

#include <map>
#include <memory>
#include <unordered_map>

namespace holopnt::geometry {

// Finite-difference policy. `fourth_order` uses the 5-point operator
// (f(-2h), f(-h), f(h), f(2h)), equivalent to one Richardson level over the
// plain central difference; turn it off to expose the O(h^2) baseline.
struct FdOptions {
    double step = 1e-3;
    bool fourth_order = true;
    double anti_herm_tol = 1e-7;
};

// Connection components A_mu at one parameter point, in the gauge of the
// frame provider that produced them. Directions follow the model's
// canonical parameter order.
struct ConnectionField {
    std::vector<std::string> directions;
    std::vector<CMatrix> components;
    ParameterPoint at;
    std::string gauge;
    double max_anti_herm_defect = 0.0;
};

// Curvature components F_{mu nu} (mu < nu; antisymmetry is structural) and
// covariant-derivative tensors keyed by the outer derivative directions.
struct CurvatureSet {
    std::vector<std::string> directions;
    ParameterPoint at;
    std::map<std::pair<int, int>, CMatrix> curvature;

    struct Derivative {
        std::vector<int> sigmas;  // outermost first
        std::pair<int, int> pair;
        CMatrix value;
    };
    std::vector<Derivative> derivatives;
    double max_anti_herm_defect = 0.0;
    int order = 0;
};

struct LieSpanResult {
    int matrices_considered = 0;
    int rank = 0;
    std::vector<double> singular_values;   // descending
    std::vector<int> rank_by_order;        // rank after including order k
    int stagnation_order = 0;              // first order with no further growth
    bool abelian = false;                  // span closes under commutation trivially
    std::vector<ParameterPoint> sample_points;
};

struct RankOptions {
    double rank_tol = 1e-6;     // relative to the largest singular value
    double zero_floor = 1e-8;   // matrices below this magnitude count as zero
};

// Evaluates frames on the integer step lattice around a base point and
// memoizes everything reachable by nested stencils. For isospectral models
// the frames are V(kappa) * F0 with per-factor exponential caching; the
// generic path re-anchors projector transport at the lattice base.
class StencilEngine {
public:
    StencilEngine(const spectral::FrameField& frames, std::vector<std::string> directions,
                  FdOptions options);
    ~StencilEngine();

    // Anti-Hermitized A_mu at lattice offset; offsets are in units of step.
    const CMatrix& connection(const std::vector<int>& offset, int mu);
    // F_{mu nu} at offset (mu < nu).
    const CMatrix& curvature(const std::vector<int>& offset, int mu, int nu);
    // Covariant derivative tower: nabla_{sigmas...} F_{mu nu} at offset.
    const CMatrix& derivative(const std::vector<int>& offset, const std::vector<int>& sigmas,
                              int mu, int nu);

    double max_anti_herm_defect() const { return max_defect_; }
    const std::vector<std::string>& directions() const { return directions_; }
    ParameterPoint point_at(const std::vector<int>& offset) const;
    int dimension() const { return frames_.dimension(); }

private:
    struct Impl;
    const spectral::FrameField& frames_;
    std::vector<std::string> directions_;
    FdOptions options_;
    double max_defect_ = 0.0;
    std::unique_ptr<Impl> impl_;
};

// (A_mu)_{ab} = <psi_a | d_mu psi_b> for every direction, anti-Hermitized,
// with the pre-symmetrization defect recorded. kappa must lie in the frame
// field's validity region.
ConnectionField connection_at(const spectral::FrameField& frames,
                              const std::vector<std::string>& directions,
                              const ParameterPoint& kappa, const FdOptions& options = {});

// Isospectral route: projects V^dag dV onto a fixed base-Hamiltonian frame.
ConnectionField connection_isospectral(const model::ModelSpec& spec, const fock::FockBasis& basis,
                                       const CMatrix& h0_frame, const ParameterPoint& kappa,
                                       const FdOptions& options = {});

// F_{mu nu} = d_mu A_nu - d_nu A_mu + [A_mu, A_nu] for all pairs.
CurvatureSet curvature_at(const spectral::FrameField& frames,
                          const std::vector<std::string>& directions, const ParameterPoint& kappa,
                          const FdOptions& options = {});

// Extends a curvature set with nabla_sigma ... nabla_sigma F_{mu nu} up to
// the requested order (order 0 returns the curvature alone).
CurvatureSet covariant_derivatives(const spectral::FrameField& frames,
                                   const std::vector<std::string>& directions,
                                   const ParameterPoint& kappa, int order,
                                   const FdOptions& options = {});

// Rank of the real linear span of anti-Hermitian matrices (each flattened
// to a real vector of length 2 d^2), with the full singular spectrum.
LieSpanResult lie_algebra_dimension(const std::vector<CMatrix>& matrices,
                                    const RankOptions& options = {});

// One direct-sum constituent of a holonomy-dimension target: a basis plus
// either a fixed H0-frame (isospectral gauge) or an eigenvalue/dimension
// tag resolved by projector transport at each sample point.
struct BlockTarget {
    fock::FockBasis basis;
    CMatrix h0_frame;          // non-empty => isospectral gauge
    double eigenvalue = 0.0;   // transported gauge: block to follow
    int dimension = 0;

    static BlockTarget isospectral(fock::FockBasis basis, CMatrix frame);
    static BlockTarget transported(fock::FockBasis basis, double eigenvalue, int dimension);
};

struct HolonomyDimensionOptions {
    int max_order = 3;
    FdOptions fd;
    RankOptions rank;
    double cluster_tol = 1e-8;
    // Stop when the rank has not grown for this many consecutive orders, or
    // when it reaches the direct-sum ceiling sum_i d_i^2.
    int stagnation_window = 2;
};

// Accumulates F and its covariant derivatives over every sample point and
// every direct-sum block, and returns the span rank with per-order
// diagnostics. Sample points where a transported block degenerates are
// skipped (recorded by omission from sample_points).
LieSpanResult holonomy_dimension(const model::ModelSpec& spec,
                                 const std::vector<BlockTarget>& targets,
                                 const std::vector<ParameterPoint>& sample_points,
                                 const HolonomyDimensionOptions& options = {});

// Largest change of any connection entry when the boson cutoff is raised by
// `escalation`; the convergence guard for Gaussian-word models.
double cutoff_connection_shift(const model::ModelSpec& spec, const CMatrix& h0_frame_small,
                               const ParameterPoint& kappa, int escalation,
                               const FdOptions& options = {});

}  // namespace holopnt::geometry

#endif
