#ifndef HOLOPNT_HOLONOMY_HPP
#define HOLOPNT_HOLONOMY_HPP

#include "holopnt/spectral.hpp"

namespace holopnt::holonomy {

// Piecewise-linear closed path in parameter space. Waypoints are closed
// (first equals last) and legs are subdivided uniformly on evaluation.
struct ParameterLoop {
    std::vector<ParameterPoint> waypoints;
    int segments_per_leg = 500;

    int legs() const { return static_cast<int>(waypoints.size()) - 1; }
    // Points along the loop at `multiplier` times the base subdivision,
    // including both endpoints (first == last).
    std::vector<ParameterPoint> sample(int multiplier = 1) const;
    double length() const;  // Euclidean in parameter coordinates
};

// Builds a loop, appending the first waypoint when the path is not closed.
// Requires at least 3 distinct waypoints.
ParameterLoop make_loop(std::vector<ParameterPoint> waypoints, int segments_per_leg = 500);

ParameterLoop reversed(const ParameterLoop& loop);
// Concatenation gamma2 after gamma1; both must share the base point.
ParameterLoop concatenated(const ParameterLoop& first, const ParameterLoop& second);

// Loop document: `segments_per_leg = n` and `waypoints = [ {name = value} ]`.
ParameterLoop parse_loop(const std::string& text);

struct HolonomyResult {
    enum class Method { ordered_exponential, projector_transport, adiabatic };
    CMatrix unitary;
    Method method = Method::ordered_exponential;
    double discretization_estimate = 0.0;
    int segments_used = 0;
};

struct HolonomyOptions {
    double step = 1e-3;                  // tangential finite-difference step
    double refine_target = 1e-6;         // stop refining when ||dU|| below this
    int max_refinement_doublings = 5;
    double cluster_tol = 1e-8;
};

// Path-ordered product over segments of exp(-A . dkappa) with A evaluated at
// segment midpoints in the frame field's gauge; later segments multiply on
// the left, so the result is the physical parallel-transport holonomy
// (for a single dark state, exp(-i \oint Im<psi|d psi>)).
HolonomyResult holonomy_ordered_exp(const spectral::FrameField& frames, const ParameterLoop& loop,
                                    const HolonomyOptions& options = {});

// Discrete parallel transport oracle: Loewdin-reorthonormalized projector
// chain around the loop, expressed in the starting frame.
HolonomyResult holonomy_projector_transport(const model::ModelSpec& spec,
                                            const fock::FockBasis& basis, double block_eigenvalue,
                                            int block_dimension, const ParameterLoop& loop,
                                            const HolonomyOptions& options = {});

// Geometric phase of the three-mode chain as the oriented surface integral
// of sin(2 theta) over the region enclosed by a simple loop in the
// (theta, phi) chart. Counterclockwise in (theta, phi) axes is positive;
// self-intersecting loops are rejected.
double geometric_phase_area(const ParameterLoop& loop, const std::string& theta_name = "theta",
                            const std::string& phi_name = "phi", double tolerance = 1e-9);

struct AdiabaticOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    double eigenvalue_drift_tol = 1e-8;  // block energy must stay put on the loop
};

// Integrates the Schroedinger equation around the loop over total time T for
// every base-frame column, removes the dynamical phase exp(-i eps T), and
// projects back onto the base frame. The block eigenvalue must be constant
// along the loop (checked at the waypoints).
HolonomyResult adiabatic_check(const model::ModelSpec& spec, const spectral::FrameField& frames,
                               double block_eigenvalue, const ParameterLoop& loop, double total_time,
                               const AdiabaticOptions& options = {});

// || U1 U2 - U2 U1 || in operator norm; ~0 certifies the pair commutes.
double commutator_defect(const CMatrix& u1, const CMatrix& u2);

}  // namespace holopnt::holonomy

#endif
