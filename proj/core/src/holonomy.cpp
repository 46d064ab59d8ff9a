#include "holopnt/holonomy.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace holopnt::holonomy {

namespace {

ParameterPoint interpolate(const ParameterPoint& a, const ParameterPoint& b, double t) {
    ParameterPoint p = a;
    for (const auto& [k, va] : a.values()) p.set(k, va + t * (b.get(k) - va));
    return p;
}

double distance(const ParameterPoint& a, const ParameterPoint& b) {
    double s = 0.0;
    for (const auto& [k, va] : a.values()) {
        const double d = b.get(k) - va;
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace

std::vector<ParameterPoint> ParameterLoop::sample(int multiplier) const {
    std::vector<ParameterPoint> pts;
    const int per_leg = segments_per_leg * std::max(1, multiplier);
    for (int leg = 0; leg < legs(); ++leg) {
        for (int k = 0; k < per_leg; ++k) {
            pts.push_back(interpolate(waypoints[leg], waypoints[leg + 1],
                                      static_cast<double>(k) / per_leg));
        }
    }
    pts.push_back(waypoints.back());
    return pts;
}

double ParameterLoop::length() const {
    double total = 0.0;
    for (int leg = 0; leg < legs(); ++leg) total += distance(waypoints[leg], waypoints[leg + 1]);
    return total;
}

ParameterLoop make_loop(std::vector<ParameterPoint> waypoints, int segments_per_leg) {
    if (!waypoints.empty() && !(waypoints.front() == waypoints.back())) {
        waypoints.push_back(waypoints.front());
    }
    std::set<std::vector<std::pair<std::string, double>>> distinct;
    for (const auto& w : waypoints) {
        distinct.insert({w.values().begin(), w.values().end()});
    }
    if (distinct.size() < 3) throw InputError("a loop needs at least 3 distinct waypoints");
    if (segments_per_leg < 1) throw InputError("segments_per_leg must be >= 1");
    ParameterLoop loop;
    loop.waypoints = std::move(waypoints);
    loop.segments_per_leg = segments_per_leg;
    return loop;
}

ParameterLoop reversed(const ParameterLoop& loop) {
    ParameterLoop out = loop;
    std::reverse(out.waypoints.begin(), out.waypoints.end());
    return out;
}

ParameterLoop concatenated(const ParameterLoop& first, const ParameterLoop& second) {
    if (!(first.waypoints.front() == second.waypoints.front())) {
        throw InputError("concatenated loops must share the base point");
    }
    ParameterLoop out;
    out.segments_per_leg = std::min(first.segments_per_leg, second.segments_per_leg);
    out.waypoints = first.waypoints;
    out.waypoints.insert(out.waypoints.end(), second.waypoints.begin() + 1,
                         second.waypoints.end());
    return out;
}

ParameterLoop parse_loop(const std::string& text) {
    const doc::Table top = doc::parse_document(text);
    top.reject_unknown_keys({"segments_per_leg", "waypoints"}, "loop document");
    std::vector<ParameterPoint> pts;
    for (const doc::Value& wv : top.at("waypoints").as_array("waypoints")) {
        const doc::Table& w = wv.as_table("waypoint");
        ParameterPoint p;
        for (const auto& [name, val] : w.entries) p.set(name, val.as_number(name));
        pts.push_back(std::move(p));
    }
    const int seg = top.has("segments_per_leg") ? top.at("segments_per_leg").as_int("segments_per_leg")
                                                : 500;
    return make_loop(std::move(pts), seg);
}

// ---------------------------------------------------------------------------
// Ordered exponential
// ---------------------------------------------------------------------------

namespace {

CMatrix ordered_exp_pass(const spectral::FrameField& frames, const ParameterLoop& loop,
                         int multiplier, double fd_step) {
    const auto pts = loop.sample(multiplier);
    const int d = frames.dimension();
    CMatrix u = CMatrix::Identity(d, d);
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        const ParameterPoint& p0 = pts[k];
        const ParameterPoint& p1 = pts[k + 1];
        const double len = distance(p0, p1);
        if (len == 0.0) continue;
        const ParameterPoint mid = interpolate(p0, p1, 0.5);
        // Directional derivative along the leg tangent.
        const double s = std::min(fd_step, len);
        const ParameterPoint fwd = interpolate(p0, p1, 0.5 + s / len);
        const ParameterPoint bwd = interpolate(p0, p1, 0.5 - s / len);
        const CMatrix f0 = frames.frame(mid);
        const CMatrix df = (frames.frame(fwd) - frames.frame(bwd)) / (2.0 * s);
        CMatrix a = f0.adjoint() * df;
        a = ((a - a.adjoint()) / 2.0).eval();
        u = expm_antihermitian(CMatrix(-a * len)) * u;
    }
    return u;
}

}  // namespace

HolonomyResult holonomy_ordered_exp(const spectral::FrameField& frames, const ParameterLoop& loop,
                                    const HolonomyOptions& options) {
    HolonomyResult out;
    out.method = HolonomyResult::Method::ordered_exponential;
    int multiplier = 1;
    CMatrix u = ordered_exp_pass(frames, loop, multiplier, options.step);
    double estimate = 1e300;
    for (int round = 0; round < options.max_refinement_doublings; ++round) {
        const CMatrix u2 = ordered_exp_pass(frames, loop, multiplier * 2, options.step);
        estimate = operator_norm(CMatrix(u2 - u));
        u = u2;
        multiplier *= 2;
        if (estimate < options.refine_target) break;
    }
    if (estimate > 10.0 * std::max(options.refine_target, 1e-5)) {
        throw NumericalError("holonomy did not converge under refinement (last change " +
                             std::to_string(estimate) + ")");
    }
    out.unitary = std::move(u);
    out.discretization_estimate = estimate;
    out.segments_used = loop.legs() * loop.segments_per_leg * multiplier;
    if (unitarity_defect(out.unitary) > 1e-6) {
        throw NumericalError("holonomy lost unitarity beyond 1e-6");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Projector transport
// ---------------------------------------------------------------------------

namespace {

CMatrix transport_pass(const model::ModelSpec& spec, const fock::FockBasis& basis,
                       double block_eigenvalue, int block_dimension, const ParameterLoop& loop,
                       int multiplier, double cluster_tol) {
    const auto pts = loop.sample(multiplier);
    CMatrix frame0;
    CMatrix frame;
    double eps = block_eigenvalue;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        const CMatrix h = model::hamiltonian_at(spec, pts[k], basis);
        const auto blocks = spectral::eigen_blocks(h, cluster_tol);
        const spectral::EigenspaceBlock* best = nullptr;
        double dist = 1e300;
        for (const auto& b : blocks) {
            const double d = std::abs(b.eigenvalue - eps);
            if (d < dist) {
                dist = d;
                best = &b;
            }
        }
        if (!best || best->dimension != block_dimension) {
            throw FrameDegeneracyError("eigenvalue crossing along the loop");
        }
        eps = best->eigenvalue;
        if (k == 0) {
            frame0 = best->frame;
            frame = frame0;
        } else {
            frame = loewdin_orthonormalize(CMatrix(best->frame * (best->frame.adjoint() * frame)));
        }
    }
    return frame0.adjoint() * frame;
}

}  // namespace

HolonomyResult holonomy_projector_transport(const model::ModelSpec& spec,
                                            const fock::FockBasis& basis, double block_eigenvalue,
                                            int block_dimension, const ParameterLoop& loop,
                                            const HolonomyOptions& options) {
    HolonomyResult out;
    out.method = HolonomyResult::Method::projector_transport;
    CMatrix u = transport_pass(spec, basis, block_eigenvalue, block_dimension, loop, 1,
                               options.cluster_tol);
    const CMatrix u2 = transport_pass(spec, basis, block_eigenvalue, block_dimension, loop, 2,
                                      options.cluster_tol);
    out.discretization_estimate = operator_norm(CMatrix(u2 - u));
    out.unitary = u2;
    out.segments_used = loop.legs() * loop.segments_per_leg * 2;
    return out;
}

// ---------------------------------------------------------------------------
// Geometric phase as an oriented area integral
// ---------------------------------------------------------------------------

namespace {

struct Pt {
    double x;  // theta
    double y;  // phi
};

bool segments_properly_intersect(const Pt& a, const Pt& b, const Pt& c, const Pt& d) {
    auto cross = [](const Pt& o, const Pt& p, const Pt& q) {
        return (p.x - o.x) * (q.y - o.y) - (p.y - o.y) * (q.x - o.x);
    };
    const double d1 = cross(c, d, a);
    const double d2 = cross(c, d, b);
    const double d3 = cross(a, b, c);
    const double d4 = cross(a, b, d);
    return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

// Total phi-extent of the polygon interior on the horizontal line theta = x
// (even-odd rule).
double slice_width(const std::vector<Pt>& poly, double x) {
    std::vector<double> crossings;
    for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
        const Pt& a = poly[i];
        const Pt& b = poly[i + 1];
        if ((a.x <= x && b.x > x) || (b.x <= x && a.x > x)) {
            const double t = (x - a.x) / (b.x - a.x);
            crossings.push_back(a.y + t * (b.y - a.y));
        }
    }
    std::sort(crossings.begin(), crossings.end());
    double width = 0.0;
    for (std::size_t i = 0; i + 1 < crossings.size(); i += 2) {
        width += crossings[i + 1] - crossings[i];
    }
    return width;
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double tol, int depth) {
    const double m = (a + b) / 2;
    const double lm = (a + m) / 2, rm = (m + b) / 2;
    const double flm = f(lm), frm = f(rm);
    const double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
    const double left = (m - a) / 6.0 * (fa + 4 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return adaptive_simpson(f, a, m, fa, flm, fm, tol / 2, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, tol / 2, depth - 1);
}

}  // namespace

double geometric_phase_area(const ParameterLoop& loop, const std::string& theta_name,
                            const std::string& phi_name, double tolerance) {
    std::vector<Pt> poly;
    for (const auto& w : loop.waypoints) poly.push_back({w.get(theta_name), w.get(phi_name)});

    for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
        for (std::size_t j = i + 1; j + 1 < poly.size(); ++j) {
            if (segments_properly_intersect(poly[i], poly[i + 1], poly[j], poly[j + 1])) {
                throw InputError("geometric_phase_area: loop is self-intersecting");
            }
        }
    }

    // Orientation from the shoelace sum in (theta, phi) axes.
    double twice_area = 0.0;
    for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
        twice_area += poly[i].x * poly[i + 1].y - poly[i + 1].x * poly[i].y;
    }
    if (twice_area == 0.0) return 0.0;
    const double orientation = twice_area > 0 ? 1.0 : -1.0;

    // Integrate sin(2 theta) * width(theta) with vertex thetas as breakpoints.
    std::vector<double> breaks;
    for (const auto& p : poly) breaks.push_back(p.x);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    const auto integrand = [&](double x) { return std::sin(2.0 * x) * slice_width(poly, x); };
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double a = breaks[i], b = breaks[i + 1];
        if (b - a < 1e-15) continue;
        const double fa = integrand(a + 1e-13 * (b - a));
        const double fb = integrand(b - 1e-13 * (b - a));
        const double fm = integrand((a + b) / 2);
        total += adaptive_simpson(integrand, a, b, fa, fm, fb, tolerance / breaks.size(), 40);
    }
    return orientation * total;
}

// ---------------------------------------------------------------------------
// Adiabatic Schroedinger cross-check (embedded Dormand-Prince 5(4))
// ---------------------------------------------------------------------------

namespace {

struct LoopPath {
    const ParameterLoop& loop;
    std::vector<double> cum_length;  // per waypoint
    double total;

    explicit LoopPath(const ParameterLoop& l) : loop(l) {
        cum_length.push_back(0.0);
        for (int leg = 0; leg < l.legs(); ++leg) {
            cum_length.push_back(cum_length.back() +
                                 distance(l.waypoints[leg], l.waypoints[leg + 1]));
        }
        total = cum_length.back();
        if (total <= 0) throw InputError("adiabatic_check: loop has zero length");
    }

    ParameterPoint at_fraction(double f) const {
        const double s = std::clamp(f, 0.0, 1.0) * total;
        for (int leg = 0; leg < loop.legs(); ++leg) {
            if (s <= cum_length[leg + 1] || leg == loop.legs() - 1) {
                const double leg_len = cum_length[leg + 1] - cum_length[leg];
                const double t = leg_len > 0 ? (s - cum_length[leg]) / leg_len : 0.0;
                return interpolate(loop.waypoints[leg], loop.waypoints[leg + 1],
                                   std::clamp(t, 0.0, 1.0));
            }
        }
        return loop.waypoints.back();
    }
};

}  // namespace

HolonomyResult adiabatic_check(const model::ModelSpec& spec, const spectral::FrameField& frames,
                               double block_eigenvalue, const ParameterLoop& loop,
                               double total_time, const AdiabaticOptions& options) {
    const fock::FockBasis& basis = frames.basis();
    const LoopPath path(loop);

    // The dynamical phase removal below assumes a loop-constant eigenvalue.
    for (const auto& w : loop.waypoints) {
        const CMatrix h = model::hamiltonian_at(spec, w, basis);
        const auto blocks = spectral::eigen_blocks(h);
        double best = 1e300;
        for (const auto& b : blocks) best = std::min(best, std::abs(b.eigenvalue - block_eigenvalue));
        if (best > options.eigenvalue_drift_tol) {
            throw NumericalError("adiabatic_check: block eigenvalue drifts along the loop");
        }
    }

    const CMatrix& f0 = frames.base_frame();
    CMatrix psi = f0;

    const auto rhs = [&](double t, const CMatrix& y) {
        const CMatrix h = model::hamiltonian_at(spec, path.at_fraction(t / total_time), basis);
        return CMatrix(Complex(0.0, -1.0) * (h * y));
    };

    // Dormand-Prince coefficients.
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                        b6 = 11.0 / 84;
    static const double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                        e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                        e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    double t = 0.0;
    double dt = total_time / 1000.0;
    int steps = 0;
    const int max_steps = 20000000;
    while (t < total_time) {
        if (++steps > max_steps) throw NumericalError("adiabatic_check: step limit exceeded");
        dt = std::min(dt, total_time - t);
        const CMatrix k1 = rhs(t, psi);
        const CMatrix k2 = rhs(t + c2 * dt, CMatrix(psi + dt * (a21 * k1)));
        const CMatrix k3 = rhs(t + c3 * dt, CMatrix(psi + dt * (a31 * k1 + a32 * k2)));
        const CMatrix k4 = rhs(t + c4 * dt, CMatrix(psi + dt * (a41 * k1 + a42 * k2 + a43 * k3)));
        const CMatrix k5 =
            rhs(t + c5 * dt, CMatrix(psi + dt * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
        const CMatrix k6 = rhs(
            t + dt, CMatrix(psi + dt * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
        const CMatrix y5 = psi + dt * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const CMatrix k7 = rhs(t + dt, y5);
        const CMatrix err = dt * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double scale = options.atol + options.rtol * std::max(1.0, max_abs(y5));
        const double err_norm = max_abs(err) / scale;
        if (err_norm <= 1.0) {
            t += dt;
            psi = y5;
        }
        const double factor = err_norm > 0 ? 0.9 * std::pow(err_norm, -0.2) : 5.0;
        dt *= std::clamp(factor, 0.2, 5.0);
        if (dt < total_time * 1e-14) {
            throw NumericalError("adiabatic_check: step size underflow (tolerance unreachable)");
        }
    }

    // Remove the dynamical phase and express in the base frame.
    const Complex dephase = std::exp(Complex(0.0, block_eigenvalue * total_time));
    HolonomyResult out;
    out.method = HolonomyResult::Method::adiabatic;
    out.unitary = f0.adjoint() * (dephase * psi);
    out.segments_used = steps;
    out.discretization_estimate = unitarity_defect(out.unitary);
    return out;
}

double commutator_defect(const CMatrix& u1, const CMatrix& u2) {
    return operator_norm(CMatrix(u1 * u2 - u2 * u1));
}

}  // namespace holopnt::holonomy
