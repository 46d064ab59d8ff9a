// Acceptance suite: every criterion prints one [PASS]/[FAIL] line; the exit
// code is the number of failed criteria. `--criterion N` selects one.

#include "holopnt/geometry.hpp"
#include "holopnt/holonomy.hpp"
#include "holopnt/pnt.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>

using namespace holopnt;
using holopnt::fock::FockBasis;
using holopnt::model::ModelSpec;
using holopnt::model::builtin;

namespace {

constexpr double kPi = std::numbers::pi;

struct Checker {
    bool ok = true;
    std::ostringstream detail;

    void expect(bool condition, const std::string& what) {
        if (!condition) {
            ok = false;
            detail << "    failed: " << what << "\n";
        }
    }
    void expect_near(double value, double target, double tol, const std::string& what) {
        if (!(std::abs(value - target) <= tol)) {
            ok = false;
            detail << "    failed: " << what << " (got " << value << ", want " << target
                   << " +- " << tol << ")\n";
        }
    }
    void expect_eq(int value, int target, const std::string& what) {
        if (value != target) {
            ok = false;
            detail << "    failed: " << what << " (got " << value << ", want " << target << ")\n";
        }
    }
};

int direction_index(const ModelSpec& spec, const std::string& name) {
    for (std::size_t i = 0; i < spec.parameter_names.size(); ++i) {
        if (spec.parameter_names[i] == name) return static_cast<int>(i);
    }
    throw InputError("unknown direction " + name);
}

holonomy::ParameterLoop rectangle(double t0, double t1, double p0, double p1, int segments) {
    return holonomy::make_loop({ParameterPoint{{"theta", t0}, {"phi", p0}},
                                ParameterPoint{{"theta", t1}, {"phi", p0}},
                                ParameterPoint{{"theta", t1}, {"phi", p1}},
                                ParameterPoint{{"theta", t0}, {"phi", p1}}},
                               segments);
}

const spectral::EigenspaceBlock* find_block(const std::vector<spectral::EigenspaceBlock>& blocks,
                                            double eigenvalue) {
    for (const auto& b : blocks) {
        if (std::abs(b.eigenvalue - eigenvalue) < 1e-6) return &b;
    }
    return nullptr;
}

// Independent quadrature oracle: phase = -Im oint A = -oint cos^2 theta dphi.
double line_integral_phase(const holonomy::ParameterLoop& loop) {
    double phase = 0.0;
    for (int leg = 0; leg < loop.legs(); ++leg) {
        const auto& a = loop.waypoints[leg];
        const auto& b = loop.waypoints[leg + 1];
        const double dphi = b.get("phi") - a.get("phi");
        if (dphi == 0.0) continue;
        const int n = 4000;
        double integral = 0.0;
        auto f = [&](double t) {
            const double theta = a.get("theta") + t * (b.get("theta") - a.get("theta"));
            return std::pow(std::cos(theta), 2);
        };
        for (int k = 0; k < n; ++k) {
            const double t0 = static_cast<double>(k) / n;
            const double t1 = static_cast<double>(k + 1) / n;
            integral += (t1 - t0) / 6.0 * (f(t0) + 4.0 * f((t0 + t1) / 2) + f(t1));
        }
        phase -= integral * dphi;
    }
    return phase;
}

// ---------------------------------------------------------------------------
// Criterion 1: Lambda-scheme Abelian structure.
// ---------------------------------------------------------------------------
bool criterion_1() {
    Checker c;
    const ModelSpec spec = builtin("lambda");
    const FockBasis f1 = fock::enumerate_layer(spec.system, 1);
    const auto h0_f1 = spectral::h0_blocks(spec, f1);
    const int i_phi = direction_index(spec, "phi");
    const int i_theta = direction_index(spec, "theta");

    Rng rng(101);
    for (int trial = 0; trial < 20; ++trial) {
        const ParameterPoint p{{"theta", rng.uniform(0.05, 1.5)}, {"phi", rng.uniform(0.0, 6.28)}};
        const auto conn = geometry::connection_isospectral(spec, f1, h0_f1[1].frame, p);
        const Complex a_phi = conn.components[i_phi](0, 0);
        const Complex want = kI * std::pow(std::cos(p.get("theta")), 2);
        c.expect(std::abs(a_phi - want) < 1e-6,
                 "A_phi = i cos^2(theta) at random point " + std::to_string(trial));
        c.expect(std::abs(conn.components[i_theta](0, 0)) < 1e-6, "A_theta = 0");
    }

    // Two-photon rectangle holonomies: eigenvalues e^{+-2 i phase}.
    const FockBasis f2 = fock::enumerate_layer(spec.system, 2);
    const auto dark2 = find_block(spectral::h0_blocks(spec, f2), 0.0);
    for (int trial = 0; trial < 5; ++trial) {
        const double t0 = rng.uniform(0.05, 0.5), t1 = t0 + rng.uniform(0.2, 0.8);
        const double p0 = rng.uniform(0.0, 1.5), p1 = p0 + rng.uniform(0.3, 1.5);
        const auto loop = rectangle(t0, t1, p0, p1, 350);
        const double phase = line_integral_phase(loop);
        const auto frames =
            spectral::isospectral_frame(spec, f2, dark2->frame, loop.waypoints.front());
        const auto result = holonomy::holonomy_ordered_exp(*frames, loop);
        Eigen::ComplexEigenSolver<CMatrix> es(result.unitary);
        std::vector<double> args = {std::arg(es.eigenvalues()(0)), std::arg(es.eigenvalues()(1))};
        std::sort(args.begin(), args.end());
        auto wrap = [](double x) { return std::atan2(std::sin(x), std::cos(x)); };
        std::vector<double> want = {wrap(-2 * phase), wrap(2 * phase)};
        std::sort(want.begin(), want.end());
        c.expect(std::abs(args[0] - want[0]) < 1e-4 && std::abs(args[1] - want[1]) < 1e-4,
                 "two-photon holonomy eigenvalue pair, loop " + std::to_string(trial));
    }

    // Dark-block holonomies commute at N = 2, 3, 4.
    for (int n = 2; n <= 4; ++n) {
        const FockBasis layer = fock::enumerate_layer(spec.system, n);
        const auto dark = find_block(spectral::h0_blocks(spec, layer), 0.0);
        const auto loop_a = rectangle(0.15, 0.8, 0.2, 1.4, 300);
        const auto loop_b = rectangle(0.3, 1.1, 0.6, 2.3, 300);
        const auto frames =
            spectral::isospectral_frame(spec, layer, dark->frame, loop_a.waypoints.front());
        const auto ua = holonomy::holonomy_ordered_exp(*frames, loop_a);
        const auto frames_b =
            spectral::isospectral_frame(spec, layer, dark->frame, loop_b.waypoints.front());
        const auto ub = holonomy::holonomy_ordered_exp(*frames_b, loop_b);
        c.expect(holonomy::commutator_defect(ua.unitary, ub.unitary) < 1e-5,
                 "dark holonomies commute at N = " + std::to_string(n));
    }

    std::cout << c.detail.str();
    return c.ok;
}

// ---------------------------------------------------------------------------
// Criterion 2: geometric-phase dual oracle.
// ---------------------------------------------------------------------------
bool criterion_2() {
    Checker c;
    const ModelSpec spec = builtin("lambda");
    const FockBasis f1 = fock::enumerate_layer(spec.system, 1);
    const auto h0 = spectral::h0_blocks(spec, f1);
    Rng rng(202);
    for (int trial = 0; trial < 20; ++trial) {
        const double t0 = rng.uniform(0.05, 0.6), t1 = t0 + rng.uniform(0.15, 0.8);
        const double p0 = rng.uniform(0.0, 2.0), p1 = p0 + rng.uniform(0.2, 1.8);
        holonomy::ParameterLoop loop = rectangle(t0, t1, p0, p1, 300);
        if (trial % 4 == 0) {
            // Pentagon variant: insert a midpoint vertex on one edge and bulge it.
            loop = holonomy::make_loop({ParameterPoint{{"theta", t0}, {"phi", p0}},
                                        ParameterPoint{{"theta", t1}, {"phi", p0}},
                                        ParameterPoint{{"theta", t1 + 0.1}, {"phi", (p0 + p1) / 2}},
                                        ParameterPoint{{"theta", t1}, {"phi", p1}},
                                        ParameterPoint{{"theta", t0}, {"phi", p1}}},
                                       300);
        }
        const double area_phase = holonomy::geometric_phase_area(loop);
        const double line_phase = line_integral_phase(loop);
        const auto frames =
            spectral::isospectral_frame(spec, f1, h0[1].frame, loop.waypoints.front());
        const auto result = holonomy::holonomy_ordered_exp(*frames, loop);
        const double exp_phase = std::arg(result.unitary(0, 0));
        auto wrap = [](double x) { return std::atan2(std::sin(x), std::cos(x)); };
        c.expect(std::abs(area_phase - line_phase) < 1e-5,
                 "area vs line integral, loop " + std::to_string(trial));
        c.expect(std::abs(wrap(exp_phase - wrap(area_phase))) < 1e-5,
                 "ordered-exp vs area phase, loop " + std::to_string(trial));
        c.expect(std::abs(wrap(exp_phase - wrap(line_phase))) < 1e-5,
                 "ordered-exp vs line phase, loop " + std::to_string(trial));
    }
    std::cout << c.detail.str();
    return c.ok;
}

// ---------------------------------------------------------------------------
// Criterion 3: fcg4 closed forms and the two-particle rank.
// ---------------------------------------------------------------------------
bool criterion_3() {
    Checker c;
    const ModelSpec spec = builtin("fcg4");
    const FockBasis f1 = fock::enumerate_layer(spec.system, 1);
    const auto h0_f1 = spectral::h0_blocks(spec, f1);
    Rng rng(303);
    for (int trial = 0; trial < 20; ++trial) {
        ParameterPoint p;
        for (const auto& n : spec.parameter_names) p.set(n, rng.uniform(0.15, 1.4));
        const double c1 = std::cos(p.get("theta1")), s1 = std::sin(p.get("theta1"));
        const double c2 = std::cos(p.get("theta2")), s2 = std::sin(p.get("theta2"));
        const double c3 = std::cos(p.get("theta3")), s3 = std::sin(p.get("theta3"));

        const auto field = spectral::isospectral_frame(spec, f1, h0_f1[1].frame, p);
        const auto conn = geometry::connection_at(*field, spec.parameter_names, p);
        auto a = [&](const std::string& n) {
            return conn.components[direction_index(spec, n)](0, 0);
        };
        c.expect(std::abs(a("phi1") - (-kI * c1 * c1 * s2 * s2 * c3 * c3)) < 1e-6, "A_phi1");
        c.expect(std::abs(a("phi2") - (-kI * c2 * c2 * c3 * c3)) < 1e-6, "A_phi2");
        c.expect(std::abs(a("phi3") - (kI * c3 * c3)) < 1e-6, "A_phi3");
        c.expect(std::abs(a("theta1")) < 1e-6 && std::abs(a("theta2")) < 1e-6 &&
                     std::abs(a("theta3")) < 1e-6,
                 "A_theta = 0");

        const auto curv = geometry::curvature_at(*field, spec.parameter_names, p);
        auto f = [&](const std::string& x, const std::string& y) {
            const int i = direction_index(spec, x), j = direction_index(spec, y);
            return i < j ? curv.curvature.at({i, j})(0, 0) : -curv.curvature.at({j, i})(0, 0);
        };
        c.expect(std::abs(f("phi1", "theta1") - (-2 * kI * s1 * c1 * s2 * s2 * c3 * c3)) < 1e-6,
                 "F_phi1,theta1");
        c.expect(std::abs(f("phi1", "theta2") - (2 * kI * c1 * c1 * s2 * c2 * c3 * c3)) < 1e-6,
                 "F_phi1,theta2");
        c.expect(std::abs(f("phi1", "theta3") - (-2 * kI * c1 * c1 * s2 * s2 * s3 * c3)) < 1e-6,
                 "F_phi1,theta3");
        c.expect(std::abs(f("phi2", "theta2") - (-2 * kI * s2 * c2 * c3 * c3)) < 1e-6,
                 "F_phi2,theta2");
        c.expect(std::abs(f("phi2", "theta3") - (-2 * kI * c2 * c2 * s3 * c3)) < 1e-6,
                 "F_phi2,theta3");
        c.expect(std::abs(f("phi3", "theta3") - (2 * kI * s3 * c3)) < 1e-6, "F_phi3,theta3");
    }

    // Two-particle dark-space rank with first-order derivatives: exactly 5.
    const FockBasis f2 = fock::enumerate_layer(spec.system, 2);
    const auto dark2 = find_block(spectral::h0_blocks(spec, f2), 0.0);
    ParameterPoint kappa0;
    for (const auto& n : spec.parameter_names) {
        kappa0.set(n, n.rfind("theta", 0) == 0 ? kPi / 4 : 0.0);
    }
    std::vector<geometry::BlockTarget> targets;
    targets.push_back(geometry::BlockTarget::isospectral(f2, dark2->frame));
    geometry::HolonomyDimensionOptions opts;
    opts.max_order = 1;
    const auto span = geometry::holonomy_dimension(spec, targets, {kappa0}, opts);
    c.expect_eq(span.rank, 5, "rank of {F, nabla F} at the quarter-pi point");

    std::cout << c.detail.str();
    return c.ok;
}

// ---------------------------------------------------------------------------
// Criterion 4: Appendix-style fixture matrices of the Kerr model at (0, zeta).
// ---------------------------------------------------------------------------
bool criterion_4() {
    Checker c;
    const ModelSpec spec = builtin("kerr2", {.cutoff = 20});
    const FockBasis basis = fock::enumerate_truncated(spec.system);

    const double r4 = 0.3, t4 = 0.7;
    const Complex zeta = r4 * std::exp(Complex(0, t4));
    const double s1v = std::cos(std::abs(zeta));
    const Complex s2v = std::exp(Complex(0, t4)) * std::sin(std::abs(zeta));
    const double abs_s2 = std::abs(s2v);
    const Complex eit = std::exp(Complex(0, t4));

    ParameterPoint p;
    for (const auto& n : spec.parameter_names) p.set(n, 0.0);
    p.set("r4", r4);
    p.set("theta4", t4);

    // Energy-2 eigenspace in the order |0,2>, |1,2>, |2,1>, |2,0>.
    const std::vector<std::vector<int>> span_states = {{0, 2}, {1, 2}, {2, 1}, {2, 0}};
    CMatrix frame = CMatrix::Zero(basis.size(), 4);
    for (int k = 0; k < 4; ++k) frame(basis.index_of({span_states[k]}), k) = 1.0;

    const auto field = spectral::isospectral_frame(spec, basis, frame, p);
    const auto conn = geometry::connection_at(*field, spec.parameter_names, p);
    auto a = [&](const std::string& n) {
        return conn.components[direction_index(spec, n)];
    };

    CMatrix a_r1 = CMatrix::Zero(4, 4);
    a_r1(0, 1) = -1;
    a_r1(1, 0) = 1;
    c.expect(max_abs(CMatrix(a("r1") - a_r1)) < 1e-5, "A_{1,r1}");

    CMatrix a_r4 = CMatrix::Zero(4, 4);
    a_r4(1, 3) = -2.0 * std::conj(eit);
    a_r4(3, 1) = 2.0 * eit;
    c.expect(max_abs(CMatrix(a("r4") - a_r4)) < 1e-5, "A_{1,r4}");

    CMatrix a_t4 = CMatrix::Zero(4, 4);
    a_t4(0, 0) = 4.0 * kI * r4 * s1v * abs_s2;
    a_t4(1, 1) = 2.0 * kI * r4 * s1v * abs_s2;
    a_t4(2, 2) = -4.0 * kI * r4 * s1v * abs_s2;
    a_t4(3, 3) = -2.0 * kI * r4 * s1v * abs_s2;
    a_t4(1, 3) = 2.0 * kI * std::conj(zeta) * std::cos(2 * r4);
    a_t4(3, 1) = 2.0 * kI * zeta * std::cos(2 * r4);
    c.expect(max_abs(CMatrix(a("theta4") - a_t4)) < 1e-5, "A_{1,theta4}");

    const auto curv = geometry::covariant_derivatives(*field, spec.parameter_names, p, 1);
    auto f_of = [&](const std::string& x, const std::string& y) {
        const int i = direction_index(spec, x), j = direction_index(spec, y);
        return i < j ? curv.curvature.at({i, j}) : CMatrix(-curv.curvature.at({j, i}));
    };

    CMatrix f_r1r2 = CMatrix::Zero(4, 4);
    f_r1r2(0, 1) = -2;
    f_r1r2(1, 0) = 2;
    c.expect(max_abs(CMatrix(f_of("r1", "r2") - f_r1r2)) < 1e-5, "F_{1,r1 r2}");

    CMatrix f_r2r3 = CMatrix::Zero(4, 4);
    f_r2r3(1, 3) = 4;
    f_r2r3(3, 1) = -4;
    c.expect(max_abs(CMatrix(f_of("r2", "r3") - f_r2r3)) < 1e-5, "F_{1,r2 r3}");

    CMatrix f_r4t4 = CMatrix::Zero(4, 4);
    f_r4t4(0, 0) = 4.0 * kI * (r4 * std::cos(2 * r4) + s1v * abs_s2);
    f_r4t4(1, 1) = -2.0 * kI * (3 * r4 * std::cos(2 * r4) - s1v * abs_s2);
    f_r4t4(2, 2) = -2.0 * kI * (r4 * std::cos(2 * r4) + s1v * abs_s2);
    f_r4t4(3, 3) = 2.0 * kI * (3 * r4 * std::cos(2 * r4) - s1v * abs_s2);
    f_r4t4(1, 3) = -4.0 * kI * abs_s2 * abs_s2 * std::conj(eit);
    f_r4t4(3, 1) = -4.0 * kI * abs_s2 * abs_s2 * eit;
    c.expect(max_abs(CMatrix(f_of("r4", "theta4") - f_r4t4)) < 1e-5, "F_{1,r4 theta4}");

    auto deriv_of = [&](const std::string& sigma, const std::string& x, const std::string& y) {
        const int s = direction_index(spec, sigma);
        const int i = direction_index(spec, x), j = direction_index(spec, y);
        for (const auto& d : curv.derivatives) {
            if (d.sigmas == std::vector<int>{s} &&
                d.pair == std::make_pair(std::min(i, j), std::max(i, j))) {
                return i < j ? d.value : CMatrix(-d.value);
            }
        }
        throw InputError("derivative not found");
    };

    CMatrix d_r1 = CMatrix::Zero(4, 4);
    d_r1(0, 0) = 2.0 * kI;
    d_r1(1, 1) = 6.0 * kI;
    d_r1(2, 2) = 4.0 * kI;
    d_r1(3, 3) = 4.0 * kI;
    c.expect(max_abs(CMatrix(deriv_of("r1", "r1", "theta1") - d_r1)) < 1e-5,
             "nabla_r1 F_{1,r1 theta1}");

    CMatrix d_r3 = CMatrix::Zero(4, 4);
    d_r3(0, 0) = 4.0 * kI * std::sin(t4);
    d_r3(1, 1) = 12.0 * kI * std::sin(t4);
    d_r3(2, 2) = 20.0 * kI * std::sin(t4);
    d_r3(3, 3) = 20.0 * kI * std::sin(t4);
    c.expect(max_abs(CMatrix(deriv_of("r3", "r2", "r4") - d_r3)) < 1e-5,
             "nabla_r3 F_{1,r2 r4}");

    std::cout << c.detail.str();
    return c.ok;
}

// ---------------------------------------------------------------------------
// Criterion 5: Kerr table rows as exact integers.
// ---------------------------------------------------------------------------
bool criterion_5() {
    Checker c;
    const ModelSpec spec = builtin("kerr2", {.cutoff = 20});
    const FockBasis basis = fock::enumerate_truncated(spec.system);

    pnt::ScanConfig cfg;
    cfg.seed = 505;
    cfg.random_samples = 2;
    const auto samples = pnt::scan_sample_points(spec, cfg);

    struct Row {
        double energy;
        int degeneracy;
        int want_dim_f;
        int want_dim_hol;
    };
    const std::vector<Row> rows = {{0.0, 4, 14, 16}, {2.0, 4, 14, 16}, {12.0, 5, 9, 9}};

    const CMatrix h0 = fock::operator_matrix(spec.hamiltonian, basis, {});
    for (const auto& row : rows) {
        std::vector<fock::OccupationState> spanners;
        for (std::size_t i = 0; i < basis.size(); ++i) {
            if (std::abs(h0(i, i).real() - row.energy) < 1e-9) spanners.push_back(basis.state(i));
        }
        c.expect_eq(static_cast<int>(spanners.size()), row.degeneracy,
                    "degeneracy at energy " + std::to_string(row.energy));
        CMatrix frame = CMatrix::Zero(basis.size(), spanners.size());
        for (std::size_t k = 0; k < spanners.size(); ++k) {
            frame(basis.index_of(spanners[k]), k) = 1.0;
        }
        std::vector<geometry::BlockTarget> targets;
        targets.push_back(geometry::BlockTarget::isospectral(basis, frame));
        geometry::HolonomyDimensionOptions opts;
        opts.max_order = 3;
        opts.rank.rank_tol = 1e-6;
        const auto span = geometry::holonomy_dimension(spec, targets, samples, opts);
        c.expect_eq(span.rank_by_order.front(), row.want_dim_f,
                    "dim{F} at energy " + std::to_string(row.energy));
        c.expect_eq(span.rank, row.want_dim_hol,
                    "dim Hol at energy " + std::to_string(row.energy));
    }
    std::cout << c.detail.str();
    return c.ok;
}

// ---------------------------------------------------------------------------
// Criterion 6: PNT values of the four reference models.
// ---------------------------------------------------------------------------
bool criterion_6() {
    Checker c;
    {
        pnt::ScanConfig cfg;
        cfg.n_max = 4;
        cfg.random_samples = 2;
        c.expect_eq(pnt::pnt_scan(builtin("lambda"), cfg).n_t, 1, "N_t(lambda)");
    }
    {
        pnt::ScanConfig cfg;
        cfg.n_max = 3;
        cfg.random_samples = 2;
        c.expect_eq(pnt::pnt_scan(builtin("fcg3"), cfg).n_t, 1, "N_t(fcg3)");
    }
    {
        pnt::ScanConfig cfg;
        cfg.n_max = 4;
        cfg.random_samples = 2;
        c.expect_eq(pnt::pnt_scan(builtin("jaynes_cummings"), cfg).n_t, 0, "N_t(jaynes_cummings)");
    }
    {
        pnt::ScanConfig cfg;
        cfg.n_max = 6;
        cfg.random_samples = 1;
        const auto report = pnt::pnt_scan(builtin("kerr2", {.cutoff = 14}), cfg);
        c.expect_eq(report.n_t, 2, "N_t(kerr2, N_max = 6)");
    }
    std::cout << c.detail.str();
    return c.ok;
}

// ---------------------------------------------------------------------------
// Criterion 7: composite additivity by direct scan.
// ---------------------------------------------------------------------------
bool criterion_7() {
    Checker c;
    ModelSpec lam_b = builtin("lambda");
    for (auto& f : lam_b.word) {
        auto& mixer = std::get<model::MixerFactor>(f);
        mixer.theta_param = "theta_b";
        mixer.phi_param = "phi_b";
    }
    lam_b.parameter_names = {"theta_b", "phi_b"};

    pnt::ScanConfig cfg;
    cfg.n_max = 2;
    cfg.random_samples = 2;
    const auto report = pnt::composite_pnt(model::compose({builtin("lambda"), lam_b}), cfg);
    c.expect_eq(report.n_t, 2, "N_t(lambda x lambda) by direct scan");
    if (!c.ok) {
        c.detail << "    note: the direct scan measures the span of curvature functionals;\n"
                    "    the product system realises both chain phases already on one-particle\n"
                    "    content, so the measured threshold saturates at 1. The tensor-product\n"
                    "    additivity value 2 counts joint population of both subsystems instead.\n"
                    "    See the decisions ledger for the full analysis.\n";
    }
    std::cout << c.detail.str();
    return c.ok;
}

// ---------------------------------------------------------------------------
// Criterion 8: property suites.
// ---------------------------------------------------------------------------
bool criterion_8() {
    Checker c;

    // Gauge covariance of ranks under 10 random base-frame rotations.
    {
        const ModelSpec spec = builtin("fcg4");
        const FockBasis f2 = fock::enumerate_layer(spec.system, 2);
        const auto dark = find_block(spectral::h0_blocks(spec, f2), 0.0);
        ParameterPoint kappa0;
        for (const auto& n : spec.parameter_names) {
            kappa0.set(n, n.rfind("theta", 0) == 0 ? kPi / 4 : 0.0);
        }
        geometry::HolonomyDimensionOptions opts;
        opts.max_order = 1;
        Rng rng(881);
        for (int trial = 0; trial < 10; ++trial) {
            const CMatrix w = random_unitary(3, rng);
            std::vector<geometry::BlockTarget> targets;
            targets.push_back(geometry::BlockTarget::isospectral(f2, CMatrix(dark->frame * w)));
            const auto span = geometry::holonomy_dimension(spec, targets, {kappa0}, opts);
            c.expect_eq(span.rank, 5, "rank under rotated base frame " + std::to_string(trial));
        }
    }

    // Holonomy properties on the chain's two-photon dark block.
    {
        const ModelSpec spec = builtin("lambda");
        const FockBasis f2 = fock::enumerate_layer(spec.system, 2);
        const auto dark = find_block(spectral::h0_blocks(spec, f2), 0.0);
        const auto loop = rectangle(0.2, 0.9, 0.3, 1.6, 300);
        const auto loop2 = rectangle(0.2, 0.55, 0.3, 2.4, 300);
        const auto frames =
            spectral::isospectral_frame(spec, f2, dark->frame, loop.waypoints.front());
        const auto u = holonomy::holonomy_ordered_exp(*frames, loop);
        c.expect(unitarity_defect(u.unitary) < 1e-6, "holonomy unitarity");
        const auto u_rev = holonomy::holonomy_ordered_exp(*frames, holonomy::reversed(loop));
        c.expect(operator_norm(CMatrix(u_rev.unitary - u.unitary.adjoint())) < 1e-5,
                 "orientation reversal");
        const auto u2 = holonomy::holonomy_ordered_exp(*frames, loop2);
        const auto u12 =
            holonomy::holonomy_ordered_exp(*frames, holonomy::concatenated(loop, loop2));
        c.expect(operator_norm(CMatrix(u12.unitary - u2.unitary * u.unitary)) < 1e-5,
                 "loop concatenation");
    }

    // Block-diagonality of a number-conserving multi-layer holonomy.
    {
        const ModelSpec spec = builtin("lambda");
        const FockBasis stacked = fock::stacked_layers(spec.system, 2);
        const auto dark = find_block(spectral::h0_blocks(spec, stacked), 0.0);
        const auto loop = rectangle(0.3, 0.9, 0.2, 1.1, 300);
        const auto frames =
            spectral::isospectral_frame(spec, stacked, dark->frame, loop.waypoints.front());
        const auto u = holonomy::holonomy_ordered_exp(*frames, loop);
        std::vector<int> layer_of;
        for (int col = 0; col < dark->dimension; ++col) {
            int layer = -1;
            for (std::size_t r = 0; r < stacked.size(); ++r) {
                if (std::abs(dark->frame(r, col)) > 1e-9) {
                    layer = stacked.state(r).total_particles();
                }
            }
            layer_of.push_back(layer);
        }
        double off = 0.0;
        for (int i = 0; i < dark->dimension; ++i) {
            for (int j = 0; j < dark->dimension; ++j) {
                if (layer_of[i] != layer_of[j]) off = std::max(off, std::abs(u.unitary(i, j)));
            }
        }
        c.expect(off < 1e-8, "holonomy block-diagonality over layers");
    }

    // Richardson behavior of plain central differences on 10 random entries.
    {
        const ModelSpec lambda = builtin("lambda");
        const FockBasis f1 = fock::enumerate_layer(lambda.system, 1);
        const auto h0 = spectral::h0_blocks(lambda, f1);
        Rng rng(882);
        for (int trial = 0; trial < 10; ++trial) {
            const ParameterPoint p{{"theta", rng.uniform(0.3, 1.2)},
                                   {"phi", rng.uniform(0.0, 6.0)}};
            auto a_phi = [&](double h) {
                geometry::FdOptions fd;
                fd.step = h;
                fd.fourth_order = false;
                return geometry::connection_isospectral(lambda, f1, h0[1].frame, p, fd)
                    .components[1](0, 0);
            };
            const Complex exact = kI * std::pow(std::cos(p.get("theta")), 2);
            const double e1 = std::abs(a_phi(2e-2) - exact);
            const double e2 = std::abs(a_phi(1e-2) - exact);
            c.expect(std::log2(e1 / e2) > 1.8,
                     "finite-difference order at trial " + std::to_string(trial));
        }
    }

    // Adiabatic error decreases monotonically over T, 2T, 4T.
    {
        const ModelSpec spec = builtin("lambda");
        const FockBasis f1 = fock::enumerate_layer(spec.system, 1);
        const auto h0 = spectral::h0_blocks(spec, f1);
        const auto loop = rectangle(0.15, 0.75, 0.1, 1.1, 200);
        const auto frames =
            spectral::isospectral_frame(spec, f1, h0[1].frame, loop.waypoints.front());
        const auto target = holonomy::holonomy_ordered_exp(*frames, loop);
        double prev = 1e300;
        for (double total_time : {40.0, 80.0, 160.0}) {
            const auto ad = holonomy::adiabatic_check(spec, *frames, 0.0, loop, total_time);
            const double err = operator_norm(CMatrix(ad.unitary - target.unitary));
            c.expect(err < prev, "adiabatic error decreases at T = " + std::to_string(total_time));
            prev = err;
        }
    }

    std::cout << c.detail.str();
    return c.ok;
}

// ---------------------------------------------------------------------------
// Criterion 9: tripod non-Abelian witness.
// ---------------------------------------------------------------------------
bool criterion_9() {
    Checker c;
    const ModelSpec spec = builtin("tripod");
    const FockBasis f1 = fock::enumerate_layer(spec.system, 1);

    ParameterPoint base;
    for (const auto& n : spec.parameter_names) base.set(n, 0.8);

    // Seeded search for a loop pair with a large commutator defect.
    Rng rng(909);
    double best_defect = 0.0;
    for (int trial = 0; trial < 12 && best_defect <= 0.1; ++trial) {
        auto random_loop = [&]() {
            const std::vector<std::string>& names = spec.parameter_names;
            const std::string a = names[rng.bits() % names.size()];
            std::string b = a;
            while (b == a) b = names[rng.bits() % names.size()];
            const double da = rng.uniform(0.4, 1.2), db = rng.uniform(0.4, 1.2);
            ParameterPoint p1 = base.shifted(a, da);
            ParameterPoint p2 = base.shifted(a, da).shifted(b, db);
            ParameterPoint p3 = base.shifted(b, db);
            return holonomy::make_loop({base, p1, p2, p3}, 200);
        };
        const auto loop_a = random_loop();
        const auto loop_b = random_loop();
        try {
            const auto frames = spectral::local_frame(spec, f1, base, 1, 1e-8);
            const auto ua = holonomy::holonomy_ordered_exp(*frames, loop_a);
            const auto ub = holonomy::holonomy_ordered_exp(*frames, loop_b);
            best_defect =
                std::max(best_defect, holonomy::commutator_defect(ua.unitary, ub.unitary));
        } catch (const FrameDegeneracyError&) {
            continue;
        }
    }
    c.expect(best_defect > 0.1,
             "searched commutator defect exceeds 0.1 (got " + std::to_string(best_defect) + ")");

    // Curvature rank at order <= 2 reaches dim U(2) = 4.
    pnt::ScanConfig sample_cfg;
    sample_cfg.seed = 910;
    sample_cfg.random_samples = 3;
    const auto samples = pnt::scan_sample_points(spec, sample_cfg);
    std::vector<geometry::BlockTarget> targets;
    targets.push_back(geometry::BlockTarget::transported(f1, 0.0, 2));
    geometry::HolonomyDimensionOptions opts;
    opts.max_order = 2;
    opts.cluster_tol = 1e-8;
    const auto span = geometry::holonomy_dimension(spec, targets, samples, opts);
    c.expect_eq(span.rank, 4, "tripod dark-block rank at order <= 2");

    std::cout << c.detail.str();
    return c.ok;
}

struct Criterion {
    int number;
    const char* summary;
    std::function<bool()> run;
};

}  // namespace

int main(int argc, char** argv) {
    int selected = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::string(argv[i]) == "--criterion" && i + 1 < argc) {
            selected = std::atoi(argv[i + 1]);
        }
    }

    const std::vector<Criterion> criteria = {
        {1, "chain Abelian structure (connection, two-photon pair, commutators)", criterion_1},
        {2, "geometric-phase dual oracle (area vs line vs ordered exponential)", criterion_2},
        {3, "fcg4 closed forms and two-particle rank 5", criterion_3},
        {4, "Kerr fixture matrices at (0, zeta), cutoff 20", criterion_4},
        {5, "Kerr table rows (14,16), (14,16), (9,9)", criterion_5},
        {6, "PNT values: lambda 1, fcg3 1, kerr2 2, jaynes_cummings 0", criterion_6},
        {7, "composite additivity by direct scan", criterion_7},
        {8, "property suites (gauge, holonomy laws, FD order, adiabatic)", criterion_8},
        {9, "tripod non-Abelian witness (defect > 0.1, rank 4)", criterion_9},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        if (selected != 0 && criterion.number != selected) continue;
        const auto start = std::chrono::steady_clock::now();
        bool ok = false;
        std::string error;
        try {
            ok = criterion.run();
        } catch (const std::exception& e) {
            error = e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << criterion.number << ": "
                  << criterion.summary << "  (" << seconds << " s)\n";
        if (!error.empty()) std::cout << "    exception: " << error << "\n";
        if (!ok) ++failures;
    }
    return failures;
}
