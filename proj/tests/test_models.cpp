#include "holopnt/models.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <numbers>

using namespace holopnt;
using namespace holopnt::model;
using holopnt::fock::FockBasis;
using holopnt::fock::ModeSystem;

namespace {

RVector sorted_eigenvalues(const CMatrix& h) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    return es.eigenvalues();
}

}  // namespace

TEST_CASE("lambda builtin reproduces the polar-coupling chain exactly") {
    const ModelSpec spec = builtin("lambda");
    CHECK(spec.system.boson_modes == 3);
    CHECK(spec.parameter_names == std::vector<std::string>{"theta", "phi"});

    const FockBasis f1 = fock::enumerate_layer(spec.system, 1);
    for (double theta : {0.0, 0.37, 1.1}) {
        for (double phi : {0.0, 0.9, 2.4}) {
            const ParameterPoint p{{"theta", theta}, {"phi", phi}};
            const CMatrix h = hamiltonian_at(spec, p, f1);
            // Oracle: the chain with kappa_+ = cos(theta) e^{i phi},
            // kappa_- = sin(theta), on modes (+, c, -).
            const Complex kp = std::cos(theta) * std::exp(Complex(0, phi));
            const Complex km = std::sin(theta);
            CMatrix expected = CMatrix::Zero(3, 3);
            expected(1, 0) = kp;
            expected(0, 1) = std::conj(kp);
            expected(2, 1) = km;
            expected(1, 2) = std::conj(km);
            CHECK(max_abs(CMatrix(h - expected)) < 1e-12);
        }
    }
}

TEST_CASE("lambda spectrum is scale-normalized: 0 and +/-1 on the first layer") {
    const ModelSpec spec = builtin("lambda");
    const FockBasis f1 = fock::enumerate_layer(spec.system, 1);
    const RVector ev =
        sorted_eigenvalues(hamiltonian_at(spec, {{"theta", 0.62}, {"phi", 1.7}}, f1));
    CHECK(std::abs(ev(0) + 1.0) < 1e-12);
    CHECK(std::abs(ev(1)) < 1e-12);
    CHECK(std::abs(ev(2) - 1.0) < 1e-12);
}

TEST_CASE("fcg4 single-particle spectrum is isospectral to n1+n2-n4") {
    const ModelSpec spec = builtin("fcg4");
    CHECK(spec.parameter_names.size() == 6);
    const FockBasis f1 = fock::enumerate_layer(spec.system, 1);
    const ParameterPoint p{{"theta1", 0.8}, {"theta2", 0.5}, {"theta3", 1.2},
                           {"phi1", 0.3},   {"phi2", 2.0},   {"phi3", 4.4}};
    const RVector ev = sorted_eigenvalues(hamiltonian_at(spec, p, f1));
    CHECK(std::abs(ev(0) + 1.0) < 1e-10);
    CHECK(std::abs(ev(1) - 0.0) < 1e-10);
    CHECK(std::abs(ev(2) - 1.0) < 1e-10);
    CHECK(std::abs(ev(3) - 1.0) < 1e-10);
}

TEST_CASE("isospectral models keep the base spectrum at random points") {
    Rng rng(99);
    for (const char* name : {"lambda", "fcg3", "fcg4"}) {
        const ModelSpec spec = builtin(name);
        for (int layer = 0; layer <= 2; ++layer) {
            const FockBasis basis = fock::enumerate_layer(spec.system, layer);
            const CMatrix h0 = fock::operator_matrix(spec.hamiltonian, basis, {});
            const RVector base = sorted_eigenvalues(h0);
            for (int trial = 0; trial < 50; ++trial) {
                ParameterPoint p;
                for (const auto& n : spec.parameter_names) p.set(n, rng.uniform(0.0, 6.28));
                const RVector ev = sorted_eigenvalues(hamiltonian_at(spec, p, basis));
                CHECK((ev - base).cwiseAbs().maxCoeff() < 1e-9 * std::max(1.0, base.cwiseAbs().maxCoeff()));
            }
        }
    }
}

TEST_CASE("mixer word at zero angles is the identity") {
    const ModelSpec spec = builtin("fcg4");
    const FockBasis f2 = fock::enumerate_layer(spec.system, 2);
    ParameterPoint p;
    for (const auto& n : spec.parameter_names) p.set(n, 0.0);
    const CMatrix v = unitary_at(spec, p, f2);
    CHECK(max_abs(CMatrix(v - CMatrix::Identity(10, 10))) < 1e-12);
}

TEST_CASE("unitary lifts are unitary on number-conserving layers") {
    Rng rng(5);
    const ModelSpec spec = builtin("fcg4");
    for (int layer : {1, 2, 3}) {
        const FockBasis basis = fock::enumerate_layer(spec.system, layer);
        ParameterPoint p;
        for (const auto& n : spec.parameter_names) p.set(n, rng.uniform(0.0, 6.28));
        const CMatrix v = unitary_at(spec, p, basis);
        CHECK(unitarity_defect(v) < 1e-10);
    }
}

TEST_CASE("fcg4 word maps the base dark state to the closed-form single-particle state") {
    const ModelSpec spec = builtin("fcg4");
    const FockBasis f1 = fock::enumerate_layer(spec.system, 1);
    const double pi = std::numbers::pi;
    const ParameterPoint p{{"theta1", 0.7}, {"theta2", 1.1}, {"theta3", 0.4},
                           {"phi1", 0.5},   {"phi2", 1.9},   {"phi3", pi / 3}};
    const CMatrix v = unitary_at(spec, p, f1);
    // H0 = n1 + n2 - n4 has its single dark state at |1_3>.
    CVector dark = v.col(2);
    const double t1 = 0.7, t2 = 1.1, t3 = 0.4, p1 = 0.5, p2 = 1.9, p3 = pi / 3;
    CVector expected(4);
    expected(0) = std::exp(Complex(0, p3)) * std::cos(t3) * std::sin(t1) * std::sin(t2);
    expected(1) = -std::exp(Complex(0, p3 - p1)) * std::cos(t1) * std::sin(t2) * std::cos(t3);
    expected(2) = std::exp(Complex(0, p3 - p2)) * std::cos(t2) * std::cos(t3);
    expected(3) = std::sin(t3);
    CHECK((dark - expected).cwiseAbs().maxCoeff() < 1e-12);
    // Component moduli match the quoted dark state; two sign conventions of
    // the mixer differ only in the signs of the second and fourth entries.
    for (int k = 0; k < 4; ++k) {
        CHECK(std::abs(std::abs(dark(k)) - std::abs(expected(k))) < 1e-12);
    }
}

TEST_CASE("kerr2 Gaussian factors at zero arguments give the identity") {
    const ModelSpec spec = builtin("kerr2", {.cutoff = 8});
    const FockBasis basis = fock::enumerate_truncated(spec.system);
    ParameterPoint p;
    for (const auto& n : spec.parameter_names) p.set(n, 0.0);
    const CMatrix v = unitary_at(spec, p, basis);
    CHECK(max_abs(CMatrix(v - CMatrix::Identity(v.rows(), v.cols()))) < 1e-12);
}

TEST_CASE("kerr2 word is exactly unitary on the truncated basis") {
    const ModelSpec spec = builtin("kerr2", {.cutoff = 12});
    const FockBasis basis = fock::enumerate_truncated(spec.system);
    const ParameterPoint p{{"r1", 0.2},    {"r2", 0.15},   {"r3", 0.1},    {"r4", 0.3},
                           {"theta1", 0.4}, {"theta2", 1.0}, {"theta3", 2.2}, {"theta4", 0.7}};
    const CMatrix v = unitary_at(spec, p, basis);
    // Hard-truncated generators stay anti-Hermitian, so the exponential is
    // unitary to solver precision even at finite cutoff.
    CHECK(unitarity_defect(v) < 1e-10);
}

TEST_CASE("jaynes_cummings doublets have the known eigenvalues") {
    const ModelSpec spec = builtin("jaynes_cummings");
    const ParameterPoint p{{"omega_a", 1.0}, {"omega_c", 0.8}, {"kappa", 0.33}};
    for (int n = 1; n <= 4; ++n) {
        const FockBasis layer = fock::enumerate_layer(spec.system, n);
        REQUIRE(layer.size() == 2);
        const RVector ev = sorted_eigenvalues(hamiltonian_at(spec, p, layer));
        // Doublet of the photon-number block: mean +/- Rabi splitting.
        const double mean = 0.8 * n + (1.0 - 0.8) / 2.0;
        const double rabi =
            std::sqrt(std::pow((1.0 - 0.8) / 2.0, 2) + 0.33 * 0.33 * n);
        CHECK(std::abs(ev(0) - (mean - rabi)) < 1e-12);
        CHECK(std::abs(ev(1) - (mean + rabi)) < 1e-12);
    }
}

TEST_CASE("composite of two chains: six modes, four parameters") {
    ModelSpec lam2 = builtin("lambda");
    // Rename parameters to keep them disjoint.
    for (auto& f : lam2.word) {
        auto& mixer = std::get<MixerFactor>(f);
        mixer.theta_param = "theta_b";
        mixer.phi_param = "phi_b";
    }
    lam2.parameter_names = {"theta_b", "phi_b"};
    const ModelSpec composite = compose({builtin("lambda"), lam2});
    CHECK(composite.system.boson_modes == 6);
    CHECK(composite.parameter_names.size() == 4);

    const ParameterPoint p{
        {"theta", 0.6}, {"phi", 1.2}, {"theta_b", 0.9}, {"phi_b", 0.4}};

    // Block (N1=1, N2=0): the composite first layer restricted to the first
    // subsystem's modes equals the chain matrix; cross-subsystem elements
    // vanish.
    const FockBasis f1 = fock::enumerate_layer(composite.system, 1);
    const CMatrix h = hamiltonian_at(composite, p, f1);
    const FockBasis lam_f1 = fock::enumerate_layer(builtin("lambda").system, 1);
    const CMatrix h_lam = hamiltonian_at(builtin("lambda"), p, lam_f1);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            CHECK(std::abs(h(i, j) - h_lam(i, j)) < 1e-12);
            CHECK(std::abs(h(i, j + 3)) < 1e-15);
        }
    }

    // Composite eigenvalues are pairwise sums: brute-force oracle on N = 2.
    const FockBasis f2 = fock::enumerate_layer(composite.system, 2);
    const RVector ev = sorted_eigenvalues(hamiltonian_at(composite, p, f2));
    std::vector<double> expected;
    for (int n1 = 0; n1 <= 2; ++n1) {
        const int n2 = 2 - n1;
        const RVector e1 = sorted_eigenvalues(hamiltonian_at(
            builtin("lambda"), p, fock::enumerate_layer(builtin("lambda").system, n1)));
        const RVector e2 =
            sorted_eigenvalues(hamiltonian_at(lam2, p, fock::enumerate_layer(lam2.system, n2)));
        for (Eigen::Index i = 0; i < e1.size(); ++i) {
            for (Eigen::Index j = 0; j < e2.size(); ++j) expected.push_back(e1(i) + e2(j));
        }
    }
    std::sort(expected.begin(), expected.end());
    REQUIRE(static_cast<Eigen::Index>(expected.size()) == ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        CHECK(std::abs(ev(i) - expected[i]) < 1e-10);
    }
}

TEST_CASE("compose rejects parameter collisions") {
    CHECK_THROWS_AS(compose({builtin("lambda"), builtin("lambda")}), InputError);
}

TEST_CASE("model documents: builtin reference and explicit graph") {
    const ModelSpec lam = parse_model("model = \"lambda\"\n");
    CHECK(lam.name == "lambda");
    CHECK(lam.kind == Kind::isospectral_mixer);

    // Triangular three-mode graph.
    const ModelSpec tri = parse_model(R"(
system = { bosons = 3, two_levels = 0 }
graph = [
  { i = 1, j = 2, amp = "r1", phase = "p1" },
  { i = 2, j = 3, amp = "r2", phase = "p2" },
  { i = 3, j = 1, amp = "r3", phase = "p3" },
]
)");
    CHECK(tri.kind == Kind::coupled_graph);
    CHECK(tri.parameter_names.size() == 6);
    CHECK(tri.hamiltonian.terms().size() == 6);  // three edges plus H.c.

    // Coupled-graph Hamiltonians are Hermitian by construction.
    const FockBasis f1 = fock::enumerate_layer(tri.system, 1);
    ParameterPoint p;
    for (const auto& n : tri.parameter_names) p.set(n, 0.5);
    CHECK(hermiticity_defect(hamiltonian_at(tri, p, f1)) < 1e-14);

    CHECK_THROWS_AS(parse_model(R"(
system = { bosons = 4, two_levels = 0 }
graph = [ { i = 5, j = 1, amp = "r", phase = "p" } ]
)"),
                    InputError);
    CHECK_THROWS_AS(parse_model("model = \"lambda\"\nbogus = 1\n"), InputError);
    CHECK_THROWS_AS(parse_model("model = \"unknown_thing\"\n"), InputError);
}

TEST_CASE("model documents round-trip semantically") {
    const std::string text = R"doc(
system = { bosons = 2, two_levels = 0, cutoff = 6 }
isospectral = true
h0 = "n(1) + -1 * n(2)"
word = [
  { factor = "mixer", modes = [1, 2], theta = "t", phi = "p" },
]
)doc";
    const ModelSpec spec = parse_model(text);
    const ModelSpec again = parse_model(serialize_model(spec));
    CHECK(again.kind == spec.kind);
    CHECK(again.system == spec.system);
    CHECK(again.parameter_names == spec.parameter_names);
    CHECK(again.word.size() == spec.word.size());
    CHECK(again.hamiltonian.terms().size() == spec.hamiltonian.terms().size());

    const FockBasis f1 = fock::enumerate_layer(spec.system, 1);
    const ParameterPoint p{{"t", 0.3}, {"p", 0.8}};
    CHECK(max_abs(CMatrix(hamiltonian_at(spec, p, f1) - hamiltonian_at(again, p, f1))) < 1e-14);
}
