#include "holopnt/models.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace holopnt::model {

using fock::CoeffFactor;
using fock::Coefficient;
using fock::FockBasis;
using fock::LadderKind;
using fock::LadderOp;
using fock::ModeSystem;
using fock::OccupationState;
using fock::OperatorExpression;
using fock::OperatorTerm;

namespace {

void check_basis(const ModelSpec& spec, const FockBasis& basis) {
    if (basis.system().boson_modes != spec.system.boson_modes ||
        basis.system().two_level_modes != spec.system.two_level_modes) {
        throw InputError("basis mode layout does not match model system");
    }
}

OperatorTerm term(Coefficient c, std::vector<LadderOp> factors) {
    OperatorTerm t;
    t.coeff = std::move(c);
    t.factors = std::move(factors);
    return t;
}

Coefficient lit(Complex value) {
    Coefficient c;
    c.literal = value;
    return c;
}

}  // namespace

bool ModelSpec::number_conserving() const {
    if (kind == Kind::composite) {
        return std::all_of(members.begin(), members.end(),
                           [](const ModelSpec& m) { return m.number_conserving(); });
    }
    if (!fock::is_number_conserving(hamiltonian)) return false;
    for (const auto& f : word) {
        if (std::holds_alternative<MixerFactor>(f)) continue;
        if (std::get<GaussianFactor>(f).type != GaussianFactor::Type::mix) return false;
    }
    return true;
}

void ModelSpec::validate() const {
    system.validate();
    hamiltonian.validate_modes(system);
    for (const auto& f : word) {
        int a = 0, b = 0;
        bool pair_wise = true;
        if (const auto* m = std::get_if<MixerFactor>(&f)) {
            a = m->mode_a;
            b = m->mode_b;
        } else {
            const auto& g = std::get<GaussianFactor>(f);
            a = g.mode_a;
            b = g.mode_b;
            pair_wise = g.type == GaussianFactor::Type::mix ||
                        g.type == GaussianFactor::Type::two_mode_squeeze;
        }
        if (a < 0 || a >= system.boson_modes || (pair_wise && (b < 0 || b >= system.boson_modes || b == a))) {
            throw InputError("unitary word factor references an invalid boson mode");
        }
    }
    std::set<std::string> seen;
    for (const auto& n : parameter_names) {
        if (!seen.insert(n).second) throw InputError("duplicate parameter name: " + n);
    }
}

// ---------------------------------------------------------------------------
// Builtins
// ---------------------------------------------------------------------------

ModelSpec builtin(const std::string& name, const BuiltinOptions& options) {
    ModelSpec spec;
    spec.name = name;
    if (name == "lambda") {
        // Three-mode chain (+, c, -) with polar couplings kappa_+ = cos(theta)
        // e^{i phi}, kappa_- = sin(theta). Realized isospectrally: H0 is the
        // chain at theta = phi = 0 and V a single (+,-) mixer with phi
        // reversed, which reproduces the chain Hamiltonian exactly and keeps
        // the eigenframes globally smooth in (theta, phi).
        spec.kind = Kind::isospectral_mixer;
        spec.system = ModeSystem{3, 0, {}};
        OperatorExpression h0;
        h0.add(term(lit(1.0), {{LadderKind::create, 1}, {LadderKind::annihilate, 0}}));
        h0.add(term(lit(1.0), {{LadderKind::create, 0}, {LadderKind::annihilate, 1}}));
        spec.hamiltonian = std::move(h0);
        MixerFactor mixer;
        mixer.mode_a = 0;
        mixer.mode_b = 2;
        mixer.theta_param = "theta";
        mixer.phi_param = "phi";
        mixer.phi_scale = -1.0;
        spec.word.push_back(mixer);
        spec.parameter_names = {"theta", "phi"};
    } else if (name == "tripod") {
        // Central mode (index 4) coupled to three outer modes; one amplitude
        // and one phase parameter per edge.
        spec.kind = Kind::coupled_graph;
        spec.system = ModeSystem{4, 0, {}};
        const char* amps[] = {"r_p", "r_0", "r_m"};
        const char* phases[] = {"phi_p", "phi_0", "phi_m"};
        OperatorExpression h;
        for (int mu = 0; mu < 3; ++mu) {
            Coefficient c;
            c.factors.push_back({CoeffFactor::Func::value, amps[mu], 1});
            c.factors.push_back({CoeffFactor::Func::phase, phases[mu], 1});
            h.add(term(c, {{LadderKind::create, 3}, {LadderKind::annihilate, mu}}));
        }
        spec.hamiltonian = h.plus_hermitian_conjugate();
        spec.parameter_names = {"r_p", "r_0", "r_m", "phi_p", "phi_0", "phi_m"};
    } else if (name == "fcg4") {
        spec.kind = Kind::isospectral_mixer;
        spec.system = ModeSystem{4, 0, {}};
        OperatorExpression h0;
        h0.add(term(lit(1.0), {{LadderKind::number_op, 0}}));
        h0.add(term(lit(1.0), {{LadderKind::number_op, 1}}));
        h0.add(term(lit(-1.0), {{LadderKind::number_op, 3}}));
        spec.hamiltonian = std::move(h0);
        for (int k = 0; k < 3; ++k) {
            MixerFactor mixer;
            mixer.mode_a = k;
            mixer.mode_b = k + 1;
            mixer.theta_param = "theta" + std::to_string(k + 1);
            mixer.phi_param = "phi" + std::to_string(k + 1);
            spec.word.push_back(mixer);
        }
        spec.parameter_names = {"theta1", "theta2", "theta3", "phi1", "phi2", "phi3"};
    } else if (name == "fcg3") {
        // Modes (+, 0, -); H0 = n_+ - n_-.
        spec.kind = Kind::isospectral_mixer;
        spec.system = ModeSystem{3, 0, {}};
        OperatorExpression h0;
        h0.add(term(lit(1.0), {{LadderKind::number_op, 0}}));
        h0.add(term(lit(-1.0), {{LadderKind::number_op, 2}}));
        spec.hamiltonian = std::move(h0);
        MixerFactor plus_zero;
        plus_zero.mode_a = 0;
        plus_zero.mode_b = 1;
        plus_zero.theta_param = "theta_p";
        plus_zero.phi_param = "phi_p";
        MixerFactor zero_minus;
        zero_minus.mode_a = 1;
        zero_minus.mode_b = 2;
        zero_minus.theta_param = "theta_m";
        zero_minus.phi_param = "phi_m";
        spec.word = {plus_zero, zero_minus};
        spec.parameter_names = {"theta_p", "theta_m", "phi_p", "phi_m"};
    } else if (name == "kerr2") {
        spec.kind = Kind::isospectral_gaussian;
        spec.system = ModeSystem{2, 0, options.cutoff.value_or(20)};
        OperatorExpression h0;
        for (int k = 0; k < 2; ++k) {
            h0.add(term(lit(1.0), {{LadderKind::create, k},
                                   {LadderKind::create, k},
                                   {LadderKind::annihilate, k},
                                   {LadderKind::annihilate, k}}));
        }
        spec.hamiltonian = std::move(h0);
        const int dk = options.displace_mode - 1;
        const int sj = options.squeeze_mode - 1;
        if (dk < 0 || dk >= 2 || sj < 0 || sj >= 2) {
            throw InputError("kerr2: displace/squeeze mode must be 1 or 2");
        }
        GaussianFactor K;  // two-mode mixing K(r4 e^{i theta4})
        K.type = GaussianFactor::Type::mix;
        K.mode_a = 0;
        K.mode_b = 1;
        K.r_param = "r4";
        K.theta_param = "theta4";
        GaussianFactor M;  // two-mode squeezing M(r3 e^{i theta3})
        M.type = GaussianFactor::Type::two_mode_squeeze;
        M.mode_a = 0;
        M.mode_b = 1;
        M.r_param = "r3";
        M.theta_param = "theta3";
        GaussianFactor D;  // displacement D_k(r1 e^{i theta1})
        D.type = GaussianFactor::Type::displace;
        D.mode_a = dk;
        D.r_param = "r1";
        D.theta_param = "theta1";
        GaussianFactor S;  // single-mode squeezing S_j(r2 e^{i theta2})
        S.type = GaussianFactor::Type::squeeze;
        S.mode_a = sj;
        S.r_param = "r2";
        S.theta_param = "theta2";
        spec.word = {K, M, D, S};
        spec.parameter_names = {"r1", "r2", "r3", "r4", "theta1", "theta2", "theta3", "theta4"};
    } else if (name == "jaynes_cummings") {
        spec.kind = Kind::jaynes_cummings;
        spec.system = ModeSystem{1, 1, options.cutoff};
        OperatorExpression h;
        Coefficient wa;
        wa.factors.push_back({CoeffFactor::Func::value, "omega_a", 1});
        h.add(term(wa, {{LadderKind::raise_op, 0}, {LadderKind::lower_op, 0}}));
        Coefficient wc;
        wc.factors.push_back({CoeffFactor::Func::value, "omega_c", 1});
        h.add(term(wc, {{LadderKind::number_op, 0}}));
        Coefficient kap;
        kap.factors.push_back({CoeffFactor::Func::value, "kappa", 1});
        h.add(term(kap, {{LadderKind::create, 0}, {LadderKind::lower_op, 0}}));
        h.add(term(kap, {{LadderKind::annihilate, 0}, {LadderKind::raise_op, 0}}));
        spec.hamiltonian = std::move(h);
        spec.parameter_names = {"omega_a", "omega_c", "kappa"};
    } else {
        throw InputError("unknown builtin model '" + name + "'");
    }
    if (options.cutoff) spec.system.cutoff_per_boson_mode = options.cutoff;
    spec.validate();
    return spec;
}

// ---------------------------------------------------------------------------
// Unitary word evaluation
// ---------------------------------------------------------------------------

namespace {

// Full single-particle matrix of a mixer on `modes` boson modes.
CMatrix mixer_single_particle(const MixerFactor& f, const ParameterPoint& params, int modes) {
    const double t = f.theta_scale * params.get(f.theta_param);
    const double p = f.phi_scale * params.get(f.phi_param);
    CMatrix w = CMatrix::Identity(modes, modes);
    const Complex eip = std::exp(Complex(0.0, p));
    w(f.mode_a, f.mode_a) = std::cos(t) * eip;
    w(f.mode_b, f.mode_a) = std::sin(t);
    w(f.mode_a, f.mode_b) = -std::sin(t);
    w(f.mode_b, f.mode_b) = std::cos(t) * std::conj(eip);
    return w;
}

OperatorExpression gaussian_generator(const GaussianFactor& f, const ParameterPoint& params) {
    const double r = params.get(f.r_param);
    const Complex z = r * std::exp(Complex(0.0, params.get(f.theta_param)));
    OperatorExpression g;
    switch (f.type) {
        case GaussianFactor::Type::displace:
            g.add(term(lit(z), {{LadderKind::create, f.mode_a}}));
            g.add(term(lit(-std::conj(z)), {{LadderKind::annihilate, f.mode_a}}));
            break;
        case GaussianFactor::Type::mix:
            g.add(term(lit(z), {{LadderKind::create, f.mode_a}, {LadderKind::annihilate, f.mode_b}}));
            g.add(term(lit(-std::conj(z)),
                       {{LadderKind::create, f.mode_b}, {LadderKind::annihilate, f.mode_a}}));
            break;
        case GaussianFactor::Type::squeeze:
            g.add(term(lit(z), {{LadderKind::create, f.mode_a}, {LadderKind::create, f.mode_a}}));
            g.add(term(lit(-std::conj(z)),
                       {{LadderKind::annihilate, f.mode_a}, {LadderKind::annihilate, f.mode_a}}));
            break;
        case GaussianFactor::Type::two_mode_squeeze:
            g.add(term(lit(z), {{LadderKind::create, f.mode_a}, {LadderKind::create, f.mode_b}}));
            g.add(term(lit(-std::conj(z)),
                       {{LadderKind::annihilate, f.mode_a}, {LadderKind::annihilate, f.mode_b}}));
            break;
    }
    return g;
}

OperatorExpression single_particle_to_expression(const CMatrix& x) {
    OperatorExpression g;
    for (int i = 0; i < x.rows(); ++i) {
        for (int j = 0; j < x.cols(); ++j) {
            if (std::abs(x(i, j)) < 1e-15) continue;
            g.add(term(lit(x(i, j)), {{LadderKind::create, i}, {LadderKind::annihilate, j}}));
        }
    }
    return g;
}

}  // namespace

CMatrix lift_single_particle_unitary(const CMatrix& w, const FockBasis& layer_basis) {
    if (!layer_basis.is_single_layer()) {
        throw ConfigError("lift_single_particle_unitary requires a single-layer basis");
    }
    const ModeSystem& sys = layer_basis.system();
    if (w.rows() != sys.boson_modes || w.cols() != sys.boson_modes) {
        throw ConfigError("single-particle matrix has wrong dimension");
    }
    const std::size_t dim = layer_basis.size();
    CMatrix u = CMatrix::Zero(dim, dim);
    for (std::size_t j = 0; j < dim; ++j) {
        const OccupationState& target = layer_basis.state(j);
        std::map<OccupationState, Complex> wave;
        OccupationState start = target;
        std::fill(start.occupations.begin(), start.occupations.begin() + sys.boson_modes, 0);
        wave[start] = 1.0;
        double norm = 1.0;
        for (int k = 0; k < sys.boson_modes; ++k) {
            for (int q = 0; q < target.occupations[k]; ++q) {
                norm *= (q + 1);
                std::map<OccupationState, Complex> next;
                for (const auto& [s, amp] : wave) {
                    for (int i = 0; i < sys.boson_modes; ++i) {
                        if (w(i, k) == Complex(0.0, 0.0)) continue;
                        OccupationState s2 = s;
                        const double factor = std::sqrt(static_cast<double>(s2.occupations[i] + 1));
                        s2.occupations[i] += 1;
                        next[s2] += amp * w(i, k) * factor;
                    }
                }
                wave = std::move(next);
            }
        }
        const double scale = 1.0 / std::sqrt(norm);
        for (const auto& [s, amp] : wave) {
            const std::ptrdiff_t i = layer_basis.index_of(s);
            if (i >= 0) u(i, j) = amp * scale;
        }
    }
    return u;
}

CMatrix word_factor_matrix(const WordFactor& factor, const ParameterPoint& params,
                           const FockBasis& basis) {
    const ModeSystem& sys = basis.system();
    if (const auto* m = std::get_if<MixerFactor>(&factor)) {
        const CMatrix w = mixer_single_particle(*m, params, sys.boson_modes);
        if (basis.is_single_layer()) return lift_single_particle_unitary(w, basis);
        // Cutoff basis: exponentiate the truncated bilinear generator.
        CMatrix block(2, 2);
        block << w(m->mode_a, m->mode_a), w(m->mode_a, m->mode_b), w(m->mode_b, m->mode_a),
            w(m->mode_b, m->mode_b);
        CMatrix x2 = logm_unitary(block);
        CMatrix x = CMatrix::Zero(sys.boson_modes, sys.boson_modes);
        x(m->mode_a, m->mode_a) = x2(0, 0);
        x(m->mode_a, m->mode_b) = x2(0, 1);
        x(m->mode_b, m->mode_a) = x2(1, 0);
        x(m->mode_b, m->mode_b) = x2(1, 1);
        const CMatrix gen = fock::operator_matrix(single_particle_to_expression(x), basis, params);
        return expm_antihermitian(gen);
    }
    const auto& g = std::get<GaussianFactor>(factor);
    if (basis.is_single_layer() && g.type != GaussianFactor::Type::mix) {
        throw ConfigError("non-number-conserving Gaussian factors need a cutoff basis");
    }
    const CMatrix gen = fock::operator_matrix(gaussian_generator(g, params), basis, params);
    return expm_antihermitian(gen);
}

std::vector<std::string> word_factor_params(const WordFactor& factor) {
    if (const auto* m = std::get_if<MixerFactor>(&factor)) return {m->theta_param, m->phi_param};
    const auto& g = std::get<GaussianFactor>(factor);
    return {g.r_param, g.theta_param};
}

CMatrix unitary_at(const ModelSpec& spec, const ParameterPoint& params, const FockBasis& basis) {
    check_basis(spec, basis);
    if (spec.word.empty()) throw ConfigError("model '" + spec.name + "' has no unitary word");
    CMatrix u = CMatrix::Identity(basis.size(), basis.size());
    for (const auto& f : spec.word) u = u * word_factor_matrix(f, params, basis);
    return u;
}

// ---------------------------------------------------------------------------
// Hamiltonian evaluation
// ---------------------------------------------------------------------------

namespace {

CMatrix composite_hamiltonian(const ModelSpec& spec, const ParameterPoint& params,
                              const FockBasis& basis) {
    const std::size_t dim = basis.size();
    const int total_bosons = basis.system().boson_modes;
    CMatrix h = CMatrix::Zero(dim, dim);

    for (std::size_t a = 0; a < spec.members.size(); ++a) {
        const ModelSpec& member = spec.members[a];
        const int mb = member.system.boson_modes;
        const int mt = member.system.two_level_modes;
        const int b0 = spec.member_boson_offsets[a];
        const int t0 = total_bosons + spec.member_two_level_offsets[a];

        auto extract = [&](const OccupationState& s) {
            OccupationState sub;
            sub.occupations.reserve(mb + mt);
            for (int k = 0; k < mb; ++k) sub.occupations.push_back(s.occupations[b0 + k]);
            for (int k = 0; k < mt; ++k) sub.occupations.push_back(s.occupations[t0 + k]);
            return sub;
        };
        auto rest_of = [&](const OccupationState& s) {
            OccupationState rest = s;
            for (int k = 0; k < mb; ++k) rest.occupations[b0 + k] = 0;
            for (int k = 0; k < mt; ++k) rest.occupations[t0 + k] = 0;
            return rest;
        };

        // Composite states grouped by spectator content; member blocks are
        // dense within each group and number-conserving across it.
        std::map<OccupationState, std::vector<std::pair<OccupationState, std::size_t>>> groups;
        for (std::size_t i = 0; i < dim; ++i) {
            groups[rest_of(basis.state(i))].emplace_back(extract(basis.state(i)), i);
        }

        std::map<int, std::pair<FockBasis, CMatrix>> layer_cache;
        for (const auto& [rest, entries] : groups) {
            for (const auto& [sub_a, i] : entries) {
                const int n = sub_a.total_particles();
                auto it = layer_cache.find(n);
                if (it == layer_cache.end()) {
                    FockBasis lb = fock::enumerate_layer(member.system, n);
                    CMatrix hm = hamiltonian_at(member, params, lb);
                    it = layer_cache.emplace(n, std::make_pair(std::move(lb), std::move(hm))).first;
                }
                const auto& [lb, hm] = it->second;
                const std::ptrdiff_t row = lb.index_of(sub_a);
                for (const auto& [sub_b, j] : entries) {
                    if (sub_b.total_particles() != n) continue;
                    h(i, j) += hm(row, lb.index_of(sub_b));
                }
            }
        }
    }
    return h;
}

}  // namespace

CMatrix hamiltonian_at(const ModelSpec& spec, const ParameterPoint& params,
                       const FockBasis& basis) {
    check_basis(spec, basis);
    switch (spec.kind) {
        case Kind::coupled_graph:
        case Kind::jaynes_cummings:
            return fock::operator_matrix(spec.hamiltonian, basis, params, true);
        case Kind::isospectral_mixer:
        case Kind::isospectral_gaussian: {
            const CMatrix v = unitary_at(spec, params, basis);
            const CMatrix h0 = fock::operator_matrix(spec.hamiltonian, basis, params);
            return v * h0 * v.adjoint();
        }
        case Kind::composite:
            return composite_hamiltonian(spec, params, basis);
    }
    throw ConfigError("unhandled model kind");
}

// ---------------------------------------------------------------------------
// Composition
// ---------------------------------------------------------------------------

ModelSpec compose(const std::vector<ModelSpec>& specs) {
    if (specs.empty()) throw InputError("compose needs at least one model");
    ModelSpec out;
    out.kind = Kind::composite;
    out.name = "composite";
    int bosons = 0, two_levels = 0;
    std::set<std::string> seen;
    for (const auto& s : specs) {
        if (!s.number_conserving()) {
            throw ConfigError("compose currently supports number-conserving members only");
        }
        out.member_boson_offsets.push_back(bosons);
        out.member_two_level_offsets.push_back(two_levels);
        bosons += s.system.boson_modes;
        two_levels += s.system.two_level_modes;
        for (const auto& p : s.parameter_names) {
            if (!seen.insert(p).second) {
                throw InputError("parameter name collision in compose: " + p);
            }
            out.parameter_names.push_back(p);
        }
        out.members.push_back(s);
    }
    out.system = ModeSystem{bosons, two_levels, {}};
    return out;
}

// ---------------------------------------------------------------------------
// Documents
// ---------------------------------------------------------------------------

namespace {

ModeSystem system_from_doc(const doc::Table& t) {
    t.reject_unknown_keys({"bosons", "two_levels", "cutoff"}, "system");
    ModeSystem sys;
    sys.boson_modes = t.has("bosons") ? t.at("bosons").as_int("bosons") : 0;
    sys.two_level_modes = t.has("two_levels") ? t.at("two_levels").as_int("two_levels") : 0;
    if (t.has("cutoff")) sys.cutoff_per_boson_mode = t.at("cutoff").as_int("cutoff");
    sys.validate();
    return sys;
}

int doc_mode_index(const doc::Value& v, const ModeSystem& sys, const std::string& what) {
    const int idx = v.as_int(what);
    if (idx < 1 || idx > sys.boson_modes) {
        throw InputError("line " + std::to_string(v.line) + ", col " + std::to_string(v.col) + ": " +
                         what + " " + std::to_string(idx) + " out of range (1.." +
                         std::to_string(sys.boson_modes) + ")");
    }
    return idx - 1;
}

}  // namespace

ModelSpec parse_model(const std::string& text) {
    const doc::Table top = doc::parse_document(text);
    top.reject_unknown_keys({"system", "model", "options", "graph", "isospectral", "h0", "word"},
                            "model document");

    const int forms = top.has("model") + top.has("graph") + top.has("isospectral");
    if (forms != 1) {
        throw InputError("model document needs exactly one of: model, graph, isospectral");
    }

    if (top.has("model")) {
        BuiltinOptions opts;
        if (top.has("options")) {
            const doc::Table& o = top.at("options").as_table("options");
            o.reject_unknown_keys({"cutoff", "displace_mode", "squeeze_mode"}, "options");
            if (o.has("cutoff")) opts.cutoff = o.at("cutoff").as_int("cutoff");
            if (o.has("displace_mode")) opts.displace_mode = o.at("displace_mode").as_int("displace_mode");
            if (o.has("squeeze_mode")) opts.squeeze_mode = o.at("squeeze_mode").as_int("squeeze_mode");
        }
        ModelSpec spec = builtin(top.at("model").as_string("model"), opts);
        if (top.has("system")) {
            const ModeSystem sys = system_from_doc(top.at("system").as_table("system"));
            if (sys.boson_modes != spec.system.boson_modes ||
                sys.two_level_modes != spec.system.two_level_modes) {
                throw InputError("system block conflicts with builtin '" + spec.name + "'");
            }
            if (sys.cutoff_per_boson_mode) spec.system.cutoff_per_boson_mode = sys.cutoff_per_boson_mode;
        }
        return spec;
    }

    if (!top.has("system")) throw InputError("custom models require a system block");
    const ModeSystem sys = system_from_doc(top.at("system").as_table("system"));

    ModelSpec spec;
    spec.system = sys;

    if (top.has("graph")) {
        spec.kind = Kind::coupled_graph;
        spec.name = "graph";
        OperatorExpression h;
        for (const doc::Value& ev : top.at("graph").as_array("graph")) {
            const doc::Table& e = ev.as_table("edge");
            e.reject_unknown_keys({"i", "j", "amp", "phase"}, "edge");
            const int i = doc_mode_index(e.at("i"), sys, "edge mode i");
            const int j = doc_mode_index(e.at("j"), sys, "edge mode j");
            if (i == j) throw InputError("edge endpoints must differ");
            Coefficient c;
            c.factors.push_back({CoeffFactor::Func::value, e.at("amp").as_string("amp"), 1});
            c.factors.push_back({CoeffFactor::Func::phase, e.at("phase").as_string("phase"), 1});
            h.add(term(c, {{LadderKind::create, i}, {LadderKind::annihilate, j}}));
            spec.parameter_names.push_back(e.at("amp").as_string("amp"));
            spec.parameter_names.push_back(e.at("phase").as_string("phase"));
        }
        spec.hamiltonian = h.plus_hermitian_conjugate();
        spec.validate();
        return spec;
    }

    // isospectral = true together with h0/word, or isospectral = { h0, word }.
    const doc::Value& iso = top.at("isospectral");
    const doc::Table* body = nullptr;
    doc::Table flat;
    if (iso.kind == doc::Value::Kind::table) {
        body = &iso.table;
    } else {
        if (!(iso.kind == doc::Value::Kind::boolean && iso.boolean)) {
            throw InputError("isospectral must be a table or 'true'");
        }
        if (top.has("h0")) flat.entries.emplace_back("h0", top.at("h0"));
        if (top.has("word")) flat.entries.emplace_back("word", top.at("word"));
        body = &flat;
    }
    body->reject_unknown_keys({"h0", "word"}, "isospectral");
    spec.hamiltonian = fock::parse_expression(body->at("h0").as_string("h0"));
    spec.hamiltonian.validate_modes(sys);

    bool any_gaussian = false;
    for (const doc::Value& fv : body->at("word").as_array("word")) {
        const doc::Table& f = fv.as_table("word factor");
        const std::string& kind = f.at("factor").as_string("factor");
        if (kind == "mixer") {
            f.reject_unknown_keys({"factor", "modes", "theta", "phi"}, "mixer factor");
            const auto& modes = f.at("modes").as_array("modes");
            if (modes.size() != 2) throw InputError("mixer modes must be a pair");
            MixerFactor m;
            m.mode_a = doc_mode_index(modes[0], sys, "mixer mode");
            m.mode_b = doc_mode_index(modes[1], sys, "mixer mode");
            m.theta_param = f.at("theta").as_string("theta");
            m.phi_param = f.at("phi").as_string("phi");
            spec.parameter_names.push_back(m.theta_param);
            spec.parameter_names.push_back(m.phi_param);
            spec.word.push_back(m);
        } else {
            GaussianFactor g;
            if (kind == "displace") {
                g.type = GaussianFactor::Type::displace;
            } else if (kind == "squeeze") {
                g.type = GaussianFactor::Type::squeeze;
            } else if (kind == "mix") {
                g.type = GaussianFactor::Type::mix;
            } else if (kind == "two_mode_squeeze") {
                g.type = GaussianFactor::Type::two_mode_squeeze;
            } else {
                throw InputError("unknown word factor '" + kind + "'");
            }
            if (g.type == GaussianFactor::Type::displace || g.type == GaussianFactor::Type::squeeze) {
                f.reject_unknown_keys({"factor", "mode", "r", "theta"}, kind + " factor");
                g.mode_a = doc_mode_index(f.at("mode"), sys, "factor mode");
            } else {
                f.reject_unknown_keys({"factor", "modes", "r", "theta"}, kind + " factor");
                const auto& modes = f.at("modes").as_array("modes");
                if (modes.size() != 2) throw InputError(kind + " modes must be a pair");
                g.mode_a = doc_mode_index(modes[0], sys, "factor mode");
                g.mode_b = doc_mode_index(modes[1], sys, "factor mode");
            }
            g.r_param = f.at("r").as_string("r");
            g.theta_param = f.at("theta").as_string("theta");
            spec.parameter_names.push_back(g.r_param);
            spec.parameter_names.push_back(g.theta_param);
            if (g.type != GaussianFactor::Type::mix) any_gaussian = true;
            spec.word.push_back(g);
        }
    }
    spec.kind = any_gaussian ? Kind::isospectral_gaussian : Kind::isospectral_mixer;
    spec.name = "isospectral";
    if (spec.kind == Kind::isospectral_gaussian && !sys.cutoff_per_boson_mode) {
        throw InputError("Gaussian words need system.cutoff");
    }
    spec.validate();
    return spec;
}

std::string serialize_model(const ModelSpec& spec) {
    std::ostringstream out;
    out << "system = { bosons = " << spec.system.boson_modes
        << ", two_levels = " << spec.system.two_level_modes;
    if (spec.system.cutoff_per_boson_mode) out << ", cutoff = " << *spec.system.cutoff_per_boson_mode;
    out << " }\n";
    if (spec.kind == Kind::composite) {
        throw InputError("composite models have no document form");
    }
    if (spec.name != "custom" && spec.name != "graph" && spec.name != "isospectral") {
        out << "model = \"" << spec.name << "\"\n";
        return out.str();
    }
    if (spec.kind == Kind::coupled_graph) {
        out << "graph = [\n";
        for (const auto& t : spec.hamiltonian.terms()) {
            // Emit only the forward half of each Hermitian pair.
            if (t.factors.size() != 2 || t.factors[0].kind != LadderKind::create) continue;
            std::string amp, phase;
            for (const auto& f : t.coeff.factors) {
                if (f.func == CoeffFactor::Func::value) amp = f.param;
                if (f.func == CoeffFactor::Func::phase && f.sign > 0) phase = f.param;
            }
            if (amp.empty() || phase.empty()) continue;
            out << "  { i = " << t.factors[0].mode + 1 << ", j = " << t.factors[1].mode + 1
                << ", amp = \"" << amp << "\", phase = \"" << phase << "\" },\n";
        }
        out << "]\n";
        return out.str();
    }
    out << "isospectral = true\nh0 = \"" << fock::to_string(spec.hamiltonian) << "\"\n";
    out << "word = [\n";
    for (const auto& wf : spec.word) {
        if (const auto* m = std::get_if<MixerFactor>(&wf)) {
            out << "  { factor = \"mixer\", modes = [" << m->mode_a + 1 << ", " << m->mode_b + 1
                << "], theta = \"" << m->theta_param << "\", phi = \"" << m->phi_param << "\" },\n";
        } else {
            const auto& g = std::get<GaussianFactor>(wf);
            const char* kind = g.type == GaussianFactor::Type::displace          ? "displace"
                               : g.type == GaussianFactor::Type::squeeze         ? "squeeze"
                               : g.type == GaussianFactor::Type::mix             ? "mix"
                                                                                 : "two_mode_squeeze";
            out << "  { factor = \"" << kind << "\", ";
            if (g.type == GaussianFactor::Type::displace || g.type == GaussianFactor::Type::squeeze) {
                out << "mode = " << g.mode_a + 1;
            } else {
                out << "modes = [" << g.mode_a + 1 << ", " << g.mode_b + 1 << "]";
            }
            out << ", r = \"" << g.r_param << "\", theta = \"" << g.theta_param << "\" },\n";
        }
    }
    out << "]\n";
    return out.str();
}

}  // namespace holopnt::model
