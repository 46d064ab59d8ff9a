#ifndef HOLOPNT_MODELS_HPP
#define HOLOPNT_MODELS_HPP

#include "holopnt/document.hpp"
#include "holopnt/expression.hpp"
#include "holopnt/fock.hpp"
#include "holopnt/parameters.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace holopnt::model {

enum class Kind { coupled_graph, isospectral_mixer, isospectral_gaussian, jaynes_cummings, composite };

// Two-mode mixing factor: acts on single-particle amplitudes as
//   a_k^dag -> cos(t) e^{+i p} a_k^dag + sin(t) a_l^dag
//   a_l^dag -> cos(t) e^{-i p} a_l^dag - sin(t) a_k^dag
// with t = theta_scale * theta, p = phi_scale * phi. Lifted to N-particle
// layers multiplicatively (exact), or through its generator on cutoff bases.
struct MixerFactor {
    int mode_a = 0;
    int mode_b = 1;
    std::string theta_param;
    std::string phi_param;
    double theta_scale = 1.0;
    double phi_scale = 1.0;
};

// Gaussian factor exp(z G - z* G^dag) with z = r e^{i theta} and G one of
// a_k^dag (displacement), a_a^dag a_b (two-mode mixing), (a_k^dag)^2
// (single-mode squeezing), a_a^dag a_b^dag (two-mode squeezing). Evaluated
// as a dense exponential of the hard-truncated generator.
struct GaussianFactor {
    enum class Type { displace, mix, squeeze, two_mode_squeeze };
    Type type = Type::displace;
    int mode_a = 0;
    int mode_b = 1;
    std::string r_param;
    std::string theta_param;
};

using WordFactor = std::variant<MixerFactor, GaussianFactor>;

struct ModelSpec {
    Kind kind = Kind::coupled_graph;
    std::string name = "custom";
    fock::ModeSystem system;

    // Direct kinds: the Hamiltonian itself (Hermitian closure included).
    // Isospectral kinds: the base Hamiltonian H0.
    fock::OperatorExpression hamiltonian;

    // Unitary word, leftmost factor outermost: V = W[0] W[1] ... W[k-1].
    std::vector<WordFactor> word;

    // Canonical direction order for connections/curvatures.
    std::vector<std::string> parameter_names;

    // Composite members with their mode offsets into `system` (parallel
    // arrays; vector of the incomplete self type is fine since C++17).
    std::vector<ModelSpec> members;
    std::vector<int> member_boson_offsets;
    std::vector<int> member_two_level_offsets;

    bool is_isospectral() const {
        return kind == Kind::isospectral_mixer || kind == Kind::isospectral_gaussian;
    }
    bool number_conserving() const;
    void validate() const;
};

struct BuiltinOptions {
    std::optional<int> cutoff;    // per-boson-mode cutoff override
    int displace_mode = 1;        // 1-based; kerr2 D_k target
    int squeeze_mode = 1;         // 1-based; kerr2 S_j target
};

// Registry of the studied systems: lambda, tripod, fcg4, fcg3, kerr2,
// jaynes_cummings.
ModelSpec builtin(const std::string& name, const BuiltinOptions& options = {});

// H(params) on the basis. Isospectral kinds return V H0 V^dagger.
CMatrix hamiltonian_at(const ModelSpec& spec, const ParameterPoint& params,
                       const fock::FockBasis& basis);

// The parametrizing unitary V(params) on the basis (isospectral kinds).
CMatrix unitary_at(const ModelSpec& spec, const ParameterPoint& params,
                   const fock::FockBasis& basis);

// Single word-factor matrix and the parameters it depends on; used by the
// geometry stencils to cache factor exponentials.
CMatrix word_factor_matrix(const WordFactor& factor, const ParameterPoint& params,
                           const fock::FockBasis& basis);
std::vector<std::string> word_factor_params(const WordFactor& factor);

// Non-interacting tensor product of >= 1 models with disjoint parameters.
ModelSpec compose(const std::vector<ModelSpec>& specs);

// Model document ingestion (grammar in the repository README).
ModelSpec parse_model(const std::string& text);
std::string serialize_model(const ModelSpec& spec);

// Lift of a single-particle unitary to a fixed-N layer basis (exact,
// permanent-free recursive construction).
CMatrix lift_single_particle_unitary(const CMatrix& w, const fock::FockBasis& layer_basis);

}  // namespace holopnt::model

#endif
