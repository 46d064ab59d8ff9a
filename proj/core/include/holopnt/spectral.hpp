#ifndef HOLOPNT_SPECTRAL_HPP
#define HOLOPNT_SPECTRAL_HPP

#include "holopnt/models.hpp"

#include <memory>
#include <optional>

namespace holopnt::spectral {

// One degenerate eigenspace restricted to a single basis (one Fock layer,
// or a truncated global basis when particle_number is empty).
struct EigenspaceBlock {
    double eigenvalue = 0.0;
    std::optional<int> particle_number;
    int dimension = 0;
    CMatrix frame;  // basis_size x dimension, orthonormal columns
    bool clustering_warning = false;

    CMatrix projector() const { return frame * frame.adjoint(); }
};

// Blocks at a common eigenvalue collected across Fock layers.
struct EigenspaceFamily {
    double eigenvalue = 0.0;
    int label = 0;  // ascending-eigenvalue index
    std::vector<EigenspaceBlock> blocks;

    int dimension() const {
        int d = 0;
        for (const auto& b : blocks) d += b.dimension;
        return d;
    }
    int max_particle_number() const {
        int n = 0;
        for (const auto& b : blocks) n = std::max(n, b.particle_number.value_or(0));
        return n;
    }
};

// Groups the spectrum of a Hermitian matrix into degenerate blocks.
// Adjacent eigenvalues are merged when their gap is below
// cluster_tol * max(1, spectral radius); blocks sorted by eigenvalue.
// A block is flagged when the gap separating it from a neighbor lies within
// 10x of the merge threshold (ill-conditioned clustering).
std::vector<EigenspaceBlock> eigen_blocks(const CMatrix& matrix, double cluster_tol = 1e-8);

// Eigenspace families of a number-conserving model over layers 0..n_max.
std::vector<EigenspaceFamily> family_across_layers(const model::ModelSpec& spec,
                                                   const ParameterPoint& params, int n_max,
                                                   double cluster_tol = 1e-9);

// A gauge-fixed frame field kappa -> orthonormal frame on a fixed basis.
class FrameField {
public:
    virtual ~FrameField() = default;
    virtual CMatrix frame(const ParameterPoint& kappa) const = 0;
    virtual const fock::FockBasis& basis() const = 0;
    virtual const CMatrix& base_frame() const = 0;
    virtual const ParameterPoint& base_point() const = 0;
    virtual int dimension() const = 0;
    virtual std::string gauge() const = 0;
};

// Projector transport from the base frame: frame(kappa) is the Loewdin
// orthonormalization of P(kappa) * frame(kappa0). Smooth while the overlap
// keeps full column rank; evaluation at the base reproduces the base frame
// exactly. Note the connection of this gauge vanishes at the base point.
std::unique_ptr<FrameField> local_frame(const model::ModelSpec& spec, const fock::FockBasis& basis,
                                        const ParameterPoint& kappa0, int block_index,
                                        double cluster_tol = 1e-8);

// Isospectral gauge frame(kappa) = V(kappa) * h0_frame for isospectral
// models; globally smooth, and the gauge in which closed-form connection
// components of such models are quoted.
std::unique_ptr<FrameField> isospectral_frame(const model::ModelSpec& spec,
                                              const fock::FockBasis& basis, CMatrix h0_frame,
                                              const ParameterPoint& kappa0);

// Eigen-blocks of the (parameter-independent) base Hamiltonian of an
// isospectral model on the given basis.
std::vector<EigenspaceBlock> h0_blocks(const model::ModelSpec& spec, const fock::FockBasis& basis,
                                       double cluster_tol = 1e-9);

}  // namespace holopnt::spectral

#endif
