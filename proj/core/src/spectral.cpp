#include "holopnt/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <mutex>
#include <tuple>

namespace holopnt::spectral {

std::vector<EigenspaceBlock> eigen_blocks(const CMatrix& matrix, double cluster_tol) {
    const double scale = std::max(1.0, max_abs(matrix));
    if (hermiticity_defect(matrix) > 1e-10 * scale) {
        throw NumericalError("eigen_blocks: matrix is not Hermitian (defect " +
                             std::to_string(hermiticity_defect(matrix)) + ")");
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(CMatrix((matrix + matrix.adjoint()) / 2.0));
    if (es.info() != Eigen::Success) throw NumericalError("eigen_blocks: eigensolver failed");

    const RVector& vals = es.eigenvalues();
    const double radius = vals.size() ? std::max(std::abs(vals(0)), std::abs(vals(vals.size() - 1))) : 0.0;
    const double threshold = cluster_tol * std::max(1.0, radius);

    std::vector<EigenspaceBlock> blocks;
    Eigen::Index start = 0;
    while (start < vals.size()) {
        Eigen::Index end = start + 1;
        while (end < vals.size() && vals(end) - vals(end - 1) < threshold) ++end;
        EigenspaceBlock block;
        block.dimension = static_cast<int>(end - start);
        block.eigenvalue = vals.segment(start, end - start).mean();
        block.frame = es.eigenvectors().middleCols(start, end - start);
        const double gap_below = start > 0 ? vals(start) - vals(start - 1) : 1e300;
        const double gap_above = end < vals.size() ? vals(end) - vals(end - 1) : 1e300;
        block.clustering_warning = std::min(gap_below, gap_above) < 10.0 * threshold;
        blocks.push_back(std::move(block));
        start = end;
    }
    return blocks;
}

std::vector<EigenspaceFamily> family_across_layers(const model::ModelSpec& spec,
                                                   const ParameterPoint& params, int n_max,
                                                   double cluster_tol) {
    if (!spec.number_conserving()) {
        throw ConfigError("family_across_layers requires a number-conserving model");
    }
    std::vector<EigenspaceBlock> all;
    double radius = 1.0;
    for (int n = 0; n <= n_max; ++n) {
        const fock::FockBasis basis = fock::enumerate_layer(spec.system, n);
        const CMatrix h = model::hamiltonian_at(spec, params, basis);
        for (EigenspaceBlock& b : eigen_blocks(h, cluster_tol)) {
            b.particle_number = n;
            radius = std::max(radius, std::abs(b.eigenvalue));
            all.push_back(std::move(b));
        }
    }
    std::sort(all.begin(), all.end(),
              [](const EigenspaceBlock& a, const EigenspaceBlock& b) {
                  return a.eigenvalue < b.eigenvalue ||
                         (a.eigenvalue == b.eigenvalue && a.particle_number < b.particle_number);
              });

    const double threshold = cluster_tol * radius;
    std::vector<EigenspaceFamily> families;
    for (EigenspaceBlock& b : all) {
        if (families.empty() || b.eigenvalue - families.back().blocks.back().eigenvalue > threshold) {
            EigenspaceFamily fam;
            fam.eigenvalue = b.eigenvalue;
            families.push_back(std::move(fam));
        }
        families.back().blocks.push_back(std::move(b));
    }
    for (std::size_t l = 0; l < families.size(); ++l) {
        families[l].label = static_cast<int>(l);
        double mean = 0.0;
        for (const auto& b : families[l].blocks) mean += b.eigenvalue;
        families[l].eigenvalue = mean / families[l].blocks.size();
        std::sort(families[l].blocks.begin(), families[l].blocks.end(),
                  [](const EigenspaceBlock& a, const EigenspaceBlock& b) {
                      return a.particle_number < b.particle_number;
                  });
    }
    return families;
}

namespace {

class TransportedFrameField final : public FrameField {
public:
    TransportedFrameField(model::ModelSpec spec, fock::FockBasis basis, ParameterPoint kappa0,
                          EigenspaceBlock block, double cluster_tol)
        : spec_(std::move(spec)),
          basis_(std::move(basis)),
          kappa0_(std::move(kappa0)),
          block_(std::move(block)),
          cluster_tol_(cluster_tol) {}

    CMatrix frame(const ParameterPoint& kappa) const override {
        if (kappa == kappa0_) return block_.frame;
        const CMatrix h = model::hamiltonian_at(spec_, kappa, basis_);
        const auto blocks = eigen_blocks(h, cluster_tol_);
        // Follow the base eigenvalue; a dimension change means a crossing.
        const EigenspaceBlock* best = nullptr;
        double best_dist = 1e300;
        for (const auto& b : blocks) {
            const double dist = std::abs(b.eigenvalue - block_.eigenvalue);
            if (dist < best_dist) {
                best_dist = dist;
                best = &b;
            }
        }
        if (!best || best->dimension != block_.dimension) {
            throw FrameDegeneracyError("eigenvalue crossing: block dimension changed away from base");
        }
        // P(kappa) * F0 followed by symmetric orthonormalization.
        const CMatrix overlap = best->frame.adjoint() * block_.frame;
        return loewdin_orthonormalize(CMatrix(best->frame * overlap));
    }

    const fock::FockBasis& basis() const override { return basis_; }
    const CMatrix& base_frame() const override { return block_.frame; }
    const ParameterPoint& base_point() const override { return kappa0_; }
    int dimension() const override { return block_.dimension; }
    std::string gauge() const override { return "projector-transport from base frame"; }

private:
    model::ModelSpec spec_;
    fock::FockBasis basis_;
    ParameterPoint kappa0_;
    EigenspaceBlock block_;
    double cluster_tol_;
};

class IsospectralFrameField final : public FrameField {
public:
    IsospectralFrameField(model::ModelSpec spec, fock::FockBasis basis, CMatrix h0_frame,
                          ParameterPoint kappa0)
        : spec_(std::move(spec)),
          basis_(std::move(basis)),
          h0_frame_(std::move(h0_frame)),
          kappa0_(std::move(kappa0)) {
        base_frame_ = frame(kappa0_);
    }

    CMatrix frame(const ParameterPoint& kappa) const override {
        // V F0 applied factor by factor on the thin block; each factor's
        // matrix depends only on its own two parameters and is cached, which
        // makes repeated stencil evaluations cheap.
        CMatrix w = h0_frame_;
        for (std::size_t i = spec_.word.size(); i-- > 0;) {
            w = cached_factor(i, kappa) * w;
        }
        return w;
    }

    const fock::FockBasis& basis() const override { return basis_; }
    const CMatrix& base_frame() const override { return base_frame_; }
    const ParameterPoint& base_point() const override { return kappa0_; }
    int dimension() const override { return static_cast<int>(h0_frame_.cols()); }
    std::string gauge() const override { return "isospectral V(kappa) gauge"; }

private:
    CMatrix cached_factor(std::size_t index, const ParameterPoint& kappa) const {
        const auto names = model::word_factor_params(spec_.word[index]);
        std::array<std::uint64_t, 2> bits{0, 0};
        for (std::size_t k = 0; k < names.size() && k < 2; ++k) {
            const double v = kappa.get(names[k]);
            std::memcpy(&bits[k], &v, sizeof(double));
        }
        const std::tuple<std::size_t, std::uint64_t, std::uint64_t> key{index, bits[0], bits[1]};
        {
            std::lock_guard<std::mutex> lock(cache_mutex_);
            auto it = factor_cache_.find(key);
            if (it != factor_cache_.end()) return it->second;
        }
        CMatrix m = model::word_factor_matrix(spec_.word[index], kappa, basis_);
        std::lock_guard<std::mutex> lock(cache_mutex_);
        return factor_cache_.emplace(key, std::move(m)).first->second;
    }

    model::ModelSpec spec_;
    fock::FockBasis basis_;
    CMatrix h0_frame_;
    ParameterPoint kappa0_;
    CMatrix base_frame_;
    mutable std::mutex cache_mutex_;
    mutable std::map<std::tuple<std::size_t, std::uint64_t, std::uint64_t>, CMatrix> factor_cache_;
};

}  // namespace

std::unique_ptr<FrameField> local_frame(const model::ModelSpec& spec, const fock::FockBasis& basis,
                                        const ParameterPoint& kappa0, int block_index,
                                        double cluster_tol) {
    const CMatrix h = model::hamiltonian_at(spec, kappa0, basis);
    auto blocks = eigen_blocks(h, cluster_tol);
    if (block_index < 0 || block_index >= static_cast<int>(blocks.size())) {
        throw InputError("block index " + std::to_string(block_index) + " out of range (" +
                         std::to_string(blocks.size()) + " blocks)");
    }
    EigenspaceBlock block = std::move(blocks[block_index]);
    // Isolation requirement at the anchor point.
    const double radius = std::max(1.0, max_abs(h));
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (static_cast<int>(i) == block_index) continue;
        if (std::abs(blocks[i].eigenvalue - block.eigenvalue) < 10.0 * cluster_tol * radius) {
            throw FrameDegeneracyError("selected block is not isolated at the base point");
        }
    }
    return std::make_unique<TransportedFrameField>(spec, basis, kappa0, std::move(block),
                                                   cluster_tol);
}

std::unique_ptr<FrameField> isospectral_frame(const model::ModelSpec& spec,
                                              const fock::FockBasis& basis, CMatrix h0_frame,
                                              const ParameterPoint& kappa0) {
    if (!spec.is_isospectral()) {
        throw ConfigError("isospectral_frame requires an isospectral model");
    }
    return std::make_unique<IsospectralFrameField>(spec, basis, std::move(h0_frame), kappa0);
}

std::vector<EigenspaceBlock> h0_blocks(const model::ModelSpec& spec, const fock::FockBasis& basis,
                                       double cluster_tol) {
    const CMatrix h0 = fock::operator_matrix(spec.hamiltonian, basis, ParameterPoint{});
    auto blocks = eigen_blocks(h0, cluster_tol);
    if (basis.is_single_layer() && !basis.states().empty()) {
        for (auto& b : blocks) b.particle_number = basis.state(0).total_particles();
    }
    return blocks;
}

}  // namespace holopnt::spectral
