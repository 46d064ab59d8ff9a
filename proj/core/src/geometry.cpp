#include "holopnt/geometry.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <mutex>

namespace holopnt::geometry {

namespace {

struct VecHash {
    std::size_t operator()(const std::vector<int>& v) const noexcept {
        std::size_t h = 1469598103934665603ull;
        for (int x : v) {
            h ^= static_cast<std::size_t>(static_cast<unsigned>(x) * 2654435761u + 0x9e3779b9u);
            h *= 1099511628211ull;
        }
        return h;
    }
};

std::vector<int> shifted(std::vector<int> offset, int dir, int delta) {
    offset[dir] += delta;
    return offset;
}

}  // namespace

struct StencilEngine::Impl {
    std::unordered_map<std::vector<int>, CMatrix, VecHash> frames;
    std::unordered_map<std::vector<int>, CMatrix, VecHash> connections;  // offset ++ [mu]
    std::unordered_map<std::vector<int>, CMatrix, VecHash> tensors;      // offset ++ [-1] ++ sigmas ++ [-2, mu, nu]

    const CMatrix& frame_at(StencilEngine& self, const std::vector<int>& offset) {
        auto it = frames.find(offset);
        if (it != frames.end()) return it->second;
        CMatrix f = self.frames_.frame(self.point_at(offset));
        return frames.emplace(offset, std::move(f)).first->second;
    }
};

StencilEngine::StencilEngine(const spectral::FrameField& frames,
                             std::vector<std::string> directions, FdOptions options)
    : frames_(frames),
      directions_(std::move(directions)),
      options_(options),
      impl_(std::make_unique<Impl>()) {}

StencilEngine::~StencilEngine() = default;

ParameterPoint StencilEngine::point_at(const std::vector<int>& offset) const {
    ParameterPoint p = frames_.base_point();
    for (std::size_t i = 0; i < directions_.size(); ++i) {
        if (offset[i] != 0) {
            p.set(directions_[i], p.get(directions_[i]) + offset[i] * options_.step);
        }
    }
    return p;
}

const CMatrix& StencilEngine::connection(const std::vector<int>& offset, int mu) {
    std::vector<int> key = offset;
    key.push_back(mu);
    auto it = impl_->connections.find(key);
    if (it != impl_->connections.end()) return it->second;

    const double h = options_.step;
    const CMatrix& f0 = impl_->frame_at(*this, offset);
    CMatrix df;
    if (options_.fourth_order) {
        const CMatrix& fp1 = impl_->frame_at(*this, shifted(offset, mu, 1));
        const CMatrix& fm1 = impl_->frame_at(*this, shifted(offset, mu, -1));
        const CMatrix& fp2 = impl_->frame_at(*this, shifted(offset, mu, 2));
        const CMatrix& fm2 = impl_->frame_at(*this, shifted(offset, mu, -2));
        df = (8.0 * (fp1 - fm1) - (fp2 - fm2)) / (12.0 * h);
    } else {
        const CMatrix& fp1 = impl_->frame_at(*this, shifted(offset, mu, 1));
        const CMatrix& fm1 = impl_->frame_at(*this, shifted(offset, mu, -1));
        df = (fp1 - fm1) / (2.0 * h);
    }
    CMatrix raw = f0.adjoint() * df;
    const double defect = anti_hermiticity_defect(raw);
    max_defect_ = std::max(max_defect_, defect);
    if (defect > 10.0 * options_.anti_herm_tol) {
        throw StepSizeError("connection anti-Hermiticity defect " + std::to_string(defect) +
                            " exceeds 10x tolerance; adjust the step");
    }
    CMatrix a = (raw - raw.adjoint()) / 2.0;
    return impl_->connections.emplace(std::move(key), std::move(a)).first->second;
}

const CMatrix& StencilEngine::curvature(const std::vector<int>& offset, int mu, int nu) {
    return derivative(offset, {}, mu, nu);
}

const CMatrix& StencilEngine::derivative(const std::vector<int>& offset,
                                         const std::vector<int>& sigmas, int mu, int nu) {
    std::vector<int> key = offset;
    key.push_back(-1);
    key.insert(key.end(), sigmas.begin(), sigmas.end());
    key.push_back(-2);
    key.push_back(mu);
    key.push_back(nu);
    auto it = impl_->tensors.find(key);
    if (it != impl_->tensors.end()) return it->second;

    const double h = options_.step;
    CMatrix value;
    if (sigmas.empty()) {
        // F_{mu nu} = d_mu A_nu - d_nu A_mu + [A_mu, A_nu].
        auto d_of_a = [&](int d_dir, int comp) {
            if (options_.fourth_order) {
                return CMatrix((8.0 * (connection(shifted(offset, d_dir, 1), comp) -
                                       connection(shifted(offset, d_dir, -1), comp)) -
                                (connection(shifted(offset, d_dir, 2), comp) -
                                 connection(shifted(offset, d_dir, -2), comp))) /
                               (12.0 * h));
            }
            return CMatrix((connection(shifted(offset, d_dir, 1), comp) -
                            connection(shifted(offset, d_dir, -1), comp)) /
                           (2.0 * h));
        };
        const CMatrix& a_mu = connection(offset, mu);
        const CMatrix& a_nu = connection(offset, nu);
        value = d_of_a(mu, nu) - d_of_a(nu, mu) + a_mu * a_nu - a_nu * a_mu;
    } else {
        // nabla_sigma T = d_sigma T + [A_sigma, T] with sigma the outermost.
        const int sigma = sigmas.front();
        const std::vector<int> rest(sigmas.begin() + 1, sigmas.end());
        CMatrix dT;
        if (options_.fourth_order) {
            dT = (8.0 * (derivative(shifted(offset, sigma, 1), rest, mu, nu) -
                         derivative(shifted(offset, sigma, -1), rest, mu, nu)) -
                  (derivative(shifted(offset, sigma, 2), rest, mu, nu) -
                   derivative(shifted(offset, sigma, -2), rest, mu, nu))) /
                 (12.0 * h);
        } else {
            dT = (derivative(shifted(offset, sigma, 1), rest, mu, nu) -
                  derivative(shifted(offset, sigma, -1), rest, mu, nu)) /
                 (2.0 * h);
        }
        const CMatrix& a_sigma = connection(offset, sigma);
        const CMatrix& t = derivative(offset, rest, mu, nu);
        value = dT + a_sigma * t - t * a_sigma;
    }
    const double defect = anti_hermiticity_defect(value);
    max_defect_ = std::max(max_defect_, defect);
    value = ((value - value.adjoint()) / 2.0).eval();
    return impl_->tensors.emplace(std::move(key), std::move(value)).first->second;
}

// ---------------------------------------------------------------------------
// Free functions
// ---------------------------------------------------------------------------

namespace {

class ShiftedBaseField final : public spectral::FrameField {
public:
    ShiftedBaseField(const spectral::FrameField& inner, ParameterPoint base)
        : inner_(inner), base_(std::move(base)), base_frame_(inner.frame(base_)) {}

    CMatrix frame(const ParameterPoint& kappa) const override { return inner_.frame(kappa); }
    const fock::FockBasis& basis() const override { return inner_.basis(); }
    const CMatrix& base_frame() const override { return base_frame_; }
    const ParameterPoint& base_point() const override { return base_; }
    int dimension() const override { return inner_.dimension(); }
    std::string gauge() const override { return inner_.gauge(); }

private:
    const spectral::FrameField& inner_;
    ParameterPoint base_;
    CMatrix base_frame_;
};

}  // namespace

ConnectionField connection_at(const spectral::FrameField& frames,
                              const std::vector<std::string>& directions,
                              const ParameterPoint& kappa, const FdOptions& options) {
    ShiftedBaseField field(frames, kappa);
    StencilEngine engine(field, directions, options);
    ConnectionField out;
    out.directions = directions;
    out.at = kappa;
    out.gauge = frames.gauge();
    const std::vector<int> origin(directions.size(), 0);
    for (std::size_t mu = 0; mu < directions.size(); ++mu) {
        out.components.push_back(engine.connection(origin, static_cast<int>(mu)));
    }
    out.max_anti_herm_defect = engine.max_anti_herm_defect();
    return out;
}

ConnectionField connection_isospectral(const model::ModelSpec& spec, const fock::FockBasis& basis,
                                       const CMatrix& h0_frame, const ParameterPoint& kappa,
                                       const FdOptions& options) {
    auto field = spectral::isospectral_frame(spec, basis, h0_frame, kappa);
    return connection_at(*field, spec.parameter_names, kappa, options);
}

CurvatureSet curvature_at(const spectral::FrameField& frames,
                          const std::vector<std::string>& directions, const ParameterPoint& kappa,
                          const FdOptions& options) {
    return covariant_derivatives(frames, directions, kappa, 0, options);
}

CurvatureSet covariant_derivatives(const spectral::FrameField& frames,
                                   const std::vector<std::string>& directions,
                                   const ParameterPoint& kappa, int order,
                                   const FdOptions& options) {
    if (order < 0) throw InputError("derivative order must be >= 0");
    ShiftedBaseField field(frames, kappa);
    StencilEngine engine(field, directions, options);
    CurvatureSet out;
    out.directions = directions;
    out.at = kappa;
    out.order = order;
    const int m = static_cast<int>(directions.size());
    const std::vector<int> origin(directions.size(), 0);
    for (int mu = 0; mu < m; ++mu) {
        for (int nu = mu + 1; nu < m; ++nu) {
            out.curvature[{mu, nu}] = engine.curvature(origin, mu, nu);
        }
    }
    std::vector<std::vector<int>> sequences = {{}};
    for (int k = 1; k <= order; ++k) {
        std::vector<std::vector<int>> next;
        for (const auto& seq : sequences) {
            for (int s = 0; s < m; ++s) {
                std::vector<int> grown = seq;
                grown.insert(grown.begin(), s);
                next.push_back(std::move(grown));
            }
        }
        sequences = std::move(next);
        for (const auto& seq : sequences) {
            for (int mu = 0; mu < m; ++mu) {
                for (int nu = mu + 1; nu < m; ++nu) {
                    CurvatureSet::Derivative d;
                    d.sigmas = seq;
                    d.pair = {mu, nu};
                    d.value = engine.derivative(origin, seq, mu, nu);
                    out.derivatives.push_back(std::move(d));
                }
            }
        }
    }
    out.max_anti_herm_defect = engine.max_anti_herm_defect();
    return out;
}

LieSpanResult lie_algebra_dimension(const std::vector<CMatrix>& matrices,
                                    const RankOptions& options) {
    LieSpanResult out;
    out.matrices_considered = static_cast<int>(matrices.size());
    std::vector<const CMatrix*> kept;
    for (const auto& m : matrices) {
        if (max_abs(m) >= options.zero_floor) kept.push_back(&m);
    }
    if (kept.empty()) {
        out.rank = 0;
        out.abelian = true;
        return out;
    }
    const Eigen::Index d = kept.front()->rows();
    Eigen::MatrixXd stack(static_cast<Eigen::Index>(kept.size()), 2 * d * d);
    for (std::size_t i = 0; i < kept.size(); ++i) {
        const CMatrix& m = *kept[i];
        if (m.rows() != d || m.cols() != d) {
            throw InputError("lie_algebra_dimension: matrices must share one shape");
        }
        for (Eigen::Index r = 0; r < d; ++r) {
            for (Eigen::Index c = 0; c < d; ++c) {
                stack(i, 2 * (r * d + c)) = m(r, c).real();
                stack(i, 2 * (r * d + c) + 1) = m(r, c).imag();
            }
        }
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(stack, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    out.singular_values.assign(sv.data(), sv.data() + sv.size());
    const double cut = options.rank_tol * (sv.size() ? sv(0) : 0.0);
    int rank = 0;
    while (rank < sv.size() && sv(rank) > cut && sv(rank) > options.zero_floor) ++rank;
    out.rank = rank;

    // Abelianness of the span: test pairwise commutators of the rank-leading
    // right singular vectors reshaped back into matrices.
    std::vector<CMatrix> reps;
    for (int k = 0; k < rank; ++k) {
        CMatrix m(d, d);
        for (Eigen::Index r = 0; r < d; ++r) {
            for (Eigen::Index c = 0; c < d; ++c) {
                m(r, c) = Complex(svd.matrixV()(2 * (r * d + c), k),
                                  svd.matrixV()(2 * (r * d + c) + 1, k));
            }
        }
        reps.push_back(std::move(m));
    }
    out.abelian = true;
    for (std::size_t i = 0; i < reps.size() && out.abelian; ++i) {
        for (std::size_t j = i + 1; j < reps.size(); ++j) {
            if (max_abs(CMatrix(reps[i] * reps[j] - reps[j] * reps[i])) > 1e-6) {
                out.abelian = false;
                break;
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// holonomy_dimension
// ---------------------------------------------------------------------------

BlockTarget BlockTarget::isospectral(fock::FockBasis basis, CMatrix frame) {
    BlockTarget t{std::move(basis), std::move(frame), 0.0, 0};
    t.dimension = static_cast<int>(t.h0_frame.cols());
    return t;
}

BlockTarget BlockTarget::transported(fock::FockBasis basis, double eigenvalue, int dimension) {
    return BlockTarget{std::move(basis), CMatrix(), eigenvalue, dimension};
}

namespace {

// Frame field for one target anchored at one sample point, or null when the
// transported block cannot be resolved there.
std::unique_ptr<spectral::FrameField> target_field(const model::ModelSpec& spec,
                                                   const BlockTarget& target,
                                                   const ParameterPoint& sample,
                                                   double cluster_tol) {
    if (target.h0_frame.size() > 0) {
        return spectral::isospectral_frame(spec, target.basis, target.h0_frame, sample);
    }
    const CMatrix h = model::hamiltonian_at(spec, sample, target.basis);
    const auto blocks = spectral::eigen_blocks(h, cluster_tol);
    int index = -1;
    double best = 1e300;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const double dist = std::abs(blocks[i].eigenvalue - target.eigenvalue);
        if (dist < best) {
            best = dist;
            index = static_cast<int>(i);
        }
    }
    if (index < 0 || blocks[index].dimension != target.dimension) return nullptr;
    try {
        return spectral::local_frame(spec, target.basis, sample, index, cluster_tol);
    } catch (const FrameDegeneracyError&) {
        return nullptr;
    }
}

std::vector<std::vector<int>> sigma_sequences(int directions, int order) {
    std::vector<std::vector<int>> seqs = {{}};
    for (int k = 0; k < order; ++k) {
        std::vector<std::vector<int>> next;
        for (const auto& s : seqs) {
            for (int d = 0; d < directions; ++d) {
                std::vector<int> grown = s;
                grown.insert(grown.begin(), d);
                next.push_back(std::move(grown));
            }
        }
        seqs = std::move(next);
    }
    return seqs;
}

CMatrix direct_sum(const std::vector<CMatrix>& blocks) {
    Eigen::Index total = 0;
    for (const auto& b : blocks) total += b.rows();
    CMatrix out = CMatrix::Zero(total, total);
    Eigen::Index at = 0;
    for (const auto& b : blocks) {
        out.block(at, at, b.rows(), b.rows()) = b;
        at += b.rows();
    }
    return out;
}

}  // namespace

LieSpanResult holonomy_dimension(const model::ModelSpec& spec,
                                 const std::vector<BlockTarget>& targets,
                                 const std::vector<ParameterPoint>& sample_points,
                                 const HolonomyDimensionOptions& options) {
    if (targets.empty()) throw InputError("holonomy_dimension needs at least one block target");
    const int m = static_cast<int>(spec.parameter_names.size());
    const std::vector<int> origin(m, 0);

    int ceiling = 0;
    for (const auto& t : targets) ceiling += t.dimension * t.dimension;

    // Engines per usable (sample, target); samples with unresolvable blocks
    // are skipped entirely.
    struct SampleState {
        ParameterPoint point;
        std::vector<std::unique_ptr<spectral::FrameField>> fields;
        std::vector<std::unique_ptr<StencilEngine>> engines;
    };
    std::vector<SampleState> samples;
    for (const auto& p : sample_points) {
        SampleState st;
        st.point = p;
        bool ok = true;
        for (const auto& t : targets) {
            auto field = target_field(spec, t, p, options.cluster_tol);
            if (!field) {
                ok = false;
                break;
            }
            st.engines.push_back(
                std::make_unique<StencilEngine>(*field, spec.parameter_names, options.fd));
            st.fields.push_back(std::move(field));
        }
        if (ok) samples.push_back(std::move(st));
    }
    if (samples.empty()) {
        throw FrameDegeneracyError("holonomy_dimension: every sample point was degenerate");
    }

    LieSpanResult result;
    for (const auto& st : samples) result.sample_points.push_back(st.point);

    std::vector<CMatrix> span;
    int last_growth_order = 0;
    for (int order = 0; order <= options.max_order; ++order) {
        const auto seqs = sigma_sequences(m, order);
        // Tensor evaluation per sample runs in parallel; assembly is serial.
        std::vector<std::vector<CMatrix>> per_sample(samples.size());
        parallel_for(samples.size(), [&](std::size_t si) {
            auto& st = samples[si];
            std::vector<CMatrix>& out = per_sample[si];
            for (const auto& seq : seqs) {
                for (int mu = 0; mu < m; ++mu) {
                    for (int nu = mu + 1; nu < m; ++nu) {
                        std::vector<CMatrix> blocks;
                        blocks.reserve(targets.size());
                        for (auto& engine : st.engines) {
                            blocks.push_back(engine->derivative(origin, seq, mu, nu));
                        }
                        out.push_back(blocks.size() == 1 ? blocks.front() : direct_sum(blocks));
                    }
                }
            }
        });
        for (auto& chunk : per_sample) {
            for (auto& mtx : chunk) span.push_back(std::move(mtx));
        }
        const LieSpanResult stage = lie_algebra_dimension(span, options.rank);
        result.rank_by_order.push_back(stage.rank);
        result.matrices_considered = static_cast<int>(span.size());
        result.rank = stage.rank;
        result.singular_values = stage.singular_values;
        result.abelian = stage.abelian;
        if (stage.rank > (order == 0 ? -1 : result.rank_by_order[order - 1])) {
            last_growth_order = order;
        }
        result.stagnation_order = last_growth_order;
        if (stage.rank >= ceiling) break;
        if (order - last_growth_order >= options.stagnation_window) break;
    }
    return result;
}

double cutoff_connection_shift(const model::ModelSpec& spec, const CMatrix& h0_frame_small,
                               const ParameterPoint& kappa, int escalation,
                               const FdOptions& options) {
    if (!spec.system.cutoff_per_boson_mode) {
        throw ConfigError("cutoff_connection_shift needs a cutoff model");
    }
    const fock::FockBasis small = fock::enumerate_truncated(spec.system);
    model::ModelSpec big_spec = spec;
    big_spec.system.cutoff_per_boson_mode = *spec.system.cutoff_per_boson_mode + escalation;
    const fock::FockBasis big = fock::enumerate_truncated(big_spec.system);

    // Re-embed the frame columns by state identity.
    CMatrix frame_big = CMatrix::Zero(big.size(), h0_frame_small.cols());
    for (std::size_t i = 0; i < small.size(); ++i) {
        const std::ptrdiff_t j = big.index_of(small.state(i));
        if (j >= 0) frame_big.row(j) = h0_frame_small.row(i);
    }
    const ConnectionField a_small =
        connection_isospectral(spec, small, h0_frame_small, kappa, options);
    const ConnectionField a_big = connection_isospectral(big_spec, big, frame_big, kappa, options);
    double shift = 0.0;
    for (std::size_t mu = 0; mu < a_small.components.size(); ++mu) {
        shift = std::max(shift, max_abs(CMatrix(a_small.components[mu] - a_big.components[mu])));
    }
    return shift;
}

}  // namespace holopnt::geometry
