#include "holopnt/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

namespace holopnt {

double operator_norm(const CMatrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<CMatrix> svd(m);
    return svd.singularValues()(0);
}

CMatrix loewdin_orthonormalize(const CMatrix& m, double rank_floor) {
    Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(sv.size() - 1) < rank_floor * sv(0)) {
        throw FrameDegeneracyError(
            "projector transport lost column rank (smallest singular value " +
            std::to_string(sv.size() ? sv(sv.size() - 1) : 0.0) + ")");
    }
    return svd.matrixU() * svd.matrixV().adjoint();
}

CMatrix expm_antihermitian(const CMatrix& g) {
    const double defect = anti_hermiticity_defect(g);
    const double scale = std::max(1.0, max_abs(g));
    if (defect > 1e-9 * scale) {
        throw NumericalError("expm_antihermitian: generator is not anti-Hermitian (defect " +
                             std::to_string(defect) + ")");
    }
    // iG is Hermitian: G = -i V L V^dagger, exp(G) = V exp(-i L) V^dagger.
    Eigen::SelfAdjointEigenSolver<CMatrix> es(CMatrix(kI * g));
    if (es.info() != Eigen::Success) throw NumericalError("expm_antihermitian: eigensolver failed");
    CVector phases(es.eigenvalues().size());
    for (Eigen::Index k = 0; k < phases.size(); ++k) {
        phases(k) = std::exp(Complex(0.0, -es.eigenvalues()(k)));
    }
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

CMatrix logm_unitary(const CMatrix& u) {
    Eigen::ComplexEigenSolver<CMatrix> es(u);
    if (es.info() != Eigen::Success) throw NumericalError("logm_unitary: eigensolver failed");
    CVector logs(es.eigenvalues().size());
    for (Eigen::Index k = 0; k < logs.size(); ++k) {
        logs(k) = std::log(es.eigenvalues()(k));
    }
    // Eigenvectors of a unitary need re-orthonormalization only in degenerate
    // clusters; Loewdin on the full eigenbasis handles that uniformly.
    CMatrix v = loewdin_orthonormalize(es.eigenvectors());
    return v * logs.asDiagonal() * v.adjoint();
}

double unitarity_defect(const CMatrix& u) {
    return operator_norm(CMatrix(u.adjoint() * u - CMatrix::Identity(u.cols(), u.cols())));
}

CMatrix random_unitary(int dim, Rng& rng) {
    CMatrix m(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            // Sum of uniforms is close enough to Gaussian for this purpose.
            double re = 0.0, im = 0.0;
            for (int k = 0; k < 4; ++k) {
                re += rng.uniform() - 0.5;
                im += rng.uniform() - 0.5;
            }
            m(i, j) = Complex(re, im);
        }
    }
    Eigen::HouseholderQR<CMatrix> qr(m);
    CMatrix q = qr.householderQ();
    // Fix the phase freedom so the result is deterministic.
    CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < dim; ++j) {
        Complex d = r(j, j);
        if (std::abs(d) > 0) q.col(j) *= d / std::abs(d);
    }
    return q;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    std::size_t workers = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace holopnt
