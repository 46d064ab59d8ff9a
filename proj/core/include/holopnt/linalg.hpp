#ifndef HOLOPNT_LINALG_HPP
#define HOLOPNT_LINALG_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace holopnt {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

// Error hierarchy. The CLI maps these onto exit codes.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : Error {
    using Error::Error;
};
struct InputError : Error {
    using Error::Error;
};
struct NumericalError : Error {
    using Error::Error;
};
struct FrameDegeneracyError : NumericalError {
    using NumericalError::NumericalError;
};
struct StepSizeError : NumericalError {
    using NumericalError::NumericalError;
};

// Largest |entry|; cheap matrix-scale proxy used for tolerance scaling.
inline double max_abs(const CMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double hermiticity_defect(const CMatrix& m) {
    return max_abs(CMatrix(m - m.adjoint()));
}

inline double anti_hermiticity_defect(const CMatrix& m) {
    return max_abs(CMatrix(m + m.adjoint()));
}

// Spectral (operator 2-) norm via SVD; fine at desk-scale dimensions.
double operator_norm(const CMatrix& m);

// Symmetric (Loewdin) orthonormalization: the closest matrix with
// orthonormal columns, Q = U V^dagger from the thin SVD M = U S V^dagger.
// Throws FrameDegeneracyError when M is column-rank-deficient
// (smallest singular value below rank_floor * largest).
CMatrix loewdin_orthonormalize(const CMatrix& m, double rank_floor = 1e-8);

// exp(G) for anti-Hermitian G via the Hermitian eigendecomposition of iG.
// The result is exactly unitary up to eigensolver round-off.
CMatrix expm_antihermitian(const CMatrix& g);

// Principal matrix logarithm of a unitary via its Schur-free normal-matrix
// eigendecomposition; valid away from the -1 eigenvalue branch cut.
CMatrix logm_unitary(const CMatrix& u);

double unitarity_defect(const CMatrix& u);

// Deterministic RNG: std::mt19937_64 plus explicit bit transforms, so the
// produced streams are identical across standard libraries and platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::uint64_t bits() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

// Haar-ish random unitary (QR of a complex Gaussian-by-sums matrix); good
// enough for gauge-covariance property tests.
CMatrix random_unitary(int dim, Rng& rng);

// Runs fn(i) for i in [0, n) on up to hardware_concurrency threads.
// fn must be safe to call concurrently for distinct i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace holopnt

#endif
