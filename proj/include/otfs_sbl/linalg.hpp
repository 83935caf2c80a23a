#pragma once

// Dense complex kernels shared by every module. Storage is Eigen's default
// column-major layout.

#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>

#include "otfs_sbl/error.hpp"

namespace otfs {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kHermitianTol = 1e-10;

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
    return m.allFinite();
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what) {
    require(m.allFinite(), ErrorKind::NonFinite, std::string(what) + " has NaN/Inf entries");
}

/// Relative Hermitian check: ||A - A^H||_max <= tol * max(1, ||A||_max).
inline bool is_hermitian(const ComplexMatrix& a, double tol = kHermitianTol) {
    if (a.rows() != a.cols()) return false;
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = 0; i <= j; ++i) {
            if (std::abs(a(i, j) - std::conj(a(j, i))) > tol * scale) return false;
        }
    }
    return true;
}

/// Cholesky factor of a Hermitian positive-definite matrix.
class HpdFactor {
public:
    explicit HpdFactor(const ComplexMatrix& a) {
        require(a.rows() == a.cols(), ErrorKind::DimensionMismatch, "HPD factor needs a square matrix");
        require_finite(a, "HPD input");
        require(is_hermitian(a), ErrorKind::NotHermitian, "matrix is not Hermitian within tolerance");
        llt_.compute(a);
        require(llt_.info() == Eigen::Success, ErrorKind::NotPositiveDefinite,
                "Cholesky hit a non-positive pivot");
        // Eigen's LLT does not reject tiny/negative pivots that round to positive
        // values on the diagonal of L, so check explicitly.
        const auto d = llt_.matrixLLT().diagonal().real();
        require((d.array() > 0.0).all() && d.allFinite(), ErrorKind::NotPositiveDefinite,
                "Cholesky produced a non-positive pivot");
    }

    Eigen::Index dim() const { return llt_.matrixLLT().rows(); }

    template <typename Rhs>
    ComplexMatrix solve(const Eigen::MatrixBase<Rhs>& b) const {
        require(b.rows() == dim(), ErrorKind::DimensionMismatch, "rhs rows do not match factor");
        return llt_.solve(b);
    }

    /// Returns L^{-1} B where A = L L^H.
    template <typename Rhs>
    ComplexMatrix whiten(const Eigen::MatrixBase<Rhs>& b) const {
        require(b.rows() == dim(), ErrorKind::DimensionMismatch, "rhs rows do not match factor");
        return llt_.matrixL().solve(b);
    }

    /// Explicit L^{-1}; multiplying by it is a gemm, much faster than a
    /// triangular solve when the right-hand side is wide.
    ComplexMatrix inverse_factor() const {
        ComplexMatrix li = ComplexMatrix::Identity(dim(), dim());
        llt_.matrixL().solveInPlace(li);
        return li;
    }

    double log_det() const {
        return 2.0 * llt_.matrixLLT().diagonal().real().array().log().sum();
    }

    /// tr(A^{-1}) = ||L^{-1}||_F^2.
    double trace_inverse() const {
        const ComplexMatrix li = llt_.matrixL().solve(ComplexMatrix::Identity(dim(), dim()));
        return li.squaredNorm();
    }

private:
    Eigen::LLT<ComplexMatrix> llt_;
};

/// X = A^{-1} B for Hermitian positive-definite A.
inline ComplexMatrix solve_hpd(const ComplexMatrix& a, const ComplexMatrix& b) {
    require(b.rows() == a.rows(), ErrorKind::DimensionMismatch, "solve_hpd: B.rows != A.rows");
    return HpdFactor(a).solve(b);
}

/// ln det(A) via Cholesky.
inline double log_det_hpd(const ComplexMatrix& a) { return HpdFactor(a).log_det(); }

template <typename Derived>
double frobenius_sq(const Eigen::MatrixBase<Derived>& m) {
    return m.squaredNorm();
}

/// Unitary DFT matrix, F(a, b) = exp(-j 2 pi a b / n) / sqrt(n).
inline ComplexMatrix dft_matrix(Eigen::Index n) {
    require(n > 0, ErrorKind::DimensionMismatch, "DFT size must be positive");
    ComplexMatrix f(n, n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b) {
            // reduce the exponent mod n first to keep the phase argument small
            const auto idx = static_cast<double>((a * b) % n);
            f(a, b) = std::polar(scale, -2.0 * kPi * idx / static_cast<double>(n));
        }
    }
    return f;
}

}  // namespace otfs
