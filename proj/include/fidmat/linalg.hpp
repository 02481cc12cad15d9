#pragma once

// Dense complex kernels: Hermitian eigendecomposition, spectral matrix
// functions, polar decomposition, the square root of a product of two PSD
// matrices, von Neumann entropy and PSD diagnostics.

#include <complex>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>

#include <Eigen/Dense>

#include "fidmat/error.hpp"

namespace fidmat {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

namespace tol {
inline constexpr double kHermiticity = 1e-10;
inline constexpr double kPsd = 1e-10;
inline constexpr double kZero = 1e-9;
inline constexpr double kEigenFloor = 1e-14;
inline constexpr double kRegularization = 1e-10;
inline constexpr double kRegularizedResidual = 1e-7;
}  // namespace tol

/// Largest absolute entry.
double max_abs(const ComplexMatrix& m);

/// Largest singular value.
double operator_norm(const ComplexMatrix& m);

/// Complex Hermitian matrix. Construction validates hermiticity and stores the
/// symmetrized (M + M^dagger)/2. The spectrum is computed on first request and
/// shared between copies.
class HermitianMatrix {
 public:
  HermitianMatrix();
  explicit HermitianMatrix(const ComplexMatrix& m, double hermiticity_tol = tol::kHermiticity);
  explicit HermitianMatrix(const RealMatrix& m, double hermiticity_tol = tol::kHermiticity);

  /// (M + M^dagger)/2 without a tolerance check; for products that are
  /// Hermitian algebraically but carry roundoff.
  static HermitianMatrix symmetrized(const ComplexMatrix& m);
  static HermitianMatrix identity(Index dim);
  static HermitianMatrix diagonal(const RealVector& diag);

  Index dim() const { return m_.rows(); }
  const ComplexMatrix& matrix() const { return m_; }
  Complex operator()(Index i, Index j) const { return m_(i, j); }

  /// Eigenvalues in ascending order.
  const RealVector& eigenvalues() const;
  /// Columns are orthonormal eigenvectors matching eigenvalues().
  const ComplexMatrix& eigenvectors() const;
  double min_eigenvalue() const;
  double max_eigenvalue() const;
  double trace() const { return m_.trace().real(); }

 private:
  struct Spectrum {
    std::once_flag once;
    RealVector values;
    ComplexMatrix vectors;
  };
  const Spectrum& spectrum() const;

  ComplexMatrix m_;
  std::shared_ptr<Spectrum> spectrum_;
};

struct Eigensystem {
  RealVector values;      // ascending
  ComplexMatrix vectors;  // unitary
};

Eigensystem eigh(const HermitianMatrix& m);

/// V f(diag(lambda)) V^dagger for a real function of the spectrum.
HermitianMatrix apply_spectral(const HermitianMatrix& m, const std::function<double(double)>& fn);

/// Principal square root of a PSD matrix. Eigenvalues in [-psd_tol, 0) are
/// clamped to zero; anything more negative is NotPSD.
HermitianMatrix psd_sqrt(const HermitianMatrix& a, double psd_tol = tol::kPsd);

/// Inverse square root of a positive definite matrix. Refuses (NotFaithful)
/// when the smallest eigenvalue is at or below floor.
HermitianMatrix pd_inverse_sqrt(const HermitianMatrix& a, double floor);

/// Inverse of a positive definite matrix, same refusal policy.
HermitianMatrix pd_inverse(const HermitianMatrix& a, double floor);

/// The unique square root with non-negative spectrum of the product AB of two
/// PSD matrices. Uses sqrt(A) (sqrt(A) B sqrt(A))^(1/2) sqrt(A)^(-1) when A is
/// invertible, the mirrored expression when only B is, and A + eps*I otherwise
/// with a residual check on X^2 = AB.
ComplexMatrix sqrt_product(const HermitianMatrix& a, const HermitianMatrix& b,
                           double psd_tol = tol::kPsd);

enum class PolarSide {
  left,   // M = U |M|,  |M| = (M^dagger M)^(1/2)
  right,  // M = |M| V,  |M| = (M M^dagger)^(1/2)
};

struct PolarDecomposition {
  ComplexMatrix unitary;
  HermitianMatrix modulus;
};

/// Polar decomposition via a full SVD. For rank-deficient M the zero singular
/// directions of both sides are paired in index order, which completes the
/// unitary deterministically.
PolarDecomposition polar(const ComplexMatrix& m, PolarSide side);

/// -sum lambda log_base(lambda) with 0 log 0 = 0.
double vn_entropy(const HermitianMatrix& m, double log_base = 2.0, double psd_tol = tol::kPsd);

/// Shannon entropy of a probability vector.
double shannon_entropy(std::span<const double> p, double log_base = 2.0);

struct Inertia {
  Index negative = 0;
  Index zero = 0;
  Index positive = 0;
  bool operator==(const Inertia&) const = default;
};

struct SpectralReport {
  RealVector eigenvalues;  // ascending
  double min_eigenvalue = 0.0;
  Inertia inertia;
};

SpectralReport spectral_report(const HermitianMatrix& m, double zero_tol = tol::kZero);

struct Block2Check {
  bool is_psd = false;
  /// ||x^(-1/2) z y^(-1/2)||, only when x and y are invertible.
  std::optional<double> contraction_norm;
  double min_eigenvalue = 0.0;
};

/// Positivity of the block matrix [[x, z], [z^dagger, y]].
Block2Check check_block2_psd(const HermitianMatrix& x, const HermitianMatrix& y,
                             const ComplexMatrix& z, double psd_tol = tol::kPsd);

/// exp(iH) for Hermitian H.
ComplexMatrix unitary_exp(const HermitianMatrix& h);

bool is_unitary(const ComplexMatrix& u, double tolerance);

}  // namespace fidmat
