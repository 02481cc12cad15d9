#include "fidmat/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fidmat {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonHermitianInput: return "NonHermitianInput";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::SingularFallbackFailure: return "SingularFallbackFailure";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NumericalError: return "NumericalError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::GaugeViolation: return "GaugeViolation";
    case ErrorCode::NotFaithful: return "NotFaithful";
    case ErrorCode::NotPure: return "NotPure";
    case ErrorCode::NotQubit: return "NotQubit";
    case ErrorCode::ZeroWeight: return "ZeroWeight";
    case ErrorCode::TooManyStates: return "TooManyStates";
    case ErrorCode::WrongK: return "WrongK";
    case ErrorCode::ZeroPairWeight: return "ZeroPairWeight";
    case ErrorCode::BOutOfRange: return "BOutOfRange";
    case ErrorCode::DOutOfRange: return "DOutOfRange";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::AOutOfRange: return "AOutOfRange";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double operator_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues()(0);
}

namespace {

void require_finite(const ComplexMatrix& m, const char* what) {
  if (!m.allFinite()) throw Error(ErrorCode::NumericalError, std::string(what) + " has non-finite entries");
}

bool is_invertible(const HermitianMatrix& a) {
  return a.min_eigenvalue() > 1e-8 * std::max(1.0, a.max_eigenvalue());
}

ComplexMatrix sqrt_product_via_left(const HermitianMatrix& a, const HermitianMatrix& b) {
  const auto sa = psd_sqrt(a);
  const auto inner = HermitianMatrix::symmetrized(sa.matrix() * b.matrix() * sa.matrix());
  const auto sa_inv = apply_spectral(a, [](double l) { return 1.0 / std::sqrt(l); });
  return sa.matrix() * psd_sqrt(inner).matrix() * sa_inv.matrix();
}

ComplexMatrix sqrt_product_via_right(const HermitianMatrix& a, const HermitianMatrix& b) {
  const auto sb = psd_sqrt(b);
  const auto inner = HermitianMatrix::symmetrized(sb.matrix() * a.matrix() * sb.matrix());
  const auto sb_inv = apply_spectral(b, [](double l) { return 1.0 / std::sqrt(l); });
  return sb_inv.matrix() * psd_sqrt(inner).matrix() * sb.matrix();
}

}  // namespace

HermitianMatrix::HermitianMatrix() : spectrum_(std::make_shared<Spectrum>()) {}

HermitianMatrix::HermitianMatrix(const ComplexMatrix& m, double hermiticity_tol)
    : spectrum_(std::make_shared<Spectrum>()) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "Hermitian matrix must be square");
  }
  require_finite(m, "Hermitian matrix");
  const double asym = max_abs(m - m.adjoint());
  if (asym > hermiticity_tol) {
    std::ostringstream os;
    os << "||M - M^dagger||_max = " << asym << " exceeds " << hermiticity_tol;
    throw Error(ErrorCode::NonHermitianInput, os.str());
  }
  m_ = 0.5 * (m + m.adjoint());
}

HermitianMatrix::HermitianMatrix(const RealMatrix& m, double hermiticity_tol)
    : HermitianMatrix(ComplexMatrix(m.cast<Complex>()), hermiticity_tol) {}

HermitianMatrix HermitianMatrix::symmetrized(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "Hermitian matrix must be square");
  }
  require_finite(m, "Hermitian matrix");
  HermitianMatrix h;
  h.m_ = 0.5 * (m + m.adjoint());
  return h;
}

HermitianMatrix HermitianMatrix::identity(Index dim) {
  return HermitianMatrix(ComplexMatrix(ComplexMatrix::Identity(dim, dim)));
}

HermitianMatrix HermitianMatrix::diagonal(const RealVector& diag) {
  return HermitianMatrix(ComplexMatrix(diag.cast<Complex>().asDiagonal()));
}

const HermitianMatrix::Spectrum& HermitianMatrix::spectrum() const {
  std::call_once(spectrum_->once, [this] {
    if (m_.rows() == 0) return;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m_);
    if (solver.info() != Eigen::Success) {
      throw Error(ErrorCode::ConvergenceFailure, "Hermitian eigensolver did not converge");
    }
    spectrum_->values = solver.eigenvalues();
    spectrum_->vectors = solver.eigenvectors();
  });
  return *spectrum_;
}

const RealVector& HermitianMatrix::eigenvalues() const { return spectrum().values; }
const ComplexMatrix& HermitianMatrix::eigenvectors() const { return spectrum().vectors; }
double HermitianMatrix::min_eigenvalue() const { return eigenvalues()(0); }
double HermitianMatrix::max_eigenvalue() const { return eigenvalues()(dim() - 1); }

Eigensystem eigh(const HermitianMatrix& m) { return {m.eigenvalues(), m.eigenvectors()}; }

HermitianMatrix apply_spectral(const HermitianMatrix& m, const std::function<double(double)>& fn) {
  const auto& v = m.eigenvectors();
  RealVector f = m.eigenvalues().unaryExpr(fn);
  return HermitianMatrix::symmetrized(v * f.cast<Complex>().asDiagonal() * v.adjoint());
}

HermitianMatrix psd_sqrt(const HermitianMatrix& a, double psd_tol) {
  if (a.min_eigenvalue() < -psd_tol) {
    std::ostringstream os;
    os << "min eigenvalue " << a.min_eigenvalue() << " below -" << psd_tol;
    throw Error(ErrorCode::NotPSD, os.str());
  }
  // Eigenvalues at roundoff level are zero; their square roots would not be.
  const double floor = tol::kEigenFloor * std::max(1.0, a.max_eigenvalue());
  return apply_spectral(a, [floor](double l) { return l > floor ? std::sqrt(l) : 0.0; });
}

HermitianMatrix pd_inverse_sqrt(const HermitianMatrix& a, double floor) {
  if (a.min_eigenvalue() <= floor) {
    throw Error(ErrorCode::NotFaithful, "matrix is not invertible above the faithfulness threshold");
  }
  return apply_spectral(a, [](double l) { return 1.0 / std::sqrt(l); });
}

HermitianMatrix pd_inverse(const HermitianMatrix& a, double floor) {
  if (a.min_eigenvalue() <= floor) {
    throw Error(ErrorCode::NotFaithful, "matrix is not invertible above the faithfulness threshold");
  }
  return apply_spectral(a, [](double l) { return 1.0 / l; });
}

ComplexMatrix sqrt_product(const HermitianMatrix& a, const HermitianMatrix& b, double psd_tol) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "sqrt_product operands differ in size");
  if (a.min_eigenvalue() < -psd_tol || b.min_eigenvalue() < -psd_tol) {
    throw Error(ErrorCode::NotPSD, "sqrt_product requires PSD operands");
  }
  if (is_invertible(a)) return sqrt_product_via_left(a, b);
  if (is_invertible(b)) return sqrt_product_via_right(a, b);

  const auto reg = HermitianMatrix::symmetrized(
      a.matrix() + tol::kRegularization * ComplexMatrix::Identity(a.dim(), a.dim()));
  ComplexMatrix x = sqrt_product_via_left(reg, b);
  const ComplexMatrix ab = a.matrix() * b.matrix();
  const double residual = max_abs(x * x - ab);
  if (!(residual <= tol::kRegularizedResidual)) {
    std::ostringstream os;
    os << "regularized square root residual " << residual;
    throw Error(ErrorCode::SingularFallbackFailure, os.str());
  }
  return x;
}

PolarDecomposition polar(const ComplexMatrix& m, PolarSide side) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::DimensionMismatch, "polar needs a square matrix");
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const ComplexMatrix& w = svd.matrixU();
  const ComplexMatrix& x = svd.matrixV();
  const ComplexMatrix s = svd.singularValues().cast<Complex>().asDiagonal();
  ComplexMatrix unitary = w * x.adjoint();
  if (side == PolarSide::left) {
    return {std::move(unitary), HermitianMatrix::symmetrized(x * s * x.adjoint())};
  }
  return {std::move(unitary), HermitianMatrix::symmetrized(w * s * w.adjoint())};
}

double vn_entropy(const HermitianMatrix& m, double log_base, double psd_tol) {
  const auto& lambda = m.eigenvalues();
  if (lambda.size() > 0 && lambda(0) < -psd_tol) {
    std::ostringstream os;
    os << "entropy of a matrix with eigenvalue " << lambda(0);
    throw Error(ErrorCode::NotPSD, os.str());
  }
  double s = 0.0;
  for (Index i = 0; i < lambda.size(); ++i) {
    const double l = lambda(i);
    if (l > tol::kEigenFloor) s -= l * std::log(l);
  }
  return s / std::log(log_base);
}

double shannon_entropy(std::span<const double> p, double log_base) {
  double s = 0.0;
  for (double x : p) {
    if (x > tol::kEigenFloor) s -= x * std::log(x);
  }
  return s / std::log(log_base);
}

SpectralReport spectral_report(const HermitianMatrix& m, double zero_tol) {
  SpectralReport r;
  r.eigenvalues = m.eigenvalues();
  r.min_eigenvalue = m.dim() > 0 ? r.eigenvalues(0) : 0.0;
  for (Index i = 0; i < r.eigenvalues.size(); ++i) {
    const double l = r.eigenvalues(i);
    if (l < -zero_tol) {
      ++r.inertia.negative;
    } else if (l > zero_tol) {
      ++r.inertia.positive;
    } else {
      ++r.inertia.zero;
    }
  }
  return r;
}

Block2Check check_block2_psd(const HermitianMatrix& x, const HermitianMatrix& y, const ComplexMatrix& z,
                             double psd_tol) {
  const Index d = x.dim();
  if (y.dim() != d || z.rows() != d || z.cols() != d) {
    throw Error(ErrorCode::DimensionMismatch, "blocks must share one size");
  }
  ComplexMatrix block(2 * d, 2 * d);
  block.topLeftCorner(d, d) = x.matrix();
  block.topRightCorner(d, d) = z;
  block.bottomLeftCorner(d, d) = z.adjoint();
  block.bottomRightCorner(d, d) = y.matrix();
  const auto full = HermitianMatrix::symmetrized(block);

  Block2Check out;
  out.min_eigenvalue = full.min_eigenvalue();
  out.is_psd = out.min_eigenvalue >= -psd_tol;
  const auto invertible = [](const HermitianMatrix& m) {
    return m.min_eigenvalue() > 1e-12 * std::max(1.0, m.max_eigenvalue());
  };
  if (invertible(x) && invertible(y)) {
    const auto xi = apply_spectral(x, [](double l) { return 1.0 / std::sqrt(l); });
    const auto yi = apply_spectral(y, [](double l) { return 1.0 / std::sqrt(l); });
    out.contraction_norm = operator_norm(xi.matrix() * z * yi.matrix());
  }
  return out;
}

ComplexMatrix unitary_exp(const HermitianMatrix& h) {
  const auto& v = h.eigenvectors();
  const auto& lambda = h.eigenvalues();
  ComplexVector phases(lambda.size());
  for (Index i = 0; i < lambda.size(); ++i) phases(i) = std::polar(1.0, lambda(i));
  return v * phases.asDiagonal() * v.adjoint();
}

bool is_unitary(const ComplexMatrix& u, double tolerance) {
  if (u.rows() != u.cols()) return false;
  return max_abs(u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols())) <= tolerance;
}

}  // namespace fidmat
