#include "fidmat/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fidmat {

namespace {

void require_same_dim(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "states differ in dimension");
}

double clamp_unit(double raw, const char* what) {
  if (raw < -FidelityValue::kClampTol || raw > 1.0 + FidelityValue::kClampTol || std::isnan(raw)) {
    std::ostringstream os;
    os << what << " " << raw << " outside [0, 1]";
    throw Error(ErrorCode::NumericalError, os.str());
  }
  return std::clamp(raw, 0.0, 1.0);
}

/// tr sqrt(m) for PSD m, treating roundoff-level eigenvalues as zero.
double trace_sqrt(const HermitianMatrix& m) {
  const auto& lambda = m.eigenvalues();
  const double floor = tol::kEigenFloor * std::max(1.0, m.max_eigenvalue());
  double t = 0.0;
  for (Index i = 0; i < lambda.size(); ++i) t += lambda(i) > floor ? std::sqrt(lambda(i)) : 0.0;
  return t;
}

double raw_root_fidelity(const DensityMatrix& a, const DensityMatrix& b) {
  require_same_dim(a, b);
  const auto sa = psd_sqrt(a.hermitian());
  const auto inner = HermitianMatrix::symmetrized(sa.matrix() * b.matrix() * sa.matrix());
  return trace_sqrt(inner);
}

}  // namespace

FidelityValue::FidelityValue(double raw) : value_(clamp_unit(raw, "fidelity")) {}

FidelityValue fidelity(const DensityMatrix& a, const DensityMatrix& b) {
  const double r = raw_root_fidelity(a, b);
  return FidelityValue(r * r);
}

double root_fidelity(const DensityMatrix& a, const DensityMatrix& b) {
  return clamp_unit(raw_root_fidelity(a, b), "root fidelity");
}

double root_fidelity_via_product(const DensityMatrix& a, const DensityMatrix& b) {
  require_same_dim(a, b);
  return clamp_unit(sqrt_product(a.hermitian(), b.hermitian()).trace().real(), "root fidelity");
}

RealMatrix root_fidelity_table(std::span<const DensityMatrix> states) {
  const auto K = static_cast<Index>(states.size());
  RealMatrix table = RealMatrix::Identity(K, K);
  std::vector<HermitianMatrix> roots;
  roots.reserve(states.size());
  for (const auto& s : states) {
    if (s.dim() != states.front().dim()) throw Error(ErrorCode::DimensionMismatch, "states differ in dimension");
    roots.push_back(psd_sqrt(s.hermitian()));
  }
  for (Index i = 0; i < K; ++i) {
    const auto& si = roots[static_cast<std::size_t>(i)].matrix();
    for (Index j = i + 1; j < K; ++j) {
      const auto inner = HermitianMatrix::symmetrized(si * states[static_cast<std::size_t>(j)].matrix() * si);
      table(i, j) = table(j, i) = clamp_unit(trace_sqrt(inner), "root fidelity");
    }
  }
  return table;
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  require_same_dim(a, b);
  const auto diff = HermitianMatrix::symmetrized(a.matrix() - b.matrix());
  return 0.5 * diff.eigenvalues().cwiseAbs().sum();
}

}  // namespace fidmat
