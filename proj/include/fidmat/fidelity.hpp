#pragma once

#include "fidmat/ensemble.hpp"

namespace fidmat {

/// Fidelity in [0, 1]. Raw values within 1e-10 outside the interval are
/// clamped; larger excursions are a NumericalError.
class FidelityValue {
 public:
  static constexpr double kClampTol = 1e-10;

  explicit FidelityValue(double raw);

  double value() const { return value_; }
  operator double() const { return value_; }

 private:
  double value_;
};

/// (tr sqrt(sqrt(a) b sqrt(a)))^2.
FidelityValue fidelity(const DensityMatrix& a, const DensityMatrix& b);

/// tr sqrt(sqrt(a) b sqrt(a)), clamped to [0, 1].
double root_fidelity(const DensityMatrix& a, const DensityMatrix& b);

/// tr sqrt_product(a, b); the product-root route, kept as a cross-check.
double root_fidelity_via_product(const DensityMatrix& a, const DensityMatrix& b);

/// Symmetric matrix of pairwise root fidelities with a unit diagonal; each
/// state's square root is computed once.
RealMatrix root_fidelity_table(std::span<const DensityMatrix> states);

/// 1/2 tr |a - b|.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

}  // namespace fidmat
