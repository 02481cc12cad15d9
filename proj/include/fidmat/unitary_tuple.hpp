#pragma once

#include <vector>

#include "fidmat/linalg.hpp"

namespace fidmat {

inline constexpr double kUnitaryTol = 1e-9;

/// Purification unitaries U_1..U_K of a common size. The correlation matrix
/// depends only on the products U_j^dagger U_i, so U_1 = I is the gauge.
class UnitaryTuple {
 public:
  explicit UnitaryTuple(std::vector<ComplexMatrix> unitaries, double tolerance = kUnitaryTol);

  static UnitaryTuple identity(Index K, Index d);

  Index K() const { return static_cast<Index>(u_.size()); }
  Index dim() const { return u_.front().rows(); }
  const ComplexMatrix& operator[](Index i) const { return u_[static_cast<std::size_t>(i)]; }
  const std::vector<ComplexMatrix>& unitaries() const { return u_; }

  bool is_gauge_fixed(double tolerance = kUnitaryTol) const;
  /// U_1^dagger U_i for every i; same correlation matrix, first element I.
  UnitaryTuple gauge_fixed() const;
  /// V U_i for every i.
  UnitaryTuple left_multiplied(const ComplexMatrix& v) const;

 private:
  std::vector<ComplexMatrix> u_;
};

}  // namespace fidmat
