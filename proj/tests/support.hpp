#pragma once

#include <filesystem>
#include <string>

#include "fidmat/ensemble.hpp"

namespace support {

using namespace fidmat;

inline std::filesystem::path data_file(const std::string& name) { return std::filesystem::path(FIDMAT_TEST_DATA) / name; }

/// Random PSD matrix of rank r (r = d gives full rank), unit trace.
inline HermitianMatrix random_psd(Index d, Index r, Rng& rng) {
  ComplexMatrix g(d, r);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < r; ++j) g(i, j) = rng.complex_normal();
  }
  ComplexMatrix m = g * g.adjoint();
  m /= m.trace().real();
  return HermitianMatrix::symmetrized(m);
}

inline ComplexVector basis(Index d, Index k) { return ComplexVector::Unit(d, k); }

inline Ensemble identical_states(Index K, const DensityMatrix& rho) {
  return Ensemble::uniform(std::vector<DensityMatrix>(static_cast<std::size_t>(K), rho));
}

inline Ensemble orthogonal_pure(std::vector<double> weights) {
  std::vector<DensityMatrix> s;
  const auto K = static_cast<Index>(weights.size());
  for (Index k = 0; k < K; ++k) s.push_back(DensityMatrix::pure(basis(K, k)));
  return Ensemble(std::move(weights), std::move(s));
}

}  // namespace support
