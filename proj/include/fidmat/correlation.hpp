#pragma once

// K x K matrices built from an ensemble: the Gram correlation matrix for a
// choice of purification unitaries, fidelity-based matrices, the masked root
// fidelity matrix, the multi-state matrix sigma, and the block witnesses whose
// positivity carries the entropy bounds.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fidmat/ensemble.hpp"
#include "fidmat/unitary_tuple.hpp"

namespace fidmat {

enum class MatrixKind {
  gram,
  root_fidelity,
  fidelity_power,
  masked,
  squared_fidelity,
  multistate,
  pure_gram,
  pure_hadamard_square,
};

std::string_view to_string(MatrixKind kind);

/// Permutation of 0..K-1.
class Ordering {
 public:
  explicit Ordering(std::vector<std::size_t> perm);
  static Ordering identity(std::size_t K);

  std::size_t size() const { return perm_.size(); }
  std::span<const std::size_t> indices() const { return perm_; }
  std::size_t operator[](std::size_t i) const { return perm_[i]; }
  bool operator==(const Ordering&) const = default;

 private:
  std::vector<std::size_t> perm_;
};

std::string to_string(const Ordering& o);

struct CorrelationMatrix {
  MatrixKind kind;
  HermitianMatrix matrix;
  /// Kind, parameters and the ensemble content hash.
  std::string provenance;
  /// alpha for fidelity_power, b for masked; unused otherwise.
  double parameter = 0.0;
  std::optional<Ordering> ordering = std::nullopt;

  Index K() const { return matrix.dim(); }
  double min_eigenvalue() const { return matrix.min_eigenvalue(); }
  SpectralReport spectrum(double zero_tol = tol::kZero) const { return spectral_report(matrix, zero_tol); }
  /// Entropy; PSD is enforced to 1e-8 since these matrices come out of longer chains.
  double entropy(double log_base = 2.0) const { return vn_entropy(matrix, log_base, 1e-8); }
};

nlohmann::json correlation_to_json(const CorrelationMatrix& c);

/// Entries sqrt(p_i p_j) tr(s_j U_j^dagger U_i s_i) for precomputed state
/// square roots s_i. No gauge check; used by the optimizer's inner loop.
ComplexMatrix correlation_entries(std::span<const double> weights, std::span<const ComplexMatrix> sqrt_states,
                                  std::span<const ComplexMatrix> unitaries);

/// Gram correlation matrix of the purifications selected by u (u[0] must be I).
CorrelationMatrix gram_correlation(const Ensemble& e, const UnitaryTuple& u);

/// [sqrt(p_i p_j) sqrt(F_ij)].
CorrelationMatrix root_fidelity_matrix(const Ensemble& e);

/// Unweighted [F_ij^alpha]; unit diagonal.
CorrelationMatrix fidelity_power_matrix(std::span<const DensityMatrix> states, double alpha);

/// Root fidelity matrix with off-diagonal entries scaled by b.
CorrelationMatrix masked_matrix(const Ensemble& e, double b);

/// [sqrt(p_i p_j) F_ij].
CorrelationMatrix squared_fidelity_matrix(const Ensemble& e);

/// Multi-state matrix sigma for the ensemble taken in the given order. Faithful
/// states use the chained sqrt(rho_j rho_{j-1}) rho_{j-1}^{-1} ... product;
/// pure ensembles use overlaps with the accumulated nearest-neighbour phases.
CorrelationMatrix multistate_sigma(const Ensemble& e, const Ordering& ordering);

struct OrderedEntropy {
  Ordering ordering;
  double entropy;
};

/// Smallest entropy of sigma over all K! orderings (K <= 8). Ties keep the
/// lexicographically first ordering.
OrderedEntropy sigma_min_entropy(const Ensemble& e, double log_base = 2.0);

/// Direct sum over pairs i < j (lexicographic) of the 2d x 2d blocks
/// 1/2 [[p_i rho_i, sqrt(p_i p_j) sqrt(rho_i rho_j)], [h.c., p_j rho_j]].
/// K = 1 gives the single block p_1 rho_1.
HermitianMatrix witness_omega(const Ensemble& e);

/// [1/2 (sqrt(p_i p_j) + delta_ij p_i) tr sqrt(rho_i rho_j)], the two-register
/// reduction of witness_omega for three states.
HermitianMatrix omega_reduced(const Ensemble& e);

struct QubitWitness {
  /// 2K x 2K, blocks sqrt(p_i p_j) (rho_i rho_j + sqrt(det rho_i det rho_j) I).
  HermitianMatrix w;
  /// K x K block traces of w.
  HermitianMatrix contracted;
};

QubitWitness qubit_witness_W(const Ensemble& e);

struct PureGramPair {
  /// [(p_i p_j)^(1/4) <phi_i|phi_j>]
  CorrelationMatrix g;
  /// g o conj(g)
  CorrelationMatrix h;
};

PureGramPair pure_gram_pair(const Ensemble& e);

/// Inertia of [sqrt(F_ij)] equals inertia of the weighted root fidelity matrix.
bool inertia_congruence_check(const Ensemble& e, double zero_tol = tol::kZero);

}  // namespace fidmat
