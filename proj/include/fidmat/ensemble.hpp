#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "fidmat/linalg.hpp"

namespace fidmat {

inline constexpr double kFaithfulTol = 1e-8;
inline constexpr double kPurityTol = 1e-8;

/// Unit-trace PSD Hermitian matrix.
class DensityMatrix {
 public:
  /// Validates PSD (within psd_tol) and |tr - 1| <= 1e-10.
  explicit DensityMatrix(HermitianMatrix m);
  explicit DensityMatrix(const ComplexMatrix& m) : DensityMatrix(HermitianMatrix(m)) {}

  /// |phi><phi| / <phi|phi>.
  static DensityMatrix pure(const ComplexVector& phi);
  static DensityMatrix maximally_mixed(Index d);

  Index dim() const { return m_.dim(); }
  const HermitianMatrix& hermitian() const { return m_; }
  const ComplexMatrix& matrix() const { return m_.matrix(); }

  double purity() const;
  bool is_pure(double tolerance = kPurityTol) const { return purity() >= 1.0 - tolerance; }
  bool is_faithful(double threshold = kFaithfulTol) const { return m_.min_eigenvalue() > threshold; }
  /// Eigenvector of the largest eigenvalue; the state vector for pure states.
  ComplexVector dominant_vector() const;

 private:
  HermitianMatrix m_;
};

/// sum_i w_i rho_i with arbitrary non-negative w (no trace check).
HermitianMatrix mix(std::span<const double> w, std::span<const DensityMatrix> states);

struct EnsembleMeta {
  std::uint64_t seed = 0;
  std::string generator;
};

/// Probability vector plus states of a common dimension.
class Ensemble {
 public:
  Ensemble(std::vector<double> weights, std::vector<DensityMatrix> states, EnsembleMeta meta = {});

  static Ensemble uniform(std::vector<DensityMatrix> states, EnsembleMeta meta = {});

  Index K() const { return static_cast<Index>(states_.size()); }
  Index dim() const { return states_.front().dim(); }
  double weight(Index i) const { return weights_[static_cast<std::size_t>(i)]; }
  const DensityMatrix& state(Index i) const { return states_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<DensityMatrix>& states() const { return states_; }
  const EnsembleMeta& meta() const { return meta_; }

  /// sum_i p_i rho_i.
  HermitianMatrix average_state() const;
  /// New ensemble whose i-th member is the order[i]-th member of this one.
  Ensemble permuted(std::span<const std::size_t> order) const;
  /// Two-member sub-ensemble with renormalized weights.
  Ensemble pair(Index i, Index j) const;

  bool all_pure(double tolerance = kPurityTol) const;
  bool all_faithful(double threshold = kFaithfulTol) const;

  /// FNV-1a over weights and entries, hex encoded.
  std::string content_hash() const;

 private:
  std::vector<double> weights_;
  std::vector<DensityMatrix> states_;
  EnsembleMeta meta_;
};

/// Key for a reproducible random stream.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_index = 0;
};

/// Name recorded in output metadata for the generator below.
inline constexpr const char* kGeneratorName = "mt19937_64(splitmix64(seed, stream_index))";

/// Stateful engine derived from an RngStream. Equal streams give equal draws.
class Rng {
 public:
  explicit Rng(RngStream stream);
  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  Complex complex_normal() { return {normal(), normal()}; }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

ComplexMatrix ginibre(Index d, Rng& rng);

/// G G^dagger / tr(G G^dagger), G complex Ginibre (Hilbert-Schmidt measure).
DensityMatrix random_hs_state(Index d, Rng& rng);

/// |phi><phi| with phi a normalized complex Gaussian vector (Haar measure).
DensityMatrix random_pure_state(Index d, Rng& rng);

/// Haar unitary from QR of a Ginibre matrix with the diagonal phase fix.
ComplexMatrix random_unitary(Index d, Rng& rng);

/// Uniform point on the probability simplex (normalized exponentials).
std::vector<double> random_simplex_weights(Index K, Rng& rng);

enum class StateModel { hilbert_schmidt, pure };

Ensemble random_ensemble(Index K, Index d, StateModel model, Rng& rng, EnsembleMeta meta = {});

nlohmann::json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const nlohmann::json& j, const std::string& context);

nlohmann::json ensemble_to_json(const Ensemble& e);
Ensemble ensemble_from_json(const nlohmann::json& j);

void save_ensemble(const Ensemble& e, const std::filesystem::path& path);
Ensemble load_ensemble(const std::filesystem::path& path);

}  // namespace fidmat
