#pragma once

// Direct search over purification unitaries, Monte Carlo hunts for non-PSD
// fidelity matrices, and the Fourier-basis construction that rules out
// fidelity powers below one.

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fidmat/correlation.hpp"

namespace fidmat {

struct MinimizeOptions {
  int restarts = 20;
  /// Proposal budget per restart.
  int iters = 4000;
  /// Stop a restart after this many proposals without a gain above min_gain.
  int patience = 200;
  double min_gain = 1e-9;
  double initial_step = 0.5;
  double log_base = 2.0;
};

struct MinimizeResult {
  UnitaryTuple unitaries;
  double entropy = 0.0;
  /// Entropy at the all-identity tuple.
  double baseline = 0.0;
  /// Proposals evaluated over all restarts.
  long iterations = 0;
};

/// Smallest entropy of gram_correlation(e, u) found by adaptive random
/// perturbation descent U_k <- U_k exp(i s H). Restart 0 starts at the identity
/// tuple, the others at Haar-random gauge-fixed tuples.
MinimizeResult minimize_correlation_entropy(const Ensemble& e, Rng& rng, const MinimizeOptions& options = {});

struct Fig1Row {
  std::size_t trial = 0;
  double s_root_fidelity = 0.0;
  double s_minimized = 0.0;
  double gap = 0.0;  // s_minimized - s_root_fidelity
  long iterations = 0;
};

struct EigenSummary {
  double min = std::numeric_limits<double>::infinity();
  double mean = 0.0;
  /// Fraction of trials whose value is below -1e-8.
  double negative_fraction = 0.0;
};

struct SearchOutcome {
  std::string objective;
  /// Maximized for the gap search, minimized for the eigenvalue hunts; the
  /// sentinel -inf (+inf) marks an empty search.
  double best_value = -std::numeric_limits<double>::infinity();
  std::optional<std::size_t> best_trial;
  std::optional<Ensemble> best_instance;
  std::optional<UnitaryTuple> best_unitaries;
  std::size_t trials_run = 0;
  std::uint64_t seed = 0;
  Index K = 0;
  Index d = 0;
  /// Per-trial objective values in trial order.
  std::vector<double> values;
  EigenSummary summary;
};

nlohmann::json search_outcome_to_json(const SearchOutcome& s);

struct Fig1Search {
  SearchOutcome outcome;
  std::vector<Fig1Row> rows;
};

/// Random K = 3 ensembles (trial t uses stream {seed, t}) ranked by
/// min_U S(C) - S(C_rootF); keeps the largest gap, ties to the lower trial.
Fig1Search violation_search_fig1(Index d, std::size_t trials, std::uint64_t seed, const MinimizeOptions& options = {});

/// Gap for one ensemble with a given stream for the optimizer.
Fig1Row fig1_gap(const Ensemble& e, Rng& rng, const MinimizeOptions& options = {});

enum class NonPsdKind {
  /// [F_ij^(1/2)]
  E_half,
  /// [F_ij]; positivity is unaffected by the sqrt(p_i p_j) weighting.
  C_F,
};

std::string_view to_string(NonPsdKind kind);

/// Smallest eigenvalue of the requested matrix for the given states.
double nonpsd_min_eigenvalue(std::span<const DensityMatrix> states, NonPsdKind kind);

/// Monte Carlo over i.i.d. random states (uniform weights); keeps the
/// instance with the smallest eigenvalue, ties to the lower trial.
SearchOutcome search_nonpsd(Index K, Index d, NonPsdKind kind, std::size_t trials, std::uint64_t seed,
                            StateModel model = StateModel::hilbert_schmidt);

struct HadamardStates {
  /// 2n unit vectors: index 2k is e_k, index 2k+1 is the k-th Fourier column.
  std::vector<ComplexVector> vectors;
  /// -1 on standard basis vectors, +1 on Fourier vectors.
  std::vector<int> signs;

  std::vector<DensityMatrix> states() const;
};

/// Standard basis interleaved with the columns of the n x n Fourier matrix;
/// verifies the overlap pattern (1/sqrt(n) across, 0 within) to 1e-10.
HadamardStates hadamard_construction(Index n);

/// w^T [F_ij^alpha] w with w the sign vector of the construction.
double hadamard_quadratic_form(Index n, double alpha);

/// 2n - 2n^2 n^(-alpha).
double hadamard_quadratic_form_closed(Index n, double alpha);

}  // namespace fidmat
