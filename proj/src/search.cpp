#include "fidmat/search.hpp"

#include <cmath>
#include <numbers>

#include "fidmat/fidelity.hpp"
#include "fidmat/parallel.hpp"

namespace fidmat {

namespace {

double spectrum_entropy(const ComplexMatrix& c, double log_base) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(c, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double v = es.eigenvalues()(i);
    if (v > 0.0) s -= v * std::log(v);
  }
  return s / std::log(log_base);
}

ComplexMatrix random_hermitian_direction(Index d, Rng& rng) {
  const ComplexMatrix g = ginibre(d, rng);
  ComplexMatrix h = 0.5 * (g + g.adjoint());
  return h / h.norm();
}

std::vector<ComplexMatrix> restart_point(Index K, Index d, int restart, Rng& rng) {
  std::vector<ComplexMatrix> u(static_cast<std::size_t>(K), ComplexMatrix::Identity(d, d));
  if (restart > 0) {
    for (std::size_t k = 1; k < u.size(); ++k) u[k] = random_unitary(d, rng);
  }
  return u;
}

struct Descent {
  std::vector<ComplexMatrix> u;
  double value = 0.0;
  long proposals = 0;
};

Descent descend(std::span<const double> weights, std::span<const ComplexMatrix> roots, std::vector<ComplexMatrix> u,
                Rng& rng, const MinimizeOptions& o) {
  Descent best{std::move(u), 0.0, 0};
  best.value = spectrum_entropy(correlation_entries(weights, roots, best.u), o.log_base);
  const auto K = best.u.size();
  const Index d = roots.front().rows();
  if (K < 2) return best;
  double step = o.initial_step;
  int stale = 0;
  std::vector<ComplexMatrix> trial = best.u;
  for (int it = 0; it < o.iters && stale < o.patience; ++it) {
    const std::size_t k = 1 + static_cast<std::size_t>(rng.uniform() * static_cast<double>(K - 1)) % (K - 1);
    const ComplexMatrix h = step * random_hermitian_direction(d, rng);
    trial[k] = best.u[k] * unitary_exp(HermitianMatrix::symmetrized(h));
    const double v = spectrum_entropy(correlation_entries(weights, roots, trial), o.log_base);
    ++best.proposals;
    if (v < best.value) {
      stale = (best.value - v > o.min_gain) ? 0 : stale + 1;
      best.value = v;
      best.u[k] = trial[k];
      step = std::min(step * 1.2, std::numbers::pi);
    } else {
      trial[k] = best.u[k];
      ++stale;
      step = std::max(step * 0.9, 1e-9);
    }
  }
  // Re-project to remove drift accumulated by repeated products.
  for (std::size_t k = 1; k < K; ++k) best.u[k] = polar(best.u[k], PolarSide::left).unitary;
  return best;
}

void summarize(SearchOutcome& s) {
  if (s.values.empty()) return;
  double total = 0.0;
  std::size_t negative = 0;
  s.summary.min = s.values.front();
  for (double v : s.values) {
    s.summary.min = std::min(s.summary.min, v);
    total += v;
    if (v < -1e-8) ++negative;
  }
  s.summary.mean = total / static_cast<double>(s.values.size());
  s.summary.negative_fraction = static_cast<double>(negative) / static_cast<double>(s.values.size());
}

}  // namespace

MinimizeResult minimize_correlation_entropy(const Ensemble& e, Rng& rng, const MinimizeOptions& options) {
  std::vector<ComplexMatrix> roots;
  for (const auto& s : e.states()) roots.push_back(psd_sqrt(s.hermitian()).matrix());
  const Index K = e.K();
  const Index d = e.dim();

  const double baseline =
      spectrum_entropy(correlation_entries(e.weights(), roots, restart_point(K, d, 0, rng)), options.log_base);
  std::optional<Descent> best;
  long proposals = 0;
  for (int r = 0; r < std::max(1, options.restarts); ++r) {
    Descent run = descend(e.weights(), roots, restart_point(K, d, r, rng), rng, options);
    proposals += run.proposals;
    if (!best || run.value < best->value) best = std::move(run);
  }
  UnitaryTuple u(std::move(best->u));
  const double entropy = gram_correlation(e, u).entropy(options.log_base);
  return {std::move(u), entropy, baseline, proposals};
}

Fig1Row fig1_gap(const Ensemble& e, Rng& rng, const MinimizeOptions& options) {
  Fig1Row row;
  row.s_root_fidelity = root_fidelity_matrix(e).entropy(options.log_base);
  const auto m = minimize_correlation_entropy(e, rng, options);
  row.s_minimized = m.entropy;
  row.gap = row.s_minimized - row.s_root_fidelity;
  row.iterations = m.iterations;
  return row;
}

Fig1Search violation_search_fig1(Index d, std::size_t trials, std::uint64_t seed, const MinimizeOptions& options) {
  if (d < 2) throw Error(ErrorCode::InvalidArgument, "dimension must be >= 2");
  Fig1Search out;
  out.outcome.objective = "min_U S(C) - S(C_rootF)";
  out.outcome.seed = seed;
  out.outcome.K = 3;
  out.outcome.d = d;
  out.rows.resize(trials);
  std::vector<std::optional<Ensemble>> ensembles(trials);
  parallel_for(trials, [&](std::size_t t) {
    Rng rng({seed, t});
    auto e = random_ensemble(3, d, StateModel::hilbert_schmidt, rng, {seed, kGeneratorName});
    out.rows[t] = fig1_gap(e, rng, options);
    out.rows[t].trial = t;
    ensembles[t] = std::move(e);
  });
  out.outcome.trials_run = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    out.outcome.values.push_back(out.rows[t].gap);
    if (!out.outcome.best_trial || out.rows[t].gap > out.outcome.best_value) {
      out.outcome.best_value = out.rows[t].gap;
      out.outcome.best_trial = t;
    }
  }
  if (out.outcome.best_trial) {
    const std::size_t t = *out.outcome.best_trial;
    out.outcome.best_instance = ensembles[t];
    // Rerun the optimizer for the winning trial to recover its unitaries.
    Rng rng({seed, t});
    (void)random_ensemble(3, d, StateModel::hilbert_schmidt, rng);
    out.outcome.best_unitaries = minimize_correlation_entropy(*ensembles[t], rng, options).unitaries;
  }
  summarize(out.outcome);
  return out;
}

std::string_view to_string(NonPsdKind kind) { return kind == NonPsdKind::E_half ? "E_half" : "C_F"; }

double nonpsd_min_eigenvalue(std::span<const DensityMatrix> states, NonPsdKind kind) {
  const RealMatrix rf = root_fidelity_table(states);
  const RealMatrix m = kind == NonPsdKind::E_half ? rf : RealMatrix(rf.array().square().matrix());
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

SearchOutcome search_nonpsd(Index K, Index d, NonPsdKind kind, std::size_t trials, std::uint64_t seed,
                            StateModel model) {
  if (K < 2) throw Error(ErrorCode::InvalidArgument, "need K >= 2");
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "dimension must be positive");
  SearchOutcome out;
  out.objective = "min eigenvalue of " + std::string(to_string(kind));
  out.best_value = std::numeric_limits<double>::infinity();
  out.seed = seed;
  out.K = K;
  out.d = d;
  out.values.resize(trials);
  parallel_for(trials, [&](std::size_t t) {
    Rng rng({seed, t});
    std::vector<DensityMatrix> states;
    for (Index i = 0; i < K; ++i) {
      states.push_back(model == StateModel::pure ? random_pure_state(d, rng) : random_hs_state(d, rng));
    }
    out.values[t] = nonpsd_min_eigenvalue(states, kind);
  });
  out.trials_run = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    if (!out.best_trial || out.values[t] < out.best_value) {
      out.best_value = out.values[t];
      out.best_trial = t;
    }
  }
  if (out.best_trial) {
    Rng rng({seed, *out.best_trial});
    std::vector<DensityMatrix> states;
    for (Index i = 0; i < K; ++i) {
      states.push_back(model == StateModel::pure ? random_pure_state(d, rng) : random_hs_state(d, rng));
    }
    out.best_instance = Ensemble::uniform(std::move(states), {seed, kGeneratorName});
  }
  summarize(out);
  return out;
}

nlohmann::json search_outcome_to_json(const SearchOutcome& s) {
  nlohmann::json j;
  j["objective"] = s.objective;
  j["K"] = s.K;
  j["d"] = s.d;
  j["trials_run"] = s.trials_run;
  j["seed_ledger"] = {{"seed", s.seed}, {"generator", kGeneratorName}, {"stream_index", "trial"}};
  if (s.best_trial) {
    j["best_value"] = s.best_value;
    j["best_trial"] = *s.best_trial;
  } else {
    j["best_value"] = nullptr;
  }
  if (s.best_instance) j["best_instance"] = ensemble_to_json(*s.best_instance);
  if (s.best_unitaries) {
    auto arr = nlohmann::json::array();
    for (const auto& u : s.best_unitaries->unitaries()) arr.push_back(matrix_to_json(u));
    j["best_unitaries"] = arr;
  }
  if (!s.values.empty()) {
    j["summary"] = {{"min", s.summary.min},
                    {"mean", s.summary.mean},
                    {"negative_fraction", s.summary.negative_fraction}};
  }
  return j;
}

std::vector<DensityMatrix> HadamardStates::states() const {
  std::vector<DensityMatrix> out;
  out.reserve(vectors.size());
  for (const auto& v : vectors) out.push_back(DensityMatrix::pure(v));
  return out;
}

HadamardStates hadamard_construction(Index n) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "need n >= 2");
  HadamardStates h;
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  for (Index k = 0; k < n; ++k) {
    h.vectors.push_back(ComplexVector::Unit(n, k));
    h.signs.push_back(-1);
    ComplexVector f(n);
    for (Index j = 0; j < n; ++j) {
      f(j) = norm * std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j * k) / static_cast<double>(n));
    }
    h.vectors.push_back(std::move(f));
    h.signs.push_back(1);
  }
  for (std::size_t i = 0; i < h.vectors.size(); ++i) {
    for (std::size_t j = i + 1; j < h.vectors.size(); ++j) {
      const double ov = std::abs(h.vectors[i].dot(h.vectors[j]));
      const double expected = h.signs[i] == h.signs[j] ? 0.0 : norm;
      if (std::abs(ov - expected) > 1e-10) {
        throw Error(ErrorCode::InvariantViolation, "Fourier construction lost its overlap pattern");
      }
    }
  }
  return h;
}

double hadamard_quadratic_form(Index n, double alpha) {
  if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha must be positive");
  const auto h = hadamard_construction(n);
  const std::size_t m = h.vectors.size();
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double ov = i == j ? 1.0 : std::abs(h.vectors[i].dot(h.vectors[j]));
      if (ov < 1e-12) ov = 0.0;
      // F = |<phi_i|phi_j>|^2, so F^alpha = |<phi_i|phi_j>|^(2 alpha).
      total += h.signs[i] * h.signs[j] * std::pow(ov, 2.0 * alpha);
    }
  }
  return total;
}

double hadamard_quadratic_form_closed(Index n, double alpha) {
  const double nn = static_cast<double>(n);
  return 2.0 * nn - 2.0 * nn * nn * std::pow(nn, -alpha);
}

}  // namespace fidmat
