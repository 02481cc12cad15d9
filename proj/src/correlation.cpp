#include "fidmat/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "fidmat/fidelity.hpp"

namespace fidmat {

namespace {

constexpr double kPhaseFloor = 1e-12;

std::string provenance(MatrixKind kind, const Ensemble& e, const std::string& params = {}) {
  std::string s(to_string(kind));
  if (!params.empty()) s += "(" + params + ")";
  return s + "@" + e.content_hash();
}

std::string format_param(const char* name, double v) {
  std::ostringstream os;
  os << name << "=" << v;
  return os.str();
}

RealMatrix weighted(const Ensemble& e, const RealMatrix& unweighted) {
  RealMatrix m = unweighted;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) m(i, j) *= std::sqrt(e.weight(i) * e.weight(j));
  }
  return m;
}

}  // namespace

std::string_view to_string(MatrixKind kind) {
  switch (kind) {
    case MatrixKind::gram: return "gram";
    case MatrixKind::root_fidelity: return "root_fidelity";
    case MatrixKind::fidelity_power: return "fidelity_power";
    case MatrixKind::masked: return "masked";
    case MatrixKind::squared_fidelity: return "squared_fidelity";
    case MatrixKind::multistate: return "multistate";
    case MatrixKind::pure_gram: return "pure_gram";
    case MatrixKind::pure_hadamard_square: return "pure_hadamard_square";
  }
  return "unknown";
}

Ordering::Ordering(std::vector<std::size_t> perm) : perm_(std::move(perm)) {
  std::vector<bool> seen(perm_.size(), false);
  for (std::size_t v : perm_) {
    if (v >= perm_.size() || seen[v]) throw Error(ErrorCode::InvalidArgument, "ordering is not a permutation");
    seen[v] = true;
  }
}

Ordering Ordering::identity(std::size_t K) {
  std::vector<std::size_t> p(K);
  std::iota(p.begin(), p.end(), std::size_t{0});
  return Ordering(std::move(p));
}

std::string to_string(const Ordering& o) {
  std::string s;
  for (std::size_t i = 0; i < o.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(o[i]);
  }
  return s;
}

UnitaryTuple::UnitaryTuple(std::vector<ComplexMatrix> unitaries, double tolerance) : u_(std::move(unitaries)) {
  if (u_.empty()) throw Error(ErrorCode::InvalidArgument, "unitary tuple needs K >= 1");
  for (const auto& u : u_) {
    if (u.rows() != u_.front().rows()) throw Error(ErrorCode::DimensionMismatch, "unitaries differ in size");
    if (!is_unitary(u, tolerance)) throw Error(ErrorCode::InvalidArgument, "matrix is not unitary");
  }
}

UnitaryTuple UnitaryTuple::identity(Index K, Index d) {
  return UnitaryTuple(std::vector<ComplexMatrix>(static_cast<std::size_t>(K), ComplexMatrix::Identity(d, d)));
}

bool UnitaryTuple::is_gauge_fixed(double tolerance) const {
  return max_abs(u_.front() - ComplexMatrix::Identity(dim(), dim())) <= tolerance;
}

UnitaryTuple UnitaryTuple::gauge_fixed() const {
  return left_multiplied(u_.front().adjoint());
}

UnitaryTuple UnitaryTuple::left_multiplied(const ComplexMatrix& v) const {
  std::vector<ComplexMatrix> out;
  out.reserve(u_.size());
  for (const auto& u : u_) out.push_back(v * u);
  return UnitaryTuple(std::move(out), 1e-8);
}

nlohmann::json correlation_to_json(const CorrelationMatrix& c) {
  nlohmann::json j;
  j["kind"] = std::string(to_string(c.kind));
  j["K"] = c.K();
  j["matrix"] = matrix_to_json(c.matrix.matrix());
  j["provenance"] = c.provenance;
  if (c.kind == MatrixKind::fidelity_power || c.kind == MatrixKind::masked) j["parameter"] = c.parameter;
  if (c.ordering) j["ordering"] = std::vector<std::size_t>(c.ordering->indices().begin(), c.ordering->indices().end());
  return j;
}

ComplexMatrix correlation_entries(std::span<const double> weights, std::span<const ComplexMatrix> sqrt_states,
                                  std::span<const ComplexMatrix> unitaries) {
  const auto K = static_cast<Index>(weights.size());
  if (sqrt_states.size() != weights.size() || unitaries.size() != weights.size()) {
    throw Error(ErrorCode::DimensionMismatch, "need one state and one unitary per weight");
  }
  std::vector<ComplexMatrix> w(weights.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (unitaries[i].rows() != sqrt_states[i].rows()) {
      throw Error(ErrorCode::DimensionMismatch, "unitary size differs from state dimension");
    }
    w[i] = unitaries[i] * sqrt_states[i];
  }
  ComplexMatrix c(K, K);
  for (Index i = 0; i < K; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    c(i, i) = weights[ui] * w[ui].squaredNorm();
    for (Index j = i + 1; j < K; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      // tr(W_j^dagger W_i)
      const Complex t = (w[uj].conjugate().cwiseProduct(w[ui])).sum();
      c(i, j) = std::sqrt(weights[ui] * weights[uj]) * t;
      c(j, i) = std::conj(c(i, j));
    }
  }
  return c;
}

CorrelationMatrix gram_correlation(const Ensemble& e, const UnitaryTuple& u) {
  if (u.K() != e.K() || u.dim() != e.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "unitary tuple does not match the ensemble");
  }
  if (!u.is_gauge_fixed()) throw Error(ErrorCode::GaugeViolation, "first unitary must be the identity");
  std::vector<ComplexMatrix> roots;
  for (const auto& s : e.states()) roots.push_back(psd_sqrt(s.hermitian()).matrix());
  auto m = HermitianMatrix::symmetrized(correlation_entries(e.weights(), roots, u.unitaries()));
  return {MatrixKind::gram, std::move(m), provenance(MatrixKind::gram, e)};
}

CorrelationMatrix root_fidelity_matrix(const Ensemble& e) {
  const RealMatrix m = weighted(e, root_fidelity_table(e.states()));
  return {MatrixKind::root_fidelity, HermitianMatrix(m), provenance(MatrixKind::root_fidelity, e)};
}

CorrelationMatrix fidelity_power_matrix(std::span<const DensityMatrix> states, double alpha) {
  if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha must be positive");
  if (states.empty()) throw Error(ErrorCode::InvalidArgument, "need at least one state");
  const RealMatrix m = root_fidelity_table(states).array().pow(2.0 * alpha).matrix();
  // Provenance hashes the states under uniform weights.
  std::vector<DensityMatrix> copy(states.begin(), states.end());
  const auto e = Ensemble::uniform(std::move(copy));
  CorrelationMatrix c{MatrixKind::fidelity_power, HermitianMatrix(m),
                      provenance(MatrixKind::fidelity_power, e, format_param("alpha", alpha))};
  c.parameter = alpha;
  return c;
}

CorrelationMatrix masked_matrix(const Ensemble& e, double b) {
  if (!(b >= 0.0 && b <= 1.0)) throw Error(ErrorCode::BOutOfRange, "mask parameter b must lie in [0, 1]");
  RealMatrix m = root_fidelity_table(e.states());
  m *= b;
  m.diagonal().setOnes();
  CorrelationMatrix c{MatrixKind::masked, HermitianMatrix(weighted(e, m)),
                      provenance(MatrixKind::masked, e, format_param("b", b))};
  c.parameter = b;
  return c;
}

CorrelationMatrix squared_fidelity_matrix(const Ensemble& e) {
  const RealMatrix m = weighted(e, root_fidelity_table(e.states()).array().square().matrix());
  return {MatrixKind::squared_fidelity, HermitianMatrix(m), provenance(MatrixKind::squared_fidelity, e)};
}

namespace {

ComplexMatrix sigma_pure(const Ensemble& e) {
  const Index K = e.K();
  std::vector<ComplexVector> phi;
  for (const auto& s : e.states()) phi.push_back(s.dominant_vector());
  // e^{-i alpha_{k,k+1}} = conj(<phi_k|phi_{k+1}>) / |<phi_k|phi_{k+1}>|; 1 for orthogonal neighbours.
  std::vector<Complex> link(static_cast<std::size_t>(K), Complex(1.0));
  for (Index k = 0; k + 1 < K; ++k) {
    const Complex ov = phi[static_cast<std::size_t>(k)].dot(phi[static_cast<std::size_t>(k + 1)]);
    if (std::abs(ov) > kPhaseFloor) link[static_cast<std::size_t>(k)] = std::conj(ov) / std::abs(ov);
  }
  ComplexMatrix sigma(K, K);
  for (Index i = 0; i < K; ++i) {
    sigma(i, i) = e.weight(i);
    Complex phase(1.0);
    for (Index j = i + 1; j < K; ++j) {
      phase *= link[static_cast<std::size_t>(j - 1)];
      const Complex ov = phi[static_cast<std::size_t>(i)].dot(phi[static_cast<std::size_t>(j)]);
      sigma(i, j) = std::sqrt(e.weight(i) * e.weight(j)) * ov * phase;
      sigma(j, i) = std::conj(sigma(i, j));
    }
  }
  return sigma;
}

ComplexMatrix sigma_faithful(const Ensemble& e) {
  const Index K = e.K();
  std::vector<ComplexMatrix> link;  // link[k] = sqrt(rho_{k+1} rho_k)
  std::vector<ComplexMatrix> inverse;
  for (Index k = 0; k < K; ++k) {
    inverse.push_back(pd_inverse(e.state(k).hermitian(), kFaithfulTol).matrix());
    if (k + 1 < K) link.push_back(sqrt_product(e.state(k + 1).hermitian(), e.state(k).hermitian()));
  }
  ComplexMatrix sigma(K, K);
  for (Index i = 0; i < K; ++i) {
    sigma(i, i) = e.weight(i);
    ComplexMatrix chain;
    for (Index j = i + 1; j < K; ++j) {
      const auto& l = link[static_cast<std::size_t>(j - 1)];
      chain = (j == i + 1) ? l : ComplexMatrix(l * inverse[static_cast<std::size_t>(j - 1)] * chain);
      sigma(i, j) = std::sqrt(e.weight(i) * e.weight(j)) * chain.trace();
      sigma(j, i) = std::conj(sigma(i, j));
    }
  }
  return sigma;
}

}  // namespace

CorrelationMatrix multistate_sigma(const Ensemble& e, const Ordering& ordering) {
  if (e.K() < 2) throw Error(ErrorCode::InvalidArgument, "multi-state sigma needs K >= 2");
  if (static_cast<Index>(ordering.size()) != e.K()) {
    throw Error(ErrorCode::DimensionMismatch, "ordering length differs from K");
  }
  const Ensemble ordered = e.permuted(ordering.indices());
  ComplexMatrix sigma;
  if (ordered.all_faithful()) {
    sigma = sigma_faithful(ordered);
  } else if (ordered.all_pure()) {
    sigma = sigma_pure(ordered);
  } else {
    throw Error(ErrorCode::NotFaithful, "multi-state sigma needs all states faithful or all pure");
  }
  CorrelationMatrix c{MatrixKind::multistate, HermitianMatrix::symmetrized(sigma),
                      provenance(MatrixKind::multistate, e, "order=" + to_string(ordering))};
  c.ordering = ordering;
  return c;
}

OrderedEntropy sigma_min_entropy(const Ensemble& e, double log_base) {
  if (e.K() > 8) throw Error(ErrorCode::TooManyStates, "exhaustive ordering search is limited to K <= 8");
  std::vector<std::size_t> perm(static_cast<std::size_t>(e.K()));
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::optional<OrderedEntropy> best;
  do {
    Ordering o(perm);
    const double s = multistate_sigma(e, o).entropy(log_base);
    if (!best || s < best->entropy) best = OrderedEntropy{std::move(o), s};
  } while (std::next_permutation(perm.begin(), perm.end()));
  return *best;
}

HermitianMatrix witness_omega(const Ensemble& e) {
  const Index K = e.K();
  const Index d = e.dim();
  if (K == 1) return HermitianMatrix::symmetrized(e.weight(0) * e.state(0).matrix());
  const Index pairs = K * (K - 1) / 2;
  ComplexMatrix omega = ComplexMatrix::Zero(pairs * 2 * d, pairs * 2 * d);
  Index offset = 0;
  for (Index i = 0; i < K; ++i) {
    for (Index j = i + 1; j < K; ++j) {
      ComplexMatrix z;
      try {
        z = sqrt_product(e.state(i).hermitian(), e.state(j).hermitian());
      } catch (const Error& err) {
        if (err.code() != ErrorCode::SingularFallbackFailure) throw;
        throw Error(ErrorCode::NotFaithful, std::string("witness block: ") + err.what());
      }
      z *= std::sqrt(e.weight(i) * e.weight(j));
      auto block = omega.block(offset, offset, 2 * d, 2 * d);
      block.topLeftCorner(d, d) = 0.5 * e.weight(i) * e.state(i).matrix();
      block.bottomRightCorner(d, d) = 0.5 * e.weight(j) * e.state(j).matrix();
      block.topRightCorner(d, d) = 0.5 * z;
      block.bottomLeftCorner(d, d) = 0.5 * z.adjoint();
      offset += 2 * d;
    }
  }
  return HermitianMatrix::symmetrized(omega);
}

HermitianMatrix omega_reduced(const Ensemble& e) {
  const Index K = e.K();
  ComplexMatrix m(K, K);
  for (Index i = 0; i < K; ++i) {
    m(i, i) = e.weight(i) * e.state(i).matrix().trace();
    for (Index j = i + 1; j < K; ++j) {
      const Complex t = sqrt_product(e.state(i).hermitian(), e.state(j).hermitian()).trace();
      m(i, j) = 0.5 * std::sqrt(e.weight(i) * e.weight(j)) * t;
      m(j, i) = std::conj(m(i, j));
    }
  }
  return HermitianMatrix::symmetrized(m);
}

QubitWitness qubit_witness_W(const Ensemble& e) {
  if (e.dim() != 2) throw Error(ErrorCode::NotQubit, "the qubit witness needs d = 2");
  const Index K = e.K();
  // Rows of R are sqrt(p_i) [rho_i, sqrt(det rho_i) I]; W = R R^dagger.
  ComplexMatrix r = ComplexMatrix::Zero(2 * K, 4);
  for (Index i = 0; i < K; ++i) {
    const auto& rho = e.state(i).matrix();
    const double det = std::max(0.0, rho.determinant().real());
    const double sp = std::sqrt(e.weight(i));
    r.block(2 * i, 0, 2, 2) = sp * rho;
    r.block(2 * i, 2, 2, 2) = sp * std::sqrt(det) * ComplexMatrix::Identity(2, 2);
  }
  const ComplexMatrix w = r * r.adjoint();
  ComplexMatrix contracted(K, K);
  for (Index i = 0; i < K; ++i) {
    for (Index j = 0; j < K; ++j) contracted(i, j) = w.block(2 * i, 2 * j, 2, 2).trace();
  }
  return {HermitianMatrix::symmetrized(w), HermitianMatrix::symmetrized(contracted)};
}

PureGramPair pure_gram_pair(const Ensemble& e) {
  if (!e.all_pure()) throw Error(ErrorCode::NotPure, "pure_gram_pair needs pure states");
  const Index K = e.K();
  std::vector<ComplexVector> phi;
  for (const auto& s : e.states()) phi.push_back(s.dominant_vector());
  ComplexMatrix g(K, K);
  for (Index i = 0; i < K; ++i) {
    for (Index j = 0; j < K; ++j) {
      g(i, j) = std::pow(e.weight(i) * e.weight(j), 0.25) *
                phi[static_cast<std::size_t>(i)].dot(phi[static_cast<std::size_t>(j)]);
    }
  }
  const ComplexMatrix h = g.cwiseProduct(g.conjugate());
  return {{MatrixKind::pure_gram, HermitianMatrix::symmetrized(g), provenance(MatrixKind::pure_gram, e)},
          {MatrixKind::pure_hadamard_square, HermitianMatrix::symmetrized(h),
           provenance(MatrixKind::pure_hadamard_square, e)}};
}

bool inertia_congruence_check(const Ensemble& e, double zero_tol) {
  for (double p : e.weights()) {
    if (!(p > 0.0)) throw Error(ErrorCode::ZeroWeight, "congruence needs every p_i > 0");
  }
  const auto weighted_matrix = root_fidelity_matrix(e);
  const auto unweighted = fidelity_power_matrix(e.states(), 0.5);
  return spectral_report(weighted_matrix.matrix, zero_tol).inertia ==
         spectral_report(unweighted.matrix, zero_tol).inertia;
}

}  // namespace fidmat
