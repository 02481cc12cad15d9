#include "fidmat/ensemble.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace fidmat {

namespace {

constexpr double kTraceTol = 1e-10;
constexpr double kWeightSumTol = 1e-10;

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void fnv1a(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
}

}  // namespace

DensityMatrix::DensityMatrix(HermitianMatrix m) : m_(std::move(m)) {
  if (m_.dim() < 1) throw Error(ErrorCode::InvariantViolation, "density matrix must have dim >= 1");
  if (m_.min_eigenvalue() < -tol::kPsd) {
    std::ostringstream os;
    os << "density matrix has eigenvalue " << m_.min_eigenvalue();
    throw Error(ErrorCode::NotPSD, os.str());
  }
  if (std::abs(m_.trace() - 1.0) > kTraceTol) {
    std::ostringstream os;
    os << "density matrix trace " << std::setprecision(17) << m_.trace() << " != 1";
    throw Error(ErrorCode::InvariantViolation, os.str());
  }
}

DensityMatrix DensityMatrix::pure(const ComplexVector& phi) {
  const double n2 = phi.squaredNorm();
  if (!(n2 > 0.0)) throw Error(ErrorCode::InvalidArgument, "pure state from a zero vector");
  return DensityMatrix(HermitianMatrix::symmetrized(phi * phi.adjoint() / n2));
}

DensityMatrix DensityMatrix::maximally_mixed(Index d) {
  return DensityMatrix(HermitianMatrix::diagonal(RealVector::Constant(d, 1.0 / static_cast<double>(d))));
}

double DensityMatrix::purity() const { return (matrix() * matrix()).trace().real(); }

ComplexVector DensityMatrix::dominant_vector() const { return m_.eigenvectors().col(dim() - 1); }

HermitianMatrix mix(std::span<const double> w, std::span<const DensityMatrix> states) {
  if (w.size() != states.size() || states.empty()) {
    throw Error(ErrorCode::DimensionMismatch, "mix needs one weight per state");
  }
  const Index d = states.front().dim();
  ComplexMatrix acc = ComplexMatrix::Zero(d, d);
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (states[i].dim() != d) throw Error(ErrorCode::DimensionMismatch, "mixed states differ in dimension");
    acc += w[i] * states[i].matrix();
  }
  return HermitianMatrix::symmetrized(acc);
}

Ensemble::Ensemble(std::vector<double> weights, std::vector<DensityMatrix> states, EnsembleMeta meta)
    : weights_(std::move(weights)), states_(std::move(states)), meta_(std::move(meta)) {
  if (states_.empty()) throw Error(ErrorCode::InvariantViolation, "ensemble needs K >= 1");
  if (weights_.size() != states_.size()) {
    throw Error(ErrorCode::InvariantViolation, "ensemble needs one weight per state");
  }
  for (double p : weights_) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorCode::InvariantViolation, "ensemble weight outside [0, 1]");
    }
  }
  const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  if (std::abs(total - 1.0) > kWeightSumTol) {
    std::ostringstream os;
    os << "ensemble weights sum to " << std::setprecision(17) << total;
    throw Error(ErrorCode::InvariantViolation, os.str());
  }
  for (const auto& s : states_) {
    if (s.dim() != states_.front().dim()) {
      throw Error(ErrorCode::InvariantViolation, "ensemble states differ in dimension");
    }
  }
}

Ensemble Ensemble::uniform(std::vector<DensityMatrix> states, EnsembleMeta meta) {
  std::vector<double> w(states.size(), 1.0 / static_cast<double>(states.size()));
  return Ensemble(std::move(w), std::move(states), std::move(meta));
}

HermitianMatrix Ensemble::average_state() const { return mix(weights_, states_); }

Ensemble Ensemble::permuted(std::span<const std::size_t> order) const {
  if (order.size() != states_.size()) throw Error(ErrorCode::DimensionMismatch, "ordering has wrong length");
  std::vector<double> w;
  std::vector<DensityMatrix> s;
  w.reserve(order.size());
  s.reserve(order.size());
  for (std::size_t idx : order) {
    w.push_back(weights_.at(idx));
    s.push_back(states_.at(idx));
  }
  return Ensemble(std::move(w), std::move(s), meta_);
}

Ensemble Ensemble::pair(Index i, Index j) const {
  const double total = weight(i) + weight(j);
  if (!(total > 0.0)) throw Error(ErrorCode::ZeroPairWeight, "pair weight p_i + p_j is zero");
  const double wi = weight(i) / total;
  return Ensemble({wi, 1.0 - wi}, {state(i), state(j)}, meta_);
}

bool Ensemble::all_pure(double tolerance) const {
  return std::all_of(states_.begin(), states_.end(), [&](const auto& s) { return s.is_pure(tolerance); });
}

bool Ensemble::all_faithful(double threshold) const {
  return std::all_of(states_.begin(), states_.end(), [&](const auto& s) { return s.is_faithful(threshold); });
}

std::string Ensemble::content_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double p : weights_) fnv1a(h, &p, sizeof p);
  for (const auto& s : states_) {
    const auto& m = s.matrix();
    for (Index c = 0; c < m.cols(); ++c) {
      for (Index r = 0; r < m.rows(); ++r) {
        const double re = m(r, c).real();
        const double im = m(r, c).imag();
        fnv1a(h, &re, sizeof re);
        fnv1a(h, &im, sizeof im);
      }
    }
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

Rng::Rng(RngStream stream) {
  std::uint64_t state = stream.seed;
  const std::uint64_t a = splitmix64(state);
  state ^= stream.stream_index * 0xd1b54a32d192ed03ULL;
  const std::uint64_t b = splitmix64(state);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                    static_cast<std::uint32_t>(stream.stream_index),
                    static_cast<std::uint32_t>(stream.stream_index >> 32)};
  engine_.seed(seq);
}

ComplexMatrix ginibre(Index d, Rng& rng) {
  ComplexMatrix g(d, d);
  for (Index c = 0; c < d; ++c) {
    for (Index r = 0; r < d; ++r) g(r, c) = rng.complex_normal();
  }
  return g;
}

DensityMatrix random_hs_state(Index d, Rng& rng) {
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "dimension must be >= 1");
  const ComplexMatrix g = ginibre(d, rng);
  const ComplexMatrix gg = g * g.adjoint();
  return DensityMatrix(HermitianMatrix::symmetrized(gg / gg.trace().real()));
}

DensityMatrix random_pure_state(Index d, Rng& rng) {
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "dimension must be >= 1");
  ComplexVector phi(d);
  for (Index i = 0; i < d; ++i) phi(i) = rng.complex_normal();
  return DensityMatrix::pure(phi);
}

ComplexMatrix random_unitary(Index d, Rng& rng) {
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "dimension must be >= 1");
  const ComplexMatrix g = ginibre(d, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index i = 0; i < d; ++i) {
    const Complex rii = r(i, i);
    const double mag = std::abs(rii);
    q.col(i) *= mag > 0.0 ? rii / mag : Complex(1.0);
  }
  return q;
}

std::vector<double> random_simplex_weights(Index K, Rng& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(static_cast<std::size_t>(K));
  double total = 0.0;
  for (auto& x : w) {
    x = expo(rng.engine());
    total += x;
  }
  for (auto& x : w) x /= total;
  // Keep the sum within roundoff of one for the validating constructor.
  double s = std::accumulate(w.begin(), w.end() - 1, 0.0);
  w.back() = std::max(0.0, 1.0 - s);
  return w;
}

Ensemble random_ensemble(Index K, Index d, StateModel model, Rng& rng, EnsembleMeta meta) {
  std::vector<DensityMatrix> states;
  states.reserve(static_cast<std::size_t>(K));
  for (Index i = 0; i < K; ++i) {
    states.push_back(model == StateModel::pure ? random_pure_state(d, rng) : random_hs_state(d, rng));
  }
  auto w = random_simplex_weights(K, rng);
  if (meta.generator.empty()) meta.generator = kGeneratorName;
  return Ensemble(std::move(w), std::move(states), std::move(meta));
}

nlohmann::json matrix_to_json(const ComplexMatrix& m) {
  auto rows = nlohmann::json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    auto row = nlohmann::json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix matrix_from_json(const nlohmann::json& j, const std::string& context) {
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::ParseError, context + ": expected a non-empty row array");
  const auto n_rows = static_cast<Index>(j.size());
  const auto n_cols = static_cast<Index>(j[0].is_array() ? j[0].size() : 0);
  ComplexMatrix m(n_rows, n_cols);
  for (Index r = 0; r < n_rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    const std::string row_ctx = context + "[" + std::to_string(r) + "]";
    if (!row.is_array() || static_cast<Index>(row.size()) != n_cols) {
      throw Error(ErrorCode::ParseError, row_ctx + ": ragged or non-array row");
    }
    for (Index c = 0; c < n_cols; ++c) {
      const auto& entry = row[static_cast<std::size_t>(c)];
      const std::string ctx = row_ctx + "[" + std::to_string(c) + "]";
      if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() || !entry[1].is_number()) {
        throw Error(ErrorCode::ParseError, ctx + ": expected [re, im]");
      }
      m(r, c) = Complex(entry[0].get<double>(), entry[1].get<double>());
    }
  }
  return m;
}

nlohmann::json ensemble_to_json(const Ensemble& e) {
  nlohmann::json j;
  j["dim"] = e.dim();
  j["K"] = e.K();
  j["weights"] = e.weights();
  auto states = nlohmann::json::array();
  for (const auto& s : e.states()) states.push_back(matrix_to_json(s.matrix()));
  j["states"] = std::move(states);
  j["meta"] = {{"seed", e.meta().seed}, {"generator", e.meta().generator}};
  return j;
}

Ensemble ensemble_from_json(const nlohmann::json& j) {
  const auto require = [&](const char* key) -> const nlohmann::json& {
    if (!j.contains(key)) throw Error(ErrorCode::ParseError, std::string("missing field '") + key + "'");
    return j.at(key);
  };
  const auto& jw = require("weights");
  const auto& js = require("states");
  if (!jw.is_array()) throw Error(ErrorCode::ParseError, "field 'weights' must be an array");
  if (!js.is_array()) throw Error(ErrorCode::ParseError, "field 'states' must be an array");
  std::vector<double> w;
  for (std::size_t i = 0; i < jw.size(); ++i) {
    if (!jw[i].is_number()) throw Error(ErrorCode::ParseError, "weights[" + std::to_string(i) + "]: not a number");
    w.push_back(jw[i].get<double>());
  }
  std::vector<DensityMatrix> states;
  for (std::size_t i = 0; i < js.size(); ++i) {
    const std::string ctx = "states[" + std::to_string(i) + "]";
    const ComplexMatrix m = matrix_from_json(js[i], ctx);
    try {
      states.emplace_back(HermitianMatrix(m));
    } catch (const Error& err) {
      throw Error(ErrorCode::InvariantViolation, ctx + ": " + err.what());
    }
  }
  if (j.contains("K") && j["K"].is_number_integer() && j["K"].get<std::size_t>() != states.size()) {
    throw Error(ErrorCode::InvariantViolation, "field 'K' disagrees with the number of states");
  }
  if (j.contains("dim") && j["dim"].is_number_integer() && !states.empty() &&
      j["dim"].get<Index>() != states.front().dim()) {
    throw Error(ErrorCode::InvariantViolation, "field 'dim' disagrees with the state size");
  }
  EnsembleMeta meta;
  if (j.contains("meta") && j["meta"].is_object()) {
    meta.seed = j["meta"].value("seed", std::uint64_t{0});
    meta.generator = j["meta"].value("generator", std::string{});
  }
  return Ensemble(std::move(w), std::move(states), std::move(meta));
}

void save_ensemble(const Ensemble& e, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  out << ensemble_to_json(e).dump(1) << '\n';
}

Ensemble load_ensemble(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& err) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + err.what());
  }
  return ensemble_from_json(j);
}

}  // namespace fidmat
