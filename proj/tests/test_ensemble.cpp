#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "support.hpp"

using namespace fidmat;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("density matrices validate trace and positivity") {
  RealMatrix bad_trace = RealMatrix::Identity(2, 2);
  CHECK(code_of([&] { DensityMatrix{HermitianMatrix(bad_trace)}; }) == ErrorCode::InvariantViolation);
  RealMatrix not_psd(2, 2);
  not_psd << 1.5, 0.0, 0.0, -0.5;
  CHECK(code_of([&] { DensityMatrix{HermitianMatrix(not_psd)}; }) == ErrorCode::NotPSD);

  const auto mm = DensityMatrix::maximally_mixed(4);
  CHECK(mm.purity() == doctest::Approx(0.25));
  CHECK(mm.is_faithful());
  CHECK_FALSE(mm.is_pure());
}

TEST_CASE("pure states normalize and expose their vector") {
  ComplexVector phi(3);
  phi << 1.0, Complex(0.0, 2.0), 2.0;
  const auto rho = DensityMatrix::pure(phi);
  CHECK(rho.is_pure());
  CHECK_FALSE(rho.is_faithful());
  const ComplexVector v = rho.dominant_vector();
  CHECK(std::abs(std::abs(v.dot(phi / phi.norm())) - 1.0) < 1e-12);
  CHECK_THROWS_AS(DensityMatrix::pure(ComplexVector::Zero(2)), Error);
}

TEST_CASE("ensemble invariants") {
  const auto a = DensityMatrix::maximally_mixed(2);
  const auto b = DensityMatrix::pure(support::basis(2, 0));
  CHECK(code_of([&] { Ensemble({0.5, 0.6}, {a, b}); }) == ErrorCode::InvariantViolation);
  CHECK(code_of([&] { Ensemble({1.2, -0.2}, {a, b}); }) == ErrorCode::InvariantViolation);
  CHECK(code_of([&] { Ensemble({1.0}, {a, b}); }) == ErrorCode::InvariantViolation);
  CHECK(code_of([&] { Ensemble({}, {}); }) == ErrorCode::InvariantViolation);
  CHECK(code_of([&] { Ensemble({0.5, 0.5}, {a, DensityMatrix::maximally_mixed(3)}); }) ==
        ErrorCode::InvariantViolation);

  const Ensemble e({0.25, 0.75}, {a, b});
  CHECK(e.K() == 2);
  CHECK(e.dim() == 2);
  CHECK(e.average_state().trace() == doctest::Approx(1.0));
  CHECK(e.average_state()(0, 0).real() == doctest::Approx(0.25 * 0.5 + 0.75));
}

TEST_CASE("pairs renormalize and reject zero weight") {
  const auto s = DensityMatrix::maximally_mixed(2);
  const Ensemble e({0.2, 0.0, 0.0, 0.8}, {s, s, s, s});
  const auto p = e.pair(0, 3);
  CHECK(p.weight(0) == doctest::Approx(0.2));
  CHECK(p.weight(1) == doctest::Approx(0.8));
  CHECK(code_of([&] { e.pair(1, 2); }) == ErrorCode::ZeroPairWeight);
}

TEST_CASE("permutation reorders weights and states together") {
  const auto e = support::orthogonal_pure({0.5, 0.3, 0.2});
  const std::vector<std::size_t> order{2, 0, 1};
  const auto p = e.permuted(order);
  CHECK(p.weight(0) == 0.2);
  CHECK(p.state(0).matrix()(2, 2).real() == doctest::Approx(1.0));
  CHECK(p.content_hash() != e.content_hash());
  CHECK(e.permuted(std::vector<std::size_t>{0, 1, 2}).content_hash() == e.content_hash());
}

TEST_CASE("equal streams draw equal numbers, different streams differ") {
  Rng a({42, 7});
  Rng b({42, 7});
  Rng c({42, 8});
  Rng d({43, 7});
  const double x = a.normal();
  CHECK(x == b.normal());
  CHECK(x != c.normal());
  CHECK(x != d.normal());
}

TEST_CASE("random states satisfy their invariants") {
  Rng rng({1, 0});
  for (Index d : {2, 3, 5, 7}) {
    const auto rho = random_hs_state(d, rng);
    CHECK(rho.hermitian().trace() == doctest::Approx(1.0));
    CHECK(rho.hermitian().min_eigenvalue() >= 0.0);
    CHECK(random_pure_state(d, rng).is_pure(1e-12));
    CHECK(is_unitary(random_unitary(d, rng), 1e-12));
  }
  const auto w = random_simplex_weights(6, rng);
  double total = 0.0;
  for (double p : w) {
    CHECK(p >= 0.0);
    total += p;
  }
  CHECK(std::abs(total - 1.0) < 1e-15);
}

TEST_CASE("Hilbert-Schmidt purity matches its mean") {
  for (Index d : {2, 3, 5}) {
    Rng rng({11, static_cast<std::uint64_t>(d)});
    const int n = 20000;
    double sum = 0.0;
    double sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double p = random_hs_state(d, rng).purity();
      sum += p;
      sum2 += p * p;
    }
    const double mean = sum / n;
    const double sem = std::sqrt((sum2 / n - mean * mean) / n);
    CHECK(std::abs(mean - oracle::hs_mean_purity(d)) < 5.0 * sem);
  }
}

TEST_CASE("Haar unitaries have the Haar trace moment") {
  // E |tr U|^2 = 1 under Haar measure in any dimension.
  Rng rng({12, 0});
  const int n = 20000;
  double acc = 0.0;
  double acc2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = std::norm(random_unitary(3, rng).trace());
    acc += t;
    acc2 += t * t;
  }
  const double mean = acc / n;
  const double sem = std::sqrt((acc2 / n - mean * mean) / n);
  CHECK(std::abs(mean - 1.0) < 5.0 * sem);
}

TEST_CASE("ensembles round-trip through JSON exactly") {
  Rng rng({2, 0});
  const auto e = random_ensemble(4, 3, StateModel::hilbert_schmidt, rng, {2, kGeneratorName});
  const auto path = std::filesystem::temp_directory_path() / "fidmat_roundtrip.json";
  save_ensemble(e, path);
  const auto back = load_ensemble(path);
  CHECK(back.content_hash() == e.content_hash());
  CHECK(back.meta().seed == 2);
  CHECK(back.meta().generator == kGeneratorName);
  std::filesystem::remove(path);
}

TEST_CASE("malformed ensemble files name the offending field") {
  nlohmann::json j = ensemble_to_json(support::orthogonal_pure({0.5, 0.5}));
  j["states"][1][0][1] = "x";
  try {
    ensemble_from_json(j);
    FAIL("should throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(std::string(e.what()).find("states[1][0][1]") != std::string::npos);
  }

  nlohmann::json missing = ensemble_to_json(support::orthogonal_pure({0.5, 0.5}));
  missing.erase("weights");
  CHECK(code_of([&] { ensemble_from_json(missing); }) == ErrorCode::ParseError);

  nlohmann::json bad_state = ensemble_to_json(support::orthogonal_pure({0.5, 0.5}));
  bad_state["states"][0][0][0] = nlohmann::json::array({2.0, 0.0});
  CHECK(code_of([&] { ensemble_from_json(bad_state); }) == ErrorCode::InvariantViolation);

  const auto path = std::filesystem::temp_directory_path() / "fidmat_garbage.json";
  std::ofstream(path) << "{ not json";
  CHECK(code_of([&] { load_ensemble(path); }) == ErrorCode::ParseError);
  std::filesystem::remove(path);
}
