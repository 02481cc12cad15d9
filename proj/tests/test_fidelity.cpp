#include <doctest.h>

#include <cmath>

#include "fidmat/fidelity.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace fidmat;

namespace {

DensityMatrix half_mix(const DensityMatrix& a, const DensityMatrix& b) {
  const std::vector<double> w{0.5, 0.5};
  const std::vector<DensityMatrix> s{a, b};
  return DensityMatrix(mix(w, s));
}

DensityMatrix rotate(const ComplexMatrix& u, const DensityMatrix& a) {
  return DensityMatrix(HermitianMatrix::symmetrized(u * a.matrix() * u.adjoint()));
}

}  // namespace

TEST_CASE("fidelity of special pairs") {
  Rng rng({20, 0});
  const auto a = random_hs_state(3, rng);
  CHECK(fidelity(a, a).value() == doctest::Approx(1.0).epsilon(1e-12));
  const auto e0 = DensityMatrix::pure(support::basis(3, 0));
  const auto e1 = DensityMatrix::pure(support::basis(3, 1));
  CHECK(fidelity(e0, e1).value() == doctest::Approx(0.0));
  CHECK(root_fidelity(e0, e1) == doctest::Approx(0.0));
  CHECK(fidelity(e0, DensityMatrix::maximally_mixed(3)).value() == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK_THROWS_AS(fidelity(a, DensityMatrix::maximally_mixed(2)), Error);
}

TEST_CASE("pure-state fidelity is the squared overlap") {
  Rng rng({20, 1});
  for (Index d : {2, 3, 5}) {
    for (int t = 0; t < 50; ++t) {
      ComplexVector x(d);
      ComplexVector y(d);
      for (Index i = 0; i < d; ++i) {
        x(i) = rng.complex_normal();
        y(i) = rng.complex_normal();
      }
      x.normalize();
      y.normalize();
      const double expected = std::norm(x.dot(y));
      CHECK(std::abs(fidelity(DensityMatrix::pure(x), DensityMatrix::pure(y)).value() - expected) < 1e-9);
    }
  }
}

TEST_CASE("root fidelity matches the SVD trace norm and the product route") {
  Rng rng({20, 2});
  for (Index d : {2, 3, 5}) {
    for (int t = 0; t < 50; ++t) {
      const auto a = random_hs_state(d, rng);
      const auto b = random_hs_state(d, rng);
      const double rf = root_fidelity(a, b);
      CHECK(std::abs(rf - oracle::root_fidelity(a.matrix(), b.matrix())) < 1e-9);
      CHECK(std::abs(rf - root_fidelity_via_product(a, b)) < 1e-9);
      if (d == 2) CHECK(std::abs(rf * rf - oracle::qubit_fidelity(a.matrix(), b.matrix())) < 1e-9);
    }
  }
}

TEST_CASE("fidelity equals one only for equal states") {
  Rng rng({20, 3});
  const auto a = random_hs_state(3, rng);
  const auto b = random_hs_state(3, rng);
  CHECK(fidelity(a, b).value() < 1.0 - 1e-9);
  // A perturbation of size 1e-9 leaves F at 1 to within 1e-9.
  ComplexMatrix p = a.matrix();
  p(0, 0) += 1e-9;
  p(1, 1) -= 1e-9;
  CHECK(fidelity(a, DensityMatrix(HermitianMatrix(p))).value() > 1.0 - 1e-9);
}

TEST_CASE("trace distance examples") {
  const auto e0 = DensityMatrix::pure(support::basis(2, 0));
  const auto e1 = DensityMatrix::pure(support::basis(2, 1));
  CHECK(trace_distance(e0, e0) == doctest::Approx(0.0));
  CHECK(trace_distance(e0, e1) == doctest::Approx(1.0));
  CHECK(trace_distance(e0, DensityMatrix::maximally_mixed(2)) == doctest::Approx(0.5));
  CHECK_THROWS_AS(trace_distance(e0, DensityMatrix::maximally_mixed(3)), Error);
}

TEST_CASE("fidelity values clamp roundoff and reject real excursions") {
  CHECK(FidelityValue(1.0 + 5e-11).value() == 1.0);
  CHECK(FidelityValue(-5e-11).value() == 0.0);
  CHECK_THROWS_AS(FidelityValue(1.001), Error);
  CHECK_THROWS_AS(FidelityValue(-0.01), Error);
}

TEST_CASE("property suite on random states") {
  for (Index d : {2, 3, 5}) {
    Rng rng({21, static_cast<std::uint64_t>(d)});
    for (int t = 0; t < 200; ++t) {
      const auto a = random_hs_state(d, rng);
      const auto b = random_hs_state(d, rng);
      const auto c = random_hs_state(d, rng);
      const auto e = random_hs_state(d, rng);
      const double rf = root_fidelity(a, b);
      const double td = trace_distance(a, b);
      // Sandwich
      CHECK(1.0 - rf <= td + 1e-9);
      CHECK(td <= std::sqrt(1.0 - rf * rf) + 1e-9);
      // Symmetry
      CHECK(std::abs(fidelity(a, b).value() - fidelity(b, a).value()) <= 1e-9);
      // Concavity in one argument
      CHECK(fidelity(half_mix(a, b), c).value() >= 0.5 * fidelity(a, c) + 0.5 * fidelity(b, c) - 1e-9);
      // Joint concavity of the root fidelity
      CHECK(root_fidelity(half_mix(a, b), half_mix(c, e)) >=
            0.5 * root_fidelity(a, c) + 0.5 * root_fidelity(b, e) - 1e-9);
      // Unitary invariance
      const ComplexMatrix u = random_unitary(d, rng);
      CHECK(std::abs(fidelity(rotate(u, a), rotate(u, b)).value() - fidelity(a, b).value()) <= 1e-9);
    }
  }
}

TEST_CASE("the root fidelity table is symmetric with unit diagonal") {
  Rng rng({22, 0});
  std::vector<DensityMatrix> s;
  for (int i = 0; i < 4; ++i) s.push_back(random_hs_state(3, rng));
  const RealMatrix t = root_fidelity_table(s);
  for (Index i = 0; i < 4; ++i) {
    CHECK(t(i, i) == 1.0);
    for (Index j = 0; j < 4; ++j) {
      CHECK(t(i, j) == t(j, i));
      if (i != j) CHECK(std::abs(t(i, j) - root_fidelity(s[i], s[j])) < 1e-12);
    }
  }
}
