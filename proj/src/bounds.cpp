#include "fidmat/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace fidmat {

namespace {

void require_K(const Ensemble& e, Index K, const char* what) {
  if (e.K() != K) {
    throw Error(ErrorCode::WrongK, std::string(what) + " needs K = " + std::to_string(K) + ", got " +
                                       std::to_string(e.K()));
  }
}

std::string with_param(const char* name, const char* key, double v) {
  std::ostringstream os;
  os << name << "(" << key << "=" << v << ")";
  return os.str();
}

double nats_to(double nats, double log_base) { return nats / std::log(log_base); }

}  // namespace

std::string_view to_string(BoundId id) {
  switch (id) {
    case BoundId::two_state: return "two_state";
    case BoundId::conjecture3: return "conjecture3";
    case BoundId::triples: return "triples";
    case BoundId::masked: return "masked";
    case BoundId::pure_CF: return "pure_CF";
    case BoundId::qubit_CF: return "qubit_CF";
    case BoundId::multistate: return "multistate";
    case BoundId::gram: return "gram";
  }
  return "unknown";
}

bool is_proven(BoundId id) { return id != BoundId::conjecture3; }

BoundReport make_report(BoundId id, std::string label, double lhs, double rhs, double tol) {
  BoundReport r{id, std::move(label), lhs, rhs, rhs - lhs, tol, true};
  r.holds = r.slack >= -tol;
  return r;
}

double holevo_chi(const Ensemble& e, double log_base) {
  double mixed = 0.0;
  for (Index i = 0; i < e.K(); ++i) {
    if (e.weight(i) > 0.0) mixed += e.weight(i) * vn_entropy(e.state(i).hermitian(), log_base);
  }
  return vn_entropy(e.average_state(), log_base) - mixed;
}

double two_state_entropy(double q, double root_fid, double log_base) {
  RealMatrix m(2, 2);
  const double off = std::sqrt(q * (1.0 - q)) * root_fid;
  m << q, off, off, 1.0 - q;
  return vn_entropy(HermitianMatrix(m), log_base);
}

BoundReport bound_two_state(const Ensemble& e, double log_base) {
  require_K(e, 2, "two-state bound");
  const double rhs = two_state_entropy(e.weight(0), root_fidelity(e.state(0), e.state(1)), log_base);
  return make_report(BoundId::two_state, "two_state", holevo_chi(e, log_base), rhs, kProvenBoundTol);
}

BoundReport bound_conjecture3(const Ensemble& e, double log_base) {
  require_K(e, 3, "three-state conjecture");
  return make_report(BoundId::conjecture3, "conjecture3", holevo_chi(e, log_base),
                     root_fidelity_matrix(e).entropy(log_base), kProvenBoundTol);
}

BoundReport bound_triples(const Ensemble& e, double log_base) {
  require_K(e, 3, "pairwise bound");
  const RealMatrix rf = root_fidelity_table(e.states());
  double rhs = 0.0;
  for (Index i = 0; i < 3; ++i) {
    for (Index j = i + 1; j < 3; ++j) {
      const double w = e.weight(i) + e.weight(j);
      if (!(w > 0.0)) throw Error(ErrorCode::ZeroPairWeight, "pair has zero total weight");
      rhs += w * two_state_entropy(e.weight(i) / w, rf(i, j), log_base);
    }
  }
  return make_report(BoundId::triples, "triples", holevo_chi(e, log_base), rhs, kProvenBoundTol);
}

BoundReport bound_masked(const Ensemble& e, double b, double log_base) {
  require_K(e, 3, "masked bound");
  const double cap = e.dim() == 2 ? 1.0 / std::sqrt(3.0) : 0.5;
  if (!(b >= 0.0 && b <= cap + 1e-15)) {
    std::ostringstream os;
    os << "mask parameter " << b << " outside [0, " << cap << "] for d = " << e.dim();
    throw Error(ErrorCode::BOutOfRange, os.str());
  }
  return make_report(BoundId::masked, with_param("masked", "b", b), holevo_chi(e, log_base),
                     masked_matrix(e, b).entropy(log_base), kProvenBoundTol);
}

BoundReport bound_pure_CF(const Ensemble& e, double log_base) {
  if (!e.all_pure()) throw Error(ErrorCode::NotPure, "pure-state C_F bound needs pure states");
  return make_report(BoundId::pure_CF, "pure_CF", holevo_chi(e, log_base),
                     squared_fidelity_matrix(e).entropy(log_base), kProvenBoundTol);
}

BoundReport bound_qubit_CF(const Ensemble& e, double log_base) {
  if (e.dim() != 2) throw Error(ErrorCode::NotQubit, "qubit C_F bound needs d = 2");
  return make_report(BoundId::qubit_CF, "qubit_CF", holevo_chi(e, log_base),
                     squared_fidelity_matrix(e).entropy(log_base), kProvenBoundTol);
}

BoundReport bound_multistate(const Ensemble& e, const Ordering& ordering, double log_base) {
  const auto sigma = multistate_sigma(e, ordering);
  return make_report(BoundId::multistate, "multistate(" + to_string(ordering) + ")", holevo_chi(e, log_base),
                     sigma.entropy(log_base), kInverseChainTol);
}

BoundReport bound_gram(const Ensemble& e, const UnitaryTuple& u, double log_base) {
  return make_report(BoundId::gram, "gram", holevo_chi(e, log_base), gram_correlation(e, u).entropy(log_base),
                     kProvenBoundTol);
}

ContinuityReport continuity_check(FidelityValue f12, FidelityValue f13, FidelityValue f23, double tolerance) {
  ContinuityReport r;
  r.lhs1 = std::abs(std::sqrt(f12.value()) - std::sqrt(f13.value()));
  r.rhs1 = std::sqrt(1.0 - f23.value());
  r.lhs2 = std::abs(f12.value() - f13.value());
  r.rhs2 = 2.0 * r.rhs1;
  r.holds = r.lhs1 <= r.rhs1 + tolerance && r.lhs2 <= r.rhs2 + tolerance;
  return r;
}

double entropy_integral(double D) {
  if (!(D >= 0.0) || !std::isfinite(D)) throw Error(ErrorCode::DOutOfRange, "determinant must be >= 0");
  if (D == 0.0) return 0.0;
  using boost::math::quadrature::gauss_kronrod;
  const auto integrand = [D](double t) { return D * (2.0 * t + 1.0) / ((t + 1.0) * (t * t + t + D)); };
  // The integrand behaves like 2D/t^2 for large t; cut where that tail is 1e-12.
  const double cutoff = 2.0 * D * 1e12;
  // Geometric panels resolve the scale D near the origin and the 1/t^2 decay.
  double lo = 0.0;
  double hi = std::min(D, 1.0) * 0x1p-10;
  double total = 0.0;
  while (lo < cutoff) {
    hi = std::min(hi, cutoff);
    total += gauss_kronrod<double, 31>::integrate(integrand, lo, hi, 10, 1e-14);
    lo = hi;
    hi *= 2.0;
  }
  return total;
}

double qubit_entropy_f(double D, double log_base) {
  if (!(D >= 0.0 && D <= 0.25 + 1e-15)) throw Error(ErrorCode::DOutOfRange, "determinant must lie in [0, 1/4]");
  return nats_to(entropy_integral(std::min(D, 0.25)), log_base);
}

FInequalityReport f_inequality_check(double a, double b, double x, double y, double tolerance) {
  if (!(a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0 && x >= 0.0 && y >= 0.0)) {
    throw Error(ErrorCode::DomainError, "need 0 <= a, b <= 1 and x, y >= 0");
  }
  const double mixed = a * a * x + b * b * y;
  if (mixed > 0.25 + 1e-15) throw Error(ErrorCode::DomainError, "a^2 x + b^2 y exceeds 1/4");

  constexpr double step = 1e-6;
  const auto f = [](double z) { return entropy_integral(z); };
  const auto margin = [&](double z) {
    const double left = std::max(0.0, z - step);
    const double right = z + step;
    const double slope = (f(right) - f(left)) / (right - left);
    return 2.0 * z * slope - f(z);
  };

  FInequalityReport r;
  r.lhs = f(mixed);
  r.rhs = a * f(x) + b * f(y);
  r.derivative_margin = std::min(margin(x), margin(y));
  r.holds = r.lhs <= r.rhs + tolerance && r.derivative_margin >= -tolerance;
  return r;
}

namespace {

double overlap_abs(const ComplexVector& f, const ComplexVector& g) { return std::abs(f.dot(g)); }

void check_lemma2_inputs(const ComplexVector& f, const ComplexVector& g, double a) {
  if (f.size() != g.size()) throw Error(ErrorCode::DimensionMismatch, "vectors differ in size");
  if (std::abs(f.norm() - 1.0) > 1e-10 || std::abs(g.norm() - 1.0) > 1e-10) {
    throw Error(ErrorCode::InvalidArgument, "vectors must be normalized");
  }
  const double t = overlap_abs(f, g);
  if (!(a >= t - 1e-12 && a <= 1.0 + 1e-12)) {
    throw Error(ErrorCode::AOutOfRange, "need |<f,g>| <= a <= 1");
  }
}

}  // namespace

double lemma2_closed_form(const ComplexVector& f, const ComplexVector& g, double a) {
  check_lemma2_inputs(f, g, a);
  return (1.0 - a) * (1.0 + overlap_abs(f, g));
}

double lemma2_numeric_sup(const ComplexVector& f, const ComplexVector& g, double a) {
  check_lemma2_inputs(f, g, a);
  // Orthonormal basis {f, e2} of span{f, g}; unit h = cos(th) f + sin(th) e^{i ph} e2.
  const Complex fg = f.dot(g);
  ComplexVector rest = g - fg * f;
  const double rest_norm = rest.norm();
  const auto value = [a](double x, double y) { return x * x + y * y - 2.0 * a * x * y; };
  if (rest_norm < 1e-12) return std::max(0.0, value(1.0, 1.0));  // g parallel to f

  // Components of g in the basis: g = fg f + rest_norm e2.
  const auto objective = [&](double th, double ph) {
    const double c = std::cos(th);
    const double s = std::sin(th);
    const double x = c;  // |<f,h>|
    const Complex gh = std::conj(fg) * c + rest_norm * s * std::polar(1.0, ph);
    return value(x, std::abs(gh));
  };

  constexpr double kPi = std::numbers::pi;
  constexpr int kCoarse = 200;
  double best = -1.0;
  double best_th = 0.0;
  double best_ph = 0.0;
  for (int i = 0; i <= kCoarse; ++i) {
    const double th = 0.5 * kPi * i / kCoarse;
    for (int k = 0; k < 2 * kCoarse; ++k) {
      const double ph = kPi * k / kCoarse;
      const double v = objective(th, ph);
      if (v > best) {
        best = v;
        best_th = th;
        best_ph = ph;
      }
    }
  }

  double half_th = 0.5 * kPi / kCoarse;
  double half_ph = kPi / kCoarse;
  constexpr int kLocal = 10;
  for (int round = 0; round < 40; ++round) {
    const double c_th = best_th;
    const double c_ph = best_ph;
    for (int i = -kLocal; i <= kLocal; ++i) {
      const double th = std::clamp(c_th + half_th * i / kLocal, 0.0, 0.5 * kPi);
      for (int k = -kLocal; k <= kLocal; ++k) {
        const double ph = c_ph + half_ph * k / kLocal;
        const double v = objective(th, ph);
        if (v > best) {
          best = v;
          best_th = th;
          best_ph = ph;
        }
      }
    }
    half_th *= 0.5;
    half_ph *= 0.5;
  }
  // The form is homogeneous of degree 2, so ||h|| < 1 only adds the value 0.
  return std::max(0.0, best);
}

}  // namespace fidmat
