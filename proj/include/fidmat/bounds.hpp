#pragma once

// Holevo quantity and entropy upper bounds on it. Evaluators never throw on a
// violated inequality: they report the slack and let the caller decide.

#include <string>

#include "fidmat/correlation.hpp"
#include "fidmat/fidelity.hpp"

namespace fidmat {

inline constexpr double kProvenBoundTol = 1e-9;
/// Chains through matrix inverses lose more digits.
inline constexpr double kInverseChainTol = 1e-8;

enum class BoundId { two_state, conjecture3, triples, masked, pure_CF, qubit_CF, multistate, gram };

std::string_view to_string(BoundId id);

/// True for every bound with a proof; false for the conjecture.
bool is_proven(BoundId id);

struct BoundReport {
  BoundId id;
  /// Human readable, e.g. "masked(b=0.5)".
  std::string label;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
  double tol = kProvenBoundTol;
  bool holds = true;   // slack >= -tol
};

BoundReport make_report(BoundId id, std::string label, double lhs, double rhs, double tol);

/// S(sum p_i rho_i) - sum p_i S(rho_i).
double holevo_chi(const Ensemble& e, double log_base = 2.0);

/// Entropy of [[q, sqrt(q(1-q)) r], [sqrt(q(1-q)) r, 1-q]].
double two_state_entropy(double q, double root_fid, double log_base = 2.0);

BoundReport bound_two_state(const Ensemble& e, double log_base = 2.0);
BoundReport bound_conjecture3(const Ensemble& e, double log_base = 2.0);
BoundReport bound_triples(const Ensemble& e, double log_base = 2.0);
/// 0 <= b <= 1/2 for any d; up to 1/sqrt(3) for qubits (empirical regime).
BoundReport bound_masked(const Ensemble& e, double b, double log_base = 2.0);
BoundReport bound_pure_CF(const Ensemble& e, double log_base = 2.0);
BoundReport bound_qubit_CF(const Ensemble& e, double log_base = 2.0);
BoundReport bound_multistate(const Ensemble& e, const Ordering& ordering, double log_base = 2.0);
BoundReport bound_gram(const Ensemble& e, const UnitaryTuple& u, double log_base = 2.0);

struct ContinuityReport {
  double lhs1 = 0.0;  // |sqrt F12 - sqrt F13|
  double rhs1 = 0.0;  // sqrt(1 - F23)
  double lhs2 = 0.0;  // |F12 - F13|
  double rhs2 = 0.0;  // 2 sqrt(1 - F23)
  bool holds = true;
};

ContinuityReport continuity_check(FidelityValue f12, FidelityValue f13, FidelityValue f23,
                                  double tolerance = kProvenBoundTol);

/// Integral of D(2t+1) / ((t+1)(t^2+t+D)) over t >= 0, in nats, for any
/// D >= 0 (the integral extends f beyond the qubit range).
double entropy_integral(double D);

/// Entropy of a qubit state with determinant D in [0, 1/4], by quadrature.
double qubit_entropy_f(double D, double log_base = 2.0);

struct FInequalityReport {
  double lhs = 0.0;  // f(a^2 x + b^2 y)
  double rhs = 0.0;  // a f(x) + b f(y)
  /// min over z in {x, y} of 2 z f'(z) - f(z)
  double derivative_margin = 0.0;
  bool holds = true;
};

/// f(a^2 x + b^2 y) <= a f(x) + b f(y), plus f(z) <= 2 z f'(z) at z = x, y
/// with a central difference of step 1e-6. Values in nats.
FInequalityReport f_inequality_check(double a, double b, double x, double y, double tolerance = 1e-7);

/// (1 - a)(1 + |<f, g>|).
double lemma2_closed_form(const ComplexVector& f, const ComplexVector& g, double a);

/// Numerical supremum of |<f,h>|^2 + |<g,h>|^2 - 2a |<f,h>||<g,h>| over unit
/// h in span{f, g}: coarse grid then repeated local zoom.
double lemma2_numeric_sup(const ComplexVector& f, const ComplexVector& g, double a);

}  // namespace fidmat
