// Acceptance runner. Each criterion prints one PASS/FAIL line with the
// measured figures; `--criterion N` runs a single one.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <limits>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include "fidmat/bounds.hpp"
#include "fidmat/experiments.hpp"
#include "fidmat/fidelity.hpp"
#include "fidmat/search.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace fidmat;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 1;

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

fs::path artifacts() {
  const fs::path dir = fs::current_path() / "acceptance_artifacts";
  fs::create_directories(dir);
  return dir;
}

ExperimentConfig base_config(const std::string& sub) {
  ExperimentConfig c;
  c.subcommand = sub;
  c.seed = kSeed;
  return c;
}

Verdict conjecture_sweep() {
  auto c = base_config("conjecture-sweep");
  c.dims = {2, 3, 5, 7};
  c.samples = 10000;
  c.tol = 1e-9;
  const auto start = std::chrono::steady_clock::now();
  const auto r = cmd_conjecture_sweep(c);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto violations = r.summary["violations"].get<std::size_t>();
  return {violations == 0 && secs < 300.0,
          std::to_string(violations) + " violations in 4 x 10^4 triples, min slack " +
              fmt("%.3e", r.summary["min_slack"].get<double>()) + ", " + fmt("%.1f", secs) + " s"};
}

Verdict three_state_positivity() {
  double worst_eig = std::numeric_limits<double>::infinity();
  double worst_det = std::numeric_limits<double>::infinity();
  for (Index d : {2, 3, 5, 7}) {
    Rng rng({kSeed, static_cast<std::uint64_t>(100 + d)});
    for (int t = 0; t < 10000; ++t) {
      std::vector<DensityMatrix> s{random_hs_state(d, rng), random_hs_state(d, rng), random_hs_state(d, rng)};
      worst_eig = std::min(worst_eig, fidelity_power_matrix(s, 0.5).min_eigenvalue());
      // Fidelities for the determinant inequality come from the SVD route.
      const double r12 = oracle::root_fidelity(s[0].matrix(), s[1].matrix());
      const double r13 = oracle::root_fidelity(s[0].matrix(), s[2].matrix());
      const double r23 = oracle::root_fidelity(s[1].matrix(), s[2].matrix());
      const double f12 = r12 * r12;
      const double f13 = r13 * r13;
      const double f23 = r23 * r23;
      worst_det = std::min(worst_det, 1.0 + 2.0 * std::sqrt(f12 * f13 * f23) - (f12 + f13 + f23));
    }
  }
  return {worst_eig >= -1e-9 && worst_det >= -1e-9,
          "min eigenvalue " + fmt("%.3e", worst_eig) + ", min determinant margin " + fmt("%.3e", worst_det)};
}

Verdict four_state_negativity() {
  auto c = base_config("positivity-scan");
  c.Ks = {4};
  c.dims = {2};
  c.samples = 100000;
  c.kind = "E_half";
  c.out = artifacts() / "k4_scan.csv";
  const auto r = cmd_positivity_scan(c);
  const auto written = write_report(c, r, std::cout);
  const double found = r.rows.at(0)[6].get<double>();
  if (written.size() < 2) return {false, "no instance persisted"};
  const auto reloaded = load_ensemble(written[1]);
  const double again = nonpsd_min_eigenvalue(reloaded.states(), NonPsdKind::E_half);
  const auto rerun = cmd_positivity_scan(c);
  const double rerun_min = rerun.rows.at(0)[6].get<double>();
  const auto fixture = load_ensemble(support::data_file("e4_counterexample.json"));
  const double fixed = nonpsd_min_eigenvalue(fixture.states(), NonPsdKind::E_half);
  const bool pass = found < -1e-6 && again == found && rerun_min == found && fixed < -1e-6;
  return {pass, "min eigenvalue " + fmt("%.6f", found) + ", reloaded " + fmt("%.6f", again) + ", fixture " +
                    fmt("%.6f", fixed) + ", negative fraction " + fmt("%.4f", r.rows.at(0)[5].get<double>())};
}

Verdict squared_fidelity_negativity() {
  const auto k5 = search_nonpsd(5, 3, NonPsdKind::C_F, 100000, kSeed);
  double qubit_min = std::numeric_limits<double>::infinity();
  for (Index K = 2; K <= 8; ++K) {
    qubit_min = std::min(qubit_min, search_nonpsd(K, 2, NonPsdKind::C_F, 10000, kSeed + K).best_value);
  }
  double pure_min = std::numeric_limits<double>::infinity();
  for (Index K = 2; K <= 8; ++K) {
    for (Index d : {2, 3, 5}) {
      pure_min = std::min(pure_min,
                          search_nonpsd(K, d, NonPsdKind::C_F, 2000, kSeed + 10 * K + d, StateModel::pure).best_value);
    }
  }
  if (k5.best_instance) save_ensemble(*k5.best_instance, artifacts() / "cf_k5_d3.json");
  return {k5.best_value < -1e-6 && qubit_min >= -1e-9 && pure_min >= -1e-9,
          "K=5 d=3 min " + fmt("%.3e", k5.best_value) + ", qubit min " + fmt("%.3e", qubit_min) + ", pure min " +
              fmt("%.3e", pure_min)};
}

Verdict proven_battery() {
  auto c = base_config("bounds-battery");
  c.samples = 1000;
  c.dims = {2};
  c.b_values = {0.0, 0.25, 0.5};
  const auto start = std::chrono::steady_clock::now();
  const auto r = cmd_bounds_battery(c);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  // Rerun on qutrits for the bounds without a dimension restriction.
  auto c3 = c;
  c3.dims = {3};
  const auto r3 = cmd_bounds_battery(c3);
  const auto v = r.summary["proven_violations"].get<std::size_t>() + r3.summary["proven_violations"].get<std::size_t>();
  double min_slack = std::numeric_limits<double>::infinity();
  for (const auto* rep : {&r, &r3}) {
    for (const auto& b : rep->summary["per_bound"]) min_slack = std::min(min_slack, b["min_slack"].get<double>());
  }
  return {v == 0 && r.exit_code == 0 && r3.exit_code == 0 && secs < 600.0,
          std::to_string(r.summary["per_bound"].size()) + " bounds x 1000 trials x 2 dims, " + std::to_string(v) +
              " violations, min slack " + fmt("%.3e", min_slack)};
}

Verdict gap_phenomenon() {
  const MinimizeOptions options;  // 20 restarts, documented stopping rule
  const auto search = violation_search_fig1(2, 100, kSeed, options);
  if (!search.outcome.best_instance) return {false, "no instance"};
  const auto path = artifacts() / "fig1_max_gap.json";
  save_ensemble(*search.outcome.best_instance, path);
  const auto reloaded = load_ensemble(path);
  double rerun_min = std::numeric_limits<double>::infinity();
  for (std::uint64_t s = 0; s < 3; ++s) {
    Rng rng({kSeed, s});
    rerun_min = std::min(rerun_min, fig1_gap(reloaded, rng, options).gap);
  }
  const auto fixture = load_ensemble(support::data_file("fig1_gap_instance.json"));
  Rng rng({fixture.meta().seed, 0});
  const double fixed = fig1_gap(fixture, rng, options).gap;
  return {search.outcome.best_value > 1e-3 && rerun_min > 1e-3 && fixed > 1e-3,
          "best gap " + fmt("%.6f", search.outcome.best_value) + " bits at trial " +
              std::to_string(*search.outcome.best_trial) + ", reruns >= " + fmt("%.6f", rerun_min) + ", fixture " +
              fmt("%.6f", fixed)};
}

Verdict overlap_supremum() {
  Rng rng({kSeed, 700});
  double worst_gap = 0.0;
  double worst_cap = -1.0;
  std::size_t mismatches = 0;
  double worst_vs_analytic = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const Index d = 2 + static_cast<Index>(t % 5);
    ComplexVector f(d);
    ComplexVector g(d);
    for (Index i = 0; i < d; ++i) {
      f(i) = rng.complex_normal();
      g(i) = rng.complex_normal();
    }
    f.normalize();
    g.normalize();
    const double overlap = std::abs(f.dot(g));
    const double a = overlap + (1.0 - overlap) * rng.uniform();
    const double numeric = lemma2_numeric_sup(f, g, a);
    const double closed = lemma2_closed_form(f, g, a);
    const double gap = std::abs(numeric - closed);
    if (gap > 1e-4) ++mismatches;
    worst_gap = std::max(worst_gap, gap);
    worst_cap = std::max(worst_cap, closed - (1.0 - a * a));
    // Value at h orthogonal to g inside the span.
    worst_vs_analytic = std::max(worst_vs_analytic, std::abs(numeric - (1.0 - overlap * overlap)));
  }
  return {mismatches == 0 && worst_cap <= 1e-9,
          std::to_string(mismatches) + "/1000 instances differ by more than 1e-4 (max " + fmt("%.4f", worst_gap) +
              "); closed form - (1 - a^2) <= " + fmt("%.2e", worst_cap) + "; numeric vs 1 - |<f,g>|^2 max " +
              fmt("%.2e", worst_vs_analytic)};
}

Verdict entropy_function() {
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double D = 0.25 * i / 999.0;
    worst = std::max(worst, std::abs(qubit_entropy_f(D, std::exp(1.0)) - oracle::qubit_entropy_closed(D)));
  }
  Rng rng({kSeed, 800});
  std::size_t checked = 0;
  std::size_t violations = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  while (checked < 10000) {
    const double a = rng.uniform();
    const double b = rng.uniform();
    const double x = 0.25 * rng.uniform();
    const double y = 0.25 * rng.uniform();
    if (a * a * x + b * b * y > 0.25) continue;
    const auto r = f_inequality_check(a, b, x, y, 1e-7);
    if (!r.holds) ++violations;
    min_margin = std::min(min_margin, r.rhs - r.lhs);
    ++checked;
  }
  return {worst <= 1e-8 && violations == 0,
          "quadrature error " + fmt("%.2e", worst) + " nats, " + std::to_string(violations) +
              " inequality violations in 10^4 points, min margin " + fmt("%.2e", min_margin)};
}

Verdict fourier_construction() {
  double worst = 0.0;
  bool negative_half = true;
  bool nonneg_one = true;
  for (Index n = 2; n <= 64; ++n) {
    for (double alpha : {0.5, 1.0}) {
      const double q = hadamard_quadratic_form(n, alpha);
      worst = std::max(worst, std::abs(q - hadamard_quadratic_form_closed(n, alpha)));
      if (alpha == 0.5 && n >= 5 && !(q < 0.0)) negative_half = false;
      if (alpha == 1.0 && q < -1e-8) nonneg_one = false;
    }
  }
  // The fidelity power matrix kind agrees on small n.
  for (Index n = 2; n <= 8; ++n) {
    const auto h = hadamard_construction(n);
    const auto e = fidelity_power_matrix(h.states(), 0.5);
    Eigen::VectorXd w(2 * n);
    for (Index k = 0; k < 2 * n; ++k) w(k) = h.signs[static_cast<std::size_t>(k)];
    const double direct = (w.cast<Complex>().transpose() * e.matrix.matrix() * w.cast<Complex>())(0, 0).real();
    worst = std::max(worst, std::abs(direct - hadamard_quadratic_form_closed(n, 0.5)));
  }
  return {worst <= 1e-8 && negative_half && nonneg_one,
          "max |explicit - closed| " + fmt("%.2e", worst) + ", alpha=1/2 negative for n>=5: " +
              (negative_half ? "yes" : "no") + ", alpha=1 non-negative: " + (nonneg_one ? "yes" : "no")};
}

DensityMatrix half_mix(const DensityMatrix& a, const DensityMatrix& b) {
  const std::vector<double> w{0.5, 0.5};
  const std::vector<DensityMatrix> s{a, b};
  return DensityMatrix(mix(w, s));
}

Verdict kernel_properties() {
  double residual = 0.0;
  double worst_imag = 0.0;
  double worst_real = std::numeric_limits<double>::infinity();
  for (Index d : {2, 3, 4, 6}) {
    Rng rng({kSeed, static_cast<std::uint64_t>(1000 + d)});
    for (int t = 0; t < 100; ++t) {
      const auto a = support::random_psd(d, d, rng);
      const auto b = support::random_psd(d, d, rng);
      const ComplexMatrix x = sqrt_product(a, b);
      residual = std::max(residual, max_abs(x * x - a.matrix() * b.matrix()));
      Eigen::ComplexEigenSolver<ComplexMatrix> es(x, false);
      for (Index i = 0; i < d; ++i) {
        worst_imag = std::max(worst_imag, std::abs(es.eigenvalues()(i).imag()));
        worst_real = std::min(worst_real, es.eigenvalues()(i).real());
      }
    }
  }
  std::size_t failures = 0;
  Rng rng({kSeed, 1100});
  for (int t = 0; t < 1000; ++t) {
    const Index d = 2 + t % 4;
    const auto a = random_hs_state(d, rng);
    const auto b = random_hs_state(d, rng);
    const auto c = random_hs_state(d, rng);
    const auto e = random_hs_state(d, rng);
    const double rf = oracle::root_fidelity(a.matrix(), b.matrix());
    const double td = 0.5 * oracle::trace_norm(a.matrix() - b.matrix());
    if (!(1.0 - rf <= td + 1e-9 && td <= std::sqrt(std::max(0.0, 1.0 - rf * rf)) + 1e-9)) ++failures;
    if (std::abs(fidelity(a, b).value() - fidelity(b, a).value()) > 1e-9) ++failures;
    if (std::abs(fidelity(a, b).value() - rf * rf) > 1e-9) ++failures;
    if (fidelity(half_mix(a, b), c).value() < 0.5 * fidelity(a, c) + 0.5 * fidelity(b, c) - 1e-9) ++failures;
    if (root_fidelity(half_mix(a, b), half_mix(c, e)) < 0.5 * root_fidelity(a, c) + 0.5 * root_fidelity(b, e) - 1e-9) {
      ++failures;
    }
  }
  return {residual <= 1e-8 && worst_imag <= 1e-8 && worst_real >= -1e-8 && failures == 0,
          "squaring residual " + fmt("%.2e", residual) + ", max |Im| " + fmt("%.2e", worst_imag) + ", min Re " +
              fmt("%.2e", worst_real) + ", fidelity property failures " + std::to_string(failures)};
}

Verdict multistate_matrix() {
  Rng rng({kSeed, 1200});
  double min_eig = std::numeric_limits<double>::infinity();
  double layer = 0.0;
  double chi_margin = std::numeric_limits<double>::infinity();
  double vs_oracle = 0.0;
  int made = 0;
  while (made < 1000) {
    const auto e = random_ensemble(4, 2, StateModel::hilbert_schmidt, rng, {kSeed, kGeneratorName});
    if (!e.all_faithful()) continue;
    ++made;
    const double chi = holevo_chi(e);
    std::vector<std::size_t> perm{0, 1, 2, 3};
    do {
      const Ordering o(perm);
      const auto sigma = multistate_sigma(e, o);
      const auto ordered = e.permuted(o.indices());
      min_eig = std::min(min_eig, sigma.min_eigenvalue());
      for (Index i = 0; i + 1 < 4; ++i) {
        const double expected = std::sqrt(ordered.weight(i) * ordered.weight(i + 1)) *
                                oracle::root_fidelity(ordered.state(i).matrix(), ordered.state(i + 1).matrix());
        layer = std::max(layer, std::abs(sigma.matrix(i, i + 1) - expected));
      }
      chi_margin = std::min(chi_margin, sigma.entropy() - chi);
      const UnitaryTuple u(oracle::recurrence_unitaries(ordered), 1e-8);
      vs_oracle = std::max(vs_oracle, max_abs(sigma.matrix.matrix() - oracle::purification_gram(ordered, u.unitaries())));
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return {min_eig >= -1e-8 && layer <= 1e-8 && chi_margin >= -1e-8 && vs_oracle <= 1e-8,
          "min eigenvalue " + fmt("%.2e", min_eig) + ", first layer error " + fmt("%.2e", layer) +
              ", min S - chi " + fmt("%.3e", chi_margin) + ", recurrence Gram error " + fmt("%.2e", vs_oracle)};
}

struct Criterion {
  const char* name;
  std::function<Verdict()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list{
      {"three-state conjecture sweep", conjecture_sweep},
      {"three-state fidelity matrix positivity", three_state_positivity},
      {"four-state root fidelity negativity", four_state_negativity},
      {"squared fidelity matrix negativity", squared_fidelity_negativity},
      {"proven bound battery", proven_battery},
      {"optimized Gram entropy above root fidelity entropy", gap_phenomenon},
      {"overlap supremum closed form", overlap_supremum},
      {"qubit entropy integral and inequality", entropy_function},
      {"Fourier construction quadratic form", fourier_construction},
      {"kernel properties", kernel_properties},
      {"multi-state correlation matrix", multistate_matrix},
  };
  return list;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::size_t> selected;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      selected.push_back(static_cast<std::size_t>(std::stoul(argv[++i])));
    }
  }
  if (selected.empty()) {
    selected.resize(criteria().size());
    std::iota(selected.begin(), selected.end(), std::size_t{1});
  }
  int failed = 0;
  for (std::size_t n : selected) {
    if (n < 1 || n > criteria().size()) {
      std::printf("criterion %zu: unknown\n", n);
      return 2;
    }
    const auto& c = criteria()[n - 1];
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %zu (%s): %s | %s\n", n, c.name, v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
    if (!v.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
