#include "fidmat/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <sstream>

#include "fidmat/parallel.hpp"

namespace fidmat {

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t stream_index(std::uint64_t cell, std::uint64_t trial) { return (cell << 32) | trial; }

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_cell(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number_float()) return format_number(v.get<double>());
  if (v.is_null()) return "";
  return v.dump();
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

Ensemble load_input(const ExperimentConfig& c) { return load_ensemble(*c.input); }

/// Draws a random ensemble, redrawing until every state is faithful.
Ensemble faithful_ensemble(Index K, Index d, Rng& rng, const EnsembleMeta& meta) {
  for (;;) {
    auto e = random_ensemble(K, d, StateModel::hilbert_schmidt, rng, meta);
    if (e.all_faithful()) return e;
  }
}

}  // namespace

void validate(const ExperimentConfig& c) {
  const auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidArgument, msg); };
  if (c.Ks.empty() || c.dims.empty()) fail("K and d lists must be non-empty");
  for (Index K : c.Ks) {
    if (K < 1) fail("K must be positive");
  }
  for (Index d : c.dims) {
    if (d < 1) fail("d must be positive");
  }
  if (c.samples == 0) fail("samples must be positive");
  if (c.restarts < 1) fail("restarts must be positive");
  if (c.iters < 0) fail("iters must be non-negative");
  if (!(c.tol > 0.0)) fail("tolerance must be positive");
  if (!(c.log_base > 1.0)) fail("log base must exceed 1");
  if (!(c.alpha > 0.0)) fail("alpha must be positive");
  for (double b : c.b_values) {
    if (!(b >= 0.0 && b <= 1.0)) fail("b must lie in [0, 1]");
  }
}

ExperimentReport cmd_conjecture_sweep(const ExperimentConfig& c) {
  validate(c);
  const auto start = Clock::now();
  ExperimentReport r;
  r.name = "conjecture_sweep";
  r.columns = {"d", "trial", "S_rhs", "chi", "slack", "holds"};

  struct Row {
    BoundReport report;
    std::optional<Ensemble> ensemble;
  };
  nlohmann::json per_d = nlohmann::json::object();
  std::size_t total_violations = 0;
  if (c.input) {
    auto e = load_input(c);
    auto b = bound_conjecture3(e, c.log_base);
    b = make_report(b.id, b.label, b.lhs, b.rhs, c.tol);
    r.rows.push_back({e.dim(), 0, b.rhs, b.lhs, b.slack, b.holds});
    if (!b.holds) ++total_violations;
    r.summary["violations"] = total_violations;
    r.summary["min_slack"] = b.slack;
    r.wall_seconds = seconds_since(start);
    return r;
  }
  double global_min = std::numeric_limits<double>::infinity();
  for (std::size_t cell = 0; cell < c.dims.size(); ++cell) {
    const Index d = c.dims[cell];
    std::vector<Row> rows(c.samples);
    parallel_for(c.samples, [&](std::size_t t) {
      Rng rng({c.seed, stream_index(cell, t)});
      auto e = random_ensemble(3, d, StateModel::hilbert_schmidt, rng, {c.seed, kGeneratorName});
      auto b = bound_conjecture3(e, c.log_base);
      rows[t].report = make_report(b.id, b.label, b.lhs, b.rhs, c.tol);
      if (!rows[t].report.holds) rows[t].ensemble = std::move(e);
    });
    std::size_t violations = 0;
    double min_slack = std::numeric_limits<double>::infinity();
    std::size_t worst = 0;
    for (std::size_t t = 0; t < rows.size(); ++t) {
      const auto& b = rows[t].report;
      r.rows.push_back({d, t, b.rhs, b.lhs, b.slack, b.holds});
      if (!b.holds) {
        ++violations;
        r.instances.push_back({"violation_d" + std::to_string(d) + "_t" + std::to_string(t), *rows[t].ensemble});
      }
      if (b.slack < min_slack) {
        min_slack = b.slack;
        worst = t;
      }
    }
    per_d[std::to_string(d)] = {{"violations", violations}, {"min_slack", min_slack}, {"min_slack_trial", worst}};
    total_violations += violations;
    global_min = std::min(global_min, min_slack);
  }
  r.summary["per_d"] = per_d;
  r.summary["violations"] = total_violations;
  r.summary["min_slack"] = global_min;
  // A conjecture: violations are reported, never an error exit.
  r.summary["conjecture"] = true;
  r.wall_seconds = seconds_since(start);
  return r;
}

ExperimentReport cmd_positivity_scan(const ExperimentConfig& c) {
  validate(c);
  NonPsdKind kind = NonPsdKind::E_half;
  if (c.kind == "C_F") {
    kind = NonPsdKind::C_F;
  } else if (!c.kind.empty() && c.kind != "E_half") {
    throw Error(ErrorCode::InvalidArgument, "kind must be E_half or C_F");
  }
  const auto start = Clock::now();
  ExperimentReport r;
  r.name = "positivity_scan";
  r.columns = {"kind", "K", "d", "seed", "trials", "negative_fraction", "min_eigenvalue", "mean_min_eigenvalue"};
  double global_min = std::numeric_limits<double>::infinity();
  for (Index K : c.Ks) {
    for (Index d : c.dims) {
      const std::uint64_t cell_seed = c.seed ^ (static_cast<std::uint64_t>(K) << 40) ^ (static_cast<std::uint64_t>(d) << 52);
      const auto s = search_nonpsd(K, d, kind, c.samples, cell_seed);
      r.rows.push_back({std::string(to_string(kind)), K, d, cell_seed, s.trials_run, s.summary.negative_fraction,
                        s.summary.min, s.summary.mean});
      if (s.best_instance) {
        r.instances.push_back({"worst_" + std::string(to_string(kind)) + "_K" + std::to_string(K) + "_d" +
                                   std::to_string(d),
                               *s.best_instance});
      }
      global_min = std::min(global_min, s.summary.min);
    }
  }
  r.summary["min_eigenvalue"] = global_min;
  r.wall_seconds = seconds_since(start);
  return r;
}

ExperimentReport cmd_fig1_gap(const ExperimentConfig& c) {
  validate(c);
  const auto start = Clock::now();
  ExperimentReport r;
  r.name = "fig1_gap";
  r.columns = {"trial", "S_rootF", "S_minimized", "gap"};
  MinimizeOptions o;
  o.restarts = c.restarts;
  o.iters = c.iters;
  o.log_base = c.log_base;
  if (c.input) {
    const auto e = load_input(c);
    Rng rng({c.seed, 0});
    const auto row = fig1_gap(e, rng, o);
    r.rows.push_back({0, row.s_root_fidelity, row.s_minimized, row.gap});
    r.summary["max_gap"] = row.gap;
    r.summary["iterations"] = row.iterations;
    r.wall_seconds = seconds_since(start);
    return r;
  }
  const auto search = violation_search_fig1(c.dims.front(), c.samples, c.seed, o);
  for (const auto& row : search.rows) r.rows.push_back({row.trial, row.s_root_fidelity, row.s_minimized, row.gap});
  r.summary = search_outcome_to_json(search.outcome);
  r.summary.erase("best_instance");
  r.summary["max_gap"] = search.outcome.best_value;
  if (search.outcome.best_instance) r.instances.push_back({"max_gap", *search.outcome.best_instance});
  r.wall_seconds = seconds_since(start);
  return r;
}

namespace {

struct BatteryCase {
  BoundId id;
  /// Builds the trial ensemble and evaluates the bound.
  std::function<std::pair<Ensemble, BoundReport>(Rng&, const EnsembleMeta&)> run;
};

std::vector<BatteryCase> battery_cases(const ExperimentConfig& c) {
  std::vector<BatteryCase> cases;
  const double base = c.log_base;
  const Index d = c.dims.front();
  cases.push_back({BoundId::two_state, [=](Rng& rng, const EnsembleMeta& m) {
                     auto e = random_ensemble(2, d, StateModel::hilbert_schmidt, rng, m);
                     auto b = bound_two_state(e, base);
                     return std::pair{std::move(e), std::move(b)};
                   }});
  cases.push_back({BoundId::triples, [=](Rng& rng, const EnsembleMeta& m) {
                     auto e = random_ensemble(3, d, StateModel::hilbert_schmidt, rng, m);
                     auto b = bound_triples(e, base);
                     return std::pair{std::move(e), std::move(b)};
                   }});
  for (double bv : c.b_values) {
    if (bv > 0.5) continue;
    cases.push_back({BoundId::masked, [=](Rng& rng, const EnsembleMeta& m) {
                       auto e = random_ensemble(3, d, StateModel::hilbert_schmidt, rng, m);
                       auto b = bound_masked(e, bv, base);
                       return std::pair{std::move(e), std::move(b)};
                     }});
  }
  cases.push_back({BoundId::pure_CF, [=](Rng& rng, const EnsembleMeta& m) {
                     const Index K = 2 + static_cast<Index>(rng.uniform() * 5.0) % 5;
                     auto e = random_ensemble(K, d, StateModel::pure, rng, m);
                     auto b = bound_pure_CF(e, base);
                     return std::pair{std::move(e), std::move(b)};
                   }});
  cases.push_back({BoundId::qubit_CF, [=](Rng& rng, const EnsembleMeta& m) {
                     const Index K = 2 + static_cast<Index>(rng.uniform() * 7.0) % 7;
                     auto e = random_ensemble(K, 2, StateModel::hilbert_schmidt, rng, m);
                     auto b = bound_qubit_CF(e, base);
                     return std::pair{std::move(e), std::move(b)};
                   }});
  cases.push_back({BoundId::multistate, [=](Rng& rng, const EnsembleMeta& m) {
                     auto e = faithful_ensemble(4, 2, rng, m);
                     std::vector<std::size_t> order(4);
                     std::iota(order.begin(), order.end(), std::size_t{0});
                     std::shuffle(order.begin(), order.end(), rng.engine());
                     auto b = bound_multistate(e, Ordering(order), base);
                     return std::pair{std::move(e), std::move(b)};
                   }});
  if (c.conjecture) {
    cases.push_back({BoundId::conjecture3, [=](Rng& rng, const EnsembleMeta& m) {
                       auto e = random_ensemble(3, d, StateModel::hilbert_schmidt, rng, m);
                       auto b = bound_conjecture3(e, base);
                       return std::pair{std::move(e), std::move(b)};
                     }});
  }
  return cases;
}

}  // namespace

ExperimentReport cmd_bounds_battery(const ExperimentConfig& c) {
  validate(c);
  const auto start = Clock::now();
  ExperimentReport r;
  r.name = "bounds_battery";
  r.columns = {"trial", "seed", "K", "d", "bound_id", "lhs", "rhs", "slack", "holds"};
  const auto cases = battery_cases(c);

  struct Cell {
    BoundReport report;
    Index K = 0;
    Index d = 0;
    std::optional<Ensemble> ensemble;
  };
  std::size_t proven_violations = 0;
  std::size_t conjecture_violations = 0;
  nlohmann::json per_bound = nlohmann::json::array();
  for (std::size_t ci = 0; ci < cases.size(); ++ci) {
    std::vector<Cell> cells(c.samples);
    parallel_for(c.samples, [&](std::size_t t) {
      Rng rng({c.seed, stream_index(ci, t)});
      auto [e, b] = cases[ci].run(rng, {c.seed, kGeneratorName});
      const double tol = b.id == BoundId::multistate ? 10.0 * c.tol : c.tol;
      b = make_report(b.id, b.label, b.lhs, b.rhs, tol);
      if (c.fault_hook) {
        c.fault_hook(b);
        b = make_report(b.id, b.label, b.lhs, b.rhs, b.tol);
      }
      cells[t].report = std::move(b);
      cells[t].K = e.K();
      cells[t].d = e.dim();
      if (!cells[t].report.holds) cells[t].ensemble = std::move(e);
    });
    std::size_t violations = 0;
    double min_slack = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < cells.size(); ++t) {
      const auto& b = cells[t].report;
      r.rows.push_back({t, c.seed, cells[t].K, cells[t].d, b.label, b.lhs, b.rhs, b.slack, b.holds});
      min_slack = std::min(min_slack, b.slack);
      if (!b.holds) {
        ++violations;
        if (violations <= 10) {
          r.instances.push_back({"violation_" + std::string(to_string(b.id)) + "_c" + std::to_string(ci) + "_t" +
                                     std::to_string(t),
                                 *cells[t].ensemble});
        }
      }
    }
    const BoundId id = cases[ci].id;
    per_bound.push_back({{"bound", id == BoundId::masked ? cells.front().report.label : std::string(to_string(id))},
                         {"proven", is_proven(id)},
                         {"trials", c.samples},
                         {"violations", violations},
                         {"min_slack", min_slack}});
    (is_proven(id) ? proven_violations : conjecture_violations) += violations;
  }
  r.summary["per_bound"] = per_bound;
  r.summary["proven_violations"] = proven_violations;
  r.summary["conjecture_violations"] = conjecture_violations;
  r.summary["conjecture"] = c.conjecture;
  r.exit_code = proven_violations > 0 ? 1 : 0;
  r.wall_seconds = seconds_since(start);
  return r;
}

ExperimentReport cmd_hadamard(const ExperimentConfig& c) {
  validate(c);
  const auto start = Clock::now();
  ExperimentReport r;
  r.name = "hadamard";
  r.columns = {"n", "alpha", "explicit", "closed_form", "difference"};
  for (Index n : c.dims) {
    if (n < 2) throw Error(ErrorCode::InvalidArgument, "n must be >= 2");
    const double q = hadamard_quadratic_form(n, c.alpha);
    const double closed = hadamard_quadratic_form_closed(n, c.alpha);
    r.rows.push_back({n, c.alpha, q, closed, q - closed});
  }
  r.wall_seconds = seconds_since(start);
  return r;
}

ExperimentReport cmd_generate(const ExperimentConfig& c) {
  validate(c);
  StateModel model = StateModel::hilbert_schmidt;
  if (c.kind == "pure") {
    model = StateModel::pure;
  } else if (!c.kind.empty() && c.kind != "hs") {
    throw Error(ErrorCode::InvalidArgument, "kind must be hs or pure");
  }
  ExperimentReport r;
  r.name = "generate";
  r.columns = {"index", "K", "d", "hash"};
  std::size_t index = 0;
  for (Index K : c.Ks) {
    for (Index d : c.dims) {
      Rng rng({c.seed, index});
      auto e = random_ensemble(K, d, model, rng, {c.seed, kGeneratorName});
      r.rows.push_back({index, K, d, e.content_hash()});
      r.instances.push_back({"ensemble_K" + std::to_string(K) + "_d" + std::to_string(d), std::move(e)});
      ++index;
    }
  }
  return r;
}

ExperimentReport cmd_inspect(const ExperimentConfig& c) {
  if (!c.input) throw Error(ErrorCode::InvalidArgument, "inspect needs an input ensemble file");
  const auto e = load_input(c);
  ExperimentReport r;
  r.name = "inspect";
  r.columns = {"quantity", "value"};
  r.rows.push_back({"K", static_cast<double>(e.K())});
  r.rows.push_back({"d", static_cast<double>(e.dim())});
  r.rows.push_back({"chi", holevo_chi(e, c.log_base)});
  r.rows.push_back({"H(p)", shannon_entropy(e.weights(), c.log_base)});
  const RealMatrix rf = root_fidelity_table(e.states());
  for (Index i = 0; i < e.K(); ++i) {
    for (Index j = i + 1; j < e.K(); ++j) {
      r.rows.push_back({"F[" + std::to_string(i) + "," + std::to_string(j) + "]", rf(i, j) * rf(i, j)});
    }
  }
  // Entropy is undefined for an indefinite matrix; those cells stay empty.
  const auto entropy_cell = [&](const CorrelationMatrix& m) -> nlohmann::json {
    if (m.min_eigenvalue() < -1e-8) return nullptr;
    return m.entropy(c.log_base);
  };
  const auto rfm = root_fidelity_matrix(e);
  r.rows.push_back({"S(C_rootF)", entropy_cell(rfm)});
  r.rows.push_back({"S(C_F)", entropy_cell(squared_fidelity_matrix(e))});
  r.rows.push_back({"min_eig(C_rootF)", rfm.min_eigenvalue()});
  r.rows.push_back({"min_eig(E_half)", nonpsd_min_eigenvalue(e.states(), NonPsdKind::E_half)});
  r.rows.push_back({"min_eig(F)", nonpsd_min_eigenvalue(e.states(), NonPsdKind::C_F)});
  const auto& ev = rfm.matrix.eigenvalues();
  for (Index i = 0; i < ev.size(); ++i) r.rows.push_back({"eig(C_rootF)[" + std::to_string(i) + "]", ev(i)});
  return r;
}

ExperimentReport run_experiment(const ExperimentConfig& c) {
  const auto& s = c.subcommand;
  if (s == "conjecture-sweep") return cmd_conjecture_sweep(c);
  if (s == "positivity-scan") return cmd_positivity_scan(c);
  if (s == "fig1-gap") return cmd_fig1_gap(c);
  if (s == "bounds-battery") return cmd_bounds_battery(c);
  if (s == "hadamard") return cmd_hadamard(c);
  if (s == "generate") return cmd_generate(c);
  if (s == "inspect") return cmd_inspect(c);
  throw Error(ErrorCode::InvalidArgument, "unknown subcommand '" + s + "'");
}

nlohmann::json report_metadata(const ExperimentConfig& c, const ExperimentReport& r) {
  nlohmann::json m;
  m["experiment"] = r.name;
  m["version"] = FIDMAT_VERSION;
  m["seed"] = c.seed;
  m["generator"] = kGeneratorName;
  m["samples"] = c.samples;
  m["K"] = c.Ks;
  m["d"] = c.dims;
  m["log_base"] = c.log_base;
  m["tolerances"] = {{"proven_bound", c.tol},
                     {"inverse_chain", 10.0 * c.tol},
                     {"hermiticity", tol::kHermiticity},
                     {"psd", tol::kPsd},
                     {"negative_eigenvalue", 1e-8}};
  if (c.subcommand == "fig1-gap") {
    m["optimizer"] = {{"restarts", c.restarts},
                      {"iters", c.iters},
                      {"stopping", "200 consecutive proposals without a gain above 1e-9"}};
  }
  return m;
}

std::string render_csv(const ExperimentConfig& c, const ExperimentReport& r) {
  std::ostringstream os;
  os << "# timestamp: " << utc_timestamp() << "\n";
  os << "# wall_seconds: " << format_number(r.wall_seconds) << "\n";
  os << "# metadata: " << report_metadata(c, r).dump() << "\n";
  os << "# summary: " << r.summary.dump() << "\n";
  for (std::size_t i = 0; i < r.columns.size(); ++i) os << (i ? "," : "") << r.columns[i];
  os << "\n";
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_cell(row[i]);
    os << "\n";
  }
  return os.str();
}

std::string render_json(const ExperimentConfig& c, const ExperimentReport& r) {
  nlohmann::json j;
  j["metadata"] = report_metadata(c, r);
  j["metadata"]["timestamp"] = utc_timestamp();
  j["metadata"]["wall_seconds"] = r.wall_seconds;
  j["columns"] = r.columns;
  auto rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    nlohmann::json obj;
    for (std::size_t i = 0; i < r.columns.size() && i < row.size(); ++i) obj[r.columns[i]] = row[i];
    rows.push_back(std::move(obj));
  }
  j["rows"] = std::move(rows);
  j["summary"] = r.summary;
  auto inst = nlohmann::json::array();
  for (const auto& p : r.instances) inst.push_back({{"label", p.label}, {"ensemble", ensemble_to_json(p.ensemble)}});
  j["instances"] = std::move(inst);
  return j.dump(1);
}

std::optional<std::filesystem::path> resolve_output(const ExperimentConfig& c, const ExperimentReport& r) {
  const std::string ext = c.format == OutputFormat::json ? ".json" : ".csv";
  std::filesystem::path target = c.out;
  if (target.empty()) {
    const char* env = std::getenv("FIDMAT_OUT_DIR");
    if (env == nullptr || *env == '\0') return std::nullopt;
    target = env;
  }
  if (target == "-") return std::nullopt;
  if (std::filesystem::is_directory(target) || target.filename().empty()) return target / (r.name + ext);
  return target;
}

std::vector<std::filesystem::path> write_report(const ExperimentConfig& c, const ExperimentReport& r,
                                                std::ostream& fallback) {
  const std::string body = c.format == OutputFormat::json ? render_json(c, r) : render_csv(c, r);
  std::vector<std::filesystem::path> written;
  const auto path = resolve_output(c, r);
  if (!path) {
    fallback << body;
    if (c.format == OutputFormat::json) fallback << "\n";
  } else {
    if (path->has_parent_path()) std::filesystem::create_directories(path->parent_path());
    std::ofstream f(*path);
    if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write " + path->string());
    f << body;
    written.push_back(*path);
  }
  // Instances sit next to the report; without an output location only generated ensembles go to cwd.
  std::filesystem::path dir = path ? path->parent_path() : std::filesystem::path{};
  if (!path && r.name != "generate") return written;
  const std::string stem = path ? path->stem().string() + "_" : std::string{};
  for (const auto& inst : r.instances) {
    const auto p = dir / (stem + inst.label + ".json");
    save_ensemble(inst.ensemble, p);
    written.push_back(p);
  }
  return written;
}

}  // namespace fidmat
