#pragma once

// Experiment drivers behind the command line tool. Each produces a report of
// fixed-schema rows plus summary values and the instances worth keeping.

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fidmat/bounds.hpp"
#include "fidmat/search.hpp"

namespace fidmat {

enum class OutputFormat { csv, json };

struct ExperimentConfig {
  std::string subcommand;
  std::vector<Index> Ks{3};
  std::vector<Index> dims{2};
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  /// E_half | C_F for positivity scans; hs | pure for ensemble generation.
  std::string kind;
  std::vector<double> b_values{0.0, 0.25, 0.5};
  double alpha = 0.5;
  int restarts = 20;
  int iters = 4000;
  /// Slack tolerance for proven bounds; inverse chains use ten times this.
  double tol = kProvenBoundTol;
  double log_base = 2.0;
  OutputFormat format = OutputFormat::csv;
  /// File or directory; empty means $FIDMAT_OUT_DIR, else stdout.
  std::filesystem::path out;
  /// Ensemble file for inspect, or a fixture replacing random draws.
  std::optional<std::filesystem::path> input;
  /// Include the three-state conjecture in the bounds battery.
  bool conjecture = false;
  /// Test hook applied to every battery report before the verdict.
  std::function<void(BoundReport&)> fault_hook;
};

/// Throws InvalidArgument for non-positive sizes, empty lists and the like.
void validate(const ExperimentConfig& c);

struct PersistedInstance {
  std::string label;
  Ensemble ensemble;
};

struct ExperimentReport {
  std::string name;
  std::vector<std::string> columns;
  /// One JSON array per row, matching columns.
  std::vector<nlohmann::json> rows;
  nlohmann::json summary = nlohmann::json::object();
  std::vector<PersistedInstance> instances;
  double wall_seconds = 0.0;
  int exit_code = 0;
};

ExperimentReport cmd_conjecture_sweep(const ExperimentConfig& c);
ExperimentReport cmd_positivity_scan(const ExperimentConfig& c);
ExperimentReport cmd_fig1_gap(const ExperimentConfig& c);
ExperimentReport cmd_bounds_battery(const ExperimentConfig& c);
ExperimentReport cmd_hadamard(const ExperimentConfig& c);
ExperimentReport cmd_generate(const ExperimentConfig& c);
ExperimentReport cmd_inspect(const ExperimentConfig& c);

/// Dispatches on c.subcommand.
ExperimentReport run_experiment(const ExperimentConfig& c);

/// Metadata shared by every output: seed, generator, tolerances, version.
nlohmann::json report_metadata(const ExperimentConfig& c, const ExperimentReport& r);

/// CSV body with '#' metadata lines first; only those lines vary between runs.
std::string render_csv(const ExperimentConfig& c, const ExperimentReport& r);
std::string render_json(const ExperimentConfig& c, const ExperimentReport& r);

/// Resolves the output path (c.out, then $FIDMAT_OUT_DIR); nullopt for stdout.
std::optional<std::filesystem::path> resolve_output(const ExperimentConfig& c, const ExperimentReport& r);

/// Writes the report and its instances; returns the paths written.
std::vector<std::filesystem::path> write_report(const ExperimentConfig& c, const ExperimentReport& r,
                                                std::ostream& fallback);

}  // namespace fidmat
