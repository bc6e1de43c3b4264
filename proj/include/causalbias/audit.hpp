#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "causalbias/closed_forms.hpp"
#include "causalbias/dataset.hpp"
#include "causalbias/graph.hpp"
#include "causalbias/scm.hpp"

namespace causalbias {

/// CSV with a required header row; cells must parse as finite doubles.
Dataset read_csv(const std::string& path);
Dataset read_csv_stream(std::istream& in, const std::string& source_name);
void write_csv(const Dataset& data, const std::string& path);

enum class AdjustMode { Each, All };

struct AuditConfig {
  std::optional<std::string> data_path;     // CSV input
  std::optional<ScmSpec> simulate_spec;     // alternative inline source
  std::string graph_path;
  std::vector<std::string> sensitive;       // defaults to role=sensitive nodes
  std::string outcome;                      // defaults to the role=outcome node
  std::vector<std::string> biases;          // empty = auto from structure
  AdjustMode adjust = AdjustMode::Each;
  double binary_tolerance = 1e-9;           // closed-form vs oracle, exact paths
  std::uint64_t seed = 0;
  std::map<std::string, std::string> column_map;  // csv name -> graph name
  std::optional<ErrorMechanism> error_mech;       // for measurement without Z in data
  std::optional<std::string> out_path;            // report JSON; stdout when empty
};

struct BiasEntry {
  std::string kind;                   // "confounding", "selection", "measurement", "interaction"
  std::vector<std::string> adjust_set;
  std::string formula;                // theorem / definition tag
  double closed_form = 0.0;
  std::optional<double> oracle;       // disparity-difference route
  std::optional<double> abs_diff;
  std::map<std::string, double> parameters;
};

struct BiasReport {
  std::vector<BiasEntry> entries;
  std::uint64_t seed = 0;
  std::size_t sample_count = 0;
  std::string data_source;
  std::string graph_source;

  /// Stable-key-order JSON with version fields; byte-identical for identical
  /// config and seed.
  std::string to_json() const;
};

/// Ingests data + graph, routes each requested bias to its closed form and
/// disparity-difference oracle. Throws ParseError / StructureError /
/// PositivityError / SingularError; the CLI maps these to exit codes 2/3/4/4.
BiasReport run_audit(const AuditConfig& config);

/// Writes the grid CSV (header `<axes...>,bias`, '.' decimal, ',' delimiter, LF
/// endings) and, for each hold convention, one slice CSV per closed-form
/// parameter varied alone with the others held at the hold value.
/// Returns the paths written.
std::vector<std::string> run_sweep_files(const SweepRequest& request, const std::string& out_path,
                                         const std::vector<double>& holds);

std::string sweep_grid_csv(const SweepGrid& grid);

struct SelftestOptions {
  std::size_t binary_draws = 1000;
  std::size_t measurement_draws = 200;
  std::size_t table_draws = 200;
  std::size_t mc_samples = 1000000;
  /// Test hook: overrides the confounding closed form in the binary battery.
  std::function<double(const ConfoundParams&)> conf_formula;
};

struct SelftestBattery {
  std::string name;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct SelftestReport {
  std::vector<SelftestBattery> batteries;
  bool passed = false;

  std::string text() const;  // one line per battery, deterministic
};

/// Oracle-equivalence batteries over seeded random parameters: every binary
/// closed form against enumeration, the interaction identities, and the linear
/// Monte Carlo consistency checks.
SelftestReport run_selftest(std::uint64_t seed, const SelftestOptions& options = {});

}  // namespace causalbias
