#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "causalbias/audit.hpp"
#include "causalbias/errors.hpp"
#include "causalbias/scm.hpp"
#include "causalbias/version.hpp"

namespace {

using namespace causalbias;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("CAUSALBIAS_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ParseError("CAUSALBIAS_SEED is not an integer: " + std::string(env));
    }
  }
  return 0;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

double parse_num(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("bad number for " + what + ": " + s);
  }
}

// "structure:key=val,key=val,n=...,seed=..." -> ScmSpec
ScmSpec parse_simulate_spec(const std::string& text, std::uint64_t seed) {
  auto colon = text.find(':');
  std::string name = text.substr(0, colon);
  std::map<std::string, double> kv;
  if (colon != std::string::npos) {
    for (const auto& pair : split(text.substr(colon + 1), ',')) {
      auto eq = pair.find('=');
      if (eq == std::string::npos) throw ParseError("expected key=value in spec: " + pair);
      kv[pair.substr(0, eq)] = parse_num(pair.substr(eq + 1), pair.substr(0, eq));
    }
  }
  auto take = [&](const char* key, double fallback, bool required = false) {
    auto it = kv.find(key);
    if (it == kv.end()) {
      if (required) throw ParseError("simulate spec needs " + std::string(key));
      return fallback;
    }
    double v = it->second;
    kv.erase(it);
    return v;
  };
  ScmSpec spec;
  spec.n = static_cast<std::size_t>(take("n", 0, true));
  spec.seed = static_cast<std::uint64_t>(take("seed", static_cast<double>(seed)));
  if (name == "binary_confounding") {
    spec.structure = BinaryConfoundingSpec{ConfoundParams(
        take("alpha", 0, true), take("beta", 0, true), take("gamma", 0, true),
        take("delta", 0, true), take("epsilon", 0, true), take("tau", 0, true),
        take("lambda", 0.5))};
  } else if (name == "linear_confounding") {
    spec.structure =
        LinearConfoundingSpec{take("alpha", 0, true), take("beta", 0, true), take("gamma", 0, true)};
  } else if (name == "linear_colliding") {
    spec.structure =
        LinearCollidingSpec{take("alpha", 0, true), take("eta", 0, true), take("epsilon", 0, true)};
  } else if (name == "linear_measurement") {
    spec.structure = LinearMeasurementSpec{take("alpha", 0, true), take("beta", 0, true),
                                           take("gamma", 0, true), take("lambda", 0, true)};
  } else if (name == "linear_interaction") {
    spec.structure = LinearInteractionSpec{take("beta0", 0),     take("beta1", 0),
                                           take("beta2", 0),     take("beta3", 0),
                                           take("beta4", 0),     take("p_a1", 0.5),
                                           take("p_b1", 0.5)};
  } else if (name == "binary_measurement") {
    BinaryMeasurementSpec s = BinaryMeasurementSpec::randomize(spec.seed);
    s.p_z1 = take("p_z1", s.p_z1);
    s.p_a1_given_z1 = take("p_a1_given_z1", s.p_a1_given_z1);
    s.p_a1_given_z0 = take("p_a1_given_z0", s.p_a1_given_z0);
    s.p_t1_given_z1 = take("p_t1_given_z1", s.p_t1_given_z1);
    s.p_t1_given_z0 = take("p_t1_given_z0", s.p_t1_given_z0);
    spec.structure = s;
  } else if (name == "binary_interaction") {
    BinaryInteractionSpec s = BinaryInteractionSpec::randomize(spec.seed);
    s.p_a1 = take("p_a1", s.p_a1);
    s.p_b1 = take("p_b1", s.p_b1);
    spec.structure = s;
  } else {
    throw ParseError("unknown structure: " + name);
  }
  if (!kv.empty()) throw ParseError("unknown simulate parameter: " + kv.begin()->first);
  return spec;
}

std::vector<SweepAxis> parse_axes(const std::string& text) {
  std::vector<SweepAxis> axes;
  for (const auto& part : split(text, ',')) {
    auto eq = part.find('=');
    if (eq == std::string::npos) throw ParseError("expected name=lo:hi:step, got " + part);
    auto range = split(part.substr(eq + 1), ':');
    if (range.size() != 3) throw ParseError("expected lo:hi:step in axis " + part);
    axes.push_back(SweepAxis{part.substr(0, eq), parse_num(range[0], "axis lo"),
                             parse_num(range[1], "axis hi"), parse_num(range[2], "axis step")});
  }
  return axes;
}

int dispatch(int argc, char** argv) {
  CLI::App app{"causal bias audit: closed-form confounding, selection, measurement and "
               "interaction biases with enumeration and Monte Carlo oracles"};
  app.set_version_flag("--version", std::string("causalbias ") + kToolVersion +
                                        " (report format " + kReportFormatVersion + ")");
  app.require_subcommand(1);
  std::uint64_t seed = default_seed();

  // audit
  auto* audit_cmd = app.add_subcommand("audit", "compute biases from data and a causal graph");
  AuditConfig config;
  std::string data_path, simulate_text, sensitive_text, bias_text, adjust_text = "each";
  std::string out_path, error_mech_text;
  std::vector<std::string> map_entries;
  audit_cmd->add_option("--data", data_path, "CSV input with a header row");
  audit_cmd->add_option("--simulate", simulate_text,
                        "inline generator spec structure:key=val,... (alternative to --data)");
  audit_cmd->add_option("--graph", config.graph_path, "graph file")->required();
  audit_cmd->add_option("--sensitive", sensitive_text, "sensitive variable(s), comma separated");
  audit_cmd->add_option("--outcome", config.outcome, "outcome variable");
  audit_cmd->add_option("--bias", bias_text, "auto (default) or list: conf,sel,meas,int");
  audit_cmd->add_option("--adjust", adjust_text, "each (default) or all");
  audit_cmd->add_option("--seed", seed, "seed recorded in the report and used by --simulate");
  audit_cmd->add_option("--map", map_entries, "rename CSV columns: csv_name=graph_name");
  audit_cmd->add_option("--error-mech", error_mech_text,
                        "P(t1|z0),P(t0|z1) when the latent confounder is absent from data");
  audit_cmd->add_option("--tolerance", config.binary_tolerance,
                        "closed-form vs oracle tolerance on exact paths");
  audit_cmd->add_option("--out", out_path, "report path (stdout when omitted)");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "closed-form bias grids as CSV");
  std::string sweep_bias, axes_text, fixed_text, sweep_out;
  std::vector<double> holds;
  bool standardized = false;
  int threads = 1;
  sweep_cmd->add_option("--bias", sweep_bias, "conf|sel|meas")->required();
  sweep_cmd->add_option("--axes", axes_text, "name=lo:hi:step[,name=lo:hi:step]")->required();
  sweep_cmd->add_option("--fixed", fixed_text, "non-axis parameters: name=value,...");
  sweep_cmd->add_option("--hold", holds, "emit per-parameter slice CSVs holding others at this value");
  sweep_cmd->add_flag("--std", standardized, "standardized corollary forms");
  sweep_cmd->add_option("--threads", threads, "evaluation threads (output-invariant)");
  sweep_cmd->add_option("--out", sweep_out, "grid CSV path")->required();

  // selftest
  auto* selftest_cmd = app.add_subcommand("selftest", "oracle-equivalence batteries");
  selftest_cmd->add_option("--seed", seed, "base seed for the batteries");

  CLI11_PARSE(app, argc, argv);

  if (audit_cmd->parsed()) {
    if (!data_path.empty()) config.data_path = data_path;
    if (!simulate_text.empty()) config.simulate_spec = parse_simulate_spec(simulate_text, seed);
    if (!sensitive_text.empty()) config.sensitive = split(sensitive_text, ',');
    if (!bias_text.empty() && bias_text != "auto") config.biases = split(bias_text, ',');
    if (adjust_text == "each")
      config.adjust = AdjustMode::Each;
    else if (adjust_text == "all")
      config.adjust = AdjustMode::All;
    else
      throw ParseError("--adjust must be each or all");
    for (const auto& m : map_entries) {
      auto eq = m.find('=');
      if (eq == std::string::npos) throw ParseError("--map expects csv_name=graph_name");
      config.column_map[m.substr(0, eq)] = m.substr(eq + 1);
    }
    if (!error_mech_text.empty()) {
      auto parts = split(error_mech_text, ',');
      if (parts.size() != 2) throw ParseError("--error-mech expects two probabilities u,v");
      config.error_mech = ErrorMechanism{parse_num(parts[0], "P(t1|z0)"),
                                         parse_num(parts[1], "P(t0|z1)")};
    }
    config.seed = seed;
    if (!out_path.empty()) config.out_path = out_path;

    BiasReport report = run_audit(config);
    std::string json = report.to_json();
    if (config.out_path) {
      std::ofstream out(*config.out_path, std::ios::binary);
      if (!out) throw ParseError(*config.out_path, 0, "cannot open report path");
      out << json;
    } else {
      std::cout << json;
    }
    bool passed = json.find("\"passed\": true") != std::string::npos;
    return passed ? 0 : 1;
  }

  if (sweep_cmd->parsed()) {
    SweepRequest request;
    request.kind = bias_kind_from_string(sweep_bias);
    request.axes = parse_axes(axes_text);
    request.standardized = standardized;
    request.threads = threads;
    if (!fixed_text.empty()) {
      for (const auto& pair : split(fixed_text, ',')) {
        auto eq = pair.find('=');
        if (eq == std::string::npos) throw ParseError("--fixed expects name=value");
        request.fixed[pair.substr(0, eq)] = parse_num(pair.substr(eq + 1), pair.substr(0, eq));
      }
    }
    // unspecified parameters default to the 0.5 hold convention
    for (const auto& name : sweep_parameters(request.kind)) {
      bool on_axis = false;
      for (const auto& axis : request.axes) on_axis = on_axis || axis.name == name;
      if (!on_axis && !request.fixed.count(name)) request.fixed[name] = 0.5;
    }
    run_sweep_files(request, sweep_out, holds);
    return 0;
  }

  if (selftest_cmd->parsed()) {
    SelftestReport report = run_selftest(seed);
    std::cout << report.text();
    return report.passed ? 0 : 1;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const causalbias::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const causalbias::StructureError& e) {
    std::cerr << "structure error: " << e.what() << "\n";
    return 3;
  } catch (const causalbias::PositivityError& e) {
    std::cerr << "positivity error: " << e.what() << "\n";
    return 4;
  } catch (const causalbias::SingularError& e) {
    std::cerr << "singularity error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
