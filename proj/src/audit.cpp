#include "causalbias/audit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "causalbias/errors.hpp"
#include "causalbias/rng.hpp"
#include "causalbias/version.hpp"

namespace causalbias {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

std::string format_double(double v) {
  if (v == 0.0) return "0";  // avoid "-0" cells
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

Dataset read_csv_stream(std::istream& in, const std::string& source_name) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source_name, 0, "missing header row");
  auto header = split_csv_line(line);
  if (header.empty()) throw ParseError(source_name, 1, "empty header row");
  for (const auto& h : header)
    if (h.empty()) throw ParseError(source_name, 1, "empty column name in header");

  std::vector<std::vector<double>> columns(header.size());
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw ParseError(source_name, lineno,
                       "expected " + std::to_string(header.size()) + " fields, got " +
                           std::to_string(fields.size()));
    for (std::size_t j = 0; j < fields.size(); ++j) {
      try {
        std::size_t pos = 0;
        double v = std::stod(fields[j], &pos);
        if (pos != fields[j].size() || !std::isfinite(v)) throw std::invalid_argument(fields[j]);
        columns[j].push_back(v);
      } catch (const std::exception&) {
        throw ParseError(source_name, lineno, "bad numeric value '" + fields[j] + "' in column " +
                                                  header[j]);
      }
    }
  }
  if (columns[0].empty()) throw ParseError(source_name, lineno, "no data rows");
  Dataset d;
  for (std::size_t j = 0; j < header.size(); ++j) d.add_column(header[j], std::move(columns[j]));
  return d;
}

Dataset read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  return read_csv_stream(in, path);
}

void write_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path, 0, "cannot open file for writing");
  for (std::size_t j = 0; j < data.names.size(); ++j) {
    if (j) out << ',';
    out << data.names[j];
  }
  out << '\n';
  for (std::size_t r = 0; r < data.row_count(); ++r) {
    for (std::size_t j = 0; j < data.columns.size(); ++j) {
      if (j) out << ',';
      out << format_double(data.columns[j][r]);
    }
    out << '\n';
  }
}

namespace {

// Strict binary ingestion for a set of columns; non-{0,1} cells are a data
// contract violation, reported with the column name.
JointTable binary_table(const Dataset& data, const std::vector<std::string>& vars) {
  for (const auto& v : vars)
    if (!data.is_binary(v))
      throw ParseError("column " + v + " is not strictly binary ({0,1} literals required)");
  std::vector<std::vector<int>> rows(data.row_count(), std::vector<int>(vars.size()));
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const auto& col = data.column(vars[j]);
    for (std::size_t r = 0; r < col.size(); ++r) rows[r][j] = static_cast<int>(col[r]);
  }
  return JointTable::from_samples(rows, vars);
}

struct AuditContext {
  const AuditConfig& config;
  Dataset data;
  CausalGraph graph;
  std::string sensitive;
  std::string outcome;
  StructureTags tags;
  std::size_t n = 0;
  double exact_tol = 1e-9;
  double approx_tol = 0.01;
};

BiasEntry make_entry(const std::string& kind, std::vector<std::string> adjust_set,
                     std::string formula, double closed, std::optional<double> oracle,
                     double tolerance) {
  BiasEntry e;
  e.kind = kind;
  e.adjust_set = std::move(adjust_set);
  e.formula = std::move(formula);
  e.closed_form = closed;
  e.oracle = oracle;
  if (oracle) e.abs_diff = std::abs(closed - *oracle);
  e.parameters["tolerance"] = tolerance;
  return e;
}

void audit_confounding(AuditContext& ctx, std::vector<BiasEntry>& entries) {
  std::vector<std::string> confs;
  for (const auto& z : ctx.tags.confounders)
    if (!ctx.graph.node(z).latent) confs.push_back(z);
  if (confs.empty())
    throw StructureError("confounding bias requested but the graph has no observed confounder of " +
                         ctx.sensitive + " and " + ctx.outcome);
  for (const auto& z : confs)
    if (!ctx.data.has(z)) throw StructureError("confounder " + z + " missing from data");

  bool binary = ctx.data.is_binary(ctx.sensitive) && ctx.data.is_binary(ctx.outcome) &&
                std::all_of(confs.begin(), confs.end(),
                            [&](const std::string& z) { return ctx.data.is_binary(z); });

  if (binary) {
    if (ctx.config.adjust == AdjustMode::Each) {
      for (const auto& z : confs) {
        JointTable t = binary_table(ctx.data, {ctx.sensitive, z, ctx.outcome});
        ConfoundParams p = ConfoundParams::from_table(t, ctx.outcome, ctx.sensitive, z);
        double closed = conf_bias_binary(p);
        double oracle = stat_disp(t, ctx.outcome, ctx.sensitive) -
                        stat_disp_adjusted(t, ctx.outcome, ctx.sensitive, {z});
        BiasEntry e = make_entry("confounding", {z}, "conf-binary-general", closed, oracle,
                                 ctx.exact_tol);
        e.parameters["alpha"] = p.alpha;
        e.parameters["beta"] = p.beta;
        e.parameters["gamma"] = p.gamma;
        e.parameters["delta"] = p.delta;
        e.parameters["epsilon"] = p.epsilon;
        e.parameters["tau"] = p.tau;
        e.parameters["lambda"] = p.lambda;
        entries.push_back(std::move(e));
      }
    } else {
      std::vector<std::string> vars = {ctx.sensitive};
      vars.insert(vars.end(), confs.begin(), confs.end());
      vars.push_back(ctx.outcome);
      JointTable t = binary_table(ctx.data, vars);
      double oracle = stat_disp(t, ctx.outcome, ctx.sensitive) -
                      stat_disp_adjusted(t, ctx.outcome, ctx.sensitive, confs);
      double closed = oracle;
      std::string formula = "conf-definition";
      if (confs.size() == 1) {
        closed = conf_bias_binary(
            ConfoundParams::from_table(t, ctx.outcome, ctx.sensitive, confs[0]));
        formula = "conf-binary-general";
      }
      entries.push_back(make_entry("confounding", confs, formula, closed, oracle, ctx.exact_tol));
    }
    return;
  }

  // Linear route: covariance-form theorem against the regression-difference oracle.
  std::vector<std::string> vars = {ctx.outcome, ctx.sensitive};
  vars.insert(vars.end(), confs.begin(), confs.end());
  Dataset sub;
  for (const auto& v : vars) sub.add_column(v, ctx.data.column(v));
  CovMatrix cov = sample_moments(sub);
  if (ctx.config.adjust == AdjustMode::Each || confs.size() == 1) {
    for (const auto& z : confs) {
      double closed = conf_bias_linear(cov, ctx.outcome, ctx.sensitive, z);
      double oracle = beta_coef(cov, ctx.outcome, ctx.sensitive) -
                      beta_partial1(cov, ctx.outcome, ctx.sensitive, z);
      entries.push_back(
          make_entry("confounding", {z}, "conf-linear-cov", closed, oracle, ctx.exact_tol));
    }
  } else if (confs.size() == 2) {
    Dataset std_sub = standardize(sub);
    CovMatrix std_cov = sample_moments(std_sub);
    double n_tol = 6.0 / std::sqrt(static_cast<double>(ctx.n));
    double closed =
        conf_bias_two(std_cov, ctx.outcome, ctx.sensitive, confs[0], confs[1], std::max(0.05, n_tol));
    double oracle = beta_coef(std_cov, ctx.outcome, ctx.sensitive) -
                    beta_partial2(std_cov, ctx.outcome, ctx.sensitive, confs[0], confs[1]);
    entries.push_back(
        make_entry("confounding", confs, "conf-linear-two", closed, oracle, ctx.approx_tol));
  } else {
    // More than two controls: generic OLS partial coefficient, definition route.
    std::vector<std::string> predictors = {ctx.sensitive};
    predictors.insert(predictors.end(), confs.begin(), confs.end());
    OlsFit with = ols_fit(sub, ctx.outcome, predictors);
    double adjusted = with.coef(ctx.sensitive);
    double closed = beta_coef(cov, ctx.outcome, ctx.sensitive) - adjusted;
    entries.push_back(
        make_entry("confounding", confs, "conf-definition", closed, closed, ctx.exact_tol));
  }
}

void audit_selection(AuditContext& ctx, std::vector<BiasEntry>& entries) {
  if (ctx.tags.conditioned_colliders.empty())
    throw StructureError("selection bias requested but the graph has no conditioned collider of " +
                         ctx.sensitive + " and " + ctx.outcome);
  for (const auto& w : ctx.tags.conditioned_colliders) {
    if (!ctx.data.has(w)) throw StructureError("collider " + w + " missing from data");
    bool binary = ctx.data.is_binary(ctx.sensitive) && ctx.data.is_binary(ctx.outcome) &&
                  ctx.data.is_binary(w);
    if (binary) {
      JointTable t = binary_table(ctx.data, {ctx.sensitive, w, ctx.outcome});
      // SelBias = StatDisp_W - StatDisp = -(general confounding form with W in
      // the Z slot); exact for any group proportion.
      ConfoundParams p = ConfoundParams::from_table(t, ctx.outcome, ctx.sensitive, w);
      double closed = -conf_bias_binary(p);
      double oracle = stat_disp_adjusted(t, ctx.outcome, ctx.sensitive, {w}) -
                      stat_disp(t, ctx.outcome, ctx.sensitive);
      entries.push_back(
          make_entry("selection", {w}, "sel-binary", closed, oracle, ctx.exact_tol));
    } else {
      Dataset sub;
      for (const auto& v : {ctx.outcome, ctx.sensitive, w}) sub.add_column(v, ctx.data.column(v));
      CovMatrix cov = sample_moments(sub);
      double closed = sel_bias_linear(cov, ctx.outcome, ctx.sensitive, w);
      double oracle = beta_partial1(cov, ctx.outcome, ctx.sensitive, w) -
                      beta_coef(cov, ctx.outcome, ctx.sensitive);
      entries.push_back(
          make_entry("selection", {w}, "sel-linear-cov", closed, oracle, ctx.exact_tol));
    }
  }
}

void audit_measurement(AuditContext& ctx, std::vector<BiasEntry>& entries) {
  if (ctx.tags.proxies.empty())
    throw StructureError("measurement bias requested but the graph has no proxy of a latent confounder");
  for (const auto& t_var : ctx.tags.proxies) {
    if (!ctx.data.has(t_var)) throw StructureError("proxy " + t_var + " missing from data");
    // The latent confounder behind this proxy.
    std::string z_var;
    for (const auto& p : ctx.graph.parents(t_var)) {
      if (ctx.graph.node(p).latent &&
          std::find(ctx.tags.confounders.begin(), ctx.tags.confounders.end(), p) !=
              ctx.tags.confounders.end()) {
        z_var = p;
        break;
      }
    }
    bool z_in_data = !z_var.empty() && ctx.data.has(z_var);

    bool binary = ctx.data.is_binary(ctx.sensitive) && ctx.data.is_binary(ctx.outcome) &&
                  ctx.data.is_binary(t_var) && (!z_in_data || ctx.data.is_binary(z_var));
    if (binary) {
      ErrorMechanism mech;
      std::optional<double> oracle;
      if (z_in_data) {
        JointTable full = binary_table(ctx.data, {z_var, ctx.sensitive, t_var, ctx.outcome});
        mech.t1_given_z0 = full.cond_prob({{t_var, 1}}, {{z_var, 0}});
        mech.t0_given_z1 = full.cond_prob({{t_var, 0}}, {{z_var, 1}});
        oracle = stat_disp_adjusted(full, ctx.outcome, ctx.sensitive, {t_var}) -
                 stat_disp_adjusted(full, ctx.outcome, ctx.sensitive, {z_var});
      } else if (ctx.config.error_mech) {
        mech = *ctx.config.error_mech;
      } else {
        throw StructureError("measurement bias needs the latent confounder in the data or an "
                             "explicit error mechanism P(T|Z)");
      }
      JointTable obs = binary_table(ctx.data, {ctx.sensitive, t_var, ctx.outcome});
      MeasurementParams p =
          MeasurementParams::from_table(obs, ctx.outcome, ctx.sensitive, t_var, mech);
      double closed = meas_bias_binary(p);
      BiasEntry e = make_entry("measurement", {t_var}, "meas-binary", closed, oracle,
                               ctx.approx_tol);
      e.parameters["t1_given_z0"] = mech.t1_given_z0;
      e.parameters["t0_given_z1"] = mech.t0_given_z1;
      entries.push_back(std::move(e));
    } else {
      if (!z_in_data)
        throw StructureError("linear measurement bias needs the latent confounder column " +
                             z_var + " (synthetic check data) to adjust on");
      Dataset sub;
      for (const auto& v : {ctx.outcome, ctx.sensitive, z_var, t_var})
        sub.add_column(v, ctx.data.column(v));
      CovMatrix cov = sample_moments(sub);
      double closed = meas_bias_linear(cov, ctx.outcome, ctx.sensitive, z_var, t_var);
      double oracle = beta_partial1(cov, ctx.outcome, ctx.sensitive, t_var) -
                      beta_partial1(cov, ctx.outcome, ctx.sensitive, z_var);
      entries.push_back(
          make_entry("measurement", {t_var}, "meas-linear-cov", closed, oracle, ctx.exact_tol));
    }
  }
}

void audit_interaction(AuditContext& ctx, std::vector<BiasEntry>& entries) {
  if (ctx.tags.second_sensitive.empty())
    throw StructureError("interaction bias requested but the graph has a single sensitive variable");
  const std::string& b = ctx.tags.second_sensitive.front();
  if (!ctx.data.has(b)) throw StructureError("second sensitive variable " + b + " missing from data");
  const std::string& a = ctx.sensitive;
  const std::string& y = ctx.outcome;

  bool binary = ctx.data.is_binary(a) && ctx.data.is_binary(b) && ctx.data.is_binary(y);
  if (binary) {
    JointTable t = binary_table(ctx.data, {a, b, y});
    double inter = interaction_term(t, y, a, b);
    double joint = t.cond_prob({{y, 1}}, {{a, 1}, {b, 1}}) -
                   t.cond_prob({{y, 1}}, {{a, 0}, {b, 0}});
    double oracle_intersectional =
        joint - (sd_no_interaction(t, y, a, b) + sd_no_interaction(t, y, b, a));
    entries.push_back(make_entry("interaction", {}, "int-intersectional", inter,
                                 oracle_intersectional, ctx.exact_tol));
    double indep_tol = std::max(1e-9, 5.0 / std::sqrt(static_cast<double>(ctx.n)));
    for (auto [target, name, other] :
         {std::tuple{SensitiveTarget::A, a, b}, std::tuple{SensitiveTarget::B, b, a}}) {
      double closed = int_bias_individual(t, y, a, b, target, indep_tol);
      double oracle = stat_disp(t, y, name) - sd_no_interaction(t, y, name, other);
      entries.push_back(make_entry("interaction", {name}, "int-individual", closed, oracle,
                                   ctx.approx_tol));
    }
  } else {
    OlsFit with = ols_fit(ctx.data, y, {a, b}, std::make_pair(a, b));
    OlsFit without = ols_fit(ctx.data, y, {a, b});
    double beta3 = with.coef(a + "*" + b);
    double pa1 = 0.0, pb1 = 0.0;
    for (double v : ctx.data.column(a)) pa1 += v;
    for (double v : ctx.data.column(b)) pb1 += v;
    pa1 /= static_cast<double>(ctx.n);
    pb1 /= static_cast<double>(ctx.n);
    InteractionLinearSpec spec;
    spec.beta3 = beta3;
    spec.p_a1 = pa1;
    spec.p_b1 = pb1;
    BiasEntry inter = make_entry("interaction", {}, "int-linear-intersectional",
                                 int_bias_linear(spec, InteractionScope::Intersectional),
                                 std::nullopt, ctx.approx_tol);
    inter.parameters["beta3"] = beta3;
    entries.push_back(std::move(inter));
    entries.push_back(make_entry("interaction", {a}, "int-linear-individual",
                                 int_bias_linear(spec, InteractionScope::IndividualA),
                                 without.coef(a) - with.coef(a), ctx.approx_tol));
    entries.push_back(make_entry("interaction", {b}, "int-linear-individual",
                                 int_bias_linear(spec, InteractionScope::IndividualB),
                                 without.coef(b) - with.coef(b), ctx.approx_tol));
  }
}

}  // namespace

BiasReport run_audit(const AuditConfig& config) {
  CausalGraph graph = CausalGraph::parse_file(config.graph_path);
  ValidationReport validation = graph.validate();
  if (!validation.ok())
    throw ParseError(config.graph_path, 0,
                     "invalid graph: " + validation.violations.front().kind + " (" +
                         validation.violations.front().message + ")");

  Dataset data;
  std::string data_source;
  if (config.data_path) {
    data = read_csv(*config.data_path);
    data_source = *config.data_path;
  } else if (config.simulate_spec) {
    data = simulate(*config.simulate_spec);
    data_source = "simulated:" + structure_name(config.simulate_spec->structure);
  } else {
    throw std::invalid_argument("audit needs --data or an inline simulation spec");
  }
  for (const auto& [from, to] : config.column_map) {
    auto it = std::find(data.names.begin(), data.names.end(), from);
    if (it == data.names.end()) throw ParseError(data_source, 0, "--map source column not found: " + from);
    *it = to;
  }

  AuditContext ctx{config, std::move(data), std::move(graph)};
  ctx.n = ctx.data.row_count();
  ctx.exact_tol = config.binary_tolerance;
  ctx.approx_tol = std::max(0.01, 30.0 / std::sqrt(static_cast<double>(ctx.n)));

  // Resolve sensitive / outcome from config or roles.
  if (!config.sensitive.empty()) {
    ctx.sensitive = config.sensitive.front();
  } else {
    for (const auto& n : ctx.graph.nodes())
      if (n.role == NodeRole::Sensitive) {
        ctx.sensitive = n.name;
        break;
      }
  }
  if (!config.outcome.empty()) {
    ctx.outcome = config.outcome;
  } else {
    for (const auto& n : ctx.graph.nodes())
      if (n.role == NodeRole::Outcome) {
        ctx.outcome = n.name;
        break;
      }
  }
  if (ctx.sensitive.empty() || ctx.outcome.empty())
    throw StructureError("graph must declare sensitive and outcome variables (or pass --sensitive/--outcome)");
  if (!ctx.data.has(ctx.sensitive))
    throw StructureError("sensitive variable " + ctx.sensitive + " missing from data");
  if (!ctx.data.has(ctx.outcome))
    throw StructureError("outcome variable " + ctx.outcome + " missing from data");

  ctx.tags = ctx.graph.classify_structure(ctx.sensitive, ctx.outcome);

  std::vector<std::string> biases = config.biases;
  if (biases.empty()) {  // auto-detect from structure
    bool has_observed_conf = false;
    for (const auto& z : ctx.tags.confounders)
      if (!ctx.graph.node(z).latent) has_observed_conf = true;
    if (has_observed_conf) biases.push_back("conf");
    if (!ctx.tags.conditioned_colliders.empty()) biases.push_back("sel");
    if (!ctx.tags.proxies.empty()) biases.push_back("meas");
    if (!ctx.tags.second_sensitive.empty()) biases.push_back("int");
    if (biases.empty())
      throw StructureError("graph exposes no bias structure between " + ctx.sensitive + " and " +
                           ctx.outcome);
  }

  BiasReport report;
  report.seed = config.seed;
  report.sample_count = ctx.n;
  report.data_source = data_source;
  report.graph_source = config.graph_path;
  for (const auto& bias : biases) {
    if (bias == "conf")
      audit_confounding(ctx, report.entries);
    else if (bias == "sel")
      audit_selection(ctx, report.entries);
    else if (bias == "meas")
      audit_measurement(ctx, report.entries);
    else if (bias == "int")
      audit_interaction(ctx, report.entries);
    else
      throw std::invalid_argument("unknown bias kind: " + bias + " (expected conf|sel|meas|int)");
  }
  return report;
}

std::string BiasReport::to_json() const {
  ordered_json j;
  j["format_version"] = kReportFormatVersion;
  j["tool_version"] = kToolVersion;
  j["seed"] = seed;
  j["sample_count"] = sample_count;
  j["data"] = data_source;
  j["graph"] = graph_source;
  bool ok = true;
  ordered_json entries_json = ordered_json::array();
  for (const auto& e : entries) {
    ordered_json je;
    je["kind"] = e.kind;
    je["adjust_set"] = e.adjust_set;
    je["formula"] = e.formula;
    je["closed_form"] = e.closed_form;
    if (e.oracle) {
      je["oracle"] = *e.oracle;
      je["abs_diff"] = *e.abs_diff;
      double tol = e.parameters.count("tolerance") ? e.parameters.at("tolerance") : 0.0;
      bool within = *e.abs_diff < tol;
      je["within_tolerance"] = within;
      ok = ok && within;
    }
    ordered_json params;
    for (const auto& [k, v] : e.parameters) params[k] = v;
    je["parameters"] = params;
    entries_json.push_back(std::move(je));
  }
  j["passed"] = ok;
  j["entries"] = std::move(entries_json);
  return j.dump(2) + "\n";
}

std::string sweep_grid_csv(const SweepGrid& grid) {
  std::ostringstream out;
  for (const auto& name : grid.coordinate_names) out << name << ',';
  out << "bias\n";
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    for (double c : grid.coordinates[i]) out << format_double(c) << ',';
    if (std::isnan(grid.values[i]))
      out << "nan\n";
    else
      out << format_double(grid.values[i]) << '\n';
  }
  return out.str();
}

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path, 0, "cannot open file for writing");
  out << text;
}

std::string slice_suffix(double hold) {
  std::string s = format_double(hold);
  for (char& c : s)
    if (c == '-') c = 'm';
  return s;
}

}  // namespace

std::vector<std::string> run_sweep_files(const SweepRequest& request, const std::string& out_path,
                                         const std::vector<double>& holds) {
  std::vector<std::string> written;
  SweepGrid grid = sweep(request);
  write_text(out_path, sweep_grid_csv(grid));
  written.push_back(out_path);

  if (!grid.singularities.empty()) {
    std::ostringstream log;
    for (const auto& s : grid.singularities) log << s << '\n';
    std::string log_path = out_path + ".singular.log";
    write_text(log_path, log.str());
    written.push_back(log_path);
  }

  // One-dimensional slices: vary each closed-form parameter alone over the
  // first axis range, holding the others at the hold value.
  std::string stem = out_path;
  if (auto dot = stem.rfind(".csv"); dot != std::string::npos && dot == stem.size() - 4)
    stem = stem.substr(0, dot);
  const SweepAxis& base = request.axes.front();
  for (double hold : holds) {
    for (const auto& param : sweep_parameters(request.kind)) {
      SweepRequest slice;
      slice.kind = request.kind;
      slice.standardized = request.standardized;
      slice.threads = request.threads;
      slice.axes = {SweepAxis{param, base.lo, base.hi, base.step}};
      for (const auto& other : sweep_parameters(request.kind))
        if (other != param) slice.fixed[other] = hold;
      SweepGrid sg = sweep(slice);
      std::string path = stem + "_hold" + slice_suffix(hold) + "_" + param + ".csv";
      write_text(path, sweep_grid_csv(sg));
      written.push_back(path);
    }
  }
  return written;
}

namespace {

double max_abs(double a, double b) { return std::max(std::abs(a), std::abs(b)); }

SelftestBattery battery_conf_general(std::uint64_t seed, std::size_t draws,
                                     const std::function<double(const ConfoundParams&)>& formula) {
  SelftestBattery b{"binary confounding: closed form vs enumeration", 0.0, 1e-12, false};
  Rng rng(derive_seed(seed, 1));
  for (std::size_t i = 0; i < draws; ++i) {
    ConfoundParams p = ConfoundParams::random(rng);
    JointTable t = enumerate_joint(BinaryConfoundingSpec{p});
    double oracle = stat_disp(t, "Y", "A") - stat_disp_adjusted(t, "Y", "A", {"Z"});
    b.max_deviation = std::max(b.max_deviation, std::abs(formula(p) - oracle));
  }
  b.passed = b.max_deviation < b.tolerance;
  return b;
}

SelftestBattery battery_conf_balanced(std::uint64_t seed, std::size_t draws) {
  SelftestBattery b{"binary confounding: balanced form agrees with general at lambda=1/2", 0.0,
                    1e-12, false};
  Rng rng(derive_seed(seed, 2));
  for (std::size_t i = 0; i < draws; ++i) {
    ConfoundParams p = ConfoundParams::random_balanced(rng);
    b.max_deviation = std::max(
        b.max_deviation, std::abs(conf_bias_binary(p) - conf_bias_binary_balanced(p)));
  }
  b.passed = b.max_deviation < b.tolerance;
  return b;
}

SelftestBattery battery_selection(std::uint64_t seed, std::size_t draws) {
  SelftestBattery b{"binary selection: closed form vs enumeration and conf relabeling", 0.0,
                    1e-12, false};
  Rng rng(derive_seed(seed, 3));
  for (std::size_t i = 0; i < draws; ++i) {
    SelectionParams p = SelectionParams::random(rng);
    ConfoundParams as_conf(p.alpha, p.beta, p.gamma, p.delta, p.epsilon, p.tau, p.lambda);
    JointTable t = enumerate_joint(BinaryConfoundingSpec{as_conf});  // W in the Z slot
    double oracle = stat_disp_adjusted(t, "Y", "A", {"Z"}) - stat_disp(t, "Y", "A");
    double closed = sel_bias_binary(p);
    b.max_deviation = std::max(b.max_deviation, std::abs(closed - oracle));
    b.max_deviation =
        std::max(b.max_deviation, std::abs(closed + conf_bias_binary_balanced(as_conf)));
  }
  b.passed = b.max_deviation < b.tolerance;
  return b;
}

SelftestBattery battery_measurement(std::uint64_t seed, std::size_t draws) {
  SelftestBattery b{"binary measurement: closed form vs 4-variable enumeration", 0.0, 1e-9,
                    false};
  Rng rng(derive_seed(seed, 4));
  for (std::size_t i = 0; i < draws; ++i) {
    BinaryMeasurementSpec s = random_identifiable_measurement(rng);
    JointTable t = enumerate_joint(s);
    MeasurementParams p =
        MeasurementParams::from_table(t, "Y", "A", "T", s.error_mechanism());
    double oracle = stat_disp_adjusted(t, "Y", "A", {"T"}) -
                    stat_disp_adjusted(t, "Y", "A", {"Z"});
    b.max_deviation = std::max(b.max_deviation, std::abs(meas_bias_binary(p) - oracle));
  }
  b.passed = b.max_deviation < b.tolerance;
  return b;
}

SelftestBattery battery_interaction(std::uint64_t seed, std::size_t draws) {
  SelftestBattery b{"interaction: decomposition identities on random tables", 0.0, 1e-12, false};
  Rng rng(derive_seed(seed, 5));
  for (std::size_t i = 0; i < draws; ++i) {
    BinaryInteractionSpec s = BinaryInteractionSpec::randomize(rng.next_u64());
    JointTable t = enumerate_joint(s);
    double inter = interaction_term(t, "Y", "A", "B");
    double joint = t.cond_prob({{"Y", 1}}, {{"A", 1}, {"B", 1}}) -
                   t.cond_prob({{"Y", 1}}, {{"A", 0}, {"B", 0}});
    double thm71 = joint - (sd_no_interaction(t, "Y", "A", "B") +
                            sd_no_interaction(t, "Y", "B", "A") + inter);
    double thm72 = stat_disp(t, "Y", "A") -
                   (sd_no_interaction(t, "Y", "A", "B") + t.marginal({{"B", 1}}) * inter);
    double indiv = int_bias_individual(t, "Y", "A", "B", SensitiveTarget::A) -
                   t.marginal({{"B", 1}}) * inter;
    b.max_deviation = std::max({b.max_deviation, std::abs(thm71), std::abs(thm72), std::abs(indiv)});
  }
  b.passed = b.max_deviation < b.tolerance;
  return b;
}

SelftestBattery battery_linear_mc(std::uint64_t seed, std::size_t n) {
  SelftestBattery b{"linear Monte Carlo: closed forms vs regression differences at N=1e6", 0.0,
                    0.01, false};
  {
    Dataset d = simulate({LinearConfoundingSpec{0.3, 0.5, 0.5}, n, derive_seed(seed, 10)});
    CovMatrix cov = sample_moments(d);
    double est = beta_coef(cov, "Y", "A") - beta_partial1(cov, "Y", "A", "Z");
    b.max_deviation =
        std::max(b.max_deviation, std::abs(est - conf_bias_linear(ConfoundingModel{0.3, 0.5, 0.5})));
  }
  {
    Dataset d = simulate({LinearCollidingSpec{0.5, 0.3, 0.6}, n, derive_seed(seed, 11)});
    CovMatrix cov = sample_moments(d);
    double est = beta_partial1(cov, "Y", "A", "W") - beta_coef(cov, "Y", "A");
    b.max_deviation =
        std::max(b.max_deviation, std::abs(est - sel_bias_linear(CollidingModel{0.5, 0.3, 0.6})));
  }
  {
    Dataset d = simulate({LinearMeasurementSpec{0.3, 0.5, 0.5, 1.0}, n, derive_seed(seed, 12)});
    CovMatrix cov = sample_moments(d);
    double est = beta_partial1(cov, "Y", "A", "T") - beta_partial1(cov, "Y", "A", "Z");
    b.max_deviation = std::max(
        b.max_deviation, std::abs(est - meas_bias_linear(MeasurementModel{0.3, 0.5, 0.5, 1.0})));
  }
  {
    LinearInteractionSpec s{1.0, 0.5, 0.3, 0.4, 0.2, 0.5, 0.5};
    Dataset d = simulate({s, n, derive_seed(seed, 13)});
    OlsFit with = ols_fit(d, "Y", {"A", "B", "C"}, std::make_pair("A", "B"));
    OlsFit without = ols_fit(d, "Y", {"A", "B", "C"});
    double est = without.coef("A") - with.coef("A");
    InteractionLinearSpec lin;
    lin.beta3 = s.beta3;
    lin.p_b1 = s.p_b1;
    b.max_deviation = std::max(
        b.max_deviation, std::abs(est - int_bias_linear(lin, InteractionScope::IndividualA)));
  }
  b.passed = b.max_deviation < b.tolerance;
  return b;
}

}  // namespace

std::string SelftestReport::text() const {
  std::ostringstream out;
  for (const auto& b : batteries) {
    char dev[32];
    std::snprintf(dev, sizeof dev, "%.3e", b.max_deviation);
    out << (b.passed ? "[PASS] " : "[FAIL] ") << b.name << ": max deviation " << dev
        << " (tolerance " << format_double(b.tolerance) << ")\n";
  }
  out << (passed ? "selftest passed\n" : "selftest FAILED\n");
  return out.str();
}

SelftestReport run_selftest(std::uint64_t seed, const SelftestOptions& options) {
  SelftestReport report;
  auto conf_formula = options.conf_formula
                          ? options.conf_formula
                          : std::function<double(const ConfoundParams&)>(
                                [](const ConfoundParams& p) { return conf_bias_binary(p); });
  report.batteries.push_back(battery_conf_general(seed, options.binary_draws, conf_formula));
  report.batteries.push_back(battery_conf_balanced(seed, options.binary_draws));
  report.batteries.push_back(battery_selection(seed, options.binary_draws));
  report.batteries.push_back(battery_measurement(seed, options.measurement_draws));
  report.batteries.push_back(battery_interaction(seed, options.table_draws));
  report.batteries.push_back(battery_linear_mc(seed, options.mc_samples));
  report.passed = std::all_of(report.batteries.begin(), report.batteries.end(),
                              [](const SelftestBattery& b) { return b.passed; });
  return report;
}

}  // namespace causalbias
