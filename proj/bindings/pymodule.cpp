#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "causalbias/audit.hpp"
#include "causalbias/closed_forms.hpp"
#include "causalbias/errors.hpp"
#include "causalbias/graph.hpp"
#include "causalbias/linear.hpp"
#include "causalbias/scm.hpp"
#include "causalbias/version.hpp"

namespace py = pybind11;
using namespace causalbias;

namespace {

Dataset dataset_from_dict(const py::dict& columns) {
  Dataset d;
  for (auto item : columns)
    d.add_column(py::cast<std::string>(item.first), py::cast<std::vector<double>>(item.second));
  return d;
}

py::dict dataset_to_dict(const Dataset& d) {
  py::dict out;
  for (std::size_t j = 0; j < d.names.size(); ++j)
    out[py::str(d.names[j])] = d.columns[j];
  return out;
}

}  // namespace

PYBIND11_MODULE(causalbias, m) {
  m.doc() = "Closed-form causal biases (confounding, selection, measurement, interaction) "
            "with exact enumeration and Monte Carlo oracles";
  m.attr("__version__") = kToolVersion;

  py::register_exception<ParseError>(m, "GraphParseError", PyExc_ValueError);
  py::register_exception<StructureError>(m, "StructureError", PyExc_ValueError);
  py::register_exception<PositivityError>(m, "PositivityError", PyExc_ArithmeticError);
  py::register_exception<SingularError>(m, "SingularError", PyExc_ArithmeticError);

  // joint tables
  py::class_<JointTable>(m, "JointTable")
      .def(py::init<std::vector<std::string>, std::vector<double>>(), py::arg("variables"),
           py::arg("probs"))
      .def_static("from_samples", &JointTable::from_samples, py::arg("rows"),
                  py::arg("variables"), py::arg("pseudocount") = 0.0)
      .def_property_readonly("variables", &JointTable::variables)
      .def_property_readonly("cells", &JointTable::cells)
      .def("marginal", &JointTable::marginal, py::arg("assignment"))
      .def("cond_prob", &JointTable::cond_prob, py::arg("event"), py::arg("given"))
      .def("marginal_table", &JointTable::marginal_table, py::arg("keep"));

  m.def("stat_disp", &stat_disp, py::arg("table"), py::arg("y"), py::arg("a"));
  m.def("stat_disp_adjusted", &stat_disp_adjusted, py::arg("table"), py::arg("y"), py::arg("a"),
        py::arg("adjust"));
  m.def("interaction_term", &interaction_term, py::arg("table"), py::arg("y"), py::arg("a"),
        py::arg("b"));
  m.def("interaction_adjusted", &interaction_adjusted, py::arg("table"), py::arg("y"),
        py::arg("a"), py::arg("b"), py::arg("z"));
  m.def("sd_no_interaction", &sd_no_interaction, py::arg("table"), py::arg("y"), py::arg("a"),
        py::arg("b"));

  // parameterizations
  py::class_<ConfoundParams>(m, "ConfoundParams")
      .def(py::init<double, double, double, double, double, double, double>(), py::arg("alpha"),
           py::arg("beta"), py::arg("gamma"), py::arg("delta"), py::arg("epsilon"),
           py::arg("tau"), py::arg("lambda_") = 0.5)
      .def_static("from_table", &ConfoundParams::from_table, py::arg("table"), py::arg("y"),
                  py::arg("a"), py::arg("z"))
      .def_readonly("alpha", &ConfoundParams::alpha)
      .def_readonly("beta", &ConfoundParams::beta)
      .def_readonly("gamma", &ConfoundParams::gamma)
      .def_readonly("delta", &ConfoundParams::delta)
      .def_readonly("epsilon", &ConfoundParams::epsilon)
      .def_readonly("tau", &ConfoundParams::tau)
      .def_readonly("lambda_", &ConfoundParams::lambda);

  py::class_<SelectionParams>(m, "SelectionParams")
      .def(py::init<double, double, double, double, double, double, double>(), py::arg("alpha"),
           py::arg("beta"), py::arg("gamma"), py::arg("delta"), py::arg("epsilon"),
           py::arg("tau"), py::arg("lambda_") = 0.5)
      .def_static("from_table", &SelectionParams::from_table, py::arg("table"), py::arg("y"),
                  py::arg("a"), py::arg("w"));

  py::class_<ErrorMechanism>(m, "ErrorMechanism")
      .def(py::init([](double t1_given_z0, double t0_given_z1) {
             return ErrorMechanism{t1_given_z0, t0_given_z1};
           }),
           py::arg("t1_given_z0"), py::arg("t0_given_z1"))
      .def_readonly("t1_given_z0", &ErrorMechanism::t1_given_z0)
      .def_readonly("t0_given_z1", &ErrorMechanism::t0_given_z1)
      .def("determinant", &ErrorMechanism::determinant);

  py::class_<MeasurementParams>(m, "MeasurementParams")
      .def(py::init<double, double, double, double, double, double, ErrorMechanism>(),
           py::arg("alpha"), py::arg("beta"), py::arg("gamma"), py::arg("delta"),
           py::arg("epsilon"), py::arg("tau"), py::arg("error_mech"))
      .def_static("from_table", &MeasurementParams::from_table, py::arg("table"), py::arg("y"),
                  py::arg("a"), py::arg("t"), py::arg("error_mech"));

  // binary closed forms
  m.def("conf_bias_binary", &conf_bias_binary, py::arg("params"));
  m.def("conf_bias_binary_balanced", &conf_bias_binary_balanced, py::arg("params"));
  m.def("sel_bias_binary", &sel_bias_binary, py::arg("params"));
  m.def("meas_bias_binary", &meas_bias_binary, py::arg("params"));
  m.def("effect_restoration_do", &effect_restoration_do, py::arg("table"), py::arg("y"),
        py::arg("a"), py::arg("t"), py::arg("error_mech"), py::arg("a_value"));
  m.def("int_bias_intersectional", &int_bias_intersectional, py::arg("table"), py::arg("y"),
        py::arg("a"), py::arg("b"));

  py::enum_<SensitiveTarget>(m, "SensitiveTarget")
      .value("A", SensitiveTarget::A)
      .value("B", SensitiveTarget::B);
  m.def("int_bias_individual", &int_bias_individual, py::arg("table"), py::arg("y"),
        py::arg("a"), py::arg("b"), py::arg("target"), py::arg("independence_tol") = 1e-9);

  m.def(
      "concurrent_bias",
      [](const JointTable& table, const std::string& y, const std::string& a,
         std::optional<std::string> z, std::optional<std::string> w,
         std::optional<std::string> t, std::optional<std::string> b) {
        BiasBreakdown bd = concurrent_bias(table, {y, a, z, w, t, b});
        py::dict out;
        for (const auto& c : bd.components) out[py::str(c.id)] = c.value;
        return out;
      },
      py::arg("table"), py::arg("y"), py::arg("a"), py::arg("z") = py::none(),
      py::arg("w") = py::none(), py::arg("t") = py::none(), py::arg("b") = py::none());

  // covariance algebra and linear closed forms
  py::class_<CovMatrix>(m, "CovMatrix")
      .def_property_readonly("names", &CovMatrix::names)
      .def("cov", &CovMatrix::operator(), py::arg("x"), py::arg("y"))
      .def("variance", &CovMatrix::variance, py::arg("x"))
      .def("mean", &CovMatrix::mean, py::arg("x"));

  m.def("sample_moments",
        [](const py::dict& columns) { return sample_moments(dataset_from_dict(columns)); },
        py::arg("columns"));
  m.def("standardize",
        [](const py::dict& columns) {
          return dataset_to_dict(standardize(dataset_from_dict(columns)));
        },
        py::arg("columns"));
  m.def("beta_coef", &beta_coef, py::arg("cov"), py::arg("y"), py::arg("x"));
  m.def("beta_partial1", &beta_partial1, py::arg("cov"), py::arg("y"), py::arg("x"),
        py::arg("z"));
  m.def("beta_partial2", &beta_partial2, py::arg("cov"), py::arg("y"), py::arg("x"),
        py::arg("z"), py::arg("w"));

  m.def("conf_bias_linear",
        [](double alpha, double beta, double gamma) {
          return conf_bias_linear(ConfoundingModel{alpha, beta, gamma});
        },
        py::arg("alpha"), py::arg("beta"), py::arg("gamma"),
        "Unit-noise confounding model closed form");
  m.def("conf_bias_linear_cov",
        py::overload_cast<const CovMatrix&, const std::string&, const std::string&,
                          const std::string&>(&conf_bias_linear),
        py::arg("cov"), py::arg("y"), py::arg("a"), py::arg("z"));
  m.def("conf_bias_linear_standardized", &conf_bias_linear_standardized, py::arg("beta"),
        py::arg("gamma"));
  m.def("conf_bias_two",
        [](double alpha, double beta, double gamma, double delta, double lambda) {
          return conf_bias_two(TwoConfounderModel{alpha, beta, gamma, delta, lambda});
        },
        py::arg("alpha"), py::arg("beta"), py::arg("gamma"), py::arg("delta"),
        py::arg("lambda_"));
  m.def("sel_bias_linear",
        [](double alpha, double eta, double epsilon) {
          return sel_bias_linear(CollidingModel{alpha, eta, epsilon});
        },
        py::arg("alpha"), py::arg("eta"), py::arg("epsilon"));
  m.def("sel_bias_linear_standardized", &sel_bias_linear_standardized, py::arg("alpha"),
        py::arg("eta"), py::arg("epsilon"));
  m.def("meas_bias_linear",
        [](double alpha, double beta, double gamma, double lambda_zt) {
          return meas_bias_linear(MeasurementModel{alpha, beta, gamma, lambda_zt});
        },
        py::arg("alpha"), py::arg("beta"), py::arg("gamma"), py::arg("lambda_zt"));
  m.def("meas_bias_linear_standardized", &meas_bias_linear_standardized, py::arg("beta"),
        py::arg("gamma"), py::arg("lambda_zt"));

  m.def(
      "ols_fit",
      [](const py::dict& columns, const std::string& response,
         const std::vector<std::string>& predictors,
         std::optional<std::pair<std::string, std::string>> interaction) {
        OlsFit fit = ols_fit(dataset_from_dict(columns), response, predictors, interaction);
        py::dict out;
        for (std::size_t i = 0; i < fit.terms.size(); ++i)
          out[py::str(fit.terms[i])] = fit.coefficients[i];
        return out;
      },
      py::arg("columns"), py::arg("response"), py::arg("predictors"),
      py::arg("interaction") = py::none());

  py::enum_<InteractionScope>(m, "InteractionScope")
      .value("Intersectional", InteractionScope::Intersectional)
      .value("IndividualA", InteractionScope::IndividualA)
      .value("IndividualB", InteractionScope::IndividualB);
  m.def(
      "int_bias_linear",
      [](double beta3, double p_a1, double p_b1, InteractionScope scope) {
        InteractionLinearSpec spec;
        spec.beta3 = beta3;
        spec.p_a1 = p_a1;
        spec.p_b1 = p_b1;
        return int_bias_linear(spec, scope);
      },
      py::arg("beta3"), py::arg("p_a1"), py::arg("p_b1"), py::arg("scope"));

  // generators and enumeration
  py::class_<LinearConfoundingSpec>(m, "LinearConfoundingSpec")
      .def(py::init([](double alpha, double beta, double gamma) {
             return LinearConfoundingSpec{alpha, beta, gamma};
           }),
           py::arg("alpha"), py::arg("beta"), py::arg("gamma"));
  py::class_<LinearCollidingSpec>(m, "LinearCollidingSpec")
      .def(py::init([](double alpha, double eta, double epsilon) {
             return LinearCollidingSpec{alpha, eta, epsilon};
           }),
           py::arg("alpha"), py::arg("eta"), py::arg("epsilon"));
  py::class_<LinearMeasurementSpec>(m, "LinearMeasurementSpec")
      .def(py::init([](double alpha, double beta, double gamma, double lambda_zt) {
             return LinearMeasurementSpec{alpha, beta, gamma, lambda_zt};
           }),
           py::arg("alpha"), py::arg("beta"), py::arg("gamma"), py::arg("lambda_zt"));
  py::class_<LinearInteractionSpec>(m, "LinearInteractionSpec")
      .def(py::init([](double beta0, double beta1, double beta2, double beta3, double beta4,
                       double p_a1, double p_b1) {
             return LinearInteractionSpec{beta0, beta1, beta2, beta3, beta4, p_a1, p_b1};
           }),
           py::arg("beta0"), py::arg("beta1"), py::arg("beta2"), py::arg("beta3"),
           py::arg("beta4"), py::arg("p_a1") = 0.5, py::arg("p_b1") = 0.5);
  py::class_<BinaryConfoundingSpec>(m, "BinaryConfoundingSpec")
      .def(py::init([](const ConfoundParams& p) { return BinaryConfoundingSpec{p}; }),
           py::arg("params"));
  py::class_<BinaryMeasurementSpec>(m, "BinaryMeasurementSpec")
      .def(py::init([](double p_z1, double p_a1_given_z1, double p_a1_given_z0,
                       double p_t1_given_z1, double p_t1_given_z0) {
             BinaryMeasurementSpec s;
             s.p_z1 = p_z1;
             s.p_a1_given_z1 = p_a1_given_z1;
             s.p_a1_given_z0 = p_a1_given_z0;
             s.p_t1_given_z1 = p_t1_given_z1;
             s.p_t1_given_z0 = p_t1_given_z0;
             return s;
           }),
           py::arg("p_z1"), py::arg("p_a1_given_z1"), py::arg("p_a1_given_z0"),
           py::arg("p_t1_given_z1"), py::arg("p_t1_given_z0"))
      .def_static("randomize", &BinaryMeasurementSpec::randomize, py::arg("seed"))
      .def("error_mechanism", &BinaryMeasurementSpec::error_mechanism);
  py::class_<BinaryInteractionSpec>(m, "BinaryInteractionSpec")
      .def(py::init([](double p_a1, double p_b1, std::vector<std::vector<double>> y1_given) {
             BinaryInteractionSpec s{};
             s.p_a1 = p_a1;
             s.p_b1 = p_b1;
             for (int a : {0, 1})
               for (int b : {0, 1})
                 s.y1_given[a][b] = y1_given.at(static_cast<std::size_t>(a))
                                        .at(static_cast<std::size_t>(b));
             return s;
           }),
           py::arg("p_a1"), py::arg("p_b1"), py::arg("y1_given"))
      .def_static("randomize", &BinaryInteractionSpec::randomize, py::arg("seed"));

  m.def(
      "simulate",
      [](const ScmStructure& structure, std::size_t n, std::uint64_t seed) {
        return dataset_to_dict(simulate({structure, n, seed}));
      },
      py::arg("structure"), py::arg("n"), py::arg("seed"));
  m.def("enumerate_joint", &enumerate_joint, py::arg("structure"));

  // sweeps
  m.def(
      "sweep",
      [](const std::string& kind,
         const std::vector<std::tuple<std::string, double, double, double>>& axes,
         const std::map<std::string, double>& fixed, bool standardized, int threads) {
        SweepRequest req;
        req.kind = bias_kind_from_string(kind);
        for (const auto& [name, lo, hi, step] : axes) req.axes.push_back({name, lo, hi, step});
        req.fixed = fixed;
        req.standardized = standardized;
        req.threads = threads;
        SweepGrid grid = sweep(req);
        py::dict out;
        out["coordinate_names"] = grid.coordinate_names;
        out["coordinates"] = grid.coordinates;
        out["values"] = grid.values;
        out["singularities"] = grid.singularities;
        return out;
      },
      py::arg("kind"), py::arg("axes"), py::arg("fixed") = std::map<std::string, double>{},
      py::arg("standardized") = false, py::arg("threads") = 1);

  // graphs
  py::class_<StructureTags>(m, "StructureTags")
      .def_readonly("confounders", &StructureTags::confounders)
      .def_readonly("conditioned_colliders", &StructureTags::conditioned_colliders)
      .def_readonly("proxies", &StructureTags::proxies)
      .def_readonly("second_sensitive", &StructureTags::second_sensitive);

  py::class_<CausalGraph>(m, "CausalGraph")
      .def_static("parse", &CausalGraph::parse_string, py::arg("text"))
      .def_static("parse_file", &CausalGraph::parse_file, py::arg("path"))
      .def("d_separated", &CausalGraph::d_separated, py::arg("x"), py::arg("y"),
           py::arg("given") = std::vector<std::string>{})
      .def("wright_covariance", &CausalGraph::wright_covariance, py::arg("x"), py::arg("y"))
      .def("model_covariance", &CausalGraph::model_covariance)
      .def("classify_structure", &CausalGraph::classify_structure, py::arg("a"), py::arg("y"))
      .def("valid", [](const CausalGraph& g) { return g.validate().ok(); })
      .def("violations", [](const CausalGraph& g) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& v : g.validate().violations) out.push_back({v.kind, v.message});
        return out;
      });

  m.def(
      "run_selftest",
      [](std::uint64_t seed) {
        SelftestReport report = run_selftest(seed);
        return py::make_tuple(report.passed, report.text());
      },
      py::arg("seed") = 0);
}
