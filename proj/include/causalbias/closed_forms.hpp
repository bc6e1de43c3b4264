#pragma once

#include <optional>
#include <string>
#include <vector>

#include "causalbias/bias_params.hpp"
#include "causalbias/joint_table.hpp"

namespace causalbias {

/// ConfBias(Y,A) = StatDisp - ACE for the binary confounding structure, any
/// group proportion: (1 - tau - eps)(alpha - beta - gamma + delta + gamma/lambda - delta/lambda).
double conf_bias_binary(const ConfoundParams& p);

/// Balanced-groups form, requires lambda = 1/2 exactly:
/// (1 - tau - eps)(alpha - beta + gamma - delta).
double conf_bias_binary_balanced(const ConfoundParams& p);

/// SelBias(Y,A) = StatDisp_W - StatDisp for the binary collider structure with
/// balanced groups: (1 - tau - eps)(-alpha + beta - gamma + delta).
double sel_bias_binary(const SelectionParams& p);

/// MeasBias(Y,A) = StatDisp_T - StatDisp_Z for the binary measurement structure
/// with balanced groups, where StatDisp_Z is recovered from the observed (A,T,Y)
/// quantities and the error mechanism P(T|Z) by two-term effect restoration.
/// At the uninformative-proxy point (P(t0|z1), P(t1|z0)) = (eps, 1-eps) the
/// restored term is taken as zero and the bias equals StatDisp_T (the
/// maximization convention); other singular error mechanisms raise SingularError.
double meas_bias_binary(const MeasurementParams& p);

/// Effect restoration: P(y1 | do(a = a_value)) computed from the observed joint
/// over (A,T,Y) and the proxy error mechanism P(T|Z). Exact whenever the
/// generating model has T depending on Z alone and the error matrix is
/// nonsingular. Throws SingularError on vanishing denominators, naming the term.
double effect_restoration_do(const JointTable& table, const std::string& y,
                             const std::string& a, const std::string& t,
                             const ErrorMechanism& error_mech, int a_value);

/// Intersectional interaction bias: equals Interaction(A,B), and equally the
/// joint-group disparity P(y1|a1,b1) - P(y1|a0,b0) minus the two
/// interaction-free effects.
double int_bias_intersectional(const JointTable& table, const std::string& y,
                               const std::string& a, const std::string& b);

enum class SensitiveTarget { A, B };

/// Individual interaction bias under A independent of B: P(b1)*Interaction for
/// target A, P(a1)*Interaction for target B. Dependence between A and B beyond
/// `independence_tol` raises StructureError (the decomposition assumes A and B
/// independent).
double int_bias_individual(const JointTable& table, const std::string& y, const std::string& a,
                           const std::string& b, SensitiveTarget target,
                           double independence_tol = 1e-9);

/// Which variables of the table play which role for the concurrent decompositions.
struct ConcurrentSpec {
  std::string y;
  std::string a;
  std::optional<std::string> z;  // confounder
  std::optional<std::string> w;  // conditioned collider
  std::optional<std::string> t;  // proxy of z
  std::optional<std::string> b;  // second sensitive variable
};

struct BiasComponent {
  std::string id;       // e.g. "conf", "sel", "conf_sel_total"
  std::string formula;  // disparity-difference expression used
  double value;
};

struct BiasBreakdown {
  std::vector<BiasComponent> components;

  const BiasComponent* find(const std::string& id) const;
  double value(const std::string& id) const;  // throws std::invalid_argument if absent
};

/// Labeled concurrent-bias decomposition. Emits every component whose variables
/// are present in the spec:
///   conf            = StatDisp - StatDisp_Z
///   sel             = StatDisp_W - StatDisp
///   meas            = StatDisp_T - StatDisp_Z
///   conf_sel_total  = StatDisp_W - StatDisp_Z
///   conf_meas_total = StatDisp - StatDisp_T
///   sel_meas_total  = StatDisp_TW - StatDisp_Z
///   all_three_total = StatDisp_TW - StatDisp_Z
/// plus, when a second sensitive variable is present, the confounding x
/// interaction decompositions:
///   conf_sd_noint_delta    = SDnoInt - SDnoInt_Z
///   conf_interaction_delta = P(b1)(Interaction - Interaction_Z)
///   conf_joint             = StatDisp(Y,A,B) - StatDisp_Z(Y,A,B)
///   conf_joint_sd_noint_b_delta = SDnoInt(Y,B) - SDnoInt_Z(Y,B)
///   conf_joint_interaction_delta = Interaction - Interaction_Z
BiasBreakdown concurrent_bias(const JointTable& table, const ConcurrentSpec& spec);

}  // namespace causalbias
