#include "causalbias/closed_forms.hpp"

#include <cmath>
#include <stdexcept>

#include "causalbias/errors.hpp"

namespace causalbias {

double conf_bias_binary(const ConfoundParams& p) {
  return (1.0 - p.tau - p.epsilon) *
         (p.alpha - p.beta - p.gamma + p.delta + p.gamma / p.lambda - p.delta / p.lambda);
}

double conf_bias_binary_balanced(const ConfoundParams& p) {
  if (p.lambda != 0.5)
    throw std::invalid_argument("balanced form requires P(a1) = 1/2 exactly");
  return (1.0 - p.tau - p.epsilon) * (p.alpha - p.beta + p.gamma - p.delta);
}

double sel_bias_binary(const SelectionParams& p) {
  if (p.lambda != 0.5)
    throw std::invalid_argument("selection form requires P(a1) = 1/2 exactly");
  return (1.0 - p.tau - p.epsilon) * (-p.alpha + p.beta - p.gamma + p.delta);
}

namespace {

constexpr double kDenomTol = 1e-12;

// Two-term effect restoration for one value of A. Inputs are the observed
// joint cells P(y1,a,t), P(a,t), the proxy marginals and P(a), plus the error
// mechanism u = P(t1|z0), v = P(t0|z1). Derived by inverting the 2x2 error
// matrix in P(y,a,t) = sum_z P(t|z) P(y,a,z):
//   P(y1|do(a)) = sum_z P(z) P(y1,a,z) / P(a,z)
//   P(*,z0)-type terms come out as ((1-v) X_t0 - v X_t1) / (1-u-v).
double restored_do(double py_at0, double py_at1, double p_at0, double p_at1, double pt0,
                   double pt1, double pa, double u, double v) {
  double det = 1.0 - u - v;
  if (std::abs(det) < kDenomTol)
    throw SingularError("effect restoration: error matrix determinant 1 - P(t1|z0) - P(t0|z1) is zero");
  double py_a = py_at0 + py_at1;
  double den0 = p_at0 - v * pa;
  double den1 = p_at1 - u * pa;
  if (std::abs(den0) < kDenomTol)
    throw SingularError("effect restoration: restored stratum P(a,z0) has zero mass");
  if (std::abs(den1) < kDenomTol)
    throw SingularError("effect restoration: restored stratum P(a,z1) has zero mass");
  double z0 = (pt0 - v) * (py_at0 - v * py_a) / (det * den0);
  double z1 = (pt1 - u) * (py_at1 - u * py_a) / (det * den1);
  return z0 + z1;
}

}  // namespace

double meas_bias_binary(const MeasurementParams& p) {
  const double u = p.error_mech.t1_given_z0;
  const double v = p.error_mech.t0_given_z1;
  const double eps = p.epsilon, tau = p.tau;
  double sd_t = eps * (p.delta - p.beta) + (1.0 - eps) * (p.gamma - p.alpha);

  // Exact proxy: restoration returns StatDisp_T itself, so the bias is
  // identically zero.
  if (u == 0.0 && v == 0.0) return 0.0;

  // Uninformative proxy: (v, u) = (eps, 1-eps) makes the error matrix singular
  // and the restored term is taken as zero, so the bias peaks at StatDisp_T.
  if (std::abs(v - eps) <= 1e-9 && std::abs(u - (1.0 - eps)) <= 1e-9) return sd_t;

  double pt1 = eps, pt0 = 1.0 - eps;
  double p_a0t0 = tau / 2.0, p_a0t1 = (1.0 - tau) / 2.0;
  double p_a1t0 = 1.0 - eps - tau / 2.0, p_a1t1 = eps + tau / 2.0 - 0.5;
  double do_a1 = restored_do(p.gamma * p_a1t0, p.delta * p_a1t1, p_a1t0, p_a1t1, pt0, pt1, 0.5,
                             u, v);
  double do_a0 = restored_do(p.alpha * p_a0t0, p.beta * p_a0t1, p_a0t0, p_a0t1, pt0, pt1, 0.5,
                             u, v);
  return sd_t - (do_a1 - do_a0);
}

double effect_restoration_do(const JointTable& table, const std::string& y, const std::string& a,
                             const std::string& t, const ErrorMechanism& error_mech,
                             int a_value) {
  if (a_value != 0 && a_value != 1) throw std::invalid_argument("a_value must be 0 or 1");
  double pt1 = table.marginal({{t, 1}});
  double pt0 = table.marginal({{t, 0}});
  if (pt0 <= 0.0 || pt1 <= 0.0) throw SingularError("effect restoration: degenerate proxy " + t);
  double pa = table.marginal({{a, a_value}});
  if (pa <= 0.0) throw PositivityError("degenerate sensitive variable " + a);
  double py_at0 = table.marginal({{y, 1}, {a, a_value}, {t, 0}});
  double py_at1 = table.marginal({{y, 1}, {a, a_value}, {t, 1}});
  double p_at0 = table.marginal({{a, a_value}, {t, 0}});
  double p_at1 = table.marginal({{a, a_value}, {t, 1}});
  return restored_do(py_at0, py_at1, p_at0, p_at1, pt0, pt1, pa, error_mech.t1_given_z0,
                     error_mech.t0_given_z1);
}

double int_bias_intersectional(const JointTable& table, const std::string& y,
                               const std::string& a, const std::string& b) {
  return interaction_term(table, y, a, b);
}

double int_bias_individual(const JointTable& table, const std::string& y, const std::string& a,
                           const std::string& b, SensitiveTarget target,
                           double independence_tol) {
  double pa1 = table.marginal({{a, 1}});
  double pb1 = table.marginal({{b, 1}});
  double pab = table.marginal({{a, 1}, {b, 1}});
  if (std::abs(pab - pa1 * pb1) > independence_tol)
    throw StructureError("individual interaction bias assumes " + a + " independent of " + b +
                         " (decomposition of StatDisp into SD_noInt + P(b1) Interaction); "
                         "|P(a1,b1) - P(a1)P(b1)| = " +
                         std::to_string(std::abs(pab - pa1 * pb1)));
  // Weight zero means zero bias regardless of the (then ill-defined) interaction.
  if (target == SensitiveTarget::A && pb1 == 0.0) return 0.0;
  if (target == SensitiveTarget::B && pa1 == 0.0) return 0.0;
  double inter = interaction_term(table, y, a, b);
  return target == SensitiveTarget::A ? pb1 * inter : pa1 * inter;
}

const BiasComponent* BiasBreakdown::find(const std::string& id) const {
  for (const auto& c : components)
    if (c.id == id) return &c;
  return nullptr;
}

double BiasBreakdown::value(const std::string& id) const {
  const BiasComponent* c = find(id);
  if (!c) throw std::invalid_argument("no breakdown component: " + id);
  return c->value;
}

BiasBreakdown concurrent_bias(const JointTable& table, const ConcurrentSpec& spec) {
  const std::string& y = spec.y;
  const std::string& a = spec.a;
  for (const auto& name : {spec.z, spec.w, spec.t, spec.b})
    if (name && !table.has(*name))
      throw StructureError("concurrent bias: table lacks variable " + *name);

  BiasBreakdown out;
  auto add = [&](std::string id, std::string formula, double value) {
    out.components.push_back({std::move(id), std::move(formula), value});
  };

  double sd = stat_disp(table, y, a);
  if (spec.z) add("conf", "StatDisp - StatDisp_Z", sd - stat_disp_adjusted(table, y, a, {*spec.z}));
  if (spec.w) add("sel", "StatDisp_W - StatDisp", stat_disp_adjusted(table, y, a, {*spec.w}) - sd);
  if (spec.t && spec.z)
    add("meas", "StatDisp_T - StatDisp_Z",
        stat_disp_adjusted(table, y, a, {*spec.t}) - stat_disp_adjusted(table, y, a, {*spec.z}));
  if (spec.z && spec.w)
    add("conf_sel_total", "StatDisp_W - StatDisp_Z",
        stat_disp_adjusted(table, y, a, {*spec.w}) - stat_disp_adjusted(table, y, a, {*spec.z}));
  if (spec.t)
    add("conf_meas_total", "StatDisp - StatDisp_T",
        sd - stat_disp_adjusted(table, y, a, {*spec.t}));
  if (spec.t && spec.w && spec.z) {
    double sd_tw = stat_disp_adjusted(table, y, a, {*spec.t, *spec.w});
    double sd_z = stat_disp_adjusted(table, y, a, {*spec.z});
    add("sel_meas_total", "StatDisp_TW - StatDisp_Z", sd_tw - sd_z);
    add("all_three_total", "StatDisp_TW - StatDisp_Z", sd_tw - sd_z);
  }

  if (spec.b && spec.z) {
    const std::string& b = *spec.b;
    const std::string& z = *spec.z;
    double d_sdnoint = sd_no_interaction(table, y, a, b) -
                       sd_no_interaction_adjusted(table, y, a, b, z);
    double inter = interaction_term(table, y, a, b);
    double inter_z = interaction_adjusted(table, y, a, b, z);
    double pb1 = table.marginal({{b, 1}});
    add("conf_sd_noint_delta", "SDnoInt - SDnoInt_Z", d_sdnoint);
    add("conf_interaction_delta", "P(b1)(Interaction - Interaction_Z)",
        pb1 * (inter - inter_z));

    // Intersectional variant, with the B-effect correction term.
    double sd_ab = table.cond_prob({{y, 1}}, {{a, 1}, {b, 1}}) -
                   table.cond_prob({{y, 1}}, {{a, 0}, {b, 0}});
    double sd_ab_z = 0.0;
    for (int zv : {0, 1}) {
      double pz = table.marginal({{z, zv}});
      if (pz <= 0.0) continue;
      sd_ab_z += (table.cond_prob({{y, 1}}, {{a, 1}, {b, 1}, {z, zv}}) -
                  table.cond_prob({{y, 1}}, {{a, 0}, {b, 0}, {z, zv}})) *
                 pz;
    }
    add("conf_joint", "StatDisp(Y,A,B) - StatDisp_Z(Y,A,B)", sd_ab - sd_ab_z);
    add("conf_joint_sd_noint_b_delta", "SDnoInt(Y,B) - SDnoInt_Z(Y,B)",
        sd_no_interaction(table, y, b, a) - sd_no_interaction_adjusted(table, y, b, a, z));
    add("conf_joint_interaction_delta", "Interaction - Interaction_Z", inter - inter_z);
  }
  return out;
}

}  // namespace causalbias
