#include "causalbias/bias_params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace causalbias {

namespace {

void require_prob(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0))
    throw std::invalid_argument(std::string(name) + " must lie in [0,1]");
}

void require_open_prob(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0))
    throw std::invalid_argument(std::string(name) + " must lie in (0,1)");
}

// Shared validation for the (alpha..delta, epsilon, tau, lambda) chain shape:
// the derived conditional P(v1|a1) = (eps - (1-tau)(1-lambda)) / lambda and its
// complement must be valid probabilities.
void validate_chain(double alpha, double beta, double gamma, double delta, double epsilon,
                    double tau, double lambda, const char* v1_name) {
  require_prob(alpha, "alpha");
  require_prob(beta, "beta");
  require_prob(gamma, "gamma");
  require_prob(delta, "delta");
  require_open_prob(epsilon, "epsilon");
  require_open_prob(lambda, "lambda");
  require_prob(tau, "tau");
  double v1a1 = (epsilon - (1.0 - tau) * (1.0 - lambda)) / lambda;
  if (!(v1a1 >= 0.0 && v1a1 <= 1.0))
    throw std::invalid_argument(std::string("derived conditional ") + v1_name + " = " +
                                std::to_string(v1a1) + " outside [0,1]");
}

}  // namespace

ConfoundParams::ConfoundParams(double alpha_, double beta_, double gamma_, double delta_,
                               double epsilon_, double tau_, double lambda_)
    : alpha(alpha_), beta(beta_), gamma(gamma_), delta(delta_), epsilon(epsilon_), tau(tau_),
      lambda(lambda_) {
  validate_chain(alpha, beta, gamma, delta, epsilon, tau, lambda, "P(z1|a1)");
}

ConfoundParams ConfoundParams::random(Rng& rng) {
  for (;;) {
    double alpha = rng.uniform01(), beta = rng.uniform01(), gamma = rng.uniform01(),
           delta = rng.uniform01();
    double epsilon = rng.uniform(0.01, 0.99);
    double tau = rng.uniform01();
    double lambda = rng.uniform(0.01, 0.99);
    double v1a1 = (epsilon - (1.0 - tau) * (1.0 - lambda)) / lambda;
    if (v1a1 < 0.0 || v1a1 > 1.0) continue;
    return ConfoundParams(alpha, beta, gamma, delta, epsilon, tau, lambda);
  }
}

ConfoundParams ConfoundParams::random_balanced(Rng& rng) {
  for (;;) {
    double alpha = rng.uniform01(), beta = rng.uniform01(), gamma = rng.uniform01(),
           delta = rng.uniform01();
    double epsilon = rng.uniform(0.01, 0.99);
    double tau = rng.uniform01();
    double v1a1 = 2.0 * epsilon + tau - 1.0;
    if (v1a1 < 0.0 || v1a1 > 1.0) continue;
    return ConfoundParams(alpha, beta, gamma, delta, epsilon, tau, 0.5);
  }
}

namespace {

// Derives (alpha..delta, eps, tau, lambda) of the chain shape from a table,
// with `v` in the conditioning slot.
struct ChainDerived {
  double alpha, beta, gamma, delta, epsilon, tau, lambda;
};

ChainDerived derive_chain(const JointTable& table, const std::string& y, const std::string& a,
                          const std::string& v) {
  ChainDerived d;
  d.alpha = table.cond_prob({{y, 1}}, {{a, 0}, {v, 0}});
  d.beta = table.cond_prob({{y, 1}}, {{a, 0}, {v, 1}});
  d.gamma = table.cond_prob({{y, 1}}, {{a, 1}, {v, 0}});
  d.delta = table.cond_prob({{y, 1}}, {{a, 1}, {v, 1}});
  d.epsilon = table.marginal({{v, 1}});
  d.tau = table.cond_prob({{v, 0}}, {{a, 0}});
  d.lambda = table.marginal({{a, 1}});
  return d;
}

}  // namespace

ConfoundParams ConfoundParams::from_table(const JointTable& table, const std::string& y,
                                          const std::string& a, const std::string& z) {
  ChainDerived d = derive_chain(table, y, a, z);
  return ConfoundParams(d.alpha, d.beta, d.gamma, d.delta, d.epsilon, d.tau, d.lambda);
}

SelectionParams::SelectionParams(double alpha_, double beta_, double gamma_, double delta_,
                                 double epsilon_, double tau_, double lambda_)
    : alpha(alpha_), beta(beta_), gamma(gamma_), delta(delta_), epsilon(epsilon_), tau(tau_),
      lambda(lambda_) {
  validate_chain(alpha, beta, gamma, delta, epsilon, tau, lambda, "P(w1|a1)");
}

SelectionParams SelectionParams::random(Rng& rng) {
  ConfoundParams p = ConfoundParams::random_balanced(rng);
  return SelectionParams(p.alpha, p.beta, p.gamma, p.delta, p.epsilon, p.tau, 0.5);
}

SelectionParams SelectionParams::from_table(const JointTable& table, const std::string& y,
                                            const std::string& a, const std::string& w) {
  ChainDerived d = derive_chain(table, y, a, w);
  return SelectionParams(d.alpha, d.beta, d.gamma, d.delta, d.epsilon, d.tau, d.lambda);
}

MeasurementParams::MeasurementParams(double alpha_, double beta_, double gamma_, double delta_,
                                     double epsilon_, double tau_, ErrorMechanism error_mech_)
    : alpha(alpha_), beta(beta_), gamma(gamma_), delta(delta_), epsilon(epsilon_), tau(tau_),
      error_mech(error_mech_) {
  validate_chain(alpha, beta, gamma, delta, epsilon, tau, 0.5, "P(t1|a1)");
  require_prob(error_mech.t1_given_z0, "P(t1|z0)");
  require_prob(error_mech.t0_given_z1, "P(t0|z1)");
  if (!(tau > 0.0)) throw std::invalid_argument("tau = P(t0|a0) must be positive");
}

MeasurementParams MeasurementParams::random(Rng& rng) {
  ConfoundParams p = ConfoundParams::random_balanced(rng);
  ErrorMechanism em{rng.uniform01(), rng.uniform01()};
  return MeasurementParams(p.alpha, p.beta, p.gamma, p.delta, p.epsilon, p.tau, em);
}

MeasurementParams MeasurementParams::from_table(const JointTable& table, const std::string& y,
                                                const std::string& a, const std::string& t,
                                                ErrorMechanism error_mech_) {
  ChainDerived d = derive_chain(table, y, a, t);
  return MeasurementParams(d.alpha, d.beta, d.gamma, d.delta, d.epsilon, d.tau, error_mech_);
}

}  // namespace causalbias
