#pragma once

#include "causalbias/joint_table.hpp"
#include "causalbias/rng.hpp"

namespace causalbias {

/// Scalar parameterization of the binary confounding structure:
///   alpha..delta = P(y1|a0,z0), P(y1|a0,z1), P(y1|a1,z0), P(y1|a1,z1)
///   epsilon = P(z1), tau = P(z0|a0), lambda = P(a1).
/// Construction validates the derived conditional P(z1|a1) = (eps-(1-tau)(1-lambda))/lambda
/// lies in [0,1]; invalid parameterizations are rejected rather than clamped.
struct ConfoundParams {
  double alpha, beta, gamma, delta;
  double epsilon, tau, lambda;

  ConfoundParams(double alpha, double beta, double gamma, double delta, double epsilon,
                 double tau, double lambda);

  double z1_given_a0() const { return 1.0 - tau; }
  double z1_given_a1() const { return (epsilon - (1.0 - tau) * (1.0 - lambda)) / lambda; }

  /// Rejection-sampled uniform draw with valid derived conditionals.
  static ConfoundParams random(Rng& rng);
  /// Same with lambda fixed to 1/2.
  static ConfoundParams random_balanced(Rng& rng);

  /// Derive the parameterization from any joint table containing y, a, z.
  static ConfoundParams from_table(const JointTable& table, const std::string& y,
                                   const std::string& a, const std::string& z);
};

/// Binary collider structure parameters; identical shape with W in the Z slot:
/// epsilon = P(w1), tau = P(w0|a0), alpha..delta = P(y1|a,w).
struct SelectionParams {
  double alpha, beta, gamma, delta;
  double epsilon, tau, lambda;

  SelectionParams(double alpha, double beta, double gamma, double delta, double epsilon,
                  double tau, double lambda = 0.5);

  double w1_given_a0() const { return 1.0 - tau; }
  double w1_given_a1() const { return (epsilon - (1.0 - tau) * (1.0 - lambda)) / lambda; }

  static SelectionParams random(Rng& rng);
  static SelectionParams from_table(const JointTable& table, const std::string& y,
                                    const std::string& a, const std::string& w);
};

/// Proxy error mechanism P(T|Z) for measurement bias.
struct ErrorMechanism {
  double t1_given_z0 = 0.0;
  double t0_given_z1 = 0.0;

  /// Determinant of the 2x2 error matrix; zero means the proxy carries no
  /// information about Z and effect restoration is impossible.
  double determinant() const { return 1.0 - t1_given_z0 - t0_given_z1; }
};

/// Binary measurement structure parameters (P(a0) = P(a1) = 1/2 assumed):
/// alpha..delta = P(y1|a,t), epsilon = P(t1), tau = P(t0|a0), plus P(T|Z).
struct MeasurementParams {
  double alpha, beta, gamma, delta;
  double epsilon, tau;
  ErrorMechanism error_mech;

  MeasurementParams(double alpha, double beta, double gamma, double delta, double epsilon,
                    double tau, ErrorMechanism error_mech);

  double t1_given_a0() const { return 1.0 - tau; }
  double t1_given_a1() const { return 2.0 * epsilon + tau - 1.0; }

  static MeasurementParams random(Rng& rng);
  static MeasurementParams from_table(const JointTable& table, const std::string& y,
                                      const std::string& a, const std::string& t,
                                      ErrorMechanism error_mech);
};

}  // namespace causalbias
