#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "causalbias/bias_params.hpp"
#include "causalbias/dataset.hpp"
#include "causalbias/joint_table.hpp"

namespace causalbias {

// Linear structures (all exogenous noises standard normal, per the generators
// the closed forms are checked against):
//   confounding:  Z = Uz,  A = beta Z + Ua,  Y = alpha A + gamma Z + Uy
//   colliding:    A = Ua,  Y = alpha A + Uy, W = eta A + epsilon Y + Uw
//   measurement:  confounding plus T = lambda_zt Z + Ut
//   interaction:  Y = b0 + b1 A + b2 B + b3 A B + b4 C + Uy, A,B Bernoulli, C normal
struct LinearConfoundingSpec {
  double alpha, beta, gamma;
};
struct LinearCollidingSpec {
  double alpha, eta, epsilon;
};
struct LinearMeasurementSpec {
  double alpha, beta, gamma, lambda_zt;
};
struct LinearInteractionSpec {
  double beta0, beta1, beta2, beta3, beta4;
  double p_a1 = 0.5, p_b1 = 0.5;
};

struct BinaryConfoundingSpec {
  ConfoundParams params;
};

/// Bernoulli measurement model: Z ~ Bern(p_z1), A | Z, T | Z, Y | A,Z.
/// y1_given[a][z] defaults to the (z + a) / 2 mechanism.
struct BinaryMeasurementSpec {
  double p_z1;
  double p_a1_given_z1, p_a1_given_z0;
  double p_t1_given_z1, p_t1_given_z0;
  double y1_given[2][2] = {{0.0, 0.5}, {0.5, 1.0}};  // [a][z]

  ErrorMechanism error_mechanism() const { return {p_t1_given_z0, 1.0 - p_t1_given_z1}; }

  /// Random Bernoulli parameters in (0,1), replayable from the seed.
  static BinaryMeasurementSpec randomize(std::uint64_t seed);
};

/// Independent sensitive variables A, B with Y | A,B.
struct BinaryInteractionSpec {
  double p_a1, p_b1;
  double y1_given[2][2];  // [a][b]

  static BinaryInteractionSpec randomize(std::uint64_t seed);
};

using ScmStructure =
    std::variant<LinearConfoundingSpec, LinearCollidingSpec, LinearMeasurementSpec,
                 LinearInteractionSpec, BinaryConfoundingSpec, BinaryMeasurementSpec,
                 BinaryInteractionSpec>;

struct ScmSpec {
  ScmStructure structure;
  std::size_t n = 0;
  std::uint64_t seed = 0;
};

/// Name of the structure, e.g. "linear_confounding".
std::string structure_name(const ScmStructure& s);
bool structure_is_binary(const ScmStructure& s);

/// n rows, deterministic given the seed. Binary structures emit {0,1} columns,
/// linear structures reals. Column names follow the structure (Z, A, Y, ...).
Dataset simulate(const ScmSpec& spec);

/// Exact joint table by chain-rule expansion; binary structures only, seed-free.
JointTable enumerate_joint(const ScmStructure& structure);

/// Random generative measurement model with balanced groups (P(a1) = 1/2), a
/// proxy whose error matrix is bounded away from singular, and well-populated
/// (A,T) strata; the rejection sampler behind the measurement test batteries.
BinaryMeasurementSpec random_identifiable_measurement(Rng& rng);

enum class BiasKind { Confounding, Selection, Measurement };

BiasKind bias_kind_from_string(const std::string& s);
std::string to_string(BiasKind kind);

/// Parameter names of each closed form: conf {beta,gamma}, sel {alpha,eta,epsilon},
/// meas {beta,gamma,lambda}.
std::vector<std::string> sweep_parameters(BiasKind kind);

struct SweepAxis {
  std::string name;
  double lo, hi, step;

  std::size_t point_count() const;
  double point(std::size_t i) const;  // exact 0.0 on on-grid zeros
};

struct SweepRequest {
  BiasKind kind = BiasKind::Confounding;
  std::vector<SweepAxis> axes;              // 1 or 2 axes
  std::map<std::string, double> fixed;      // remaining parameters
  bool standardized = false;                // use the standardized corollaries
  int threads = 1;                          // evaluation threads; output-invariant
};

struct SweepGrid {
  SweepRequest request;
  std::vector<std::string> coordinate_names;
  std::vector<std::vector<double>> coordinates;  // one vector per cell, axis order
  std::vector<double> values;                    // NaN on singular points
  std::vector<std::string> singularities;        // log of NaN cells
};

/// Evaluates the closed form of `kind` on the cartesian grid. Singular points
/// become NaN cells with a log entry rather than aborting. Deterministic: the
/// output is independent of `threads`.
SweepGrid sweep(const SweepRequest& request);

}  // namespace causalbias
