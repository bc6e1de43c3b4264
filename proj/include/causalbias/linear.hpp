#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "causalbias/dataset.hpp"

namespace causalbias {

/// Labeled symmetric second-moment matrix with per-variable means.
class CovMatrix {
 public:
  CovMatrix(std::vector<std::string> names, std::vector<double> entries,
            std::vector<double> means);

  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return names_.size(); }

  double operator()(const std::string& x, const std::string& y) const;
  double variance(const std::string& x) const;
  double mean(const std::string& x) const;

  std::size_t index_of(const std::string& name) const;
  double at(std::size_t i, std::size_t j) const { return entries_[i * names_.size() + j]; }

 private:
  std::vector<std::string> names_;
  std::vector<double> entries_;  // row-major, symmetric
  std::vector<double> means_;
};

/// Unbiased (n-1) sample covariances and means. Checks positive semidefiniteness
/// within 1e-9 (relative) and flags constant columns.
CovMatrix sample_moments(const Dataset& data);

/// Rescales each column to sample mean 0 and variance 1, population (n)
/// convention. Throws SingularError on constant columns.
Dataset standardize(const Dataset& data);

/// beta_yx = sigma_xy / sigma_x^2.
double beta_coef(const CovMatrix& cov, const std::string& y, const std::string& x);

/// Cramer's one-control partial regression coefficient:
/// beta_yx.z = (sigma_z^2 sigma_xy - sigma_yz sigma_zx) / (sigma_x^2 sigma_z^2 - sigma_xz^2).
double beta_partial1(const CovMatrix& cov, const std::string& y, const std::string& x,
                     const std::string& z);

/// Intermediates of the correlation-matrix cofactor construction for the
/// two-control partial coefficient.
struct PartialCofactors {
  double c_ya;          // cofactor of rho_ya
  double c_yy;          // cofactor of rho_yy
  double c_aa;          // cofactor of rho_aa
  double rho_partial;   // rho_ya.zw = -C_ya / sqrt(C_yy C_aa)
  double sigma_ratio;   // residual-variance ratio sigma_y.zw / sigma_a.zw
  double beta;          // beta_ya.zw
};

/// Two-control partial regression coefficient via the cofactor route; an
/// independent normal-equations solve is the test oracle.
PartialCofactors beta_partial2_detail(const CovMatrix& cov, const std::string& y,
                                      const std::string& x, const std::string& z,
                                      const std::string& w);
double beta_partial2(const CovMatrix& cov, const std::string& y, const std::string& x,
                     const std::string& z, const std::string& w);

/// Linear confounding structure Z -> A, Z -> Y, A -> Y with structural equations
/// A = beta Z + U_a, Y = alpha A + gamma Z + U_y; var_* are exogenous noise
/// variances (the full variance for root Z).
struct ConfoundingModel {
  double alpha, beta, gamma;
  double var_z = 1.0, var_a = 1.0, var_y = 1.0;

  double sigma_z2() const { return var_z; }
  double sigma_a2() const { return beta * beta * var_z + var_a; }
};

/// Two independent standardized confounders Z, W of A and Y; coefficients are
/// standardized path coefficients (A = beta Z + delta W + ..., Y = alpha A +
/// gamma Z + lambda W + ...).
struct TwoConfounderModel {
  double alpha, beta, gamma, delta, lambda;
};

/// Collider structure A -> Y, A -> W <- Y: Y = alpha A + U_y, W = eta A + eps_w Y + U_w.
struct CollidingModel {
  double alpha, eta, epsilon;
  double var_a = 1.0, var_y = 1.0, var_w = 1.0;

  double sigma_a2() const { return var_a; }
  double sigma_y2() const { return alpha * alpha * sigma_a2() + var_y; }
  double sigma_w2() const {
    return eta * eta * sigma_a2() + epsilon * epsilon * sigma_y2() +
           2.0 * eta * epsilon * alpha * sigma_a2() + var_w;
  }
};

/// Measurement structure: confounding plus proxy T = lambda_zt Z + U_t.
struct MeasurementModel {
  double alpha, beta, gamma, lambda_zt;
  double var_z = 1.0, var_a = 1.0, var_y = 1.0, var_t = 1.0;

  double sigma_z2() const { return var_z; }
  double sigma_a2() const { return beta * beta * var_z + var_a; }
  double sigma_t2() const { return lambda_zt * lambda_zt * var_z + var_t; }
};

/// ConfBias(Y,A) = beta_ya - beta_ya.z, in covariance form
/// (sigma_za sigma_yz - (sigma_ya/sigma_a^2) sigma_za^2) / (sigma_a^2 sigma_z^2 - sigma_za^2).
double conf_bias_linear(const CovMatrix& cov, const std::string& y, const std::string& a,
                        const std::string& z);
/// Coefficient form (sigma_z^2 / sigma_a^2) beta gamma.
double conf_bias_linear(const ConfoundingModel& m);
/// Standardized corollary: beta * gamma.
double conf_bias_linear_standardized(double beta, double gamma);

/// Two-confounder confounding bias (standardized, Z independent of W):
/// covariance form of the theorem; sigma_zw beyond `zw_tol` raises StructureError.
double conf_bias_two(const CovMatrix& cov, const std::string& y, const std::string& a,
                     const std::string& z, const std::string& w, double zw_tol = 1e-6);
/// Coefficient form beta*gamma + delta*lambda.
double conf_bias_two(const TwoConfounderModel& m);

/// SelBias(Y,A) = beta_ya.w - beta_ya, covariance form.
double sel_bias_linear(const CovMatrix& cov, const std::string& y, const std::string& a,
                       const std::string& w);
/// Coefficient form of the theorem, in the model's variances.
double sel_bias_linear(const CollidingModel& m);
/// Standardized corollary: eps (alpha^2 eta + alpha^3 eps - eta - alpha eps) / (1 - (eta + alpha eps)^2).
double sel_bias_linear_standardized(double alpha, double eta, double epsilon);

/// MeasBias(Y,A) = beta_ya.t - beta_ya.z, covariance form (needs Z observed).
double meas_bias_linear(const CovMatrix& cov, const std::string& y, const std::string& a,
                        const std::string& z, const std::string& t);
/// Coefficient form sigma_z^2 beta gamma (sigma_t^2 - sigma_z^2 lambda^2) /
/// (sigma_a^2 sigma_t^2 - sigma_z^4 lambda^2 beta^2).
double meas_bias_linear(const MeasurementModel& m);
/// Standardized corollary: beta gamma (1 - lambda^2) / (1 - lambda^2 beta^2).
double meas_bias_linear_standardized(double beta, double gamma, double lambda_zt);

/// Least-squares fit (normal equations on sample moments) with an intercept and
/// optionally one product column. Throws SingularError on rank deficiency.
struct OlsFit {
  std::vector<std::string> terms;  // "(intercept)", predictors, "x*y" for the product
  std::vector<double> coefficients;

  double coef(const std::string& term) const;
};

OlsFit ols_fit(const Dataset& data, const std::string& response,
               const std::vector<std::string>& predictors,
               std::optional<std::pair<std::string, std::string>> interaction = std::nullopt);

/// Y = b0 + b1 A + b2 B + b3 A B + b4 C with binary sensitive A, B.
struct InteractionLinearSpec {
  double beta0 = 0.0, beta1 = 0.0, beta2 = 0.0, beta3 = 0.0, beta4 = 0.0;
  double p_a1 = 0.5, p_b1 = 0.5;
};

enum class InteractionScope { Intersectional, IndividualA, IndividualB };

/// Interaction bias of the no-interaction fit: beta3 (intersectional),
/// beta3 * P(B=1) (individual A), beta3 * P(A=1) (individual B).
double int_bias_linear(const InteractionLinearSpec& spec, InteractionScope scope);

}  // namespace causalbias
