#include "causalbias/linear.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "causalbias/errors.hpp"

namespace causalbias {

namespace {
constexpr double kRelTol = 1e-12;
}

CovMatrix::CovMatrix(std::vector<std::string> names, std::vector<double> entries,
                     std::vector<double> means)
    : names_(std::move(names)), entries_(std::move(entries)), means_(std::move(means)) {
  const std::size_t k = names_.size();
  if (entries_.size() != k * k) throw std::invalid_argument("covariance matrix size mismatch");
  if (means_.size() != k) throw std::invalid_argument("means size mismatch");
  for (std::size_t i = 0; i < k; ++i) {
    if (!(entries_[i * k + i] > 0.0))
      throw SingularError("non-positive variance for " + names_[i]);
    for (std::size_t j = i + 1; j < k; ++j)
      if (std::abs(entries_[i * k + j] - entries_[j * k + i]) >
          1e-9 * std::max(1.0, std::abs(entries_[i * k + j])))
        throw std::invalid_argument("covariance matrix not symmetric");
  }
}

std::size_t CovMatrix::index_of(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw std::invalid_argument("unknown variable: " + name);
  return static_cast<std::size_t>(it - names_.begin());
}

double CovMatrix::operator()(const std::string& x, const std::string& y) const {
  return at(index_of(x), index_of(y));
}

double CovMatrix::variance(const std::string& x) const {
  std::size_t i = index_of(x);
  return at(i, i);
}

double CovMatrix::mean(const std::string& x) const { return means_[index_of(x)]; }

CovMatrix sample_moments(const Dataset& data) {
  const std::size_t k = data.column_count();
  const std::size_t n = data.row_count();
  if (n < 2) throw std::invalid_argument("sample moments need at least 2 rows");
  std::vector<double> means(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    double s = 0.0;
    for (double v : data.columns[j]) {
      if (!std::isfinite(v)) throw std::invalid_argument("non-finite value in " + data.names[j]);
      s += v;
    }
    means[j] = s / static_cast<double>(n);
  }
  std::vector<double> cov(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i; j < k; ++j) {
      double s = 0.0;
      const auto& ci = data.columns[i];
      const auto& cj = data.columns[j];
      for (std::size_t r = 0; r < n; ++r) s += (ci[r] - means[i]) * (cj[r] - means[j]);
      double v = s / static_cast<double>(n - 1);
      cov[i * k + j] = v;
      cov[j * k + i] = v;
    }
  }
  for (std::size_t i = 0; i < k; ++i)
    if (!(cov[i * k + i] > 0.0))
      throw SingularError("constant column " + data.names[i]);

  Eigen::MatrixXd m(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) m(i, j) = cov[i * k + j];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  double scale = m.diagonal().maxCoeff();
  if (es.eigenvalues().minCoeff() < -1e-9 * scale)
    throw SingularError("sample covariance matrix is not positive semidefinite");
  return CovMatrix(data.names, std::move(cov), std::move(means));
}

Dataset standardize(const Dataset& data) {
  const std::size_t n = data.row_count();
  if (n < 2) throw std::invalid_argument("standardize needs at least 2 rows");
  Dataset out;
  for (std::size_t j = 0; j < data.column_count(); ++j) {
    const auto& col = data.columns[j];
    double mean = 0.0;
    for (double v : col) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;  // population (n) convention
    for (double v : col) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    if (!(var > 0.0)) throw SingularError("constant column " + data.names[j]);
    double sd = std::sqrt(var);
    std::vector<double> scaled(n);
    for (std::size_t r = 0; r < n; ++r) scaled[r] = (col[r] - mean) / sd;
    out.add_column(data.names[j], std::move(scaled));
  }
  return out;
}

double beta_coef(const CovMatrix& cov, const std::string& y, const std::string& x) {
  double vx = cov.variance(x);
  if (!(vx > 0.0)) throw SingularError("zero variance for " + x);
  return cov(x, y) / vx;
}

double beta_partial1(const CovMatrix& cov, const std::string& y, const std::string& x,
                     const std::string& z) {
  double sx2 = cov.variance(x), sz2 = cov.variance(z);
  double sxz = cov(x, z);
  double den = sx2 * sz2 - sxz * sxz;
  if (den <= kRelTol * sx2 * sz2)
    throw SingularError("collinear predictors " + x + ", " + z);
  return (sz2 * cov(x, y) - cov(y, z) * sxz) / den;
}

PartialCofactors beta_partial2_detail(const CovMatrix& cov, const std::string& y,
                                      const std::string& x, const std::string& z,
                                      const std::string& w) {
  double sy = std::sqrt(cov.variance(y)), sx = std::sqrt(cov.variance(x));
  double sz = std::sqrt(cov.variance(z)), sw = std::sqrt(cov.variance(w));
  double r_yx = cov(y, x) / (sy * sx);
  double r_yz = cov(y, z) / (sy * sz);
  double r_yw = cov(y, w) / (sy * sw);
  double r_xz = cov(x, z) / (sx * sz);
  double r_xw = cov(x, w) / (sx * sw);
  double r_zw = cov(z, w) / (sz * sw);

  PartialCofactors pc;
  pc.c_ya = -(r_yx - r_yx * r_zw * r_zw - r_xz * r_yz - r_xw * r_yw + r_xz * r_yw * r_zw +
              r_xw * r_yz * r_zw);
  pc.c_yy = 1.0 - r_zw * r_zw - r_xz * r_xz - r_xw * r_xw + 2.0 * r_xz * r_xw * r_zw;
  pc.c_aa = 1.0 - r_zw * r_zw - r_yz * r_yz - r_yw * r_yw + 2.0 * r_yz * r_yw * r_zw;
  if (pc.c_yy <= kRelTol)
    throw SingularError("singular correlation submatrix over " + x + ", " + z + ", " + w);
  if (pc.c_aa <= kRelTol)
    throw SingularError("singular correlation submatrix over " + y + ", " + z + ", " + w);
  pc.rho_partial = -pc.c_ya / std::sqrt(pc.c_yy * pc.c_aa);
  pc.sigma_ratio = (sy / sx) * std::sqrt(pc.c_aa / pc.c_yy);
  pc.beta = pc.rho_partial * pc.sigma_ratio;
  return pc;
}

double beta_partial2(const CovMatrix& cov, const std::string& y, const std::string& x,
                     const std::string& z, const std::string& w) {
  return beta_partial2_detail(cov, y, x, z, w).beta;
}

double conf_bias_linear(const CovMatrix& cov, const std::string& y, const std::string& a,
                        const std::string& z) {
  double sa2 = cov.variance(a), sz2 = cov.variance(z);
  double sza = cov(z, a), sya = cov(y, a), syz = cov(y, z);
  double den = sa2 * sz2 - sza * sza;
  if (den <= kRelTol * sa2 * sz2) throw SingularError("collinear " + a + ", " + z);
  return (sza * syz - (sya / sa2) * sza * sza) / den;
}

double conf_bias_linear(const ConfoundingModel& m) {
  return (m.sigma_z2() / m.sigma_a2()) * m.beta * m.gamma;
}

double conf_bias_linear_standardized(double beta, double gamma) { return beta * gamma; }

double conf_bias_two(const CovMatrix& cov, const std::string& y, const std::string& a,
                     const std::string& z, const std::string& w, double zw_tol) {
  double szw = cov(z, w);
  if (std::abs(szw) > zw_tol)
    throw StructureError("two-confounder form assumes " + z + " independent of " + w +
                         " (sigma_zw = " + std::to_string(szw) + ")");
  double sza = cov(z, a), swa = cov(w, a), sya = cov(y, a);
  double syz = cov(y, z), syw = cov(y, w);
  double den = 1.0 - sza * sza - swa * swa;
  if (den <= kRelTol) throw SingularError("collinear " + a + ", " + z + ", " + w);
  return (sza * syz + swa * syw - sya * (sza * sza + swa * swa)) / den;
}

double conf_bias_two(const TwoConfounderModel& m) {
  return m.beta * m.gamma + m.delta * m.lambda;
}

double sel_bias_linear(const CovMatrix& cov, const std::string& y, const std::string& a,
                       const std::string& w) {
  double sa2 = cov.variance(a), sw2 = cov.variance(w);
  double swa = cov(w, a), sya = cov(y, a), syw = cov(y, w);
  double den = sa2 * sw2 - swa * swa;
  if (den <= kRelTol * sa2 * sw2) throw SingularError("collinear " + a + ", " + w);
  return ((sya / sa2) * swa * swa - swa * syw) / den;
}

double sel_bias_linear(const CollidingModel& m) {
  double sa2 = m.sigma_a2(), sy2 = m.sigma_y2(), sw2 = m.sigma_w2();
  double swa = sa2 * m.eta + sa2 * m.alpha * m.epsilon;
  double den = sa2 * sw2 - swa * swa;
  if (std::abs(den) <= kRelTol) throw SingularError("singular collider denominator");
  double num = sa2 * sa2 * m.alpha * m.alpha * m.eta + sa2 * sa2 * m.alpha * m.alpha * m.alpha * m.epsilon -
               sy2 * sa2 * m.eta - sy2 * sa2 * m.alpha * m.epsilon;
  return m.epsilon * num / den;
}

double sel_bias_linear_standardized(double alpha, double eta, double epsilon) {
  double swa = eta + alpha * epsilon;
  double den = 1.0 - swa * swa;
  if (std::abs(den) <= kRelTol) throw SingularError("singular collider denominator");
  return epsilon * (alpha * alpha * eta + alpha * alpha * alpha * epsilon - eta - alpha * epsilon) / den;
}

double meas_bias_linear(const CovMatrix& cov, const std::string& y, const std::string& a,
                        const std::string& z, const std::string& t) {
  return beta_partial1(cov, y, a, t) - beta_partial1(cov, y, a, z);
}

double meas_bias_linear(const MeasurementModel& m) {
  double sz2 = m.sigma_z2(), sa2 = m.sigma_a2(), st2 = m.sigma_t2();
  double lam = m.lambda_zt;
  double den = sa2 * st2 - sz2 * sz2 * lam * lam * m.beta * m.beta;
  if (std::abs(den) <= kRelTol) throw SingularError("singular measurement denominator");
  return sz2 * m.beta * m.gamma * (st2 - sz2 * lam * lam) / den;
}

double meas_bias_linear_standardized(double beta, double gamma, double lambda_zt) {
  double den = 1.0 - lambda_zt * lambda_zt * beta * beta;
  if (std::abs(den) <= kRelTol) throw SingularError("singular measurement denominator");
  return beta * gamma * (1.0 - lambda_zt * lambda_zt) / den;
}

double OlsFit::coef(const std::string& term) const {
  auto it = std::find(terms.begin(), terms.end(), term);
  if (it == terms.end()) throw std::invalid_argument("no such term: " + term);
  return coefficients[static_cast<std::size_t>(it - terms.begin())];
}

OlsFit ols_fit(const Dataset& data, const std::string& response,
               const std::vector<std::string>& predictors,
               std::optional<std::pair<std::string, std::string>> interaction) {
  const std::size_t n = data.row_count();
  std::vector<const std::vector<double>*> cols;
  OlsFit fit;
  fit.terms.push_back("(intercept)");
  for (const auto& p : predictors) {
    fit.terms.push_back(p);
    cols.push_back(&data.column(p));
  }
  std::vector<double> product;
  if (interaction) {
    const auto& ca = data.column(interaction->first);
    const auto& cb = data.column(interaction->second);
    product.resize(n);
    for (std::size_t r = 0; r < n; ++r) product[r] = ca[r] * cb[r];
    fit.terms.push_back(interaction->first + "*" + interaction->second);
    cols.push_back(&product);
  }
  const std::size_t p = fit.terms.size();
  if (n < p) throw std::invalid_argument("fewer rows than coefficients");
  const auto& yv = data.column(response);

  // Normal equations on accumulated moments, intercept column included.
  Eigen::MatrixXd xtx = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd xty = Eigen::VectorXd::Zero(p);
  auto x_at = [&](std::size_t r, std::size_t j) -> double {
    return j == 0 ? 1.0 : (*cols[j - 1])[r];
  };
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < p; ++i) {
      double xi = x_at(r, i);
      xty(i) += xi * yv[r];
      for (std::size_t j = i; j < p; ++j) xtx(i, j) += xi * x_at(r, j);
    }
  }
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < i; ++j) xtx(i, j) = xtx(j, i);

  Eigen::FullPivLU<Eigen::MatrixXd> lu(xtx);
  lu.setThreshold(1e-10);
  if (lu.rank() < static_cast<Eigen::Index>(p))
    throw SingularError("rank-deficient design matrix");
  Eigen::VectorXd beta = lu.solve(xty);
  fit.coefficients.assign(beta.data(), beta.data() + p);
  return fit;
}

double int_bias_linear(const InteractionLinearSpec& spec, InteractionScope scope) {
  switch (scope) {
    case InteractionScope::Intersectional: return spec.beta3;
    case InteractionScope::IndividualA: return spec.beta3 * spec.p_b1;
    case InteractionScope::IndividualB: return spec.beta3 * spec.p_a1;
  }
  throw std::invalid_argument("bad scope");
}

}  // namespace causalbias
