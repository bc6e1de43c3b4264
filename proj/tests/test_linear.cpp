#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "causalbias/errors.hpp"
#include "causalbias/linear.hpp"
#include "causalbias/rng.hpp"
#include "causalbias/scm.hpp"

using namespace causalbias;
using doctest::Approx;

namespace {

// Model-implied covariances of the unit-noise structures, used as exact inputs.
CovMatrix confounding_cov(double alpha, double beta, double gamma) {
  double sz2 = 1.0, sa2 = beta * beta + 1.0;
  double sza = beta;
  double sya = alpha * sa2 + beta * gamma;
  double syz = gamma + alpha * beta;
  double sy2 = alpha * alpha * sa2 + gamma * gamma + 2.0 * alpha * beta * gamma + 1.0;
  return CovMatrix({"Z", "A", "Y"},
                   {sz2, sza, syz, sza, sa2, sya, syz, sya, sy2},
                   {0.0, 0.0, 0.0});
}

CovMatrix colliding_cov(double alpha, double eta, double eps) {
  double sa2 = 1.0;
  double sy2 = alpha * alpha + 1.0;
  double sw2 = eta * eta + eps * eps * sy2 + 2.0 * eta * eps * alpha + 1.0;
  double sya = alpha;
  double swa = eta + alpha * eps;
  double syw = eta * alpha + eps * sy2;
  return CovMatrix({"A", "Y", "W"},
                   {sa2, sya, swa, sya, sy2, syw, swa, syw, sw2},
                   {0.0, 0.0, 0.0});
}

CovMatrix measurement_cov(double alpha, double beta, double gamma, double lam) {
  double sz2 = 1.0, sa2 = beta * beta + 1.0, st2 = lam * lam + 1.0;
  double sza = beta, szt = lam, sat = beta * lam;
  double sya = alpha * sa2 + beta * gamma;
  double syz = gamma + alpha * beta;
  double syt = lam * (gamma + alpha * beta);
  double sy2 = alpha * alpha * sa2 + gamma * gamma + 2.0 * alpha * beta * gamma + 1.0;
  return CovMatrix({"Z", "A", "Y", "T"},
                   {sz2, sza, syz, szt,
                    sza, sa2, sya, sat,
                    syz, sya, sy2, syt,
                    szt, sat, syt, st2},
                   {0.0, 0.0, 0.0, 0.0});
}

// Standardized two-confounder model covariances.
CovMatrix two_confounder_cov(double alpha, double beta, double gamma, double delta, double lam) {
  double sza = beta, swa = delta;
  double sya = alpha + beta * gamma + delta * lam;
  double syz = gamma + alpha * beta;
  double syw = lam + alpha * delta;
  return CovMatrix({"Y", "A", "Z", "W"},
                   {1.0, sya, syz, syw,
                    sya, 1.0, sza, swa,
                    syz, sza, 1.0, 0.0,
                    syw, swa, 0.0, 1.0},
                   {0.0, 0.0, 0.0, 0.0});
}

// Random well-conditioned PSD covariance matrix over 4 variables.
CovMatrix random_psd4(Rng& rng) {
  Eigen::MatrixXd m(4, 7);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 7; ++j) m(i, j) = rng.normal();
  Eigen::MatrixXd s = m * m.transpose() + 0.5 * Eigen::MatrixXd::Identity(4, 4);
  std::vector<double> entries(16);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) entries[static_cast<std::size_t>(i * 4 + j)] = s(i, j);
  return CovMatrix({"Y", "A", "Z", "W"}, std::move(entries), {0.0, 0.0, 0.0, 0.0});
}

// Independent oracle: partial coefficient of x from the normal equations.
double ols_partial(const CovMatrix& cov, const std::string& y,
                   const std::vector<std::string>& predictors) {
  const int p = static_cast<int>(predictors.size());
  Eigen::MatrixXd sxx(p, p);
  Eigen::VectorXd sxy(p);
  for (int i = 0; i < p; ++i) {
    sxy(i) = cov(predictors[static_cast<std::size_t>(i)], y);
    for (int j = 0; j < p; ++j)
      sxx(i, j) = cov(predictors[static_cast<std::size_t>(i)], predictors[static_cast<std::size_t>(j)]);
  }
  Eigen::VectorXd b = sxx.ldlt().solve(sxy);
  return b(0);
}

}  // namespace

TEST_CASE("sample_moments") {
  Dataset d;
  d.add_column("X", {0.0, 2.0});
  d.add_column("Y", {0.0, 2.0});
  CovMatrix cov = sample_moments(d);
  CHECK(cov("X", "Y") == Approx(2.0));
  CHECK(cov.variance("X") == Approx(2.0));
  CHECK(cov.mean("X") == Approx(1.0));

  SUBCASE("column standardized under the n-1 convention has unit sample variance") {
    Rng rng(3);
    std::vector<double> raw(100);
    for (auto& v : raw) v = rng.normal() * 3.0 + 1.0;
    double mean = 0.0;
    for (double v : raw) mean += v;
    mean /= raw.size();
    double var = 0.0;
    for (double v : raw) var += (v - mean) * (v - mean);
    var /= (raw.size() - 1);
    Dataset s;
    std::vector<double> scaled;
    for (double v : raw) scaled.push_back((v - mean) / std::sqrt(var));
    s.add_column("X", scaled);
    s.add_column("X2", raw);
    CHECK(sample_moments(s).variance("X") == Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("constant column is flagged") {
    Dataset c;
    c.add_column("X", {1.0, 1.0, 1.0});
    c.add_column("Y", {0.0, 1.0, 2.0});
    CHECK_THROWS_AS(sample_moments(c), SingularError);
  }

  SUBCASE("simulated confounding data reproduces the Wright covariance") {
    Dataset d6 = simulate({LinearConfoundingSpec{0.3, 0.5, 0.5}, 1000000, 99});
    CovMatrix m = sample_moments(d6);
    // SE of sigma_za at N=1e6 is about 0.0012; four SEs is 0.005
    CHECK(std::abs(m("Z", "A") - 0.5) < 0.005);
  }
}

TEST_CASE("standardize") {
  Rng rng(3);
  Dataset d;
  std::vector<double> a(50), b(50);
  for (auto& v : a) v = rng.normal() * 2.0 + 5.0;
  for (auto& v : b) v = rng.uniform(-3.0, 3.0);
  d.add_column("A", a);
  d.add_column("B", b);

  Dataset s = standardize(d);
  SUBCASE("population mean 0, variance 1") {
    for (const auto& col : s.columns) {
      double mean = 0.0, var = 0.0;
      for (double v : col) mean += v;
      mean /= col.size();
      for (double v : col) var += (v - mean) * (v - mean);
      var /= col.size();
      CHECK(std::abs(mean) < 1e-12);
      CHECK(var == Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("idempotent") {
    Dataset s2 = standardize(s);
    for (std::size_t j = 0; j < s.columns.size(); ++j)
      for (std::size_t r = 0; r < s.row_count(); ++r)
        CHECK(s2.columns[j][r] == Approx(s.columns[j][r]).epsilon(1e-12));
  }
  SUBCASE("two-point column maps to (-1, 1)") {
    Dataset two;
    two.add_column("X", {0.0, 2.0});
    Dataset st = standardize(two);
    CHECK(st.columns[0][0] == Approx(-1.0));
    CHECK(st.columns[0][1] == Approx(1.0));
  }
  SUBCASE("constant column rejected") {
    Dataset c;
    c.add_column("X", {2.0, 2.0});
    CHECK_THROWS_AS(standardize(c), SingularError);
  }
}

TEST_CASE("beta_coef") {
  CovMatrix dup({"X", "Y"}, {1.0, 1.0, 1.0, 1.0 + 1e-12}, {0.0, 0.0});
  CHECK(beta_coef(dup, "Y", "X") == Approx(1.0));

  CovMatrix uncorr({"X", "Y"}, {2.0, 0.0, 0.0, 3.0}, {0.0, 0.0});
  CHECK(beta_coef(uncorr, "Y", "X") == 0.0);

  CovMatrix fig5 = confounding_cov(0.3, 0.5, 0.5);
  CHECK(beta_coef(fig5, "Y", "A") == Approx(0.5).epsilon(1e-15));
}

TEST_CASE("beta_partial1") {
  SUBCASE("reduces to beta when x and z are uncorrelated") {
    CovMatrix cov({"Y", "X", "Z"}, {1.0, 0.4, 0.3, 0.4, 1.0, 0.0, 0.3, 0.0, 1.0},
                  {0.0, 0.0, 0.0});
    CHECK(beta_partial1(cov, "Y", "X", "Z") == Approx(beta_coef(cov, "Y", "X")).epsilon(1e-15));
  }
  SUBCASE("confounding structure forces beta_ya.z = alpha") {
    CovMatrix fig5 = confounding_cov(0.3, 0.5, 0.5);
    CHECK(beta_partial1(fig5, "Y", "A", "Z") == Approx(0.3).epsilon(1e-12));
  }
  SUBCASE("collinear controls are rejected") {
    CovMatrix cov({"Y", "X", "Z"}, {1.0, 0.4, 0.4, 0.4, 1.0, 1.0, 0.4, 1.0, 1.0},
                  {0.0, 0.0, 0.0});
    CHECK_THROWS_AS(beta_partial1(cov, "Y", "X", "Z"), SingularError);
  }
}

TEST_CASE("beta_partial2") {
  SUBCASE("uncorrelated controls on standardized inputs reduce to sigma_ya") {
    CovMatrix cov({"Y", "A", "Z", "W"},
                  {1.0, 0.4, 0.2, 0.3,
                   0.4, 1.0, 0.0, 0.0,
                   0.2, 0.0, 1.0, 0.0,
                   0.3, 0.0, 0.0, 1.0},
                  {0.0, 0.0, 0.0, 0.0});
    CHECK(beta_partial2(cov, "Y", "A", "Z", "W") == Approx(0.4).epsilon(1e-12));
  }

  SUBCASE("sigma_zw = 0 matches the simple two-control closed form") {
    Rng rng(11);
    for (int i = 0; i < 100; ++i) {
      double sya = rng.uniform(-0.3, 0.3), sza = rng.uniform(-0.3, 0.3);
      double swa = rng.uniform(-0.3, 0.3), syz = rng.uniform(-0.3, 0.3);
      double syw = rng.uniform(-0.3, 0.3);
      CovMatrix cov({"Y", "A", "Z", "W"},
                    {1.0, sya, syz, syw,
                     sya, 1.0, sza, swa,
                     syz, sza, 1.0, 0.0,
                     syw, swa, 0.0, 1.0},
                    {0.0, 0.0, 0.0, 0.0});
      double expected = (sya - sza * syz - syw * swa) / (1.0 - sza * sza - swa * swa);
      CHECK(beta_partial2(cov, "Y", "A", "Z", "W") == Approx(expected).epsilon(1e-12));
    }
  }

  SUBCASE("matches the normal-equations solve on random PSD matrices") {
    Rng rng(11);
    double worst = 0.0;
    for (int i = 0; i < 500; ++i) {
      CovMatrix cov = random_psd4(rng);
      double cofactor = beta_partial2(cov, "Y", "A", "Z", "W");
      double oracle = ols_partial(cov, "Y", {"A", "Z", "W"});
      worst = std::max(worst, std::abs(cofactor - oracle));
    }
    CHECK(worst < 1e-10);
  }

  SUBCASE("exposes the cofactor intermediates") {
    CovMatrix cov = two_confounder_cov(0.3, 0.5, 0.5, 0.5, 0.5);
    PartialCofactors pc = beta_partial2_detail(cov, "Y", "A", "Z", "W");
    CHECK(pc.beta == Approx(pc.rho_partial * pc.sigma_ratio));
    CHECK(pc.c_yy > 0.0);
    CHECK(pc.c_aa > 0.0);
  }
}

TEST_CASE("conf_bias_linear") {
  CHECK(conf_bias_linear(ConfoundingModel{0.7, 0.0, 0.9}) == 0.0);
  CHECK(conf_bias_linear(ConfoundingModel{0.7, 0.9, 0.0}) == 0.0);
  CHECK(conf_bias_linear(ConfoundingModel{0.3, 0.5, 0.5}) == Approx(0.2).epsilon(1e-15));
  CHECK(conf_bias_linear_standardized(1.0, 1.0) == 1.0);

  SUBCASE("equals beta_ya - beta_ya.z on model covariances") {
    Rng rng(21);
    for (int i = 0; i < 200; ++i) {
      double a = rng.uniform(-1, 1), b = rng.uniform(-1, 1), g = rng.uniform(-1, 1);
      CovMatrix cov = confounding_cov(a, b, g);
      double diff = beta_coef(cov, "Y", "A") - beta_partial1(cov, "Y", "A", "Z");
      CHECK(conf_bias_linear(ConfoundingModel{a, b, g}) == Approx(diff).epsilon(1e-10));
      CHECK(conf_bias_linear(cov, "Y", "A", "Z") == Approx(diff).epsilon(1e-10));
    }
  }
}

TEST_CASE("conf_bias_two") {
  CHECK(conf_bias_two(TwoConfounderModel{0.3, 0.5, 0.5, 0.0, 0.0}) == Approx(0.25));
  CHECK(conf_bias_two(TwoConfounderModel{0.3, 0.5, 0.5, 0.5, 0.5}) == Approx(0.5));
  CHECK(conf_bias_two(TwoConfounderModel{0.3, 0.5, 0.4, 0.4, -0.5}) == Approx(0.0));

  SUBCASE("covariance form matches the coefficient form on model covariances") {
    Rng rng(22);
    for (int i = 0; i < 200; ++i) {
      double a = rng.uniform(-0.4, 0.4), b = rng.uniform(-0.4, 0.4), g = rng.uniform(-0.4, 0.4);
      double d = rng.uniform(-0.4, 0.4), l = rng.uniform(-0.4, 0.4);
      CovMatrix cov = two_confounder_cov(a, b, g, d, l);
      CHECK(conf_bias_two(cov, "Y", "A", "Z", "W") ==
            Approx(b * g + d * l).epsilon(1e-10));
      double diff = beta_coef(cov, "Y", "A") - beta_partial2(cov, "Y", "A", "Z", "W");
      CHECK(conf_bias_two(cov, "Y", "A", "Z", "W") == Approx(diff).epsilon(1e-10));
    }
  }

  SUBCASE("correlated confounders are rejected") {
    CovMatrix cov({"Y", "A", "Z", "W"},
                  {1.0, 0.3, 0.2, 0.2,
                   0.3, 1.0, 0.3, 0.3,
                   0.2, 0.3, 1.0, 0.4,
                   0.2, 0.3, 0.4, 1.0},
                  {0.0, 0.0, 0.0, 0.0});
    CHECK_THROWS_AS(conf_bias_two(cov, "Y", "A", "Z", "W"), StructureError);
  }
}

TEST_CASE("sel_bias_linear") {
  CHECK(sel_bias_linear(CollidingModel{0.5, 0.3, 0.0}) == 0.0);
  CHECK(sel_bias_linear(CollidingModel{0.5, 0.3, 0.6}) == Approx(-9.0 / 34.0).epsilon(1e-12));
  // eta = 0 does not kill the bias when epsilon and alpha are nonzero
  CHECK(std::abs(sel_bias_linear(CollidingModel{0.5, 0.0, 0.6})) > 0.05);

  SUBCASE("equals beta_ya.w - beta_ya on model covariances") {
    Rng rng(23);
    for (int i = 0; i < 200; ++i) {
      double a = rng.uniform(-1, 1), e = rng.uniform(-1, 1), eps = rng.uniform(-1, 1);
      CovMatrix cov = colliding_cov(a, e, eps);
      double diff = beta_partial1(cov, "Y", "A", "W") - beta_coef(cov, "Y", "A");
      CHECK(sel_bias_linear(CollidingModel{a, e, eps}) == Approx(diff).epsilon(1e-10));
      CHECK(sel_bias_linear(cov, "Y", "A", "W") == Approx(diff).epsilon(1e-10));
    }
  }
}

TEST_CASE("meas_bias_linear") {
  // useless proxy leaves the full confounding bias
  CHECK(meas_bias_linear(MeasurementModel{0.3, 0.5, 0.5, 0.0}) == Approx(0.2).epsilon(1e-12));
  CHECK(meas_bias_linear(MeasurementModel{0.3, 0.5, 0.5, 1.0}) ==
        Approx(1.0 / 9.0).epsilon(1e-12));
  CHECK(meas_bias_linear_standardized(0.5, 0.5, 1.0) == Approx(0.0));

  SUBCASE("equals beta_ya.t - beta_ya.z on model covariances") {
    Rng rng(24);
    for (int i = 0; i < 200; ++i) {
      double a = rng.uniform(-1, 1), b = rng.uniform(-1, 1);
      double g = rng.uniform(-1, 1), l = rng.uniform(-1, 1);
      CovMatrix cov = measurement_cov(a, b, g, l);
      double diff = beta_partial1(cov, "Y", "A", "T") - beta_partial1(cov, "Y", "A", "Z");
      CHECK(meas_bias_linear(MeasurementModel{a, b, g, l}) == Approx(diff).epsilon(1e-10));
      CHECK(meas_bias_linear(cov, "Y", "A", "Z", "T") == Approx(diff).epsilon(1e-10));
    }
  }
}

TEST_CASE("ols_fit") {
  SUBCASE("noiseless line") {
    Dataset d;
    d.add_column("X", {0.0, 1.0, 2.0, 3.0});
    d.add_column("Y", {0.0, 2.0, 4.0, 6.0});
    OlsFit fit = ols_fit(d, "Y", {"X"});
    CHECK(fit.coef("X") == Approx(2.0).epsilon(1e-12));
    CHECK(fit.coef("(intercept)") == Approx(0.0).epsilon(1e-10));
  }

  SUBCASE("recovers the interaction model coefficients") {
    LinearInteractionSpec s{1.0, 0.5, 0.3, 0.4, 0.2, 0.5, 0.5};
    Dataset d = simulate({s, 200000, 17});
    OlsFit fit = ols_fit(d, "Y", {"A", "B", "C"}, std::make_pair("A", "B"));
    CHECK(fit.coef("(intercept)") == Approx(1.0).epsilon(0.05));
    CHECK(fit.coef("A") == Approx(0.5).epsilon(0.05));
    CHECK(fit.coef("B") == Approx(0.3).epsilon(0.05));
    CHECK(fit.coef("A*B") == Approx(0.4).epsilon(0.05));
    CHECK(fit.coef("C") == Approx(0.2).epsilon(0.05));
  }

  SUBCASE("duplicate predictors are rank deficient") {
    Dataset d;
    d.add_column("X", {0.0, 1.0, 2.0, 3.0});
    d.add_column("X2", {0.0, 1.0, 2.0, 3.0});
    d.add_column("Y", {0.1, 2.0, 4.2, 5.9});
    CHECK_THROWS_AS(ols_fit(d, "Y", {"X", "X2"}), SingularError);
  }
}

TEST_CASE("int_bias_linear") {
  InteractionLinearSpec zero;
  CHECK(int_bias_linear(zero, InteractionScope::Intersectional) == 0.0);
  CHECK(int_bias_linear(zero, InteractionScope::IndividualA) == 0.0);

  InteractionLinearSpec s;
  s.beta3 = 0.4;
  s.p_a1 = 0.3;
  s.p_b1 = 0.5;
  CHECK(int_bias_linear(s, InteractionScope::Intersectional) == Approx(0.4));
  CHECK(int_bias_linear(s, InteractionScope::IndividualA) == Approx(0.2));
  CHECK(int_bias_linear(s, InteractionScope::IndividualB) == Approx(0.4 * 0.3));
}

TEST_CASE("standardized corollaries equal the general forms at unit variances") {
  Rng rng(25);
  for (int i = 0; i < 100; ++i) {
    // unit-diagonal covariance triples (kept small so the matrix stays PSD)
    double sza = rng.uniform(-0.5, 0.5), syz = rng.uniform(-0.5, 0.5),
           sya = rng.uniform(-0.5, 0.5);
    CovMatrix cov({"Y", "A", "Z"},
                  {1.0, sya, syz, sya, 1.0, sza, syz, sza, 1.0},
                  {0.0, 0.0, 0.0});
    double corollary = (sza * syz - sya * sza * sza) / (1.0 - sza * sza);
    CHECK(conf_bias_linear(cov, "Y", "A", "Z") == Approx(corollary).epsilon(1e-12));

    CovMatrix covw({"Y", "A", "W"},
                   {1.0, sya, syz, sya, 1.0, sza, syz, sza, 1.0},
                   {0.0, 0.0, 0.0});
    double sel_corollary = (sya * sza * sza - sza * syz) / (1.0 - sza * sza);
    CHECK(sel_bias_linear(covw, "Y", "A", "W") == Approx(sel_corollary).epsilon(1e-12));
  }
}

TEST_CASE("confounding bias magnitude grows with |beta| on the unit-noise model") {
  // d/dbeta of beta/(1+beta^2) is (1-beta^2)/(1+beta^2)^2 >= 0 on [-1,1]
  double prev = -1.0;
  for (double beta = 0.0; beta <= 1.0 + 1e-9; beta += 0.1) {
    double v = std::abs(conf_bias_linear(ConfoundingModel{0.0, beta, 0.5}));
    CHECK(v >= prev - 1e-15);
    prev = v;
  }
  SUBCASE("exactly linear in gamma at fixed beta") {
    for (double g : {0.2, 0.4, 0.8}) {
      double unit = conf_bias_linear(ConfoundingModel{0.0, 0.7, 1.0});
      CHECK(conf_bias_linear(ConfoundingModel{0.0, 0.7, g}) == Approx(g * unit).epsilon(1e-12));
    }
  }
}
