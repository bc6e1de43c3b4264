#include <doctest.h>

#include <cmath>

#include "causalbias/bias_params.hpp"
#include "causalbias/errors.hpp"
#include "causalbias/joint_table.hpp"
#include "causalbias/rng.hpp"
#include "causalbias/scm.hpp"
#include "support.hpp"

using namespace causalbias;
using doctest::Approx;

TEST_CASE("from_samples: four distinct rows give the uniform table") {
  JointTable t = JointTable::from_samples({{0, 0}, {0, 1}, {1, 0}, {1, 1}}, {"A", "Y"});
  for (std::size_t i = 0; i < 4; ++i) CHECK(t.cell(i) == Approx(0.25));
  CHECK(t.sample_count() == 4);
}

TEST_CASE("from_samples: identical rows concentrate all mass") {
  std::vector<std::vector<int>> rows(10, {1, 1});
  JointTable t = JointTable::from_samples(rows, {"A", "Y"});
  CHECK(t.marginal({{"A", 1}, {"Y", 1}}) == Approx(1.0));
  CHECK(t.marginal({{"A", 0}}) == 0.0);
}

TEST_CASE("from_samples rejects bad input") {
  CHECK_THROWS_AS(JointTable::from_samples({}, {"A"}), std::invalid_argument);
  CHECK_THROWS_AS(JointTable::from_samples({{0, 2}}, {"A", "Y"}), std::invalid_argument);
}

TEST_CASE("table constructor validates") {
  CHECK_THROWS_AS(JointTable({"A"}, {0.5, 0.6}), std::invalid_argument);       // sum != 1
  CHECK_THROWS_AS(JointTable({"A"}, {1.5, -0.5}), std::invalid_argument);      // negative
  CHECK_THROWS_AS(JointTable({"A", "A"}, {0.25, 0.25, 0.25, 0.25}), std::invalid_argument);
  CHECK_THROWS_AS(JointTable({"A"}, {0.5, 0.25, 0.25}), std::invalid_argument);  // not 2^k
}

TEST_CASE("cond_prob on the uniform table and null conditioning") {
  JointTable t({"A", "Y"}, {0.25, 0.25, 0.25, 0.25});
  CHECK(t.cond_prob({{"Y", 1}}, {{"A", 1}}) == Approx(0.5));
  JointTable degenerate({"A", "Y"}, {0.5, 0.5, 0.0, 0.0});
  CHECK_THROWS_AS(degenerate.cond_prob({{"Y", 1}}, {{"A", 1}}), PositivityError);
}

// Two parameter sets used throughout: the general-form set of the lambda=1/4
// worked example and the balanced set of the lambda=1/2 worked example. The
// conditionals below were computed with the hand-expansion oracle
// P(y1|a1) = gamma P(z0|a1) + delta P(z1|a1).
static const ConfoundParams kGeneralSet(0.2, 0.6, 0.3, 0.7, 0.6, 0.5, 0.25);
static const ConfoundParams kBalancedSet(0.9, 0.1, 0.8, 0.2, 0.4, 0.3, 0.5);

TEST_CASE("cond_prob matches the hand expansion for both worked parameter sets") {
  JointTable tg = enumerate_joint(BinaryConfoundingSpec{kGeneralSet});
  CHECK(tg.cond_prob({{"Y", 1}}, {{"A", 1}}) == Approx(0.66).epsilon(1e-12));
  CHECK(tg.cond_prob({{"Y", 1}}, {{"A", 0}}) == Approx(0.40).epsilon(1e-12));

  JointTable tb = enumerate_joint(BinaryConfoundingSpec{kBalancedSet});
  // P(z1|a1) = 2 eps + tau - 1 = 0.1, so gamma*0.9 + delta*0.1 = 0.74
  CHECK(tb.cond_prob({{"Y", 1}}, {{"A", 1}}) == Approx(0.74).epsilon(1e-12));
  CHECK(tb.cond_prob({{"Y", 1}}, {{"A", 0}}) == Approx(0.34).epsilon(1e-12));
}

TEST_CASE("stat_disp basics") {
  JointTable indep({"A", "Y"}, {0.3 * 0.6, 0.3 * 0.4, 0.7 * 0.6, 0.7 * 0.4});
  CHECK(stat_disp(indep, "Y", "A") == Approx(0.0).epsilon(1e-15));

  JointTable extreme({"A", "Y"}, {0.5, 0.0, 0.0, 0.5});
  CHECK(stat_disp(extreme, "Y", "A") == Approx(1.0));

  JointTable tg = enumerate_joint(BinaryConfoundingSpec{kGeneralSet});
  CHECK(stat_disp(tg, "Y", "A") == Approx(0.26).epsilon(1e-12));
}

TEST_CASE("stat_disp_adjusted: worked ACE values and edge cases") {
  JointTable tb = enumerate_joint(BinaryConfoundingSpec{kBalancedSet});
  CHECK(stat_disp_adjusted(tb, "Y", "A", {"Z"}) == Approx(-0.02).epsilon(1e-9));

  JointTable tg = enumerate_joint(BinaryConfoundingSpec{kGeneralSet});
  CHECK(stat_disp_adjusted(tg, "Y", "A", {"Z"}) == Approx(0.10).epsilon(1e-9));

  SUBCASE("empty adjustment set equals stat_disp, property over random tables") {
    Rng rng(11);
    for (int i = 0; i < 100; ++i) {
      JointTable t = testsupport::random_table(rng, {"A", "Z", "Y"});
      CHECK(stat_disp_adjusted(t, "Y", "A", {}) == stat_disp(t, "Y", "A"));
    }
  }

  SUBCASE("adjusting on an irrelevant independent variable changes nothing") {
    // U independent of (A,Y)
    Rng rng(5);
    JointTable base = testsupport::random_table(rng, {"A", "Y"});
    std::vector<double> p(8);
    double pu = 0.3;
    for (int a : {0, 1})
      for (int y : {0, 1})
        for (int u : {0, 1})
          p[static_cast<std::size_t>((a << 2) | (y << 1) | u)] =
              base.marginal({{"A", a}, {"Y", y}}) * (u ? pu : 1 - pu);
    JointTable t({"A", "Y", "U"}, std::move(p));
    CHECK(stat_disp_adjusted(t, "Y", "A", {"U"}) ==
          Approx(stat_disp(t, "Y", "A")).epsilon(1e-12));
  }

  SUBCASE("positivity violation names the stratum") {
    // Z=1 stratum exists but only with A=1
    JointTable t({"A", "Z", "Y"}, {0.2, 0.2, 0.0, 0.0, 0.2, 0.2, 0.1, 0.1});
    CHECK_THROWS_WITH_AS(stat_disp_adjusted(t, "Y", "A", {"Z"}),
                         doctest::Contains("Z=1"), PositivityError);
  }
}

TEST_CASE("interaction_term worked values") {
  // P(y1|a,b) = (0.1, 0.2, 0.3, 0.8) for (a0b0, a0b1, a1b0, a1b1), uniform (A,B)
  auto table_from_conditionals = [](double p00, double p01, double p10, double p11) {
    std::vector<double> p(8);
    double cond[2][2] = {{p00, p01}, {p10, p11}};
    for (int a : {0, 1})
      for (int b : {0, 1})
        for (int y : {0, 1})
          p[static_cast<std::size_t>((a << 2) | (b << 1) | y)] =
              0.25 * (y ? cond[a][b] : 1 - cond[a][b]);
    return JointTable({"A", "B", "Y"}, std::move(p));
  };

  JointTable t = table_from_conditionals(0.1, 0.2, 0.3, 0.8);
  CHECK(interaction_term(t, "Y", "A", "B") == Approx(0.4).epsilon(1e-12));
  CHECK(sd_no_interaction(t, "Y", "A", "B") == Approx(0.2).epsilon(1e-12));

  // additive conditionals 0.1 + 0.2a + 0.3b: no interaction
  JointTable add = table_from_conditionals(0.1, 0.4, 0.3, 0.6);
  CHECK(interaction_term(add, "Y", "A", "B") == Approx(0.0).epsilon(1e-12));
  CHECK(sd_no_interaction(add, "Y", "A", "B") == Approx(0.2).epsilon(1e-12));

  // constant in a: no effect of A, so no interaction
  JointTable const_a = table_from_conditionals(0.3, 0.7, 0.3, 0.7);
  CHECK(interaction_term(const_a, "Y", "A", "B") == Approx(0.0).epsilon(1e-12));
  CHECK(sd_no_interaction(const_a, "Y", "A", "B") == Approx(0.0).epsilon(1e-12));
}

TEST_CASE("interaction_adjusted") {
  Rng rng(7);
  SUBCASE("independent Z equals the unadjusted term") {
    JointTable base = testsupport::random_independent_ab(rng);
    double pz = 0.4;
    std::vector<double> p(16);
    for (int a : {0, 1})
      for (int b : {0, 1})
        for (int y : {0, 1})
          for (int z : {0, 1})
            p[static_cast<std::size_t>((a << 3) | (b << 2) | (y << 1) | z)] =
                base.marginal({{"A", a}, {"B", b}, {"Y", y}}) * (z ? pz : 1 - pz);
    JointTable t({"A", "B", "Y", "Z"}, std::move(p));
    CHECK(interaction_adjusted(t, "Y", "A", "B", "Z") ==
          Approx(interaction_term(t, "Y", "A", "B")).epsilon(1e-12));
  }

  SUBCASE("random 4-variable table matches a direct stratified sum") {
    for (int rep = 0; rep < 50; ++rep) {
      JointTable t = testsupport::random_table(rng, {"A", "B", "Y", "Z"});
      double expected = 0.0;
      for (int z : {0, 1}) {
        auto c = [&](int a, int b) {
          return t.marginal({{"A", a}, {"B", b}, {"Y", 1}, {"Z", z}}) /
                 t.marginal({{"A", a}, {"B", b}, {"Z", z}});
        };
        expected += (c(1, 1) - c(0, 1) - c(1, 0) + c(0, 0)) * t.marginal({{"Z", z}});
      }
      CHECK(interaction_adjusted(t, "Y", "A", "B", "Z") == Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("interaction decomposition identities (Thm 7.1 / 7.2 shapes)") {
  Rng rng(13);
  SUBCASE("joint disparity = SDnoInt(A) + SDnoInt(B) + interaction, all tables") {
    for (int rep = 0; rep < 200; ++rep) {
      JointTable t = testsupport::random_table(rng, {"A", "B", "Y"});
      double joint = t.cond_prob({{"Y", 1}}, {{"A", 1}, {"B", 1}}) -
                     t.cond_prob({{"Y", 1}}, {{"A", 0}, {"B", 0}});
      double sum = sd_no_interaction(t, "Y", "A", "B") + sd_no_interaction(t, "Y", "B", "A") +
                   interaction_term(t, "Y", "A", "B");
      CHECK(joint == Approx(sum).epsilon(1e-12));
    }
  }
  SUBCASE("StatDisp = SDnoInt + P(b1) interaction when A and B independent") {
    for (int rep = 0; rep < 200; ++rep) {
      JointTable t = testsupport::random_independent_ab(rng);
      double lhs = stat_disp(t, "Y", "A");
      double rhs = sd_no_interaction(t, "Y", "A", "B") +
                   t.marginal({{"B", 1}}) * interaction_term(t, "Y", "A", "B");
      CHECK(std::abs(lhs - rhs) < 1e-12);
    }
  }
  SUBCASE("output ranges") {
    for (int rep = 0; rep < 100; ++rep) {
      JointTable t = testsupport::random_table(rng, {"A", "B", "Y"});
      CHECK(std::abs(stat_disp(t, "Y", "A")) <= 1.0);
      CHECK(std::abs(sd_no_interaction(t, "Y", "A", "B")) <= 1.0);
      CHECK(std::abs(interaction_term(t, "Y", "A", "B")) <= 2.0);
    }
  }
}

TEST_CASE("from_samples converges to the generating table") {
  ConfoundParams p(0.9, 0.1, 0.8, 0.2, 0.4, 0.3, 0.5);
  JointTable truth = enumerate_joint(BinaryConfoundingSpec{p});
  Dataset d = simulate({BinaryConfoundingSpec{p}, 1000000, 42});
  std::vector<std::vector<int>> rows(d.row_count(), std::vector<int>(3));
  for (std::size_t j = 0; j < 3; ++j) {
    const auto& col = d.columns[j];
    for (std::size_t r = 0; r < col.size(); ++r) rows[r][j] = static_cast<int>(col[r]);
  }
  JointTable est = JointTable::from_samples(rows, d.names);
  for (std::size_t i = 0; i < truth.cell_count(); ++i)
    CHECK(std::abs(est.cell(i) - truth.cell(i)) < 0.005);
}
