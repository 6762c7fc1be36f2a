#include <stdexcept>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "nsum/analytic.hpp"
#include "nsum/rng.hpp"

using namespace nsum;

TEST_CASE("expectations on hand-evaluated points") {
  // equal probabilities: both estimators are unbiased
  for (RatioKind kind : {RatioKind::drpr, RatioKind::drpa})
    CHECK(expect_general(kind, 0.01, 0.01, 0.01, 0.37) == doctest::Approx(0.37).epsilon(1e-15));

  CHECK(expect_general(RatioKind::drpr, 0.02, 0.01, 0.02, 0.25) ==
        doctest::Approx(0.25 * (0.25 * 0.02 + 0.75 * 0.01) / (0.25 * 0.01 + 0.75 * 0.02))
            .epsilon(1e-15));
  CHECK(expect_general(RatioKind::drpa, 0.02, 0.01, 0.02, 0.25) == 0.21875);

  CHECK_THROWS_AS(expect_general(RatioKind::drpa, 0.02, 0.0, 0.02, 0.25), std::domain_error);
  CHECK_THROWS_AS(expect_general(RatioKind::drpr, 0.02, 0.0, 0.0, 0.25), std::domain_error);
  CHECK_THROWS_AS(expect_general(RatioKind::drpr, 0.02, 0.01, 0.02, 0.0), std::invalid_argument);
}

TEST_CASE("variance closed forms") {
  // all probabilities equal, R=0.5, nN=5e5, r_K=0.1 -> 5.94e-4 for both
  double v1 = var_general(RatioKind::drpr, 0.01, 0.01, 0.01, 0.5, 1.0, 5e5, 5e4);
  double v2 = var_general(RatioKind::drpa, 0.01, 0.01, 0.01, 0.5, 1.0, 5e5, 5e4);
  CHECK(v1 == doctest::Approx(5.94e-4).epsilon(1e-12));
  CHECK(v2 == doctest::Approx(v1).epsilon(1e-14));

  // scales as 1/n at fixed N, N_K
  double half = var_general(RatioKind::drpr, 0.02, 0.01, 0.02, 0.25, 1000, 2e4, 2e3);
  double full = var_general(RatioKind::drpr, 0.02, 0.01, 0.02, 0.25, 500, 2e4, 2e3);
  CHECK(full == doctest::Approx(2.0 * half).epsilon(1e-12));
}

TEST_CASE("scaled bias closed forms and exact zeros") {
  for (RatioKind kind : {RatioKind::drpr, RatioKind::drpa}) {
    CHECK(bias_scaled(kind, 1.0, 0.123) == 0.0);
    CHECK(bias_scaled(kind, 1.0, 0.9) == 0.0);
  }
  CHECK(bias_scaled(RatioKind::drpr, 7.3, 0.5) == 0.0);
  CHECK(bias_scaled(RatioKind::drpa, 3.0, 0.25) == 0.0);  // a = (1-R)/R
  CHECK(bias_scaled(RatioKind::drpa, 4.0, 0.2) == 0.0);
  CHECK(bias_scaled(RatioKind::drpa, 7.0, 0.125) == 0.0);

  CHECK(bias_scaled(RatioKind::drpr, 2.0, 0.25) ==
        doctest::Approx(-0.0714285714285714).epsilon(1e-12));
  CHECK(bias_scaled(RatioKind::drpa, 2.0, 0.25) == -0.03125);
}

TEST_CASE("scaled variance reduces the general form") {
  Rng rng(31);
  for (int i = 0; i < 300; ++i) {
    double a = std::exp(-4.0 + 8.0 * rng.uniform01());
    double p = 0.001 + 0.02 * rng.uniform01();
    if (a * p > 1.0) continue;
    double r = 0.01 + 0.98 * rng.uniform01();
    double rk = 0.05 + 0.5 * rng.uniform01();
    double nn = 1e4 + 1e6 * rng.uniform01();
    for (RatioKind kind : {RatioKind::drpr, RatioKind::drpa}) {
      double scaled = var_scaled(kind, a, r, p, rk, nn);
      double general = var_general(kind, a * p, p, a * p, r, 1.0, nn, rk * nn);
      CHECK(scaled == doctest::Approx(general).epsilon(1e-12));
      CHECK(scaled >= 0.0);

      double bias = bias_scaled(kind, a, r);
      double via_general = expect_general(kind, a * p, p, a * p, r) - r;
      CHECK(bias == doctest::Approx(via_general).epsilon(1e-10));
    }
  }
}

TEST_CASE("at a=1 both scaled variances coincide to machine precision") {
  for (double r : {0.05, 0.25, 0.5, 0.9}) {
    double v1 = var_scaled(RatioKind::drpr, 1.0, r, 0.01, 0.1, 5e5);
    double v2 = var_scaled(RatioKind::drpa, 1.0, r, 0.01, 0.1, 5e5);
    CHECK(v1 == doctest::Approx(v2).epsilon(1e-14));
  }
  // nN enters as a pure prefactor
  CHECK(var_scaled(RatioKind::drpa, 2.0, 0.25, 0.01, 0.1, 5e4) ==
        doctest::Approx(10.0 * var_scaled(RatioKind::drpa, 2.0, 0.25, 0.01, 0.1, 5e5))
            .epsilon(1e-14));
}

TEST_CASE("sign regions match the case tables") {
  CHECK(bias_sign_region(RatioKind::drpr, 2.0, 0.75) == BiasSign::positive);
  CHECK(bias_sign_region(RatioKind::drpr, 2.0, 0.25) == BiasSign::negative);
  CHECK(bias_sign_region(RatioKind::drpr, 0.5, 0.25) == BiasSign::positive);
  CHECK(bias_sign_region(RatioKind::drpr, 0.5, 0.75) == BiasSign::negative);
  CHECK(bias_sign_region(RatioKind::drpr, 1.0, 0.3) == BiasSign::zero);
  CHECK(bias_sign_region(RatioKind::drpr, 5.0, 0.5) == BiasSign::zero);

  CHECK(bias_sign_region(RatioKind::drpa, 2.0, 0.25) == BiasSign::negative);  // 1 < a < 3
  CHECK(bias_sign_region(RatioKind::drpa, 4.0, 0.25) == BiasSign::positive);  // a > (1-R)/R
  CHECK(bias_sign_region(RatioKind::drpa, 0.5, 0.6) == BiasSign::positive);   // a < (1-R)/R < 1
  CHECK(bias_sign_region(RatioKind::drpa, 0.9, 0.5) == BiasSign::positive);   // a < 1 = (1-R)/R
  CHECK(bias_sign_region(RatioKind::drpa, 0.9, 0.8) == BiasSign::negative);   // (1-R)/R < a < 1
  CHECK(bias_sign_region(RatioKind::drpa, 1.0, 0.77) == BiasSign::zero);
  CHECK(bias_sign_region(RatioKind::drpa, 3.0, 0.25) == BiasSign::zero);
}

TEST_CASE("sign region agrees with the bias sign everywhere") {
  Rng rng(41);
  for (int i = 0; i < 2000; ++i) {
    double a = std::exp(-4.0 + 8.0 * rng.uniform01());
    double r = 0.001 + 0.998 * rng.uniform01();
    for (RatioKind kind : {RatioKind::drpr, RatioKind::drpa}) {
      double b = bias_scaled(kind, a, r);
      BiasSign s = bias_sign_region(kind, a, r);
      if (std::fabs(b) > 1e-14)
        CHECK(s == (b > 0 ? BiasSign::positive : BiasSign::negative));
    }
  }
}

TEST_CASE("winner grid on the published panel settings") {
  GridFixed fixed;  // p=0.01, r_K=0.1, nN=5e5
  WinnerGrid bottom = winner_grid(fixed, grid_axes_narrow());
  CHECK(bottom.log_a_axis.size() == 81);
  CHECK(bottom.r_axis.size() == 100);

  // the log a = 0 line ties on every metric
  for (std::size_t ir = 0; ir < bottom.r_axis.size(); ++ir) {
    const GridCell& c = bottom.at(0, ir);
    CHECK(c.bias_winner == Winner::tie);
    CHECK(c.var_winner == Winner::tie);
    CHECK(c.rmse_winner == Winner::tie);
  }

  // strong assortativity with small prevalence: the mixed estimator wins rmse
  std::size_t ia2 = 40;  // log a = 2.0
  CHECK(bottom.log_a_axis[ia2] == doctest::Approx(2.0).epsilon(1e-12));
  std::size_t ir05 = 49;  // R = 0.05
  CHECK(bottom.r_axis[ir05] == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(bottom.at(ia2, ir05).rmse_winner == Winner::drpa);

  // high prevalence with assortativity: dRpR has the smaller bias magnitude
  WinnerGrid top = winner_grid(fixed, grid_axes_wide());
  std::size_t ia1 = 50;  // log a = 1.0
  CHECK(top.log_a_axis[ia1] == doctest::Approx(1.0).epsilon(1e-12));
  std::size_t ir75 = 37;  // R = 0.75
  CHECK(top.r_axis[ir75] == doctest::Approx(0.75).epsilon(1e-9));
  CHECK(top.at(ia1, ir75).bias_winner == Winner::drpr);

  // rmse is assembled from the cell's own bias and variance
  for (std::size_t ia = 0; ia < top.log_a_axis.size(); ia += 8)
    for (std::size_t ir = 0; ir < top.r_axis.size(); ir += 7) {
      const GridCell& c = top.at(ia, ir);
      if (!c.valid) continue;
      CHECK(c.rmse_drpr == std::sqrt(c.bias_drpr * c.bias_drpr + c.var_drpr));
      CHECK(c.rmse_drpa == std::sqrt(c.bias_drpa * c.bias_drpa + c.var_drpa));
    }
}

TEST_CASE("cells beyond a*p = 1 are labeled invalid but kept") {
  GridFixed fixed{0.1, 0.1, 5e5};  // e^4 * 0.1 > 1 -> invalid tail
  WinnerGrid g = winner_grid(fixed, grid_axes_wide());
  CHECK(g.cells.size() == g.log_a_axis.size() * g.r_axis.size());
  const GridCell& last = g.at(g.log_a_axis.size() - 1, 10);
  CHECK_FALSE(last.valid);
  CHECK(last.rmse_winner == Winner::invalid);
  CHECK(std::isnan(last.rmse_drpr));
  bool any_valid = false;
  for (const GridCell& c : g.cells) any_valid = any_valid || c.valid;
  CHECK(any_valid);
}

TEST_CASE("grid sweep covers the requested fixed sets") {
  std::vector<GridFixed> sets{{0.01, 0.1, 5e4}, {0.01, 0.1, 5e5}};
  auto grids = grid_sweep(sets, grid_axes_wide());
  REQUIRE(grids.size() == 2);
  // the mixed estimator's rmse region grows with nN
  CHECK(grids[0].count_winner(Winner::drpa, 2) <= grids[1].count_winner(Winner::drpa, 2));
}

TEST_CASE("s1 prevalence variances") {
  std::vector<double> d{10, 20};
  auto [vr, va] = s1_prevalence_variances(d, 0.2);
  CHECK(vr == doctest::Approx(0.16 / 30.0).epsilon(1e-14));
  CHECK(va == doctest::Approx(0.006).epsilon(1e-14));

  std::vector<double> constant{15, 15, 15};
  auto [cr, ca] = s1_prevalence_variances(constant, 0.3);
  CHECK(cr == doctest::Approx(ca).epsilon(1e-14));

  std::vector<double> bad{10, 0};
  CHECK_THROWS_AS(s1_prevalence_variances(bad, 0.2), std::invalid_argument);

  Rng rng(51);
  for (int i = 0; i < 1000; ++i) {
    std::size_t n = 2 + rng.below(30);
    std::vector<double> degrees(n);
    for (auto& x : degrees) x = 1.0 + rng.below(500);
    bool constant_vec = true;
    for (double x : degrees) constant_vec = constant_vec && x == degrees[0];
    if (constant_vec) degrees.back() += 1.0;
    auto [lo, hi] = s1_prevalence_variances(degrees, 0.01 + 0.98 * rng.uniform01());
    CHECK(lo < hi);
  }
}

TEST_CASE("s1 degree variances") {
  std::vector<std::uint32_t> sizes{100, 50};
  auto [vr, va] = s1_degree_variances(10.0, 1000.0, sizes);
  CHECK(vr == doctest::Approx(61.1111111111).epsilon(1e-10));
  CHECK(va == doctest::Approx(70.0).epsilon(1e-12));

  std::vector<std::uint32_t> equal{80, 80, 80};
  auto [er, ea] = s1_degree_variances(10.0, 1000.0, equal);
  CHECK(er == doctest::Approx(ea).epsilon(1e-13));

  std::vector<std::uint32_t> too_big{600, 500};
  CHECK_THROWS_AS(s1_degree_variances(10.0, 1000.0, too_big), std::invalid_argument);

  Rng rng(52);
  for (int i = 0; i < 1000; ++i) {
    std::size_t k = 2 + rng.below(14);
    std::vector<std::uint32_t> nj(k);
    for (auto& x : nj) x = 10 + static_cast<std::uint32_t>(rng.below(400));
    bool constant_vec = true;
    for (auto x : nj) constant_vec = constant_vec && x == nj[0];
    if (constant_vec) nj.back() += 1;
    double total = 0;
    for (auto x : nj) total += x;
    auto [lo, hi] = s1_degree_variances(1.0 + rng.below(60), total * 10.0, nj);
    CHECK(lo < hi);
  }
}
