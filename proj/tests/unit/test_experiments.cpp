#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "polybddc/experiments.hpp"

using namespace polybddc;

TEST(LinearFit, ExactLine) {
  const std::vector<double> x{1, 2, 3, 5};
  const std::vector<double> y{1.5, 3.5, 5.5, 9.5};
  const LinearFit fit = linear_fit(x, y);
  EXPECT_NEAR(fit.slope, 2.0, 1e-14);
  EXPECT_NEAR(fit.intercept, -0.5, 1e-14);
  EXPECT_NEAR(fit.r2, 1.0, 1e-14);
}

TEST(LinearFit, MatchesNormalEquations) {
  std::mt19937 gen(4);
  std::normal_distribution<double> nd;
  std::vector<double> x(20);
  std::vector<double> y(20);
  Eigen::MatrixXd a(20, 2);
  Eigen::VectorXd b(20);
  for (int i = 0; i < 20; ++i) {
    x[static_cast<std::size_t>(i)] = i * 0.3;
    y[static_cast<std::size_t>(i)] = 1.0 - 0.7 * i * 0.3 + 0.2 * nd(gen);
    a(i, 0) = 1.0;
    a(i, 1) = x[static_cast<std::size_t>(i)];
    b(i) = y[static_cast<std::size_t>(i)];
  }
  const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(b);
  const double ss_res = (a * coef - b).squaredNorm();
  const double ss_tot = (b.array() - b.mean()).matrix().squaredNorm();
  const LinearFit fit = linear_fit(x, y);
  EXPECT_NEAR(fit.intercept, coef(0), 1e-12);
  EXPECT_NEAR(fit.slope, coef(1), 1e-12);
  EXPECT_NEAR(fit.r2, 1.0 - ss_res / ss_tot, 1e-12);
}

TEST(LinearFit, RejectsDegenerateInput) {
  const std::vector<double> one{1.0};
  EXPECT_THROW(linear_fit(one, one), std::invalid_argument);
  const std::vector<double> same{2.0, 2.0};
  const std::vector<double> y{1.0, 3.0};
  EXPECT_THROW(linear_fit(same, y), std::invalid_argument);
}

TEST(Gamma, NamesRoundTrip) {
  EXPECT_EQ(gamma_from_string("top"), kTop);
  EXPECT_EQ(gamma_from_string("top_right"), kTop | kRight);
  EXPECT_EQ(gamma_from_string("all"), kAllSides);
  EXPECT_EQ(gamma_from_string("bottom+left"), kBottom | kLeft);
  for (const char* name : {"top", "top_right", "all"}) EXPECT_EQ(gamma_name(gamma_from_string(name)), name);
  EXPECT_THROW(gamma_from_string("middle"), std::invalid_argument);
  EXPECT_THROW(gamma_from_string(""), std::invalid_argument);
}

TEST(Truncation, WholeBoundaryGivesUnitEigenvalue) {
  for (int k : {0, 1}) {
    for (int n : {4, 8}) {
      const PolytopalMesh m = build_cartesian(n, n);
      const HybridSpace s(m, k, k);
      EXPECT_NEAR(truncation_lambda_max(s, boundary_region(m, kAllSides)), 1.0, 1e-8) << k << " " << n;
    }
  }
}

TEST(Truncation, GrowsAsTheMeshIsRefined) {
  const StudyResult r = truncation_study({4, 8, 16}, {0, 1}, kTop);
  ASSERT_EQ(r.rows.size(), 6u);
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const StudyRow& row = r.rows[i];
    EXPECT_EQ(*row.k, static_cast<int>(i / 3));
    EXPECT_EQ(row.gamma, "top");
    EXPECT_GT(*row.lambda_max, 1.0);
    if (i % 3 != 0) EXPECT_GT(*row.lambda_max, *r.rows[i - 1].lambda_max);
  }
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i = 0; i < 3; ++i) {
    x.push_back(std::log(1.0 / *r.rows[i].h));
    y.push_back(*r.rows[i].lambda_max);
  }
  const LinearFit fit = linear_fit(x, y);
  EXPECT_NEAR(*r.rows[0].fit_slope, fit.slope, 1e-12);
  EXPECT_NEAR(*r.rows[2].fit_r2, fit.r2, 1e-12);
}

TEST(Scaling, RowsAreCompleteAndOrdered) {
  ScalingOptions opt;
  opt.method = Method::hdg;
  opt.family = MeshFamily::cartesian;
  opt.h_ratios = {2, 4};
  opt.np_sides = {2, 3};
  opt.degrees = {0, 1};
  const StudyResult r = scaling_study(opt);
  ASSERT_EQ(r.rows.size(), 8u);
  std::size_t i = 0;
  for (int k : opt.degrees) {
    for (int ratio : opt.h_ratios) {
      for (int side : opt.np_sides) {
        const StudyRow& row = r.rows[i++];
        EXPECT_EQ(row.family, "cartesian");
        EXPECT_EQ(row.method, "hdg");
        EXPECT_EQ(*row.k, k);
        EXPECT_EQ(*row.h_ratio, ratio);
        EXPECT_EQ(*row.np, side * side);
        EXPECT_DOUBLE_EQ(*row.h, 1.0 / (ratio * side));
        EXPECT_TRUE(*row.converged);
        EXPECT_GE(*row.kappa, 1.0);
        EXPECT_GT(*row.iterations, 0);
        EXPECT_TRUE(row.error_l2.has_value());
      }
    }
  }
}

TEST(Scaling, IterativeSolveMatchesDirectSolve) {
  const PolytopalMesh m = voronoi_polygonal(12, 12);
  const MethodConfig cfg(Method::hho, 1);
  const PoissonSolve iterative =
      solve_poisson(m, cfg, agglomerate(m, 3, 3), FgmresOptions{.tolerance = 1e-12, .max_iterations = 500});
  ASSERT_TRUE(iterative.converged);
  const SkeletalDiscretization disc(m, cfg);
  const CondensedSystem sys = disc.assemble(manufactured_source);
  const HybridVector uh = disc.recover(solve_direct(sys), manufactured_source);
  const double direct = l2_error(uh, manufactured_solution);
  EXPECT_NEAR(iterative.error_l2, direct, 1e-8 * direct);
  EXPECT_EQ(iterative.cell_means.size(), static_cast<std::size_t>(m.num_cells()));
}

TEST(Scaling, CsvIsIndependentOfThreadCount) {
  ScalingOptions opt;
  opt.family = MeshFamily::voronoi;
  opt.h_ratios = {3};
  opt.np_sides = {2, 3};
  opt.degrees = {1};
  std::string out[2];
  const char* saved = std::getenv("POLYBDDC_THREADS");
  const std::string keep = saved ? saved : "";
  int i = 0;
  for (const char* threads : {"1", "4"}) {
    setenv("POLYBDDC_THREADS", threads, 1);
    std::ostringstream s;
    write_csv(s, scaling_study(opt).rows);
    out[i++] = s.str();
  }
  if (saved) {
    setenv("POLYBDDC_THREADS", keep.c_str(), 1);
  } else {
    unsetenv("POLYBDDC_THREADS");
  }
  EXPECT_EQ(out[0], out[1]);
  EXPECT_EQ(out[0].substr(0, out[0].find('\n')), kCsvHeader);
}

TEST(Convergence, RatesAreLogRatiosOfErrors) {
  const StudyResult r = convergence_study(Method::hdg_plus, MeshFamily::cartesian, 1, {4, 8, 16});
  ASSERT_EQ(r.rows.size(), 3u);
  EXPECT_FALSE(r.rows[0].rate_l2.has_value());
  for (std::size_t i = 1; i < 3; ++i) {
    const double expected = std::log2(*r.rows[i - 1].error_l2 / *r.rows[i].error_l2);
    EXPECT_NEAR(*r.rows[i].rate_l2, expected, 1e-12);
    EXPECT_GT(*r.rows[i].rate_l2, 1.5);
    EXPECT_GT(*r.rows[i].rate_energy, 0.8);
  }
}
