#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "doctest.h"
#include "oracles.hpp"
#include "vfil/central_config.hpp"

using namespace vfil;

namespace {

// Independent residual evaluation by direct summation.
double direct_residual(const std::vector<cplx>& pts, double kappa) {
  const size_t n = pts.size();
  double worst = 0.0;
  cplx bal = 0.0;
  for (size_t j = 0; j < n; ++j) {
    cplx f = pts[j] - kappa * pts[j] / (std::abs(pts[j]) * std::abs(pts[j]));
    for (size_t i = 0; i < n; ++i)
      if (i != j) {
        const cplx d = pts[j] - pts[i];
        f += d / (std::abs(d) * std::abs(d));
      }
    worst = std::max(worst, std::abs(f));
    bal += pts[j] / (std::abs(pts[j]) * std::abs(pts[j]));
  }
  return std::max(worst, std::abs(bal));
}

}  // namespace

TEST_CASE("polygon_config: closed form radius and tiny residual") {
  CentralConfig c = polygon_config(3, 2.0);
  CHECK(std::abs(c.points[0] - cplx(1.0, 0.0)) < 1e-15);
  for (int j = 0; j < 3; ++j)
    CHECK(std::abs(c.points[j] - std::exp(cplx(0, two_pi * j / 3))) < 1e-14);
  CHECK(cc_residual(c) <= 1e-13);

  CentralConfig c2 = polygon_config(2, 1.0);
  CHECK(std::abs(c2.points[0]) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK(cc_residual(c2) <= 1e-13);
}

TEST_CASE("polygon_config: infeasible kappa rejected") {
  CHECK_THROWS_AS(polygon_config(3, 1.0), InfeasibleError);
  CHECK_THROWS_AS(polygon_config(5, 2.0), InfeasibleError);
  CHECK_THROWS_AS(polygon_config(1, 2.0), ConfigError);
  CHECK_THROWS_AS(polygon_config(3, -1.0), ConfigError);
}

TEST_CASE("polygon radius matches the closed form across (n, kappa)") {
  for (int n = 2; n <= 12; ++n)
    for (double kappa = 0.5 * (n - 1) + 0.1; kappa <= 10.0; kappa += 0.5) {
      CentralConfig c = polygon_config(n, kappa);
      const double r = std::sqrt(kappa - 0.5 * (n - 1));
      for (const cplx& p : c.points) CHECK(std::abs(std::abs(p) - r) < 1e-14);
      CHECK(cc_residual(c) <= 1e-13);
      CHECK(direct_residual(c.points, kappa) <= 1e-13);
    }
}

TEST_CASE("cc_residual: scaling breaks the balance, rotation does not") {
  CentralConfig c = polygon_config(3, 2.0);

  CentralConfig scaled = c;
  for (cplx& p : scaled.points) p *= 1.1;
  CHECK(cc_residual(scaled) > 0.1);
  // force term for the scaled polygon is a_j (1.1 - 1/1.1)
  CHECK(cc_residual(scaled) == doctest::Approx(1.1 - 1.0 / 1.1).epsilon(1e-12));

  std::mt19937 rng(5);
  std::uniform_real_distribution<double> ang(0.0, two_pi);
  for (int trial = 0; trial < 10; ++trial) {
    CentralConfig rot = c;
    const cplx ph = std::exp(cplx(0.0, ang(rng)));
    for (cplx& p : rot.points) p *= ph;
    CHECK(std::abs(cc_residual(rot) - cc_residual(c)) < 1e-13);
  }
}

TEST_CASE("cc_residual: coincident points rejected") {
  CentralConfig c = polygon_config(3, 2.0);
  c.points[1] = c.points[0];
  CHECK_THROWS_AS(cc_residual(c), DegenerateError);
  c.points[1] = cplx(0.0, 0.0);
  CHECK_THROWS_AS(cc_residual(c), DegenerateError);
}

TEST_CASE("cc Jacobian matches finite differences") {
  std::vector<cplx> pts = nested_polygon_seed(3, {0.8, 1.6}, {0.1, 0.7});
  const double kappa = 4.0;
  const Eigen::MatrixXd J = detail::cc_jacobian(pts, kappa);
  const double h = 1e-6;
  for (int col = 0; col < 2 * static_cast<int>(pts.size()); ++col) {
    auto shift = [&](double eps) {
      std::vector<cplx> p = pts;
      p[col / 2] += (col % 2 == 0) ? cplx(eps, 0) : cplx(0, eps);
      return detail::cc_rhs(p, kappa);
    };
    const Eigen::VectorXd fd = (shift(h) - shift(-h)) / (2 * h);
    const Eigen::VectorXd an = J.col(col);
    CHECK((fd - an).norm() <= 1e-6 * std::max(1.0, an.norm()));
  }
}

TEST_CASE("solve_cc: reconverges from a perturbed polygon") {
  CentralConfig poly = polygon_config(3, 2.0);
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> d(-1e-3, 1e-3);
  std::vector<cplx> init = poly.points;
  for (cplx& p : init) p += cplx(d(rng), d(rng));

  SolveInfo info;
  CentralConfig sol = solve_cc(init, 2.0, 1e-12, 50, &info);
  CHECK(cc_residual(sol) <= 1e-12);
  CHECK(info.iterations <= 8);
  // after phase alignment the solution is the polygon again
  for (int j = 0; j < 3; ++j)
    CHECK(std::abs(sol.points[j] - poly.points[j]) < 1e-9);
}

TEST_CASE("solve_cc: exact polygon needs zero iterations") {
  CentralConfig poly = polygon_config(4, 3.0);
  SolveInfo info;
  CentralConfig sol = solve_cc(poly.points, 3.0, 1e-11, 50, &info);
  CHECK(info.iterations == 0);
  CHECK(cc_residual(sol) <= 1e-13);
}

TEST_CASE("solve_cc: idempotence at a converged point") {
  std::vector<cplx> seed = nested_polygon_seed(3, {0.7, 1.5}, {0.0, two_pi / 12});
  CentralConfig first = solve_cc(seed, 4.0, 1e-12);
  SolveInfo info;
  CentralConfig second = solve_cc(first.points, 4.0, 1e-12, 50, &info);
  CHECK(info.iterations <= 1);
  for (size_t j = 0; j < first.points.size(); ++j)
    CHECK(std::abs(first.points[j] - second.points[j]) < 1e-11);
}

TEST_CASE("nested_polygon_seed layouts") {
  const auto single = nested_polygon_seed(5, {2.0}, {0.0});
  REQUIRE(single.size() == 5);
  for (int j = 0; j < 5; ++j)
    CHECK(std::abs(single[j] - 2.0 * std::exp(cplx(0, two_pi * j / 5))) < 1e-14);

  const auto twin = nested_polygon_seed(4, {1.0, 2.0}, {0.0, two_pi / 8});
  REQUIRE(twin.size() == 8);
  for (int j = 0; j < 4; ++j) {
    CHECK(std::abs(twin[j]) == doctest::Approx(1.0));
    CHECK(std::abs(twin[4 + j]) == doctest::Approx(2.0));
  }
  CHECK(std::arg(twin[4]) == doctest::Approx(two_pi / 8));

  CHECK_THROWS_AS(nested_polygon_seed(1, {1.0}, {0.0}), ConfigError);
  CHECK_THROWS_AS(nested_polygon_seed(3, {1.0, 1.0}, {0.0, 0.1}), ConfigError);
  CHECK_THROWS_AS(nested_polygon_seed(3, {1.0, -2.0}, {0.0, 0.1}), ConfigError);
}

TEST_CASE("solve_cc: two-ring seed converges to a central configuration") {
  // Two staggered triangles relax onto the equal-radius configuration (the
  // regular hexagon read as two interleaved rings); with unit outer
  // circulations no unequal-radius two-ring equilibrium exists.
  std::vector<cplx> seed = nested_polygon_seed(3, {0.7, 1.5}, {0.0, two_pi / 12});
  CentralConfig sol = solve_cc(seed, 4.0, 1e-12);
  CHECK(cc_residual(sol) <= 1e-12);
  CHECK(direct_residual(sol.points, 4.0) <= 1e-12);
  std::vector<double> radii;
  for (const cplx& p : sol.points) radii.push_back(std::abs(p));
  std::sort(radii.begin(), radii.end());
  CHECK(radii.front() > 0.1);
  for (double r : radii) CHECK(r == doctest::Approx(std::sqrt(1.5)).epsilon(1e-10));

  // up to rotation it is polygon_config(6, 4)
  CentralConfig hexagon = polygon_config(6, 4.0);
  std::vector<double> angles;
  for (const cplx& p : sol.points) angles.push_back(std::arg(p));
  std::sort(angles.begin(), angles.end());
  for (size_t i = 1; i < angles.size(); ++i)
    CHECK(angles[i] - angles[i - 1] == doctest::Approx(two_pi / 6).epsilon(1e-9));
  CHECK(cc_residual(hexagon) <= 1e-13);
}

TEST_CASE("cc Jacobian at a solution has exactly one near-zero singular value") {
  for (auto [seed, kappa] : {std::pair{nested_polygon_seed(3, {0.7, 1.5}, {0.0, two_pi / 12}), 4.0},
                             std::pair{polygon_config(5, 4.0).points, 4.0}}) {
    CentralConfig sol = solve_cc(seed, kappa, 1e-12);
    Eigen::MatrixXd J = cc_jacobian(sol);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
    const auto& sv = svd.singularValues();
    const int m = static_cast<int>(sv.size());
    CHECK(sv(m - 1) < 1e-10);       // rotation mode
    CHECK(sv(m - 2) > 1e-3);        // and nothing else
  }
}

TEST_CASE("solve_cc: divergence carries the residual history") {
  std::vector<cplx> far = {cplx(10.0, 0.0), cplx(-10.0, 0.1), cplx(0.1, 9.0)};
  try {
    solve_cc(far, 2.0, 1e-14, 1);
    FAIL("expected DivergenceError");
  } catch (const DivergenceError& e) {
    CHECK(e.residual_history.size() >= 2);
    CHECK(e.residual_history.front() > 1.0);
  }
}

TEST_CASE("central configuration JSON round-trip") {
  CentralConfig c = polygon_config(4, 3.5);
  const auto j = to_json(c);
  CentralConfig back = config_from_json(j);
  CHECK(back.n == c.n);
  CHECK(back.kappa == c.kappa);
  for (int i = 0; i < c.n; ++i) CHECK(back.points[i] == c.points[i]);
}
