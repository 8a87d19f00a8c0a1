#pragma once
// Central configurations of the n+1 filament problem: n unit-circulation
// points a_1..a_n around a center filament of circulation -kappa at the
// origin, satisfying
//   balance:  sum_i a_i/|a_i|^2 = 0
//   force:    a_j + sum_{i!=j} (a_j - a_i)/|a_j - a_i|^2 - kappa a_j/|a_j|^2 = 0
// Regular polygons solve this in closed form with radius
// r = sqrt(kappa - (n-1)/2); general configurations (nested polygons) are
// found by a damped Gauss-Newton iteration with the rotational phase fixed
// by Im a_1 = 0, Re a_1 > 0.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "vfil/errors.hpp"
#include "vfil/grid.hpp"

namespace vfil {

struct CentralConfig {
  int n = 0;
  double kappa = 0.0;
  std::vector<cplx> points;  // a_1..a_n; a_0 = 0 implicit

  /// Circulation of filament index 0..n (0 is the center).
  double circulation(int idx) const { return idx == 0 ? -kappa : 1.0; }
};

namespace detail {

inline void check_points(const std::vector<cplx>& pts) {
  for (size_t i = 0; i < pts.size(); ++i) {
    if (std::abs(pts[i]) < 1e-14)
      throw DegenerateError("central configuration: point " + std::to_string(i + 1) +
                            " coincides with the center");
    for (size_t j = i + 1; j < pts.size(); ++j)
      if (std::abs(pts[i] - pts[j]) < 1e-14)
        throw DegenerateError("central configuration: points " + std::to_string(i + 1) +
                              " and " + std::to_string(j + 1) + " coincide");
  }
}

/// Stacked residual [force_1 .. force_n, balance] as complex values.
inline std::vector<cplx> cc_equations(const std::vector<cplx>& pts, double kappa) {
  const size_t n = pts.size();
  std::vector<cplx> eq(n + 1, cplx(0.0));
  cplx balance = 0.0;
  for (size_t j = 0; j < n; ++j) {
    cplx f = pts[j] - kappa * pts[j] / std::norm(pts[j]);
    for (size_t i = 0; i < n; ++i) {
      if (i == j) continue;
      const cplx d = pts[j] - pts[i];
      f += d / std::norm(d);
    }
    eq[j] = f;
    balance += pts[j] / std::norm(pts[j]);
  }
  eq[n] = balance;
  return eq;
}

}  // namespace detail

/// Max modulus over the n force equations and the balance equation.
inline double cc_residual(const CentralConfig& c) {
  detail::check_points(c.points);
  double r = 0.0;
  for (const cplx& e : detail::cc_equations(c.points, c.kappa)) r = std::max(r, std::abs(e));
  return r;
}

/// The regular polygon solution, radius r = sqrt(kappa - (n-1)/2).
inline CentralConfig polygon_config(int n, double kappa) {
  if (n < 2) throw ConfigError("polygon_config: need n >= 2");
  if (kappa <= 0) throw ConfigError("polygon_config: need kappa > 0");
  const double r2 = kappa - 0.5 * (n - 1);
  if (r2 <= 0.0)
    throw InfeasibleError("polygon_config: kappa = " + std::to_string(kappa) +
                          " <= (n-1)/2 = " + std::to_string(0.5 * (n - 1)) +
                          ", polygon radius undefined");
  CentralConfig c;
  c.n = n;
  c.kappa = kappa;
  const double r = std::sqrt(r2);
  const double zeta = two_pi / n;
  for (int j = 0; j < n; ++j)
    c.points.push_back(r * std::exp(cplx(0.0, zeta * j)));
  return c;
}

/// Z_m-symmetric seed: ring m contributes points r_m e^{i(j*2pi/n + phi_m)}.
inline std::vector<cplx> nested_polygon_seed(int n_per_ring,
                                             const std::vector<double>& rings,
                                             const std::vector<double>& offsets) {
  if (n_per_ring < 2) throw ConfigError("nested_polygon_seed: need n_per_ring >= 2");
  if (rings.size() != offsets.size())
    throw ConfigError("nested_polygon_seed: rings and offsets must have equal length");
  for (size_t a = 0; a < rings.size(); ++a) {
    if (rings[a] <= 0) throw ConfigError("nested_polygon_seed: radii must be positive");
    for (size_t b = a + 1; b < rings.size(); ++b)
      if (rings[a] == rings[b]) throw ConfigError("nested_polygon_seed: radii must be distinct");
  }
  std::vector<cplx> pts;
  const double zeta = two_pi / n_per_ring;
  for (size_t m = 0; m < rings.size(); ++m)
    for (int j = 0; j < n_per_ring; ++j)
      pts.push_back(rings[m] * std::exp(cplx(0.0, j * zeta + offsets[m])));
  return pts;
}

namespace detail {

/// Real-linear 2x2 block of the derivative of z -> z/|z|^2 = 1/conj(z):
/// d(1/conj(z))[w] = -conj(w)/conj(z)^2.
inline Eigen::Matrix2d dh_block(cplx z) {
  const cplx inv2 = 1.0 / (std::conj(z) * std::conj(z));
  const double al = inv2.real(), be = inv2.imag();
  Eigen::Matrix2d B;
  // -(al + i be)(p - i q) = (-al p - be q) + i (-be p + al q)
  B << -al, -be, -be, al;
  return B;
}

/// Jacobian of [force_1..force_n, balance] w.r.t. the 2n real unknowns,
/// real rows (Re, Im per equation), no phase constraint.
inline Eigen::MatrixXd cc_jacobian(const std::vector<cplx>& pts, double kappa) {
  const int n = static_cast<int>(pts.size());
  Eigen::MatrixXd Jm = Eigen::MatrixXd::Zero(2 * n + 2, 2 * n);
  auto add_block = [&](int row_eq, int col_pt, const Eigen::Matrix2d& B) {
    Jm.block<2, 2>(2 * row_eq, 2 * col_pt) += B;
  };
  for (int j = 0; j < n; ++j) {
    add_block(j, j, Eigen::Matrix2d::Identity());
    add_block(j, j, -kappa * dh_block(pts[j]));
    for (int i = 0; i < n; ++i) {
      if (i == j) continue;
      const Eigen::Matrix2d B = dh_block(pts[j] - pts[i]);
      add_block(j, j, B);
      add_block(j, i, -B);
    }
  }
  for (int i = 0; i < n; ++i) Jm.block<2, 2>(2 * n, 2 * i) += dh_block(pts[i]);
  return Jm;
}

inline Eigen::VectorXd cc_rhs(const std::vector<cplx>& pts, double kappa) {
  const auto eq = cc_equations(pts, kappa);
  Eigen::VectorXd r(2 * eq.size());
  for (size_t i = 0; i < eq.size(); ++i) {
    r(2 * i) = eq[i].real();
    r(2 * i + 1) = eq[i].imag();
  }
  return r;
}

}  // namespace detail

struct SolveInfo {
  int iterations = 0;
  std::vector<double> residual_history;
};

/// Damped Gauss-Newton solve of the central-configuration equations from the
/// given seed, with the phase constraint Im a_1 = 0 appended. The converged
/// configuration is rotated so that Im a_1 = 0, Re a_1 > 0 exactly.
inline CentralConfig solve_cc(std::vector<cplx> pts, double kappa, double tol = 1e-11,
                              int max_iter = 50, SolveInfo* info = nullptr) {
  if (pts.size() < 2) throw ConfigError("solve_cc: need at least two points");
  if (kappa <= 0) throw ConfigError("solve_cc: need kappa > 0");
  detail::check_points(pts);
  const int n = static_cast<int>(pts.size());

  auto resnorm = [&](const std::vector<cplx>& p) {
    double r = 0.0;
    for (const cplx& e : detail::cc_equations(p, kappa)) r = std::max(r, std::abs(e));
    return r;
  };

  std::vector<double> history;
  double res = resnorm(pts);
  history.push_back(res);
  int iter = 0;
  while (res > tol && iter < max_iter) {
    Eigen::MatrixXd Jfull(2 * n + 3, 2 * n);
    Eigen::VectorXd rhs(2 * n + 3);
    Jfull.topRows(2 * n + 2) = detail::cc_jacobian(pts, kappa);
    rhs.head(2 * n + 2) = detail::cc_rhs(pts, kappa);
    Jfull.row(2 * n + 2).setZero();
    Jfull(2 * n + 2, 1) = 1.0;  // Im a_1
    rhs(2 * n + 2) = pts[0].imag();

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Jfull);
    if (qr.rank() < 2 * n)
      throw DegenerateError("solve_cc: Jacobian singular beyond the rotational mode");
    const Eigen::VectorXd step = qr.solve(-rhs);

    double alpha = 1.0;
    bool accepted = false;
    for (int h = 0; h < 8; ++h) {
      std::vector<cplx> trial = pts;
      for (int i = 0; i < n; ++i)
        trial[i] += alpha * cplx(step(2 * i), step(2 * i + 1));
      bool ok = true;
      for (const cplx& p : trial)
        if (std::abs(p) < 1e-14) ok = false;
      const double rt = ok ? resnorm(trial) : std::numeric_limits<double>::infinity();
      if (rt < res) {
        pts = trial;
        res = rt;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    ++iter;
    history.push_back(res);
    if (!accepted) break;
  }
  if (res > tol)
    throw DivergenceError("solve_cc: no convergence after " + std::to_string(iter) +
                              " iterations (residual " + std::to_string(res) + ")",
                          history);

  // exact phase alignment
  cplx phase = std::conj(pts[0]) / std::abs(pts[0]);
  for (cplx& p : pts) p *= phase;
  pts[0] = cplx(pts[0].real(), 0.0);

  if (info) {
    info->iterations = iter;
    info->residual_history = history;
  }
  CentralConfig c;
  c.n = n;
  c.kappa = kappa;
  c.points = std::move(pts);
  return c;
}

/// Jacobian of the unconstrained residual, exposed for spectrum checks
/// (one near-zero singular value: the rotation mode).
inline Eigen::MatrixXd cc_jacobian(const CentralConfig& c) {
  return detail::cc_jacobian(c.points, c.kappa);
}

inline nlohmann::json to_json(const CentralConfig& c) {
  nlohmann::json pts = nlohmann::json::array();
  for (const cplx& p : c.points) pts.push_back({p.real(), p.imag()});
  return {{"n", c.n}, {"kappa", c.kappa}, {"points", pts}};
}

inline CentralConfig config_from_json(const nlohmann::json& j) {
  CentralConfig c;
  c.n = j.at("n").get<int>();
  c.kappa = j.at("kappa").get<double>();
  for (const auto& p : j.at("points")) c.points.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  if (static_cast<int>(c.points.size()) != c.n)
    throw ConfigError("central configuration JSON: n does not match points");
  return c;
}

}  // namespace vfil
