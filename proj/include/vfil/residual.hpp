#pragma once
// Nonlinear residual of the standing-wave equation in the symmetric basis:
//   F(v, omega) = restrict( L(omega) embed(v) + g(embed(v), omega) ).
//
// With the complex variable zeta = x - i y (the conjugate of z = x + i y),
//   g_c(z; omega) = -omega zeta^2 / (1 + zeta),
// analytic for |z| < 1 and O(|z|^2) at the origin; the residual returns
// (Re g_c, Im g_c). The directional derivative is the conjugate-linear
// pointwise multiplication
//   Dg(z)[dz] = A(z) conj(dz),   A = -omega zeta (2 + zeta) / (1 + zeta)^2.
// Both are evaluated on a padded collocation grid and truncated back, so the
// dense assembly below is the exact matrix of the same discrete operator:
// pointwise multiplication on the padded grid is a convolution with the
// padded-grid DFT of A, and basis directions touch at most four coefficient
// sites each.

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "vfil/spectrum.hpp"
#include "vfil/symmetric_field.hpp"

namespace vfil {

struct ResidualWorkspace {
  Grid2D grid;
  int q = 1;
  int padding = 4;          // dealiasing factor (alias-free for degree <= padding)
  double delta_dom = 0.05;  // analyticity margin: require max |u| < 1 - delta_dom
  double tau_sym = 1e-10;   // symmetry-defect assertion on restricted residuals

  void validate() const {
    grid.validate();
    if (q == 0) throw ConfigError("ResidualWorkspace: q must be nonzero");
    if (padding < 2) throw ConfigError("ResidualWorkspace: padding must be >= 2");
  }
};

namespace detail {

/// Padded-grid complex samples of z = x + i y, with the domain check.
inline std::vector<cplx> padded_values_checked(const SpectralField& f, int pad,
                                               double delta_dom, int& n0, int& n1) {
  const auto [p0, p1] = pad_sizes(f.grid, pad);
  n0 = p0;
  n1 = p1;
  auto z = grid_values_z(f, n0, n1);
  double worst = 0.0;
  for (const cplx& v : z) worst = std::max(worst, std::abs(v));
  if (worst >= 1.0 - delta_dom)
    throw DomainError("field leaves the analyticity disk: max |u| = " + std::to_string(worst) +
                      " >= " + std::to_string(1.0 - delta_dom));
  return z;
}

inline cplx g_point(cplx z, double omega) {
  const cplx zeta = std::conj(z);
  return -omega * zeta * zeta / (1.0 + zeta);
}

/// d g / d zeta, applied to conj(dz).
inline cplx dg_weight(cplx z, double omega) {
  const cplx zeta = std::conj(z);
  const cplx onep = 1.0 + zeta;
  return -omega * zeta * (2.0 + zeta) / (onep * onep);
}

}  // namespace detail

/// The nonlinearity g(u) evaluated on the padded grid and truncated back.
inline SpectralField eval_g(const SpectralField& u, double omega, int pad = 4,
                            double delta_dom = 0.05) {
  int n0 = 0, n1 = 0;
  auto z = detail::padded_values_checked(u, pad, delta_dom, n0, n1);
  for (cplx& v : z) v = detail::g_point(v, omega);
  return detail::coeffs_from_z(z, n0, n1, u.grid);
}

/// L(omega) embed(v) + g(embed(v)) in the full truncated space (no restriction).
inline SpectralField residual_full(const SymmetricField& v, double omega,
                                   const ResidualWorkspace& ws) {
  ws.validate();
  if (!(v.grid == ws.grid)) throw ConfigError("residual: field/workspace grid mismatch");
  const SpectralField u = embed(v);
  const OperatorParams p{ws.q, omega};
  return apply_operator(u, p) + eval_g(u, omega, ws.padding, ws.delta_dom);
}

/// Symmetric-basis residual. The unrestricted residual must lie in the
/// symmetric subspace (equivariance); its defect is asserted below tau_sym
/// relative to the input scale (the residual itself vanishes at solutions,
/// so a defect relative to the output would amplify rounding noise).
inline SymmetricField residual(const SymmetricField& v, double omega,
                               const ResidualWorkspace& ws) {
  const SpectralField r = residual_full(v, omega, ws);
  const double scale = std::max(1.0, sobolev_norm(v, 0.0));
  const double defect = sobolev_norm(r - embed(project_symmetric(r)), 0.0);
  if (defect > ws.tau_sym * scale)
    throw SymmetryError("residual: equivariance defect " + std::to_string(defect), defect);
  return project_symmetric(r);
}

/// Directional derivative L(omega) dv + Dg(v)[dv], matrix-free.
inline SymmetricField jacobian_apply(const SymmetricField& v, double omega,
                                     const SymmetricField& dv, const ResidualWorkspace& ws) {
  ws.validate();
  if (!(v.grid == ws.grid) || !(dv.grid == ws.grid))
    throw ConfigError("jacobian_apply: field/workspace grid mismatch");
  int n0 = 0, n1 = 0;
  auto zv = detail::padded_values_checked(embed(v), ws.padding, ws.delta_dom, n0, n1);
  const auto zd = detail::grid_values_z(embed(dv), n0, n1);
  for (size_t i = 0; i < zv.size(); ++i)
    zv[i] = detail::dg_weight(zv[i], omega) * std::conj(zd[i]);
  const SpectralField dg = detail::coeffs_from_z(zv, n0, n1, ws.grid);
  const SpectralField lin = apply_operator(embed(dv), OperatorParams{ws.q, omega});
  const SpectralField total = lin + dg;
  const double scale = std::max(1.0, sobolev_norm(dv, 0.0) * (1.0 + sobolev_norm(v, 0.0)));
  const double defect = sobolev_norm(total - embed(project_symmetric(total)), 0.0);
  if (defect > ws.tau_sym * scale)
    throw SymmetryError("jacobian_apply: equivariance defect " + std::to_string(defect), defect);
  return project_symmetric(total);
}

/// d F / d omega = (I + R) u + g(u)/omega. F is affine in omega (g carries a
/// single omega factor), so the column is omega-independent.
inline SymmetricField domega_column(const SymmetricField& v, const ResidualWorkspace& ws) {
  ws.validate();
  const SpectralField u = embed(v);
  SpectralField ir = SpectralField::zero(u.grid);
  for (size_t i = 0; i < u.cx.size(); ++i) ir.cx[i] = 2.0 * u.cx[i];
  const SpectralField gu = eval_g(u, 1.0, ws.padding, ws.delta_dom);
  return project_symmetric(ir + gu);
}

namespace detail {

/// Packing of the symmetric coefficients into a flat vector:
/// [X(0,0)..X(J,K), Y(1,0)..Y(J,K)], row-major in j.
inline Eigen::VectorXd pack(const SymmetricField& v) {
  Eigen::VectorXd out(v.n_coeffs());
  int at = 0;
  for (double c : v.X) out(at++) = c;
  for (double c : v.Y) out(at++) = c;
  return out;
}

inline SymmetricField unpack(const Eigen::VectorXd& x, const Grid2D& g) {
  SymmetricField v = SymmetricField::zero(g);
  int at = 0;
  for (double& c : v.X) c = x(at++);
  for (double& c : v.Y) c = x(at++);
  return v;
}

struct CoeffSite {
  int j, k;
  double w;
};

/// Sites of conj(dz) for the basis direction of column `col` (X block first).
/// For the X basis dz has real site weights, invariant under conjugation;
/// for the Y basis dz = i yhat has real weights of opposite sign at +-j, and
/// conjugation negates them.
inline int basis_sites(const Grid2D& g, int col, CoeffSite sites[4]) {
  const int nx = (g.J + 1) * (g.K + 1);
  if (col < nx) {
    const int j = col / (g.K + 1), k = col % (g.K + 1);
    if (j == 0 && k == 0) {
      sites[0] = {0, 0, 1.0};
      return 1;
    }
    if (j == 0) {
      sites[0] = {0, k, 0.5};
      sites[1] = {0, -k, 0.5};
      return 2;
    }
    if (k == 0) {
      sites[0] = {j, 0, 0.5};
      sites[1] = {-j, 0, 0.5};
      return 2;
    }
    sites[0] = {j, k, 0.25};
    sites[1] = {-j, k, 0.25};
    sites[2] = {j, -k, 0.25};
    sites[3] = {-j, -k, 0.25};
    return 4;
  }
  const int yc = col - nx;
  const int j = yc / (g.K + 1) + 1, k = yc % (g.K + 1);
  // dz sites: +w at (+j,+-k), -w at (-j,+-k); conj(dz) flips the sign
  if (k == 0) {
    sites[0] = {j, 0, -0.5};
    sites[1] = {-j, 0, 0.5};
    return 2;
  }
  sites[0] = {j, k, -0.25};
  sites[1] = {j, -k, -0.25};
  sites[2] = {-j, k, 0.25};
  sites[3] = {-j, -k, 0.25};
  return 4;
}

/// Project a complex-function coefficient table h (for h = hx + i hy acting as
/// z) onto the symmetric coefficients: X rows take real parts of site sums,
/// Y rows take real parts with the sign split in j.
inline void project_h_into_column(const std::vector<cplx>& h, const Grid2D& g,
                                  Eigen::MatrixXd& out, int col) {
  const int K = g.K, J = g.J;
  auto hat = [&](int j, int k) { return h[g.mode_index(j, k)]; };
  int row = 0;
  for (int j = 0; j <= J; ++j)
    for (int k = 0; k <= K; ++k) {
      double val;
      if (j == 0 && k == 0)
        val = hat(0, 0).real();
      else if (j == 0)
        val = (hat(0, k) + hat(0, -k)).real();
      else if (k == 0)
        val = (hat(j, 0) + hat(-j, 0)).real();
      else
        val = (hat(j, k) + hat(-j, k) + hat(j, -k) + hat(-j, -k)).real();
      out(row++, col) += val;
    }
  for (int j = 1; j <= J; ++j)
    for (int k = 0; k <= K; ++k) {
      double val;
      if (k == 0)
        val = (hat(j, 0) - hat(-j, 0)).real();
      else
        val = (hat(j, k) + hat(j, -k) - hat(-j, k) - hat(-j, -k)).real();
      out(row++, col) += val;
    }
}

}  // namespace detail

/// Dense matrix of the Frechet derivative dF/dv over the packed symmetric
/// coefficients. Exactly matches jacobian_apply on all basis directions.
inline Eigen::MatrixXd assemble_unbordered(const SymmetricField& v, double omega,
                                           const ResidualWorkspace& ws) {
  ws.validate();
  const Grid2D& g = ws.grid;
  const int nx = (g.J + 1) * (g.K + 1);
  const int n = nx + g.J * (g.K + 1);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);

  // Linear part: block action on (X_{j,k}, Y_{j,k}):
  //   X' = (k^2 + 2w) X + (j/q) Y,  Y' = (j/q) X + k^2 Y.
  auto xi = [&](int j, int k) { return j * (g.K + 1) + k; };
  auto yi = [&](int j, int k) { return nx + (j - 1) * (g.K + 1) + k; };
  for (int j = 0; j <= g.J; ++j)
    for (int k = 0; k <= g.K; ++k) {
      const double x = static_cast<double>(j) / ws.q;
      m(xi(j, k), xi(j, k)) += double(k) * k + 2.0 * omega;
      if (j >= 1) {
        m(xi(j, k), yi(j, k)) += x;
        m(yi(j, k), xi(j, k)) += x;
        m(yi(j, k), yi(j, k)) += double(k) * k;
      }
    }

  // Nonlinear part: column c of Dg maps the <=4 coefficient sites of
  // conj(dz_c) through the convolution with the padded-grid DFT of A.
  int n0 = 0, n1 = 0;
  auto za = detail::padded_values_checked(embed(v), ws.padding, ws.delta_dom, n0, n1);
  for (cplx& z : za) z = detail::dg_weight(z, omega);
  fft2(za.data(), n0, n1, FFTW_FORWARD);
  const double scale = 1.0 / (static_cast<double>(n0) * n1);
  auto ahat = [&](int dj, int dk) {
    const int bj = (dj % n0 + n0) % n0;
    const int bk = (dk % n1 + n1) % n1;
    return scale * za[static_cast<size_t>(bj) * n1 + bk];
  };

  std::vector<cplx> h(g.n_modes());
  detail::CoeffSite sites[4];
  for (int col = 0; col < n; ++col) {
    const int ns = detail::basis_sites(g, col, sites);
    std::fill(h.begin(), h.end(), cplx(0.0));
    for (int j = -g.J; j <= g.J; ++j)
      for (int k = -g.K; k <= g.K; ++k) {
        cplx acc = 0.0;
        for (int s = 0; s < ns; ++s)
          acc += sites[s].w * ahat(j - sites[s].j, k - sites[s].k);
        h[g.mode_index(j, k)] = acc;
      }
    detail::project_h_into_column(h, g, m, col);
  }
  return m;
}

/// Bordered square system: dF/dv extended by the d/domega column and the
/// amplitude-constraint row selecting X_{j0,k0}.
inline Eigen::MatrixXd assemble_dense(const SymmetricField& v, double omega,
                                      const ResidualWorkspace& ws, int j0, int k0) {
  const Grid2D& g = ws.grid;
  if (j0 < 1 || j0 > g.J || k0 < 0 || k0 > g.K)
    throw ConfigError("assemble_dense: constraint mode outside the truncation");
  const int n = (g.J + 1) * (g.K + 1) + g.J * (g.K + 1);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n + 1, n + 1);
  m.topLeftCorner(n, n) = assemble_unbordered(v, omega, ws);
  m.col(n).head(n) = detail::pack(domega_column(v, ws));
  m(n, j0 * (g.K + 1) + k0) = 1.0;
  return m;
}

}  // namespace vfil
