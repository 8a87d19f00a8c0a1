#pragma once
// The linearized operator L(omega) acting mode-wise by the Hermitian
// multiplier matrices
//   M_{j,k} = [[k^2 + 2 omega, i (j/q)], [-i (j/q), k^2]]
// with closed-form eigenpairs
//   lambda_{j,k,l} = k^2 + omega + l sqrt((j/q)^2 + omega^2),   l = +-1,
//   e_{j,k,l}      = (-omega - l sqrt((j/q)^2 + omega^2), i (j/q)).
// Bifurcation frequencies: for j0 = q k0^2 - 1 >= 1,
//   omega0 = -(1/q) (1 - 1/(2 q k0^2))  in (-1/q, 0),
// at which lambda_{j0,k0,-1} vanishes. The zero set is scanned by brute
// force; the closed-form eigenvector degenerates at j = 0, where a direct
// 2x2 eigendecomposition is used instead (the (0,0) zero is the constant
// phase gauge with eigenvector (0,1)).

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "vfil/errors.hpp"
#include "vfil/symmetric_field.hpp"

namespace vfil {

struct OperatorParams {
  int q = 1;            // temporal period ratio, nonzero
  double omega = -0.5;  // frequency (bifurcation parameter)
  double epsilon = 0.02;  // gap margin for certification

  void validate() const {
    if (q == 0) throw ConfigError("OperatorParams: q must be nonzero");
  }
};

inline Eigen::Matrix2cd multiplier_matrix(int j, int k, const OperatorParams& p) {
  p.validate();
  const double x = static_cast<double>(j) / p.q;
  Eigen::Matrix2cd m;
  m << cplx(double(k) * k + 2.0 * p.omega, 0.0), cplx(0.0, x),
       cplx(0.0, -x), cplx(double(k) * k, 0.0);
  return m;
}

inline double eigenvalue_closed(int j, int k, int l, const OperatorParams& p) {
  const double x = static_cast<double>(j) / p.q;
  return double(k) * k + p.omega + l * std::sqrt(x * x + p.omega * p.omega);
}

struct ModeEigenpair {
  int j = 0, k = 0, l = 1;
  double lambda = 0.0;
  Eigen::Vector2cd evec;
};

/// Closed-form eigenpair; falls back to a direct 2x2 eigendecomposition when
/// the closed-form eigenvector degenerates (j = 0). Residual ||M e - l e||
/// is kept below 1e-12 ||e||.
inline ModeEigenpair eigenpair(int j, int k, int l, const OperatorParams& p) {
  if (l != 1 && l != -1) throw ConfigError("eigenpair: l must be +1 or -1");
  ModeEigenpair out;
  out.j = j;
  out.k = k;
  out.l = l;
  out.lambda = eigenvalue_closed(j, k, l, p);
  const double x = static_cast<double>(j) / p.q;
  const double root = std::sqrt(x * x + p.omega * p.omega);
  Eigen::Vector2cd e(cplx(-p.omega - l * root, 0.0), cplx(0.0, x));
  if (e.norm() > 1e-8 * (1.0 + root)) {
    out.evec = e.normalized();
    return out;
  }
  const Eigen::Matrix2cd m = multiplier_matrix(j, k, p);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(m);
  const int which =
      std::abs(es.eigenvalues()(0) - out.lambda) <= std::abs(es.eigenvalues()(1) - out.lambda)
          ? 0 : 1;
  out.evec = es.eigenvectors().col(which);
  return out;
}

/// Minimal |eigenvalue| of M_{j,k}, by the (exact) Hermitian closed form.
inline double min_abs_eigenvalue(int j, int k, const OperatorParams& p) {
  return std::min(std::abs(eigenvalue_closed(j, k, -1, p)),
                  std::abs(eigenvalue_closed(j, k, +1, p)));
}

struct ResonantSite {
  int j = 0, k = 0;
  double lambda_abs = 0.0;
  int branch = 0;  // which eigenvalue vanished: +1 or -1 (by magnitude)
  auto operator<=>(const ResonantSite&) const = default;
};

/// Brute-force scan of the zero set over |j| <= scan_J, |k| <= scan_K.
inline std::vector<ResonantSite> resonant_set(const OperatorParams& p, int scan_J, int scan_K,
                                              double tau_zero = 1e-9) {
  p.validate();
  std::vector<ResonantSite> out;
  for (int j = -scan_J; j <= scan_J; ++j)
    for (int k = -scan_K; k <= scan_K; ++k) {
      const double lm = std::abs(eigenvalue_closed(j, k, -1, p));
      const double lp = std::abs(eigenvalue_closed(j, k, +1, p));
      const double m = std::min(lm, lp);
      if (m <= tau_zero) out.push_back({j, k, m, lm <= lp ? -1 : +1});
    }
  std::sort(out.begin(), out.end(),
            [](const ResonantSite& a, const ResonantSite& b) {
              return std::pair(a.j, a.k) < std::pair(b.j, b.k);
            });
  return out;
}

struct BifurcationPoint {
  int q = 1;
  int k0 = 1;
  int j0 = 0;        // q k0^2 - 1
  double omega0 = 0.0;
  SymmetricField kernel_fn;  // unit L2 norm, X component positive

  OperatorParams params() const { return {q, omega0, 0.02}; }
};

/// The one-dimensional symmetric kernel direction at (j0, k0):
///   (k0^2 cos(j0 t), -(j0/q) sin(j0 t)) cos(k0 s),
/// normalized to unit L2 norm with X_{j0,k0} > 0.
inline SymmetricField kernel_field(int q, int k0, int j0, const Grid2D& grid) {
  if (grid.J < j0 || grid.K < k0)
    throw ConfigError("kernel_field: truncation cannot represent the kernel mode");
  SymmetricField v = SymmetricField::zero(grid);
  const double xc = double(k0) * k0;
  const double yc = -static_cast<double>(j0) / q;
  // interior basis coefficients carry L2 weight 1/4 each
  const double norm = 0.5 * std::sqrt(xc * xc + yc * yc);
  v.Xc(j0, k0) = xc / norm;
  v.Yc(j0, k0) = yc / norm;
  return v;
}

/// Bifurcation frequency and kernel data for integer q >= 1, k0 >= 1.
inline BifurcationPoint bifurcation_frequency(int q, int k0) {
  if (q < 1) throw ConfigError("bifurcation_frequency: need q >= 1");
  if (k0 < 1) throw ConfigError("bifurcation_frequency: need k0 >= 1");
  const int j0 = q * k0 * k0 - 1;
  if (j0 == 0)
    throw DegenerateError(
        "bifurcation_frequency: q=1, k0=1 gives j0=0 (time-independent kernel mode)");
  BifurcationPoint bp;
  bp.q = q;
  bp.k0 = k0;
  bp.j0 = j0;
  bp.omega0 = -(1.0 / q) * (1.0 - 1.0 / (2.0 * q * k0 * k0));
  bp.kernel_fn = kernel_field(q, k0, j0, Grid2D::make(j0, k0));
  return bp;
}

struct GapCertificate {
  double gap = 0.0;       // min(scan_min, tail_min): certified for the full lattice
  double scan_min = 0.0;  // minimum over the scanned box minus excluded sites
  int arg_j = 0, arg_k = 0;
  double tail_min = 0.0;  // analytic lower bound outside the box
  int scan_J = 0, scan_K = 0;
};

/// Certified lower bound on |lambda| off the excluded set, over the whole
/// lattice. Inside the scan box eigenvalues are evaluated exactly; outside,
/// analytic bounds are used:
///   l=-1 off the line |j| = q k^2:  |lambda| >= |k^2 - |j|/q| - |h(x)| with
///        h(x) = x + omega - sqrt(x^2 + omega^2), |h| <= |omega| + omega^2/(2x),
///   l=-1 on the line:               |lambda| >= |omega| - omega^2/(2k^2),
///   l=+1:                           lambda >= max(k^2, |j|/q - |omega|).
inline GapCertificate certify_gap(const OperatorParams& p,
                                  const std::vector<ResonantSite>& exclude, int scan_J,
                                  int scan_K) {
  p.validate();
  const double om = p.omega, eps = p.epsilon;
  if (!(om < 0.0) || !(2 * eps < -om) || !(-om < 1.0 / p.q - 2 * eps))
    throw PreconditionError("certify_gap: need 2*eps < |omega| < 1/q - 2*eps with omega < 0");

  auto excluded = [&](int j, int k) {
    for (const ResonantSite& s : exclude)
      if (s.j == j && s.k == k) return true;
    return false;
  };

  GapCertificate cert;
  cert.scan_J = scan_J;
  cert.scan_K = scan_K;
  cert.scan_min = std::numeric_limits<double>::infinity();
  for (int j = -scan_J; j <= scan_J; ++j)
    for (int k = -scan_K; k <= scan_K; ++k) {
      if (excluded(j, k)) continue;
      const double m = min_abs_eigenvalue(j, k, p);
      if (m < cert.scan_min) {
        cert.scan_min = m;
        cert.arg_j = j;
        cert.arg_k = k;
      }
    }

  // Tail: modes with |j| > scan_J (off the resonant line; x >= x0)
  const double x0 = static_cast<double>(scan_J + 1) / p.q;
  const double t_j = 1.0 / p.q - (-om) - om * om / (std::sqrt(x0 * x0 + om * om) + x0);
  // modes with |k| > scan_K, |j| <= scan_J, off the line
  const double t_k =
      static_cast<double>(scan_K + 1) * (scan_K + 1) - static_cast<double>(scan_J) / p.q -
      2.0 * (-om);
  if (t_k <= 0.0)
    throw ConfigError("certify_gap: scan box too flat (need (scan_K+1)^2 > scan_J/q + 2|omega|)");
  // the resonant line |j| = q k^2 beyond the box
  int k_line = scan_K + 1;
  for (int k = 1; k <= scan_K; ++k)
    if (static_cast<long long>(p.q) * k * k > scan_J) {
      k_line = k;
      break;
    }
  const double t_line = (-om) - om * om / (2.0 * double(k_line) * k_line);
  // l = +1 beyond the box: lambda >= (scan_K+1)^2 for large k, or
  // >= |j|/q + omega >= x0 - |omega| for large j
  const double t_plus = std::min(double(scan_K + 1) * (scan_K + 1), x0 - (-om));

  cert.tail_min = std::min(std::min(t_j, t_k), std::min(t_line, t_plus));
  cert.gap = std::min(cert.scan_min, cert.tail_min);
  return cert;
}

/// L acting diagonally on the coefficient pairs of a field.
inline SpectralField apply_operator(const SpectralField& f, const OperatorParams& p) {
  p.validate();
  SpectralField out = SpectralField::zero(f.grid);
  for (int j = -f.grid.J; j <= f.grid.J; ++j) {
    const double x = static_cast<double>(j) / p.q;
    for (int k = -f.grid.K; k <= f.grid.K; ++k) {
      const double diag = double(k) * k;
      const cplx a = f.x(j, k), b = f.y(j, k);
      out.x(j, k) = (diag + 2.0 * p.omega) * a + cplx(0.0, x) * b;
      out.y(j, k) = cplx(0.0, -x) * a + diag * b;
    }
  }
  return out;
}

}  // namespace vfil
