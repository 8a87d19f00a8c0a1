#pragma once
// The symmetry-restricted basis used by the standing-wave solver.
//
// A field v = (x,y) lies in the symmetric subspace when
//   x(t,s) = x(-t,s),  y(t,s) = -y(-t,s),  v(t,-s) = v(t,s),
// i.e. x even in t, y odd in t, both even in s. In that subspace
//   x = sum_{0<=j<=J, 0<=k<=K} X_{j,k} cos(jt) cos(ks),
//   y = sum_{1<=j<=J, 0<=k<=K} Y_{j,k} sin(jt) cos(ks).
// Y has no j=0 row, so the constant-phase gauge direction is structurally
// absent. Embedding into exponential coefficients uses exact powers of two
// (quarters and halves), so embed/restrict round-trips are bit-exact.

#include <cmath>
#include <vector>

#include "vfil/spectral_field.hpp"

namespace vfil {

struct SymmetricField {
  Grid2D grid;
  std::vector<double> X;  // (J+1) x (K+1), row-major in j
  std::vector<double> Y;  // J x (K+1), rows j = 1..J

  static SymmetricField zero(const Grid2D& g) {
    SymmetricField v;
    v.grid = g;
    v.X.assign(static_cast<size_t>(g.J + 1) * (g.K + 1), 0.0);
    v.Y.assign(static_cast<size_t>(g.J) * (g.K + 1), 0.0);
    return v;
  }

  double& Xc(int j, int k) { return X[static_cast<size_t>(j) * (grid.K + 1) + k]; }
  double Xc(int j, int k) const { return X[static_cast<size_t>(j) * (grid.K + 1) + k]; }
  double& Yc(int j, int k) { return Y[static_cast<size_t>(j - 1) * (grid.K + 1) + k]; }
  double Yc(int j, int k) const { return Y[static_cast<size_t>(j - 1) * (grid.K + 1) + k]; }

  int n_coeffs() const { return static_cast<int>(X.size() + Y.size()); }

  SymmetricField& operator+=(const SymmetricField& o) {
    for (size_t i = 0; i < X.size(); ++i) X[i] += o.X[i];
    for (size_t i = 0; i < Y.size(); ++i) Y[i] += o.Y[i];
    return *this;
  }
  SymmetricField& operator-=(const SymmetricField& o) {
    for (size_t i = 0; i < X.size(); ++i) X[i] -= o.X[i];
    for (size_t i = 0; i < Y.size(); ++i) Y[i] -= o.Y[i];
    return *this;
  }
  SymmetricField& operator*=(double a) {
    for (auto& v : X) v *= a;
    for (auto& v : Y) v *= a;
    return *this;
  }
  friend SymmetricField operator+(SymmetricField a, const SymmetricField& b) { return a += b; }
  friend SymmetricField operator-(SymmetricField a, const SymmetricField& b) { return a -= b; }
  friend SymmetricField operator*(double a, SymmetricField v) { return v *= a; }
};

/// Inject the cos/sin basis into exponential coefficients.
///   X_{j,k}: x-coefficient X/4 at the four sites (+-j, +-k) (halves on the
///   axes, X itself at (0,0)); Y_{j,k}: y-coefficient -iY/4 at (+j,+-k) and
///   +iY/4 at (-j,+-k) (halves for k=0).
inline SpectralField embed(const SymmetricField& v) {
  SpectralField f = SpectralField::zero(v.grid);
  const int J = v.grid.J, K = v.grid.K;
  for (int j = 0; j <= J; ++j)
    for (int k = 0; k <= K; ++k) {
      const double Xjk = v.Xc(j, k);
      if (Xjk != 0.0) {
        if (j == 0 && k == 0) {
          f.x(0, 0) += Xjk;
        } else if (j == 0) {
          f.x(0, k) += Xjk / 2;
          f.x(0, -k) += Xjk / 2;
        } else if (k == 0) {
          f.x(j, 0) += Xjk / 2;
          f.x(-j, 0) += Xjk / 2;
        } else {
          f.x(j, k) += Xjk / 4;
          f.x(-j, k) += Xjk / 4;
          f.x(j, -k) += Xjk / 4;
          f.x(-j, -k) += Xjk / 4;
        }
      }
    }
  for (int j = 1; j <= J; ++j)
    for (int k = 0; k <= K; ++k) {
      const double Yjk = v.Yc(j, k);
      if (Yjk != 0.0) {
        if (k == 0) {
          f.y(j, 0) += cplx(0, -Yjk / 2);
          f.y(-j, 0) += cplx(0, Yjk / 2);
        } else {
          f.y(j, k) += cplx(0, -Yjk / 4);
          f.y(j, -k) += cplx(0, -Yjk / 4);
          f.y(-j, k) += cplx(0, Yjk / 4);
          f.y(-j, -k) += cplx(0, Yjk / 4);
        }
      }
    }
  return f;
}

/// Orthogonal projection of an arbitrary field onto the symmetric subspace
/// (no symmetry check). restrict(embed(v)) == v bit-exactly.
inline SymmetricField project_symmetric(const SpectralField& f) {
  SymmetricField v = SymmetricField::zero(f.grid);
  const int J = f.grid.J, K = f.grid.K;
  for (int j = 0; j <= J; ++j)
    for (int k = 0; k <= K; ++k) {
      if (j == 0 && k == 0)
        v.Xc(0, 0) = f.x(0, 0).real();
      else if (j == 0)
        v.Xc(0, k) = (f.x(0, k) + f.x(0, -k)).real();
      else if (k == 0)
        v.Xc(j, 0) = (f.x(j, 0) + f.x(-j, 0)).real();
      else
        v.Xc(j, k) = (f.x(j, k) + f.x(-j, k) + f.x(j, -k) + f.x(-j, -k)).real();
    }
  for (int j = 1; j <= J; ++j)
    for (int k = 0; k <= K; ++k) {
      if (k == 0)
        v.Yc(j, 0) = (f.y(-j, 0) - f.y(j, 0)).imag();
      else
        v.Yc(j, k) = (f.y(-j, k) + f.y(-j, -k) - f.y(j, k) - f.y(j, -k)).imag();
    }
  return v;
}

/// Relative L^2 distance of f from the symmetric subspace.
inline double symmetry_defect(const SpectralField& f) {
  const double nf = sobolev_norm(f, 0.0);
  if (nf == 0.0) return 0.0;
  const SpectralField d = f - embed(project_symmetric(f));
  return sobolev_norm(d, 0.0) / nf;
}

/// Projection with a symmetry check; throws SymmetryError when the relative
/// defect exceeds tol.
inline SymmetricField restrict_symmetric(const SpectralField& f, double tol = 1e-10) {
  const double defect = symmetry_defect(f);
  if (defect > tol)
    throw SymmetryError("restrict: field violates the reflection symmetries (relative defect " +
                            std::to_string(defect) + ")",
                        defect);
  return project_symmetric(f);
}

/// L^2-consistent norms computed directly from basis weights: each interior
/// coefficient spreads over four sites of modulus |c|/4, axis coefficients
/// over two of |c|/2, X_{0,0} over one.
inline double sobolev_norm(const SymmetricField& v, double s) {
  if (s < 0) throw ConfigError("sobolev_norm: s must be >= 0");
  const int J = v.grid.J, K = v.grid.K;
  double acc = 0.0;
  auto wmode = [&](int j, int k) { return std::pow(double(j) * j + double(k) * k + 1.0, s); };
  for (int j = 0; j <= J; ++j)
    for (int k = 0; k <= K; ++k) {
      const double basis = (j == 0 && k == 0) ? 1.0 : (j == 0 || k == 0) ? 0.5 : 0.25;
      acc += v.Xc(j, k) * v.Xc(j, k) * basis * wmode(j, k);
    }
  for (int j = 1; j <= J; ++j)
    for (int k = 0; k <= K; ++k) {
      const double basis = (k == 0) ? 0.5 : 0.25;
      acc += v.Yc(j, k) * v.Yc(j, k) * basis * wmode(j, k);
    }
  return std::sqrt(acc);
}

/// L^2 inner product consistent with sobolev_norm(., 0).
inline double inner_l2(const SymmetricField& a, const SymmetricField& b) {
  const int J = a.grid.J, K = a.grid.K;
  double acc = 0.0;
  for (int j = 0; j <= J; ++j)
    for (int k = 0; k <= K; ++k) {
      const double basis = (j == 0 && k == 0) ? 1.0 : (j == 0 || k == 0) ? 0.5 : 0.25;
      acc += a.Xc(j, k) * b.Xc(j, k) * basis;
    }
  for (int j = 1; j <= J; ++j)
    for (int k = 0; k <= K; ++k) {
      const double basis = (k == 0) ? 0.5 : 0.25;
      acc += a.Yc(j, k) * b.Yc(j, k) * basis;
    }
  return acc;
}

}  // namespace vfil
