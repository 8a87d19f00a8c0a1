#pragma once
// Two-component real fields u = (x,y) on the torus, stored as truncated
// Fourier coefficients with Hermitian symmetry.
//
// Conventions:
//   u(t,s) = sum_{|j|<=J, |k|<=K} u_{j,k} e^{i(jt+ks)},   u_{j,k} in C^2,
//   u_{j,k} = conj(u_{-j,-k})  so that x and y are real valued.
// Storage is dense over the full mode rectangle. The complex scalar
// z = x + i y is used internally: its coefficient table is
//   z_{j,k} = x_{j,k} + i y_{j,k}
// and the components are recovered by the Hermitian split
//   x_{j,k} = (z_{j,k} + conj(z_{-j,-k}))/2,
//   y_{j,k} = (z_{j,k} - conj(z_{-j,-k}))/(2i).
//
// All operations are pure; fields are value types, scratch buffers per call.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "vfil/errors.hpp"
#include "vfil/fft.hpp"
#include "vfil/grid.hpp"

namespace vfil {

struct SpectralField {
  Grid2D grid;
  std::vector<cplx> cx, cy;  // dense (2J+1)x(2K+1) tables, mode_index layout

  static SpectralField zero(const Grid2D& g) {
    SpectralField f;
    f.grid = g;
    f.cx.assign(g.n_modes(), cplx(0.0));
    f.cy.assign(g.n_modes(), cplx(0.0));
    return f;
  }

  const cplx& x(int j, int k) const { return cx[grid.mode_index(j, k)]; }
  const cplx& y(int j, int k) const { return cy[grid.mode_index(j, k)]; }
  cplx& x(int j, int k) { return cx[grid.mode_index(j, k)]; }
  cplx& y(int j, int k) { return cy[grid.mode_index(j, k)]; }

  /// Max deviation from u_{j,k} = conj(u_{-j,-k}).
  double hermitian_defect() const {
    double d = 0.0;
    for (int j = -grid.J; j <= grid.J; ++j)
      for (int k = -grid.K; k <= grid.K; ++k) {
        d = std::max(d, std::abs(x(j, k) - std::conj(x(-j, -k))));
        d = std::max(d, std::abs(y(j, k) - std::conj(y(-j, -k))));
      }
    return d;
  }

  /// Project onto the Hermitian subspace (realifies the represented field).
  void hermitize() {
    for (int j = 0; j <= grid.J; ++j)
      for (int k = -grid.K; k <= grid.K; ++k) {
        if (j == 0 && k < 0) continue;
        cplx ax = 0.5 * (x(j, k) + std::conj(x(-j, -k)));
        cplx ay = 0.5 * (y(j, k) + std::conj(y(-j, -k)));
        x(j, k) = ax;
        x(-j, -k) = std::conj(ax);
        y(j, k) = ay;
        y(-j, -k) = std::conj(ay);
      }
    x(0, 0) = cplx(x(0, 0).real(), 0.0);
    y(0, 0) = cplx(y(0, 0).real(), 0.0);
  }

  SpectralField& operator+=(const SpectralField& o) {
    for (size_t i = 0; i < cx.size(); ++i) {
      cx[i] += o.cx[i];
      cy[i] += o.cy[i];
    }
    return *this;
  }
  SpectralField& operator-=(const SpectralField& o) {
    for (size_t i = 0; i < cx.size(); ++i) {
      cx[i] -= o.cx[i];
      cy[i] -= o.cy[i];
    }
    return *this;
  }
  SpectralField& operator*=(double a) {
    for (size_t i = 0; i < cx.size(); ++i) {
      cx[i] *= a;
      cy[i] *= a;
    }
    return *this;
  }
  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double a, SpectralField f) { return f *= a; }
};

/// Collocation values of the real field on the Nt x Ns grid (row-major in m).
struct GridField {
  Grid2D grid;
  std::vector<double> x, y;  // index m*Ns + n

  double& xv(int m, int n) { return x[static_cast<size_t>(m) * grid.Ns + n]; }
  double& yv(int m, int n) { return y[static_cast<size_t>(m) * grid.Ns + n]; }
  double xv(int m, int n) const { return x[static_cast<size_t>(m) * grid.Ns + n]; }
  double yv(int m, int n) const { return y[static_cast<size_t>(m) * grid.Ns + n]; }
};

/// sqrt( sum |u_{j,k}|^2 (j^2+k^2+1)^s ). s=0 is the L^2 norm under the
/// normalized torus measure.
inline double sobolev_norm(const SpectralField& f, double s) {
  if (s < 0) throw ConfigError("sobolev_norm: s must be >= 0");
  double acc = 0.0;
  for (int j = -f.grid.J; j <= f.grid.J; ++j)
    for (int k = -f.grid.K; k <= f.grid.K; ++k) {
      const double w = std::pow(double(j) * j + double(k) * k + 1.0, s);
      acc += w * (std::norm(f.x(j, k)) + std::norm(f.y(j, k)));
    }
  return std::sqrt(acc);
}

namespace detail {

/// Scatter the coefficient table of z = x+iy into an N0 x N1 bin array and
/// evaluate on the collocation grid (unnormalized inverse transform).
inline std::vector<cplx> grid_values_z(const SpectralField& f, int n0, int n1) {
  if (n0 < f.grid.modes_t() || n1 < f.grid.modes_s())
    throw ConfigError("grid too small for truncation in transform");
  std::vector<cplx> bins(static_cast<size_t>(n0) * n1, cplx(0.0));
  for (int j = -f.grid.J; j <= f.grid.J; ++j) {
    const int bj = (j % n0 + n0) % n0;
    for (int k = -f.grid.K; k <= f.grid.K; ++k) {
      const int bk = (k % n1 + n1) % n1;
      const int idx = f.grid.mode_index(j, k);
      bins[static_cast<size_t>(bj) * n1 + bk] += f.cx[idx] + cplx(0, 1) * f.cy[idx];
    }
  }
  fft2(bins.data(), n0, n1, FFTW_BACKWARD);
  return bins;
}

/// Forward transform of z-samples and Hermitian split back into (x,y)
/// coefficients truncated to g.
inline SpectralField coeffs_from_z(const std::vector<cplx>& z, int n0, int n1,
                                   const Grid2D& g) {
  if (n0 < g.modes_t() || n1 < g.modes_s())
    throw ConfigError("grid too small for truncation in transform");
  std::vector<cplx> bins = z;
  fft2(bins.data(), n0, n1, FFTW_FORWARD);
  const double scale = 1.0 / (static_cast<double>(n0) * n1);
  auto zbin = [&](int j, int k) {
    const int bj = (j % n0 + n0) % n0;
    const int bk = (k % n1 + n1) % n1;
    return scale * bins[static_cast<size_t>(bj) * n1 + bk];
  };
  SpectralField out = SpectralField::zero(g);
  for (int j = -g.J; j <= g.J; ++j)
    for (int k = -g.K; k <= g.K; ++k) {
      const cplx zp = zbin(j, k);
      const cplx zm = std::conj(zbin(-j, -k));
      out.x(j, k) = 0.5 * (zp + zm);
      out.y(j, k) = cplx(0, -0.5) * (zp - zm);
    }
  return out;
}

}  // namespace detail

/// Pointwise values of the real field at t_m = 2pi m/Nt, s_n = 2pi n/Ns.
inline GridField to_grid(const SpectralField& f) {
  f.grid.validate();
  const auto z = detail::grid_values_z(f, f.grid.Nt, f.grid.Ns);
  GridField g;
  g.grid = f.grid;
  g.x.resize(z.size());
  g.y.resize(z.size());
  for (size_t i = 0; i < z.size(); ++i) {
    g.x[i] = z[i].real();
    g.y[i] = z[i].imag();
  }
  return g;
}

/// Inverse of to_grid for resolvable fields.
inline SpectralField to_coeffs(const GridField& g) {
  g.grid.validate();
  std::vector<cplx> z(g.x.size());
  for (size_t i = 0; i < z.size(); ++i) z[i] = cplx(g.x[i], g.y[i]);
  return detail::coeffs_from_z(z, g.grid.Nt, g.grid.Ns, g.grid);
}

/// Collocation sizes of the refinement used to evaluate nonlinear maps:
/// alias-free for polynomial maps of degree <= pad.
inline std::pair<int, int> pad_sizes(const Grid2D& g, int pad) {
  if (pad < 2) throw ConfigError("padding factor must be >= 2");
  return {next_fast_even((pad + 1) * g.J + 1), next_fast_even((pad + 1) * g.K + 1)};
}

/// Evaluate a pointwise map (x,y) -> (x',y') of the field values on a padded
/// grid and truncate the result back to the truncation of f.
template <class F>
SpectralField dealiased_pointwise(const SpectralField& f, F&& map, int pad = 4) {
  const auto [n0, n1] = pad_sizes(f.grid, pad);
  auto z = detail::grid_values_z(f, n0, n1);
  for (auto& v : z) {
    const std::array<double, 2> out = map(v.real(), v.imag());
    v = cplx(out[0], out[1]);
  }
  return detail::coeffs_from_z(z, n0, n1, f.grid);
}

/// Two-field variant: pointwise map ((x1,y1),(x2,y2)) -> (x',y').
template <class F>
SpectralField dealiased_combine(const SpectralField& f, const SpectralField& h,
                                F&& map, int pad = 4) {
  if (!(f.grid == h.grid)) throw ConfigError("dealiased_combine: grid mismatch");
  const auto [n0, n1] = pad_sizes(f.grid, pad);
  auto zf = detail::grid_values_z(f, n0, n1);
  const auto zh = detail::grid_values_z(h, n0, n1);
  for (size_t i = 0; i < zf.size(); ++i) {
    const std::array<double, 2> out =
        map(zf[i].real(), zf[i].imag(), zh[i].real(), zh[i].imag());
    zf[i] = cplx(out[0], out[1]);
  }
  return detail::coeffs_from_z(zf, n0, n1, f.grid);
}

}  // namespace vfil
