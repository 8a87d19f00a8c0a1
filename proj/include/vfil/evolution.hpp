#pragma once
// Time integration and cross-validation.
//
// Reduced scalar equation:  dw/dt = i (w_ss - w/|w|^2), integrated by Strang
// splitting: the nonlinear sub-flow w -> w exp(-i dt / |w|^2) is exact (|w|
// is invariant under it), the linear sub-flow is the exact Fourier
// multiplier exp(-i k^2 dt). Second order in dt, preserves the discrete mass
// sum |w|^2 exactly.
//
// Filament system (interaction weights Gamma_i on the sum):
//   du_j/dt = i (Gamma_j u_j'' + sum_{i != j} Gamma_i (u_j - u_i)/|u_j - u_i|^2)
// integrated by fourth-order Runge-Kutta with the exact integrating factor
// exp(-i Gamma_j k^2 t) per filament.
//
// Homographic curves: u_j(t,s) = a e^{i omega t} a_j (1 + u(t/q, s)) with
// a = (-omega)^{-1/2}; the center filament stays at the origin.

#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "vfil/central_config.hpp"
#include "vfil/continuation.hpp"
#include "vfil/fft.hpp"

namespace vfil {

struct ScalarWave {
  int Ns = 0;
  std::vector<cplx> w;   // samples at s_n = 2 pi n / Ns
  double time = 0.0;
  double floor = 1e-8;   // |w| guard for the 1/|w|^2 nonlinearity

  static ScalarWave constant(int Ns, cplx value) {
    ScalarWave sw;
    sw.Ns = Ns;
    sw.w.assign(Ns, value);
    sw.check();
    return sw;
  }

  static ScalarWave from_function(int Ns, const std::function<cplx(double)>& f) {
    ScalarWave sw;
    sw.Ns = Ns;
    sw.w.resize(Ns);
    for (int n = 0; n < Ns; ++n) sw.w[n] = f(two_pi * n / Ns);
    sw.check();
    return sw;
  }

  void check() const {
    if (Ns < 4 || Ns % 2 != 0) throw ConfigError("ScalarWave: Ns must be even and >= 4");
    for (const cplx& v : w)
      if (std::abs(v) <= floor)
        throw SingularityError("ScalarWave: |w| fell to " + std::to_string(std::abs(v)) +
                               " (nonlinearity singular at w = 0)");
  }
};

namespace detail {

inline int wrap_mode(int bin, int n) { return bin <= n / 2 ? bin : bin - n; }

/// In-place exact linear flow: w_hat_k *= exp(-i gamma k^2 dt).
inline void linear_flow(std::vector<cplx>& w, double gamma_dt) {
  const int n = static_cast<int>(w.size());
  fft1(w.data(), n, FFTW_FORWARD);
  const double scale = 1.0 / n;
  for (int b = 0; b < n; ++b) {
    const double k = wrap_mode(b, n);
    w[b] *= scale * std::exp(cplx(0.0, -gamma_dt * k * k));
  }
  fft1(w.data(), n, FFTW_BACKWARD);
}

}  // namespace detail

/// One Strang step: exact nonlinear half-steps around the exact linear step.
inline ScalarWave step_pde(const ScalarWave& w0, double dt) {
  w0.check();
  ScalarWave out = w0;
  auto nl_half = [&](std::vector<cplx>& w) {
    for (cplx& v : w) {
      const double m2 = std::norm(v);
      if (m2 <= w0.floor * w0.floor)
        throw SingularityError("step_pde: |w| under the nonlinearity floor");
      v *= std::exp(cplx(0.0, -0.5 * dt / m2));
    }
  };
  nl_half(out.w);
  detail::linear_flow(out.w, dt);
  nl_half(out.w);
  out.time += dt;
  out.check();
  return out;
}

/// Discrete mass (2pi/Ns) sum |w|^2: conserved exactly by step_pde.
inline double mass(const ScalarWave& w) {
  double acc = 0.0;
  for (const cplx& v : w.w) acc += std::norm(v);
  return acc * two_pi / w.Ns;
}

/// Discrete energy (2pi/Ns) sum (|w_s|^2 + log |w|^2), with the spectral
/// derivative; conserved by the flow up to O(dt^2).
inline double energy(const ScalarWave& w) {
  std::vector<cplx> ws = w.w;
  const int n = w.Ns;
  fft1(ws.data(), n, FFTW_FORWARD);
  const double scale = 1.0 / n;
  for (int b = 0; b < n; ++b) {
    const double k = detail::wrap_mode(b, n);
    ws[b] *= scale * cplx(0.0, k);
  }
  fft1(ws.data(), n, FFTW_BACKWARD);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += std::norm(ws[i]) + std::log(std::norm(w.w[i]));
  return acc * two_pi / n;
}

struct FilamentState {
  CentralConfig config;
  std::vector<std::vector<cplx>> curves;  // (n+1) filaments, index 0 = center
  double time = 0.0;
  double delta_min = 1e-6;  // pairwise separation guard

  int Ns() const { return curves.empty() ? 0 : static_cast<int>(curves[0].size()); }
};

/// Homographic initial data u_j = w(s) a_j (center at 0).
inline FilamentState homographic_state(const CentralConfig& cfg, const ScalarWave& w) {
  FilamentState st;
  st.config = cfg;
  st.curves.assign(cfg.n + 1, std::vector<cplx>(w.Ns));
  for (int n = 0; n < w.Ns; ++n) st.curves[0][n] = 0.0;
  for (int j = 1; j <= cfg.n; ++j)
    for (int n = 0; n < w.Ns; ++n) st.curves[j][n] = w.w[n] * cfg.points[j - 1];
  return st;
}

namespace detail {

inline void check_separation(const FilamentState& st) {
  const int nf = static_cast<int>(st.curves.size());
  const int ns = st.Ns();
  for (int i = 0; i < nf; ++i)
    for (int j = i + 1; j < nf; ++j)
      for (int n = 0; n < ns; ++n)
        if (std::abs(st.curves[i][n] - st.curves[j][n]) < st.delta_min)
          throw CollisionError("filaments " + std::to_string(i) + " and " + std::to_string(j) +
                                   " closer than the collision guard at s = " +
                                   std::to_string(two_pi * n / ns),
                               i, j, two_pi * n / ns);
}

/// Pointwise interaction i sum_{i != j} Gamma_i (u_j - u_i)/|u_j - u_i|^2.
inline std::vector<std::vector<cplx>> interaction(const FilamentState& st) {
  const int nf = static_cast<int>(st.curves.size());
  const int ns = st.Ns();
  std::vector<std::vector<cplx>> out(nf, std::vector<cplx>(ns, cplx(0.0)));
  for (int j = 0; j < nf; ++j)
    for (int i = 0; i < nf; ++i) {
      if (i == j) continue;
      const double gamma_i = st.config.circulation(i);
      for (int n = 0; n < ns; ++n) {
        const cplx d = st.curves[j][n] - st.curves[i][n];
        const double m2 = std::norm(d);
        if (m2 < st.delta_min * st.delta_min)
          throw CollisionError("interaction singular between filaments " + std::to_string(i) +
                                   " and " + std::to_string(j),
                               i, j, two_pi * n / ns);
        out[j][n] += gamma_i * d / m2;
      }
    }
  for (auto& row : out)
    for (cplx& v : row) v *= cplx(0.0, 1.0);
  return out;
}

/// u -> exp(-i Gamma_j k^2 tau) u per filament (exact linear propagator).
inline void propagate_linear(std::vector<std::vector<cplx>>& curves,
                             const CentralConfig& cfg, double tau) {
  for (size_t j = 0; j < curves.size(); ++j)
    linear_flow(curves[j], cfg.circulation(static_cast<int>(j)) * tau);
}

}  // namespace detail

/// One integrating-factor Runge-Kutta step (classical fourth order on the
/// transformed variable); separation re-checked after the step.
inline FilamentState step_filaments(const FilamentState& st0, double dt) {
  detail::check_separation(st0);
  const int nf = static_cast<int>(st0.curves.size());
  const int ns = st0.Ns();

  auto axpy = [&](const std::vector<std::vector<cplx>>& a, double c,
                  const std::vector<std::vector<cplx>>& b) {
    std::vector<std::vector<cplx>> out(nf, std::vector<cplx>(ns));
    for (int j = 0; j < nf; ++j)
      for (int n = 0; n < ns; ++n) out[j][n] = a[j][n] + c * b[j][n];
    return out;
  };
  auto nonlinear = [&](const std::vector<std::vector<cplx>>& curves) {
    FilamentState tmp = st0;
    tmp.curves = curves;
    return detail::interaction(tmp);
  };
  auto half = [&](std::vector<std::vector<cplx>> curves) {
    detail::propagate_linear(curves, st0.config, 0.5 * dt);
    return curves;
  };

  // k1..k4 on the integrating-factor variable
  const auto k1 = nonlinear(st0.curves);
  const auto u_half = half(st0.curves);
  const auto k2 = nonlinear(axpy(u_half, 0.5 * dt, half(k1)));
  const auto k3 = nonlinear(axpy(u_half, 0.5 * dt, k2));
  auto u_full = half(u_half);
  auto k3prop = k3;
  detail::propagate_linear(k3prop, st0.config, 0.5 * dt);
  const auto k4 = nonlinear(axpy(u_full, dt, k3prop));

  FilamentState out = st0;
  auto k1prop = k1;
  detail::propagate_linear(k1prop, st0.config, dt);
  auto k2prop = k2;
  detail::propagate_linear(k2prop, st0.config, 0.5 * dt);
  auto kk3 = k3;
  detail::propagate_linear(kk3, st0.config, 0.5 * dt);
  out.curves = u_full;
  for (int j = 0; j < nf; ++j)
    for (int n = 0; n < ns; ++n)
      out.curves[j][n] += dt / 6.0 *
                          (k1prop[j][n] + 2.0 * k2prop[j][n] + 2.0 * kk3[j][n] + k4[j][n]);
  out.time += dt;
  detail::check_separation(out);
  return out;
}

/// Conserved functionals of the filament system: sum_j Gamma_j int u_j ds
/// and sum_j Gamma_j int |u_j|^2 ds.
struct FilamentInvariants {
  cplx center = 0.0;
  double impulse = 0.0;
};

inline FilamentInvariants filament_invariants(const FilamentState& st) {
  FilamentInvariants inv;
  const int ns = st.Ns();
  for (size_t j = 0; j < st.curves.size(); ++j) {
    const double gamma = st.config.circulation(static_cast<int>(j));
    cplx c = 0.0;
    double m = 0.0;
    for (const cplx& v : st.curves[j]) {
      c += v;
      m += std::norm(v);
    }
    inv.center += gamma * c * (two_pi / ns);
    inv.impulse += gamma * m * (two_pi / ns);
  }
  return inv;
}

/// Evaluate the symmetric field as the complex perturbation x + i y at
/// (tau, s_m), by direct summation of the cos/sin series.
inline std::vector<cplx> evaluate_perturbation(const SymmetricField& v, double tau,
                                               int samples) {
  std::vector<cplx> out(samples, cplx(0.0));
  const int J = v.grid.J, K = v.grid.K;
  std::vector<double> cosk(static_cast<size_t>(K + 1) * samples);
  for (int k = 0; k <= K; ++k)
    for (int m = 0; m < samples; ++m)
      cosk[static_cast<size_t>(k) * samples + m] = std::cos(k * (two_pi * m / samples));
  for (int j = 0; j <= J; ++j) {
    const double cj = std::cos(j * tau), sj = std::sin(j * tau);
    for (int k = 0; k <= K; ++k) {
      const double xc = v.Xc(j, k);
      const double yc = j >= 1 ? v.Yc(j, k) : 0.0;
      if (xc == 0.0 && yc == 0.0) continue;
      const cplx amp(cj * xc, sj * yc);
      const double* ck = &cosk[static_cast<size_t>(k) * samples];
      for (int m = 0; m < samples; ++m) out[m] += amp * ck[m];
    }
  }
  return out;
}

/// Homographic filament curves u_j(t, s_m) = a e^{i omega t} a_j (1 + u(t/q, s_m)).
inline std::vector<std::vector<cplx>> reconstruct(const SymmetricField& v, double omega, int q,
                                                  const CentralConfig& cfg, double t,
                                                  int samples) {
  if (!(omega < 0)) throw ConfigError("reconstruct: need omega < 0");
  const double a = 1.0 / std::sqrt(-omega);
  const cplx rot = a * std::exp(cplx(0.0, omega * t));
  const auto u = evaluate_perturbation(v, t / q, samples);
  std::vector<std::vector<cplx>> curves(cfg.n + 1, std::vector<cplx>(samples));
  for (int m = 0; m < samples; ++m) curves[0][m] = 0.0;
  for (int j = 1; j <= cfg.n; ++j)
    for (int m = 0; m < samples; ++m)
      curves[j][m] = rot * cfg.points[j - 1] * (1.0 + u[m]);
  return curves;
}

struct ValidationReport {
  double deviation = 0.0;     // max |w_num(T) - analytic| after one period
  double mass_drift = 0.0;
  double energy_drift = 0.0;
  double t0_residual = 0.0;   // instantaneous PDE residual of the ansatz at t=0
  double dt_effective = 0.0;
  int steps = 0;
};

/// Build w(0,s) = a (1 + u(0,s)), evolve to T = 2 pi q, compare with the
/// rotating-frame return state a e^{i omega T} (1 + u(0,s)).
inline ValidationReport validate_standing_wave(const SymmetricField& v, double omega, int q,
                                               double dt = 1e-4, int Ns = 256) {
  if (!(omega < 0)) throw ConfigError("validate_standing_wave: need omega < 0");
  const double a = 1.0 / std::sqrt(-omega);
  const double T = two_pi * q;
  const auto u0 = evaluate_perturbation(v, 0.0, Ns);

  ScalarWave w;
  w.Ns = Ns;
  w.w.resize(Ns);
  for (int n = 0; n < Ns; ++n) w.w[n] = a * (1.0 + u0[n]);
  w.check();

  ValidationReport rep;
  rep.steps = std::max(1, static_cast<int>(std::llround(T / dt)));
  rep.dt_effective = T / rep.steps;
  const double m0 = mass(w), e0 = energy(w);

  // instantaneous residual of the ansatz: dw/dt - i (w_ss - w/|w|^2) at t=0,
  // with dw/dt = a (i omega (1+u) + u_tau/q). At tau = 0 only the sin-basis
  // survives differentiation: u_tau(0,s) = i sum_{j,k} j Y_{j,k} cos(ks).
  {
    SymmetricField dv = SymmetricField::zero(v.grid);
    for (int j = 1; j <= v.grid.J; ++j)
      for (int k = 0; k <= v.grid.K; ++k) dv.Xc(j, k) = j * v.Yc(j, k);
    const auto ux = evaluate_perturbation(dv, 0.0, Ns);
    std::vector<cplx> ut(Ns);
    for (int n = 0; n < Ns; ++n) ut[n] = cplx(0.0, 1.0) * ux[n].real();
    std::vector<cplx> wss = w.w;
    fft1(wss.data(), Ns, FFTW_FORWARD);
    for (int b = 0; b < Ns; ++b) {
      const double k = detail::wrap_mode(b, Ns);
      wss[b] *= -k * k / double(Ns);
    }
    fft1(wss.data(), Ns, FFTW_BACKWARD);
    double worst = 0.0;
    for (int n = 0; n < Ns; ++n) {
      const cplx wt = a * (cplx(0.0, omega) * (1.0 + u0[n]) + ut[n] / double(q));
      const cplx rhs = cplx(0.0, 1.0) * (wss[n] - w.w[n] / std::norm(w.w[n]));
      worst = std::max(worst, std::abs(wt - rhs));
    }
    rep.t0_residual = worst;
  }

  for (int s = 0; s < rep.steps; ++s) w = step_pde(w, rep.dt_effective);

  const cplx ret = std::exp(cplx(0.0, omega * T));
  double dev = 0.0;
  for (int n = 0; n < Ns; ++n)
    dev = std::max(dev, std::abs(w.w[n] - a * ret * (1.0 + u0[n])));
  rep.deviation = dev;
  rep.mass_drift = std::abs(mass(w) - m0);
  rep.energy_drift = std::abs(energy(w) - e0);
  return rep;
}

}  // namespace vfil
