#pragma once
// Amplitude continuation of the standing-wave branch from a bifurcation
// point. The branch is parameterized by b = X_{j0,k0}(v) >= 0; each point
// solves the bordered system
//   F(v, omega) = 0 (symmetric truncated space),  X_{j0,k0}(v) = b
// by damped Newton with the dense bordered Jacobian. The predictor is the
// kernel direction scaled so X_{j0,k0} = b:
//   X_{j0,k0} = b,  Y_{j0,k0} = -b (1 - 1/(q k0^2)),  omega = omega0.

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vfil/residual.hpp"
#include "vfil/spectrum.hpp"

namespace vfil {

struct BranchPoint {
  double b = 0.0;
  double omega = 0.0;
  SymmetricField v;
  double residual_norm = 0.0;       // symmetric-space L2 residual
  double residual_full_norm = 0.0;  // unrestricted residual in the full truncation
  int newton_iters = 0;
};

struct ContinuationSettings {
  double db = 5e-4;
  double b_max = 2e-2;
  double tol = 1e-11;
  int max_iter = 25;
  int max_halvings = 6;  // db reductions before the march aborts
  int J = 32, K = 32;
  int padding = 4;
};

struct Branch {
  BifurcationPoint bif;
  ContinuationSettings settings;
  std::vector<BranchPoint> points;  // strictly increasing b, starting at 0
  bool terminated_early = false;
  std::string termination_reason;
};

/// Leading-order branch point: kernel direction with X_{j0,k0} = b at omega0.
inline std::pair<SymmetricField, double> predictor(const BifurcationPoint& bif, double b,
                                                   const Grid2D& grid) {
  if (b < 0) throw ConfigError("predictor: b must be >= 0");
  SymmetricField v = SymmetricField::zero(grid);
  if (b > 0) {
    if (grid.J < bif.j0 || grid.K < bif.k0)
      throw ConfigError("predictor: truncation cannot represent the kernel mode");
    v.Xc(bif.j0, bif.k0) = b;
    v.Yc(bif.j0, bif.k0) = -b * (1.0 - 1.0 / (bif.q * double(bif.k0) * bif.k0));
  }
  return {v, bif.omega0};
}

/// Damped Newton correction of (v, omega) onto the branch slice X_{j0,k0}=b.
inline BranchPoint newton_correct(SymmetricField v, double omega, double b,
                                  const BifurcationPoint& bif, const ResidualWorkspace& ws,
                                  double tol = 1e-11, int max_iter = 25) {
  ws.validate();
  const int n = v.n_coeffs();
  std::vector<double> history;

  if (b == 0.0) {  // trivial solution, exactly
    BranchPoint bp;
    bp.b = 0.0;
    bp.omega = bif.omega0;
    bp.v = SymmetricField::zero(ws.grid);
    return bp;
  }

  auto eval = [&](const SymmetricField& vv, double om) {
    SymmetricField r = residual(vv, om, ws);
    Eigen::VectorXd rb(n + 1);
    rb.head(n) = detail::pack(r);
    rb(n) = vv.Xc(bif.j0, bif.k0) - b;
    return rb;
  };

  Eigen::VectorXd F = eval(v, omega);
  double res = F.norm();
  history.push_back(res);
  int iter = 0;
  while (res > tol) {
    if (iter >= max_iter)
      throw DivergenceError("newton_correct: no convergence at b=" + std::to_string(b), history);
    Eigen::MatrixXd Jb = assemble_dense(v, omega, ws, bif.j0, bif.k0);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(Jb);
    const Eigen::VectorXd step = lu.solve(-F);

    double alpha = 1.0;
    bool accepted = false;
    for (int h = 0; h < 8 && !accepted; ++h) {
      SymmetricField vt = v + detail::unpack(alpha * step.head(n), ws.grid);
      const double ot = omega + alpha * step(n);
      try {
        const Eigen::VectorXd Ft = eval(vt, ot);
        if (Ft.norm() < res) {
          v = vt;
          omega = ot;
          F = Ft;
          res = F.norm();
          accepted = true;
        }
      } catch (const DomainError&) {
        // halve into the analyticity disk
      }
      alpha *= 0.5;
    }
    ++iter;
    history.push_back(res);
    if (!accepted)
      throw DivergenceError("newton_correct: damping failed at b=" + std::to_string(b), history);
  }

  BranchPoint bp;
  bp.b = b;
  bp.omega = omega;
  bp.v = std::move(v);
  bp.newton_iters = iter;
  bp.residual_norm = res;
  bp.residual_full_norm = sobolev_norm(residual_full(bp.v, omega, ws), 0.0);
  return bp;
}

/// March b = 0, db, 2db, ..., b_max with warm starts; on Newton failure the
/// step is halved down to db / 2^max_halvings before the march stops with a
/// termination report.
inline Branch continue_branch(const BifurcationPoint& bif, const ContinuationSettings& st,
                              const std::function<void(const BranchPoint&)>& on_point = nullptr) {
  if (st.db <= 0 || st.b_max < 0) throw ConfigError("continue_branch: need db > 0, b_max >= 0");
  Branch br;
  br.bif = bif;
  br.settings = st;
  ResidualWorkspace ws{Grid2D::make(st.J, st.K), bif.q, st.padding};

  BranchPoint bp;
  bp.b = 0.0;
  bp.omega = bif.omega0;
  bp.v = SymmetricField::zero(ws.grid);
  br.points.push_back(bp);
  if (on_point) on_point(br.points.back());

  const double yslope = -(1.0 - 1.0 / (bif.q * double(bif.k0) * bif.k0));
  double db = st.db;
  const double db_min = st.db / std::pow(2.0, st.max_halvings);
  double b = 0.0;
  while (b < st.b_max - 1e-15) {
    const double b_next = std::min(b + db, st.b_max);
    const BranchPoint& prev = br.points.back();
    // tangent warm start along the kernel direction, secant in omega
    SymmetricField guess = prev.v;
    const double inc = b_next - prev.b;
    guess.Xc(bif.j0, bif.k0) += inc;
    guess.Yc(bif.j0, bif.k0) += inc * yslope;
    double omega_guess = prev.omega;
    if (br.points.size() >= 2) {
      const BranchPoint& pp = br.points[br.points.size() - 2];
      if (prev.b > pp.b)
        omega_guess += (prev.omega - pp.omega) / (prev.b - pp.b) * inc;
    }
    try {
      BranchPoint next = newton_correct(std::move(guess), omega_guess, b_next, bif, ws,
                                        st.tol, st.max_iter);
      b = b_next;
      br.points.push_back(std::move(next));
      if (on_point) on_point(br.points.back());
    } catch (const Error& e) {
      db *= 0.5;
      if (db < db_min) {
        br.terminated_early = true;
        br.termination_reason = std::string("step underflow after failure: ") + e.what();
        break;
      }
    }
  }
  return br;
}

/// Plain least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const size_t n = xs.size();
  for (size_t i = 0; i < n; ++i) {
    const double lx = std::log(xs[i]), ly = std::log(ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct AsymptoticsReport {
  double slope_omega = 0.0;   // log|omega(b) - omega0| against log b
  double slope_v = 0.0;       // log ||v(b) - predictor(b)||_{H^3} against log b
  double c_omega = 0.0;       // fitted |omega - omega0| / b^slope prefactor
  double curvature_sign = 0.0;  // sign of omega(b) - omega0 along the branch
  int points_used = 0;
  bool below_floor = false;
};

/// Least-squares fit of the branch deviations over b in [b_lo, b_hi].
inline AsymptoticsReport verify_asymptotics(const Branch& br, double b_lo = 1e-3,
                                            double b_hi = 1e-2) {
  std::vector<double> bs, domega, dv;
  double sign_acc = 0.0;
  for (const BranchPoint& p : br.points) {
    if (p.b <= 0.0) continue;
    const double del = p.omega - br.bif.omega0;
    sign_acc += (del > 0) - (del < 0);
    if (p.b < b_lo || p.b > b_hi) continue;
    const auto [pred, om0] = predictor(br.bif, p.b, p.v.grid);
    bs.push_back(p.b);
    domega.push_back(std::abs(del));
    dv.push_back(sobolev_norm(embed(p.v) - embed(pred), 3.0));
  }
  if (bs.size() < 5)
    throw ConfigError("verify_asymptotics: need at least 5 branch points in the fit window");
  AsymptoticsReport rep;
  rep.points_used = static_cast<int>(bs.size());
  rep.curvature_sign = (sign_acc > 0) - (sign_acc < 0);
  double floor = 0.0;
  for (double d : domega) floor = std::max(floor, d);
  for (double d : dv) floor = std::max(floor, d);
  if (floor < 1e-14) {
    rep.below_floor = true;
    return rep;
  }
  rep.slope_omega = loglog_slope(bs, domega);
  rep.slope_v = loglog_slope(bs, dv);
  double logc = 0.0;
  for (size_t i = 0; i < bs.size(); ++i)
    logc += std::log(domega[i]) - rep.slope_omega * std::log(bs[i]);
  rep.c_omega = std::exp(logc / bs.size());
  return rep;
}

struct KernelSplit {
  double kernel_norm = 0.0;   // H^3 norm of the kernel projection
  double offkernel_norm = 0.0;  // H^3 norm of the rest
  double ratio = 0.0;           // offkernel / kernel^2
};

/// L2-orthogonal split v = (kernel projection) + w and the quadratic ratio
/// ||w||_{H^3} / ||P v||_{H^3}^2 sampled along a branch.
inline KernelSplit kernel_split(const BranchPoint& p, const BifurcationPoint& bif) {
  SymmetricField kf = kernel_field(bif.q, bif.k0, bif.j0, p.v.grid);
  const double coef = inner_l2(p.v, kf);  // kf has unit L2 norm
  SymmetricField proj = coef * kf;
  SymmetricField w = p.v - proj;
  KernelSplit out;
  out.kernel_norm = sobolev_norm(proj, 3.0);
  out.offkernel_norm = sobolev_norm(w, 3.0);
  out.ratio = out.kernel_norm > 0 ? out.offkernel_norm / (out.kernel_norm * out.kernel_norm)
                                  : 0.0;
  return out;
}

/// Defect of the half-period translation v(t + pi/j0, s + pi/k0) = v,
/// measured on the kernel projection and on the full field. The translated
/// coefficients pick up the phase e^{i pi (j/j0 + k/k0)}.
struct TranslationDefect {
  double kernel = 0.0;
  double full = 0.0;
};

inline TranslationDefect translation_defect(const SymmetricField& v, int j0, int k0) {
  const SpectralField f = embed(v);
  auto translated_defect = [&](const SpectralField& field) {
    SpectralField d = field;
    for (int j = -field.grid.J; j <= field.grid.J; ++j)
      for (int k = -field.grid.K; k <= field.grid.K; ++k) {
        const cplx ph = std::exp(cplx(0.0, std::numbers::pi * (double(j) / j0 + double(k) / k0)));
        d.x(j, k) = field.x(j, k) * (ph - 1.0);
        d.y(j, k) = field.y(j, k) * (ph - 1.0);
      }
    const double nf = sobolev_norm(field, 0.0);
    return nf > 0 ? sobolev_norm(d, 0.0) / nf : 0.0;
  };
  TranslationDefect out;
  out.full = translated_defect(f);
  // kernel projection = the (j0,k0) block of v
  SymmetricField proj = SymmetricField::zero(v.grid);
  proj.Xc(j0, k0) = v.Xc(j0, k0);
  proj.Yc(j0, k0) = v.Yc(j0, k0);
  out.kernel = translated_defect(embed(proj));
  return out;
}

}  // namespace vfil
