// Acceptance suite: one line per criterion, exit code = number of failures.
//
//  1 bifurcation frequencies        |lambda(omega0)| <= 1e-12, omega0 in (-1/q, 0)
//  2 resonant sets                  exactly {(0,0), (+-j0,+-k0)} in a 400x80 scan
//  3 spectral-gap certification     gap >= c*eps, single c > 0 over 150 omega
//  4 central configurations         polygons, Newton reconvergence, nested seed
//  5 branch asymptotics             slopes 2.0+-0.2, full residuals <= 1e-10
//  6 off-kernel quadratic bound     ||w|| <= C ||Pv||^2, branch-uniform C
//  7 standing-wave validation       one period of time evolution returns the wave
//  8 homographic closure            filament system tracks the scalar equation
//  9 numerical hygiene              Jacobians, round-trips, integrator orders

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "vfil/branch_io.hpp"
#include "vfil/central_config.hpp"
#include "vfil/continuation.hpp"
#include "vfil/evolution.hpp"
#include "vfil/residual.hpp"
#include "vfil/spectrum.hpp"

using namespace vfil;

namespace {

int failures = 0;

class Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

void report(int id, const char* name, bool pass, double seconds, const std::string& detail) {
  std::printf("%s criterion %d: %s (%.2f s) %s\n", pass ? "PASS" : "FAIL", id, name, seconds,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::vector<std::pair<int, int>> qk_grid() {
  std::vector<std::pair<int, int>> out;
  for (int q = 1; q <= 5; ++q)
    for (int k0 = 1; k0 <= 5; ++k0)
      if (q * k0 * k0 - 1 >= 1) out.push_back({q, k0});
  return out;
}

void criterion1() {
  Timer t;
  bool pass = true;
  std::string detail;
  for (auto [q, k0] : qk_grid()) {
    const BifurcationPoint b = bifurcation_frequency(q, k0);
    const double lam = std::abs(eigenvalue_closed(b.j0, b.k0, -1, b.params()));
    if (!(lam <= 1e-12) || !(b.omega0 > -1.0 / q) || !(b.omega0 < 0.0)) {
      pass = false;
      detail += " (q=" + std::to_string(q) + ",k0=" + std::to_string(k0) + ")";
    }
  }
  const double sec = t.seconds();
  report(1, "bifurcation frequencies (q,k0 in 1..5)", pass && sec < 1.0, sec,
         pass ? "all |lambda| <= 1e-12, omega0 in (-1/q,0)" : "failing:" + detail);
}

void criterion2() {
  Timer t;
  bool pass = true;
  std::string detail;
  for (auto [q, k0] : qk_grid()) {
    const BifurcationPoint b = bifurcation_frequency(q, k0);
    const auto sites = resonant_set(b.params(), 400, 80);
    std::set<std::pair<int, int>> got;
    double lam_max = 0.0;
    for (const auto& s : sites) {
      got.insert({s.j, s.k});
      lam_max = std::max(lam_max, s.lambda_abs);
    }
    const std::set<std::pair<int, int>> want = {
        {0, 0}, {b.j0, b.k0}, {b.j0, -b.k0}, {-b.j0, b.k0}, {-b.j0, -b.k0}};
    if (got != want || lam_max > 1e-9) {
      pass = false;
      detail += " (q=" + std::to_string(q) + ",k0=" + std::to_string(k0) + ": " +
                std::to_string(sites.size()) + " sites)";
    }
  }
  const double sec = t.seconds();
  report(2, "resonant sets, scan 400x80", pass && sec < 10.0, sec,
         pass ? "exactly five sites at all 24 bifurcation points" : "failing:" + detail);
}

void criterion3() {
  Timer t;
  const double eps = 0.02;
  double c_min = std::numeric_limits<double>::infinity();
  bool pass = true;
  for (int q : {1, 2, 3}) {
    const double lo = 2 * eps, hi = 1.0 / q - 2 * eps;
    for (int i = 1; i <= 50; ++i) {
      const double mag = lo + (i - 0.5) * (hi - lo) / 50.0;
      OperatorParams p{q, -mag, eps};
      const auto cert = certify_gap(p, resonant_set(p, 200, 50), 200, 50);
      if (!(cert.gap > 0.0)) pass = false;
      c_min = std::min(c_min, cert.gap / eps);
    }
  }
  const double sec = t.seconds();
  char buf[128];
  std::snprintf(buf, sizeof buf, "uniform constant c = %.4f over 150 omega values", c_min);
  report(3, "spectral-gap certification (eps = 0.02)", pass && c_min > 0.0 && sec < 30.0, sec,
         buf);
}

void criterion4() {
  Timer t;
  bool pass = true;
  std::string detail;

  for (int n = 2; n <= 12 && pass; ++n)
    for (double kappa = 0.5 * (n - 1) + 0.1; kappa <= 10.0; kappa += 0.5)
      if (cc_residual(polygon_config(n, kappa)) > 1e-13) {
        pass = false;
        detail = "polygon residual at n=" + std::to_string(n);
      }

  std::mt19937 rng(2718);
  std::uniform_real_distribution<double> noise(-1e-3, 1e-3);
  for (int n : {3, 5, 8}) {
    const double kappa = 0.5 * (n - 1) + 1.5;
    CentralConfig poly = polygon_config(n, kappa);
    std::vector<cplx> init = poly.points;
    for (cplx& p : init) p += cplx(noise(rng), noise(rng));
    SolveInfo info;
    const CentralConfig sol = solve_cc(init, kappa, 1e-12, 50, &info);
    if (info.iterations > 8 || cc_residual(sol) > 1e-12) {
      pass = false;
      detail += " reconvergence n=" + std::to_string(n) + " iters=" +
                std::to_string(info.iterations);
    }
  }

  // the nested-seed experiment: two staggered triangles, kappa = 4
  const auto seed = nested_polygon_seed(3, {0.7, 1.5}, {0.0, two_pi / 12});
  const CentralConfig nested = solve_cc(seed, 4.0, 1e-12);
  double rmin = 1e9, rmax = 0.0;
  for (const cplx& p : nested.points) {
    rmin = std::min(rmin, std::abs(p));
    rmax = std::max(rmax, std::abs(p));
  }
  if (cc_residual(nested) > 1e-12) {
    pass = false;
    detail += " nested residual";
  }
  const double sec = t.seconds();
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "%s; nested seed converged with radii in [%.6f, %.6f], residual %.1e",
                pass ? "polygons and reconvergence ok" : detail.c_str(), rmin, rmax,
                cc_residual(nested));
  report(4, "central configurations", pass && sec < 5.0, sec, buf);
}

std::map<std::pair<int, int>, Branch> branches;

void criterion5() {
  bool pass_all = true;
  std::string detail;
  double worst_sec = 0.0;
  for (auto [q, k0] : {std::pair{2, 1}, std::pair{1, 2}, std::pair{3, 1}}) {
    Timer t;
    const BifurcationPoint bif = bifurcation_frequency(q, k0);
    ContinuationSettings st;  // db=5e-4, b_max=2e-2, tol=1e-11, J=K=32
    Branch br = continue_branch(bif, st);
    const double sec = t.seconds();
    worst_sec = std::max(worst_sec, sec);

    bool pass = !br.terminated_early;
    int nontrivial = 0;
    double worst_full = 0.0;
    for (const BranchPoint& p : br.points) {
      if (p.b > 0) ++nontrivial;
      worst_full = std::max(worst_full, p.residual_full_norm);
    }
    if (nontrivial < 40 || worst_full > 1e-10) pass = false;

    AsymptoticsReport rep{};
    try {
      rep = verify_asymptotics(br, 1e-3, 1e-2);
      if (std::abs(rep.slope_omega - 2.0) > 0.2 || std::abs(rep.slope_v - 2.0) > 0.2)
        pass = false;
    } catch (const Error&) {
      pass = false;
    }
    if (sec > 300.0) pass = false;

    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "(q=%d,k0=%d): %d points, slopes %.3f / %.3f, max full residual %.1e, "
                  "curvature sign %+.0f, %.0f s;",
                  q, k0, nontrivial, rep.slope_omega, rep.slope_v, worst_full,
                  rep.curvature_sign, sec);
    detail += std::string(" ") + buf;
    pass_all = pass_all && pass;
    branches.emplace(std::make_pair(q, k0), std::move(br));
  }

  // spectral-convergence note: omega(b = 1e-2) at J=K=16 against 32
  {
    const BifurcationPoint bif = bifurcation_frequency(2, 1);
    ContinuationSettings st16;
    st16.J = st16.K = 16;
    st16.b_max = 1e-2;
    const Branch b16 = continue_branch(bif, st16);
    const Branch& b32 = branches.at({2, 1});
    double om16 = 0.0, om32 = 0.0;
    for (const BranchPoint& p : b16.points)
      if (std::abs(p.b - 1e-2) < 1e-12) om16 = p.omega;
    for (const BranchPoint& p : b32.points)
      if (std::abs(p.b - 1e-2) < 1e-12) om32 = p.omega;
    char buf[96];
    std::snprintf(buf, sizeof buf, " |omega_16 - omega_32|(b=1e-2) = %.1e", std::abs(om16 - om32));
    detail += buf;
  }
  report(5, "branch asymptotics at J=K=32", pass_all, worst_sec, detail);
}

void criterion6() {
  Timer t;
  bool pass = true;
  std::string detail;
  for (const auto& [qk, br] : branches) {
    double c_all = 0.0, c_small = 0.0, c_large = 0.0;
    for (const BranchPoint& p : br.points) {
      if (p.b <= 0) continue;
      const KernelSplit ks = kernel_split(p, br.bif);
      c_all = std::max(c_all, ks.ratio);
      (p.b <= 0.5 * br.settings.b_max ? c_small : c_large) =
          std::max(p.b <= 0.5 * br.settings.b_max ? c_small : c_large, ks.ratio);
    }
    // branch-uniform constant: the small-b half must not blow up against the
    // large-b half (a broken quadratic bound scales like 1/b^2 ~ 1600x here)
    if (!(c_all > 0.0) || c_small > 5.0 * c_large) pass = false;
    char buf[96];
    std::snprintf(buf, sizeof buf, " (q=%d,k0=%d): C = %.3f;", qk.first, qk.second, c_all);
    detail += buf;
  }
  report(6, "off-kernel quadratic bound along branches", pass, t.seconds(), detail);
}

void criterion7() {
  Timer t;
  const Branch& br = branches.at({2, 1});
  const BranchPoint* bp = nullptr;
  for (const BranchPoint& p : br.points)
    if (std::abs(p.b - 5e-3) < 1e-12) bp = &p;
  bool pass = bp != nullptr;
  std::string detail = "no b=5e-3 point";
  if (bp) {
    const ValidationReport rep = validate_standing_wave(bp->v, bp->omega, br.bif.q, 1e-4, 256);
    const double tol = std::max(1e-6, 10.0 * bp->residual_full_norm);
    pass = rep.deviation <= tol && rep.mass_drift < 1e-8 && rep.energy_drift < 1e-8;
    char buf[192];
    std::snprintf(buf, sizeof buf,
                  "deviation %.2e (tol %.1e), mass drift %.1e, energy drift %.1e, "
                  "t0 residual %.1e",
                  rep.deviation, tol, rep.mass_drift, rep.energy_drift, rep.t0_residual);
    detail = buf;
  }
  const double sec = t.seconds();
  report(7, "standing-wave dynamic validation (b=5e-3, q=2)", pass && sec < 120.0, sec, detail);
}

void criterion8() {
  Timer t;
  CentralConfig cfg = polygon_config(3, 2.0);
  const int Ns = 128;
  ScalarWave w = ScalarWave::constant(Ns, cplx(1.0, 0.0));
  FilamentState st = homographic_state(cfg, w);
  const double dt = 1e-4, T = 1.0;
  const int steps = static_cast<int>(std::llround(T / dt));
  for (int s = 0; s < steps; ++s) {
    st = step_filaments(st, dt);
    w = step_pde(w, dt);
  }
  double worst = 0.0;
  for (int j = 1; j <= cfg.n; ++j)
    for (int n = 0; n < Ns; ++n)
      worst = std::max(worst, std::abs(st.curves[j][n] - w.w[n] * cfg.points[j - 1]));
  for (int n = 0; n < Ns; ++n) worst = std::max(worst, std::abs(st.curves[0][n]));
  const double sec = t.seconds();
  char buf[96];
  std::snprintf(buf, sizeof buf, "max homographic defect %.2e at t=1", worst);
  report(8, "homographic closure (polygon n=3, kappa=2)", worst <= 1e-8 && sec < 60.0, sec, buf);
}

void criterion9() {
  Timer t;
  bool pass = true;
  std::string detail;

  {  // dense vs matrix-free
    ResidualWorkspace ws{Grid2D::make(6, 5), 3};
    SymmetricField v = oracle::random_symmetric(ws.grid, 61, 0.03);
    const Eigen::MatrixXd m = assemble_unbordered(v, -0.25, ws);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      SymmetricField dv = oracle::random_symmetric(ws.grid, 100 + trial);
      Eigen::VectorXd packed(dv.n_coeffs());
      int at = 0;
      for (double c : dv.X) packed(at++) = c;
      for (double c : dv.Y) packed(at++) = c;
      SymmetricField mf = jacobian_apply(v, -0.25, dv, ws);
      Eigen::VectorXd mfp(mf.n_coeffs());
      at = 0;
      for (double c : mf.X) mfp(at++) = c;
      for (double c : mf.Y) mfp(at++) = c;
      worst = std::max(worst, ((m * packed) - mfp).lpNorm<Eigen::Infinity>() /
                                  std::max(1.0, mfp.lpNorm<Eigen::Infinity>()));
    }
    if (worst > 1e-12) pass = false;
    detail += " dense-vs-matrixfree " + std::to_string(worst) + ";";
  }

  {  // Jacobian vs central differences
    ResidualWorkspace ws{Grid2D::make(6, 6), 2};
    SymmetricField v = oracle::random_symmetric(ws.grid, 41, 0.02);
    SymmetricField dv = oracle::random_symmetric(ws.grid, 42);
    const double h = 1e-5;
    SymmetricField fd =
        (1.0 / (2 * h)) * (residual(v + h * dv, -0.3, ws) - residual(v - h * dv, -0.3, ws));
    SymmetricField an = jacobian_apply(v, -0.3, dv, ws);
    const double rel = sobolev_norm(fd - an, 0.0) / std::max(1.0, sobolev_norm(an, 0.0));
    if (rel > 1e-6) pass = false;
    char buf[48];
    std::snprintf(buf, sizeof buf, " fd-check %.1e;", rel);
    detail += buf;
  }

  {  // spectral round-trip
    Grid2D g = Grid2D::make(8, 8, 32, 32);
    SpectralField f = oracle::random_hermitian(g, 2024);
    const double rt = oracle::max_coeff_diff(to_coeffs(to_grid(f)), f);
    if (rt > 1e-13) pass = false;
    char buf[48];
    std::snprintf(buf, sizeof buf, " round-trip %.1e;", rt);
    detail += buf;
  }

  {  // splitting order
    auto init = [] {
      return ScalarWave::from_function(
          64, [](double s) { return cplx(1.0 + 0.2 * std::cos(s), 0.15 * std::sin(s)); });
    };
    const double T = 0.5;
    auto run = [&](double dt) {
      ScalarWave w = init();
      const int steps = static_cast<int>(std::llround(T / dt));
      for (int s = 0; s < steps; ++s) w = step_pde(w, T / steps);
      return w;
    };
    const ScalarWave ref = run(7.8125e-5);
    std::vector<double> dts = {4e-3, 2e-3, 1e-3, 5e-4}, errs;
    for (double dt : dts) {
      const ScalarWave w = run(dt);
      double e = 0.0;
      for (int n = 0; n < w.Ns; ++n) e = std::max(e, std::abs(w.w[n] - ref.w[n]));
      errs.push_back(e);
    }
    const double slope = oracle::loglog_slope(dts, errs);
    if (std::abs(slope - 2.0) > 0.1) pass = false;
    char buf[48];
    std::snprintf(buf, sizeof buf, " splitting order %.2f;", slope);
    detail += buf;
  }

  {  // filament scheme order
    CentralConfig cfg = polygon_config(3, 2.0);
    const int Ns = 32;
    auto init = [&] {
      FilamentState st = homographic_state(cfg, ScalarWave::constant(Ns, cplx(1.0, 0.0)));
      for (int n = 0; n < Ns; ++n) {
        st.curves[1][n] += 0.2 * std::exp(cplx(0.0, two_pi * n / Ns));
        st.curves[2][n] += cplx(0.0, 0.15) * std::cos(two_pi * n / Ns);
      }
      return st;
    };
    const double T = 0.5;
    auto run = [&](double dt) {
      FilamentState st = init();
      const int steps = static_cast<int>(std::llround(T / dt));
      for (int s = 0; s < steps; ++s) st = step_filaments(st, T / steps);
      return st;
    };
    const FilamentState ref = run(5e-4);
    std::vector<double> dts = {5e-2, 2.5e-2, 1.25e-2, 6.25e-3}, errs;
    for (double dt : dts) {
      const FilamentState st = run(dt);
      double e = 0.0;
      for (size_t j = 0; j < st.curves.size(); ++j)
        for (int n = 0; n < Ns; ++n)
          e = std::max(e, std::abs(st.curves[j][n] - ref.curves[j][n]));
      errs.push_back(e);
    }
    const double slope = oracle::loglog_slope(dts, errs);
    if (std::abs(slope - 4.0) > 0.2) pass = false;
    char buf[48];
    std::snprintf(buf, sizeof buf, " filament order %.2f", slope);
    detail += buf;
  }

  report(9, "numerical hygiene", pass, t.seconds(), detail);
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  std::printf("%d of 9 criteria failed\n", failures);
  return failures;
}
