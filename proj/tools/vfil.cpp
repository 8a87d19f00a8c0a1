// vfil: central configurations, linear spectra, standing-wave branch
// continuation and time evolution for the n+1 vortex filament model.
//
// Subcommands
//   cc           polygon / nested-seed central configurations (JSON out)
//   spectrum     bifurcation frequencies, resonant sets, gap certificates
//   branch       amplitude continuation of the standing-wave branch (JSONL)
//   evolve       time integration of the reduced equation or the filament
//                system (CSV out)
//   reconstruct  homographic filament curves from a branch point (CSV out)
//
// Exit codes: 0 success, 1 usage, 2 infeasible or degenerate input,
// 3 numerical failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "vfil/branch_io.hpp"
#include "vfil/central_config.hpp"
#include "vfil/continuation.hpp"
#include "vfil/evolution.hpp"
#include "vfil/field_io.hpp"
#include "vfil/residual.hpp"
#include "vfil/spectrum.hpp"

using namespace vfil;
using nlohmann::json;

namespace {

/// Resolve --out against VFIL_OUT_DIR for relative paths; empty -> stdout.
/// Parent directories are created on demand.
std::unique_ptr<std::ostream> open_output(const std::string& path, std::ostream*& os) {
  if (path.empty()) {
    os = &std::cout;
    return nullptr;
  }
  std::string full = path;
  if (const char* dir = std::getenv("VFIL_OUT_DIR"); dir && *dir && path.front() != '/')
    full = std::string(dir) + "/" + path;
  const auto parent = std::filesystem::path(full).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  auto f = std::make_unique<std::ofstream>(full);
  if (!*f) throw ConfigError("cannot open output file: " + full);
  os = f.get();
  return f;
}

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::strtod(tok.c_str(), nullptr));
  return out;
}

int run_cc(int n, double kappa, const std::string& nested, const std::string& offsets,
           double tol, const std::string& out_path) {
  std::ostream* os = nullptr;
  auto hold = open_output(out_path, os);
  CentralConfig cfg;
  SolveInfo info;
  if (nested.empty()) {
    cfg = polygon_config(n, kappa);
  } else {
    const auto rings = parse_list(nested);
    auto offs = offsets.empty() ? std::vector<double>(rings.size(), 0.0) : parse_list(offsets);
    if (rings.empty() || n % static_cast<int>(rings.size()) != 0)
      throw ConfigError("cc: --n must be n_per_ring * #rings");
    const int per_ring = n / static_cast<int>(rings.size());
    cfg = solve_cc(nested_polygon_seed(per_ring, rings, offs), kappa, tol, 50, &info);
  }
  json j = to_json(cfg);
  j["residual"] = cc_residual(cfg);
  j["iterations"] = info.iterations;
  j["settings"] = {{"tol", tol}, {"nested", nested}, {"offsets", offsets}};
  *os << j.dump(2) << '\n';
  return 0;
}

int run_spectrum(int q, std::optional<int> k0, std::optional<double> omega, int scan_J,
                 int scan_K, double eps, const std::string& out_path) {
  std::ostream* os = nullptr;
  auto hold = open_output(out_path, os);
  json j;
  j["q"] = q;
  j["scan"] = {scan_J, scan_K};
  j["settings"] = {{"eps", eps}, {"tau_zero", 1e-9}};

  OperatorParams p{q, 0.0, eps};
  if (k0) {
    BifurcationPoint bp = bifurcation_frequency(q, *k0);
    p.omega = bp.omega0;
    j["k0"] = *k0;
    j["j0"] = bp.j0;
    j["omega0"] = bp.omega0;
  } else if (omega) {
    p.omega = *omega;
  } else {
    throw ConfigError("spectrum: need --k0 or --omega");
  }
  j["omega"] = p.omega;

  const auto sites = resonant_set(p, scan_J, scan_K);
  json res = json::array();
  for (const auto& s : sites) res.push_back({s.j, s.k});
  j["resonant"] = res;

  try {
    const GapCertificate cert = certify_gap(p, sites, scan_J, scan_K);
    j["gap"] = cert.gap;
    j["gap_mode"] = {cert.arg_j, cert.arg_k};
    j["gap_scan_min"] = cert.scan_min;
    j["gap_tail_min"] = cert.tail_min;
  } catch (const PreconditionError& e) {
    j["gap"] = nullptr;
    j["gap_note"] = e.what();
  }
  *os << j.dump(2) << '\n';
  return 0;
}

int run_branch(int q, int k0, double db, double bmax, const std::string& trunc, double tol,
               int max_iter, const std::string& dump_dir, const std::string& out_path) {
  std::ostream* os = nullptr;
  auto hold = open_output(out_path, os);
  BifurcationPoint bif = bifurcation_frequency(q, k0);
  ContinuationSettings st;
  st.db = db;
  st.b_max = bmax;
  st.tol = tol;
  st.max_iter = max_iter;
  if (!trunc.empty()) {
    const auto jk = parse_list(trunc);
    if (jk.size() != 2) throw ConfigError("branch: --trunc expects J,K");
    st.J = static_cast<int>(jk[0]);
    st.K = static_cast<int>(jk[1]);
  }
  if (st.J < bif.j0 || st.K < bif.k0)
    throw ConfigError("branch: truncation too small for (j0,k0)");
  Branch br = continue_branch(bif, st);
  write_branch_jsonl(br, *os,
                     dump_dir.empty() ? std::nullopt : std::optional<std::string>(dump_dir));
  if (br.terminated_early) {
    std::cerr << "branch: terminated early: " << br.termination_reason << '\n';
    return 3;
  }
  return 0;
}

ScalarWave pde_init(const std::string& spec, int ns) {
  if (spec.rfind("constant:", 0) == 0) {
    const auto vals = parse_list(spec.substr(9));
    if (vals.empty() || vals.size() > 2) throw ConfigError("evolve: constant:RE[,IM]");
    return ScalarWave::constant(ns, cplx(vals[0], vals.size() > 1 ? vals[1] : 0.0));
  }
  if (spec.rfind("file:", 0) == 0) {
    std::ifstream f(spec.substr(5));
    if (!f) throw ConfigError("evolve: cannot open " + spec.substr(5));
    ScalarWave w;
    std::string line;
    std::getline(f, line);  // header "s,re,im"
    std::vector<cplx> vals;
    while (std::getline(f, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::stringstream ss(line);
      std::string s0, s1, s2;
      std::getline(ss, s0, ',');
      std::getline(ss, s1, ',');
      std::getline(ss, s2, ',');
      vals.emplace_back(std::strtod(s1.c_str(), nullptr), std::strtod(s2.c_str(), nullptr));
    }
    w.Ns = static_cast<int>(vals.size());
    w.w = std::move(vals);
    w.check();
    return w;
  }
  throw ConfigError("evolve: unknown --init " + spec);
}

FilamentState filament_init(const std::string& spec, int ns) {
  if (spec.rfind("homographic:poly,", 0) == 0) {
    const auto vals = parse_list(spec.substr(17));
    if (vals.size() != 2) throw ConfigError("evolve: homographic:poly,N,KAPPA");
    CentralConfig cfg = polygon_config(static_cast<int>(vals[0]), vals[1]);
    return homographic_state(cfg, ScalarWave::constant(ns, cplx(1.0, 0.0)));
  }
  throw ConfigError("evolve: unknown --init " + spec + " (expect homographic:poly,N,KAPPA)");
}

int run_evolve(bool pde, bool filaments, const std::string& init, double dt, double horizon,
               int ns, int save_every, const std::string& out_path,
               const std::string& inv_path) {
  if (pde == filaments) throw ConfigError("evolve: exactly one of --pde/--filaments");
  std::ostream* os = nullptr;
  auto hold = open_output(out_path, os);
  std::unique_ptr<std::ofstream> inv;
  if (!inv_path.empty()) {
    inv = std::make_unique<std::ofstream>(inv_path);
    if (!*inv) throw ConfigError("evolve: cannot open " + inv_path);
  }
  const int steps = std::max(1, static_cast<int>(std::llround(horizon / dt)));
  const double dt_eff = horizon / steps;
  *os << "# dt=" << format_g17(dt_eff) << " T=" << format_g17(horizon) << " steps=" << steps
      << " init=" << init << "\n";
  *os << "filament,t,s,re,im\n";

  if (pde) {
    ScalarWave w = pde_init(init, ns);
    if (inv) *inv << "t,mass,energy\n";
    auto dump = [&](const ScalarWave& sw) {
      for (int n = 0; n < sw.Ns; ++n)
        *os << 0 << ',' << format_g17(sw.time) << ',' << format_g17(two_pi * n / sw.Ns) << ','
            << format_g17(sw.w[n].real()) << ',' << format_g17(sw.w[n].imag()) << '\n';
    };
    auto invline = [&](const ScalarWave& sw) {
      if (inv)
        *inv << format_g17(sw.time) << ',' << format_g17(mass(sw)) << ','
             << format_g17(energy(sw)) << '\n';
    };
    dump(w);
    invline(w);
    for (int s = 1; s <= steps; ++s) {
      w = step_pde(w, dt_eff);
      if (save_every > 0 && s % save_every == 0 && s != steps) {
        dump(w);
        invline(w);
      }
    }
    dump(w);
    invline(w);
    return 0;
  }

  FilamentState st = filament_init(init, ns);
  if (inv) *inv << "t,center_re,center_im,impulse\n";
  auto dump = [&](const FilamentState& fs) {
    for (size_t j = 0; j < fs.curves.size(); ++j)
      for (int n = 0; n < fs.Ns(); ++n)
        *os << j << ',' << format_g17(fs.time) << ',' << format_g17(two_pi * n / fs.Ns()) << ','
            << format_g17(fs.curves[j][n].real()) << ',' << format_g17(fs.curves[j][n].imag())
            << '\n';
  };
  auto invline = [&](const FilamentState& fs) {
    if (inv) {
      const FilamentInvariants fi = filament_invariants(fs);
      *inv << format_g17(fs.time) << ',' << format_g17(fi.center.real()) << ','
           << format_g17(fi.center.imag()) << ',' << format_g17(fi.impulse) << '\n';
    }
  };
  dump(st);
  invline(st);
  for (int s = 1; s <= steps; ++s) {
    st = step_filaments(st, dt_eff);
    if (save_every > 0 && s % save_every == 0 && s != steps) {
      dump(st);
      invline(st);
    }
  }
  dump(st);
  invline(st);
  return 0;
}

int run_reconstruct(const std::string& branch_path, int point, const std::string& config_path,
                    double t, int samples, const std::string& out_path) {
  std::ifstream bf(branch_path);
  if (!bf) throw ConfigError("reconstruct: cannot open " + branch_path);
  const BranchFile branch = read_branch_jsonl(bf);
  if (point < 0 || point >= static_cast<int>(branch.points.size()))
    throw ConfigError("reconstruct: point index out of range (have " +
                      std::to_string(branch.points.size()) + " points)");
  std::ifstream cf(config_path);
  if (!cf) throw ConfigError("reconstruct: cannot open " + config_path);
  const CentralConfig cfg = config_from_json(json::parse(cf));

  const BranchRecord& rec = branch.points[point];
  const int q = branch.settings.at("q").get<int>();
  SymmetricField v;
  if (rec.b == 0.0 || rec.fields_path.empty()) {
    if (rec.b != 0.0)
      throw ConfigError("reconstruct: branch has no field dumps (rerun with --dump-fields)");
    const auto trunc = branch.settings.at("trunc");
    v = SymmetricField::zero(Grid2D::make(trunc.at(0).get<int>(), trunc.at(1).get<int>()));
  } else {
    std::ifstream ff(rec.fields_path);
    if (!ff) throw ConfigError("reconstruct: cannot open " + rec.fields_path);
    v = restrict_symmetric(read_coeff_csv(ff));
  }

  std::ostream* os = nullptr;
  auto hold = open_output(out_path, os);
  *os << "# b=" << format_g17(rec.b) << " omega=" << format_g17(rec.omega) << " q=" << q
      << " t=" << format_g17(t) << "\n";
  *os << "filament,t,s,re,im\n";
  const auto curves = reconstruct(v, rec.omega, q, cfg, t, samples);
  for (size_t j = 0; j < curves.size(); ++j)
    for (int m = 0; m < samples; ++m)
      *os << j << ',' << format_g17(t) << ',' << format_g17(two_pi * m / samples) << ','
          << format_g17(curves[j][m].real()) << ',' << format_g17(curves[j][m].imag()) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"standing waves of the n+1 vortex filament model"};
  app.require_subcommand(1);

  // cc
  auto* cc = app.add_subcommand("cc", "central configurations");
  int cc_n = 3;
  double cc_kappa = 2.0, cc_tol = 1e-11;
  std::string cc_nested, cc_offsets, cc_out;
  cc->add_option("--n", cc_n, "number of unit-circulation filaments")->required();
  cc->add_option("--kappa", cc_kappa, "central circulation magnitude")->required();
  cc->add_option("--nested", cc_nested, "ring radii r1,r2,... (Newton from a nested seed)");
  cc->add_option("--offsets", cc_offsets, "ring angle offsets o1,o2,...");
  cc->add_option("--tol", cc_tol, "convergence tolerance");
  cc->add_option("--out", cc_out, "output file (default stdout)");

  // spectrum
  auto* sp = app.add_subcommand("spectrum", "multiplier spectrum and resonances");
  int sp_q = 1;
  std::optional<int> sp_k0;
  std::optional<double> sp_omega;
  std::string sp_scan = "200,50", sp_out;
  double sp_eps = 0.02;
  sp->add_option("--q", sp_q, "temporal period ratio")->required();
  sp->add_option("--k0", sp_k0, "bifurcation spatial mode");
  sp->add_option("--omega", sp_omega, "frequency (scan at arbitrary omega)");
  sp->add_option("--scan", sp_scan, "scan bounds J,K");
  sp->add_option("--eps", sp_eps, "gap margin epsilon");
  sp->add_option("--out", sp_out, "output file (default stdout)");

  // branch
  auto* br = app.add_subcommand("branch", "standing-wave branch continuation");
  int br_q = 2, br_k0 = 1, br_maxit = 25;
  double br_db = 5e-4, br_bmax = 2e-2, br_tol = 1e-11;
  std::string br_trunc = "32,32", br_dump, br_out;
  br->add_option("--q", br_q, "temporal period ratio")->required();
  br->add_option("--k0", br_k0, "bifurcation spatial mode")->required();
  br->add_option("--db", br_db, "amplitude step");
  br->add_option("--bmax", br_bmax, "final amplitude");
  br->add_option("--trunc", br_trunc, "truncation J,K");
  br->add_option("--tol", br_tol, "Newton tolerance");
  br->add_option("--max-iter", br_maxit, "Newton iteration cap");
  br->add_option("--dump-fields", br_dump, "directory for per-point coefficient CSVs");
  br->add_option("--out", br_out, "output file (default stdout)");

  // evolve
  auto* ev = app.add_subcommand("evolve", "time integration");
  bool ev_pde = false, ev_fil = false;
  std::string ev_init, ev_out, ev_inv;
  double ev_dt = 1e-4, ev_T = 1.0;
  int ev_ns = 128, ev_save = 0;
  ev->add_flag("--pde", ev_pde, "reduced scalar equation");
  ev->add_flag("--filaments", ev_fil, "full filament system");
  ev->add_option("--init", ev_init, "constant:RE[,IM] | file:PATH | homographic:poly,N,KAPPA")
      ->required();
  ev->add_option("--dt", ev_dt, "time step");
  ev->add_option("--T", ev_T, "horizon");
  ev->add_option("--ns", ev_ns, "spatial samples");
  ev->add_option("--save-every", ev_save, "dump state every N steps (0: endpoints only)");
  ev->add_option("--out", ev_out, "state CSV (default stdout)");
  ev->add_option("--invariants", ev_inv, "invariant time-series CSV");

  // reconstruct
  auto* rc = app.add_subcommand("reconstruct", "homographic filament curves");
  std::string rc_branch, rc_config, rc_out;
  int rc_point = 0, rc_samples = 128;
  double rc_t = 0.0;
  rc->add_option("--branch", rc_branch, "branch JSONL file")->required();
  rc->add_option("--point", rc_point, "branch point index")->required();
  rc->add_option("--config", rc_config, "central configuration JSON")->required();
  rc->add_option("--t", rc_t, "time");
  rc->add_option("--samples", rc_samples, "s samples");
  rc->add_option("--out", rc_out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (cc->parsed()) return run_cc(cc_n, cc_kappa, cc_nested, cc_offsets, cc_tol, cc_out);
    if (sp->parsed()) {
      const auto jk = parse_list(sp_scan);
      if (jk.size() != 2) throw ConfigError("spectrum: --scan expects J,K");
      return run_spectrum(sp_q, sp_k0, sp_omega, static_cast<int>(jk[0]),
                          static_cast<int>(jk[1]), sp_eps, sp_out);
    }
    if (br->parsed())
      return run_branch(br_q, br_k0, br_db, br_bmax, br_trunc, br_tol, br_maxit, br_dump,
                        br_out);
    if (ev->parsed())
      return run_evolve(ev_pde, ev_fil, ev_init, ev_dt, ev_T, ev_ns, ev_save, ev_out, ev_inv);
    if (rc->parsed())
      return run_reconstruct(rc_branch, rc_point, rc_config, rc_t, rc_samples, rc_out);
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return 2;
  } catch (const DegenerateError& e) {
    std::cerr << "degenerate: " << e.what() << '\n';
    return 2;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition: " << e.what() << '\n';
    return 2;
  } catch (const SymmetryError& e) {
    std::cerr << "symmetry violation: " << e.what() << '\n';
    return 2;
  } catch (const DivergenceError& e) {
    std::cerr << "no convergence: " << e.what() << '\n';
    return 3;
  } catch (const DomainError& e) {
    std::cerr << "domain: " << e.what() << '\n';
    return 3;
  } catch (const CollisionError& e) {
    std::cerr << "collision: " << e.what() << '\n';
    return 3;
  } catch (const SingularityError& e) {
    std::cerr << "singularity: " << e.what() << '\n';
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "usage: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 1;
}
