#pragma once
// Branch serialization: JSON-lines with a settings header object, one object
// per branch point, and a closing report object. Coefficient dumps use the
// coefficient CSV layout and round-trip bit-exactly.

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "vfil/continuation.hpp"
#include "vfil/field_io.hpp"

namespace vfil {

inline nlohmann::json settings_json(const Branch& br) {
  return {{"q", br.bif.q},
          {"k0", br.bif.k0},
          {"j0", br.bif.j0},
          {"omega0", br.bif.omega0},
          {"db", br.settings.db},
          {"b_max", br.settings.b_max},
          {"tol", br.settings.tol},
          {"max_iter", br.settings.max_iter},
          {"trunc", {br.settings.J, br.settings.K}},
          {"padding", br.settings.padding}};
}

inline nlohmann::json point_json(const BranchPoint& p) {
  return {{"b", p.b},
          {"omega", p.omega},
          {"residual", p.residual_norm},
          {"residual_full", p.residual_full_norm},
          {"iters", p.newton_iters}};
}

/// Write the branch as JSON lines; when dump_dir is set, each point's
/// embedded coefficients go to dump_dir/point_NNNN.csv and the line records
/// the path.
inline void write_branch_jsonl(const Branch& br, std::ostream& os,
                               const std::optional<std::string>& dump_dir = std::nullopt) {
  os << nlohmann::json{{"settings", settings_json(br)}}.dump() << '\n';
  for (size_t i = 0; i < br.points.size(); ++i) {
    nlohmann::json line = point_json(br.points[i]);
    if (dump_dir) {
      std::filesystem::create_directories(*dump_dir);
      char name[32];
      std::snprintf(name, sizeof name, "point_%04zu.csv", i);
      const std::string path = *dump_dir + "/" + name;
      std::ofstream f(path);
      f << "# b=" << format_g17(br.points[i].b) << " omega=" << format_g17(br.points[i].omega)
        << " q=" << br.bif.q << " k0=" << br.bif.k0 << "\n";
      write_coeff_csv(embed(br.points[i].v), f);
      line["fields"] = path;
    }
    os << line.dump() << '\n';
  }
  nlohmann::json rep;
  rep["terminated_early"] = br.terminated_early;
  if (br.terminated_early) rep["reason"] = br.termination_reason;
  if (br.points.size() >= 6) {
    try {
      const AsymptoticsReport ar = verify_asymptotics(br);
      rep["slope_omega"] = ar.slope_omega;
      rep["slope_v"] = ar.slope_v;
      rep["c_omega"] = ar.c_omega;
      rep["curvature_sign"] = ar.curvature_sign;
      rep["points_used"] = ar.points_used;
      rep["below_floor"] = ar.below_floor;
    } catch (const ConfigError&) {
      // too few points inside the fit window: report only the march outcome
    }
  }
  os << nlohmann::json{{"report", rep}}.dump() << '\n';
}

struct BranchRecord {
  double b = 0.0;
  double omega = 0.0;
  double residual = 0.0;
  int iters = 0;
  std::string fields_path;  // empty when not dumped
};

struct BranchFile {
  nlohmann::json settings;
  std::vector<BranchRecord> points;
  nlohmann::json report;
};

inline BranchFile read_branch_jsonl(std::istream& is) {
  BranchFile bf;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    if (j.contains("settings")) {
      bf.settings = j["settings"];
    } else if (j.contains("report")) {
      bf.report = j["report"];
    } else if (j.contains("b")) {
      BranchRecord r;
      r.b = j.at("b").get<double>();
      r.omega = j.at("omega").get<double>();
      r.residual = j.value("residual", 0.0);
      r.iters = j.value("iters", 0);
      r.fields_path = j.value("fields", std::string{});
      bf.points.push_back(std::move(r));
    }
  }
  return bf;
}

}  // namespace vfil
