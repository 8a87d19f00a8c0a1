#pragma once
// CSV serialization of fields.
//   coefficients: header "j,k,re_x,im_x,re_y,im_y", one row per mode
//   grid samples: header "t,s,x,y", m-major over the collocation grid
// Values are written with 17 significant digits, so doubles round-trip to
// the exact bit pattern.

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "vfil/spectral_field.hpp"

namespace vfil {

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_coeff_csv(const SpectralField& f, std::ostream& os) {
  os << "j,k,re_x,im_x,re_y,im_y\n";
  for (int j = -f.grid.J; j <= f.grid.J; ++j)
    for (int k = -f.grid.K; k <= f.grid.K; ++k) {
      const cplx& x = f.x(j, k);
      const cplx& y = f.y(j, k);
      os << j << ',' << k << ',' << format_g17(x.real()) << ',' << format_g17(x.imag())
         << ',' << format_g17(y.real()) << ',' << format_g17(y.imag()) << '\n';
    }
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(tok);
  return out;
}

}  // namespace detail

namespace detail {

/// First non-comment line ('#'-prefixed lines carry reproducibility notes).
inline bool getline_skip_comments(std::istream& is, std::string& line) {
  while (std::getline(is, line))
    if (!line.empty() && line[0] != '#') return true;
  return false;
}

}  // namespace detail

inline SpectralField read_coeff_csv(std::istream& is) {
  std::string line;
  if (!detail::getline_skip_comments(is, line) || line.rfind("j,k,", 0) != 0)
    throw ConfigError("coefficient CSV: missing header");
  struct Row {
    int j, k;
    cplx x, y;
  };
  std::vector<Row> rows;
  int J = 0, K = 0;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 6) throw ConfigError("coefficient CSV: bad row: " + line);
    Row r;
    r.j = std::atoi(f[0].c_str());
    r.k = std::atoi(f[1].c_str());
    r.x = cplx(std::strtod(f[2].c_str(), nullptr), std::strtod(f[3].c_str(), nullptr));
    r.y = cplx(std::strtod(f[4].c_str(), nullptr), std::strtod(f[5].c_str(), nullptr));
    J = std::max(J, std::abs(r.j));
    K = std::max(K, std::abs(r.k));
    rows.push_back(r);
  }
  SpectralField out = SpectralField::zero(Grid2D::make(J, K));
  for (const Row& r : rows) {
    out.x(r.j, r.k) = r.x;
    out.y(r.j, r.k) = r.y;
  }
  return out;
}

inline void write_grid_csv(const GridField& g, std::ostream& os) {
  os << "t,s,x,y\n";
  for (int m = 0; m < g.grid.Nt; ++m)
    for (int n = 0; n < g.grid.Ns; ++n)
      os << format_g17(g.grid.t(m)) << ',' << format_g17(g.grid.s(n)) << ','
         << format_g17(g.xv(m, n)) << ',' << format_g17(g.yv(m, n)) << '\n';
}

/// Grid samples alone do not determine the truncation; the reader assigns
/// the largest resolvable one, J = (Nt-2)/2 and K = (Ns-2)/2.
inline GridField read_grid_csv(std::istream& is) {
  std::string line;
  if (!detail::getline_skip_comments(is, line) || line.rfind("t,s,", 0) != 0)
    throw ConfigError("grid CSV: missing header");
  std::vector<double> xs, ys;
  std::vector<std::string> tcol;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 4) throw ConfigError("grid CSV: bad row: " + line);
    tcol.push_back(f[0]);
    xs.push_back(std::strtod(f[2].c_str(), nullptr));
    ys.push_back(std::strtod(f[3].c_str(), nullptr));
  }
  size_t ns = 0;
  while (ns < tcol.size() && tcol[ns] == tcol[0]) ++ns;
  if (ns == 0 || tcol.size() % ns != 0)
    throw ConfigError("grid CSV: rows do not form a full grid");
  const int Ns = static_cast<int>(ns);
  const int Nt = static_cast<int>(tcol.size() / ns);
  GridField g;
  g.grid = Grid2D::make((Nt - 2) / 2, (Ns - 2) / 2, Nt, Ns);
  g.x = std::move(xs);
  g.y = std::move(ys);
  return g;
}

}  // namespace vfil
