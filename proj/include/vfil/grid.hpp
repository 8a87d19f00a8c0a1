#pragma once
// Discretization of the torus [0,2pi)^2: collocation sizes (Nt, Ns) and the
// spectral truncation (J, K). Modes (j,k) with |j| <= J, |k| <= K are
// resolvable when Nt >= 2J+1 and Ns >= 2K+1; sizes are kept even so the
// Nyquist bin is never occupied by a resolvable mode.

#include <complex>
#include <numbers>
#include <string>

#include "vfil/errors.hpp"

namespace vfil {

using cplx = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

struct Grid2D {
  int Nt = 0, Ns = 0;  // collocation points in t and s
  int J = 0, K = 0;    // maximal retained temporal / spatial mode

  static Grid2D make(int J, int K) {
    Grid2D g{std::max(2 * J + 2, 4), std::max(2 * K + 2, 4), J, K};
    g.validate();
    return g;
  }

  static Grid2D make(int J, int K, int Nt, int Ns) {
    Grid2D g{Nt, Ns, J, K};
    g.validate();
    return g;
  }

  void validate() const {
    if (J < 0 || K < 0)
      throw ConfigError("Grid2D: truncation (J,K) must be nonnegative");
    if (Nt < 4 || Ns < 4 || Nt % 2 != 0 || Ns % 2 != 0)
      throw ConfigError("Grid2D: Nt, Ns must be even and >= 4");
    if (Nt < 2 * J + 1 || Ns < 2 * K + 1)
      throw ConfigError("Grid2D: grid too small for truncation (need Nt >= 2J+1, Ns >= 2K+1), got Nt=" +
                        std::to_string(Nt) + " Ns=" + std::to_string(Ns) +
                        " J=" + std::to_string(J) + " K=" + std::to_string(K));
  }

  int modes_t() const { return 2 * J + 1; }
  int modes_s() const { return 2 * K + 1; }
  int n_modes() const { return modes_t() * modes_s(); }

  /// Dense index of mode (j,k), |j| <= J, |k| <= K.
  int mode_index(int j, int k) const { return (j + J) * modes_s() + (k + K); }

  double t(int m) const { return two_pi * m / Nt; }
  double s(int n) const { return two_pi * n / Ns; }

  bool operator==(const Grid2D&) const = default;
};

/// Smallest even n' >= n whose prime factors are in {2,3,5} (fast FFT sizes).
inline int next_fast_even(int n) {
  if (n < 4) return 4;
  for (int m = n + (n % 2);; m += 2) {
    int r = m;
    for (int p : {2, 3, 5})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

}  // namespace vfil
