#pragma once

#include <complex>
#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "heatlab/grid.hpp"

namespace heatlab {

// DFT with the continuum normalization f_hat(xi) = int f e^{-2 pi i <xi,x>}:
// bin n (per axis, n in [-N/2, N/2)) holds h^d (-1)^{sum n} FFT_n, i.e. the
// Riemann sum for f_hat(n / 2L) over the box [-L, L)^d.
struct Spectrum {
  GridSpec grid;
  int ell = 1;
  std::vector<std::complex<double>> data;  // component-major, FFT bin order

  std::complex<double> at(int c, std::size_t bin) const { return data[c * grid.size() + bin]; }
};

Spectrum dft(const Field& f);
Field idft(const Spectrum& s);

// Per-axis integer frequency of an FFT bin index (0..N-1) -> n in [-N/2, N/2).
inline std::int64_t bin_freq(std::int64_t k, int N) { return k < N / 2 ? k : k - N; }

// |xi|^2 of a flat FFT bin, xi = n / (2L).
double bin_xi2(const GridSpec& g, std::size_t bin);

// Applies a real radial Fourier multiplier m(|xi|) in place of each component.
Field apply_radial_multiplier(const Field& f, const std::function<double(double)>& m);

struct RieszResult {
  Field field;
  bool dc_truncated = false;  // input was not mean-zero; DC bin was dropped
};

// I_alpha: multiplier |xi|^{-alpha}, DC bin zeroed. 0 < alpha < d.
RieszResult riesz_potential(const Field& f, double alpha);

// Littlewood-Paley profile: psi_hat = 1 on [0, r0], C^inf taper on (r0, r1),
// 0 beyond; band k multiplier is psi_hat(|xi|/A^k) - psi_hat(|xi|/A^{k-1}).
struct BandFilter {
  double A = 3.0;
  double r0 = 1.0;
  double r1 = 2.0;

  double psi_hat(double r) const;
  double band_multiplier(int k, double abs_xi) const {
    return psi_hat(abs_xi / std::pow(A, k)) - psi_hat(abs_xi / std::pow(A, k - 1));
  }
  // Band k is resolvable when its support fits under the grid Nyquist.
  bool resolvable(const GridSpec& g, int k) const {
    return std::pow(A, k) * r1 <= g.N / (4.0 * g.L) * (1.0 + 1e-12);
  }
};

Field besov_band(const Field& f, int k, const BandFilter& filter);

// Largest resolvable band index, and the smallest index below which band
// multipliers vanish on every nonzero grid frequency.
int max_resolvable_band(const GridSpec& g, const BandFilter& filter);
int min_active_band(const GridSpec& g, const BandFilter& filter);

// Omega: S^{d-1} -> G(ell, k), sampled; basis columns span Omega(zeta).
struct SymbolMap {
  std::string name;
  int d = 1, ell = 1, k = 1;
  // writes an ell x k column-major basis matrix for Omega(zeta)
  std::function<void(const Vec3& zeta, double* basis)> basis;
};

SymbolMap gradient_symbol(int d);              // ell = d, Omega(zeta) = span(zeta)
SymbolMap divfree_symbol();                    // d = ell = 2, Omega(zeta) = zeta-perp
SymbolMap identity_symbol(int d, int ell);     // Omega(zeta) = R^ell
SymbolMap load_symbol_csv(const std::filesystem::path& path, int d, int ell, int k);

// Deterministic quasi-uniform sphere sample: {+-1} (d=1), equispaced angles
// (d=2), Fibonacci lattice (d=3).
std::vector<Vec3> sphere_samples(int d, int M);

struct CancelResult {
  double defect = 0.0;      // smallest singular value of the projection stack
  double stack_norm = 0.0;  // largest singular value
  int samples = 0;
  bool canceling = false;   // defect > 1e-8 * stack_norm
  std::vector<double> witness;  // unit kernel vector when not canceling
};

CancelResult cancellation_defect(const SymbolMap& omega, int M);

}  // namespace heatlab
