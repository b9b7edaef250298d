#pragma once

#include <filesystem>
#include <optional>

#include "heatlab/grid.hpp"
#include "heatlab/weights.hpp"

namespace heatlab {

// Heat extension of a sampled field at time t (spectral backend; exact for
// the trigonometric interpolant on the torus).
Field heat_extend(const Field& f, double t);

// Direct real-space backend: separable convolution with the periodized
// Gaussian kernel. Slow; kept as an independent cross-check of the spectral
// path.
Field heat_extend_direct(const Field& f, double t);

// Free-space heat extension of an atomic measure, sampled on a grid.
Field heat_extend(const PointMeasure& mu, double t, const GridSpec& g);

// Pointwise free-space heat extension of an atomic measure.
double heat_point(const PointMeasure& mu, double t, const Vec3& x);

// Heat extension of the dipole distribution a . grad(mu).
Field heat_extend(const VectorPointCharge& q, double t, const GridSpec& g);
double heat_point(const VectorPointCharge& q, double t, const Vec3& x);

struct HeatLadder {
  int A = 3;
  int K = 0;
  std::vector<Field> levels;  // levels[k] = Heat[f](., A^{-2k}), k = 0..K

  const Field& level(int k) const { return levels.at(static_cast<std::size_t>(k)); }
  const GridSpec& grid() const { return levels.front().grid; }
};

// f_k = Heat[f](., A^{-2k}) for k = 0..K. Requires the deepest scale to be
// resolved by the grid: either A^{-K} >= 2h, or the energy fraction of f
// above the corresponding frequency is below hf_tol.
HeatLadder build_ladder(const Field& f, int A, int K, double hf_tol = 1e-8);

// Fraction of spectral energy at |xi| > xi_cut.
double high_frequency_fraction(const Field& f, double xi_cut);

struct SemigroupDefect {
  double defect = 0.0;  // sup |Heat[Heat[f,t1],t2] - Heat[f,t1+t2]| / sup |f|
  bool zero_field = false;
};

SemigroupDefect semigroup_defect(const Field& f, double t1, double t2);

// A heated weight sampled on a grid, together with its certified envelope:
//   lo * (1+|x-c|)^{-theta} <= v(x) <= hi * (1+|x-c|)^{-theta}  at every node.
// Construction verifies the envelope sample-by-sample and throws
// assertion_error naming the worst node if it fails.
struct HeatedWeightSample {
  Field samples;
  double theta = 0.0;
  Vec3 center{0, 0, 0};
  double lo = 0.0, hi = 0.0;
  double t = 0.0;
};

HeatedWeightSample heat_weight(const ParametricWeight& w, double t, const GridSpec& g);

// Directory serialization: fk_<k>.bin plus a key=value manifest.
void save_ladder(const HeatLadder& ladder, const std::filesystem::path& dir);
HeatLadder load_ladder(const std::filesystem::path& dir);

}  // namespace heatlab
