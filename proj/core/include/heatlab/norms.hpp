#pragma once

#include "heatlab/grid.hpp"
#include "heatlab/spectral.hpp"

namespace heatlab {

double lp_norm(const Field& f, double p);
double lp_norm_weighted(const Field& f, double p, const Field& w);
double sup_norm(const Field& f);

// One (|f(x)|, node measure) pair per grid node; the plain, region and
// weighted Lorentz paths all reduce to the same evaluation over these pairs,
// so restrictions agree bit-for-bit with the full norm where they overlap.
struct ValueMass {
  double value = 0.0;
  double mass = 0.0;
};

// Exact L_{p,q} of the simple function described by the pairs: sort the
// distinct values t_1 > ... > t_n with cumulative measures M_i and evaluate
//   ||f||^q = (p/q) sum_i M_i^{q/p} (t_i^q - t_{i+1}^q)      (q < inf)
//   ||f||   = sup_i t_i M_i^{1/p}                            (q = inf)
// with t_{n+1} = 0. No quadrature error beyond roundoff.
double lorentz_from_pairs(std::vector<ValueMass> pairs, double p, double q);

double lorentz_norm(const Field& f, double p, double q);
double lorentz_norm_region(const Field& f, double p, double q,
                           std::span<const std::uint8_t> mask);
double lorentz_norm_weighted(const Field& f, double p, double q, const Field& w);

// sum_R ||f 1_R||_{p,q} - ||f||_{p,q} over a partition of the nodes into
// regions (mask values 0..nregions-1). Nonnegative when L_{p,q} is a norm.
double lorentz_split_defect(const Field& f, double p, double q,
                            std::span<const std::uint8_t> region_of_node, int nregions);

struct BesovTerms {
  int kmin = 0, kmax = 0;
  std::vector<double> terms;  // ||band_k f||_{p,q}, k = kmin..kmax

  // sum_k A^{sigma k} terms[k]
  double weighted_sum(double A, double sigma) const;
};

// Per-band Lorentz norms over the resolvable band range of the grid.
BesovTerms besov_lorentz_terms(const Field& f, double p, double q, const BandFilter& filter);

}  // namespace heatlab
