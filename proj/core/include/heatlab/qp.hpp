#pragma once

#include "heatlab/heat.hpp"
#include "heatlab/weights.hpp"

namespace heatlab {

// Q_p[mu, G](t) = t^{d(p-1)/2} int u^p v dx with u = Heat[mu](., t) and
// v = Heat[G](., (1-t)/p). u is an exact Gaussian sum over the atoms; the
// spatial integral uses graded tensor Gauss-Legendre panels anchored at the
// atoms (Gaussian scale sqrt(2t)) and at the weight center.
double qp(const PointMeasure& mu, const ParametricWeight& G, double p, double t);

struct BctRhs {
  double value = 0.0;
  bool collapsed = false;  // multi-atom measure whose variance underflowed
};

// The derivative identity's right-hand side:
//   (p-1)/4 (4 pi)^{-dp/2} t^{-d/2-2} int D(Y_x) (mu_{x,t}(R^d))^p v dx,
// where mu_{x,t} has density e^{-|x-y|^2/4t} against mu and D is the variance
// of y under the normalized mu_{x,t}, computed exactly over the atoms.
BctRhs bct_rhs(const PointMeasure& mu, const ParametricWeight& G, double p, double t);

struct BctDefect {
  double defect = 0.0;  // |fd - rhs| / max(rhs, floor)
  double fd = 0.0;      // central difference of qp (step h_t)
  double rhs = 0.0;
};

BctDefect bct_identity_defect(const PointMeasure& mu, const ParametricWeight& G, double p,
                              double t, double h_t = 1e-4);

struct MonotonicityScan {
  std::vector<double> t, values;
  bool pass = false;
  double worst_slack = 0.0;  // most negative relative increment (0 when clean)
};

// Verdict: values nondecreasing within rel_slack, and every value at most
// the final (largest-t) value within the same slack.
MonotonicityScan monotonicity_scan(const PointMeasure& mu, const ParametricWeight& G, double p,
                                   const std::vector<double>& t_grid, double rel_slack = 1e-8);

struct ImprovedExponent {
  double worst_point = 0.0;  // largest delta with Q(t) <= t^{p delta} Q(1) on the grid
  double lsq_fit = 0.0;      // least-squares slope of log Q vs p log t
  std::vector<double> t, values;
};

ImprovedExponent improved_exponent(const PointMeasure& mu, const ParametricWeight& G, double p,
                                   const std::vector<double>& t_grid);

// Uniform atomic sample of a length-`length` segment along the first axis.
PointMeasure line_sample_measure(int d, double length, int npoints);

struct LatticeCell {
  Idx3 k{0, 0, 0};
  double mass = 0.0;
  bool kind = false;
  bool good = false;
};

struct ConcentrationDiagnostic {
  double conc1 = 0.0;  // int (int e^{-|x-y|^2/4} dmu)^p G dx
  double conc2 = 0.0;  // the variance functional of the same normalization
  std::vector<LatticeCell> cells;
  bool has_x0 = false;
  Vec3 x0{0, 0, 0};          // center of the best kind-and-good cell
  double conc3_lhs = 0.0;    // nu mu(B_nu(x0))
  double conc3_rhs = 0.0;    // int_{|x-x0|>=nu} rho(x-x0) dmu
  bool conc3_pass = false;
};

// Side-nu lattice diagnostics: cell masses a_k, kind points
// (nu^p a_k^p >= sum_{nu|k-m|>=R} rho(nu(k-m)) a_m^p with rho of exponent
// theta_G + 2d), tau-good points, and the concentration verdict at the best
// kind-and-good cell.
ConcentrationDiagnostic concentration_diagnostic(const PointMeasure& mu,
                                                 const ParametricWeight& G, double p, double nu,
                                                 double R, double tau);

struct FlatnessDefect {
  double gap = 0.0;  // ||g||_{L1(Heat[w])} - ||Heat[g]||_{L1(w)}
  double identity_defect = 0.0;  // |gap - int (Heat[|g|] - |Heat[g]|) w|
  double rank1_deviation = 0.0;  // L1 distance of g from a (x) (a.g), normalized
  double sign_deviation = 0.0;   // negative-part fraction of the scalar factor
  bool degenerate = false;       // g = 0
};

FlatnessDefect flatness_defect(const Field& g, const ParametricWeight& w, double t);

struct ContractionCheck {
  double lhs = 0.0;     // ||Heat[g](., t)||_{Lp(w)}
  double rhs = 0.0;     // ||g||_{Lp(Heat[w](., t))}
  double defect = 0.0;  // rhs - lhs (>= 0 up to roundoff)
};

ContractionCheck weighted_contraction(const Field& g, const Field& w, double p, double t);

}  // namespace heatlab
