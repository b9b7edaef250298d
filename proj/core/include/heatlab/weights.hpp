#pragma once

#include <memory>

#include "heatlab/grid.hpp"
#include "heatlab/quad.hpp"

namespace heatlab {

// Parameters of the scale-ladder / atom calculus, with the consistency
// constraints enforced at construction.
struct ProofParameters {
  int A = 3;          // odd, >= 3
  double p = 2.0;     // in (1, 2]
  double eps = 0.01;  // flat/convex threshold
  int K = 5;          // ladder depth
  double theta1, theta2, theta3, theta4, theta5;
  int Ksat = 2;
  double lambda_override = 0.0;  // 0 = use the formula

  static ProofParameters defaults(int d, int A = 3, double p = 2.0, int K = 5);
  void validate(int d) const;

  double alpha(int d) const { return d * (p - 1.0) / p; }
  double lambda() const {
    if (lambda_override > 0.0) return lambda_override;
    return std::min(2.0, 0.5 * (1.0 + std::pow(4.0 / 3.0, theta4 / 2.0)));
  }
};

// Evaluator for the lattice-normalized weight
//   w(x) = (1+|x|)^{-theta1} / D(x),  D(x) = sum_{j in Z^d} (1+|x-j|)^{-theta1}.
// The denominator sum is truncated at an offset window |o|_inf <= R0 around
// the nearest lattice point plus a constant far-tail estimate; rel_tol bounds
// the combined truncation error (certified from the integral test).
class LatticeWeightEval {
 public:
  LatticeWeightEval(int d, double theta1, double rel_tol = 1e-10);

  double denom(const Vec3& x) const;
  double eval(const Vec3& x) const;
  // Full partition sum over the certified numerator window around x:
  // deviates from 1 by at most rel_tol (plus roundoff).
  double partition_sum(const Vec3& x) const;

  double cw() const { return cw_; }  // certified: cw (1+|x|)^{-theta1} <= w
  double Cw() const { return Cw_; }  // certified: w <= Cw (1+|x|)^{-theta1}
  int denom_window() const { return R0_; }
  int partition_window() const { return R1_; }
  double rel_tol() const { return rel_tol_; }

 private:
  int d_;
  double theta_;
  double rel_tol_;
  int R0_ = 0, R1_ = 0;
  double tail_const_ = 0.0;
  double cw_ = 0.0, Cw_ = 0.0;
};

struct ParametricWeight {
  enum class Form { Flat, PolyDecay, LatticeNormalized, Heated, Rho };

  Form form = Form::PolyDecay;
  int d = 1;
  double theta = 2.0;  // PolyDecay exponent / Rho theta_G / Lattice theta1
  Vec3 center{0, 0, 0};
  double t = 0.0;  // Heated only
  std::shared_ptr<const ParametricWeight> base;  // Heated only

  static ParametricWeight flat(int d);
  static ParametricWeight poly_decay(int d, double theta, const Vec3& center = {0, 0, 0});
  static ParametricWeight lattice_normalized(int d, double theta1);
  static ParametricWeight rho(int d, double theta_G);
  static ParametricWeight heated(ParametricWeight base, double t);

  // Exponent theta_G of the certified two-sided polynomial bounds
  //   c_G (1+|x-c|)^{-theta_G} <= w <= C_G (1+|x-c|)^{-theta_G}.
  double decay_theta() const;
  double lower_const() const;  // c_G
  double upper_const() const;  // C_G
  Vec3 decay_center() const;
  // Accumulated heating time along Heated wrappers.
  double heat_time() const { return form == Form::Heated ? t + base->heat_time() : 0.0; }
  const ParametricWeight& root() const { return form == Form::Heated ? base->root() : *this; }
};

// Pointwise evaluation (slow path for Heated forms: panel quadrature).
double eval_weight(const ParametricWeight& w, const Vec3& x);

// w_{k,j}(x) = w(A^k x - j) for the lattice-normalized weight.
double atom_weight(const LatticeWeightEval& w, int A, int k, const Idx3& j, const Vec3& x);

struct SmoothnessEstimate {
  double lower = 1.0;  // max over the deterministic probe set
  double upper = 1.0;  // analytic bound
  bool exact = false;  // lower == upper == exact value
};

// s[w](zeta) = sup_{|x-y| <= zeta} w(x)/w(y).
SmoothnessEstimate smoothness_function(const ParametricWeight& w, double zeta, int nprobe = 64);

// Shared cache of radial heated-weight profiles, keyed by (d, theta, s).
const RadialHeatProfile& heated_profile(int d, double theta, double s, double rmax);

// Shared cache of lattice-weight evaluators (construction probes the unit
// cell and is not cheap).
const LatticeWeightEval& shared_lattice_weight(int d, double theta1, double rel_tol = 1e-10);

}  // namespace heatlab
