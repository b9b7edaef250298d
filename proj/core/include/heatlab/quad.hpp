#pragma once

#include <functional>
#include <vector>

#include "heatlab/util.hpp"

namespace heatlab {

// 16-point Gauss-Legendre on [a, b].
double gl16(const std::function<double(double)>& f, double a, double b);

// Raw GL16 abscissae/weights on [a, b] (16 entries each); used to assemble
// tensor-product rules.
void gl16_points(double a, double b, double* x, double* w);

// Adaptive bisection with GL16 panels; rel_tol is relative to the running
// magnitude, abs_floor guards the all-zero case.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-12, double abs_floor = 1e-300);

// Same, with caller-supplied initial breakpoints (sorted, >= 2 entries).
double integrate_panels(const std::function<double(double)>& f,
                        const std::vector<double>& breaks, double rel_tol = 1e-12);

// exp(-z) * I_0(z), accurate to ~1e-15 relative for z >= 0.
double bessel_i0e(double z);

// Two-sided envelope factors for heating a polynomial-decay weight:
// for G with c_G (1+|x|)^{-theta} <= G <= C_G (1+|x|)^{-theta},
//   c_G * envelope_minus <= Heat[G](x, t) * (1+|x|)^{theta} <= C_G * envelope_plus.
double envelope_minus(int d, double theta, double t);
double envelope_plus(int d, double theta, double t);

// Radial profile of Heat[(1 + |y|)^{-theta}](x, s) as a function of b = |x|,
// tabulated on a scale-graded mesh with 6-point Lagrange interpolation
// (relative accuracy ~1e-11 against the direct panel integral).
class RadialHeatProfile {
 public:
  static RadialHeatProfile build(int d, double theta, double s, double rmax);

  double eval(double b) const;
  // Direct panel-integrated value (slow path; the table is built from this).
  double direct(double b) const;

  double ctilde() const { return ctilde_; }
  double Ctilde() const { return Ctilde_; }
  double rmax() const { return rmax_; }
  double s() const { return s_; }
  double theta() const { return theta_; }

 private:
  int d_ = 1;
  double theta_ = 0, s_ = 0, rmax_ = 0;
  double ctilde_ = 0, Ctilde_ = 0;
  std::vector<double> b_, v_;
};

}  // namespace heatlab
