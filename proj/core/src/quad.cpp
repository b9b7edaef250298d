#include "heatlab/quad.hpp"

#include <algorithm>
#include <cmath>

namespace heatlab {

namespace {

// Abscissae/weights for 16-point Gauss-Legendre on [-1, 1] (positive half).
constexpr double kGlX[8] = {
    0.09501250983763744018531933542496, 0.28160355077925891323046050146050,
    0.45801677765722738634241944298358, 0.61787624440264374844667176404879,
    0.75540440835500303389510119484744, 0.86563120238783174388046789771239,
    0.94457502307323257607798841553461, 0.98940093499164993259615417345033};
constexpr double kGlW[8] = {
    0.18945061045506849628539672320828, 0.18260341504492358886676366796922,
    0.16915651939500253818931207903036, 0.14959598881657673208150173054748,
    0.12462897125553387205247628219202, 0.09515851168249278480992510760225,
    0.06225352393864789286284383699438, 0.02715245941175409485178057245602};

double adapt(const std::function<double(double)>& f, double a, double b, double whole,
             double tol, int depth) {
  double m = 0.5 * (a + b);
  double left = gl16(f, a, m), right = gl16(f, m, b);
  double both = left + right;
  // the roundoff floor keeps panels whose requested tolerance is below what
  // double arithmetic can resolve from subdividing all the way to the cap
  double floor = 4e-16 * (std::abs(left) + std::abs(right));
  if (depth > 24 || std::abs(both - whole) <= std::max(tol, floor)) return both;
  return adapt(f, a, m, left, 0.5 * tol, depth + 1) +
         adapt(f, m, b, right, 0.5 * tol, depth + 1);
}

}  // namespace

double gl16(const std::function<double(double)>& f, double a, double b) {
  double c = 0.5 * (a + b), hw = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 8; ++i)
    s += kGlW[i] * (f(c - hw * kGlX[i]) + f(c + hw * kGlX[i]));
  return s * hw;
}

void gl16_points(double a, double b, double* x, double* w) {
  double c = 0.5 * (a + b), hw = 0.5 * (b - a);
  for (int i = 0; i < 8; ++i) {
    x[2 * i] = c - hw * kGlX[i];
    x[2 * i + 1] = c + hw * kGlX[i];
    w[2 * i] = w[2 * i + 1] = hw * kGlW[i];
  }
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol, double abs_floor) {
  if (a == b) return 0.0;
  double rough = std::abs(gl16(f, a, b));
  double tol = std::max(rough * rel_tol, abs_floor);
  return adapt(f, a, b, gl16(f, a, b), tol, 0);
}

double integrate_panels(const std::function<double(double)>& f,
                        const std::vector<double>& breaks, double rel_tol) {
  require(breaks.size() >= 2, "integrate_panels: need at least two breakpoints");
  double rough = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
    rough += std::abs(gl16(f, breaks[i], breaks[i + 1]));
  double tol = std::max(rough * rel_tol, 1e-300);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    double a = breaks[i], b = breaks[i + 1];
    total += adapt(f, a, b, gl16(f, a, b), tol * (b - a) / (breaks.back() - breaks.front()), 0);
  }
  return total;
}

double bessel_i0e(double z) {
  require(z >= 0.0, "bessel_i0e: argument must be >= 0");
  if (z <= 30.0) {
    // power series of I_0 (all terms positive), then scale by e^{-z}
    double q = 0.25 * z * z;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 200; ++k) {
      term *= q / (static_cast<double>(k) * k);
      sum += term;
      if (term < sum * 1e-18) break;
    }
    return std::exp(-z) * sum;
  }
  // asymptotic series: I0e(z) ~ (2 pi z)^{-1/2} sum_k prod (2j-1)^2 / (k! (8z)^k)
  double sum = 1.0, term = 1.0;
  for (int k = 1; k < 24; ++k) {
    double next = term * sqr(2.0 * k - 1.0) / (8.0 * k * z);
    if (next >= term) break;  // divergent tail reached
    term = next;
    sum += term;
    if (term < 1e-18) break;
  }
  return sum / std::sqrt(2.0 * M_PI * z);
}

namespace {

double sphere_area(int d) {
  switch (d) {
    case 1: return 2.0;               // S^0: two points
    case 2: return 2.0 * M_PI;        // S^1
    default: return 4.0 * M_PI;       // S^2
  }
}

double envelope_radial(int d, double theta, double t, int sign) {
  double st = std::sqrt(t);
  // integrand (1+r)^{sign*theta} r^{d-1} e^{-r^2/4t}
  auto f = [&](double r) {
    double base = sign > 0 ? std::pow(1.0 + r, theta) : poly_decay(r, theta);
    double rpow = d == 1 ? 1.0 : (d == 2 ? r : r * r);
    return base * rpow * std::exp(-r * r / (4.0 * t));
  };
  double rmax = st * 30.0 + (sign > 0 ? theta * 4.0 * t : 0.0) + 1.0;
  std::vector<double> breaks{0.0};
  for (double r = std::min(st, 0.5); r < rmax; r *= 2.0) breaks.push_back(r);
  breaks.push_back(rmax);
  double i = integrate_panels(f, breaks, 1e-13);
  return std::pow(4.0 * M_PI * t, -0.5 * d) * sphere_area(d) * i;
}

}  // namespace

double envelope_minus(int d, double theta, double t) {
  return envelope_radial(d, theta, t, -1);
}

double envelope_plus(int d, double theta, double t) {
  return envelope_radial(d, theta, t, +1);
}

double RadialHeatProfile::direct(double b) const {
  const int d = d_;
  const double s = s_, theta = theta_;
  const double sst = std::sqrt(s);
  // angular factor with the e^{-rb/2s} Gaussian cross term folded in:
  //   d=1: 1 + e^{-2z};  d=2: 2 pi I0e(z);  d=3: 4 pi (1 - e^{-2z}) / (2z)
  auto ang = [&](double z) {
    switch (d) {
      case 1: return 1.0 + std::exp(-2.0 * z);
      case 2: return 2.0 * M_PI * bessel_i0e(z);
      default: return z < 1e-8 ? 4.0 * M_PI * (1.0 - z) : 4.0 * M_PI * (1.0 - std::exp(-2.0 * z)) / (2.0 * z);
    }
  };
  auto f = [&](double r) {
    double z = r * b / (2.0 * s);
    double rpow = d == 1 ? 1.0 : (d == 2 ? r : r * r);
    return poly_decay(r, theta) * rpow * std::exp(-sqr(r - b) / (4.0 * s)) * ang(z);
  };
  double rmax = b + 16.0 * sst + 1.0;
  std::vector<double> breaks{0.0};
  for (double r = std::min(1.0 / theta, sst); r < rmax; r *= 2.0) breaks.push_back(r);
  for (int g = -12; g <= 12; ++g) {
    double r = b + g * sst;
    if (r > 0.0 && r < rmax) breaks.push_back(r);
  }
  breaks.push_back(rmax);
  std::sort(breaks.begin(), breaks.end());
  // 3e-12 matches the ~1e-11 interpolation error of the tabulated profile
  double i = integrate_panels(f, breaks, 3e-12);
  return std::pow(4.0 * M_PI * s, -0.5 * d) * i;
}

RadialHeatProfile RadialHeatProfile::build(int d, double theta, double s, double rmax) {
  require(d >= 1 && d <= 3, "RadialHeatProfile: d must be 1..3");
  require(theta > d, "RadialHeatProfile: need theta > d");
  require(s > 0.0, "RadialHeatProfile: need s > 0");
  RadialHeatProfile p;
  p.d_ = d;
  p.theta_ = theta;
  p.s_ = s;
  p.rmax_ = rmax;
  p.ctilde_ = envelope_minus(d, theta, s);
  p.Ctilde_ = envelope_plus(d, theta, s);
  double sst = std::sqrt(s);
  const double eta = 0.02;  // nodes per local scale; 6-pt interp => ~1e-11
  double b = 0.0;
  while (true) {
    p.b_.push_back(b);
    p.v_.push_back(p.direct(b));
    if (b >= rmax) break;
    double scale = std::max(sst, (1.0 + b) / theta);
    b += eta * scale;
    if (b > rmax) b = rmax;
  }
  return p;
}

double RadialHeatProfile::eval(double b) const {
  require(b >= 0.0 && b <= rmax_ * (1.0 + 1e-12),
          "RadialHeatProfile: evaluation outside tabulated radius");
  const auto& xs = b_;
  std::size_t n = xs.size();
  if (n < 6) return direct(b);
  auto it = std::upper_bound(xs.begin(), xs.end(), b);
  std::size_t hi = static_cast<std::size_t>(it - xs.begin());
  std::size_t lo = hi >= 3 ? hi - 3 : 0;
  if (lo + 6 > n) lo = n - 6;
  // 6-point Lagrange interpolation on the graded mesh
  double out = 0.0;
  for (std::size_t i = lo; i < lo + 6; ++i) {
    double li = 1.0;
    for (std::size_t j = lo; j < lo + 6; ++j)
      if (j != i) li *= (b - xs[j]) / (xs[i] - xs[j]);
    out += li * v_[i];
  }
  return out;
}

}  // namespace heatlab
