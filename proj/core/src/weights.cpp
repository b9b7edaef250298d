#include "heatlab/weights.hpp"

#include <cstring>
#include <map>

namespace heatlab {

namespace {

double sphere_area(int d) { return d == 1 ? 2.0 : (d == 2 ? 2.0 * M_PI : 4.0 * M_PI); }

// Iterates o over the box |o_i| <= R (d <= 3) in a fixed order.
template <class F>
void for_window(int d, int R, F&& f) {
  Idx3 o{0, 0, 0};
  if (d == 1) {
    for (o[0] = -R; o[0] <= R; ++o[0]) f(o);
  } else if (d == 2) {
    for (o[0] = -R; o[0] <= R; ++o[0])
      for (o[1] = -R; o[1] <= R; ++o[1]) f(o);
  } else {
    for (o[0] = -R; o[0] <= R; ++o[0])
      for (o[1] = -R; o[1] <= R; ++o[1])
        for (o[2] = -R; o[2] <= R; ++o[2]) f(o);
  }
}

Vec3 frac_part(const Vec3& x, int d, Idx3* nearest = nullptr) {
  Vec3 z{0, 0, 0};
  for (int a = 0; a < d; ++a) {
    auto r = std::llround(x[a]);
    if (nearest) (*nearest)[a] = r;
    z[a] = x[a] - static_cast<double>(r);
  }
  return z;
}

}  // namespace

ProofParameters ProofParameters::defaults(int d, int A, double p, int K) {
  ProofParameters pp;
  pp.A = A;
  pp.p = p;
  pp.K = K;
  pp.theta1 = 2.0 * d + 4.0;
  pp.theta2 = 2.0 * d + 3.0;
  pp.theta3 = 4.0 * d + 9.0;
  pp.theta4 = d + 2.0;
  pp.theta5 = d + 1.0;
  pp.validate(d);
  return pp;
}

void ProofParameters::validate(int d) const {
  require(d >= 1 && d <= 3, "parameters: d must be 1..3");
  require(A >= 3 && A % 2 == 1, "parameters: A must be odd and >= 3");
  require(p > 1.0 && p <= 2.0, "parameters: p must lie in (1, 2]");
  require(eps > 0.0, "parameters: eps must be positive");
  require(K >= 1, "parameters: K must be >= 1");
  require(theta1 > theta2, "parameters: need theta1 > theta2");
  require(theta3 >= p * theta1, "parameters: need theta3 >= p*theta1");
  require(theta2 > theta4 + d, "parameters: need theta2 > theta4 + d");
  require(theta4 > d, "parameters: need theta4 > d");
  require(d < theta5 && theta5 < theta4, "parameters: need d < theta5 < theta4");
  require(Ksat == 2, "parameters: saturation constant is fixed at 2");
}

LatticeWeightEval::LatticeWeightEval(int d, double theta1, double rel_tol)
    : d_(d), theta_(theta1), rel_tol_(rel_tol) {
  require(d >= 1 && d <= 3, "lattice weight: d must be 1..3");
  require(theta1 > d, "lattice weight: need theta1 > d");
  require(rel_tol > 0.0 && rel_tol < 1e-3, "lattice weight: implausible rel_tol");
  const double sd = sphere_area(d);
  const double rd = std::sqrt(static_cast<double>(d));
  const double head = poly_decay(0.5 * rd, theta_);  // lower bound on D

  // Window radii from the integral-test tail bounds. Points outside the
  // inf-window of radius R have Euclidean distance > R from the cell.
  auto var_bound = [&](int R) {
    // variation over the unit cell of the tail sum: |grad term| <= theta*(term)
    double base = 1.0 + std::max(1.0, R - rd);
    return rd * theta_ * sd * std::pow(base, -(theta_ + 2.0 - d)) / (theta_ + 2.0 - d);
  };
  auto abs_bound = [&](int R) {
    double base = 1.0 + std::max(1.0, R - rd);
    return sd * std::pow(base, -(theta_ - d)) / (theta_ - d);
  };
  R0_ = 2;
  while (var_bound(R0_) > 0.5 * rel_tol_ * head) ++R0_;
  R1_ = R0_;
  while (abs_bound(R1_) > 0.5 * rel_tol_ * head) ++R1_;

  // Constant far-tail estimate, evaluated at the cell center (z = 0).
  double tc = 0.0;
  for_window(d_, R1_, [&](const Idx3& o) {
    int m = 0;
    for (int a = 0; a < d_; ++a) m = std::max<int>(m, std::abs(o[a]));
    if (m <= R0_) return;
    double r2 = 0.0;
    for (int a = 0; a < d_; ++a) r2 += static_cast<double>(o[a]) * o[a];
    tc += poly_decay(std::sqrt(r2), theta_);
  });
  tail_const_ = tc;

  // Certified unit-cell extrema of D via dense probing plus the
  // log-Lipschitz margin |grad log D| <= theta.
  int steps = d_ == 1 ? 512 : (d_ == 2 ? 96 : 24);
  double delta = 0.5 / steps;
  double dmin = 1e300, dmax = 0.0;
  Idx3 it{0, 0, 0};
  std::function<void(int)> rec = [&](int axis) {
    if (axis == d_) {
      Vec3 z{0, 0, 0};
      for (int a = 0; a < d_; ++a) z[a] = it[a] * delta;
      double v = denom(z);
      dmin = std::min(dmin, v);
      dmax = std::max(dmax, v);
      return;
    }
    for (it[axis] = 0; it[axis] <= steps; ++it[axis]) rec(axis + 1);
  };
  rec(0);
  double margin = std::exp(theta_ * rd * 0.5 * delta);
  cw_ = 1.0 / (dmax * margin);
  Cw_ = margin / dmin;
}

double LatticeWeightEval::denom(const Vec3& x) const {
  Vec3 z = frac_part(x, d_);
  double s = tail_const_;
  for_window(d_, R0_, [&](const Idx3& o) {
    double r2 = 0.0;
    for (int a = 0; a < d_; ++a) r2 += sqr(z[a] - o[a]);
    s += poly_decay(std::sqrt(r2), theta_);
  });
  return s;
}

double LatticeWeightEval::eval(const Vec3& x) const {
  return poly_decay(std::sqrt(norm2(x, d_)), theta_) / denom(x);
}

double LatticeWeightEval::partition_sum(const Vec3& x) const {
  Vec3 z = frac_part(x, d_);
  double num = 0.0;
  for_window(d_, R1_, [&](const Idx3& o) {
    double r2 = 0.0;
    for (int a = 0; a < d_; ++a) r2 += sqr(z[a] - o[a]);
    num += poly_decay(std::sqrt(r2), theta_);
  });
  return num / denom(x);
}

namespace {

// Caches keyed by parameter bit patterns (exact value identity).
std::uint64_t bits(double x) {
  std::uint64_t u;
  std::memcpy(&u, &x, sizeof(u));
  return u;
}

const LatticeWeightEval& lattice_eval_for(int d, double theta, double rel_tol = 1e-10) {
  static std::map<std::tuple<int, std::uint64_t, std::uint64_t>,
                  std::unique_ptr<LatticeWeightEval>>
      cache;
  auto key = std::make_tuple(d, bits(theta), bits(rel_tol));
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, std::make_unique<LatticeWeightEval>(d, theta, rel_tol)).first;
  return *it->second;
}

}  // namespace

const LatticeWeightEval& shared_lattice_weight(int d, double theta1, double rel_tol) {
  return lattice_eval_for(d, theta1, rel_tol);
}

const RadialHeatProfile& heated_profile(int d, double theta, double s, double rmax) {
  static std::map<std::tuple<int, std::uint64_t, std::uint64_t>,
                  std::unique_ptr<RadialHeatProfile>>
      cache;
  auto key = std::make_tuple(d, bits(theta), bits(s));
  auto it = cache.find(key);
  if (it != cache.end() && it->second->rmax() >= rmax) return *it->second;
  auto prof = std::make_unique<RadialHeatProfile>(
      RadialHeatProfile::build(d, theta, s, std::max(rmax, 64.0)));
  if (it != cache.end()) {
    it->second = std::move(prof);
    return *it->second;
  }
  return *cache.emplace(key, std::move(prof)).first->second;
}

ParametricWeight ParametricWeight::flat(int d) {
  ParametricWeight w;
  w.form = Form::Flat;
  w.d = d;
  w.theta = 0.0;
  return w;
}

ParametricWeight ParametricWeight::poly_decay(int d, double theta, const Vec3& center) {
  require(theta > d, "PolyDecay: need theta > d");
  ParametricWeight w;
  w.form = Form::PolyDecay;
  w.d = d;
  w.theta = theta;
  w.center = center;
  return w;
}

ParametricWeight ParametricWeight::lattice_normalized(int d, double theta1) {
  require(theta1 > d, "LatticeNormalized: need theta1 > d");
  ParametricWeight w;
  w.form = Form::LatticeNormalized;
  w.d = d;
  w.theta = theta1;
  return w;
}

ParametricWeight ParametricWeight::rho(int d, double theta_G) {
  require(theta_G > 0.0, "Rho: need theta_G > 0");
  ParametricWeight w;
  w.form = Form::Rho;
  w.d = d;
  w.theta = theta_G;
  return w;
}

ParametricWeight ParametricWeight::heated(ParametricWeight base, double t) {
  require(t > 0.0, "Heated: need t > 0");
  require(base.form != Form::Flat, "Heated: base must have polynomial decay");
  ParametricWeight w;
  w.form = Form::Heated;
  w.d = base.d;
  w.t = t;
  w.theta = base.decay_theta();
  w.center = base.decay_center();
  w.base = std::make_shared<ParametricWeight>(std::move(base));
  return w;
}

double ParametricWeight::decay_theta() const {
  switch (form) {
    case Form::Flat: return 0.0;
    case Form::PolyDecay: return theta;
    case Form::Rho: return theta + 2.0 * d;
    case Form::LatticeNormalized: return theta;
    case Form::Heated: return base->decay_theta();
  }
  return 0.0;
}

double ParametricWeight::lower_const() const {
  switch (form) {
    case Form::Flat: return 1.0;
    case Form::PolyDecay:
    case Form::Rho: return 1.0;
    case Form::LatticeNormalized: return lattice_eval_for(d, theta).cw();
    case Form::Heated: return root().lower_const() * envelope_minus(d, decay_theta(), heat_time());
  }
  return 1.0;
}

double ParametricWeight::upper_const() const {
  switch (form) {
    case Form::Flat: return 1.0;
    case Form::PolyDecay:
    case Form::Rho: return 1.0;
    case Form::LatticeNormalized: return lattice_eval_for(d, theta).Cw();
    case Form::Heated: return root().upper_const() * envelope_plus(d, decay_theta(), heat_time());
  }
  return 1.0;
}

Vec3 ParametricWeight::decay_center() const {
  switch (form) {
    case Form::PolyDecay: return center;
    case Form::Heated: return base->decay_center();
    default: return {0, 0, 0};
  }
}

namespace {

// Heat of a lattice-normalized weight at one point: midpoint quadrature over
// a certified Gaussian window (used only off the acceptance-critical paths).
double heated_lattice_point(const LatticeWeightEval& w, int d, double t, const Vec3& x) {
  double st = std::sqrt(t);
  double delta = std::min(st / 8.0, 0.05);
  int R = static_cast<int>(std::ceil(9.0 * st / delta));
  double amp = std::pow(4.0 * M_PI * t, -0.5 * d) * std::pow(delta, d);
  double sum = 0.0;
  Idx3 o{0, 0, 0};
  auto body = [&](const Idx3& oo) {
    Vec3 y = x;
    double r2 = 0.0;
    for (int a = 0; a < d; ++a) {
      y[a] = x[a] + oo[a] * delta;
      r2 += sqr(oo[a] * delta);
    }
    sum += w.eval(y) * std::exp(-r2 / (4.0 * t));
  };
  if (d == 1) {
    for (o[0] = -R; o[0] <= R; ++o[0]) body(o);
  } else if (d == 2) {
    for (o[0] = -R; o[0] <= R; ++o[0])
      for (o[1] = -R; o[1] <= R; ++o[1]) body(o);
  } else {
    throw config_error("heated lattice weights are not supported in d=3");
  }
  return amp * sum;
}

}  // namespace

double eval_weight(const ParametricWeight& w, const Vec3& x) {
  switch (w.form) {
    case ParametricWeight::Form::Flat:
      return 1.0;
    case ParametricWeight::Form::PolyDecay:
      return poly_decay(std::sqrt(dist2(x, w.center, w.d)), w.theta);
    case ParametricWeight::Form::Rho:
      return poly_decay(std::sqrt(norm2(x, w.d)), w.theta + 2.0 * w.d);
    case ParametricWeight::Form::LatticeNormalized:
      return lattice_eval_for(w.d, w.theta).eval(x);
    case ParametricWeight::Form::Heated: {
      const ParametricWeight& r = w.root();
      double s = w.heat_time();
      if (r.form == ParametricWeight::Form::LatticeNormalized)
        return heated_lattice_point(lattice_eval_for(w.d, r.theta), w.d, s, x);
      double b = std::sqrt(dist2(x, w.decay_center(), w.d));
      return heated_profile(w.d, w.decay_theta(), s, b + 1.0).eval(b);
    }
  }
  return 0.0;
}

double atom_weight(const LatticeWeightEval& w, int A, int k, const Idx3& j, const Vec3& x) {
  double scale = std::pow(static_cast<double>(A), k);
  Vec3 y{0, 0, 0};
  for (int a = 0; a < 3; ++a) y[a] = scale * x[a] - static_cast<double>(j[a]);
  return w.eval(y);
}

SmoothnessEstimate smoothness_function(const ParametricWeight& w, double zeta, int nprobe) {
  require(zeta >= 0.0, "smoothness: zeta must be >= 0");
  SmoothnessEstimate e;
  double th = w.decay_theta();
  switch (w.form) {
    case ParametricWeight::Form::Flat:
      e.lower = e.upper = 1.0;
      e.exact = true;
      return e;
    case ParametricWeight::Form::PolyDecay:
    case ParametricWeight::Form::Rho:
      e.lower = e.upper = std::pow(1.0 + zeta, th);
      e.exact = true;
      return e;
    case ParametricWeight::Form::LatticeNormalized:
      e.upper = (w.upper_const() / w.lower_const()) * std::pow(1.0 + zeta, th);
      break;
    case ParametricWeight::Form::Heated:
      e.upper = smoothness_function(*w.base, zeta, 0).upper;
      break;
  }
  // deterministic probe set: golden-ratio positions, +-axis displacements
  const double phi = 0.6180339887498949;
  Vec3 c = w.decay_center();
  for (int i = 0; i < nprobe; ++i) {
    Vec3 x = c;
    double u = std::fmod(phi * (i + 1), 1.0);
    x[0] += (u - 0.5) * 6.0;
    if (w.d >= 2) x[1] += (std::fmod(phi * phi * (i + 1), 1.0) - 0.5) * 6.0;
    for (int axis = 0; axis < w.d; ++axis) {
      for (int sign = -1; sign <= 1; sign += 2) {
        Vec3 y = x;
        y[axis] += sign * zeta;
        double wx = eval_weight(w, x), wy = eval_weight(w, y);
        if (wy > 0.0) e.lower = std::max(e.lower, wx / wy);
      }
    }
  }
  return e;
}

}  // namespace heatlab
