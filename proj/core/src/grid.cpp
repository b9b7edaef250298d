#include "heatlab/grid.hpp"

#include <charconv>
#include <cstdio>

namespace heatlab {

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 32) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

GridSpec make_grid(int d, int N, double L) {
  require(d >= 1 && d <= 3, "grid dimension must be 1..3");
  require(N % 2 == 0, "N must be even");
  require(N >= 16, "N must be >= 16");
  require(L > 0.0, "L must be positive");
  return GridSpec{d, N, L};
}

std::vector<double> quadrature(const Field& f) {
  std::vector<double> out(f.ell);
  for (int c = 0; c < f.ell; ++c) out[c] = f.grid.cell() * pairwise_sum(f.comp(c));
  return out;
}

Field abs_field(const Field& f) {
  Field out(f.grid, 1);
  if (f.ell == 1) {
    for (std::size_t i = 0; i < f.grid.size(); ++i) out.data[i] = std::abs(f.data[i]);
  } else {
    for (std::size_t i = 0; i < f.grid.size(); ++i) out.data[i] = f.abs_at(i);
  }
  return out;
}

double boundary_mass_fraction(const Field& f, double margin) {
  const GridSpec& g = f.grid;
  double total = 0.0, near = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double m = f.abs_at(i);
    total += m;
    Vec3 x = g.node(i);
    bool close = false;
    for (int a = 0; a < g.d; ++a)
      if (x[a] <= -g.L + margin || x[a] >= g.L - g.h() - margin) close = true;
    if (close) near += m;
  }
  return total > 0.0 ? near / total : 0.0;
}

static Vec3 checked_center(const GridSpec& g, const Vec3& c) {
  for (int a = 0; a < g.d; ++a)
    require(std::abs(c[a]) < g.L, "generator center must lie inside the box");
  return c;
}

Field gen_gradient_field(const GridSpec& g, const Vec3& center, double width, double amplitude) {
  require(width >= 4.0 * g.h(), "under-resolved bump");
  Vec3 c = checked_center(g, center);
  Field out(g, g.d);
  double s2 = width * width;
  for (std::size_t i = 0; i < g.size(); ++i) {
    Vec3 x = g.node(i);
    double e = amplitude * std::exp(-dist2(x, c, g.d) / (2.0 * s2));
    for (int a = 0; a < g.d; ++a) out.at(a, i) = -(x[a] - c[a]) / s2 * e;
  }
  return out;
}

Field gen_divfree_field(const GridSpec& g, const Vec3& center, double width, double amplitude) {
  require(g.d == 2, "stream-function generator requires d=2");
  require(width >= 4.0 * g.h(), "under-resolved bump");
  Vec3 c = checked_center(g, center);
  Field out(g, 2);
  double s2 = width * width;
  for (std::size_t i = 0; i < g.size(); ++i) {
    Vec3 x = g.node(i);
    double psi = amplitude * std::exp(-dist2(x, c, 2) / (2.0 * s2));
    out.at(0, i) = -(x[1] - c[1]) / s2 * psi;  // d_y psi
    out.at(1, i) = (x[0] - c[0]) / s2 * psi;   // -d_x psi
  }
  return out;
}

Field gen_near_delta(const GridSpec& g, double sigma, const std::vector<double>& a,
                     const Vec3& center) {
  require(sigma >= 2.0 * g.h(), "under-resolved delta approximation");
  double n2 = 0.0;
  for (double c : a) n2 += c * c;
  require(std::abs(std::sqrt(n2) - 1.0) <= 1e-12, "direction must be a unit vector");
  Vec3 c = checked_center(g, center);
  int ell = static_cast<int>(a.size());
  Field out(g, ell);
  double t = sigma * sigma;
  double amp = std::pow(4.0 * M_PI * t, -0.5 * g.d);
  for (std::size_t i = 0; i < g.size(); ++i) {
    double v = amp * std::exp(-dist2(g.node(i), c, g.d) / (4.0 * t));
    for (int comp = 0; comp < ell; ++comp) out.at(comp, i) = a[comp] * v;
  }
  return out;
}

Field gen_dipole(const GridSpec& g, double sigma, double offset, double amplitude) {
  require(sigma >= 2.0 * g.h(), "under-resolved bump");
  require(offset + 4.0 * sigma < g.L, "dipole does not decay inside the box");
  Field out(g, 1);
  double t = sigma * sigma;
  double amp = amplitude * std::pow(4.0 * M_PI * t, -0.5 * g.d);
  Vec3 cp{offset, 0, 0}, cm{-offset, 0, 0};
  for (std::size_t i = 0; i < g.size(); ++i) {
    Vec3 x = g.node(i);
    out.data[i] = amp * (std::exp(-dist2(x, cp, g.d) / (4.0 * t)) -
                         std::exp(-dist2(x, cm, g.d) / (4.0 * t)));
  }
  return out;
}

}  // namespace heatlab
