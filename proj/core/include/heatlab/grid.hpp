#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "heatlab/util.hpp"

namespace heatlab {

using Vec3 = std::array<double, 3>;  // positions in R^d, d <= 3, trailing zeros
using Idx3 = std::array<std::int64_t, 3>;

inline double dist2(const Vec3& a, const Vec3& b, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += sqr(a[i] - b[i]);
  return s;
}

inline double norm2(const Vec3& a, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += a[i] * a[i];
  return s;
}

// Uniform periodic grid on [-L, L)^d, N nodes per axis, spacing h = 2L/N.
struct GridSpec {
  int d = 1;
  int N = 16;
  double L = 8.0;

  double h() const { return 2.0 * L / N; }
  std::size_t size() const {
    std::size_t s = 1;
    for (int i = 0; i < d; ++i) s *= static_cast<std::size_t>(N);
    return s;
  }
  double cell() const {
    double c = 1.0;
    for (int i = 0; i < d; ++i) c *= h();
    return c;
  }
  // Row-major node index <-> per-axis indices; axis index i maps to -L + i*h.
  std::size_t flat(const Idx3& i) const {
    std::size_t f = 0;
    for (int a = 0; a < d; ++a) f = f * N + static_cast<std::size_t>(i[a]);
    return f;
  }
  Idx3 unflat(std::size_t f) const {
    Idx3 i{0, 0, 0};
    for (int a = d - 1; a >= 0; --a) {
      i[a] = static_cast<std::int64_t>(f % N);
      f /= N;
    }
    return i;
  }
  Vec3 node(std::size_t f) const {
    Idx3 i = unflat(f);
    Vec3 x{0.0, 0.0, 0.0};
    for (int a = 0; a < d; ++a) x[a] = -L + i[a] * h();
    return x;
  }
  double coord(std::int64_t i) const { return -L + i * h(); }

  bool operator==(const GridSpec&) const = default;
};

GridSpec make_grid(int d, int N, double L);

// Vector-valued samples on a grid; component-major storage
// (data[c * grid.size() + node]).
struct Field {
  GridSpec grid;
  int ell = 1;
  std::vector<double> data;

  Field() = default;
  Field(const GridSpec& g, int l) : grid(g), ell(l), data(l * g.size(), 0.0) {
    require(l >= 1, "field component count must be >= 1");
  }
  double& at(int c, std::size_t node) { return data[c * grid.size() + node]; }
  double at(int c, std::size_t node) const { return data[c * grid.size() + node]; }
  std::span<const double> comp(int c) const {
    return {data.data() + c * grid.size(), grid.size()};
  }
  std::span<double> comp(int c) {
    return {data.data() + c * grid.size(), grid.size()};
  }
  // Pointwise Euclidean |f(x)| over components.
  double abs_at(std::size_t node) const {
    double s = 0.0;
    for (int c = 0; c < ell; ++c) s += sqr(at(c, node));
    return std::sqrt(s);
  }
};

// h^d * sum of samples, per component (rectangle rule on the torus).
std::vector<double> quadrature(const Field& f);

// Scalar |f| field (Euclidean norm over components at each node).
Field abs_field(const Field& f);

// Fraction of total |f| mass within `margin` of the box boundary; experiments
// declare a boundary-decay tolerance against this.
double boundary_mass_fraction(const Field& f, double margin);

// Finite atomic measure sum m_i delta_{x_i}, m_i >= 0.
struct PointMeasure {
  struct Atom {
    Vec3 x{0, 0, 0};
    double mass = 0.0;
  };
  int d = 1;
  std::vector<Atom> atoms;

  PointMeasure() = default;
  PointMeasure(int dim, std::vector<Atom> a) : d(dim), atoms(std::move(a)) {
    require(d >= 1 && d <= 3, "PointMeasure: d must be 1..3");
    require(!atoms.empty(), "PointMeasure: atom list must be non-empty");
    for (const auto& at : atoms) {
      require(at.mass >= 0.0 && std::isfinite(at.mass), "PointMeasure: masses must be >= 0 and finite");
      for (int i = 0; i < d; ++i)
        require(std::isfinite(at.x[i]), "PointMeasure: positions must be finite");
    }
  }
  double total_mass() const {
    return pairwise_sum_f(atoms.size(), [&](std::size_t i) { return atoms[i].mass; });
  }
};

// Rank-one charge a (x) mu with |a| = 1.
struct VectorPointCharge {
  std::vector<double> a;
  PointMeasure base;

  VectorPointCharge(std::vector<double> dir, PointMeasure mu)
      : a(std::move(dir)), base(std::move(mu)) {
    double n2 = 0.0;
    for (double c : a) n2 += c * c;
    require(std::abs(std::sqrt(n2) - 1.0) <= 1e-12, "VectorPointCharge: |a| must be 1");
  }
};

// --- canonical generators ---

// grad of A*exp(-|x-c|^2 / (2 sigma^2)), sampled analytically; ell = d.
Field gen_gradient_field(const GridSpec& g, const Vec3& center, double width, double amplitude);

// (d_y psi, -d_x psi) for a Gaussian stream bump psi; d = 2 only.
Field gen_divfree_field(const GridSpec& g, const Vec3& center, double width, double amplitude);

// a (x) (heat kernel of time sigma^2): scalar peak (4 pi sigma^2)^{-d/2},
// unit mass. Requires sigma >= 2h.
Field gen_near_delta(const GridSpec& g, double sigma, const std::vector<double>& a,
                     const Vec3& center = {0, 0, 0});

// Two opposite-sign scalar bumps (dipole), separation 2*offset along axis 0.
Field gen_dipole(const GridSpec& g, double sigma, double offset, double amplitude = 1.0);

}  // namespace heatlab
