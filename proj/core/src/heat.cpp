#include "heatlab/heat.hpp"

#include <fstream>

#include "heatlab/config.hpp"
#include "heatlab/io.hpp"
#include "heatlab/spectral.hpp"

namespace heatlab {

Field heat_extend(const Field& f, double t) {
  require(t >= 0.0, "heat: t must be >= 0");
  if (t == 0.0) return f;
  return apply_radial_multiplier(
      f, [t](double xi) { return std::exp(-4.0 * M_PI * M_PI * t * xi * xi); });
}

Field heat_extend_direct(const Field& f, double t) {
  require(t > 0.0, "heat: t must be > 0");
  const GridSpec& g = f.grid;
  const int N = g.N;
  const double h = g.h();

  // 1D periodized Gaussian kernel samples, scaled by h (one factor per axis).
  std::vector<double> ker(N);
  int images = 1;
  while (std::exp(-sqr(2.0 * g.L * images - g.L) / (4.0 * t)) > 1e-300) ++images;
  for (int n = 0; n < N; ++n) {
    double s = 0.0;
    for (int m = -images; m <= images; ++m) s += std::exp(-sqr(n * h + 2.0 * g.L * m) / (4.0 * t));
    ker[n] = h * std::pow(4.0 * M_PI * t, -0.5) * s;
  }

  Field out = f;
  std::vector<double> line(N), conv(N);
  std::size_t total = g.size();
  for (int c = 0; c < f.ell; ++c) {
    for (int axis = 0; axis < g.d; ++axis) {
      // stride of the axis in the row-major layout
      std::size_t stride = 1;
      for (int a = axis + 1; a < g.d; ++a) stride *= static_cast<std::size_t>(N);
      std::size_t nlines = total / N;
      for (std::size_t li = 0; li < nlines; ++li) {
        // base index of the li-th line along `axis`
        std::size_t outer = li / stride, inner = li % stride;
        std::size_t base = outer * stride * N + inner;
        for (int n = 0; n < N; ++n) line[n] = out.at(c, base + n * stride);
        for (int n = 0; n < N; ++n) {
          double s = 0.0;
          for (int m = 0; m < N; ++m) s += ker[(n - m + N) % N] * line[m];
          conv[n] = s;
        }
        for (int n = 0; n < N; ++n) out.at(c, base + n * stride) = conv[n];
      }
    }
  }
  return out;
}

double heat_point(const PointMeasure& mu, double t, const Vec3& x) {
  double amp = std::pow(4.0 * M_PI * t, -0.5 * mu.d);
  return amp * pairwise_sum_f(mu.atoms.size(), [&](std::size_t i) {
           const auto& at = mu.atoms[i];
           return at.mass * std::exp(-dist2(x, at.x, mu.d) / (4.0 * t));
         });
}

Field heat_extend(const PointMeasure& mu, double t, const GridSpec& g) {
  require(t > 0.0, "heat: t must be > 0 for atomic measures");
  require(mu.d == g.d, "heat: measure/grid dimension mismatch");
  Field out(g, 1);
  for (std::size_t n = 0; n < g.size(); ++n) out.at(0, n) = heat_point(mu, t, g.node(n));
  return out;
}

double heat_point(const VectorPointCharge& q, double t, const Vec3& x) {
  // directional derivative a . grad_x of the heat extension of the base
  const PointMeasure& mu = q.base;
  double amp = std::pow(4.0 * M_PI * t, -0.5 * mu.d);
  return amp * pairwise_sum_f(mu.atoms.size(), [&](std::size_t i) {
           const auto& at = mu.atoms[i];
           double ax = 0.0;
           for (int a = 0; a < mu.d; ++a) ax += q.a[a] * (x[a] - at.x[a]);
           return at.mass * (-ax / (2.0 * t)) * std::exp(-dist2(x, at.x, mu.d) / (4.0 * t));
         });
}

Field heat_extend(const VectorPointCharge& q, double t, const GridSpec& g) {
  require(t > 0.0, "heat: t must be > 0 for atomic measures");
  require(q.base.d == g.d, "heat: charge/grid dimension mismatch");
  Field out(g, 1);
  for (std::size_t n = 0; n < g.size(); ++n) out.at(0, n) = heat_point(q, t, g.node(n));
  return out;
}

double high_frequency_fraction(const Field& f, double xi_cut) {
  Spectrum s = dft(f);
  const GridSpec& g = f.grid;
  double total = 0.0, high = 0.0;
  std::size_t size = g.size();
  for (int c = 0; c < f.ell; ++c) {
    for (std::size_t n = 0; n < size; ++n) {
      double e = std::norm(s.data[c * size + n]);
      total += e;
      Idx3 i = g.unflat(n);
      double xi2 = 0.0;
      for (int a = 0; a < g.d; ++a) {
        std::int64_t k = i[a] < g.N / 2 ? i[a] : i[a] - g.N;
        xi2 += sqr(static_cast<double>(k) / (2.0 * g.L));
      }
      if (xi2 > xi_cut * xi_cut) high += e;
    }
  }
  return total > 0.0 ? high / total : 0.0;
}

HeatLadder build_ladder(const Field& f, int A, int K, double hf_tol) {
  require(A >= 3 && A % 2 == 1, "ladder: A must be odd and >= 3");
  require(K >= 1, "ladder: K must be >= 1");
  const GridSpec& g = f.grid;
  // periodization error of the widest kernel (t = 1) must be negligible
  require(std::exp(-sqr(g.L) / 4.0) <= 1e-6, "ladder: box too small for t = 1 heating");
  double deepest = std::pow(static_cast<double>(A), -K);
  if (deepest < 2.0 * g.h()) {
    // The grid cannot place nodes inside the deepest kernel; acceptable only
    // when the input is spectrally well resolved, so its interpolant (which
    // the spectral heat acts on exactly) is faithful.
    double frac = high_frequency_fraction(f, 0.25 * g.N / (2.0 * g.L));
    require(frac <= hf_tol,
            "ladder: deepest scale below grid resolution and the field is not band-limited "
            "(high-frequency energy fraction " +
                format_g17(frac) + ")");
  }
  HeatLadder lad;
  lad.A = A;
  lad.K = K;
  lad.levels.reserve(K + 1);
  for (int k = 0; k <= K; ++k)
    lad.levels.push_back(heat_extend(f, std::pow(static_cast<double>(A), -2 * k)));
  return lad;
}

SemigroupDefect semigroup_defect(const Field& f, double t1, double t2) {
  require(t1 > 0.0 && t2 > 0.0, "semigroup: times must be > 0");
  SemigroupDefect r;
  double fmax = 0.0;
  for (double v : f.data) fmax = std::max(fmax, std::abs(v));
  if (fmax == 0.0) {
    r.zero_field = true;
    return r;
  }
  Field g1 = heat_extend(heat_extend(f, t1), t2);
  Field g2 = heat_extend(f, t1 + t2);
  double dmax = 0.0;
  for (std::size_t i = 0; i < g1.data.size(); ++i)
    dmax = std::max(dmax, std::abs(g1.data[i] - g2.data[i]));
  r.defect = dmax / fmax;
  return r;
}

HeatedWeightSample heat_weight(const ParametricWeight& w, double t, const GridSpec& g) {
  require(w.d == g.d, "heat_weight: weight/grid dimension mismatch");
  ParametricWeight hw = ParametricWeight::heated(w, t);
  HeatedWeightSample out;
  out.samples = Field(g, 1);
  out.theta = hw.decay_theta();
  out.center = hw.decay_center();
  out.lo = hw.lower_const();
  out.hi = hw.upper_const();
  out.t = hw.heat_time();

  // pre-warm the radial profile cache with the largest radius on the grid
  if (hw.root().form != ParametricWeight::Form::LatticeNormalized) {
    double bmax = 0.0;
    for (int a = 0; a < g.d; ++a) bmax += sqr(g.L + std::abs(out.center[a]));
    heated_profile(g.d, out.theta, out.t, std::sqrt(bmax) + 1.0);
  }

  double worst = 0.0;
  std::size_t worst_node = 0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    Vec3 x = g.node(n);
    double v = eval_weight(hw, x);
    out.samples.at(0, n) = v;
    double env = poly_decay(std::sqrt(dist2(x, out.center, g.d)), out.theta);
    double slack = 1e-9 * out.hi * env;
    double viol = std::max(out.lo * env - v, v - out.hi * env) - slack;
    if (viol > worst) {
      worst = viol;
      worst_node = n;
    }
  }
  if (worst > 0.0) {
    Vec3 x = g.node(worst_node);
    throw assertion_error("heat_weight: envelope violated at (" + format_g17(x[0]) + ", " +
                          format_g17(x[1]) + ", " + format_g17(x[2]) + ") by " +
                          format_g17(worst));
  }
  return out;
}

void save_ladder(const HeatLadder& ladder, const std::filesystem::path& dir) {
  require(!ladder.levels.empty(), "save_ladder: empty ladder");
  std::filesystem::create_directories(dir);
  const GridSpec& g = ladder.grid();
  std::ofstream man(dir / "manifest.txt");
  require(man.good(), "save_ladder: cannot write manifest in " + dir.string());
  man << "format = heatladder-1\n"
      << "A = " << ladder.A << "\n"
      << "K = " << ladder.K << "\n"
      << "d = " << g.d << "\n"
      << "N = " << g.N << "\n"
      << "L = " << format_g17(g.L) << "\n"
      << "ell = " << ladder.levels.front().ell << "\n";
  for (int k = 0; k <= ladder.K; ++k)
    write_field(ladder.level(k), dir / ("fk_" + std::to_string(k) + ".bin"));
}

HeatLadder load_ladder(const std::filesystem::path& dir) {
  LabConfig man = LabConfig::parse_file(dir / "manifest.txt");
  require(man.get_str("format") == "heatladder-1", "load_ladder: unknown manifest format");
  HeatLadder lad;
  lad.A = static_cast<int>(man.get_int("A"));
  lad.K = static_cast<int>(man.get_int("K"));
  require(lad.A >= 3 && lad.A % 2 == 1 && lad.K >= 1, "load_ladder: bad manifest parameters");
  for (int k = 0; k <= lad.K; ++k) {
    Field f = read_field(dir / ("fk_" + std::to_string(k) + ".bin"));
    require(f.grid.d == man.get_int("d") && f.grid.N == man.get_int("N") &&
                f.ell == man.get_int("ell"),
            "load_ladder: level " + std::to_string(k) + " does not match the manifest");
    lad.levels.push_back(std::move(f));
  }
  return lad;
}

}  // namespace heatlab
