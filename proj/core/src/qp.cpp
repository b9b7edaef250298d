#include "heatlab/qp.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "heatlab/norms.hpp"
#include "heatlab/quad.hpp"

namespace heatlab {

namespace {

// Per-atom breakpoint offsets in units of the Gaussian scale.
constexpr double kAtomOffsets[] = {0.0, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0};

struct TensorRule {
  int d = 1;
  std::vector<double> x[3], w[3];  // per-axis flattened GL16 panels
};

// Graded panels on one axis: the domain spans the atom cloud plus 16 Gaussian
// scales; breakpoints sit at scaled offsets around every atom and on a
// geometric ladder around the weight center (scale max(sqrt(s), 1/theta),
// ratio 1 + 1.5/theta).
std::vector<double> axis_breaks(const std::vector<double>& atoms, double sigma, double wc,
                                double wsigma, double wtheta) {
  double lo = atoms.front(), hi = atoms.front();
  for (double c : atoms) {
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  lo -= 16.0 * sigma;
  hi += 16.0 * sigma;

  std::vector<double> pts{lo, hi};
  for (double c : atoms)
    for (double off : kAtomOffsets) {
      pts.push_back(c + off * sigma);
      if (off > 0.0) pts.push_back(c - off * sigma);
    }
  if (wtheta > 0.0) {
    pts.push_back(wc);
    double g = 1.0 + 4.0 / wtheta;
    for (double r = wsigma; wc - r > lo || wc + r < hi; r *= g) {
      pts.push_back(wc - r);
      pts.push_back(wc + r);
      if (r > 1e6 * (hi - lo)) break;
    }
  }
  std::erase_if(pts, [&](double p) { return p < lo || p > hi; });
  std::sort(pts.begin(), pts.end());
  std::vector<double> out{pts.front()};
  double gap = 0.5 * std::min(sigma, wtheta > 0.0 ? wsigma : sigma);
  for (double p : pts)
    if (p - out.back() > gap) out.push_back(p);
  if (out.back() < hi) out.push_back(hi);
  return out;
}

TensorRule make_rule(const PointMeasure& mu, double sigma, const Vec3& wc, double wsigma,
                     double wtheta) {
  TensorRule rule;
  rule.d = mu.d;
  for (int a = 0; a < mu.d; ++a) {
    std::vector<double> coords;
    coords.reserve(mu.atoms.size());
    for (const auto& at : mu.atoms) coords.push_back(at.x[a]);
    std::vector<double> br = axis_breaks(coords, sigma, wc[a], wsigma, wtheta);
    std::size_t npanel = br.size() - 1;
    rule.x[a].resize(16 * npanel);
    rule.w[a].resize(16 * npanel);
    for (std::size_t i = 0; i < npanel; ++i)
      gl16_points(br[i], br[i + 1], rule.x[a].data() + 16 * i, rule.w[a].data() + 16 * i);
  }
  return rule;
}

template <class F>
double tensor_integrate(const TensorRule& rule, F&& f) {
  if (rule.d == 1) {
    return pairwise_sum_f(rule.x[0].size(), [&](std::size_t i) {
      Vec3 p{rule.x[0][i], 0, 0};
      return rule.w[0][i] * f(p);
    });
  }
  if (rule.d == 2) {
    return pairwise_sum_f(rule.x[0].size(), [&](std::size_t i) {
      double row = 0.0;
      Vec3 p{rule.x[0][i], 0, 0};
      for (std::size_t jj = 0; jj < rule.x[1].size(); ++jj) {
        p[1] = rule.x[1][jj];
        row += rule.w[1][jj] * f(p);
      }
      return rule.w[0][i] * row;
    });
  }
  return pairwise_sum_f(rule.x[0].size(), [&](std::size_t i) {
    double plane = 0.0;
    Vec3 p{rule.x[0][i], 0, 0};
    for (std::size_t jj = 0; jj < rule.x[1].size(); ++jj) {
      p[1] = rule.x[1][jj];
      double row = 0.0;
      for (std::size_t kk = 0; kk < rule.x[2].size(); ++kk) {
        p[2] = rule.x[2][kk];
        row += rule.w[2][kk] * f(p);
      }
      plane += rule.w[1][jj] * row;
    }
    return rule.w[0][i] * plane;
  });
}

struct TerminalWeight {
  ParametricWeight w;
  double theta = 0.0;
  double sigma = 1.0;  // ladder scale for the quadrature
  Vec3 center{0, 0, 0};
};

// v = Heat[G](., (1-t)/p); at t = 1 this is G itself.
TerminalWeight terminal_weight(const ParametricWeight& G, double p, double t) {
  require(t > 0.0 && t <= 1.0, "qp: t must lie in (0, 1]");
  double s = (1.0 - t) / p;
  TerminalWeight out;
  // heat leaves a flat weight unchanged, so skip the heated profile for it;
  // below s ~ 1e-10 the heated weight is G to within o(roundoff) while the
  // profile mesh (step ~ sqrt(s)) would blow up, so treat tiny s as zero
  bool flat = G.form == ParametricWeight::Form::Flat;
  out.w = (s > 1e-10 && !flat) ? ParametricWeight::heated(G, s) : G;
  out.theta = out.w.decay_theta();
  out.center = out.w.decay_center();
  out.sigma = out.theta > 0.0 ? std::max(std::sqrt(s), 1.0 / out.theta) : 1.0;
  return out;
}

void prewarm(const TerminalWeight& tw, const PointMeasure& mu, double sigma) {
  if (tw.w.form != ParametricWeight::Form::Heated) return;
  if (tw.w.root().form == ParametricWeight::Form::LatticeNormalized) return;
  double bmax = 0.0;
  for (const auto& at : mu.atoms) {
    double r = std::sqrt(dist2(at.x, tw.center, mu.d));
    bmax = std::max(bmax, r + 16.0 * sigma * std::sqrt(static_cast<double>(mu.d)));
  }
  heated_profile(mu.d, tw.theta, tw.w.heat_time(), bmax + 1.0);
}

}  // namespace

double qp(const PointMeasure& mu, const ParametricWeight& G, double p, double t) {
  require(p > 1.0, "qp: p must be > 1");
  require(mu.d == G.d, "qp: measure/weight dimension mismatch");
  TerminalWeight tw = terminal_weight(G, p, t);
  double sigma = std::sqrt(2.0 * t);
  prewarm(tw, mu, sigma);
  TensorRule rule = make_rule(mu, sigma, tw.center, tw.sigma, tw.theta);
  double amp = std::pow(4.0 * M_PI * t, -0.5 * mu.d);
  double integral = tensor_integrate(rule, [&](const Vec3& x) {
    double u = 0.0;
    for (const auto& at : mu.atoms) u += at.mass * std::exp(-dist2(x, at.x, mu.d) / (4.0 * t));
    return std::pow(amp * u, p) * eval_weight(tw.w, x);
  });
  return std::pow(t, 0.5 * mu.d * (p - 1.0)) * integral;
}

BctRhs bct_rhs(const PointMeasure& mu, const ParametricWeight& G, double p, double t) {
  require(p > 1.0, "bct: p must be > 1");
  require(t > 0.0 && t < 1.0, "bct: t must lie in (0, 1)");
  require(mu.d == G.d, "bct: measure/weight dimension mismatch");
  TerminalWeight tw = terminal_weight(G, p, t);
  double sigma = std::sqrt(2.0 * t);
  prewarm(tw, mu, sigma);
  TensorRule rule = make_rule(mu, sigma, tw.center, tw.sigma, tw.theta);

  const auto& atoms = mu.atoms;
  double integral = tensor_integrate(rule, [&](const Vec3& x) {
    // stable weights: factor out the closest atom's Gaussian
    double dmin = dist2(x, atoms[0].x, mu.d);
    for (const auto& at : atoms) dmin = std::min(dmin, dist2(x, at.x, mu.d));
    double S = 0.0;
    Vec3 mean{0, 0, 0};
    for (const auto& at : atoms) {
      double wi = at.mass * std::exp(-(dist2(x, at.x, mu.d) - dmin) / (4.0 * t));
      S += wi;
      for (int a = 0; a < mu.d; ++a) mean[a] += wi * at.x[a];
    }
    if (S <= 0.0) return 0.0;
    for (int a = 0; a < mu.d; ++a) mean[a] /= S;
    double var = 0.0;
    for (const auto& at : atoms) {
      double wi = at.mass * std::exp(-(dist2(x, at.x, mu.d) - dmin) / (4.0 * t));
      var += wi * dist2(at.x, mean, mu.d);
    }
    var /= S;
    double mass_p = std::pow(S, p) * std::exp(-p * dmin / (4.0 * t));
    return var * mass_p * eval_weight(tw.w, x);
  });
  BctRhs out;
  out.value = 0.25 * (p - 1.0) * std::pow(4.0 * M_PI, -0.5 * mu.d * p) *
              std::pow(t, -0.5 * mu.d - 2.0) * integral;
  if (out.value == 0.0) {
    // distinct-position count decides between exact zero and collapse
    int distinct = 0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      bool dup = false;
      for (std::size_t j = 0; j < i; ++j)
        if (dist2(atoms[i].x, atoms[j].x, mu.d) == 0.0) dup = true;
      if (!dup && atoms[i].mass > 0.0) ++distinct;
    }
    out.collapsed = distinct >= 2;
  }
  return out;
}

BctDefect bct_identity_defect(const PointMeasure& mu, const ParametricWeight& G, double p,
                              double t, double h_t) {
  require(h_t > 0.0 && t - h_t > 0.0 && t + h_t < 1.0, "bct: t +- h_t must stay inside (0, 1)");
  double qm = qp(mu, G, p, t - h_t), qplus = qp(mu, G, p, t + h_t);
  BctDefect out;
  out.fd = (qplus - qm) / (2.0 * h_t);
  out.rhs = bct_rhs(mu, G, p, t).value;
  double floor = 1e-4 * 0.5 * (qm + qplus) / t + 1e-300;
  out.defect = std::abs(out.fd - out.rhs) / std::max(out.rhs, floor);
  return out;
}

MonotonicityScan monotonicity_scan(const PointMeasure& mu, const ParametricWeight& G, double p,
                                   const std::vector<double>& t_grid, double rel_slack) {
  require(t_grid.size() >= 2, "monotonicity: need at least two t values");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    require(t_grid[i] > 0.0 && t_grid[i] <= 1.0, "monotonicity: t values must lie in (0, 1]");
    if (i) require(t_grid[i] > t_grid[i - 1], "monotonicity: t grid must be increasing");
  }
  MonotonicityScan out;
  out.t = t_grid;
  for (double t : t_grid) out.values.push_back(qp(mu, G, p, t));
  out.worst_slack = 0.0;
  double last = out.values.back();
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    double scale = std::max({out.values[i], last, 1e-300});
    if (i + 1 < out.values.size())
      out.worst_slack = std::min(out.worst_slack, (out.values[i + 1] - out.values[i]) / scale);
    // normalized form: every Q(t) is dominated by the endpoint value
    out.worst_slack = std::min(out.worst_slack, (last - out.values[i]) / scale);
  }
  out.pass = out.worst_slack >= -rel_slack;
  return out;
}

ImprovedExponent improved_exponent(const PointMeasure& mu, const ParametricWeight& G, double p,
                                   const std::vector<double>& t_grid) {
  ImprovedExponent out;
  out.t = t_grid;
  for (double t : t_grid) {
    require(t > 0.0 && t <= 1.0, "improved exponent: t values must lie in (0, 1]");
    out.values.push_back(qp(mu, G, p, t));
  }
  double q1 = (std::abs(t_grid.back() - 1.0) < 1e-15) ? out.values.back() : qp(mu, G, p, 1.0);
  require(q1 > 0.0, "improved exponent: Q_p(1) vanishes");

  double worst = std::numeric_limits<double>::infinity();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < out.t.size(); ++i) {
    if (out.t[i] >= 1.0 || out.values[i] <= 0.0) continue;
    double lt = std::log(out.t[i]), lq = std::log(out.values[i] / q1);
    worst = std::min(worst, lq / (p * lt));
    sx += lt;
    sy += lq;
    sxx += lt * lt;
    sxy += lt * lq;
    ++n;
  }
  require(n >= 2, "improved exponent: need at least two t values below 1");
  out.worst_point = std::max(0.0, worst);
  double slope = (static_cast<double>(n) * sxy - sx * sy) / (static_cast<double>(n) * sxx - sx * sx);
  out.lsq_fit = std::max(0.0, slope / p);
  return out;
}

PointMeasure line_sample_measure(int d, double length, int npoints) {
  require(d >= 2, "line measure: needs d >= 2 to be delta-free");
  require(npoints >= 2 && length > 0.0, "line measure: need npoints >= 2 and length > 0");
  std::vector<PointMeasure::Atom> atoms;
  for (int i = 0; i < npoints; ++i) {
    Vec3 x{-0.5 * length + length * i / (npoints - 1), 0, 0};
    atoms.push_back({x, 1.0 / npoints});
  }
  return PointMeasure(d, std::move(atoms));
}

ConcentrationDiagnostic concentration_diagnostic(const PointMeasure& mu,
                                                 const ParametricWeight& G, double p, double nu,
                                                 double R, double tau) {
  int d = mu.d;
  require(G.d == d, "concentration: measure/weight dimension mismatch");
  require(nu > 0.0 && nu < 1.0 / std::sqrt(static_cast<double>(d)),
          "concentration: need 0 < nu < d^{-1/2}");
  require(R > 0.0 && tau > 0.0, "concentration: need R > 0 and tau > 0");
  ConcentrationDiagnostic out;

  // Conc1 / Conc2 with the unnormalized kernel e^{-|x-y|^2/4} (t = 1, s = 0)
  double sigma = std::sqrt(2.0);
  TensorRule rule = make_rule(mu, sigma, G.decay_center(),
                              G.decay_theta() > 0.0 ? 1.0 / G.decay_theta() : 1.0,
                              G.decay_theta());
  out.conc1 = tensor_integrate(rule, [&](const Vec3& x) {
    double u = 0.0;
    for (const auto& at : mu.atoms) u += at.mass * std::exp(-dist2(x, at.x, d) / 4.0);
    return std::pow(u, p) * eval_weight(G, x);
  });
  out.conc2 = tensor_integrate(rule, [&](const Vec3& x) {
    double u = 0.0;
    Vec3 mean{0, 0, 0};
    for (const auto& at : mu.atoms) {
      double wi = at.mass * std::exp(-dist2(x, at.x, d) / 4.0);
      u += wi;
      for (int a = 0; a < d; ++a) mean[a] += wi * at.x[a];
    }
    if (u <= 0.0) return 0.0;
    for (int a = 0; a < d; ++a) mean[a] /= u;
    double second = 0.0;
    for (const auto& at : mu.atoms) {
      double wi = at.mass * std::exp(-dist2(x, at.x, d) / 4.0);
      second += wi * dist2(at.x, mean, d);
    }
    return second * std::pow(u, p - 1.0) * eval_weight(G, x);
  });

  // lattice masses a_k over the cubes prod [nu k_i, nu (k_i + 1))
  double rho_theta = G.decay_theta() + 2.0 * d;
  std::map<std::array<std::int64_t, 3>, double> mass;
  for (const auto& at : mu.atoms) {
    std::array<std::int64_t, 3> k{0, 0, 0};
    for (int a = 0; a < d; ++a)
      k[a] = static_cast<std::int64_t>(std::floor(at.x[a] / nu));
    mass[k] += at.mass;
  }
  auto idist = [&](const std::array<std::int64_t, 3>& a, const std::array<std::int64_t, 3>& b) {
    double r2 = 0.0;
    for (int ax = 0; ax < d; ++ax) r2 += sqr(static_cast<double>(a[ax] - b[ax]));
    return std::sqrt(r2);
  };

  double best_mass = -1.0;
  for (const auto& [k, ak] : mass) {
    LatticeCell cell;
    cell.k = {k[0], k[1], k[2]};
    cell.mass = ak;

    double tail = 0.0;
    for (const auto& [m, am] : mass)
      if (nu * idist(k, m) >= R) tail += poly_decay(nu * idist(k, m), rho_theta) * std::pow(am, p);
    cell.kind = std::pow(nu * ak, p) >= tail;

    // b_k: window mass minus the largest sqrt(d)-cluster the excluded ball
    // can swallow; candidate centers l near every populated window cell
    double S = 0.0;
    std::vector<std::pair<std::array<std::int64_t, 3>, double>> window;
    for (const auto& [m, am] : mass)
      if (nu * idist(k, m) <= R) {
        S += am;
        window.push_back({m, am});
      }
    double best_cluster = 0.0;
    for (const auto& [m, am] : window) {
      Idx3 o{0, 0, 0};
      for (o[0] = -2; o[0] <= 2; ++o[0])
        for (o[1] = -2; o[1] <= (d >= 2 ? 2 : -2); ++o[1])
          for (o[2] = -2; o[2] <= (d >= 3 ? 2 : -2); ++o[2]) {
            std::array<std::int64_t, 3> l{m[0] + o[0], m[1] + o[1], m[2] + o[2]};
            double cluster = 0.0;
            for (const auto& [mm, amm] : window)
              if (idist(l, mm) <= std::sqrt(static_cast<double>(d))) cluster += amm;
            best_cluster = std::max(best_cluster, cluster);
          }
    }
    double bk = S - best_cluster;
    cell.good = tau * ak >= bk;
    out.cells.push_back(cell);

    if (cell.kind && cell.good && ak > best_mass) {
      best_mass = ak;
      out.has_x0 = true;
      for (int a = 0; a < d; ++a) out.x0[a] = nu * (static_cast<double>(k[a]) + 0.5);
    }
  }

  if (out.has_x0) {
    for (const auto& at : mu.atoms) {
      double r = std::sqrt(dist2(at.x, out.x0, d));
      if (r <= nu)
        out.conc3_lhs += at.mass;
      else
        out.conc3_rhs += poly_decay(r, rho_theta) * at.mass;
    }
    out.conc3_lhs *= nu;
    out.conc3_pass = out.conc3_lhs >= out.conc3_rhs;
  }
  return out;
}

FlatnessDefect flatness_defect(const Field& g, const ParametricWeight& w, double t) {
  require(w.d == g.grid.d, "flatness: weight/field dimension mismatch");
  require(t > 0.0, "flatness: t must be > 0");
  FlatnessDefect out;
  double l1 = lp_norm(g, 1.0);
  if (l1 == 0.0) {
    out.degenerate = true;
    return out;
  }
  Field W(g.grid, 1);
  for (std::size_t n = 0; n < g.grid.size(); ++n) W.at(0, n) = eval_weight(w, g.grid.node(n));
  Field Hw = heat_extend(W, t);
  Field Hg = heat_extend(g, t);
  Field Habs = heat_extend(abs_field(g), t);
  out.gap = lp_norm_weighted(g, 1.0, Hw) - lp_norm_weighted(Hg, 1.0, W);
  double direct = g.grid.cell() * pairwise_sum_f(g.grid.size(), [&](std::size_t n) {
                    return (Habs.at(0, n) - Hg.abs_at(n)) * W.at(0, n);
                  });
  out.identity_defect = std::abs(out.gap - direct);

  // rank-one comparison against a = normalized integral of g
  std::vector<double> a = quadrature(g);
  double an = 0.0;
  for (int c = 0; c < g.ell; ++c) an += sqr(a[c]);
  an = std::sqrt(an);
  double dev = 0.0, habs = 0.0, hneg = 0.0;
  if (an > 0.0) {
    for (int c = 0; c < g.ell; ++c) a[c] /= an;
    Field resid(g.grid, g.ell);
    for (std::size_t n = 0; n < g.grid.size(); ++n) {
      double h = 0.0;
      for (int c = 0; c < g.ell; ++c) h += a[c] * g.at(c, n);
      habs += std::abs(h);
      hneg += std::max(-h, 0.0);
      for (int c = 0; c < g.ell; ++c) resid.at(c, n) = g.at(c, n) - a[c] * h;
    }
    dev = lp_norm(resid, 1.0) / l1;
  } else {
    dev = 1.0;
    out.sign_deviation = 1.0;
  }
  out.rank1_deviation = dev;
  if (habs > 0.0) out.sign_deviation = hneg / habs;
  return out;
}

ContractionCheck weighted_contraction(const Field& g, const Field& w, double p, double t) {
  require(p >= 1.0, "contraction: p must be >= 1");
  require(w.grid == g.grid && w.ell == 1, "contraction: weight must be scalar on the grid");
  ContractionCheck out;
  out.lhs = lp_norm_weighted(heat_extend(g, t), p, w);
  out.rhs = lp_norm_weighted(g, p, heat_extend(w, t));
  out.defect = out.rhs - out.lhs;
  return out;
}

}  // namespace heatlab
