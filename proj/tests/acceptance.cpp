// Acceptance gate: one line per criterion, exit code = number of failures.
#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "heatlab/atoms.hpp"
#include "heatlab/norms.hpp"
#include "heatlab/qp.hpp"
#include "heatlab/reports.hpp"
#include "heatlab/spectral.hpp"

using namespace heatlab;

namespace {

struct Criterion {
  std::string name;
  std::function<std::string()> run;  // returns "" on pass, reason on fail
};

PointMeasure random_measure(std::mt19937_64& rng, int d, int max_atoms) {
  std::uniform_real_distribution<double> pos(-2.0, 2.0), mass(0.2, 1.0);
  std::vector<PointMeasure::Atom> atoms;
  int n = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_atoms));
  for (int i = 0; i < n; ++i) {
    Vec3 x{pos(rng), d >= 2 ? pos(rng) : 0.0, 0.0};
    atoms.push_back({x, mass(rng)});
  }
  return PointMeasure(d, atoms);
}

std::string fmt(double x) { return format_g17(x); }

// 1. derivative identity on randomized instances
std::string c01_bct_identity() {
  std::mt19937_64 rng(1001);
  std::uniform_real_distribution<double> tpick(0.15, 0.85);
  double worst = 0.0;
  const double ps[] = {1.3, 1.7, 2.0};
  for (int inst = 0; inst < 100; ++inst) {
    int d = 1 + inst % 2;
    PointMeasure mu = random_measure(rng, d, 8);
    ParametricWeight G = ParametricWeight::poly_decay(d, 4.0 * d + 9.0);
    double p = ps[inst % 3];
    BctDefect bd = bct_identity_defect(mu, G, p, tpick(rng));
    worst = std::max(worst, bd.defect);
  }
  if (worst > 1e-3) return "worst relative defect " + fmt(worst);
  return "";
}

// 2. Q_p is constant on delta measures; flat-weight closed form
std::string c02_delta_constancy() {
  PointMeasure delta(1, {{{0.0, 0.0, 0.0}, 1.0}});
  ParametricWeight G = ParametricWeight::poly_decay(1, 13.0);
  double lo = 1e300, hi = 0.0;
  for (int i = 1; i <= 10; ++i) {
    double t = 0.1 * i;
    double v = qp(delta, G, 2.0, t);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi - lo > 1e-6 * hi) return "relative variation " + fmt((hi - lo) / hi);

  double flat = qp(delta, ParametricWeight::flat(1), 2.0, 0.5);
  double ref = 1.0 / std::sqrt(8.0 * std::numbers::pi);
  if (std::abs(flat - ref) > 1e-8 * ref)
    return "flat closed form off by " + fmt(std::abs(flat - ref) / ref);
  return "";
}

// 3. monotonicity over random positive measures
std::string c03_monotonicity() {
  std::mt19937_64 rng(1003);
  std::vector<double> tgrid = {0.1, 0.25, 0.4, 0.55, 0.7, 0.85, 1.0};
  double worst = 0.0;
  for (int inst = 0; inst < 100; ++inst) {
    int d = 1 + inst % 2;
    PointMeasure mu = random_measure(rng, d, 5);
    ParametricWeight G = ParametricWeight::poly_decay(d, 4.0 * d + 9.0);
    MonotonicityScan scan = monotonicity_scan(mu, G, 2.0, tgrid);
    worst = std::min(worst, scan.worst_slack);
    if (!scan.pass) return "instance " + std::to_string(inst) + " slack " + fmt(scan.worst_slack);
  }
  return "";
}

// 4. weighted heat contraction + rank-one equality case
std::string c04_contraction() {
  std::mt19937_64 rng(1004);
  std::uniform_real_distribution<double> u(-1.0, 1.0), tpick(0.05, 1.0);
  GridSpec g = make_grid(1, 512, 8.0);
  GridSpec g2 = make_grid(2, 64, 8.0);
  const double ps[] = {1.0, 1.5, 2.0};
  for (int inst = 0; inst < 100; ++inst) {
    const GridSpec& gg = inst % 2 ? g2 : g;
    Field f(gg, 1 + static_cast<int>(rng() % 2));
    for (double& v : f.data) v = u(rng);
    f = heat_extend(f, 1e-3);
    Field w(gg, 1);
    for (std::size_t n = 0; n < gg.size(); ++n)
      w.at(0, n) = poly_decay(std::sqrt(norm2(gg.node(n), gg.d)), 2.0 * gg.d + 4.0);
    ContractionCheck cc = weighted_contraction(f, w, ps[inst % 3], tpick(rng));
    if (cc.defect < -1e-9 * cc.rhs)
      return "instance " + std::to_string(inst) + " defect " + fmt(cc.defect / cc.rhs);
  }
  // equality: nonnegative rank-one data at p = 1 (self-adjointness is exact)
  Field pos = gen_near_delta(g, 0.4, {1.0});
  Field w(g, 1);
  for (std::size_t n = 0; n < g.size(); ++n)
    w.at(0, n) = poly_decay(std::abs(g.node(n)[0]), 6.0);
  ContractionCheck eq = weighted_contraction(pos, w, 1.0, 0.3);
  if (std::abs(eq.defect) > 1e-9 * eq.rhs)
    return "equality-case defect " + fmt(eq.defect / eq.rhs);
  return "";
}

// 5. Lorentz norms: indicator closed form, L_{p,p} = L_p, splitting
std::string c05_lorentz() {
  GridSpec g = make_grid(1, 256, 4.0);
  Field ind(g, 1);
  for (std::size_t n = 10; n < 74; ++n) ind.at(0, n) = 1.0;
  double m = 64 * g.h();
  for (double p : {1.0, 1.5, 2.0}) {
    double got = lorentz_norm(ind, p, 1.0);
    double ref = p * std::pow(m, 1.0 / p);
    if (std::abs(got - ref) > 1e-12 * ref)
      return "indicator p=" + fmt(p) + " off by " + fmt(std::abs(got - ref) / ref);
  }
  std::mt19937_64 rng(1005);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int inst = 0; inst < 200; ++inst) {
    GridSpec gg = make_grid(1 + inst % 2, inst % 2 ? 16 : 128, 4.0);
    Field f(gg, 1);
    for (double& v : f.data) v = u(rng);
    for (double p : {1.0, 1.7, 2.0, 2.5}) {
      double a = lorentz_norm(f, p, p), b = lp_norm(f, p);
      if (std::abs(a - b) > 1e-10 * std::max(a, b)) return "L_{p,p} != L_p, p = " + fmt(p);
    }
  }
  for (int inst = 0; inst < 500; ++inst) {
    GridSpec gg = make_grid(1, 128, 4.0);
    Field f(gg, 1);
    for (double& v : f.data) v = u(rng);
    int nregions = 2 + static_cast<int>(rng() % 5);
    std::vector<std::uint8_t> region(gg.size());
    for (auto& r : region) r = static_cast<std::uint8_t>(rng() % nregions);
    double defect = lorentz_split_defect(f, 2.0, 1.0, region, nregions);
    if (defect < -1e-10) return "split defect " + fmt(defect);
  }
  return "";
}

// 6. lattice partition of unity at every node and scale
std::string c06_partition() {
  double worst = 0.0;
  for (int d : {1, 2}) {
    const LatticeWeightEval& lw = shared_lattice_weight(d, 2.0 * d + 4.0);
    GridSpec g = make_grid(d, d == 1 ? 512 : 48, 8.0);
    for (int k = 0; k <= 5; ++k) {
      double Ak = std::pow(3.0, k);
      for (std::size_t n = 0; n < g.size(); ++n) {
        Vec3 x = g.node(n);
        for (int a = 0; a < d; ++a) x[a] *= Ak;
        worst = std::max(worst, std::abs(lw.partition_sum(x) - 1.0));
      }
    }
  }
  if (worst > 1e-10) return "max deviation " + fmt(worst);
  return "";
}

// 7. heated-weight envelopes certified at every sample
std::string c07_heated_envelope() {
  for (int d : {1, 2}) {
    GridSpec g = make_grid(d, d == 1 ? 512 : 96, 8.0);
    for (double theta : {d + 1.0, 2.0 * d + 4.0}) {
      ParametricWeight w = ParametricWeight::poly_decay(d, theta);
      for (double t : {1e-4, 0.5, 1.0, 2.0}) {
        try {
          heat_weight(w, t, g);  // throws assertion_error on a violated bound
        } catch (const std::exception& e) {
          return "d=" + std::to_string(d) + " theta=" + fmt(theta) + " t=" + fmt(t) + ": " +
                 e.what();
        }
      }
    }
  }
  return "";
}

// 8. horizontal graph combinatorics on random star tables
std::string c08_graphs() {
  std::mt19937_64 rng(1008);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ProofParameters pp = ProofParameters::defaults(1);
  for (int trial = 0; trial < 1000; ++trial) {
    std::size_t n = 3 + rng() % 60;
    JBox box{1, {0, 0, 0}, {static_cast<std::int64_t>(n) - 1, 0, 0}};
    AtomLevel lvl(0, box);
    for (std::size_t j = 0; j < n; ++j) {
      double s = (rng() % 10 == 0) ? 0.0 : std::pow(u(rng), 3.0 * u(rng));
      lvl.star[j] = lvl.star0[j] = lvl.star6[j] = s;
    }
    classify_level(lvl, pp.eps);
    compute_maximal(lvl, pp.theta4);
    compute_saturation(lvl, pp.Ksat);
    try {
      HorizontalGraph g = build_horizontal_graph(lvl, pp.lambda(), pp.theta4);
      verify_horizontal_graph(g, lvl);  // 2-paths + source saturation
      for (std::size_t j = 0; j < n; ++j) {
        if (lvl.star[j] <= 0.0 || g.source_of[j] >= 0) continue;
        bool outgoing = false;
        for (std::size_t i = 0; i < n; ++i)
          if (g.source_of[i] == static_cast<std::int64_t>(j)) outgoing = true;
        if (!outgoing && !lvl.saturated[j])
          return "trial " + std::to_string(trial) + ": arrowless vertex not saturated";
      }
    } catch (const std::exception& e) {
      return "trial " + std::to_string(trial) + ": " + e.what();
    }
  }
  return "";
}

// 9. near-delta divergence vs bounded families
std::string c09_divergence() {
  ProofParameters pp1 = ProofParameters::defaults(1, 3, 2.0, 6);
  GridSpec g1 = make_grid(1, 32768, 8.0);
  Field nd = gen_near_delta(g1, 2.0 * g1.h(), {1.0});
  EmbeddingReport rep = embedding_report(build_ladder(nd, 3, 6), pp1);
  double c = rep.partial[2] - rep.partial[1];
  if (rep.partial.back() < 0.8 * c * 6.0)
    return "near-delta growth " + fmt(rep.partial.back()) + " < " + fmt(0.8 * c * 6.0);

  auto spread_ok = [](const EmbeddingReport& r) {
    return r.partial.back() <= 2.0 * r.partial[2];
  };
  ProofParameters pp2 = ProofParameters::defaults(2, 3, 2.0, 6);
  GridSpec g2 = make_grid(2, 1024, 8.0);
  EmbeddingReport vort =
      embedding_report(build_ladder(gen_divfree_field(g2, {0, 0, 0}, 1.0, 1.0), 3, 6), pp2);
  if (!spread_ok(vort))
    return "vortex spread " + fmt(vort.partial.back() / vort.partial[2]);
  EmbeddingReport gr2 =
      embedding_report(build_ladder(gen_gradient_field(g2, {0, 0, 0}, 1.0, 1.0), 3, 6), pp2);
  if (!spread_ok(gr2)) return "d=2 gradient spread " + fmt(gr2.partial.back() / gr2.partial[2]);
  EmbeddingReport gr1 =
      embedding_report(build_ladder(gen_gradient_field(g1, {0, 0, 0}, 1.0, 1.0), 3, 6), pp1);
  if (!spread_ok(gr1)) return "d=1 gradient spread " + fmt(gr1.partial.back() / gr1.partial[2]);
  return "";
}

// 10. semigroup + Riesz + Besov band identities
std::string c10_spectral() {
  GridSpec g = make_grid(1, 1024, 16.0);
  Field f = gen_dipole(g, 0.4, 1.0);
  SemigroupDefect sd = semigroup_defect(f, 0.2, 0.5);
  if (sd.defect > 1e-10) return "semigroup defect " + fmt(sd.defect);

  // scaling: I_alpha[f(./r)](rx) = r^alpha I_alpha[f](x); scaling the domain
  // with the function keeps the frequency grids aligned
  double alpha = 0.5, r = 2.0;
  GridSpec grr = make_grid(1, 1024, r * 16.0);
  Field fr(grr, 1);
  auto bump = [](double x) { return x * std::exp(-x * x); };
  Field fb(g, 1);
  for (std::size_t n = 0; n < g.size(); ++n) {
    fb.at(0, n) = bump(g.node(n)[0]);
    fr.at(0, n) = bump(grr.node(n)[0] / r);
  }
  Field ia = riesz_potential(fb, alpha).field;
  Field iar = riesz_potential(fr, alpha).field;
  double worst = 0.0, scale = sup_norm(iar);
  for (std::size_t n = 0; n < g.size(); ++n)
    worst = std::max(worst, std::abs(iar.at(0, n) - std::pow(r, alpha) * ia.at(0, n)));
  if (worst > 1e-6 * scale) return "riesz scaling defect " + fmt(worst / scale);

  Field ab = riesz_potential(riesz_potential(fb, 0.3).field, 0.45).field;
  Field sum = riesz_potential(fb, 0.75).field;
  for (std::size_t n = 0; n < g.size(); ++n)
    if (std::abs(ab.at(0, n) - sum.at(0, n)) > 1e-10 * sup_norm(sum))
      return "riesz composition defect";

  // band telescoping (exact on a field limited to an interior band)
  BandFilter filter;
  Field fl = besov_band(fb, max_resolvable_band(g, filter) - 1, filter);
  Field acc(g, 1);
  for (int k = min_active_band(g, filter); k <= max_resolvable_band(g, filter); ++k) {
    Field b = besov_band(fl, k, filter);
    for (std::size_t n = 0; n < g.size(); ++n) acc.at(0, n) += b.at(0, n);
  }
  double bworst = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n)
    bworst = std::max(bworst, std::abs(acc.at(0, n) - fl.at(0, n)));
  if (bworst > 1e-10 * sup_norm(fl)) return "band telescope defect " + fmt(bworst / sup_norm(fl));
  return "";
}

// 11. cancellation checker
std::string c11_cancellation() {
  for (int d : {2, 3}) {
    CancelResult r = cancellation_defect(gradient_symbol(d), 64);
    if (!(r.defect > 0.5)) return "gradient d=" + std::to_string(d) + " defect " + fmt(r.defect);
  }
  CancelResult dv = cancellation_defect(divfree_symbol(), 64);
  if (!(dv.defect > 0.5)) return "divfree defect " + fmt(dv.defect);
  CancelResult g1 = cancellation_defect(gradient_symbol(1), 8);
  if (g1.defect > 1e-8) return "d=1 gradient defect " + fmt(g1.defect);
  if (g1.witness.empty()) return "d=1 gradient witness missing";
  return "";
}

// 12. improved exponent: zero on deltas, positive on the line measure
std::string c12_improved_exponent() {
  std::vector<double> tgrid = {0.15, 0.3, 0.45, 0.6, 0.75, 0.9, 1.0};
  PointMeasure delta(1, {{{0.0, 0.0, 0.0}, 1.0}});
  ImprovedExponent del =
      improved_exponent(delta, ParametricWeight::poly_decay(1, 13.0), 2.0, tgrid);
  if (del.worst_point > 1e-6) return "delta exponent " + fmt(del.worst_point);

  ImprovedExponent lin = improved_exponent(line_sample_measure(2, 8.0, 21),
                                           ParametricWeight::poly_decay(2, 17.0), 2.0, tgrid);
  if (!(lin.worst_point > 0.0)) return "line-measure exponent " + fmt(lin.worst_point);
  std::printf("    [line measure margin: delta_hat = %s, lsq %s]\n",
              fmt(lin.worst_point).c_str(), fmt(lin.lsq_fit).c_str());
  return "";
}

// 13. telescoping budget on every generator family
std::string c13_telescoping() {
  ProofParameters pp1 = ProofParameters::defaults(1, 3, 2.0, 5);
  GridSpec g1 = make_grid(1, 4096, 8.0);
  std::vector<std::pair<std::string, Field>> inputs;
  inputs.emplace_back("near_delta", gen_near_delta(g1, 0.02, {1.0}));
  inputs.emplace_back("dipole", gen_dipole(g1, 0.15, 0.6));
  inputs.emplace_back("gradient_d1", gen_gradient_field(g1, {0.2, 0, 0}, 0.5, 1.0));
  GridSpec g2 = make_grid(2, 256, 8.0);
  ProofParameters pp2 = ProofParameters::defaults(2, 3, 2.0, 5);
  inputs.emplace_back("divfree", gen_divfree_field(g2, {0, 0, 0}, 0.8, 1.0));
  inputs.emplace_back("gradient_d2", gen_gradient_field(g2, {0, 0, 0}, 0.8, 1.0));
  for (const auto& [name, f] : inputs) {
    const ProofParameters& pp = f.grid.d == 1 ? pp1 : pp2;
    AtomTable table = build_atom_table(build_ladder(f, 3, 5), pp);
    TelescopingAudit audit = telescoping_audit(table, lp_norm(f, 1.0));
    if (!audit.pass)
      return name + ": total " + fmt(audit.total) + " > budget " + fmt(audit.budget);
  }
  return "";
}

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {"derivative identity (randomized)", c01_bct_identity},
      {"delta constancy + flat closed form", c02_delta_constancy},
      {"Q_p monotonicity (randomized)", c03_monotonicity},
      {"weighted heat contraction", c04_contraction},
      {"Lorentz golden values", c05_lorentz},
      {"partition of unity", c06_partition},
      {"heated-weight envelopes", c07_heated_envelope},
      {"graph combinatorics", c08_graphs},
      {"divergence vs boundedness", c09_divergence},
      {"semigroup + spectral identities", c10_spectral},
      {"cancellation checker", c11_cancellation},
      {"improved exponent", c12_improved_exponent},
      {"telescoping budget", c13_telescoping},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    auto t0 = std::chrono::steady_clock::now();
    std::string reason;
    try {
      reason = criteria[i].run();
    } catch (const std::exception& e) {
      reason = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (reason.empty()) {
      std::printf("criterion %02zu %-40s PASS  (%.1f s)\n", i + 1, criteria[i].name.c_str(), secs);
    } else {
      std::printf("criterion %02zu %-40s FAIL  (%.1f s): %s\n", i + 1, criteria[i].name.c_str(),
                  secs, reason.c_str());
      ++failures;
    }
    std::fflush(stdout);
  }
  return failures;
}
