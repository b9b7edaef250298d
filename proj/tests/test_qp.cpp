#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>

#include "heatlab/norms.hpp"
#include "heatlab/qp.hpp"

using namespace heatlab;

namespace {
PointMeasure delta0(int d) { return PointMeasure(d, {{{0.0, 0.0, 0.0}, 1.0}}); }

PointMeasure two_atoms() {
  return PointMeasure(1, {{{-0.3, 0.0, 0.0}, 0.6}, {{0.7, 0.0, 0.0}, 0.4}});
}
}  // namespace

TEST_CASE("flat weight: closed form (4 pi)^{-d(p-1)/2} p^{-d/2}") {
  for (int d : {1, 2}) {
    ParametricWeight flat = ParametricWeight::flat(d);
    double p = 2.0;
    double ref = std::pow(4.0 * std::numbers::pi, -d * (p - 1.0) / 2.0) * std::pow(p, -d / 2.0);
    for (double t : {0.1, 0.55, 1.0})
      CHECK(qp(delta0(d), flat, p, t) == doctest::Approx(ref).epsilon(1e-8));
  }
  // the d = 1, p = 2 value is 1/sqrt(8 pi)
  CHECK(qp(delta0(1), ParametricWeight::flat(1), 2.0, 0.5) ==
        doctest::Approx(0.19947114020071634).epsilon(1e-8));
}

TEST_CASE("delta constancy under polynomial weights") {
  // Q_p[delta_0] is exactly t-independent; golden values from mpmath
  ParametricWeight G1 = ParametricWeight::poly_decay(1, 13.0);
  for (double t : {0.1, 0.5, 0.9, 1.0})
    CHECK(qp(delta0(1), G1, 2.0, t) == doctest::Approx(0.013146888905542980).epsilon(1e-7));

  ParametricWeight G2 = ParametricWeight::poly_decay(2, 17.0);
  for (double t : {0.2, 0.7, 1.0})
    CHECK(qp(delta0(2), G2, 1.5, t) == doctest::Approx(0.00058062754372385533).epsilon(1e-7));
}

TEST_CASE("two-atom golden values") {
  ParametricWeight G = ParametricWeight::poly_decay(1, 13.0);
  CHECK(qp(two_atoms(), G, 2.0, 0.5) == doctest::Approx(0.011000365537783981).epsilon(1e-8));
  BctRhs rhs = bct_rhs(two_atoms(), G, 2.0, 0.5);
  CHECK_FALSE(rhs.collapsed);
  CHECK(rhs.value == doctest::Approx(0.0024094758725486653).epsilon(1e-8));
}

TEST_CASE("derivative identity on random measures") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> pos(-2.0, 2.0), mass(0.2, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    int d = 1 + trial % 2;
    std::vector<PointMeasure::Atom> atoms;
    for (int i = 0; i < 2 + trial % 3; ++i) {
      Vec3 x{pos(rng), d >= 2 ? pos(rng) : 0.0, 0.0};
      atoms.push_back({x, mass(rng)});
    }
    PointMeasure mu(d, atoms);
    ParametricWeight G = ParametricWeight::poly_decay(d, 4.0 * d + 9.0);
    BctDefect bd = bct_identity_defect(mu, G, 2.0, 0.4);
    CHECK(bd.defect <= 1e-3);
  }
}

TEST_CASE("single atom: variance term vanishes identically") {
  ParametricWeight G = ParametricWeight::poly_decay(1, 13.0);
  BctRhs rhs = bct_rhs(delta0(1), G, 2.0, 0.3);
  CHECK(rhs.value == 0.0);
  BctDefect bd = bct_identity_defect(delta0(1), G, 2.0, 0.3);
  CHECK(bd.defect <= 1e-3);
}

TEST_CASE("monotonicity scan on random positive measures") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> pos(-1.5, 1.5), mass(0.1, 1.0);
  std::vector<double> tgrid = {0.1, 0.3, 0.5, 0.7, 0.9, 1.0};
  for (int trial = 0; trial < 8; ++trial) {
    int d = 1 + trial % 2;
    std::vector<PointMeasure::Atom> atoms;
    for (int i = 0; i < 1 + trial % 4; ++i) {
      Vec3 x{pos(rng), d >= 2 ? pos(rng) : 0.0, 0.0};
      atoms.push_back({x, mass(rng)});
    }
    PointMeasure mu(d, atoms);
    ParametricWeight G = ParametricWeight::poly_decay(d, 4.0 * d + 9.0);
    MonotonicityScan scan = monotonicity_scan(mu, G, 2.0, tgrid);
    CHECK(scan.pass);
    CHECK(scan.worst_slack >= -1e-8);
  }
}

TEST_CASE("improved exponent: zero on deltas, positive on a line measure") {
  std::vector<double> tgrid = {0.2, 0.4, 0.6, 0.8, 1.0};
  ParametricWeight G1 = ParametricWeight::poly_decay(1, 13.0);
  ImprovedExponent del = improved_exponent(delta0(1), G1, 2.0, tgrid);
  CHECK(del.worst_point <= 1e-6);

  ParametricWeight G2 = ParametricWeight::poly_decay(2, 17.0);
  PointMeasure line = line_sample_measure(2, 8.0, 21);
  ImprovedExponent lin = improved_exponent(line, G2, 2.0, tgrid);
  CHECK(lin.worst_point > 0.0);
  CHECK(lin.lsq_fit > 0.0);
}

TEST_CASE("line sample measure geometry") {
  PointMeasure mu = line_sample_measure(2, 8.0, 21);
  CHECK(mu.atoms.size() == 21);
  CHECK(mu.total_mass() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(mu.atoms.front().x[0] == doctest::Approx(-4.0));
  CHECK(mu.atoms.back().x[0] == doctest::Approx(4.0));
  for (const auto& a : mu.atoms) CHECK(a.x[1] == 0.0);
}

TEST_CASE("concentration diagnostic finds the heavy cell of a near-delta") {
  // one dominant atom plus faint noise
  PointMeasure mu(2, {{{0.1, 0.2, 0.0}, 1.0}, {{3.0, -2.0, 0.0}, 1e-4}});
  ParametricWeight G = ParametricWeight::poly_decay(2, 17.0);
  ConcentrationDiagnostic cd = concentration_diagnostic(mu, G, 2.0, 0.5, 2.0, 0.1);
  CHECK(cd.conc1 > 0.0);
  CHECK(cd.has_x0);
  CHECK(std::abs(cd.x0[0] - 0.1) <= 0.5);
  CHECK(std::abs(cd.x0[1] - 0.2) <= 0.5);
  CHECK(cd.conc3_pass);
}

TEST_CASE("flatness defect: nonnegative rank-one profiles are exactly flat") {
  GridSpec g = make_grid(1, 256, 8.0);
  Field f = gen_near_delta(g, 0.5, {1.0});
  ParametricWeight w = ParametricWeight::poly_decay(1, 6.0);
  FlatnessDefect fd = flatness_defect(f, w, 0.2);
  CHECK_FALSE(fd.degenerate);
  CHECK(std::abs(fd.gap) <= 1e-9 * lp_norm(f, 1.0));
  CHECK(fd.rank1_deviation <= 1e-12);
  CHECK(fd.sign_deviation <= 1e-12);

  // a dipole is far from rank-one nonnegative: the gap opens up
  Field dip = gen_dipole(g, 0.4, 1.0);
  FlatnessDefect fdip = flatness_defect(dip, w, 0.2);
  CHECK(fdip.gap > 1e-3 * lp_norm(dip, 1.0));
  CHECK(fdip.sign_deviation > 0.1);
}

TEST_CASE("weighted contraction inequality") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  GridSpec g = make_grid(1, 256, 8.0);
  for (int trial = 0; trial < 20; ++trial) {
    Field f(g, 1 + trial % 2);
    for (double& v : f.data) v = u(rng);
    f = heat_extend(f, 1e-3);
    Field w(g, 1);
    for (std::size_t n = 0; n < g.size(); ++n)
      w.at(0, n) = poly_decay(std::abs(g.node(n)[0]), 6.0);
    for (double p : {1.0, 1.5, 2.0}) {
      ContractionCheck cc = weighted_contraction(f, w, p, 0.3);
      CHECK(cc.defect >= -1e-9 * cc.rhs);
    }
  }
}
