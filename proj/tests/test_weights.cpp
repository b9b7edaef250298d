#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "heatlab/weights.hpp"

using namespace heatlab;

TEST_CASE("default parameters satisfy their own constraints") {
  for (int d : {1, 2, 3}) {
    ProofParameters pp = ProofParameters::defaults(d);
    CHECK_NOTHROW(pp.validate(d));
    CHECK(pp.theta1 == doctest::Approx(2.0 * d + 4.0));
    CHECK(pp.alpha(d) == doctest::Approx(d * (pp.p - 1.0) / pp.p));
    CHECK(pp.lambda() > 1.0);
    CHECK(pp.lambda() <= 2.0);
  }
}

TEST_CASE("parameter constraints are enforced") {
  ProofParameters pp = ProofParameters::defaults(1);
  pp.A = 4;  // must be odd
  CHECK_THROWS_AS(pp.validate(1), config_error);
  pp = ProofParameters::defaults(1);
  pp.p = 2.5;  // p in (1, 2]
  CHECK_THROWS_AS(pp.validate(1), config_error);
  pp = ProofParameters::defaults(1);
  pp.theta4 = 0.5;  // needs theta4 > d
  CHECK_THROWS_AS(pp.validate(1), config_error);
  pp = ProofParameters::defaults(2);
  pp.theta3 = 1.0;  // needs theta3 >= p theta1
  CHECK_THROWS_AS(pp.validate(2), config_error);
}

TEST_CASE("lattice weight: partition of unity") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  for (int d : {1, 2}) {
    const LatticeWeightEval& lw = shared_lattice_weight(d, 2.0 * d + 4.0);
    for (int i = 0; i < 300; ++i) {
      Vec3 x{u(rng), d >= 2 ? u(rng) : 0.0, 0.0};
      CHECK(std::abs(lw.partition_sum(x) - 1.0) <= 1e-10);
    }
  }
}

TEST_CASE("lattice weight: oracle value in d = 1") {
  // w(0.3) for theta1 = 6 with the full lattice denominator (mpmath)
  const LatticeWeightEval& lw = shared_lattice_weight(1, 6.0);
  CHECK(lw.eval({0.3, 0.0, 0.0}) ==
        doctest::Approx(0.79842369028740634).epsilon(1e-10));
}

TEST_CASE("lattice weight: certified two-sided polynomial bounds") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(-12.0, 12.0);
  for (int d : {1, 2}) {
    const LatticeWeightEval& lw = shared_lattice_weight(d, 2.0 * d + 4.0);
    CHECK(lw.cw() > 0.0);
    CHECK(lw.Cw() >= lw.cw());
    for (int i = 0; i < 200; ++i) {
      Vec3 x{u(rng), d >= 2 ? u(rng) : 0.0, 0.0};
      double env = poly_decay(std::sqrt(norm2(x, d)), 2.0 * d + 4.0);
      double w = lw.eval(x);
      CHECK(w >= lw.cw() * env * (1.0 - 1e-9));
      CHECK(w <= lw.Cw() * env * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("atom weight is the rescaled lattice weight") {
  const LatticeWeightEval& lw = shared_lattice_weight(1, 6.0);
  Vec3 x{0.37, 0.0, 0.0};
  int A = 3, k = 2;
  Idx3 j{2, 0, 0};
  double direct = lw.eval({std::pow(3.0, k) * x[0] - 2.0, 0.0, 0.0});
  CHECK(atom_weight(lw, A, k, j, x) == doctest::Approx(direct).epsilon(1e-14));
}

TEST_CASE("heated poly weight matches independent quadrature") {
  // Heat[(1+|x|)^{-7}](0.8, 0.5) in d = 1 (mpmath)
  ParametricWeight w = ParametricWeight::heated(ParametricWeight::poly_decay(1, 7.0), 0.5);
  CHECK(eval_weight(w, {0.8, 0.0, 0.0}) ==
        doctest::Approx(0.094857462099283258).epsilon(1e-8));
}

TEST_CASE("heated weight envelope constants bracket the samples") {
  for (int d : {1, 2}) {
    ParametricWeight base = ParametricWeight::poly_decay(d, d + 3.0);
    ParametricWeight w = ParametricWeight::heated(base, 0.7);
    CHECK(w.decay_theta() == doctest::Approx(base.decay_theta()));
    CHECK(w.lower_const() > 0.0);
    CHECK(w.upper_const() >= w.lower_const());
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-6.0, 6.0);
    for (int i = 0; i < 25; ++i) {
      Vec3 x{u(rng), d >= 2 ? u(rng) : 0.0, 0.0};
      double env = poly_decay(std::sqrt(norm2(x, d)), w.decay_theta());
      double v = eval_weight(w, x);
      CHECK(v >= w.lower_const() * env * (1.0 - 1e-9));
      CHECK(v <= w.upper_const() * env * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("heating composes: heat_time accumulates") {
  ParametricWeight w =
      ParametricWeight::heated(ParametricWeight::heated(ParametricWeight::poly_decay(1, 5.0), 0.25), 0.5);
  CHECK(w.heat_time() == doctest::Approx(0.75));
  CHECK(w.root().form == ParametricWeight::Form::PolyDecay);
  // composed heating equals single heating at the summed time
  ParametricWeight single = ParametricWeight::heated(ParametricWeight::poly_decay(1, 5.0), 0.75);
  for (double x : {0.0, 1.3, 4.0})
    CHECK(eval_weight(w, {x, 0.0, 0.0}) ==
          doctest::Approx(eval_weight(single, {x, 0.0, 0.0})).epsilon(1e-9));
}

TEST_CASE("smoothness function bounds") {
  for (double zeta : {0.1, 1.0}) {
    SmoothnessEstimate se = smoothness_function(ParametricWeight::poly_decay(1, 6.0), zeta);
    CHECK(se.exact);
    CHECK(se.upper == doctest::Approx(std::pow(1.0 + zeta, 6.0)));

    SmoothnessEstimate sh =
        smoothness_function(ParametricWeight::heated(ParametricWeight::poly_decay(1, 6.0), 0.4), zeta);
    CHECK(sh.lower >= 1.0);
    CHECK(sh.lower <= sh.upper * (1.0 + 1e-12));
  }
}

TEST_CASE("flat weight evaluates to one everywhere") {
  ParametricWeight w = ParametricWeight::flat(2);
  CHECK(eval_weight(w, {3.0, -1.0, 0.0}) == doctest::Approx(1.0));
  CHECK(w.decay_theta() == doctest::Approx(0.0));
}
