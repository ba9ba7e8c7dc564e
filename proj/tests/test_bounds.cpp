#include <doctest.h>

#include <cmath>

#include "scalex/bounds.hpp"
#include "scalex/marginals.hpp"
#include "scalex/rng.hpp"

using namespace scalex;

TEST_CASE("EnsembleBounds validates the envelope and derives aggregates") {
  CHECK_THROWS_AS(EnsembleBounds(Matrix(1, 2, {1.0, 2.0}), Matrix(1, 2, {0.5, 3.0})),
                  std::invalid_argument);
  CHECK_THROWS_AS(EnsembleBounds(Matrix(1, 1, {0.0}), Matrix(1, 1, {1.0})),
                  std::invalid_argument);
  CHECK_THROWS_AS(EnsembleBounds(Matrix(1, 2, 1.0), Matrix(2, 2, 2.0)), std::invalid_argument);
  EnsembleBounds env(Matrix(2, 2, {1.0, 1.5, 2.0, 1.2}), Matrix(2, 2, {1.4, 3.0, 2.0, 2.1}));
  CHECK(env.a() == 1.0);
  CHECK(env.b() == 3.0);
  CHECK(env.d() == 1.5);
  CHECK(env.width(1, 0) == 0.0);
}

TEST_CASE("lemma1 factor-ratio bounds") {
  auto [l1, u1] = lemma1_bounds(1.0, 1.0);
  CHECK(l1 == 1.0);
  CHECK(u1 == 1.0);
  auto [l2, u2] = lemma1_bounds(1.0, 4.0);
  CHECK(l2 == 0.25);
  CHECK(u2 == 2.0);
  auto [l3, u3] = lemma1_bounds(1.5, 2.5);  // the section-3 population envelope
  CHECK(l3 == doctest::Approx(0.4898979485566356).epsilon(1e-15));
  CHECK(u3 == doctest::Approx(1.0540925533894598).epsilon(1e-15));
  auto [l4, u4] = lemma1_bounds(EnsembleBounds::constant(3, 4, 1.0, 4.0));
  CHECK(l4 == 0.25);
  CHECK(u4 == 2.0);
  CHECK_THROWS_AS(lemma1_bounds(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("rho profile of the named examples") {
  MarginalProfile ds = rho_profile(Marginals::uniform(100, 100));
  CHECK(ds.rho1 == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(ds.rho2 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ds.rho3 == doctest::Approx(1.0).epsilon(1e-14));

  MarginalProfile rect = rho_profile(Marginals({3.0, 3.0}, {2.0, 2.0, 2.0}));
  CHECK(rect.rho1 == doctest::Approx(0.70710678118654746).epsilon(1e-14));
  CHECK(rect.rho2 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rect.rho3 == doctest::Approx(2.449489742783178).epsilon(1e-13));
}

TEST_CASE("rho lower bounds hold for random marginals") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    SplitMix64 rng(derive_seed(71, {seed}));
    std::size_t m = 1 + static_cast<std::size_t>(rng.next_uniform(1, 20));
    std::size_t n = 1 + static_cast<std::size_t>(rng.next_uniform(1, 20));
    std::vector<double> r(m), c(n);
    for (double& v : r) v = rng.next_uniform(0.01, 5.0);
    for (double& v : c) v = rng.next_uniform(0.01, 5.0);
    double sr = l1_norm(r), sc = l1_norm(c);
    for (double& v : c) v *= sr / sc;
    MarginalProfile p = rho_profile(Marginals(r, c));
    double floor1 = std::max(1.0 / std::sqrt(static_cast<double>(m)),
                             1.0 / std::sqrt(static_cast<double>(n)));
    CHECK(p.rho1 >= floor1 * (1.0 - 1e-12));
    CHECK(p.rho2 >= 1.0 - 1e-12);
  }
}

TEST_CASE("theorem2 constants and report") {
  Marginals m = Marginals::uniform(100, 100);
  ConcentrationReport rep = theorem2_report(1.0, 2.0, 1.0, m, 1.0);
  CHECK(rep.c_p == doctest::Approx(2.8284271247461903).epsilon(1e-15));
  CHECK(rep.c_e == doctest::Approx(23.627416997969522).epsilon(1e-15));
  // 1 - 400 exp(-12.5), with s = 100, ||r||_2 = ||c||_2 = 10
  CHECK(rep.probability_floor == doctest::Approx(0.99850933873116854).epsilon(1e-14));
  CHECK(rep.row_rel_error_bound == doctest::Approx(23.627416997969522).epsilon(1e-14));
  CHECK(rep.col_rel_error_bound == doctest::Approx(23.627416997969522).epsilon(1e-14));

  // zero-width envelope: deterministic limit, floor 1 by continuous extension
  ConcentrationReport det = theorem2_report(1.0, 2.0, 0.0, m, 0.5);
  CHECK(det.probability_floor == 1.0);
  CHECK(det.c_p == 0.0);
  CHECK(det.row_rel_error_bound == doctest::Approx(det.c_e * 0.5).epsilon(1e-14));

  CHECK_THROWS_AS(theorem2_report(1.0, 2.0, 1.0, m, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(theorem2_report(1.0, 2.0, 1.0, m, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(theorem2_report(1.0, 2.0, 1.5, m, 0.5), std::invalid_argument);

  // envelope-based entry point agrees with the aggregate one
  EnsembleBounds env = EnsembleBounds::constant(100, 100, 1.0, 2.0);
  ConcentrationReport rep2 = theorem2_report(env, m, 1.0);
  CHECK(rep2.probability_floor == rep.probability_floor);
  CHECK(rep2.c_p == rep.c_p);
}

TEST_CASE("theorem2 monotonicity and delta linearity") {
  Marginals m = Marginals::uniform(50, 50);
  double prev_floor = -1e300;
  for (double delta : {0.05, 0.1, 0.2, 0.4, 0.8, 1.0}) {
    ConcentrationReport rep = theorem2_report(1.0, 2.0, 1.0, m, delta);
    CHECK(rep.probability_floor >= prev_floor);
    prev_floor = rep.probability_floor;
    // error bounds are linear in delta
    ConcentrationReport unit = theorem2_report(1.0, 2.0, 1.0, m, 1.0);
    CHECK(std::abs(rep.row_rel_error_bound - delta * unit.row_rel_error_bound) <=
          1e-12 * unit.row_rel_error_bound);
    CHECK(std::abs(rep.col_rel_error_bound - delta * unit.col_rel_error_bound) <=
          1e-12 * unit.col_rel_error_bound);
  }

  // nondecreasing in s at fixed l2 norms: r(t) = (t, sqrt(4 - t^2)) keeps
  // ||r||_2 = 2 while ||r||_1 grows with t on (0, sqrt(2)]
  prev_floor = -1e300;
  for (double t : {0.5, 0.8, 1.1, 1.4}) {
    std::vector<double> v{t, std::sqrt(4.0 - t * t)};
    Marginals mt(v, v);
    ConcentrationReport rep = theorem2_report(1.0, 2.0, 1.0, mt, 0.9);
    CHECK(rep.probability_floor >= prev_floor);
    prev_floor = rep.probability_floor;
  }
}

TEST_CASE("lemma2 tail bound") {
  Marginals m = Marginals::uniform(100, 100);
  // widths all 1 on [1,2]: C = 2, denom = 100
  EnsembleBounds env = EnsembleBounds::constant(100, 100, 1.0, 2.0);
  CHECK(lemma2_tail(env, m, 0.1, Axis::row, 0) ==
        doctest::Approx(1.2130613194252668).epsilon(1e-14));
  CHECK(lemma2_tail(env, m, 0.5, Axis::row, 7) ==
        doctest::Approx(7.4533063441573419e-06).epsilon(1e-13));
  CHECK(lemma2_tail(env, m, 0.5, Axis::col, 3) ==
        doctest::Approx(7.4533063441573419e-06).epsilon(1e-13));
  CHECK(lemma2_tail_uniform(1.0, 2.0, 1.0, m, 0.5, Axis::row, 0) ==
        doctest::Approx(7.4533063441573419e-06).epsilon(1e-13));

  // zero-width row: deterministic sum, bound 0
  EnsembleBounds det = EnsembleBounds::constant(4, 4, 1.5, 1.5);
  CHECK(lemma2_tail(det, Marginals::uniform(4, 4), 0.2, Axis::row, 1) == 0.0);

  CHECK_THROWS_AS(lemma2_tail(env, m, 0.0, Axis::row, 0), std::invalid_argument);
  CHECK_THROWS_AS(lemma2_tail(env, m, 0.1, Axis::row, 100), std::invalid_argument);
  CHECK_THROWS_AS(lemma2_tail(env, Marginals::uniform(3, 3), 0.1, Axis::row, 0),
                  std::invalid_argument);
}

TEST_CASE("lemma3 stability bounds") {
  // eps -> 0: both bounds vanish
  auto [r0, c0] = lemma3_bound(1e-12, 1.0, 1.0, 1.0, 1, 1.0, 1, 1.0, 1.0, 1.0);
  CHECK(r0 < 1e-11);
  CHECK(c0 < 1e-11);

  // doubly-stochastic shape with unit constants: 0.1/0.9 + 0.4
  auto [r1, c1] = lemma3_bound(0.1, 1.0, 1.0, 4.0, 2, 2.0, 4, 1.0, 1.0, 1.0);
  CHECK(r1 == doctest::Approx(0.51111111111111118).epsilon(1e-14));
  CHECK(c1 == doctest::Approx(0.51111111111111118).epsilon(1e-14));

  // eps=0.5, a=1, b=4, s/(M min_r) = 2, C1 = C2 = 0.5 -> 1 + 8/0.125 = 65
  auto [r2, c2] = lemma3_bound(0.5, 1.0, 4.0, 2.0, 1, 1.0, 1, 1.0, 0.5, 0.5);
  CHECK(r2 == doctest::Approx(65.0).epsilon(1e-12));
  CHECK(c2 == doctest::Approx(65.0).epsilon(1e-12));

  CHECK_THROWS_AS(lemma3_bound(1.0, 1.0, 2.0, 1.0, 1, 1.0, 1, 1.0, 1.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(lemma3_bound(0.5, -1.0, 2.0, 1.0, 1, 1.0, 1, 1.0, 1.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("error_measure from the definition") {
  std::vector<double> ones{1.0, 1.0};
  std::vector<double> xt1{1.1, 0.9}, xt2{1.05, 1.0}, yt{0.8}, yy{1.0};
  std::vector<double> short_vec{1.0}, with_zero{1.0, 0.0};
  CHECK(error_measure(ones, ones, ones, ones) == 0.0);
  CHECK(error_measure(xt1, ones, ones, ones) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(error_measure(xt2, yt, ones, yy) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK_THROWS_AS(error_measure(short_vec, ones, ones, ones), std::invalid_argument);
  CHECK_THROWS_AS(error_measure(ones, ones, with_zero, ones), std::invalid_argument);
}

TEST_CASE("error_measure is stable under a common gauge move") {
  std::vector<double> xt{1.3, 0.7, 1.1}, yt{0.9, 1.2}, x{1.0, 1.0, 1.0}, y{1.0, 1.0};
  double base = error_measure(xt, yt, x, y);
  for (double alpha : {0.2, 5.0}) {
    auto scale = [alpha](std::vector<double> v, bool inverse) {
      for (double& e : v) e = inverse ? e / alpha : e * alpha;
      return v;
    };
    double moved = error_measure(scale(xt, false), scale(yt, true), scale(x, false),
                                 scale(y, true));
    CHECK(moved == doctest::Approx(base).epsilon(1e-14));
  }
}

TEST_CASE("evaluators are deterministic") {
  Marginals m = Marginals::uniform(30, 40, 0.7, 0.525);
  ConcentrationReport a = theorem2_report(1.1, 2.7, 0.9, m, 0.37);
  ConcentrationReport b = theorem2_report(1.1, 2.7, 0.9, m, 0.37);
  CHECK(a.probability_floor == b.probability_floor);
  CHECK(a.row_rel_error_bound == b.row_rel_error_bound);
  EnsembleBounds env = EnsembleBounds::constant(30, 40, 1.1, 2.7);
  CHECK(lemma2_tail(env, m, 0.21, Axis::col, 5) == lemma2_tail(env, m, 0.21, Axis::col, 5));
}
