#include <catch2/catch_amalgamated.hpp>

#include "pathlp/instance_gen.hpp"
#include "pathlp/lp.hpp"
#include "support/test_util.hpp"

using namespace pathlp;
using testutil::make_rng;
using testutil::random_positive;

namespace {

LpInstance tiny_lp() {
  DenseMatrix a(1, 2);
  a(0, 0) = 1.0;
  a(0, 1) = 1.0;
  return LpInstance(a, {1.0}, {1.0, 2.0});
}

}  // namespace

TEST_CASE("LpInstance rejects invalid shapes and ranks") {
  DenseMatrix tall(3, 2);
  tall(0, 0) = 1.0;
  tall(1, 1) = 1.0;
  tall(2, 0) = 1.0;
  CHECK_THROWS_AS(LpInstance(tall, {1.0, 1.0, 1.0}, {1.0, 1.0}), RankDeficient);

  DenseMatrix dup(2, 3);
  for (std::size_t j = 0; j < 3; ++j) {
    dup(0, j) = 1.0;
    dup(1, j) = 1.0;  // duplicated row
  }
  CHECK_THROWS_AS(LpInstance(dup, {1.0, 1.0}, {1.0, 1.0, 1.0}), RankDeficient);

  DenseMatrix nan_mat(1, 2);
  nan_mat(0, 0) = std::nan("");
  nan_mat(0, 1) = 1.0;
  CHECK_THROWS_AS(LpInstance(nan_mat, {1.0}, {1.0, 1.0}),
                  PreconditionViolation);
}

TEST_CASE("LpParameters validation") {
  LpParameters p;
  p.inner_radius = 2.0;
  p.outer_radius = 1.0;
  p.lipschitz = 1.0;
  CHECK_THROWS_AS(p.validate(), PreconditionViolation);

  p.inner_radius = 0.5;
  p.outer_radius = 1.0;
  p.lipschitz = 1.0;
  CHECK_NOTHROW(p.validate());
  CHECK_THROWS_AS(p.validate_against({3.0, 4.0}), PreconditionViolation);
  p.lipschitz = 5.0;
  CHECK_NOTHROW(p.validate_against({3.0, 4.0}));
}

TEST_CASE("PrimalDualPoint enforces feasibility at construction") {
  LpInstance lp = tiny_lp();
  // feasible: x = (0.5, 0.5), y = 0, s = c
  CHECK_NOTHROW(PrimalDualPoint(lp, {0.5, 0.5}, {1.0, 2.0}, {0.0}));
  // primal infeasible
  CHECK_THROWS_AS(PrimalDualPoint(lp, {0.7, 0.7}, {1.0, 2.0}, {0.0}),
                  PreconditionViolation);
  // dual infeasible
  CHECK_THROWS_AS(PrimalDualPoint(lp, {0.5, 0.5}, {2.0, 2.0}, {0.0}),
                  PreconditionViolation);
  // not strictly positive
  CHECK_THROWS_AS(PrimalDualPoint(lp, {1.0, 0.0}, {1.0, 2.0}, {0.0}),
                  PreconditionViolation);
}

TEST_CASE("PathState caches mu bit for bit") {
  LpInstance lp = tiny_lp();
  PrimalDualPoint p(lp, {0.25, 0.75}, {1.0 / 3.0, 2.0 - 2.0 / 3.0},
                    {2.0 / 3.0});
  PathState st(p, 0.5);
  REQUIRE(st.mu().size() == 2);
  CHECK(st.mu()[0] == p.x()[0] * p.s()[0]);
  CHECK(st.mu()[1] == p.x()[1] * p.s()[1]);
}

TEST_CASE("duality_gap equals the objective difference") {
  // x = (1,1), s = (2,3): A = [1 1], b = 2, c = s with y = 0
  DenseMatrix a(1, 2);
  a(0, 0) = 1.0;
  a(0, 1) = 1.0;
  LpInstance lp(a, {2.0}, {2.0, 3.0});
  PrimalDualPoint p(lp, {1.0, 1.0}, {2.0, 3.0}, {0.0});
  CHECK(duality_gap(lp, p) == Catch::Approx(5.0));

  // toward complementarity the gap vanishes with mu
  LpInstance tiny = tiny_lp();
  for (double tau : {1e-2, 1e-4, 1e-6}) {
    PrimalDualPoint q = central_path_oracle(tiny, {tau, tau});
    const double gap = duality_gap(tiny, q);
    CHECK(gap == Catch::Approx(2.0 * tau).epsilon(1e-6));
    const double direct = dot(tiny.c(), q.x()) - dot(tiny.b(), q.y());
    CHECK(std::fabs(gap - direct) <= 1e-8 * (1.0 + std::fabs(gap)));
    CHECK(gap >= -1e-8);
  }
}

TEST_CASE("l2_centrality") {
  {
    // exactly on the path
    DenseMatrix a(1, 1);
    a(0, 0) = 1.0;
    LpInstance lp(a, {2.0}, {0.5});
    PathState st(PrimalDualPoint(lp, {2.0}, {0.5}, {0.0}), 1.0);
    CHECK(l2_centrality(st) == Catch::Approx(0.0).margin(1e-15));
  }
  {
    // scalar: xs = 1.25, t = 1 -> 0.25
    DenseMatrix a(1, 1);
    a(0, 0) = 1.0;
    LpInstance lp(a, {1.25}, {1.0});
    PathState st(PrimalDualPoint(lp, {1.25}, {1.0}, {0.0}), 1.0);
    CHECK(l2_centrality(st) == Catch::Approx(0.25));
  }
  {
    // random state matches the direct formula
    auto rng = make_rng(5);
    GeneratedInstance gen = make_random_instance(6, 3, 99);
    Vector mu = random_positive(6, rng, 0.5, 1.5);
    PrimalDualPoint p = central_path_oracle(gen.lp, mu);
    PathState st(p, 0.9);
    double acc = 0.0;
    for (std::size_t i = 0; i < 6; ++i) {
      const double r = p.x()[i] * p.s()[i] - 0.9;
      acc += r * r;
    }
    CHECK(l2_centrality(st) == Catch::Approx(std::sqrt(acc) / 0.9));
  }
}

TEST_CASE("central_path_oracle symmetric and asymptotic cases") {
  {
    DenseMatrix a(1, 2);
    a(0, 0) = 1.0;
    a(0, 1) = 1.0;
    LpInstance lp(a, {1.0}, {0.0, 0.0});
    PrimalDualPoint p = central_path_oracle(lp, {0.3, 0.3});
    CHECK(p.x()[0] == Catch::Approx(0.5).margin(1e-9));
    CHECK(p.x()[1] == Catch::Approx(0.5).margin(1e-9));
  }
  {
    // x1 solves x1^2 + (2 tau - 1) x1 - tau = 0; x -> (1, 0) as tau -> 0
    LpInstance lp = tiny_lp();
    for (double tau : {1e-3, 1e-5}) {
      PrimalDualPoint p = central_path_oracle(lp, {tau, tau});
      const double root =
          (1.0 - 2.0 * tau + std::sqrt(1.0 + 4.0 * tau * tau)) / 2.0;
      CHECK(p.x()[0] == Catch::Approx(root).epsilon(1e-8));
    }
  }
}

TEST_CASE("central_path_oracle self-consistency on random instances") {
  auto rng = make_rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    std::uniform_int_distribution<std::size_t> nd(2, 12);
    const std::size_t n = nd(rng);
    std::uniform_int_distribution<std::size_t> dd(1, std::max<std::size_t>(1, n / 2));
    const std::size_t d = dd(rng);
    GeneratedInstance gen = make_random_instance(n, d, 1000 + trial);
    Vector mu = random_positive(n, rng, 0.2, 2.0);
    PrimalDualPoint p = central_path_oracle(gen.lp, mu);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(std::fabs(p.x()[i] * p.s()[i] - mu[i]) <= 1e-10 * norm_inf(mu));
  }
}

TEST_CASE("central_path_oracle is unique across starts") {
  auto rng = make_rng(77);
  GeneratedInstance gen = make_random_instance(8, 3, 2024);
  Vector mu = random_positive(8, rng, 0.3, 3.0);

  CentralPathOracleOptions from_ones;
  PrimalDualPoint p1 = central_path_oracle(gen.lp, mu, from_ones);

  CentralPathOracleOptions from_random;
  from_random.start = random_positive(8, rng, 0.05, 5.0);
  PrimalDualPoint p2 = central_path_oracle(gen.lp, mu, from_random);

  for (std::size_t i = 0; i < 8; ++i)
    CHECK(p1.x()[i] == Catch::Approx(p2.x()[i]).margin(1e-8));
}

TEST_CASE("central_path_oracle guards its preconditions") {
  GeneratedInstance gen = make_random_instance(17, 4, 5);
  CHECK_THROWS_AS(central_path_oracle(gen.lp, Vector(17, 1.0)),
                  PreconditionViolation);

  // unbounded feasible set: no barrier minimizer exists
  DenseMatrix a(1, 2);
  a(0, 0) = 1.0;
  a(0, 1) = -1.0;
  LpInstance unbounded(a, {0.0}, {0.0, 0.0});
  CentralPathOracleOptions opts;
  opts.max_iterations = 40;
  CHECK_THROWS_AS(central_path_oracle(unbounded, {1.0, 1.0}, opts),
                  NoConvergence);
}
