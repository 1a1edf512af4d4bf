#include <catch2/catch_amalgamated.hpp>

#include "pathlp/initializer.hpp"
#include "pathlp/instance_gen.hpp"
#include "pathlp/l2_step.hpp"
#include "support/test_util.hpp"

using namespace pathlp;
using testutil::make_rng;

namespace {

LpInstance tiny_lp() {
  DenseMatrix a(1, 2);
  a(0, 0) = 1.0;
  a(0, 1) = 1.0;
  return LpInstance(a, {1.0}, {1.0, 2.0});
}

LpParameters tiny_params() {
  LpParameters p;
  p.inner_radius = 0.5;
  p.outer_radius = 1.0;
  p.lipschitz = std::sqrt(5.0);
  return p;
}

// 3x3 assignment polytope: row sums and column sums equal one, last
// column-sum row dropped to keep full row rank. Vertices are the six
// permutation matrices.
LpInstance assignment_lp(const Vector& cost) {
  DenseMatrix a(5, 9);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      a(i, 3 * i + j) = 1.0;                      // row sum i
      if (j < 2) a(3 + j, 3 * i + j) = 1.0;       // column sum j
    }
  return LpInstance(a, Vector(5, 1.0), cost);
}

}  // namespace

TEST_CASE("build_modified produces an exactly central start") {
  auto [modified, state] = build_modified(tiny_lp(), tiny_params(), 0.25);
  const EmbedRecord& e = modified.embed();

  CHECK(e.r_bar == Catch::Approx(20.0));
  for (std::size_t i = 0; i < state.mu().size(); ++i)
    CHECK(std::fabs(state.mu()[i] - e.t0) <= 1e-10 * e.t0);

  // derived range facts
  const double n = 2.0;
  CHECK(e.b_tilde >= 0.75 * n * e.r_bar);
  CHECK(e.b_tilde <= 3.0 * n * e.r_bar);
  for (double ct : e.c_tilde) CHECK(ct >= e.t0 / (2.0 * e.r_bar));
  for (double xp : e.x_center_plus) {
    CHECK(xp >= 0.75 * e.r_bar);
    CHECK(xp <= 1.5 * e.r_bar);
  }

  // the start satisfies the modified dual identities
  ModifiedDualPoint dual = split_modified_dual(modified, state.point());
  CHECK(dual.lambda_dual == Catch::Approx(-e.t0 / e.r_bar));
}

TEST_CASE("build_modified across random parameter sweeps") {
  for (int trial = 0; trial < 10; ++trial) {
    GeneratedInstance gen = make_random_instance(4 + trial % 5, 2, 900 + trial);
    const double eps =
        1.0 / (100.0 * std::sqrt(static_cast<double>(gen.lp.num_variables())));
    auto [modified, state] = build_modified(gen.lp, gen.params, eps);
    for (std::size_t i = 0; i < state.mu().size(); ++i)
      CHECK(std::fabs(state.mu()[i] - modified.embed().t0) <=
            1e-10 * modified.embed().t0);
  }
}

TEST_CASE("monotone embedding: shrinking epsilon preserves the invariants") {
  GeneratedInstance gen = make_random_instance(6, 3, 42);
  for (double eps : {0.5, 0.25, 0.125, 0.01}) {
    auto [modified, state] = build_modified(gen.lp, gen.params, eps);
    CHECK(state.t() == modified.embed().t0);
  }
}

TEST_CASE("underestimated outer radius is caught") {
  DenseMatrix a(1, 1);
  a(0, 0) = 1.0;
  LpInstance lp(a, {1000.0}, {1.0});  // min-norm solution has norm 1000
  LpParameters p;
  p.inner_radius = 0.5;
  p.outer_radius = 1.0;  // far below the truth
  p.lipschitz = 1.0;
  CHECK_THROWS_AS(build_modified(lp, p, 0.5), PreconditionViolation);
}

TEST_CASE("invalid epsilon is rejected") {
  CHECK_THROWS_AS(build_modified(tiny_lp(), tiny_params(), 0.6),
                  PreconditionViolation);
  CHECK_THROWS_AS(build_modified(tiny_lp(), tiny_params(), 0.0),
                  PreconditionViolation);
}

TEST_CASE("phase-1 walk plus extraction lands in the l2 neighborhood") {
  LpInstance lp = tiny_lp();
  LpParameters params = tiny_params();
  const double eps = 1.0 / (100.0 * std::sqrt(2.0));
  auto [modified, start] = build_modified(lp, params, eps);
  const double lr = params.lipschitz * params.outer_radius;

  L2Config cfg;
  cfg.normal_solver = make_modified_normal_solver(modified.original().a());
  PathState at_lr = l2_step_path(modified.lp(), start, lr, cfg);

  // componentwise window implied by the l2 bound
  for (double m : at_lr.mu()) {
    CHECK(m >= (5.0 / 6.0) * lr);
    CHECK(m <= (7.0 / 6.0) * lr);
  }

  // epsilon-domination of the auxiliary blocks
  const Vector& xm = at_lr.point().x();
  const double s_theta = at_lr.point().s()[4];
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(xm[2 + i] <= eps * xm[i]);
    CHECK(s_theta <= eps * at_lr.point().s()[i]);
  }

  ExtractDiagnostics diag = extract_diagnostics(modified, at_lr);
  CHECK(diag.within_bounds);

  PrimalDualPoint handoff = extract(modified, at_lr);
  PathState restarted(handoff, lr);
  CHECK(l2_centrality(restarted) <= 0.25);
}

TEST_CASE("extraction preconditions are enforced") {
  LpInstance lp = tiny_lp();
  auto [modified, start] = build_modified(lp, tiny_params(), 0.25);
  // the embedding start sits at t0, far above the extraction window
  CHECK_THROWS_AS(extract(modified, start), ExtractionFailure);
}

TEST_CASE("round_to_vertex recovers the tiny LP optimum") {
  LpInstance lp = tiny_lp();
  LpParameters params = tiny_params();
  const double lr = params.lipschitz * params.outer_radius;
  // vertices: (1,0) cost 1 and (0,1) cost 2; vertex gap 1
  const double eta = 1.0 / lr;

  // near-optimal strictly feasible point
  Vector x = {1.0 - 1e-7, 1e-7};
  const double delta = 4e-7 / lr;  // objective excess is 1e-7
  Vector v = round_to_vertex(lp, x, eta, delta, params);
  CHECK(v[0] == 1.0);
  CHECK(v[1] == 0.0);

  // already a vertex: returned unchanged
  Vector w = round_to_vertex(lp, {1.0, 0.0}, eta, delta, params);
  CHECK(w[0] == Catch::Approx(1.0).margin(1e-12));
  CHECK(w[1] == 0.0);

  CHECK_THROWS_AS(round_to_vertex(lp, x, eta, 2.0 * eta, params),
                  PreconditionViolation);
}

TEST_CASE("round_to_vertex recovers an integral assignment optimum") {
  Vector cost = {3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0, 5.0};
  LpInstance lp = assignment_lp(cost);
  LpParameters params;
  params.inner_radius = 1.0 / 3.0;
  params.outer_radius = 3.0;
  params.lipschitz = norm2(cost);

  auto best = testutil::brute_force_optimum(lp);
  REQUIRE(best.has_value());
  auto gap = testutil::vertex_gap(lp);
  REQUIRE(gap.has_value());
  const double lr = params.lipschitz * params.outer_radius;
  const double eta = *gap / lr;

  // blend the optimum with the uniform doubly stochastic interior point
  const double theta = 1e-5;
  Vector x(9);
  for (std::size_t i = 0; i < 9; ++i)
    x[i] = (1.0 - theta) * best->x[i] + theta * (1.0 / 3.0);
  const double excess = dot(lp.c(), x) - best->objective;
  const double delta = 2.0 * excess / lr;
  REQUIRE(delta < eta / 10.0);

  Vector v = round_to_vertex(lp, x, eta, delta, params);
  for (std::size_t i = 0; i < 9; ++i) CHECK(v[i] == best->x[i]);
}

TEST_CASE("round_to_vertex failure paths") {
  LpInstance lp = tiny_lp();
  LpParameters params = tiny_params();
  // radius so large that both coordinates fall below the support threshold
  CHECK_THROWS_AS(round_to_vertex(lp, {0.5, 0.5}, 1e-9, 0.9e-9, params),
                  RoundingFailure);
}
