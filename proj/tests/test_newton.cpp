#include <catch2/catch_amalgamated.hpp>

#include "pathlp/newton.hpp"
#include "support/test_util.hpp"

using namespace pathlp;
using testutil::make_rng;
using testutil::random_matrix;
using testutil::random_positive;
using testutil::random_vector;

namespace {

struct Residuals {
  double primal;  // ||A dx|| / (||A||_F ||dx||)
  double dual;    // ||A^T dy + ds|| / (||ds|| + ||dy||)
  double center;  // ||Sbar dx + Xbar ds - delta_mu|| / ||delta_mu||
};

Residuals newton_residuals(const DenseMatrix& a, const Vector& xbar,
                           const Vector& sbar, const Vector& delta_mu,
                           const NewtonDirection& dir) {
  Residuals out{};
  const double denom_p =
      frobenius_norm(a) * norm2(dir.dx) + 1e-300;
  out.primal = norm2(matvec(a, dir.dx)) / denom_p;

  Vector dual = matvec_transpose(a, dir.dy);
  for (std::size_t i = 0; i < dual.size(); ++i) dual[i] += dir.ds[i];
  out.dual = norm2(dual) / (norm2(dir.ds) + norm2(dir.dy) + 1e-300);

  Vector center(delta_mu.size());
  for (std::size_t i = 0; i < center.size(); ++i)
    center[i] = sbar[i] * dir.dx[i] + xbar[i] * dir.ds[i] - delta_mu[i];
  out.center = norm2(center) / (norm2(delta_mu) + 1e-300);
  return out;
}

}  // namespace

TEST_CASE("solve_newton zero right-hand side") {
  auto rng = make_rng(1);
  DenseMatrix a = random_matrix(3, 8, rng);
  Vector xbar = random_positive(8, rng);
  Vector sbar = random_positive(8, rng);
  NewtonDirection dir = solve_newton(a, xbar, sbar, Vector(8, 0.0));
  CHECK(norm2(dir.dx) == 0.0);
  CHECK(norm2(dir.ds) == 0.0);
  CHECK(norm2(dir.dy) == 0.0);
}

TEST_CASE("solve_newton hand-checkable case") {
  DenseMatrix a(1, 2);
  a(0, 0) = 1.0;
  a(0, 1) = 1.0;
  // normal matrix = 2, A S^{-1} delta_mu = 0, so dy = 0, ds = 0, dx = delta_mu
  NewtonDirection dir = solve_newton(a, {1.0, 1.0}, {1.0, 1.0}, {1.0, -1.0});
  CHECK(dir.dy[0] == Catch::Approx(0.0).margin(1e-14));
  CHECK(dir.ds[0] == Catch::Approx(0.0).margin(1e-14));
  CHECK(dir.ds[1] == Catch::Approx(0.0).margin(1e-14));
  CHECK(dir.dx[0] == Catch::Approx(1.0));
  CHECK(dir.dx[1] == Catch::Approx(-1.0));
}

TEST_CASE("solve_newton residual invariants on random instances") {
  auto rng = make_rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 30;
    const std::size_t d = 12;
    DenseMatrix a = random_matrix(d, n, rng);
    Vector xbar = random_positive(n, rng);
    Vector sbar = random_positive(n, rng);
    Vector delta_mu = random_vector(n, rng);
    NewtonDirection dir = solve_newton(a, xbar, sbar, delta_mu);
    Residuals res = newton_residuals(a, xbar, sbar, delta_mu, dir);
    CHECK(res.primal <= 1e-8);
    CHECK(res.dual <= 1e-8);
    CHECK(res.center <= 1e-8);
  }
}

TEST_CASE("projection is idempotent and contracts in the mu norm") {
  auto rng = make_rng(3);
  for (int trial = 0; trial < 25; ++trial) {
    std::uniform_int_distribution<std::size_t> nd(4, 24);
    const std::size_t n = nd(rng);
    std::uniform_int_distribution<std::size_t> dd(1, n / 2);
    const std::size_t d = dd(rng);
    DenseMatrix a = random_matrix(d, n, rng);
    Vector xbar = random_positive(n, rng);
    Vector sbar = random_positive(n, rng);
    Vector mu(n);
    for (std::size_t i = 0; i < n; ++i) mu[i] = xbar[i] * sbar[i];
    Vector v = random_vector(n, rng);

    Vector pv = apply_projection(a, xbar, sbar, v);
    Vector ppv = apply_projection(a, xbar, sbar, pv);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(std::fabs(ppv[i] - pv[i]) <=
            1e-8 * (1.0 + norm_inf(pv)));

    CHECK(weighted_norm(pv, mu) <= weighted_norm(v, mu) * (1.0 + 1e-8));
    Vector ipv(n);
    for (std::size_t i = 0; i < n; ++i) ipv[i] = v[i] - pv[i];
    CHECK(weighted_norm(ipv, mu) <= weighted_norm(v, mu) * (1.0 + 1e-8));
  }
}

TEST_CASE("projection annihilates the null space of A Xbar") {
  auto rng = make_rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 12;
    const std::size_t d = 5;
    DenseMatrix a = random_matrix(d, n, rng);
    Vector xbar = random_positive(n, rng);
    Vector sbar = random_positive(n, rng);

    // v in null(A Xbar): scale A columnwise by xbar, project a random vector
    // onto the orthogonal complement of the row space.
    DenseMatrix ax(d, n);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < n; ++j) ax(i, j) = a(i, j) * xbar[j];
    Vector v = random_vector(n, rng);
    Vector ones(n, 1.0);
    Vector w = spd_solve(weighted_normal_matrix(ax, ones), matvec(ax, v));
    Vector correction = matvec_transpose(ax, w);
    for (std::size_t i = 0; i < n; ++i) v[i] -= correction[i];

    Vector pv = apply_projection(a, xbar, sbar, v);
    CHECK(norm2(pv) <= 1e-8 * std::max(1.0, norm2(v)));
  }
}

TEST_CASE("feasible step sizes keep the iterate interior") {
  auto rng = make_rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 16;
    const std::size_t d = 6;
    DenseMatrix a = random_matrix(d, n, rng);
    Vector xbar = random_positive(n, rng, 0.2, 5.0);
    Vector sbar = random_positive(n, rng, 0.2, 5.0);
    Vector mu(n);
    double mu_min = 1e300;
    for (std::size_t i = 0; i < n; ++i) {
      mu[i] = xbar[i] * sbar[i];
      mu_min = std::min(mu_min, mu[i]);
    }
    // scale delta_mu so that ||delta_mu / mu||_mu^2 = 0.9 min_i mu_i
    Vector delta_mu = random_vector(n, rng);
    double weight = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      weight += delta_mu[i] * delta_mu[i] / mu[i];
    const double scale = std::sqrt(0.9 * mu_min / weight);
    for (double& v : delta_mu) v *= scale;

    NewtonDirection dir = solve_newton(a, xbar, sbar, delta_mu);
    double max_rel_x = 0.0, max_rel_s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      max_rel_x = std::max(max_rel_x, std::fabs(dir.dx[i] / xbar[i]));
      max_rel_s = std::max(max_rel_s, std::fabs(dir.ds[i] / sbar[i]));
    }
    CHECK(max_rel_x < 1.0);
    CHECK(max_rel_s < 1.0);
  }
}
