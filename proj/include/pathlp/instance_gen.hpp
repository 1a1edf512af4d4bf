#pragma once

#include <cstdint>
#include <random>

#include "pathlp/lp.hpp"

namespace pathlp {

struct GeneratedInstance {
  LpInstance lp;
  LpParameters params;
  Vector interior_point;
};

// Random bounded standard-form instance with a known strictly feasible
// point. The first constraint row is all ones, so 1^T x is fixed for every
// feasible x and the generated radii are rigorous:
//   R = 1^T x0 bounds ||x||_2 over the feasible set, r = min_i x0_i.
inline GeneratedInstance make_random_instance(std::size_t n, std::size_t d,
                                              std::uint64_t seed) {
  if (d < 1 || d > n)
    throw PreconditionViolation("generator requires 1 <= d <= n");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.5, 1.5);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Vector x0(n);
  for (double& v : x0) v = unif(rng);

  DenseMatrix a(d, n);
  for (std::size_t j = 0; j < n; ++j) a(0, j) = 1.0;
  for (std::size_t i = 1; i < d; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = gauss(rng);

  Vector b = matvec(a, x0);
  Vector c(n);
  for (double& v : c) v = gauss(rng);

  LpParameters params;
  params.inner_radius = min_element(x0);
  params.outer_radius = b[0];
  params.lipschitz = norm2(c);

  return GeneratedInstance{LpInstance(std::move(a), std::move(b), std::move(c)),
                           params, std::move(x0)};
}

}  // namespace pathlp
