#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "pathlp/errors.hpp"
#include "pathlp/vector_ops.hpp"

namespace pathlp {

// exp(700) is still finite in doubles; beyond that the potential would
// overflow, which only happens far outside the invariant region.
inline constexpr double kPotentialArgCap = 700.0;

// Parameters of the soft-max potential Phi(r) = sum_i cosh(lambda r_i)
// measuring the scaled deviation r = (x s - t) / t from the central path.
struct PotentialConfig {
  double lambda = 0.0;
  double phi_cap = 0.0;
  double step = 0.0;

  static PotentialConfig for_dimension(std::size_t n) {
    PotentialConfig cfg;
    cfg.lambda = 16.0 * std::log(40.0 * static_cast<double>(n));
    cfg.phi_cap = 16.0 * static_cast<double>(n);
    cfg.step = 1.0 / (128.0 * cfg.lambda * std::sqrt(static_cast<double>(n)));
    return cfg;
  }

  void validate(std::size_t n) const {
    const double nn = static_cast<double>(n);
    if (lambda < 16.0 * std::log(40.0 * nn) * (1.0 - 1e-12))
      throw PreconditionViolation("lambda below 16 ln(40n)");
    if (step > (1.0 + 1e-12) / (128.0 * lambda * std::sqrt(nn)))
      throw PreconditionViolation("step above 1/(128 lambda sqrt(n))");
    if (!(phi_cap > 0.0)) throw PreconditionViolation("phi_cap must be positive");
  }
};

namespace detail {

inline void check_potential_arg(const Vector& r, double lambda) {
  const double arg = lambda * norm_inf(r);
  if (arg > kPotentialArgCap)
    throw OverflowError("potential argument " + std::to_string(arg) +
                        " exceeds overflow guard");
}

}  // namespace detail

// Phi(r) = sum_i cosh(lambda r_i)
inline double potential(const Vector& r, const PotentialConfig& cfg) {
  detail::check_potential_arg(r, cfg.lambda);
  double acc = 0.0;
  for (double ri : r) acc += std::cosh(cfg.lambda * ri);
  return acc;
}

// grad Phi(r), componentwise lambda sinh(lambda r_i).
inline Vector potential_gradient(const Vector& r, const PotentialConfig& cfg) {
  detail::check_potential_arg(r, cfg.lambda);
  Vector g(r.size());
  for (std::size_t i = 0; i < r.size(); ++i)
    g[i] = cfg.lambda * std::sinh(cfg.lambda * r[i]);
  return g;
}

}  // namespace pathlp
