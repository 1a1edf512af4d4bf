#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace pathlp {

using Vector = std::vector<double>;

inline double dot(const Vector& a, const Vector& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double norm2(const Vector& a) { return std::sqrt(dot(a, a)); }

inline double norm1(const Vector& a) {
  double acc = 0.0;
  for (double v : a) acc += std::fabs(v);
  return acc;
}

inline double norm_inf(const Vector& a) {
  double acc = 0.0;
  for (double v : a) acc = std::max(acc, std::fabs(v));
  return acc;
}

// ||u||_w = sqrt(sum_i w_i u_i^2), the norm weighted by a positive vector w.
inline double weighted_norm(const Vector& u, const Vector& w) {
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += w[i] * u[i] * u[i];
  return std::sqrt(acc);
}

inline Vector elementwise_mul(const Vector& a, const Vector& b) {
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

inline Vector elementwise_div(const Vector& a, const Vector& b) {
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] / b[i];
  return out;
}

inline double min_element(const Vector& a) {
  return *std::min_element(a.begin(), a.end());
}

inline double max_element(const Vector& a) {
  return *std::max_element(a.begin(), a.end());
}

inline bool all_positive(const Vector& a) {
  for (double v : a)
    if (!(v > 0.0)) return false;
  return true;
}

inline bool all_finite(const Vector& a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

// a += alpha * b
inline void axpy(double alpha, const Vector& b, Vector& a) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += alpha * b[i];
}

inline Vector constant_vector(std::size_t n, double value) {
  return Vector(n, value);
}

}  // namespace pathlp
