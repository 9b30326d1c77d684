#include "icb/prox.hpp"

#include <algorithm>
#include <cmath>

namespace icb {

void prox_kl_conjugate_inplace(std::span<double> y, double sigma, double alpha,
                               std::span<const double> f) {
  if (y.size() != f.size()) throw std::invalid_argument("prox_kl_conjugate: size mismatch");
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (f[i] < 0.0) throw std::invalid_argument("prox_kl_conjugate: negative data entry");
    const double d = y[i] - alpha;
    y[i] = 0.5 * (alpha + y[i]) - std::sqrt(0.25 * d * d + sigma * alpha * f[i]);
  }
}

Sinogram prox_kl_conjugate(const Sinogram& y, double sigma, double alpha, const Sinogram& f) {
  require_same_shape(y, f);
  Sinogram out = y;
  prox_kl_conjugate_inplace(out.values, sigma, alpha, f.values);
  return out;
}

void prox_quadratic_conjugate_inplace(std::span<double> y, double sigma, double beta,
                                      std::span<const double> g) {
  if (y.size() != g.size()) throw std::invalid_argument("prox_quadratic_conjugate: size mismatch");
  const double scale = beta / (beta + sigma);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = scale * (y[i] - sigma * g[i]);
}

ComplexGrid prox_quadratic_conjugate(const ComplexGrid& y, double sigma, double beta,
                                     const ComplexGrid& g) {
  require_same_shape(y, g);
  ComplexGrid out = y;
  prox_quadratic_conjugate_inplace(out.re, sigma, beta, g.re);
  prox_quadratic_conjugate_inplace(out.im, sigma, beta, g.im);
  return out;
}

void project_shifted_ball_inplace(VectorField& s, const VectorField* q, double shift_scale,
                                  double radius) {
  if (radius < 0.0) throw std::invalid_argument("project_shifted_ball: negative radius");
  const std::size_t n = s.size();
  if (q == nullptr || shift_scale == 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      const double m = std::hypot(s.x[i], s.y[i]);
      if (m > radius) {
        const double c = radius / m;
        s.x[i] *= c;
        s.y[i] *= c;
      }
    }
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double shx = shift_scale * q->x[i];
    const double shy = shift_scale * q->y[i];
    double tx = s.x[i] + shx;
    double ty = s.y[i] + shy;
    const double m = std::hypot(tx, ty);
    if (m > radius) {
      const double c = radius / m;
      tx *= c;
      ty *= c;
    }
    s.x[i] = tx - shx;
    s.y[i] = ty - shy;
  }
}

VectorField project_shifted_ball(const VectorField& s, const VectorField& shift, double radius) {
  require_same_shape(s, shift);
  VectorField out = s;
  project_shifted_ball_inplace(out, &shift, 1.0, radius);
  return out;
}

void project_nonnegative_inplace(std::span<double> u) {
  for (double& v : u) v = std::max(v, 0.0);
}

Image project_nonnegative(const Image& u) {
  Image out = u;
  project_nonnegative_inplace(out.values);
  out.lower_bound = 0.0;
  return out;
}

}  // namespace icb
