#include "icb/grid.hpp"

#include <cmath>

namespace icb {

void require_same_shape(const Image& a, const Image& b) {
  if (a.width != b.width || a.height != b.height)
    throw std::invalid_argument("image shape mismatch");
}

void require_same_shape(const VectorField& a, const VectorField& b) {
  if (a.width != b.width || a.height != b.height)
    throw std::invalid_argument("vector field shape mismatch");
}

void require_same_shape(const ComplexGrid& a, const ComplexGrid& b) {
  if (a.width != b.width || a.height != b.height)
    throw std::invalid_argument("complex grid shape mismatch");
}

void require_same_shape(const Sinogram& a, const Sinogram& b) {
  if (a.n_angles != b.n_angles || a.n_bins != b.n_bins)
    throw std::invalid_argument("sinogram shape mismatch");
}

namespace {

void axpy_span(double a, std::span<const double> x, std::span<const double> y,
               std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * x[i] + y[i];
}

}  // namespace

Image axpy(double a, const Image& x, const Image& y) {
  require_same_shape(x, y);
  Image out(x.width, x.height);
  out.lower_bound = y.lower_bound;
  axpy_span(a, x.values, y.values, out.values);
  return out;
}

VectorField axpy(double a, const VectorField& x, const VectorField& y) {
  require_same_shape(x, y);
  VectorField out(x.width, x.height);
  axpy_span(a, x.x, y.x, out.x);
  axpy_span(a, x.y, y.y, out.y);
  return out;
}

ComplexGrid axpy(double a, const ComplexGrid& x, const ComplexGrid& y) {
  require_same_shape(x, y);
  ComplexGrid out(x.width, x.height);
  axpy_span(a, x.re, y.re, out.re);
  axpy_span(a, x.im, y.im, out.im);
  return out;
}

Sinogram axpy(double a, const Sinogram& x, const Sinogram& y) {
  require_same_shape(x, y);
  Sinogram out(x.n_angles, x.n_bins);
  axpy_span(a, x.values, y.values, out.values);
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

bool all_finite(std::span<const double> a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

double inner_product(const Image& a, const Image& b) {
  require_same_shape(a, b);
  return dot(a.values, b.values);
}

double inner_product(const VectorField& a, const VectorField& b) {
  require_same_shape(a, b);
  return dot(a.x, b.x) + dot(a.y, b.y);
}

double inner_product(const ComplexGrid& a, const ComplexGrid& b) {
  require_same_shape(a, b);
  return dot(a.re, b.re) + dot(a.im, b.im);
}

double inner_product(const Sinogram& a, const Sinogram& b) {
  require_same_shape(a, b);
  return dot(a.values, b.values);
}

Image pointwise_magnitude(const VectorField& v) {
  Image out(v.width, v.height);
  for (std::size_t i = 0; i < v.size(); ++i) out.values[i] = std::hypot(v.x[i], v.y[i]);
  return out;
}

}  // namespace icb
