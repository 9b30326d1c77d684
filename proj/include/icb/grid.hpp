#pragma once

#include <cassert>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace icb {

// Dense pixel grid, row-major with index i = y * width + x.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<double> values;
  std::optional<double> lower_bound;

  Image() = default;
  Image(int w, int h, double fill = 0.0)
      : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

  std::size_t size() const { return values.size(); }
  double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

// Per-pixel 2-vector grid (gradients, dual fields, subgradient fields).
struct VectorField {
  int width = 0;
  int height = 0;
  std::vector<double> x;
  std::vector<double> y;

  VectorField() = default;
  VectorField(int w, int h)
      : width(w), height(h),
        x(static_cast<std::size_t>(w) * h, 0.0),
        y(static_cast<std::size_t>(w) * h, 0.0) {}

  std::size_t size() const { return x.size(); }
};

struct ComplexGrid {
  int width = 0;
  int height = 0;
  std::vector<double> re;
  std::vector<double> im;

  ComplexGrid() = default;
  ComplexGrid(int w, int h)
      : width(w), height(h),
        re(static_cast<std::size_t>(w) * h, 0.0),
        im(static_cast<std::size_t>(w) * h, 0.0) {}

  std::size_t size() const { return re.size(); }
};

struct Sinogram {
  int n_angles = 0;
  int n_bins = 0;
  std::vector<double> values;

  Sinogram() = default;
  Sinogram(int angles, int bins, double fill = 0.0)
      : n_angles(angles), n_bins(bins),
        values(static_cast<std::size_t>(angles) * bins, fill) {}

  std::size_t size() const { return values.size(); }
  double& at(int angle, int bin) { return values[static_cast<std::size_t>(angle) * n_bins + bin]; }
  double at(int angle, int bin) const { return values[static_cast<std::size_t>(angle) * n_bins + bin]; }
};

void require_same_shape(const Image& a, const Image& b);
void require_same_shape(const VectorField& a, const VectorField& b);
void require_same_shape(const ComplexGrid& a, const ComplexGrid& b);
void require_same_shape(const Sinogram& a, const Sinogram& b);

Image axpy(double a, const Image& x, const Image& y);
VectorField axpy(double a, const VectorField& x, const VectorField& y);
ComplexGrid axpy(double a, const ComplexGrid& x, const ComplexGrid& y);
Sinogram axpy(double a, const Sinogram& x, const Sinogram& y);

double inner_product(const Image& a, const Image& b);
double inner_product(const VectorField& a, const VectorField& b);
// Real part of the Hermitian pairing sum(conj(a) * b).
double inner_product(const ComplexGrid& a, const ComplexGrid& b);
double inner_product(const Sinogram& a, const Sinogram& b);

Image pointwise_magnitude(const VectorField& v);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
bool all_finite(std::span<const double> a);

// NaN/Inf are programming errors; checked in debug builds only.
#ifndef NDEBUG
#define ICB_ASSERT_FINITE(span_expr) assert(::icb::all_finite(span_expr))
#else
#define ICB_ASSERT_FINITE(span_expr) ((void)0)
#endif

}  // namespace icb
