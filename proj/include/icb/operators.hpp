#pragma once

#include <cstdint>
#include <memory>

#include "icb/grid.hpp"

namespace icb {

// Linear map from an image to a flat measurement vector, with exact adjoint.
// Complex-valued measurements are stored as interleaved (re, im) pairs so
// that the plain dot product equals the real part of the Hermitian pairing.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;

  virtual int image_width() const = 0;
  virtual int image_height() const = 0;
  virtual std::size_t range_size() const = 0;

  virtual void apply(const Image& u, std::span<double> out) const = 0;
  virtual void adjoint(std::span<const double> y, Image& out) const = 0;

  // True when every matrix entry is >= 0; then probing with ones yields the
  // exact absolute row/column sums used by the diagonal preconditioner.
  virtual bool nonnegative_entries() const = 0;

  std::vector<double> apply(const Image& u) const;
  Image adjoint(std::span<const double> y) const;
};

// Power-iteration estimate of the spectral norm (Rayleigh quotient of K*K,
// monotone nondecreasing in the iteration count). Deterministic start vector.
double estimate_operator_norm(const LinearOperator& op, int iterations);

struct RadonGeometry {
  int n_angles = 0;       // uniform in [0, pi)
  int n_bins = 0;         // must cover the image diagonal
  double pixel_size = 1.0;

  static RadonGeometry for_image(int width, int height, int n_angles);
};

// Parallel-beam projector. Each pixel center is projected onto the detector
// axis and split linearly between the two nearest bins, which makes the
// per-angle column sums exactly pixel_size (mass preservation) and keeps all
// matrix entries nonnegative. The adjoint gathers with the same weights.
class RadonOperator final : public LinearOperator {
 public:
  RadonOperator(int width, int height, RadonGeometry geom);

  int image_width() const override { return width_; }
  int image_height() const override { return height_; }
  std::size_t range_size() const override {
    return static_cast<std::size_t>(geom_.n_angles) * geom_.n_bins;
  }
  void apply(const Image& u, std::span<double> out) const override;
  void adjoint(std::span<const double> y, Image& out) const override;
  bool nonnegative_entries() const override { return true; }

  const RadonGeometry& geometry() const { return geom_; }
  Sinogram forward(const Image& u) const;
  Image back(const Sinogram& s) const;

 private:
  int width_, height_;
  RadonGeometry geom_;
  std::vector<double> cos_, sin_;
};

// Normalized truncated Gaussian kernel (radius ceil(4*sigma)), separable,
// with half-sample symmetric boundary handling; exactly self-adjoint and
// constant-preserving.
class GaussianBlurOperator final : public LinearOperator {
 public:
  GaussianBlurOperator(int width, int height, double sigma);

  int image_width() const override { return width_; }
  int image_height() const override { return height_; }
  std::size_t range_size() const override {
    return static_cast<std::size_t>(width_) * height_;
  }
  void apply(const Image& u, std::span<double> out) const override;
  void adjoint(std::span<const double> y, Image& out) const override;
  bool nonnegative_entries() const override { return true; }

  double sigma() const { return sigma_; }
  Image blur(const Image& u) const;

 private:
  int width_, height_;
  double sigma_;
  std::vector<double> kernel_;  // [-radius, radius]
};

Image gaussian_blur(const Image& u, double sigma);

// PET model: Gaussian blur in the image domain followed by the Radon
// transform, with an optional intensity scale folded into the operator.
class PetOperator final : public LinearOperator {
 public:
  PetOperator(int width, int height, RadonGeometry geom, double blur_sigma,
              double intensity_scale = 1.0);

  int image_width() const override { return blur_.image_width(); }
  int image_height() const override { return blur_.image_height(); }
  std::size_t range_size() const override { return radon_.range_size(); }
  void apply(const Image& u, std::span<double> out) const override;
  void adjoint(std::span<const double> y, Image& out) const override;
  bool nonnegative_entries() const override { return true; }

  const RadonGeometry& geometry() const { return radon_.geometry(); }
  double blur_sigma() const { return blur_.sigma(); }
  double intensity_scale() const { return scale_; }
  void set_intensity_scale(double s) { scale_ = s; }

  Sinogram forward(const Image& u) const;
  Image back(const Sinogram& s) const;

 private:
  GaussianBlurOperator blur_;
  RadonOperator radon_;
  double scale_;
};

// Boolean k-space sampling pattern in centered layout (DC at (W/2, H/2)).
struct SamplingMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> keep;

  SamplingMask() = default;
  SamplingMask(int w, int h)
      : width(w), height(h), keep(static_cast<std::size_t>(w) * h, 0) {}

  std::size_t count() const;
  double fraction_sampled() const;
};

// Unitary 2D DFT (scaling 1/sqrt(W*H) in both directions) followed by
// masking; adjoint masks, zero-fills and takes the real part of the inverse
// transform. Measurements are interleaved (re, im), full grid size, with
// unsampled frequencies identically zero.
class Dft2Operator final : public LinearOperator {
 public:
  Dft2Operator(int width, int height, SamplingMask mask);
  ~Dft2Operator() override;

  Dft2Operator(const Dft2Operator&) = delete;
  Dft2Operator& operator=(const Dft2Operator&) = delete;

  int image_width() const override { return width_; }
  int image_height() const override { return height_; }
  std::size_t range_size() const override {
    return 2 * static_cast<std::size_t>(width_) * height_;
  }
  void apply(const Image& u, std::span<double> out) const override;
  void adjoint(std::span<const double> y, Image& out) const override;
  bool nonnegative_entries() const override { return false; }

  const SamplingMask& mask() const { return mask_; }
  // Mask reindexed to FFT order, matching the measurement layout.
  const std::vector<std::uint8_t>& keep_fft() const { return keep_fft_; }
  ComplexGrid forward(const Image& u) const;
  Image back(const ComplexGrid& g) const;

 private:
  struct Plans;
  int width_, height_;
  SamplingMask mask_;                   // centered layout, as constructed
  std::vector<std::uint8_t> keep_fft_;  // same mask in FFT index order
  std::unique_ptr<Plans> plans_;
};

class IdentityOperator final : public LinearOperator {
 public:
  IdentityOperator(int width, int height) : width_(width), height_(height) {}
  int image_width() const override { return width_; }
  int image_height() const override { return height_; }
  std::size_t range_size() const override {
    return static_cast<std::size_t>(width_) * height_;
  }
  void apply(const Image& u, std::span<double> out) const override;
  void adjoint(std::span<const double> y, Image& out) const override;
  bool nonnegative_entries() const override { return true; }

 private:
  int width_, height_;
};

// Measurement packing helpers.
std::vector<double> to_measurement(const Sinogram& s);
std::vector<double> to_measurement(const ComplexGrid& g);
ComplexGrid complex_from_measurement(std::span<const double> m, int width, int height);
Sinogram sinogram_from_measurement(std::span<const double> m, int n_angles, int n_bins);

}  // namespace icb
