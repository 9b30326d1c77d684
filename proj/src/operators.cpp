#include "icb/operators.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

namespace icb {

std::vector<double> LinearOperator::apply(const Image& u) const {
  std::vector<double> out(range_size());
  apply(u, out);
  return out;
}

Image LinearOperator::adjoint(std::span<const double> y) const {
  Image out(image_width(), image_height());
  adjoint(y, out);
  return out;
}

double estimate_operator_norm(const LinearOperator& op, int iterations) {
  if (iterations < 10) throw std::invalid_argument("estimate_operator_norm: iterations < 10");
  const int w = op.image_width(), h = op.image_height();
  Image x(w, h, 1.0);
  // Deterministic non-uniform start so eigenvectors orthogonal to constants
  // are not missed.
  for (std::size_t i = 0; i < x.size(); ++i)
    x.values[i] += 1e-3 * std::sin(0.7 * static_cast<double>(i) + 0.3);
  std::vector<double> kx(op.range_size());
  Image kkx(w, h);
  double estimate = 0.0;
  for (int it = 0; it < iterations; ++it) {
    op.apply(x, kx);
    op.adjoint(kx, kkx);
    const double xx = dot(x.values, x.values);
    const double x_kkx = dot(x.values, kkx.values);
    if (xx == 0.0) return 0.0;
    estimate = std::sqrt(std::max(0.0, x_kkx / xx));
    const double n = norm2(kkx.values);
    if (n == 0.0) return 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) x.values[i] = kkx.values[i] / n;
  }
  return estimate;
}

RadonGeometry RadonGeometry::for_image(int width, int height, int n_angles) {
  RadonGeometry g;
  g.n_angles = n_angles;
  g.n_bins = static_cast<int>(std::ceil(std::hypot(width, height))) + 3;
  g.pixel_size = 1.0;
  return g;
}

RadonOperator::RadonOperator(int width, int height, RadonGeometry geom)
    : width_(width), height_(height), geom_(geom) {
  if (geom_.n_angles < 1) throw std::invalid_argument("RadonOperator: n_angles < 1");
  if (geom_.n_bins < static_cast<int>(std::ceil(std::hypot(width, height))))
    throw std::invalid_argument("RadonOperator: n_bins must cover the image diagonal");
  cos_.resize(geom_.n_angles);
  sin_.resize(geom_.n_angles);
  for (int a = 0; a < geom_.n_angles; ++a) {
    const double theta = std::numbers::pi * a / geom_.n_angles;
    cos_[a] = std::cos(theta);
    sin_[a] = std::sin(theta);
  }
}

void RadonOperator::apply(const Image& u, std::span<double> out) const {
  if (u.width != width_ || u.height != height_)
    throw std::invalid_argument("RadonOperator::apply: image shape mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  const double cx = 0.5 * (width_ - 1), cy = 0.5 * (height_ - 1);
  const double bin_center = 0.5 * (geom_.n_bins - 1);
  for (int a = 0; a < geom_.n_angles; ++a) {
    double* row = out.data() + static_cast<std::size_t>(a) * geom_.n_bins;
    const double c = cos_[a], s = sin_[a];
    std::size_t i = 0;
    for (int y = 0; y < height_; ++y) {
      const double py = (y - cy) * s;
      for (int x = 0; x < width_; ++x, ++i) {
        const double v = u.values[i];
        if (v == 0.0) continue;
        const double p = (x - cx) * c + py + bin_center;
        const int b0 = static_cast<int>(std::floor(p));
        const double frac = p - b0;
        if (b0 >= 0 && b0 < geom_.n_bins) row[b0] += v * (1.0 - frac) * geom_.pixel_size;
        if (b0 + 1 >= 0 && b0 + 1 < geom_.n_bins) row[b0 + 1] += v * frac * geom_.pixel_size;
      }
    }
  }
}

void RadonOperator::adjoint(std::span<const double> y, Image& out) const {
  if (y.size() != range_size())
    throw std::invalid_argument("RadonOperator::adjoint: measurement size mismatch");
  if (out.width != width_ || out.height != height_) out = Image(width_, height_);
  const double cx = 0.5 * (width_ - 1), cy = 0.5 * (height_ - 1);
  const double bin_center = 0.5 * (geom_.n_bins - 1);
  std::fill(out.values.begin(), out.values.end(), 0.0);
  for (int a = 0; a < geom_.n_angles; ++a) {
    const double* row = y.data() + static_cast<std::size_t>(a) * geom_.n_bins;
    const double c = cos_[a], s = sin_[a];
    std::size_t i = 0;
    for (int yy = 0; yy < height_; ++yy) {
      const double py = (yy - cy) * s;
      for (int x = 0; x < width_; ++x, ++i) {
        const double p = (x - cx) * c + py + bin_center;
        const int b0 = static_cast<int>(std::floor(p));
        const double frac = p - b0;
        double acc = 0.0;
        if (b0 >= 0 && b0 < geom_.n_bins) acc += row[b0] * (1.0 - frac);
        if (b0 + 1 >= 0 && b0 + 1 < geom_.n_bins) acc += row[b0 + 1] * frac;
        out.values[i] += acc * geom_.pixel_size;
      }
    }
  }
}

Sinogram RadonOperator::forward(const Image& u) const {
  Sinogram s(geom_.n_angles, geom_.n_bins);
  apply(u, s.values);
  return s;
}

Image RadonOperator::back(const Sinogram& s) const {
  Image out(width_, height_);
  adjoint(s.values, out);
  return out;
}

namespace {

// Half-sample symmetric reflection: ..., 1, 0 | 0, 1, ..., n-1 | n-1, n-2, ...
inline int reflect_index(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - i - 1;
  }
  return i;
}

void convolve_separable(const std::vector<double>& kernel, int w, int h,
                        std::span<const double> in, std::span<double> out,
                        std::vector<double>& scratch) {
  const int radius = static_cast<int>(kernel.size() / 2);
  scratch.resize(static_cast<std::size_t>(w) * h);
  // rows
  for (int y = 0; y < h; ++y) {
    const double* src = in.data() + static_cast<std::size_t>(y) * w;
    double* dst = scratch.data() + static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k)
        acc += kernel[k + radius] * src[reflect_index(x + k, w)];
      dst[x] = acc;
    }
  }
  // columns
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k)
        acc += kernel[k + radius] * scratch[static_cast<std::size_t>(reflect_index(y + k, h)) * w + x];
      out[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
}

}  // namespace

GaussianBlurOperator::GaussianBlurOperator(int width, int height, double sigma)
    : width_(width), height_(height), sigma_(sigma) {
  if (sigma <= 0.0) throw std::invalid_argument("GaussianBlurOperator: sigma <= 0");
  const int radius = static_cast<int>(std::ceil(4.0 * sigma));
  kernel_.resize(2 * radius + 1);
  double sum = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    kernel_[k + radius] = std::exp(-0.5 * (k * k) / (sigma * sigma));
    sum += kernel_[k + radius];
  }
  for (double& v : kernel_) v /= sum;
}

void GaussianBlurOperator::apply(const Image& u, std::span<double> out) const {
  if (u.width != width_ || u.height != height_)
    throw std::invalid_argument("GaussianBlurOperator::apply: image shape mismatch");
  std::vector<double> scratch;
  convolve_separable(kernel_, width_, height_, u.values, out, scratch);
}

void GaussianBlurOperator::adjoint(std::span<const double> y, Image& out) const {
  if (out.width != width_ || out.height != height_) out = Image(width_, height_);
  std::vector<double> scratch;
  convolve_separable(kernel_, width_, height_, y, out.values, scratch);
}

Image GaussianBlurOperator::blur(const Image& u) const {
  Image out(width_, height_);
  apply(u, out.values);
  return out;
}

Image gaussian_blur(const Image& u, double sigma) {
  return GaussianBlurOperator(u.width, u.height, sigma).blur(u);
}

PetOperator::PetOperator(int width, int height, RadonGeometry geom, double blur_sigma,
                         double intensity_scale)
    : blur_(width, height, blur_sigma), radon_(width, height, geom), scale_(intensity_scale) {}

void PetOperator::apply(const Image& u, std::span<double> out) const {
  Image blurred = blur_.blur(u);
  radon_.apply(blurred, out);
  if (scale_ != 1.0)
    for (double& v : out) v *= scale_;
}

void PetOperator::adjoint(std::span<const double> y, Image& out) const {
  Image bp(image_width(), image_height());
  radon_.adjoint(y, bp);
  blur_.adjoint(bp.values, out);
  if (scale_ != 1.0)
    for (double& v : out.values) v *= scale_;
}

Sinogram PetOperator::forward(const Image& u) const {
  Sinogram s(geometry().n_angles, geometry().n_bins);
  apply(u, s.values);
  return s;
}

Image PetOperator::back(const Sinogram& s) const {
  Image out(image_width(), image_height());
  adjoint(s.values, out);
  return out;
}

std::size_t SamplingMask::count() const {
  std::size_t n = 0;
  for (auto k : keep) n += (k != 0);
  return n;
}

double SamplingMask::fraction_sampled() const {
  return keep.empty() ? 0.0 : static_cast<double>(count()) / static_cast<double>(keep.size());
}

namespace {
std::mutex fftw_plan_mutex;
}

struct Dft2Operator::Plans {
  fftw_complex* buf = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  std::mutex exec_mutex;

  Plans(int w, int h) {
    buf = fftw_alloc_complex(static_cast<std::size_t>(w) * h);
    std::lock_guard<std::mutex> lock(fftw_plan_mutex);
    // Row-major (y, x) layout: FFTW dims are (n0, n1) = (h, w).
    fwd = fftw_plan_dft_2d(h, w, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_2d(h, w, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Plans() {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex);
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(buf);
  }
};

Dft2Operator::Dft2Operator(int width, int height, SamplingMask mask)
    : width_(width), height_(height), mask_(std::move(mask)) {
  if (mask_.width != width_ || mask_.height != height_)
    throw std::invalid_argument("Dft2Operator: mask shape mismatch");
  if (mask_.count() == 0) throw std::invalid_argument("Dft2Operator: empty mask");
  // Centered layout -> FFT index order (DC at centered (W/2, H/2)).
  keep_fft_.assign(mask_.keep.size(), 0);
  for (int cy = 0; cy < height_; ++cy) {
    const int fy = (cy - height_ / 2 + height_) % height_;
    for (int cx = 0; cx < width_; ++cx) {
      const int fx = (cx - width_ / 2 + width_) % width_;
      keep_fft_[static_cast<std::size_t>(fy) * width_ + fx] =
          mask_.keep[static_cast<std::size_t>(cy) * width_ + cx];
    }
  }
  plans_ = std::make_unique<Plans>(width_, height_);
}

Dft2Operator::~Dft2Operator() = default;

void Dft2Operator::apply(const Image& u, std::span<double> out) const {
  if (u.width != width_ || u.height != height_)
    throw std::invalid_argument("Dft2Operator::apply: image shape mismatch");
  const std::size_t n = static_cast<std::size_t>(width_) * height_;
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  std::lock_guard<std::mutex> lock(plans_->exec_mutex);
  for (std::size_t i = 0; i < n; ++i) {
    plans_->buf[i][0] = u.values[i];
    plans_->buf[i][1] = 0.0;
  }
  fftw_execute(plans_->fwd);
  for (std::size_t i = 0; i < n; ++i) {
    if (keep_fft_[i]) {
      out[2 * i] = plans_->buf[i][0] * scale;
      out[2 * i + 1] = plans_->buf[i][1] * scale;
    } else {
      out[2 * i] = 0.0;
      out[2 * i + 1] = 0.0;
    }
  }
}

void Dft2Operator::adjoint(std::span<const double> y, Image& out) const {
  if (y.size() != range_size())
    throw std::invalid_argument("Dft2Operator::adjoint: measurement size mismatch");
  if (out.width != width_ || out.height != height_) out = Image(width_, height_);
  const std::size_t n = static_cast<std::size_t>(width_) * height_;
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  std::lock_guard<std::mutex> lock(plans_->exec_mutex);
  for (std::size_t i = 0; i < n; ++i) {
    if (keep_fft_[i]) {
      plans_->buf[i][0] = y[2 * i];
      plans_->buf[i][1] = y[2 * i + 1];
    } else {
      plans_->buf[i][0] = 0.0;
      plans_->buf[i][1] = 0.0;
    }
  }
  fftw_execute(plans_->bwd);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = plans_->buf[i][0] * scale;
}

ComplexGrid Dft2Operator::forward(const Image& u) const {
  std::vector<double> m(range_size());
  apply(u, m);
  return complex_from_measurement(m, width_, height_);
}

Image Dft2Operator::back(const ComplexGrid& g) const {
  const std::vector<double> m = to_measurement(g);
  Image out(width_, height_);
  adjoint(m, out);
  return out;
}

void IdentityOperator::apply(const Image& u, std::span<double> out) const {
  if (u.width != width_ || u.height != height_)
    throw std::invalid_argument("IdentityOperator::apply: image shape mismatch");
  std::copy(u.values.begin(), u.values.end(), out.begin());
}

void IdentityOperator::adjoint(std::span<const double> y, Image& out) const {
  if (out.width != width_ || out.height != height_) out = Image(width_, height_);
  std::copy(y.begin(), y.end(), out.values.begin());
}

std::vector<double> to_measurement(const Sinogram& s) { return s.values; }

std::vector<double> to_measurement(const ComplexGrid& g) {
  std::vector<double> m(2 * g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    m[2 * i] = g.re[i];
    m[2 * i + 1] = g.im[i];
  }
  return m;
}

ComplexGrid complex_from_measurement(std::span<const double> m, int width, int height) {
  ComplexGrid g(width, height);
  if (m.size() != 2 * g.size())
    throw std::invalid_argument("complex_from_measurement: size mismatch");
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.re[i] = m[2 * i];
    g.im[i] = m[2 * i + 1];
  }
  return g;
}

Sinogram sinogram_from_measurement(std::span<const double> m, int n_angles, int n_bins) {
  Sinogram s(n_angles, n_bins);
  if (m.size() != s.size())
    throw std::invalid_argument("sinogram_from_measurement: size mismatch");
  std::copy(m.begin(), m.end(), s.values.begin());
  return s;
}

}  // namespace icb
