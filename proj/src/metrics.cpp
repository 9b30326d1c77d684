#include "icb/metrics.hpp"

#include <cmath>

namespace icb {

namespace {

inline int reflect_index(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - i - 1;
  }
  return i;
}

void window_filter(const std::vector<double>& kernel, int w, int h,
                   const std::vector<double>& in, std::vector<double>& out) {
  const int radius = static_cast<int>(kernel.size() / 2);
  std::vector<double> rows(in.size());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k)
        acc += kernel[k + radius] * in[static_cast<std::size_t>(y) * w + reflect_index(x + k, w)];
      rows[static_cast<std::size_t>(y) * w + x] = acc;
    }
  out.resize(in.size());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k)
        acc += kernel[k + radius] * rows[static_cast<std::size_t>(reflect_index(y + k, h)) * w + x];
      out[static_cast<std::size_t>(y) * w + x] = acc;
    }
}

double ssim_impl(const Image& x, const Image& truth, double dynamic_range,
                 const std::vector<std::uint8_t>* roi) {
  require_same_shape(x, truth);
  if (!(dynamic_range > 0.0)) throw std::invalid_argument("ssim: dynamic range must be positive");
  if (roi != nullptr && roi->size() != x.size())
    throw std::invalid_argument("ssim: roi size mismatch");

  constexpr int radius = 5;  // 11x11 window
  constexpr double window_sigma = 1.5;
  std::vector<double> kernel(2 * radius + 1);
  double ksum = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    kernel[k + radius] = std::exp(-0.5 * k * k / (window_sigma * window_sigma));
    ksum += kernel[k + radius];
  }
  for (double& v : kernel) v /= ksum;

  const int w = x.width, h = x.height;
  const std::size_t n = x.size();
  std::vector<double> xx(n), yy(n), xy(n);
  for (std::size_t i = 0; i < n; ++i) {
    xx[i] = x.values[i] * x.values[i];
    yy[i] = truth.values[i] * truth.values[i];
    xy[i] = x.values[i] * truth.values[i];
  }
  std::vector<double> mu1, mu2, m11, m22, m12;
  window_filter(kernel, w, h, x.values, mu1);
  window_filter(kernel, w, h, truth.values, mu2);
  window_filter(kernel, w, h, xx, m11);
  window_filter(kernel, w, h, yy, m22);
  window_filter(kernel, w, h, xy, m12);

  const double c1 = 0.01 * dynamic_range * 0.01 * dynamic_range;
  const double c2 = 0.03 * dynamic_range * 0.03 * dynamic_range;
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (roi != nullptr && !(*roi)[i]) continue;
    const double s11 = m11[i] - mu1[i] * mu1[i];
    const double s22 = m22[i] - mu2[i] * mu2[i];
    const double s12 = m12[i] - mu1[i] * mu2[i];
    const double num = (2.0 * mu1[i] * mu2[i] + c1) * (2.0 * s12 + c2);
    const double den = (mu1[i] * mu1[i] + mu2[i] * mu2[i] + c1) * (s11 + s22 + c2);
    total += num / den;
    ++count;
  }
  if (count == 0) throw std::invalid_argument("ssim: empty region of interest");
  return total / static_cast<double>(count);
}

}  // namespace

double ssim(const Image& x, const Image& truth, double dynamic_range) {
  return ssim_impl(x, truth, dynamic_range, nullptr);
}

double ssim(const Image& x, const Image& truth, double dynamic_range,
            const std::vector<std::uint8_t>& roi) {
  return ssim_impl(x, truth, dynamic_range, &roi);
}

}  // namespace icb
