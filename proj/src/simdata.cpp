#include "icb/simdata.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "icb/diffops.hpp"

namespace icb {

namespace {

// SplitMix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
  return mix64(mix64(mix64(seed_) + stream_) + counter);
}

double CounterRng::uniform(std::uint64_t counter) const {
  return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t counter) const {
  double u1 = uniform(2 * counter);
  const double u2 = uniform(2 * counter + 1);
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t CounterRng::poisson(double mean, std::uint64_t counter) const {
  if (!(mean > 0.0)) return 0;
  const std::uint64_t base = counter << 12;
  if (mean < 30.0) {
    // Inversion by sequential search on the uniform product.
    const double limit = std::exp(-mean);
    double p = 1.0;
    std::uint64_t k = 0;
    do {
      p *= uniform(base + k);
      ++k;
    } while (p > limit && k < 4000);
    return k - 1;
  }
  // PTRS transformed-rejection (Hormann).
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_mean = std::log(mean);
  for (std::uint64_t j = 0; j < 2000; ++j) {
    const double u = uniform(base + 2 * j) - 0.5;
    const double v = uniform(base + 2 * j + 1);
    const double us = 0.5 - std::abs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        kf * log_mean - mean - std::lgamma(kf + 1.0))
      return static_cast<std::uint64_t>(kf);
  }
  return static_cast<std::uint64_t>(mean);  // unreachable in practice
}

namespace {

enum Label : std::uint8_t { kBackground = 0, kRim, kGray, kWhite, kVentricle, kStructure };

inline bool in_ellipse(double nx, double ny, double cx, double cy, double ax, double ay) {
  const double dx = (nx - cx) / ax, dy = (ny - cy) / ay;
  return dx * dx + dy * dy <= 1.0;
}

std::vector<std::uint8_t> dilate(const std::vector<std::uint8_t>& mask, int w, int h) {
  std::vector<std::uint8_t> out(mask.size(), 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      bool hit = false;
      for (int dy = -1; dy <= 1 && !hit; ++dy)
        for (int dx = -1; dx <= 1 && !hit; ++dx) {
          const int xx = x + dx, yy = y + dy;
          if (xx >= 0 && xx < w && yy >= 0 && yy < h &&
              mask[static_cast<std::size_t>(yy) * w + xx])
            hit = true;
        }
      out[static_cast<std::size_t>(y) * w + x] = hit ? 1 : 0;
    }
  return out;
}

}  // namespace

PhantomPair make_phantom_pair(int size) {
  if (size < 32) throw std::invalid_argument("make_phantom_pair: size must be >= 32");
  const int w = size, h = size;
  const std::size_t n = static_cast<std::size_t>(w) * h;

  std::vector<std::uint8_t> label(n, kBackground);
  std::vector<std::uint8_t> pet_lesion(n, 0), mri_lesion(n, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double nx = (x + 0.5) / size, ny = (y + 0.5) / size;
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      std::uint8_t l = kBackground;
      if (in_ellipse(nx, ny, 0.5, 0.5, 0.42, 0.46)) l = kRim;
      if (in_ellipse(nx, ny, 0.5, 0.5, 0.38, 0.42)) l = kGray;
      if (in_ellipse(nx, ny, 0.5, 0.52, 0.26, 0.30)) l = kWhite;
      if (in_ellipse(nx, ny, 0.5, 0.32, 0.11, 0.055)) l = kStructure;
      if (in_ellipse(nx, ny, 0.43, 0.50, 0.05, 0.11) ||
          in_ellipse(nx, ny, 0.57, 0.50, 0.05, 0.11))
        l = kVentricle;
      label[i] = l;
      if (in_ellipse(nx, ny, 0.67, 0.38, 0.04, 0.04)) pet_lesion[i] = 1;
      if (in_ellipse(nx, ny, 0.33, 0.52, 0.04, 0.04)) mri_lesion[i] = 1;
    }
  }

  // Intensity tables indexed by label. Background->rim rises in both
  // modalities (shared sign); gray->white falls in PET and rises in MRI
  // (opposing sign).
  constexpr double pet_table[6] = {0.0, 1.0, 6.0, 3.0, 0.5, 8.0};
  constexpr double mri_table[6] = {0.0, 1.0, 0.45, 0.8, 0.15, 0.6};
  constexpr double pet_lesion_value = 10.0;
  constexpr double mri_lesion_value = 0.35;

  PhantomPair out;
  out.pet_truth = Image(w, h);
  out.mri_truth = Image(w, h);
  out.pet_truth.lower_bound = 0.0;
  out.mri_truth.lower_bound = 0.0;
  out.support_mask.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    out.pet_truth.values[i] = pet_lesion[i] ? pet_lesion_value : pet_table[label[i]];
    out.mri_truth.values[i] = mri_lesion[i] ? mri_lesion_value : mri_table[label[i]];
    out.support_mask[i] = label[i] != kBackground ? 1 : 0;
  }

  out.pet_lesion_mask = dilate(pet_lesion, w, h);
  out.mri_lesion_mask = dilate(mri_lesion, w, h);

  const Image pet_mag = pointwise_magnitude(gradient(out.pet_truth));
  out.shared_edge_mask.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    out.shared_edge_mask[i] =
        (pet_mag.values[i] > 0.0 && !out.pet_lesion_mask[i] && !out.mri_lesion_mask[i]) ? 1 : 0;
  return out;
}

std::pair<Image, Image> make_1d_signals(int length) {
  if (length < 100) throw std::invalid_argument("make_1d_signals: length must be >= 100");
  // Jump signs agree at {30,70,90} and oppose at {10,50}; heights admit no
  // global rescaling of one channel onto the other.
  constexpr double blue_vals[6] = {2.8, 6.6, 1.5, 0.1, 5.7, 2.6};
  constexpr double red_vals[6] = {8.0, 3.5, 2.0, 6.0, 7.3, 1.3};
  constexpr int edges_percent[5] = {10, 30, 50, 70, 90};

  Image blue(length, 1), red(length, 1);
  int seg = 0;
  for (int x = 0; x < length; ++x) {
    while (seg < 5 && x >= edges_percent[seg] * length / 100) ++seg;
    blue.values[x] = blue_vals[seg];
    red.values[x] = red_vals[seg];
  }
  return {std::move(blue), std::move(red)};
}

SamplingMask make_mask_full(int size) {
  SamplingMask m(size, size);
  std::fill(m.keep.begin(), m.keep.end(), 1);
  return m;
}

SamplingMask make_mask_half(int size) {
  SamplingMask m(size, size);
  const int center = size / 2;
  for (int y = 0; y < size; ++y)
    if ((y - center) % 2 == 0)
      std::fill_n(m.keep.begin() + static_cast<std::size_t>(y) * size, size, 1);
  return m;
}

SamplingMask make_mask_spokes(int size, int n_spokes) {
  if (n_spokes < 1) throw std::invalid_argument("make_mask_spokes: need at least one spoke");
  SamplingMask m(size, size);
  const double c = size / 2;
  const double reach = std::numbers::sqrt2 * size / 2 + 1.0;
  for (int k = 0; k < n_spokes; ++k) {
    const double theta = std::numbers::pi * k / n_spokes;
    const double dx = std::cos(theta), dy = std::sin(theta);
    for (double t = -reach; t <= reach; t += 0.25) {
      const int x = static_cast<int>(std::lround(c + t * dx));
      const int y = static_cast<int>(std::lround(c + t * dy));
      if (x >= 0 && x < size && y >= 0 && y < size)
        m.keep[static_cast<std::size_t>(y) * size + x] = 1;
    }
  }
  return m;
}

SamplingMask make_mask_spiral(int size, double turns) {
  if (!(turns > 0.0)) throw std::invalid_argument("make_mask_spiral: turns must be positive");
  SamplingMask m(size, size);
  const double c = size / 2;
  const double max_r = size / 2.0 - 1.0;
  const double theta_end = 2.0 * std::numbers::pi * turns;
  m.keep[static_cast<std::size_t>(size / 2) * size + size / 2] = 1;  // DC
  double theta = 0.0;
  while (theta <= theta_end) {
    const double r = max_r * theta / theta_end;
    const int x = static_cast<int>(std::lround(c + r * std::cos(theta)));
    const int y = static_cast<int>(std::lround(c + r * std::sin(theta)));
    if (x >= 0 && x < size && y >= 0 && y < size)
      m.keep[static_cast<std::size_t>(y) * size + x] = 1;
    theta += 0.3 / std::max(1.0, r);
  }
  return m;
}

int spokes_for_fraction(int size, double fraction) {
  for (int n = 1; n <= 4 * size; ++n)
    if (make_mask_spokes(size, n).fraction_sampled() >= fraction) return n;
  return 4 * size;
}

Sinogram simulate_pet(const Image& truth, const LinearOperator& pet_op,
                      double target_total_counts, std::uint64_t seed, double* scale_out) {
  if (!(target_total_counts > 0.0))
    throw std::invalid_argument("simulate_pet: target count must be positive");
  std::vector<double> clean = pet_op.apply(truth);
  double total = 0.0;
  for (double v : clean) total += v;
  if (!(total > 0.0)) throw std::invalid_argument("simulate_pet: clean sinogram is zero");
  const double scale = target_total_counts / total;
  if (scale_out != nullptr) *scale_out = scale;

  CounterRng rng(seed);
  Sinogram counts(1, static_cast<int>(clean.size()));
  for (std::size_t i = 0; i < clean.size(); ++i)
    counts.values[i] = static_cast<double>(rng.poisson(scale * clean[i], i));
  return counts;
}

ComplexGrid simulate_mri(const Image& truth, const SamplingMask& mask, double energy_fraction,
                         std::uint64_t seed) {
  if (!(energy_fraction > 0.0) || !(energy_fraction < 1.0))
    throw std::invalid_argument("simulate_mri: energy fraction must be in (0,1)");
  Dft2Operator op(truth.width, truth.height, mask);
  ComplexGrid g = op.forward(truth);
  double energy = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) energy += g.re[i] * g.re[i] + g.im[i] * g.im[i];
  const std::size_t m = mask.count();
  const double sigma = std::sqrt(energy_fraction * energy / (2.0 * static_cast<double>(m)));

  // Measurements live in FFT index order; noise goes on sampled entries only.
  CounterRng rng(seed, 1);
  const std::vector<std::uint8_t>& keep = op.keep_fft();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (keep[i]) {
      g.re[i] += sigma * rng.normal(2 * i);
      g.im[i] += sigma * rng.normal(2 * i + 1);
    }
  }
  return g;
}

}  // namespace icb
