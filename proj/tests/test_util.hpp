#pragma once

#include <cstdint>
#include <random>

#include "icb/grid.hpp"

namespace testutil {

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline icb::Image random_image(int w, int h, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist(0.0, scale);
  icb::Image img(w, h);
  for (double& v : img.values) v = dist(gen);
  return img;
}

inline icb::Image random_nonneg_image(int w, int h, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(0.0, scale);
  icb::Image img(w, h);
  for (double& v : img.values) v = dist(gen);
  return img;
}

inline icb::VectorField random_field(int w, int h, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist(0.0, scale);
  icb::VectorField f(w, h);
  for (double& v : f.x) v = dist(gen);
  for (double& v : f.y) v = dist(gen);
  return f;
}

// Random dual field with pointwise magnitude at most max_mag.
inline icb::VectorField random_ball_field(int w, int h, std::uint64_t seed,
                                          double max_mag = 1.0) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::uniform_real_distribution<double> mag(0.0, max_mag);
  icb::VectorField f(w, h);
  for (std::size_t i = 0; i < f.size(); ++i) {
    double x = dist(gen), y = dist(gen);
    const double n = std::hypot(x, y);
    const double m = mag(gen);
    if (n > 0) {
      f.x[i] = m * x / n;
      f.y[i] = m * y / n;
    }
  }
  return f;
}

inline double rel_l2(const icb::Image& a, const icb::Image& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.values[i] - b.values[i];
    num += d * d;
    den += b.values[i] * b.values[i];
  }
  return std::sqrt(num / den);
}

}  // namespace testutil
