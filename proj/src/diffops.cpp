#include "icb/diffops.hpp"

#include <algorithm>
#include <cmath>

namespace icb {

void gradient_into(const Image& u, VectorField& out) {
  const int w = u.width, h = u.height;
  if (out.width != w || out.height != h) out = VectorField(w, h);
  for (int y = 0; y < h; ++y) {
    const std::size_t row = static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w - 1; ++x)
      out.x[row + x] = u.values[row + x + 1] - u.values[row + x];
    out.x[row + w - 1] = 0.0;
  }
  for (int y = 0; y < h - 1; ++y) {
    const std::size_t row = static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x)
      out.y[row + x] = u.values[row + w + x] - u.values[row + x];
  }
  std::fill(out.y.begin() + static_cast<std::size_t>(h - 1) * w, out.y.end(), 0.0);
}

VectorField gradient(const Image& u) {
  VectorField g(u.width, u.height);
  gradient_into(u, g);
  return g;
}

void divergence_into(const VectorField& p, Image& out) {
  const int w = p.width, h = p.height;
  if (out.width != w || out.height != h) out = Image(w, h);
  for (int y = 0; y < h; ++y) {
    const std::size_t row = static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      double d = 0.0;
      if (x < w - 1) d += p.x[row + x];
      if (x > 0) d -= p.x[row + x - 1];
      if (y < h - 1) d += p.y[row + x];
      if (y > 0) d -= p.y[row - w + x];
      out.values[row + x] = d;
    }
  }
}

Image divergence(const VectorField& p) {
  Image d(p.width, p.height);
  divergence_into(p, d);
  return d;
}

double total_variation(const Image& u) {
  const int w = u.width, h = u.height;
  double total = 0.0;
  for (int y = 0; y < h; ++y) {
    const std::size_t row = static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      const double gx = (x < w - 1) ? u.values[row + x + 1] - u.values[row + x] : 0.0;
      const double gy = (y < h - 1) ? u.values[row + w + x] - u.values[row + x] : 0.0;
      total += std::hypot(gx, gy);
    }
  }
  return total;
}

SubgradientCheck validate_subgradient(const VectorField& q, const Image& u, double tol) {
  if (q.width != u.width || q.height != u.height)
    throw std::invalid_argument("subgradient/image shape mismatch");
  SubgradientCheck check;
  for (std::size_t i = 0; i < q.size(); ++i)
    check.max_magnitude = std::max(check.max_magnitude, std::hypot(q.x[i], q.y[i]));
  const double tv = total_variation(u);
  check.alignment_defect = tv - inner_product(q, gradient(u));
  check.is_valid = check.max_magnitude <= 1.0 + tol &&
                   check.alignment_defect <= tol * (1.0 + tv);
  return check;
}

}  // namespace icb
