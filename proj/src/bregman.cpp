#include "icb/bregman.hpp"

#include <cmath>

namespace icb {

double SubgradientState::max_magnitude() const {
  double m = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) m = std::max(m, std::hypot(q.x[i], q.y[i]));
  return m;
}

double bregman_tv(const Image& v, const VectorField& q) {
  if (q.width != v.width || q.height != v.height)
    throw std::invalid_argument("bregman_tv: shape mismatch");
  return total_variation(v) - inner_product(q, gradient(v));
}

double bregman_tv(const Image& v, const SubgradientState& q) { return bregman_tv(v, q.q); }

double icb_integrand(double fx, double fy, double qx, double qy) {
  const double fmag = std::hypot(fx, fy);
  if (std::abs(fmag - 1.0) > 1e-9)
    throw std::invalid_argument("icb_integrand: f_dir is not a unit vector");
  double qmag = std::hypot(qx, qy);
  if (qmag > 1.0 + SubgradientState::magnitude_slack)
    throw std::invalid_argument("icb_integrand: |q| exceeds 1 beyond slack");
  if (qmag > 1.0) {
    qx /= qmag;
    qy /= qmag;
    qmag = 1.0;
  }
  if (qmag == 0.0) return 1.0;  // phi := 0 by convention
  const double c = fx * qx + fy * qy;  // = cos(phi) * |q|
  const double cosphi = c / qmag;
  if (qmag < std::abs(cosphi)) return 1.0 - std::abs(c);
  const double sin2 = std::max(0.0, 1.0 - cosphi * cosphi);
  return std::sqrt(sin2) * std::sqrt(std::max(0.0, 1.0 - qmag * qmag));
}

namespace {

double icb_value_impl(const Image& v, const VectorField& q) {
  if (q.width != v.width || q.height != v.height)
    throw std::invalid_argument("icb_value: shape mismatch");
  const VectorField g = gradient(v);
  double total = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double m = std::hypot(g.x[i], g.y[i]);
    if (m > 0.0) total += m * icb_integrand(g.x[i] / m, g.y[i] / m, q.x[i], q.y[i]);
  }
  return total;
}

}  // namespace

double icb_value(const Image& v, const VectorField& q) { return icb_value_impl(v, q); }

double icb_value(const Image& v, const SubgradientState& q) { return icb_value_impl(v, q.q); }

namespace {

// h(t) along a fixed direction is convex; golden-section to machine level.
double min_along_direction(double fx, double fy, double qx, double qy, double dx, double dy,
                           double t_hi) {
  auto h = [&](double t) {
    const double gx = t * dx, gy = t * dy;
    return std::hypot(fx - gx, fy - gy) + t - qx * (fx - 2.0 * gx) - qy * (fy - 2.0 * gy);
  };
  constexpr double inv_phi = 0.6180339887498949;
  double a = 0.0, b = t_hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double hc = h(c), hd = h(d);
  for (int it = 0; it < 90; ++it) {
    if (hc < hd) {
      b = d;
      d = c;
      hd = hc;
      c = b - inv_phi * (b - a);
      hc = h(c);
    } else {
      a = c;
      c = d;
      hc = hd;
      d = a + inv_phi * (b - a);
      hd = h(d);
    }
  }
  return std::min(hc, hd);
}

double pointwise_splitting_min(double fx, double fy, double qx, double qy, int grid_steps) {
  // Candidates with closed values: g = 0 and g = f.
  double best = std::min(1.0 - (qx * fx + qy * fy), 1.0 + (qx * fx + qy * fy));
  const double two_pi = 6.283185307179586;
  double best_theta = 0.0;
  for (int k = 0; k < grid_steps; ++k) {
    const double theta = two_pi * k / grid_steps;
    const double val =
        min_along_direction(fx, fy, qx, qy, std::cos(theta), std::sin(theta), 4.0);
    if (val < best) {
      best = val;
      best_theta = theta;
    }
  }
  // Angular refinement around the best coarse direction.
  double span = two_pi / grid_steps;
  for (int round = 0; round < 6; ++round) {
    for (int k = -4; k <= 4; ++k) {
      const double theta = best_theta + span * k / 4.0;
      const double val =
          min_along_direction(fx, fy, qx, qy, std::cos(theta), std::sin(theta), 4.0);
      if (val < best) {
        best = val;
        best_theta = theta;
      }
    }
    span *= 0.25;
  }
  return best;
}

double icb_oracle_impl(const Image& v, const VectorField& q, int grid_steps) {
  if (v.width > 16 || v.height > 16)
    throw std::invalid_argument("icb_oracle: image larger than 16 x 16");
  if (q.width != v.width || q.height != v.height)
    throw std::invalid_argument("icb_oracle: shape mismatch");
  if (grid_steps < 8) throw std::invalid_argument("icb_oracle: grid_steps too small");
  const VectorField g = gradient(v);
  double total = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double m = std::hypot(g.x[i], g.y[i]);
    if (m <= 0.0) continue;
    double qx = q.x[i], qy = q.y[i];
    const double qmag = std::hypot(qx, qy);
    if (qmag > 1.0) {
      qx /= qmag;
      qy /= qmag;
    }
    total += m * pointwise_splitting_min(g.x[i] / m, g.y[i] / m, qx, qy, grid_steps);
  }
  return total;
}

}  // namespace

double icb_oracle(const Image& v, const VectorField& q, int grid_steps) {
  return icb_oracle_impl(v, q, grid_steps);
}

double icb_oracle(const Image& v, const SubgradientState& q, int grid_steps) {
  return icb_oracle_impl(v, q.q, grid_steps);
}

}  // namespace icb
