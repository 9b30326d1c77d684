#pragma once

#include "icb/diffops.hpp"
#include "icb/grid.hpp"

namespace icb {

// Dual vector field q with p = -div q representing a TV subgradient.
// Inexact inner convergence may leave isolated pixels marginally above
// magnitude 1; anything beyond the slack is clamped and flagged upstream.
struct SubgradientState {
  VectorField q;
  int channel_id = 0;
  int bregman_iteration = 0;

  static constexpr double magnitude_slack = 1e-3;

  SubgradientState() = default;
  SubgradientState(int w, int h, int channel = 0) : q(w, h), channel_id(channel) {}

  double max_magnitude() const;
};

// D(v) = total_variation(v) - <q, grad v>. Nonnegative for valid q.
double bregman_tv(const Image& v, const VectorField& q);
double bregman_tv(const Image& v, const SubgradientState& q);

// Closed-form infimal-convolution integrand. f_dir must be a unit vector;
// q may have magnitude up to 1 (a slack of 1e-3 is renormalized, more is an
// error). With c = f_dir . q_vec:
//   |q| < |cos phi|  ->  1 - |c|
//   otherwise        ->  |sin phi| * sqrt(1 - |q|^2)
// and phi := 0 when q = 0, giving the value 1.
double icb_integrand(double fx, double fy, double qx, double qy);

// Sum over pixels with |grad v| > 0 of |grad v| * G(grad v / |grad v|, q).
// Diagnostic value of the infimal convolution of the two TV Bregman
// distances with subgradients +/-q; the solver optimizes the splitting form
// and never differentiates this.
double icb_value(const Image& v, const SubgradientState& q);
double icb_value(const Image& v, const VectorField& q);

// Brute-force evaluation of the infimal convolution by minimizing the
// splitting of the gradient field pointwise,
//   min over g of |dv - g| + |g| - q . (dv - 2 g),
// with a polar search of `grid_steps` directions (exact convex line search
// per direction) plus local angular refinement. Never touches the closed
// form, so it serves as an independent check of icb_value. Small images
// only (at most 16 x 16).
double icb_oracle(const Image& v, const SubgradientState& q, int grid_steps);
double icb_oracle(const Image& v, const VectorField& q, int grid_steps);

}  // namespace icb
