#pragma once

#include "icb/grid.hpp"

namespace icb {

// Forward differences with Neumann boundary:
// (grad u).x(x,y) = u(x+1,y) - u(x,y) for x < W-1, else 0 (same pattern in y).
VectorField gradient(const Image& u);
void gradient_into(const Image& u, VectorField& out);

// Exact negative adjoint of gradient: <grad u, p> = -<u, div p> for all u, p.
Image divergence(const VectorField& p);
void divergence_into(const VectorField& p, Image& out);

// Isotropic total variation: sum over pixels of the Euclidean gradient magnitude.
double total_variation(const Image& u);

struct SubgradientCheck {
  double max_magnitude = 0.0;
  double alignment_defect = 0.0;
  bool is_valid = false;
};

// Checks q against the dual characterization of the TV subdifferential:
// pointwise |q| <= 1 and <q, grad u> attains total_variation(u).
SubgradientCheck validate_subgradient(const VectorField& q, const Image& u, double tol);

}  // namespace icb
