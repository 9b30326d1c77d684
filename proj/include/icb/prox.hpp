#pragma once

#include "icb/grid.hpp"

namespace icb {

// Componentwise proximal map of the conjugate of the scaled Kullback-Leibler
// data term H(w) = alpha * sum_i (w_i - f_i log w_i):
//   prox(y) = (alpha + y)/2 - sqrt((y - alpha)^2/4 + sigma*alpha*f).
// Output stays strictly below alpha wherever f > 0.
void prox_kl_conjugate_inplace(std::span<double> y, double sigma, double alpha,
                               std::span<const double> f);
Sinogram prox_kl_conjugate(const Sinogram& y, double sigma, double alpha, const Sinogram& f);

// Componentwise proximal map of the conjugate of H(w) = beta/2 |w - g|^2:
//   prox(y) = (beta*y - sigma*beta*g) / (beta + sigma).
// Acts identically on real components, so complex data is handled as
// interleaved (re, im) pairs.
void prox_quadratic_conjugate_inplace(std::span<double> y, double sigma, double beta,
                                      std::span<const double> g);
ComplexGrid prox_quadratic_conjugate(const ComplexGrid& y, double sigma, double beta,
                                     const ComplexGrid& g);

// Pointwise Euclidean projection onto { s : |s + shift| <= radius }.
VectorField project_shifted_ball(const VectorField& s, const VectorField& shift, double radius);
// Hot-path variant with shift = shift_scale * q; q == nullptr means zero shift.
void project_shifted_ball_inplace(VectorField& s, const VectorField* q, double shift_scale,
                                  double radius);

Image project_nonnegative(const Image& u);
void project_nonnegative_inplace(std::span<double> u);

}  // namespace icb
