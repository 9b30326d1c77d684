#pragma once

#include <limits>
#include <string>

#include "icb/bregman.hpp"
#include "icb/operators.hpp"
#include "icb/prox.hpp"

namespace icb {

enum class Fidelity { kl, quadratic };

// Coupling to a foreign channel: weight w_ij and the foreign subgradient q_j.
struct ForeignCoupling {
  double weight = 0.0;
  const VectorField* q = nullptr;
};

// One saddle-point subproblem: one Bregman step of one channel.
struct InnerProblem {
  const LinearOperator* op = nullptr;
  std::span<const double> data;
  Fidelity fidelity = Fidelity::quadratic;
  double alpha = 1.0;                    // data term weight (alpha or beta)
  double own_weight = 1.0;               // w_i, must be > 0
  const VectorField* own_q = nullptr;    // nullptr = zero subgradient
  std::vector<ForeignCoupling> foreign;  // entries with weight > 0
  bool nonneg = true;

  void validate() const;  // row normalization, weight signs, data domain
};

struct GapReport {
  double gap_per_pixel = std::numeric_limits<double>::infinity();
  double range_constraint_violation = std::numeric_limits<double>::infinity();
  double divergence_constraint = std::numeric_limits<double>::infinity();
  int inner_iterations = 0;
  bool converged = false;
  bool diverged = false;
};

struct SolveOptions {
  double tol_gap = 1e-4;         // on gap / (number of pixels)
  double tol_constraint = 1e-5;
  int max_iters = 20000;
  int check_every = 25;
  bool record_history = false;   // gap samples for trend diagnostics
};

// Full iterate of the saddle-point solver; exposed so the gap can be
// evaluated on externally constructed states.
struct InnerState {
  Image u;
  std::vector<Image> z;           // one splitting variable per foreign channel
  std::vector<double> y1;         // measurement-shaped dual
  VectorField y2;
  std::vector<VectorField> y3;    // per foreign channel
  std::vector<VectorField> y4;
};

struct InnerResult {
  Image u;
  VectorField y2;
  std::vector<Image> z;
  std::vector<VectorField> y3;
  std::vector<VectorField> y4;
  GapReport report;
  std::vector<std::pair<int, double>> gap_history;  // (iteration, gap/N)
};

// Diagonal step sizes. tau is per primal entry; sigma1 is per measurement
// row (empty means the scalar sigma1_scalar applies); the gradient-block
// sigmas are scalars fixed by the row structure of the difference operator.
struct Preconditioner {
  std::vector<double> tau_u;
  std::vector<double> tau_z;
  std::vector<double> sigma1;
  double sigma1_scalar = 1.0;
  double sigma2 = 0.5;
  double sigma3 = 0.25;
  double sigma4 = 0.5;
  int flagged = 0;  // zero row/column sums replaced by 1
};

Preconditioner build_preconditioner(const InnerProblem& problem);

// Data term value H(w) and conjugate value H*(y) for the gap.
double fidelity_value(Fidelity kind, double alpha, std::span<const double> w,
                      std::span<const double> data);
double fidelity_conjugate_value(Fidelity kind, double alpha, std::span<const double> y,
                                std::span<const double> data);

GapReport compute_gap(const InnerState& state, const InnerProblem& problem);

InnerResult inner_solve(const InnerProblem& problem, const SolveOptions& options = {});

struct SubgradientUpdate {
  SubgradientState state;
  double max_magnitude = 0.0;  // before any clamping
  int clamped_pixels = 0;
  bool warned = false;         // magnitude exceeded 1 + slack
};

// q_new = y2 / w_i + q_old; pixels beyond the validity slack are renormalized
// to magnitude 1 and flagged.
SubgradientUpdate update_subgradient(const SubgradientState& q_old, const VectorField& y2,
                                     double w_i);

}  // namespace icb
