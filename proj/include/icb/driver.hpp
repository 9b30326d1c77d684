#pragma once

#include <string>

#include "icb/solver.hpp"

namespace icb {

// One reconstruction channel of the outer Bregman loop.
struct ChannelSpec {
  std::string name;
  const LinearOperator* op = nullptr;
  std::vector<double> data;
  Fidelity fidelity = Fidelity::quadratic;
  double alpha = 1.0;
  std::vector<double> weight_row;  // length = number of channels, sums to 1
  bool nonneg = true;

  // Optional SSIM tracking against a known truth.
  const Image* ground_truth = nullptr;
  double ssim_dynamic_range = 1.0;
  const std::vector<std::uint8_t>* ssim_roi = nullptr;
};

struct SolveReport {
  int bregman_iteration = 0;
  int channel = 0;
  std::string channel_name;
  int update_order = 0;  // position in the sequential channel sweep
  GapReport gap;
  double fidelity = 0.0;
  double tv = 0.0;
  double ssim = std::numeric_limits<double>::quiet_NaN();
  double q_max_magnitude = 0.0;
  int q_clamped_pixels = 0;
  double q_alignment_defect = 0.0;
  bool q_valid = false;
};

struct JointRunConfig {
  int n_bregman = 1;
  SolveOptions inner;
  bool stop_on_ssim_decline = false;  // requires ground truths on all channels
  bool keep_history = false;
};

struct ChannelResult {
  Image image;                  // final (or SSIM-peak when stopping early)
  std::vector<Image> history;   // per Bregman iteration, if kept
  SubgradientState q;
};

struct JointResult {
  std::vector<ChannelResult> channels;
  std::vector<SolveReport> reports;
  int completed_bregman = 0;
  bool halted_on_divergence = false;
  bool stopped_on_ssim_decline = false;
};

// Outer Bregman loop: u_i^0 = 0, q_i^0 = 0; per iteration the channels are
// solved sequentially in list order, each update immediately publishing its
// new subgradient to the channels that follow.
JointResult run_joint(const std::vector<ChannelSpec>& channels, const JointRunConfig& config);

// Multiplicative EM iteration for Poisson data from a flat start.
// The Poisson log-likelihood sum(f log(Ku) - Ku) is nondecreasing.
Image reconstruct_mlem(const Sinogram& data, const LinearOperator& op, int iterations,
                       std::vector<double>* loglik_history = nullptr);

Image reconstruct_zero_fill(const ComplexGrid& g, const Dft2Operator& op);

// Single-channel TV reconstruction (one Bregman step, zero subgradient).
InnerResult reconstruct_tv(const LinearOperator& op, std::span<const double> data,
                           Fidelity fidelity, double alpha, bool nonneg,
                           const SolveOptions& options = {});

struct JtvResult {
  Image u;
  Image v;
  GapReport report;
};

// Joint total variation: coupled saddle-point solve with the pointwise
// Euclidean norm over the stacked 4-vector (grad u, grad v).
JtvResult reconstruct_jtv(const ChannelSpec& a, const ChannelSpec& b,
                          const SolveOptions& options = {});

// Rescales alpha of channels 1..n-1 until every first-iterate data term is
// within `tolerance` (relative) of channel 0's. Returns the achieved ratios.
std::vector<double> balance_fidelity_weights(std::vector<ChannelSpec>& channels,
                                             const SolveOptions& options,
                                             double tolerance = 0.1, int max_rounds = 6);

}  // namespace icb
