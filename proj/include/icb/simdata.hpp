#pragma once

#include <cstdint>
#include <utility>

#include "icb/operators.hpp"

namespace icb {

// Counter-based generator: every value is a pure function of
// (seed, stream, counter) through the SplitMix64 finalizer, so any entry of
// a data set can be regenerated independently and in any order.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream) {}

  std::uint64_t bits(std::uint64_t counter) const;
  double uniform(std::uint64_t counter) const;        // in [0, 1)
  double normal(std::uint64_t counter) const;          // standard normal, Box-Muller
  // Poisson by inversion for mean < 30, PTRS rejection above.
  std::uint64_t poisson(double mean, std::uint64_t counter) const;

 private:
  std::uint64_t seed_, stream_;
};

struct PhantomPair {
  Image pet_truth;  // range [0, 10]
  Image mri_truth;  // range [0, 1]
  std::vector<std::uint8_t> shared_edge_mask;
  std::vector<std::uint8_t> pet_lesion_mask;
  std::vector<std::uint8_t> mri_lesion_mask;
  std::vector<std::uint8_t> support_mask;  // evaluation region of interest
};

// Procedural piecewise-constant brain-like phantom pair: identical region
// boundaries in both modalities except one PET-only hot lesion and one
// MRI-only lesion; at least one shared edge agrees in jump sign and one
// opposes.
PhantomPair make_phantom_pair(int size);

// Two piecewise-constant 1 x length signals with jumps exactly at
// {10,30,50,70,90} (scaled by length/100), same-sign jumps at {30,70,90},
// opposite-sign at {10,50}, and heights that no global positive scaling maps
// onto each other.
std::pair<Image, Image> make_1d_signals(int length);

SamplingMask make_mask_full(int size);
SamplingMask make_mask_half(int size);                   // every second row, DC row kept
SamplingMask make_mask_spokes(int size, int n_spokes);   // radial lines through the center
SamplingMask make_mask_spiral(int size, double turns);   // Archimedean spiral
// Smallest spoke count whose fraction reaches at least `fraction`.
int spokes_for_fraction(int size, double fraction);

// Scales the clean forward projection to the target total count, then draws
// independent Poisson bins. Returns the counts; *scale_out receives the
// applied intensity scale (counts = Poisson(scale * clean)).
Sinogram simulate_pet(const Image& truth, const LinearOperator& pet_op,
                      double target_total_counts, std::uint64_t seed, double* scale_out);

// Masked DFT of the truth plus complex Gaussian noise on the sampled
// frequencies, with the noise scale calibrated so the expected noise energy
// equals energy_fraction times the clean data energy.
ComplexGrid simulate_mri(const Image& truth, const SamplingMask& mask, double energy_fraction,
                         std::uint64_t seed);

}  // namespace icb
