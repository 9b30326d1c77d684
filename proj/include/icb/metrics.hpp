#pragma once

#include <cstdint>

#include "icb/grid.hpp"

namespace icb {

// Mean local structural similarity with the standard 11x11 Gaussian window
// (sigma 1.5) and constants C1 = (0.01 L)^2, C2 = (0.03 L)^2. Result in
// [-1, 1]; symmetric in its two image arguments.
double ssim(const Image& x, const Image& truth, double dynamic_range);

// Same, averaged only over pixels with a nonzero region-of-interest flag.
double ssim(const Image& x, const Image& truth, double dynamic_range,
            const std::vector<std::uint8_t>& roi);

}  // namespace icb
