#pragma once

#include <string>

#include "icb/operators.hpp"

namespace icb {

// Self-describing binary container: magic "ICBGRID\0", version, kind tag,
// two 32-bit dims, flags, then the payload as little-endian 64-bit floats
// (8-bit for masks). Round trips are bit exact.
void save_grid(const std::string& path, const Image& img);
void save_grid(const std::string& path, const VectorField& vf);
void save_grid(const std::string& path, const Sinogram& s);
void save_grid(const std::string& path, const ComplexGrid& g);
void save_mask(const std::string& path, const SamplingMask& m);

Image load_image(const std::string& path);
VectorField load_vector_field(const std::string& path);
Sinogram load_sinogram(const std::string& path);
ComplexGrid load_complex_grid(const std::string& path);
SamplingMask load_mask(const std::string& path);

// 1 x N signals as one-column CSV with 17 significant digits.
void save_signal_csv(const std::string& path, const Image& signal);
Image load_signal_csv(const std::string& path);

// 8-bit grayscale PNG with values mapped linearly from [vmin, vmax].
void write_png_gray(const std::string& path, const Image& img, double vmin, double vmax);

// Side-by-side tiles, each normalized by its own range.
struct MontageTile {
  const Image* image = nullptr;
  double vmin = 0.0;
  double vmax = 1.0;
};
void write_png_montage(const std::string& path, const std::vector<MontageTile>& tiles,
                       int gap = 2);

// Simple line plot of one or more series on a log10 or linear y-axis.
void write_png_curves(const std::string& path, const std::vector<std::vector<double>>& series,
                      int width, int height, bool log_y);

}  // namespace icb
