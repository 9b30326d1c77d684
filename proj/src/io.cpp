#include "icb/io.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace icb {

namespace {

constexpr char kMagic[8] = {'I', 'C', 'B', 'G', 'R', 'I', 'D', '\0'};
constexpr std::uint32_t kVersion = 1;

enum class GridKind : std::uint32_t {
  image = 1,
  vector_field = 2,
  sinogram = 3,
  complex_grid = 4,
  mask = 5,
};

struct Header {
  std::uint32_t version = kVersion;
  std::uint32_t kind = 0;
  std::uint32_t dim0 = 0;
  std::uint32_t dim1 = 0;
  std::uint32_t flags = 0;
  double extra = 0.0;
};

void write_header(std::ofstream& out, const Header& hd) {
  out.write(kMagic, sizeof(kMagic));
  out.write(reinterpret_cast<const char*>(&hd.version), 4);
  out.write(reinterpret_cast<const char*>(&hd.kind), 4);
  out.write(reinterpret_cast<const char*>(&hd.dim0), 4);
  out.write(reinterpret_cast<const char*>(&hd.dim1), 4);
  out.write(reinterpret_cast<const char*>(&hd.flags), 4);
  out.write(reinterpret_cast<const char*>(&hd.extra), 8);
}

Header read_header(std::ifstream& in, const std::string& path, GridKind expected) {
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
    throw std::runtime_error(path + ": not a grid file (bad magic)");
  Header hd;
  in.read(reinterpret_cast<char*>(&hd.version), 4);
  in.read(reinterpret_cast<char*>(&hd.kind), 4);
  in.read(reinterpret_cast<char*>(&hd.dim0), 4);
  in.read(reinterpret_cast<char*>(&hd.dim1), 4);
  in.read(reinterpret_cast<char*>(&hd.flags), 4);
  in.read(reinterpret_cast<char*>(&hd.extra), 8);
  if (!in) throw std::runtime_error(path + ": truncated header");
  if (hd.version != kVersion) throw std::runtime_error(path + ": unsupported version");
  if (hd.kind != static_cast<std::uint32_t>(expected))
    throw std::runtime_error(path + ": unexpected grid kind");
  return hd;
}

void write_payload(std::ofstream& out, std::span<const double> data) {
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(double)));
}

void read_payload(std::ifstream& in, const std::string& path, std::span<double> data) {
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(data.size() * sizeof(double)));
  if (!in) throw std::runtime_error(path + ": payload shorter than header dimensions");
  char probe;
  if (in.read(&probe, 1)) throw std::runtime_error(path + ": payload longer than header dimensions");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open");
  return in;
}

}  // namespace

void save_grid(const std::string& path, const Image& img) {
  auto out = open_out(path);
  Header hd;
  hd.kind = static_cast<std::uint32_t>(GridKind::image);
  hd.dim0 = static_cast<std::uint32_t>(img.width);
  hd.dim1 = static_cast<std::uint32_t>(img.height);
  if (img.lower_bound.has_value()) {
    hd.flags = 1;
    hd.extra = *img.lower_bound;
  }
  write_header(out, hd);
  write_payload(out, img.values);
}

Image load_image(const std::string& path) {
  auto in = open_in(path);
  const Header hd = read_header(in, path, GridKind::image);
  Image img(static_cast<int>(hd.dim0), static_cast<int>(hd.dim1));
  if (hd.flags & 1) img.lower_bound = hd.extra;
  read_payload(in, path, img.values);
  return img;
}

void save_grid(const std::string& path, const VectorField& vf) {
  auto out = open_out(path);
  Header hd;
  hd.kind = static_cast<std::uint32_t>(GridKind::vector_field);
  hd.dim0 = static_cast<std::uint32_t>(vf.width);
  hd.dim1 = static_cast<std::uint32_t>(vf.height);
  write_header(out, hd);
  write_payload(out, vf.x);
  write_payload(out, vf.y);
}

VectorField load_vector_field(const std::string& path) {
  auto in = open_in(path);
  const Header hd = read_header(in, path, GridKind::vector_field);
  VectorField vf(static_cast<int>(hd.dim0), static_cast<int>(hd.dim1));
  in.read(reinterpret_cast<char*>(vf.x.data()),
          static_cast<std::streamsize>(vf.x.size() * sizeof(double)));
  read_payload(in, path, vf.y);
  return vf;
}

void save_grid(const std::string& path, const Sinogram& s) {
  auto out = open_out(path);
  Header hd;
  hd.kind = static_cast<std::uint32_t>(GridKind::sinogram);
  hd.dim0 = static_cast<std::uint32_t>(s.n_angles);
  hd.dim1 = static_cast<std::uint32_t>(s.n_bins);
  write_header(out, hd);
  write_payload(out, s.values);
}

Sinogram load_sinogram(const std::string& path) {
  auto in = open_in(path);
  const Header hd = read_header(in, path, GridKind::sinogram);
  Sinogram s(static_cast<int>(hd.dim0), static_cast<int>(hd.dim1));
  read_payload(in, path, s.values);
  return s;
}

void save_grid(const std::string& path, const ComplexGrid& g) {
  auto out = open_out(path);
  Header hd;
  hd.kind = static_cast<std::uint32_t>(GridKind::complex_grid);
  hd.dim0 = static_cast<std::uint32_t>(g.width);
  hd.dim1 = static_cast<std::uint32_t>(g.height);
  write_header(out, hd);
  write_payload(out, g.re);
  write_payload(out, g.im);
}

ComplexGrid load_complex_grid(const std::string& path) {
  auto in = open_in(path);
  const Header hd = read_header(in, path, GridKind::complex_grid);
  ComplexGrid g(static_cast<int>(hd.dim0), static_cast<int>(hd.dim1));
  in.read(reinterpret_cast<char*>(g.re.data()),
          static_cast<std::streamsize>(g.re.size() * sizeof(double)));
  read_payload(in, path, g.im);
  return g;
}

void save_mask(const std::string& path, const SamplingMask& m) {
  auto out = open_out(path);
  Header hd;
  hd.kind = static_cast<std::uint32_t>(GridKind::mask);
  hd.dim0 = static_cast<std::uint32_t>(m.width);
  hd.dim1 = static_cast<std::uint32_t>(m.height);
  write_header(out, hd);
  out.write(reinterpret_cast<const char*>(m.keep.data()),
            static_cast<std::streamsize>(m.keep.size()));
}

SamplingMask load_mask(const std::string& path) {
  auto in = open_in(path);
  const Header hd = read_header(in, path, GridKind::mask);
  SamplingMask m(static_cast<int>(hd.dim0), static_cast<int>(hd.dim1));
  in.read(reinterpret_cast<char*>(m.keep.data()), static_cast<std::streamsize>(m.keep.size()));
  if (!in) throw std::runtime_error(path + ": truncated mask payload");
  return m;
}

void save_signal_csv(const std::string& path, const Image& signal) {
  if (signal.height != 1) throw std::invalid_argument("save_signal_csv: expected a 1 x N signal");
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  char buf[64];
  for (double v : signal.values) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", v);
    out << buf;
  }
}

Image load_signal_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open");
  std::vector<double> vals;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    vals.push_back(std::stod(line));
  }
  Image img(static_cast<int>(vals.size()), 1);
  img.values = std::move(vals);
  return img;
}

namespace {

void put_u32_be(std::vector<unsigned char>& v, std::uint32_t x) {
  v.push_back(static_cast<unsigned char>(x >> 24));
  v.push_back(static_cast<unsigned char>(x >> 16));
  v.push_back(static_cast<unsigned char>(x >> 8));
  v.push_back(static_cast<unsigned char>(x));
}

void append_chunk(std::vector<unsigned char>& png, const char type[4],
                  const std::vector<unsigned char>& data) {
  put_u32_be(png, static_cast<std::uint32_t>(data.size()));
  const std::size_t crc_start = png.size();
  png.insert(png.end(), type, type + 4);
  png.insert(png.end(), data.begin(), data.end());
  const auto crc = crc32(0L, png.data() + crc_start, static_cast<uInt>(png.size() - crc_start));
  put_u32_be(png, static_cast<std::uint32_t>(crc));
}

void write_png_bytes(const std::string& path, int w, int h,
                     const std::vector<unsigned char>& gray) {
  std::vector<unsigned char> raw;
  raw.reserve(static_cast<std::size_t>(h) * (w + 1));
  for (int y = 0; y < h; ++y) {
    raw.push_back(0);  // filter: none
    raw.insert(raw.end(), gray.begin() + static_cast<std::size_t>(y) * w,
               gray.begin() + static_cast<std::size_t>(y + 1) * w);
  }
  uLongf comp_size = compressBound(static_cast<uLong>(raw.size()));
  std::vector<unsigned char> compressed(comp_size);
  if (compress2(compressed.data(), &comp_size, raw.data(), static_cast<uLong>(raw.size()), 9) !=
      Z_OK)
    throw std::runtime_error("png: deflate failed");
  compressed.resize(comp_size);

  std::vector<unsigned char> png = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
  std::vector<unsigned char> ihdr;
  put_u32_be(ihdr, static_cast<std::uint32_t>(w));
  put_u32_be(ihdr, static_cast<std::uint32_t>(h));
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(0);  // grayscale
  ihdr.push_back(0);
  ihdr.push_back(0);
  ihdr.push_back(0);
  append_chunk(png, "IHDR", ihdr);
  append_chunk(png, "IDAT", compressed);
  append_chunk(png, "IEND", {});

  auto out = open_out(path);
  out.write(reinterpret_cast<const char*>(png.data()), static_cast<std::streamsize>(png.size()));
}

unsigned char to_byte(double v, double vmin, double vmax) {
  if (vmax <= vmin) return 0;
  double t = (v - vmin) / (vmax - vmin);
  t = std::clamp(t, 0.0, 1.0);
  return static_cast<unsigned char>(std::lround(t * 255.0));
}

}  // namespace

void write_png_gray(const std::string& path, const Image& img, double vmin, double vmax) {
  std::vector<unsigned char> gray(img.size());
  for (std::size_t i = 0; i < img.size(); ++i) gray[i] = to_byte(img.values[i], vmin, vmax);
  write_png_bytes(path, img.width, img.height, gray);
}

void write_png_montage(const std::string& path, const std::vector<MontageTile>& tiles, int gap) {
  if (tiles.empty()) throw std::invalid_argument("write_png_montage: no tiles");
  int total_w = gap * (static_cast<int>(tiles.size()) - 1);
  int total_h = 0;
  for (const auto& t : tiles) {
    total_w += t.image->width;
    total_h = std::max(total_h, t.image->height);
  }
  std::vector<unsigned char> canvas(static_cast<std::size_t>(total_w) * total_h, 255);
  int x0 = 0;
  for (const auto& t : tiles) {
    for (int y = 0; y < t.image->height; ++y)
      for (int x = 0; x < t.image->width; ++x)
        canvas[static_cast<std::size_t>(y) * total_w + x0 + x] =
            to_byte(t.image->at(x, y), t.vmin, t.vmax);
    x0 += t.image->width + gap;
  }
  write_png_bytes(path, total_w, total_h, canvas);
}

void write_png_curves(const std::string& path, const std::vector<std::vector<double>>& series,
                      int width, int height, bool log_y) {
  std::vector<unsigned char> canvas(static_cast<std::size_t>(width) * height, 255);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  std::size_t max_len = 0;
  for (const auto& s : series) {
    max_len = std::max(max_len, s.size());
    for (double v : s) {
      const double t = log_y ? std::log10(std::max(v, 1e-300)) : v;
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
  }
  if (max_len < 2 || !(hi > lo)) {
    write_png_bytes(path, width, height, canvas);
    return;
  }
  const int margin = 4;
  auto ypix = [&](double v) {
    const double t = log_y ? std::log10(std::max(v, 1e-300)) : v;
    const double frac = (t - lo) / (hi - lo);
    return std::clamp(height - 1 - margin - static_cast<int>(frac * (height - 1 - 2 * margin)),
                      0, height - 1);
  };
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    if (s.size() < 2) continue;
    const unsigned char shade = static_cast<unsigned char>(40 * (si % 5));
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      const int xa = margin + static_cast<int>(i * (width - 1 - 2 * margin) / (max_len - 1));
      const int xb = margin + static_cast<int>((i + 1) * (width - 1 - 2 * margin) / (max_len - 1));
      const int ya = ypix(s[i]), yb = ypix(s[i + 1]);
      const int steps = std::max({std::abs(xb - xa), std::abs(yb - ya), 1});
      for (int k = 0; k <= steps; ++k) {
        const int x = xa + (xb - xa) * k / steps;
        const int y = ya + (yb - ya) * k / steps;
        canvas[static_cast<std::size_t>(y) * width + x] = shade;
      }
    }
  }
  write_png_bytes(path, width, height, canvas);
}

}  // namespace icb
