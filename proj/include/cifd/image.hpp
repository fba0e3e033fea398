#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cifd {

constexpr int kDctBlock = 8;

// Interleaved 8-bit RGB image. Dimensions are multiples of the DCT block
// size for everything that goes through the compressor.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // size = width*height*3, RGB

  Image() = default;
  Image(int w, int h) : width(w), height(h), pixels(std::size_t(w) * h * 3, 0) {}

  std::uint8_t& at(int x, int y, int ch) {
    return pixels[(std::size_t(y) * width + x) * 3 + ch];
  }
  std::uint8_t at(int x, int y, int ch) const {
    return pixels[(std::size_t(y) * width + x) * 3 + ch];
  }
};

// Single-channel 8-bit image (masks on disk, attention map exports).
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  GrayImage() = default;
  GrayImage(int w, int h) : width(w), height(h), pixels(std::size_t(w) * h, 0) {}

  std::uint8_t& at(int x, int y) { return pixels[std::size_t(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return pixels[std::size_t(y) * width + x]; }
};

// Binary manipulation mask, 0 = pristine, 1 = manipulated.
struct Mask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> values;

  Mask() = default;
  Mask(int w, int h) : width(w), height(h), values(std::size_t(w) * h, 0) {}

  std::uint8_t& at(int x, int y) { return values[std::size_t(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return values[std::size_t(y) * width + x]; }

  std::size_t nonzero_count() const {
    std::size_t k = 0;
    for (auto v : values) k += (v != 0);
    return k;
  }
  double nonzero_fraction() const {
    return values.empty() ? 0.0
                          : double(nonzero_count()) / double(values.size());
  }
};

inline std::uint8_t clamp_u8(double x) {
  return static_cast<std::uint8_t>(std::min(255.0, std::max(0.0, std::round(x))));
}

// out[i,j] = 1 iff gray[i,j]/255 > threshold
inline Mask binarize_mask(const GrayImage& gray, double threshold = 0.1) {
  Mask m(gray.width, gray.height);
  for (std::size_t i = 0; i < gray.pixels.size(); ++i)
    m.values[i] = (gray.pixels[i] / 255.0 > threshold) ? 1 : 0;
  return m;
}

inline GrayImage mask_to_gray(const Mask& m) {
  GrayImage g(m.width, m.height);
  for (std::size_t i = 0; i < m.values.size(); ++i)
    g.pixels[i] = m.values[i] ? 255 : 0;
  return g;
}

// ---------------------------------------------------------------------------
// PPM (P6) / PGM (P5) round trip. Lossless on purpose: the dataset encodes
// controlled quantization levels that a lossy container would corrupt.
// ---------------------------------------------------------------------------

inline void write_ppm(const std::string& path, const Image& img) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "P6\n" << img.width << " " << img.height << "\n255\n";
  f.write(reinterpret_cast<const char*>(img.pixels.data()),
          static_cast<std::streamsize>(img.pixels.size()));
}

inline void write_pgm(const std::string& path, const GrayImage& img) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "P5\n" << img.width << " " << img.height << "\n255\n";
  f.write(reinterpret_cast<const char*>(img.pixels.data()),
          static_cast<std::streamsize>(img.pixels.size()));
}

namespace detail {
inline int read_pnm_token(std::istream& f) {
  // skips whitespace and '#' comments
  while (true) {
    int ch = f.peek();
    if (ch == '#') {
      std::string line;
      std::getline(f, line);
    } else if (std::isspace(ch)) {
      f.get();
    } else {
      break;
    }
  }
  int value = 0;
  f >> value;
  return value;
}
}  // namespace detail

inline Image read_ppm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::string magic;
  f >> magic;
  if (magic != "P6") throw std::runtime_error(path + ": not a P6 ppm");
  const int w = detail::read_pnm_token(f);
  const int h = detail::read_pnm_token(f);
  const int maxval = detail::read_pnm_token(f);
  if (maxval != 255) throw std::runtime_error(path + ": unsupported maxval");
  f.get();  // single whitespace before raster
  Image img(w, h);
  f.read(reinterpret_cast<char*>(img.pixels.data()),
         static_cast<std::streamsize>(img.pixels.size()));
  if (!f) throw std::runtime_error(path + ": truncated ppm");
  return img;
}

inline GrayImage read_pgm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::string magic;
  f >> magic;
  if (magic != "P5") throw std::runtime_error(path + ": not a P5 pgm");
  const int w = detail::read_pnm_token(f);
  const int h = detail::read_pnm_token(f);
  const int maxval = detail::read_pnm_token(f);
  if (maxval != 255) throw std::runtime_error(path + ": unsupported maxval");
  f.get();
  GrayImage img(w, h);
  f.read(reinterpret_cast<char*>(img.pixels.data()),
         static_cast<std::streamsize>(img.pixels.size()));
  if (!f) throw std::runtime_error(path + ": truncated pgm");
  return img;
}

// ---------------------------------------------------------------------------
// Crop with enlargement factor + resize to the network input size. The same
// geometry is applied to every member of a pair and to its mask so they stay
// registered.
// ---------------------------------------------------------------------------

struct BBox {
  int x = 0, y = 0, w = 0, h = 0;
};

struct CropGeometry {
  int x0 = 0, y0 = 0, w = 0, h = 0;  // clamped crop window in source coords
};

inline CropGeometry enlarged_crop_geometry(int imgW, int imgH, const BBox& box,
                                           double factor) {
  if (box.w <= 0 || box.h <= 0)
    throw std::invalid_argument("crop_enlarged: empty bbox");
  if (factor < 1.0) throw std::invalid_argument("crop_enlarged: factor < 1");
  if (box.x < 0 || box.y < 0 || box.x + box.w > imgW || box.y + box.h > imgH)
    throw std::invalid_argument("crop_enlarged: bbox out of bounds");
  const double cx = box.x + box.w / 2.0;
  const double cy = box.y + box.h / 2.0;
  const double ew = box.w * factor;
  const double eh = box.h * factor;
  int x0 = static_cast<int>(std::lround(cx - ew / 2.0));
  int y0 = static_cast<int>(std::lround(cy - eh / 2.0));
  int x1 = static_cast<int>(std::lround(cx + ew / 2.0));
  int y1 = static_cast<int>(std::lround(cy + eh / 2.0));
  x0 = std::max(0, x0);
  y0 = std::max(0, y0);
  x1 = std::min(imgW, x1);
  y1 = std::min(imgH, y1);
  return {x0, y0, x1 - x0, y1 - y0};
}

// Nearest-neighbour resize; adequate for the desk-scale pipeline and keeps
// mask values binary.
inline Image resize_nearest(const Image& src, int outW, int outH) {
  Image out(outW, outH);
  for (int y = 0; y < outH; ++y) {
    const int sy = std::min(src.height - 1, y * src.height / outH);
    for (int x = 0; x < outW; ++x) {
      const int sx = std::min(src.width - 1, x * src.width / outW);
      for (int ch = 0; ch < 3; ++ch) out.at(x, y, ch) = src.at(sx, sy, ch);
    }
  }
  return out;
}

inline Mask resize_nearest(const Mask& src, int outW, int outH) {
  Mask out(outW, outH);
  for (int y = 0; y < outH; ++y) {
    const int sy = std::min(src.height - 1, y * src.height / outH);
    for (int x = 0; x < outW; ++x) {
      const int sx = std::min(src.width - 1, x * src.width / outW);
      out.at(x, y) = src.at(sx, sy);
    }
  }
  return out;
}

inline Image apply_crop(const Image& src, const CropGeometry& g, int outSize) {
  Image crop(g.w, g.h);
  for (int y = 0; y < g.h; ++y)
    for (int x = 0; x < g.w; ++x)
      for (int ch = 0; ch < 3; ++ch)
        crop.at(x, y, ch) = src.at(g.x0 + x, g.y0 + y, ch);
  return resize_nearest(crop, outSize, outSize);
}

inline Mask apply_crop(const Mask& src, const CropGeometry& g, int outSize) {
  Mask crop(g.w, g.h);
  for (int y = 0; y < g.h; ++y)
    for (int x = 0; x < g.w; ++x) crop.at(x, y) = src.at(g.x0 + x, g.y0 + y);
  return resize_nearest(crop, outSize, outSize);
}

inline Image crop_enlarged(const Image& img, const BBox& box, double factor,
                           int outSize) {
  return apply_crop(img, enlarged_crop_geometry(img.width, img.height, box, factor),
                    outSize);
}

inline Image hflip(const Image& img) {
  Image out(img.width, img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      for (int ch = 0; ch < 3; ++ch)
        out.at(x, y, ch) = img.at(img.width - 1 - x, y, ch);
  return out;
}

inline Mask hflip(const Mask& m) {
  Mask out(m.width, m.height);
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x) out.at(x, y) = m.at(m.width - 1 - x, y);
  return out;
}

}  // namespace cifd
