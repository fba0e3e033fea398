#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cifd/core/rng.hpp"
#include "cifd/image.hpp"

namespace cifd {

namespace detail {

inline double smoothstep(double t) {
  t = std::min(1.0, std::max(0.0, t));
  return t * t * (3.0 - 2.0 * t);
}

// Value noise: a coarse random grid, bilinearly interpolated with smoothstep
// easing. Summing octaves gives texture at all frequencies, so quantization
// at low quality has something visible to destroy.
inline void add_value_noise(std::vector<double>& field, int size, Rng& rng,
                            int cell, double amplitude) {
  const int cells = size / cell + 2;
  std::vector<double> grid(std::size_t(cells) * cells);
  for (auto& g : grid) g = rng.uniform(-1.0, 1.0);
  for (int y = 0; y < size; ++y) {
    const double fy = double(y) / cell;
    const int gy = static_cast<int>(fy);
    const double ty = smoothstep(fy - gy);
    for (int x = 0; x < size; ++x) {
      const double fx = double(x) / cell;
      const int gx = static_cast<int>(fx);
      const double tx = smoothstep(fx - gx);
      const double v00 = grid[std::size_t(gy) * cells + gx];
      const double v10 = grid[std::size_t(gy) * cells + gx + 1];
      const double v01 = grid[std::size_t(gy + 1) * cells + gx];
      const double v11 = grid[std::size_t(gy + 1) * cells + gx + 1];
      const double v = (v00 * (1 - tx) + v10 * tx) * (1 - ty) +
                       (v01 * (1 - tx) + v11 * tx) * ty;
      field[std::size_t(y) * size + x] += amplitude * v;
    }
  }
}

struct Ellipse {
  double cx, cy, rx, ry, cosA, sinA;

  // < 1 inside, 1 on the boundary
  double metric(double x, double y) const {
    const double dx = x - cx, dy = y - cy;
    const double u = (dx * cosA + dy * sinA) / rx;
    const double v = (-dx * sinA + dy * cosA) / ry;
    return std::sqrt(u * u + v * v);
  }
};

inline void add_ellipse(std::vector<double>& field, int size, const Ellipse& e,
                        double delta, double featherPx) {
  const double fm = featherPx / std::min(e.rx, e.ry);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      const double m = e.metric(x + 0.5, y + 0.5);
      if (m < 1.0 + fm)
        field[std::size_t(y) * size + x] +=
            delta * smoothstep((1.0 + fm - m) / fm);
    }
}

inline void add_stripe(std::vector<double>& field, int size, Rng& rng,
                       double delta) {
  // a soft band with random orientation and width
  const double nx = rng.uniform(-1.0, 1.0);
  const double ny = rng.uniform(-1.0, 1.0);
  const double norm = std::sqrt(nx * nx + ny * ny) + 1e-9;
  const double ox = rng.uniform(0.0, size);
  const double oy = rng.uniform(0.0, size);
  const double halfWidth = rng.uniform(1.0, 3.0);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      const double d =
          std::abs(((x - ox) * nx + (y - oy) * ny) / norm) / halfWidth;
      if (d < 2.0)
        field[std::size_t(y) * size + x] += delta * smoothstep(2.0 - d);
    }
}

}  // namespace detail

inline void require_generatable_size(int size) {
  if (size < 32 || size % kDctBlock != 0)
    throw std::invalid_argument(
        "image size must be a multiple of 8 and at least 32");
}

// Deterministic textured image: multi-octave value noise plus a few soft
// geometric primitives, with per-channel tint and fine chroma noise.
inline Image generate_real_image(std::uint64_t seed, int size) {
  require_generatable_size(size);
  Rng rng(derive_seed(seed, 0x5ca1ab1eULL));

  std::vector<double> lum(std::size_t(size) * size, 0.0);
  detail::add_value_noise(lum, size, rng, std::max(2, size / 4), 40.0);
  detail::add_value_noise(lum, size, rng, std::max(2, size / 8), 22.0);
  detail::add_value_noise(lum, size, rng, 4, 12.0);
  detail::add_value_noise(lum, size, rng, 2, 7.0);

  const int nEllipses = rng.range(2, 4);
  for (int i = 0; i < nEllipses; ++i) {
    detail::Ellipse e;
    e.cx = rng.uniform(0.1, 0.9) * size;
    e.cy = rng.uniform(0.1, 0.9) * size;
    e.rx = rng.uniform(0.08, 0.3) * size;
    e.ry = rng.uniform(0.08, 0.3) * size;
    const double a = rng.uniform(0.0, 3.14159265);
    e.cosA = std::cos(a);
    e.sinA = std::sin(a);
    detail::add_ellipse(lum, size, e, rng.uniform(-35.0, 35.0), 1.5);
  }
  const int nStripes = rng.range(1, 3);
  for (int i = 0; i < nStripes; ++i)
    detail::add_stripe(lum, size, rng, rng.uniform(-30.0, 30.0));

  const double base = rng.uniform(100.0, 156.0);
  const double tint[3] = {rng.uniform(-18.0, 18.0), rng.uniform(-18.0, 18.0),
                          rng.uniform(-18.0, 18.0)};
  Image img(size, size);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      const double l = base + lum[std::size_t(y) * size + x];
      for (int ch = 0; ch < 3; ++ch)
        img.at(x, y, ch) = clamp_u8(l + tint[ch] + rng.uniform(-4.0, 4.0));
    }
  return img;
}

struct SpliceConfig {
  double featherPx = 2.0;       // width of the alpha falloff band
  double maskThreshold = 0.1;   // ground truth marks alpha > threshold
  double artifactAmp = 6.0;     // high-frequency residue inside the splice
};

// Base image from seedA with a feather-blended elliptical region from the
// seedB image. A faint high-frequency residue is mixed into the blended
// region: it stands in for generation artifacts, lives mostly above the
// frequencies that survive heavy quantization, and vanishes outside the
// feather band.
inline std::pair<Image, Mask> generate_fake_pair(
    std::uint64_t seedA, std::uint64_t seedB, int size,
    const SpliceConfig& cfg = {}) {
  if (seedA == seedB)
    throw std::invalid_argument("generate_fake_pair: seeds must differ");
  require_generatable_size(size);

  const Image base = generate_real_image(seedA, size);
  const Image donor = generate_real_image(seedB, size);
  const std::uint64_t comboSeed =
      splitmix64(derive_seed(seedA, 0xfa4e) * 3 + derive_seed(seedB, 0xd00d));

  for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
    Rng rng(derive_seed(comboSeed, attempt));
    detail::Ellipse e;
    e.cx = rng.uniform(0.3, 0.7) * size;
    e.cy = rng.uniform(0.3, 0.7) * size;
    e.rx = rng.uniform(0.16, 0.34) * size;
    e.ry = rng.uniform(0.16, 0.34) * size;
    const double a = rng.uniform(0.0, 3.14159265);
    e.cosA = std::cos(a);
    e.sinA = std::sin(a);
    const double fm = cfg.featherPx / std::min(e.rx, e.ry);

    Image out = base;
    Mask mask(size, size);
    Rng artifactRng(derive_seed(comboSeed, 0xa57 + attempt));
    for (int y = 0; y < size; ++y)
      for (int x = 0; x < size; ++x) {
        const double m = e.metric(x + 0.5, y + 0.5);
        const double alpha =
            (m >= 1.0 + fm) ? 0.0 : detail::smoothstep((1.0 + fm - m) / fm);
        const double artifact = artifactRng.uniform(-1.0, 1.0);  // keep stream aligned
        if (alpha <= 0.0) continue;
        for (int ch = 0; ch < 3; ++ch) {
          const double blended = (1.0 - alpha) * base.at(x, y, ch) +
                                 alpha * donor.at(x, y, ch) +
                                 alpha * cfg.artifactAmp * artifact;
          out.at(x, y, ch) = clamp_u8(blended);
        }
        if (alpha > cfg.maskThreshold) mask.at(x, y) = 1;
      }

    const double frac = mask.nonzero_fraction();
    if (frac >= 0.05 && frac <= 0.50) return {std::move(out), std::move(mask)};
  }
  throw std::runtime_error("generate_fake_pair: no admissible splice region found");
}

}  // namespace cifd
