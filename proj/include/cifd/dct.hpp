#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "cifd/image.hpp"

namespace cifd {

struct CompressionLevel {
  int quality = 90;  // [1,100], lower = coarser quantization
  static constexpr int block_size = kDctBlock;
};

using QuantTable = std::array<std::array<int, 8>, 8>;

// Standard JPEG luminance base table (ISO/ITU baseline recommendation).
inline const QuantTable& base_luminance_table() {
  static const QuantTable t = {{{16, 11, 10, 16, 24, 40, 51, 61},
                                {12, 12, 14, 19, 26, 58, 60, 55},
                                {14, 13, 16, 24, 40, 57, 69, 56},
                                {14, 17, 22, 29, 51, 87, 80, 62},
                                {18, 22, 37, 56, 68, 109, 103, 77},
                                {24, 35, 55, 64, 81, 104, 113, 92},
                                {49, 64, 78, 87, 103, 121, 120, 101},
                                {72, 92, 95, 98, 112, 100, 103, 99}}};
  return t;
}

// IJG quality scaling: scale = 5000/q for q<50 else 200-2q, entries
// (base*scale + 50)/100 clamped to [1,255]. Quality 50 reproduces the base
// table, quality 100 collapses to all ones.
inline QuantTable quantization_table(const CompressionLevel& level) {
  const int q = level.quality;
  if (q < 1 || q > 100)
    throw std::invalid_argument("quantization_table: quality must be in [1,100]");
  const int scale = (q < 50) ? 5000 / q : 200 - 2 * q;
  QuantTable out;
  const QuantTable& base = base_luminance_table();
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      const int v = (base[i][j] * scale + 50) / 100;
      out[i][j] = std::min(255, std::max(1, v));
    }
  return out;
}

namespace detail {

// Orthonormal DCT-II basis: coef[k][n] = s(k) cos(pi (2n+1) k / 16),
// s(0)=sqrt(1/8), s(k>0)=sqrt(2/8). A constant block of intensity v has
// DC = 8v and all AC exactly zero.
inline const std::array<std::array<double, 8>, 8>& dct_basis() {
  static const auto basis = [] {
    std::array<std::array<double, 8>, 8> b{};
    const double pi = 3.14159265358979323846;
    for (int k = 0; k < 8; ++k) {
      const double s = (k == 0) ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
      for (int n = 0; n < 8; ++n)
        b[k][n] = s * std::cos(pi * (2 * n + 1) * k / 16.0);
    }
    return b;
  }();
  return basis;
}

inline void dct2d_forward(const double in[8][8], double out[8][8]) {
  const auto& b = dct_basis();
  double tmp[8][8];
  for (int i = 0; i < 8; ++i)  // rows
    for (int k = 0; k < 8; ++k) {
      double acc = 0;
      for (int n = 0; n < 8; ++n) acc += in[i][n] * b[k][n];
      tmp[i][k] = acc;
    }
  for (int k = 0; k < 8; ++k)  // columns
    for (int j = 0; j < 8; ++j) {
      double acc = 0;
      for (int n = 0; n < 8; ++n) acc += tmp[n][j] * b[k][n];
      out[k][j] = acc;
    }
}

inline void dct2d_inverse(const double in[8][8], double out[8][8]) {
  const auto& b = dct_basis();
  double tmp[8][8];
  for (int k = 0; k < 8; ++k)
    for (int j = 0; j < 8; ++j) {
      double acc = 0;
      for (int m = 0; m < 8; ++m) acc += in[m][j] * b[m][k];
      tmp[k][j] = acc;
    }
  for (int i = 0; i < 8; ++i)
    for (int n = 0; n < 8; ++n) {
      double acc = 0;
      for (int m = 0; m < 8; ++m) acc += tmp[i][m] * b[m][n];
      out[i][n] = acc;
    }
}

}  // namespace detail

inline void require_block_aligned(const Image& img, const char* what) {
  if (img.width % kDctBlock != 0 || img.height % kDctBlock != 0 ||
      img.width == 0 || img.height == 0)
    throw std::invalid_argument(std::string(what) +
                                ": image dimensions must be positive multiples of 8");
}

// Quantization round trip per channel and 8x8 block: DCT, divide by the
// table, round, multiply back, inverse DCT, clamp. All three channels use
// the luminance table; no chroma subsampling, no entropy coding.
inline Image compress(const Image& img, const CompressionLevel& level) {
  require_block_aligned(img, "compress");
  const QuantTable qt = quantization_table(level);
  Image out(img.width, img.height);
  double block[8][8], freq[8][8], rec[8][8];
  for (int ch = 0; ch < 3; ++ch)
    for (int by = 0; by < img.height; by += 8)
      for (int bx = 0; bx < img.width; bx += 8) {
        for (int y = 0; y < 8; ++y)
          for (int x = 0; x < 8; ++x)
            block[y][x] = static_cast<double>(img.at(bx + x, by + y, ch));
        detail::dct2d_forward(block, freq);
        for (int y = 0; y < 8; ++y)
          for (int x = 0; x < 8; ++x)
            freq[y][x] = std::round(freq[y][x] / qt[y][x]) * qt[y][x];
        detail::dct2d_inverse(freq, rec);
        for (int y = 0; y < 8; ++y)
          for (int x = 0; x < 8; ++x)
            out.at(bx + x, by + y, ch) = clamp_u8(rec[y][x]);
      }
  return out;
}

// Number of AC coefficients quantized to zero over all blocks and channels.
// Non-decreasing as quality drops, since divisors grow element-wise.
inline std::size_t zeroed_ac_count(const Image& img, const CompressionLevel& level) {
  require_block_aligned(img, "zeroed_ac_count");
  const QuantTable qt = quantization_table(level);
  std::size_t zeros = 0;
  double block[8][8], freq[8][8];
  for (int ch = 0; ch < 3; ++ch)
    for (int by = 0; by < img.height; by += 8)
      for (int bx = 0; bx < img.width; bx += 8) {
        for (int y = 0; y < 8; ++y)
          for (int x = 0; x < 8; ++x)
            block[y][x] = static_cast<double>(img.at(bx + x, by + y, ch));
        detail::dct2d_forward(block, freq);
        for (int y = 0; y < 8; ++y)
          for (int x = 0; x < 8; ++x) {
            if (x == 0 && y == 0) continue;
            if (std::round(freq[y][x] / qt[y][x]) == 0.0) ++zeros;
          }
      }
  return zeros;
}

}  // namespace cifd
