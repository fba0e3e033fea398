#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace cifd {

// Dense NCHW tensor. Embeddings and other flat vectors use c=dim, h=w=1.
template <typename S>
struct Tensor {
  int n = 0, c = 0, h = 0, w = 0;
  std::vector<S> v;

  Tensor() = default;
  Tensor(int n_, int c_, int h_, int w_)
      : n(n_), c(c_), h(h_), w(w_),
        v(static_cast<std::size_t>(n_) * c_ * h_ * w_, S(0)) {}

  static Tensor vec(int n_, int dim) { return Tensor(n_, dim, 1, 1); }

  std::size_t size() const { return v.size(); }
  int plane() const { return h * w; }
  int sample_size() const { return c * h * w; }

  S& at(int in, int ic, int ih, int iw) {
    return v[((static_cast<std::size_t>(in) * c + ic) * h + ih) * w + iw];
  }
  const S& at(int in, int ic, int ih, int iw) const {
    return v[((static_cast<std::size_t>(in) * c + ic) * h + ih) * w + iw];
  }

  S* sample(int in) { return v.data() + static_cast<std::size_t>(in) * sample_size(); }
  const S* sample(int in) const {
    return v.data() + static_cast<std::size_t>(in) * sample_size();
  }

  bool same_shape(const Tensor& o) const {
    return n == o.n && c == o.c && h == o.h && w == o.w;
  }

  void fill(S x) { std::fill(v.begin(), v.end(), x); }

  void add_scaled(const Tensor& o, S s) {
    assert(same_shape(o));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += s * o.v[i];
  }

  bool all_finite() const {
    for (S x : v)
      if (!std::isfinite(static_cast<double>(x))) return false;
    return true;
  }
};

template <typename S>
inline void require_shape(const Tensor<S>& t, int c, int h, int w,
                          const char* what) {
  if (t.c != c || t.h != h || t.w != w)
    throw std::invalid_argument(std::string(what) + ": expected " +
                                std::to_string(c) + "x" + std::to_string(h) +
                                "x" + std::to_string(w) + ", got " +
                                std::to_string(t.c) + "x" + std::to_string(t.h) +
                                "x" + std::to_string(t.w));
}

// L2 norm of one sample's flattened values, accumulated in double.
template <typename S>
inline double sample_norm(const Tensor<S>& t, int in) {
  const S* p = t.sample(in);
  double acc = 0.0;
  for (int i = 0; i < t.sample_size(); ++i) acc += double(p[i]) * double(p[i]);
  return std::sqrt(acc);
}

// Per-sample stack along the batch dimension: [a; b].
template <typename S>
inline Tensor<S> stack_batch(const Tensor<S>& a, const Tensor<S>& b) {
  if (a.c != b.c || a.h != b.h || a.w != b.w)
    throw std::invalid_argument("stack_batch: shape mismatch");
  Tensor<S> out(a.n + b.n, a.c, a.h, a.w);
  std::copy(a.v.begin(), a.v.end(), out.v.begin());
  std::copy(b.v.begin(), b.v.end(), out.v.begin() + a.v.size());
  return out;
}

template <typename S>
inline void split_batch(const Tensor<S>& ab, Tensor<S>& a, Tensor<S>& b) {
  assert(ab.n == a.n + b.n);
  std::copy(ab.v.begin(), ab.v.begin() + a.v.size(), a.v.begin());
  std::copy(ab.v.begin() + a.v.size(), ab.v.end(), b.v.begin());
}

// Channel concatenation, order is significant: channels [0,C) from first,
// [C,2C) from second.
template <typename S>
inline Tensor<S> concat_channels(const Tensor<S>& first, const Tensor<S>& second) {
  if (!first.same_shape(second))
    throw std::invalid_argument("concat_channels: shape mismatch");
  Tensor<S> out(first.n, 2 * first.c, first.h, first.w);
  const int plane = first.plane();
  for (int in = 0; in < first.n; ++in) {
    S* dst = out.sample(in);
    const S* pa = first.sample(in);
    const S* pb = second.sample(in);
    std::copy(pa, pa + first.c * plane, dst);
    std::copy(pb, pb + first.c * plane, dst + first.c * plane);
  }
  return out;
}

// Backward of concat_channels: splits the gradient back into both inputs.
template <typename S>
inline void split_channels(const Tensor<S>& grad, Tensor<S>& dfirst,
                           Tensor<S>& dsecond) {
  const int cc = grad.c / 2;
  const int plane = grad.plane();
  for (int in = 0; in < grad.n; ++in) {
    const S* src = grad.sample(in);
    std::copy(src, src + cc * plane, dfirst.sample(in));
    std::copy(src + cc * plane, src + 2 * cc * plane, dsecond.sample(in));
  }
}

}  // namespace cifd
