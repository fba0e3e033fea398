#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "cifd/core/rng.hpp"
#include "cifd/core/tensor.hpp"

namespace cifd::nn {

template <typename S>
struct ParamRef {
  std::string name;
  std::vector<S>* value;
  std::vector<S>* grad;
};

// Caching layer interface: forward stores whatever backward needs, backward
// returns the input gradient and (optionally) accumulates parameter
// gradients. Gradients accumulate across backward calls until zero_grad.
template <typename S>
class Layer {
 public:
  virtual ~Layer() = default;
  virtual Tensor<S> forward(const Tensor<S>& x) = 0;
  virtual Tensor<S> backward(const Tensor<S>& dy, bool accumParams = true) = 0;
  virtual void collect(const std::string& prefix, std::vector<ParamRef<S>>& out) {
    (void)prefix;
    (void)out;
  }
};

template <typename S>
class Conv2d final : public Layer<S> {
 public:
  Conv2d(int cin, int cout, int k, int stride, int pad, Rng& rng,
         double initScale = -1.0)
      : cin_(cin), cout_(cout), k_(k), stride_(stride), pad_(pad),
        w_(std::size_t(cout) * cin * k * k), b_(cout),
        dw_(w_.size(), S(0)), db_(b_.size(), S(0)) {
    const double std =
        initScale > 0 ? initScale : std::sqrt(2.0 / (double(cin) * k * k));
    for (auto& x : w_) x = S(rng.normal(0.0, std));
  }

  Tensor<S> forward(const Tensor<S>& x) override {
    if (x.c != cin_) throw std::invalid_argument("Conv2d: channel mismatch");
    x_ = x;
    const int oh = (x.h + 2 * pad_ - k_) / stride_ + 1;
    const int ow = (x.w + 2 * pad_ - k_) / stride_ + 1;
    Tensor<S> y(x.n, cout_, oh, ow);
    for (int n = 0; n < x.n; ++n) {
      const S* xs = x.sample(n);
      S* ys = y.sample(n);
      for (int co = 0; co < cout_; ++co) {
        const S* wk = w_.data() + std::size_t(co) * cin_ * k_ * k_;
        for (int oy = 0; oy < oh; ++oy)
          for (int ox = 0; ox < ow; ++ox) {
            double acc = double(b_[co]);
            for (int ci = 0; ci < cin_; ++ci) {
              const S* xc = xs + std::size_t(ci) * x.h * x.w;
              const S* wc = wk + std::size_t(ci) * k_ * k_;
              for (int ky = 0; ky < k_; ++ky) {
                const int iy = oy * stride_ - pad_ + ky;
                if (iy < 0 || iy >= x.h) continue;
                for (int kx = 0; kx < k_; ++kx) {
                  const int ix = ox * stride_ - pad_ + kx;
                  if (ix < 0 || ix >= x.w) continue;
                  acc += double(wc[ky * k_ + kx]) * double(xc[iy * x.w + ix]);
                }
              }
            }
            ys[(std::size_t(co) * oh + oy) * ow + ox] = S(acc);
          }
      }
    }
    return y;
  }

  Tensor<S> backward(const Tensor<S>& dy, bool accumParams = true) override {
    const Tensor<S>& x = x_;
    Tensor<S> dx(x.n, x.c, x.h, x.w);
    for (int n = 0; n < x.n; ++n) {
      const S* xs = x.sample(n);
      const S* dys = dy.sample(n);
      S* dxs = dx.sample(n);
      for (int co = 0; co < cout_; ++co) {
        const S* wk = w_.data() + std::size_t(co) * cin_ * k_ * k_;
        S* dwk = dw_.data() + std::size_t(co) * cin_ * k_ * k_;
        for (int oy = 0; oy < dy.h; ++oy)
          for (int ox = 0; ox < dy.w; ++ox) {
            const double g = double(dys[(std::size_t(co) * dy.h + oy) * dy.w + ox]);
            if (g == 0.0) continue;
            if (accumParams) db_[co] += S(g);
            for (int ci = 0; ci < cin_; ++ci) {
              const S* xc = xs + std::size_t(ci) * x.h * x.w;
              S* dxc = dxs + std::size_t(ci) * x.h * x.w;
              const S* wc = wk + std::size_t(ci) * k_ * k_;
              S* dwc = dwk + std::size_t(ci) * k_ * k_;
              for (int ky = 0; ky < k_; ++ky) {
                const int iy = oy * stride_ - pad_ + ky;
                if (iy < 0 || iy >= x.h) continue;
                for (int kx = 0; kx < k_; ++kx) {
                  const int ix = ox * stride_ - pad_ + kx;
                  if (ix < 0 || ix >= x.w) continue;
                  if (accumParams)
                    dwc[ky * k_ + kx] += S(g * double(xc[iy * x.w + ix]));
                  dxc[iy * x.w + ix] += S(g * double(wc[ky * k_ + kx]));
                }
              }
            }
          }
      }
    }
    return dx;
  }

  void collect(const std::string& prefix, std::vector<ParamRef<S>>& out) override {
    out.push_back({prefix + ".w", &w_, &dw_});
    out.push_back({prefix + ".b", &b_, &db_});
  }

 private:
  int cin_, cout_, k_, stride_, pad_;
  std::vector<S> w_, b_, dw_, db_;
  Tensor<S> x_;
};

// Group normalization with affine parameters. Statistics are per sample, so
// training and evaluation behave identically.
template <typename S>
class GroupNorm final : public Layer<S> {
 public:
  GroupNorm(int channels, int groups = 4, double eps = 1e-5)
      : c_(channels), g_(groups), eps_(eps), gamma_(channels, S(1)),
        beta_(channels, S(0)), dgamma_(channels, S(0)), dbeta_(channels, S(0)) {
    if (channels % groups != 0)
      throw std::invalid_argument("GroupNorm: channels % groups != 0");
  }

  Tensor<S> forward(const Tensor<S>& x) override {
    if (x.c != c_) throw std::invalid_argument("GroupNorm: channel mismatch");
    xhat_ = Tensor<S>(x.n, x.c, x.h, x.w);
    invstd_.assign(std::size_t(x.n) * g_, 0.0);
    Tensor<S> y(x.n, x.c, x.h, x.w);
    const int cpg = c_ / g_;
    const int plane = x.plane();
    const std::size_t m = std::size_t(cpg) * plane;
    for (int n = 0; n < x.n; ++n)
      for (int grp = 0; grp < g_; ++grp) {
        const S* xs = x.sample(n) + std::size_t(grp) * cpg * plane;
        double mean = 0.0;
        for (std::size_t i = 0; i < m; ++i) mean += double(xs[i]);
        mean /= double(m);
        double var = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          const double d = double(xs[i]) - mean;
          var += d * d;
        }
        var /= double(m);
        const double is = 1.0 / std::sqrt(var + eps_);
        invstd_[std::size_t(n) * g_ + grp] = is;
        S* xh = xhat_.sample(n) + std::size_t(grp) * cpg * plane;
        S* ys = y.sample(n) + std::size_t(grp) * cpg * plane;
        for (int cc = 0; cc < cpg; ++cc) {
          const int ch = grp * cpg + cc;
          for (int i = 0; i < plane; ++i) {
            const double h = (double(xs[std::size_t(cc) * plane + i]) - mean) * is;
            xh[std::size_t(cc) * plane + i] = S(h);
            ys[std::size_t(cc) * plane + i] =
                S(double(gamma_[ch]) * h + double(beta_[ch]));
          }
        }
      }
    return y;
  }

  Tensor<S> backward(const Tensor<S>& dy, bool accumParams = true) override {
    Tensor<S> dx(dy.n, dy.c, dy.h, dy.w);
    const int cpg = c_ / g_;
    const int plane = dy.plane();
    const std::size_t m = std::size_t(cpg) * plane;
    for (int n = 0; n < dy.n; ++n)
      for (int grp = 0; grp < g_; ++grp) {
        const S* dys = dy.sample(n) + std::size_t(grp) * cpg * plane;
        const S* xh = xhat_.sample(n) + std::size_t(grp) * cpg * plane;
        S* dxs = dx.sample(n) + std::size_t(grp) * cpg * plane;
        const double is = invstd_[std::size_t(n) * g_ + grp];
        double sumG = 0.0, sumGX = 0.0;
        for (int cc = 0; cc < cpg; ++cc) {
          const int ch = grp * cpg + cc;
          for (int i = 0; i < plane; ++i) {
            const double gval =
                double(dys[std::size_t(cc) * plane + i]) * double(gamma_[ch]);
            sumG += gval;
            sumGX += gval * double(xh[std::size_t(cc) * plane + i]);
          }
        }
        sumG /= double(m);
        sumGX /= double(m);
        for (int cc = 0; cc < cpg; ++cc) {
          const int ch = grp * cpg + cc;
          for (int i = 0; i < plane; ++i) {
            const double d = double(dys[std::size_t(cc) * plane + i]);
            const double h = double(xh[std::size_t(cc) * plane + i]);
            if (accumParams) {
              dgamma_[ch] += S(d * h);
              dbeta_[ch] += S(d);
            }
            dxs[std::size_t(cc) * plane + i] =
                S(is * (d * double(gamma_[ch]) - sumG - h * sumGX));
          }
        }
      }
    return dx;
  }

  void collect(const std::string& prefix, std::vector<ParamRef<S>>& out) override {
    out.push_back({prefix + ".gamma", &gamma_, &dgamma_});
    out.push_back({prefix + ".beta", &beta_, &dbeta_});
  }

 private:
  int c_, g_;
  double eps_;
  std::vector<S> gamma_, beta_, dgamma_, dbeta_;
  Tensor<S> xhat_;
  std::vector<double> invstd_;
};

template <typename S>
class ReLU final : public Layer<S> {
 public:
  Tensor<S> forward(const Tensor<S>& x) override {
    mask_.assign(x.size(), 0);
    Tensor<S> y = x;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y.v[i] > S(0))
        mask_[i] = 1;
      else
        y.v[i] = S(0);
    }
    return y;
  }

  Tensor<S> backward(const Tensor<S>& dy, bool = true) override {
    Tensor<S> dx = dy;
    for (std::size_t i = 0; i < dx.size(); ++i)
      if (!mask_[i]) dx.v[i] = S(0);
    return dx;
  }

 private:
  std::vector<std::uint8_t> mask_;
};

template <typename S>
class Sigmoid final : public Layer<S> {
 public:
  Tensor<S> forward(const Tensor<S>& x) override {
    y_ = x;
    for (auto& v : y_.v) v = S(1.0 / (1.0 + std::exp(-double(v))));
    return y_;
  }

  Tensor<S> backward(const Tensor<S>& dy, bool = true) override {
    Tensor<S> dx = dy;
    for (std::size_t i = 0; i < dx.size(); ++i)
      dx.v[i] = S(double(dy.v[i]) * double(y_.v[i]) * (1.0 - double(y_.v[i])));
    return dx;
  }

 private:
  Tensor<S> y_;
};

template <typename S>
class GlobalAvgPool final : public Layer<S> {
 public:
  Tensor<S> forward(const Tensor<S>& x) override {
    h_ = x.h;
    w_ = x.w;
    Tensor<S> y(x.n, x.c, 1, 1);
    const int plane = x.plane();
    for (int n = 0; n < x.n; ++n)
      for (int c = 0; c < x.c; ++c) {
        const S* xs = x.sample(n) + std::size_t(c) * plane;
        double acc = 0.0;
        for (int i = 0; i < plane; ++i) acc += double(xs[i]);
        y.at(n, c, 0, 0) = S(acc / plane);
      }
    return y;
  }

  Tensor<S> backward(const Tensor<S>& dy, bool = true) override {
    Tensor<S> dx(dy.n, dy.c, h_, w_);
    const double scale = 1.0 / (double(h_) * w_);
    for (int n = 0; n < dy.n; ++n)
      for (int c = 0; c < dy.c; ++c) {
        const double g = double(dy.at(n, c, 0, 0)) * scale;
        S* dxs = dx.sample(n) + std::size_t(c) * h_ * w_;
        for (int i = 0; i < h_ * w_; ++i) dxs[i] = S(g);
      }
    return dx;
  }

 private:
  int h_ = 0, w_ = 0;
};

// Fully connected over the flattened sample.
template <typename S>
class Linear final : public Layer<S> {
 public:
  Linear(int in, int out, Rng& rng, double initScale = -1.0)
      : in_(in), out_(out), w_(std::size_t(in) * out), b_(out),
        dw_(w_.size(), S(0)), db_(b_.size(), S(0)) {
    const double std = initScale > 0 ? initScale : std::sqrt(1.0 / in);
    for (auto& x : w_) x = S(rng.normal(0.0, std));
  }

  Tensor<S> forward(const Tensor<S>& x) override {
    if (x.sample_size() != in_) throw std::invalid_argument("Linear: size mismatch");
    x_ = x;
    Tensor<S> y(x.n, out_, 1, 1);
    for (int n = 0; n < x.n; ++n) {
      const S* xs = x.sample(n);
      S* ys = y.sample(n);
      for (int o = 0; o < out_; ++o) {
        const S* wr = w_.data() + std::size_t(o) * in_;
        double acc = double(b_[o]);
        for (int i = 0; i < in_; ++i) acc += double(wr[i]) * double(xs[i]);
        ys[o] = S(acc);
      }
    }
    return y;
  }

  Tensor<S> backward(const Tensor<S>& dy, bool accumParams = true) override {
    Tensor<S> dx(x_.n, x_.c, x_.h, x_.w);
    for (int n = 0; n < x_.n; ++n) {
      const S* xs = x_.sample(n);
      const S* dys = dy.sample(n);
      S* dxs = dx.sample(n);
      for (int o = 0; o < out_; ++o) {
        const double g = double(dys[o]);
        if (g == 0.0) continue;
        const S* wr = w_.data() + std::size_t(o) * in_;
        S* dwr = dw_.data() + std::size_t(o) * in_;
        if (accumParams) db_[o] += S(g);
        for (int i = 0; i < in_; ++i) {
          if (accumParams) dwr[i] += S(g * double(xs[i]));
          dxs[i] += S(g * double(wr[i]));
        }
      }
    }
    return dx;
  }

  void collect(const std::string& prefix, std::vector<ParamRef<S>>& out) override {
    out.push_back({prefix + ".w", &w_, &dw_});
    out.push_back({prefix + ".b", &b_, &db_});
  }

 private:
  int in_, out_;
  std::vector<S> w_, b_, dw_, db_;
  Tensor<S> x_;
};

template <typename S>
class Sequential {
 public:
  Sequential() = default;

  template <typename L, typename... Args>
  L& add(Args&&... args) {
    auto layer = std::make_unique<L>(std::forward<Args>(args)...);
    L& ref = *layer;
    layers_.push_back(std::move(layer));
    return ref;
  }

  Tensor<S> forward(const Tensor<S>& x) {
    Tensor<S> cur = x;
    for (auto& l : layers_) cur = l->forward(cur);
    return cur;
  }

  Tensor<S> backward(const Tensor<S>& dy, bool accumParams = true) {
    Tensor<S> cur = dy;
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it)
      cur = (*it)->backward(cur, accumParams);
    return cur;
  }

  std::vector<ParamRef<S>> params(const std::string& prefix) {
    std::vector<ParamRef<S>> out;
    for (std::size_t i = 0; i < layers_.size(); ++i)
      layers_[i]->collect(prefix + "." + std::to_string(i), out);
    return out;
  }

  void zero_grad() {
    for (auto& p : params(""))
      std::fill(p.grad->begin(), p.grad->end(), S(0));
  }

 private:
  std::vector<std::unique_ptr<Layer<S>>> layers_;
};

template <typename S>
inline std::size_t param_count(std::vector<ParamRef<S>> refs) {
  std::size_t total = 0;
  for (const auto& r : refs) total += r.value->size();
  return total;
}

}  // namespace cifd::nn
