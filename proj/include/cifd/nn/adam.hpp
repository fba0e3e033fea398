#pragma once

#include <cmath>
#include <vector>

#include "cifd/nn/layers.hpp"

namespace cifd::nn {

// Adam over a fixed set of parameter references.
template <typename S>
class Adam {
 public:
  explicit Adam(std::vector<ParamRef<S>> refs, double lr = 1e-4,
                double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : refs_(std::move(refs)), lr_(lr), b1_(beta1), b2_(beta2), eps_(eps) {
    m_.resize(refs_.size());
    v_.resize(refs_.size());
    for (std::size_t i = 0; i < refs_.size(); ++i) {
      m_[i].assign(refs_[i].value->size(), 0.0);
      v_[i].assign(refs_[i].value->size(), 0.0);
    }
  }

  void step() {
    ++t_;
    const double c1 = 1.0 - std::pow(b1_, t_);
    const double c2 = 1.0 - std::pow(b2_, t_);
    for (std::size_t i = 0; i < refs_.size(); ++i) {
      auto& value = *refs_[i].value;
      auto& grad = *refs_[i].grad;
      for (std::size_t k = 0; k < value.size(); ++k) {
        const double g = double(grad[k]);
        m_[i][k] = b1_ * m_[i][k] + (1.0 - b1_) * g;
        v_[i][k] = b2_ * v_[i][k] + (1.0 - b2_) * g * g;
        const double mhat = m_[i][k] / c1;
        const double vhat = v_[i][k] / c2;
        value[k] = S(double(value[k]) - lr_ * mhat / (std::sqrt(vhat) + eps_));
      }
    }
  }

  void zero_grad() {
    for (auto& r : refs_) std::fill(r.grad->begin(), r.grad->end(), S(0));
  }

  double learning_rate() const { return lr_; }
  void set_learning_rate(double lr) { lr_ = lr; }

 private:
  std::vector<ParamRef<S>> refs_;
  double lr_, b1_, b2_, eps_;
  long t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

}  // namespace cifd::nn
