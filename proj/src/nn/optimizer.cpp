#include "ss2d/nn/optimizer.hpp"

#include <cmath>

#include "ss2d/error.hpp"

namespace ss2d::nn {

OptimizerKind parse_optimizer(const std::string& name) {
  if (name == "sgd") return OptimizerKind::Sgd;
  if (name == "adam") return OptimizerKind::Adam;
  fail(ErrorCategory::Validation, "unknown optimizer '" + name + "' (expected sgd or adam)");
}

const char* to_string(OptimizerKind k) { return k == OptimizerKind::Sgd ? "sgd" : "adam"; }

void TrainConfig::validate() const {
  if (!(learning_rate > 0) || batch_size == 0 || epochs < 0 || !(val_fraction > 0 && val_fraction < 1))
    fail(ErrorCategory::Validation, "invalid training config");
}

void Optimizer::step(const std::vector<Parameter*>& params) {
  ++t_;
  if (kind_ == OptimizerKind::Sgd) {
    for (auto* p : params) {
      for (std::size_t i = 0; i < p->value.size(); ++i) p->value[i] -= static_cast<Real>(lr_) * p->grad[i];
    }
    return;
  }
  if (m_.size() != params.size()) {
    m_.clear();
    v_.clear();
    for (auto* p : params) {
      m_.emplace_back(p->value.size(), Real{0});
      v_.emplace_back(p->value.size(), Real{0});
    }
  }
  const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& p = *params[k];
    auto& m = m_[k];
    auto& v = v_[k];
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const Real g = p.grad[i];
      m[i] = static_cast<Real>(kBeta1) * m[i] + static_cast<Real>(1 - kBeta1) * g;
      v[i] = static_cast<Real>(kBeta2) * v[i] + static_cast<Real>(1 - kBeta2) * g * g;
      const double mhat = m[i] / c1;
      const double vhat = v[i] / c2;
      p.value[i] -= static_cast<Real>(lr_ * mhat / (std::sqrt(vhat) + kEps));
    }
  }
}

}  // namespace ss2d::nn
