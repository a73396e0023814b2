#include "paprlab/neural/adamw.hpp"

#include <cmath>

namespace paprlab::neural {

void adamw_step(Parameter& p, std::uint64_t t, const AdamWConfig& cfg) {
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  const double wd = p.decay ? cfg.weight_decay : 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double g = p.grad[i];
    p.m[i] = cfg.beta1 * p.m[i] + (1.0 - cfg.beta1) * g;
    p.v[i] = cfg.beta2 * p.v[i] + (1.0 - cfg.beta2) * g * g;
    const double m_hat = p.m[i] / bc1;
    const double v_hat = p.v[i] / bc2;
    p.value[i] -= cfg.lr * (m_hat / (std::sqrt(v_hat) + cfg.eps) + wd * p.value[i]);
  }
}

void AdamW::step(std::span<Parameter* const> params) {
  ++steps_;
  for (auto* p : params) adamw_step(*p, steps_, cfg_);
}

}  // namespace paprlab::neural
