#pragma once

#include <cstdint>
#include <span>

#include "paprlab/neural/tensor.hpp"

namespace paprlab::neural {

struct AdamWConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;

  bool operator==(const AdamWConfig&) const = default;
};

/// One AdamW update of `p` at (1-based) step `t`:
///   theta <- theta - lr * (m_hat / (sqrt(v_hat) + eps) + wd * theta)
/// Decay applies only to parameters flagged `decay`.
void adamw_step(Parameter& p, std::uint64_t t, const AdamWConfig& cfg);

class AdamW {
 public:
  explicit AdamW(AdamWConfig cfg, std::uint64_t steps_taken = 0) : cfg_(cfg), steps_(steps_taken) {}

  void step(std::span<Parameter* const> params);
  std::uint64_t steps() const noexcept { return steps_; }
  const AdamWConfig& config() const noexcept { return cfg_; }

 private:
  AdamWConfig cfg_;
  std::uint64_t steps_;
};

}  // namespace paprlab::neural
