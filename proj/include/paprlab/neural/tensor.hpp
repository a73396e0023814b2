#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace paprlab::neural {

/// Dense (batch, channels, length) array of doubles, row-major.
struct Tensor {
  std::size_t batch = 0;
  std::size_t channels = 0;
  std::size_t length = 0;
  std::vector<double> values;

  Tensor() = default;
  Tensor(std::size_t b, std::size_t c, std::size_t l) : batch(b), channels(c), length(l), values(b * c * l, 0.0) {}

  std::size_t sample_size() const noexcept { return channels * length; }
  std::size_t size() const noexcept { return values.size(); }

  std::span<double> sample(std::size_t b) { return {values.data() + b * sample_size(), sample_size()}; }
  std::span<const double> sample(std::size_t b) const { return {values.data() + b * sample_size(), sample_size()}; }
  std::span<double> row(std::size_t b, std::size_t c) { return {values.data() + (b * channels + c) * length, length}; }
  std::span<const double> row(std::size_t b, std::size_t c) const {
    return {values.data() + (b * channels + c) * length, length};
  }
};

/// Trainable array with its gradient and AdamW moments.
struct Parameter {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<double> value;
  std::vector<double> grad;
  std::vector<double> m;
  std::vector<double> v;
  /// Weights take part in weight decay / L2; biases and BN affine do not.
  bool decay = false;

  Parameter() = default;
  Parameter(std::string n, std::vector<std::size_t> s, bool d) : name(std::move(n)), shape(std::move(s)), decay(d) {
    std::size_t count = 1;
    for (auto e : shape) count *= e;
    value.assign(count, 0.0);
    grad.assign(count, 0.0);
    m.assign(count, 0.0);
    v.assign(count, 0.0);
  }

  std::size_t size() const noexcept { return value.size(); }
  void zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }
};

/// Non-trainable persistent state (batch-norm running statistics).
struct Buffer {
  std::string name;
  std::vector<double> value;
};

}  // namespace paprlab::neural
