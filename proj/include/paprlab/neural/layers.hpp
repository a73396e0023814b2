#pragma once

#include <memory>
#include <string>
#include <vector>

#include "paprlab/neural/tensor.hpp"
#include "paprlab/random.hpp"

namespace paprlab::neural {

enum class Mode { train, eval };

/// A differentiable stage. `forward` caches what `backward` needs, so a
/// backward call always refers to the most recent forward.
class Layer {
 public:
  virtual ~Layer() = default;
  virtual Tensor forward(const Tensor& in, Mode mode) = 0;
  /// Accumulates parameter gradients and returns dL/d(input).
  virtual Tensor backward(const Tensor& grad_out) = 0;
  virtual std::vector<Parameter*> parameters() { return {}; }
  virtual std::vector<Buffer*> buffers() { return {}; }
  virtual std::string describe() const = 0;
  /// Re-draw trainable values (fan-in scaled normal for weights, zero biases).
  virtual void initialize(Rng&) {}
};

/// Cross-correlation along length, stride 1, zero padding on both ends.
class Conv1d final : public Layer {
 public:
  Conv1d(std::string name, std::size_t in_channels, std::size_t out_channels, std::size_t kernel,
         std::size_t padding);

  Tensor forward(const Tensor& in, Mode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  std::vector<Parameter*> parameters() override { return {&weight_, &bias_}; }
  std::string describe() const override;
  void initialize(Rng& rng) override;

  std::size_t output_length(std::size_t input_length) const;
  Parameter& weight() { return weight_; }
  Parameter& bias() { return bias_; }

 private:
  std::size_t in_ch_, out_ch_, kernel_, padding_;
  Parameter weight_;  // [out][in][k]
  Parameter bias_;    // [out]
  Tensor input_;
};

/// Per-channel standardization over (batch, length) with learned affine.
class BatchNorm1d final : public Layer {
 public:
  BatchNorm1d(std::string name, std::size_t channels, double eps = 1e-5, double momentum = 0.1);

  Tensor forward(const Tensor& in, Mode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  std::vector<Parameter*> parameters() override { return {&gamma_, &beta_}; }
  std::vector<Buffer*> buffers() override { return {&running_mean_, &running_var_}; }
  std::string describe() const override;
  void initialize(Rng& rng) override;

  Parameter& gamma() { return gamma_; }
  Parameter& beta() { return beta_; }
  const Buffer& running_mean() const { return running_mean_; }
  const Buffer& running_var() const { return running_var_; }

 private:
  std::size_t channels_;
  double eps_, momentum_;
  Parameter gamma_, beta_;
  Buffer running_mean_, running_var_;
  Mode last_mode_ = Mode::eval;
  Tensor xhat_;
  std::vector<double> inv_std_;
};

enum class ActivationKind { selu, relu };

inline constexpr double kSeluScale = 1.0507009873554804934193349852946;
inline constexpr double kSeluAlpha = 1.6732632423543772848170429916717;

double selu(double x);

class Activation final : public Layer {
 public:
  explicit Activation(ActivationKind kind) : kind_(kind) {}

  Tensor forward(const Tensor& in, Mode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  std::string describe() const override;

 private:
  ActivationKind kind_;
  Tensor input_;
};

/// Fully connected layer over the flattened (channels*length) sample; the
/// output is shaped (batch, 1, out_features).
class Linear final : public Layer {
 public:
  Linear(std::string name, std::size_t in_features, std::size_t out_features);

  Tensor forward(const Tensor& in, Mode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  std::vector<Parameter*> parameters() override { return {&weight_, &bias_}; }
  std::string describe() const override;
  void initialize(Rng& rng) override;

  Parameter& weight() { return weight_; }
  Parameter& bias() { return bias_; }

 private:
  std::size_t in_, out_;
  Parameter weight_;  // [out][in]
  Parameter bias_;
  Tensor input_;
  std::size_t in_channels_ = 0, in_length_ = 0;
};

/// Layers applied in order; an empty stack is the identity map.
class Sequential {
 public:
  Sequential() = default;
  Sequential(Sequential&&) = default;
  Sequential& operator=(Sequential&&) = default;

  template <class L, class... Args>
  L& add(Args&&... args) {
    auto layer = std::make_unique<L>(std::forward<Args>(args)...);
    L& ref = *layer;
    layers_.push_back(std::move(layer));
    return ref;
  }

  Tensor forward(const Tensor& in, Mode mode);
  Tensor backward(const Tensor& grad_out);
  std::vector<Parameter*> parameters();
  std::vector<Buffer*> buffers();
  void initialize(Rng& rng);
  std::size_t size() const noexcept { return layers_.size(); }
  Layer& layer(std::size_t i) { return *layers_[i]; }

 private:
  std::vector<std::unique_ptr<Layer>> layers_;
};

}  // namespace paprlab::neural
