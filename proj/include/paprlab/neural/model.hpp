#pragma once

#include <cstdint>
#include <vector>

#include "paprlab/neural/layers.hpp"
#include "paprlab/types.hpp"

namespace paprlab::neural {

enum class ArchitectureKind { cae, fc_ae };

/// How a complex vector becomes a real tensor: two channels (real, imag) or
/// one channel of interleaved (re, im) pairs.
enum class ComplexLayout { two_channel, interleaved };

struct Architecture {
  ArchitectureKind kind = ArchitectureKind::cae;
  std::size_t subcarriers = 72;
  int oversampling = 4;
  ActivationKind activation = ActivationKind::selu;
  ComplexLayout layout = ComplexLayout::two_channel;
  std::vector<std::size_t> encoder_channels{13, 11};
  std::vector<std::size_t> decoder_channels{11, 13};
  std::size_t kernel = 3;
  std::size_t padding = 2;
  std::vector<std::size_t> fc_hidden{2500, 3500};
  double bn_eps = 1e-5;
  double bn_momentum = 0.1;

  std::size_t waveform_length() const { return subcarriers * static_cast<std::size_t>(oversampling); }
  bool operator==(const Architecture&) const = default;
};

/// Encoder/decoder pair. The encoder maps the oversampled time waveform to a
/// waveform of the same length; the decoder maps the N received in-band
/// symbols to N symbol estimates. Power normalization and the fixed channel
/// live in the chain, not here.
class AutoencoderModel {
 public:
  explicit AutoencoderModel(Architecture arch);

  /// Stub model whose encoder and decoder are the identity map.
  static AutoencoderModel identity(std::size_t subcarriers, int oversampling,
                                   ComplexLayout layout = ComplexLayout::two_channel);

  const Architecture& architecture() const noexcept { return arch_; }
  Sequential& encoder() noexcept { return encoder_; }
  Sequential& decoder() noexcept { return decoder_; }

  std::vector<Parameter*> parameters();
  std::vector<Buffer*> buffers();
  void initialize(std::uint64_t seed);
  void zero_grad();

  std::size_t parameter_count();
  /// Convolution weights of the transmitter, biases excluded.
  std::size_t transmitter_conv_weight_count();

 private:
  AutoencoderModel() = default;
  Architecture arch_;
  Sequential encoder_;
  Sequential decoder_;
};

AutoencoderModel make_cae_model(std::size_t subcarriers, int oversampling);
AutoencoderModel make_fc_ae_model(std::size_t subcarriers, int oversampling, std::vector<std::size_t> hidden);

std::size_t input_channels(ComplexLayout layout);

/// Real-tensor view of a complex batch and back. Both maps are orthogonal
/// permutations, so they also carry gradients.
Tensor to_tensor(const ComplexBatch& batch, ComplexLayout layout);
ComplexBatch from_tensor(const Tensor& t, ComplexLayout layout);

}  // namespace paprlab::neural
