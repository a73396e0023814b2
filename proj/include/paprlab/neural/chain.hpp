#pragma once

// The end-to-end chain around an autoencoder:
//
//   X -> IDFT -> encoder -> power norm -> BPF (x_f) -> back-off -> RAPP (x_p)
//     -> AWGN -> /alpha -> DFT -> unpad -> decoder -> X_hat
//
// Forward keeps every intermediate ("taps"); backward walks the same chain
// in reverse given loss gradients on the decoder output and on the two loss
// taps x_f and x_p. alpha is a per-batch constant: no gradient flows into it.

#include <optional>

#include "paprlab/channel.hpp"
#include "paprlab/frontend.hpp"
#include "paprlab/metrics.hpp"
#include "paprlab/neural/model.hpp"
#include "paprlab/random.hpp"

namespace paprlab::neural {

struct SystemParams {
  std::size_t subcarriers = 72;
  int oversampling = 4;

  std::size_t waveform_length() const { return subcarriers * static_cast<std::size_t>(oversampling); }
  bool operator==(const SystemParams&) const = default;
};

struct ChainContext {
  SystemParams system;
  HpaParams hpa;
  SpectralParams spectral;
  double p_snr_db = ChannelParams::kNoiseless;
  /// Replace the RAPP amplifier by the linear gain v.
  bool linear_pa = false;
  /// Use this alpha instead of the batch estimate.
  std::optional<cplx> alpha_override;
};

struct ChainTaps {
  ComplexBatch symbols;
  ComplexBatch x_raw;
  ComplexBatch x_enc;
  double norm_factor = 1.0;
  ComplexBatch x_norm;
  ComplexBatch x_f;
  ComplexBatch x_pa_in;
  ComplexBatch x_p;
  ComplexBatch y;
  CompensationState comp;
  ComplexBatch y_freq;
  ComplexBatch decoded;
};

/// Empty members mean a zero gradient.
struct TapGradients {
  ComplexBatch decoded;
  ComplexBatch x_f;
  ComplexBatch x_p;
};

/// Runs the transmitter half only (IDFT, encoder, power norm, BPF).
ChainTaps transmit(AutoencoderModel& model, const ComplexBatch& symbols, const ChainContext& ctx, Mode mode);

/// Back-off, amplifier, noise, compensation, DFT and decoder on top of
/// `transmit`. The reference for alpha is x_f, so y/alpha restores unit
/// end-to-end gain through a linear amplifier.
void receive(AutoencoderModel& model, ChainTaps& taps, const ChainContext& ctx, Rng& noise_rng, Mode mode);

ChainTaps cae_forward(AutoencoderModel& model, const ComplexBatch& symbols, const ChainContext& ctx,
                      Rng& noise_rng, Mode mode);

/// Accumulates parameter gradients into `model` for the most recent forward.
void cae_backward(AutoencoderModel& model, const ChainTaps& taps, const ChainContext& ctx,
                  const TapGradients& grads);

/// Gradient of the whole-batch power normalization x -> x / sqrt(mean|x|^2).
ComplexBatch power_normalize_backward(const ComplexBatch& x, double factor, const ComplexBatch& grad_out);

}  // namespace paprlab::neural
