#pragma once

// Nonlinear transmit front-end: input back-off, RAPP AM/AM amplifier and the
// Bussgang linear-gain estimate used by the receiver.

#include <span>

#include "paprlab/types.hpp"

namespace paprlab {

struct HpaParams {
  double a0 = 1.0;      // limiting output amplitude
  double v = 1.0;       // small-signal gain
  double p = 2.0;       // smoothness
  double ibo_db = 3.0;  // input back-off

  void validate() const;
  bool operator==(const HpaParams&) const = default;
};

/// Complex scalar gain removed at the receiver.
struct CompensationState {
  cplx alpha{1.0, 0.0};
};

/// Linear amplitude factor a0 * 10^(-ibo/20) applied before the amplifier.
double ibo_gain(const HpaParams& hpa);

TimeWaveform apply_ibo(const TimeWaveform& wave, const HpaParams& hpa);
void apply_ibo_in_place(ComplexBatch& batch, const HpaParams& hpa);

/// G(A) = v*A*(1 + (v*A/a0)^(2p))^(-1/(2p)).
double rapp_output_amplitude(double amplitude, const HpaParams& hpa);

/// Amplitude-only distortion; phase is preserved.
TimeWaveform rapp_amplify(const TimeWaveform& wave, const HpaParams& hpa);
void rapp_amplify(std::span<const cplx> in, std::span<cplx> out, const HpaParams& hpa);
ComplexBatch rapp_amplify(const ComplexBatch& batch, const HpaParams& hpa);

/// Backpropagate through rapp_amplify: grad_in = J^T grad_out (real-pair
/// Jacobian, complex-gradient convention).
void rapp_backward(std::span<const cplx> in, std::span<const cplx> grad_out, std::span<cplx> grad_in,
                   const HpaParams& hpa);

/// alpha = E[x * conj(x_pa)] / E[|x|^2] over the whole batch.
CompensationState bussgang_alpha(const ComplexBatch& reference, const ComplexBatch& amplified);
CompensationState bussgang_alpha(const std::vector<TimeWaveform>& reference,
                                 const std::vector<TimeWaveform>& amplified);

}  // namespace paprlab
