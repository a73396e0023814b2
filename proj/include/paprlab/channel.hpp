#pragma once

#include <cstdint>
#include <limits>
#include <span>

#include "paprlab/frontend.hpp"
#include "paprlab/random.hpp"
#include "paprlab/types.hpp"

namespace paprlab {

/// AWGN set by peak SNR: sigma_w^2 = a0^2 / 10^(p_snr_db/10).
struct ChannelParams {
  static constexpr double kNoiseless = std::numeric_limits<double>::infinity();

  double p_snr_db = kNoiseless;
  std::uint64_t rng_seed = 0;
};

/// Total complex noise variance; 0 for the noiseless flag value.
double noise_variance(double p_snr_db, const HpaParams& hpa);

/// Adds circularly-symmetric Gaussian noise of total variance `variance`
/// (variance/2 per real dimension), drawing from `rng`.
void add_awgn(std::span<cplx> samples, double variance, Rng& rng);

/// Seeds its own stream from ch.rng_seed, so equal seeds give equal noise.
TimeWaveform awgn(const TimeWaveform& wave, const ChannelParams& ch, const HpaParams& hpa);

/// Divide every sample by alpha. Throws DegenerateInputError when alpha == 0.
TimeWaveform compensate(const TimeWaveform& wave, const CompensationState& comp);
void compensate_in_place(std::span<cplx> samples, const CompensationState& comp);

}  // namespace paprlab
