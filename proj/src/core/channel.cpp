#include "paprlab/channel.hpp"

#include <cmath>

namespace paprlab {

double noise_variance(double p_snr_db, const HpaParams& hpa) {
  if (std::isinf(p_snr_db) && p_snr_db > 0) return 0.0;
  return hpa.a0 * hpa.a0 / std::pow(10.0, p_snr_db / 10.0);
}

void add_awgn(std::span<cplx> samples, double variance, Rng& rng) {
  if (variance <= 0.0) return;
  const double sigma = std::sqrt(variance / 2.0);
  for (auto& s : samples) {
    const double re = rng.normal();
    const double im = rng.normal();
    s += cplx{sigma * re, sigma * im};
  }
}

TimeWaveform awgn(const TimeWaveform& wave, const ChannelParams& ch, const HpaParams& hpa) {
  TimeWaveform out{wave.samples, Stage::received};
  Rng rng(ch.rng_seed);
  add_awgn(out.samples, noise_variance(ch.p_snr_db, hpa), rng);
  return out;
}

void compensate_in_place(std::span<cplx> samples, const CompensationState& comp) {
  if (comp.alpha == cplx{}) throw DegenerateInputError("compensate: alpha is zero");
  const cplx inv = 1.0 / comp.alpha;
  for (auto& s : samples) s *= inv;
}

TimeWaveform compensate(const TimeWaveform& wave, const CompensationState& comp) {
  TimeWaveform out{wave.samples, wave.stage};
  compensate_in_place(out.samples, comp);
  return out;
}

}  // namespace paprlab
