#include "paprlab/baselines.hpp"

#include <cmath>

#include "paprlab/metrics.hpp"
#include "paprlab/ofdm.hpp"
#include "paprlab/random.hpp"
#include "paprlab/simd/kernels.hpp"

namespace paprlab {

void clip_in_place(std::span<cplx> samples, double a_clip) {
  for (auto& s : samples) {
    const double a = std::abs(s);
    if (a > a_clip) s *= a_clip / a;
  }
}

void clip_filter_in_place(std::span<cplx> samples, const CfParams& cf, std::size_t subcarriers) {
  if (cf.iterations < 1) throw ParameterError("cf.iterations must be >= 1");
  if (!(mean_power(samples) > 0.0)) throw DegenerateInputError("clip_filter: zero waveform");
  const double ratio = std::pow(10.0, cf.clip_ratio_db / 20.0);
  for (int it = 0; it < cf.iterations; ++it) {
    const double rms = std::sqrt(mean_power(samples));
    clip_in_place(samples, rms * ratio);
    bpf_in_place(samples, subcarriers);
  }
  const double p = mean_power(samples);
  if (!(p > 0.0)) throw DegenerateInputError("clip_filter: filtering removed all power");
  simd::scale(1.0 / std::sqrt(p), as_reals(samples));
}

TimeWaveform clip_filter(const TimeWaveform& wave, const CfParams& cf, std::size_t subcarriers) {
  TimeWaveform out{wave.samples, Stage::filtered};
  clip_filter_in_place(out.samples, cf, subcarriers);
  return out;
}

SlmPhaseTable::SlmPhaseTable(const SlmParams& slm, std::size_t subcarriers) {
  if (slm.num_sequences < 1) throw ParameterError("slm.num_sequences must be >= 1");
  static constexpr cplx kPhases[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  Rng rng(slm.rng_seed);
  sequences_.assign(static_cast<std::size_t>(slm.num_sequences), std::vector<cplx>(subcarriers, cplx{1, 0}));
  for (std::size_t u = 1; u < sequences_.size(); ++u)
    for (auto& p : sequences_[u]) p = kPhases[rng.below(4)];
}

SlmResult slm_select(const SymbolBlock& block, const SlmPhaseTable& table, int oversampling) {
  const std::size_t n = block.size();
  if (table.size() == 0 || table.sequence(0).size() != n)
    throw InputShapeError("slm_select: phase table does not match the block length");
  SlmResult best;
  double best_papr = 0.0;
  std::vector<cplx> rotated(n);
  std::vector<cplx> wave(n * static_cast<std::size_t>(oversampling));
  for (std::size_t u = 0; u < table.size(); ++u) {
    const auto seq = table.sequence(u);
    for (std::size_t k = 0; k < n; ++k) rotated[k] = block.symbols[k] * seq[k];
    ofdm_modulate(rotated, oversampling, wave);
    const double p = papr(wave);
    // Rounding must not break exact ties, so a candidate has to win clearly.
    if (u == 0 || p < best_papr * (1.0 - kSlmTieTolerance)) {
      best_papr = p;
      best.index = u;
      best.wave.samples = wave;
    }
  }
  best.wave.stage = Stage::encoded;
  return best;
}

SlmResult slm_select(const SymbolBlock& block, const SlmParams& slm, int oversampling) {
  return slm_select(block, SlmPhaseTable(slm, block.size()), oversampling);
}

void slm_derotate(std::span<cplx> symbols, const SlmPhaseTable& table, std::size_t index) {
  const auto seq = table.sequence(index);
  if (seq.size() != symbols.size()) throw InputShapeError("slm_derotate: length mismatch");
  // Phases are unit-modulus: dividing is multiplying by the conjugate.
  for (std::size_t k = 0; k < symbols.size(); ++k) symbols[k] *= std::conj(seq[k]);
}

}  // namespace paprlab
