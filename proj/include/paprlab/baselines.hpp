#pragma once

// Model-driven PAPR reduction references: iterative clipping-and-filtering
// and selective mapping.

#include <cstdint>
#include <span>
#include <vector>

#include "paprlab/types.hpp"

namespace paprlab {

struct CfParams {
  double clip_ratio_db = 1.58;
  int iterations = 1;

  bool operator==(const CfParams&) const = default;
};

/// Limit |x| to a_clip, keeping phase.
void clip_in_place(std::span<cplx> samples, double a_clip);

/// Clip at rms*10^(cr/20), band-pass filter, repeat; the result is rescaled
/// to unit mean power. Throws DegenerateInputError for a zero waveform.
TimeWaveform clip_filter(const TimeWaveform& wave, const CfParams& cf, std::size_t subcarriers);
void clip_filter_in_place(std::span<cplx> samples, const CfParams& cf, std::size_t subcarriers);

struct SlmParams {
  int num_sequences = 128;
  std::uint64_t rng_seed = 0;

  bool operator==(const SlmParams&) const = default;
};

/// U phase sequences over {+1, -1, +j, -j}; sequence 0 is all ones.
class SlmPhaseTable {
 public:
  SlmPhaseTable(const SlmParams& slm, std::size_t subcarriers);

  std::size_t size() const noexcept { return sequences_.size(); }
  std::span<const cplx> sequence(std::size_t u) const { return sequences_[u]; }

 private:
  std::vector<std::vector<cplx>> sequences_;
};

struct SlmResult {
  TimeWaveform wave;
  std::size_t index = 0;
};

/// PAPRs within this relative distance count as equal in slm_select.
inline constexpr double kSlmTieTolerance = 1e-12;

/// Lowest-PAPR candidate among X .* P_u; ties go to the lowest index.
SlmResult slm_select(const SymbolBlock& block, const SlmPhaseTable& table, int oversampling);
SlmResult slm_select(const SymbolBlock& block, const SlmParams& slm, int oversampling);

/// Receiver side: undo the rotation of the chosen sequence (index known).
void slm_derotate(std::span<cplx> symbols, const SlmPhaseTable& table, std::size_t index);

}  // namespace paprlab
