#pragma once

// Scalar and curve metrics. The PAPR and ACPR entries have `_with_grad`
// forms used by the training losses; gradients follow the convention
// grad = dL/dRe(x) + i*dL/dIm(x).

#include <cstdint>
#include <span>
#include <vector>

#include "paprlab/types.hpp"

namespace paprlab {

inline constexpr double kAcprFloorDb = -200.0;

double to_db(double linear);
double from_db(double db);

/// max|x|^2 / mean|x|^2. Throws DegenerateInputError for an all-zero input.
double papr(std::span<const cplx> samples);
double papr(const TimeWaveform& wave);
double papr_db(std::span<const cplx> samples);

/// PAPR and its (sub)gradient; the max picks the lowest index on ties.
double papr_with_grad(std::span<const cplx> samples, std::span<cplx> grad);

struct CcdfCurve {
  std::vector<double> thresholds_db;
  std::vector<double> probabilities;
};

/// Empirical P(value > threshold) per threshold.
CcdfCurve ccdf(std::span<const double> values_db, std::span<const double> thresholds_db);

/// Smallest observed value v such that the fraction of values strictly above
/// v does not exceed `probability` (the PAPR_0 read off a CCDF at that level).
double exceedance_level(std::span<const double> values, double probability);

/// Averaged periodogram: mean over rows of |DFT(x)|^2 / (L*N)^2, ordered
/// from -fs/2 to +fs/2. Sums to the mean time-domain power.
std::vector<double> psd(const ComplexBatch& batch);
std::vector<double> psd(const std::vector<TimeWaveform>& batch);

struct SpectralParams {
  std::size_t bw_bins = 72;
  double acpr_req_db = -45.0;

  bool operator==(const SpectralParams&) const = default;
};

struct BandPowers {
  double main = 0.0;
  double upper = 0.0;
  double lower = 0.0;
};

/// Main band: the bw_bins centre bins. Adjacent bands: the bw_bins bins
/// directly above and below. Throws ParameterError when they do not fit.
BandPowers band_powers(std::span<const double> psd, const SpectralParams& sp);

/// 10*log10(max(upper, lower) / main), floored at kAcprFloorDb.
double acpr_db(std::span<const double> psd, const SpectralParams& sp);

enum class AcprMax { hard, smooth };

/// Sharpness (per dB) of the log-sum-exp smooth max between the two
/// adjacent-band ratios.
inline constexpr double kAcprSmoothness = 10.0;

/// ACPR of the batch periodogram and its gradient w.r.t. every sample.
/// With AcprMax::smooth the max over the two adjacent bands is replaced by a
/// log-sum-exp in the dB domain. `grad` may be null.
double acpr_db_with_grad(const ComplexBatch& batch, const SpectralParams& sp, AcprMax mode,
                         ComplexBatch* grad);

/// 10*log10(a0^2 / mean|x|^2) of the amplifier input.
double obo_db(const ComplexBatch& pa_input, double a0);
double obo_db(const std::vector<TimeWaveform>& pa_input, double a0);

/// Fraction of mismatched positions.
double ber(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx);
std::size_t bit_errors(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx);

}  // namespace paprlab
