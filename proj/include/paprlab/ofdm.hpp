#pragma once

// Complex baseband primitives: constellation mapping, oversampled OFDM
// (de)modulation, rectangular band-pass filtering, power normalization and
// minimum-distance detection.
//
// Spectrum layout: the N data symbols occupy the N bins centred on DC of the
// length L*N spectrum. Symbol k < N/2 sits at frequency +k, symbol k >= N/2 at
// k - N. The inverse transform carries 1/sqrt(N) and the forward transform
// 1/(L*sqrt(N)), so demodulate(modulate(X)) == X for any L and the mean
// time-domain power equals the mean symbol energy.

#include <cstdint>
#include <span>
#include <vector>

#include "paprlab/random.hpp"
#include "paprlab/types.hpp"

namespace paprlab {

struct ConstellationSpec {
  std::vector<cplx> points;
  int bits_per_symbol = 0;
  /// labels[i] holds the bits of points[i], first bit in the MSB position.
  std::vector<unsigned> labels;

  /// Gray 4-QAM: 00 -> (1+j)/sqrt2, 01 -> (-1+j)/sqrt2, 11 -> (-1-j)/sqrt2,
  /// 10 -> (1-j)/sqrt2.
  static ConstellationSpec qam4();
};

std::vector<std::uint8_t> random_bits(Rng& rng, std::size_t count);

/// Map bit pairs onto Gray 4-QAM. Throws InputShapeError on an odd count.
SymbolBlock qam4_map(std::span<const std::uint8_t> bits);

/// Generic labelled mapping; bit count must be a multiple of bits_per_symbol.
SymbolBlock map_bits(std::span<const std::uint8_t> bits, const ConstellationSpec& c);

/// Nearest-point detection, ties to the lowest point index.
std::vector<std::uint8_t> ml_detect(std::span<const cplx> estimates, const ConstellationSpec& c);
std::vector<std::uint8_t> ml_detect(const SymbolBlock& estimates, const ConstellationSpec& c);

/// Index of the bin that carries data symbol k in a length-m spectrum.
std::size_t subcarrier_bin(std::size_t k, std::size_t n, std::size_t m);

void ofdm_modulate(std::span<const cplx> symbols, int oversampling, std::span<cplx> out);
void ofdm_demodulate(std::span<const cplx> samples, int oversampling, std::span<cplx> out);

TimeWaveform ofdm_modulate(const SymbolBlock& block, int oversampling);
SymbolBlock ofdm_demodulate(const TimeWaveform& wave, int oversampling);

ComplexBatch ofdm_modulate(const ComplexBatch& symbols, int oversampling);
ComplexBatch ofdm_demodulate(const ComplexBatch& waves, int oversampling);

/// Rectangular band-pass: keep the `subcarriers` data bins, zero the rest.
void bpf_in_place(std::span<cplx> samples, std::size_t subcarriers);
TimeWaveform bpf(const TimeWaveform& wave, std::size_t subcarriers);
void bpf_in_place(ComplexBatch& waves, std::size_t subcarriers);

double mean_power(std::span<const cplx> samples);
double mean_power(const ComplexBatch& batch);

/// Scale the whole batch by one real factor so its mean power is 1.
/// Returns the factor applied. Throws DegenerateInputError on zero power.
double power_normalize_in_place(ComplexBatch& batch);
ComplexBatch power_normalize(const ComplexBatch& batch);
std::vector<TimeWaveform> power_normalize(const std::vector<TimeWaveform>& batch);

}  // namespace paprlab
