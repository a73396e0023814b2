#include "paprlab/ofdm.hpp"

#include <cmath>
#include <limits>

#include "paprlab/fft.hpp"
#include "paprlab/simd/kernels.hpp"

namespace paprlab {
namespace {

void check_oversampling(int oversampling) {
  if (oversampling < 1) throw ParameterError("oversampling factor must be >= 1");
}

void check_subcarriers(std::size_t n) {
  if (n == 0 || n % 2 != 0) throw ParameterError("subcarrier count must be even and positive");
}

}  // namespace

ConstellationSpec ConstellationSpec::qam4() {
  const double a = 1.0 / std::sqrt(2.0);
  return {{{a, a}, {-a, a}, {-a, -a}, {a, -a}}, 2, {0b00, 0b01, 0b11, 0b10}};
}

std::vector<std::uint8_t> random_bits(Rng& rng, std::size_t count) {
  std::vector<std::uint8_t> bits(count);
  for (auto& b : bits) b = rng.bit();
  return bits;
}

SymbolBlock map_bits(std::span<const std::uint8_t> bits, const ConstellationSpec& c) {
  const auto k = static_cast<std::size_t>(c.bits_per_symbol);
  if (k == 0 || bits.size() % k != 0)
    throw InputShapeError("bit count is not a multiple of bits per symbol");
  std::vector<int> point_of_label(std::size_t{1} << k, -1);
  for (std::size_t i = 0; i < c.labels.size(); ++i) point_of_label[c.labels[i]] = static_cast<int>(i);

  SymbolBlock block;
  block.symbols.reserve(bits.size() / k);
  for (std::size_t s = 0; s < bits.size(); s += k) {
    unsigned label = 0;
    for (std::size_t j = 0; j < k; ++j) label = (label << 1) | (bits[s + j] & 1u);
    block.symbols.push_back(c.points[static_cast<std::size_t>(point_of_label[label])]);
  }
  return block;
}

SymbolBlock qam4_map(std::span<const std::uint8_t> bits) {
  if (bits.size() % 2 != 0) throw InputShapeError("qam4_map: odd bit count");
  static const ConstellationSpec c = ConstellationSpec::qam4();
  return map_bits(bits, c);
}

std::vector<std::uint8_t> ml_detect(std::span<const cplx> estimates, const ConstellationSpec& c) {
  const auto k = static_cast<std::size_t>(c.bits_per_symbol);
  std::vector<std::uint8_t> bits(estimates.size() * k);
  for (std::size_t s = 0; s < estimates.size(); ++s) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < c.points.size(); ++i) {
      const double d = std::norm(estimates[s] - c.points[i]);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    const unsigned label = c.labels[best];
    for (std::size_t j = 0; j < k; ++j) bits[s * k + j] = (label >> (k - 1 - j)) & 1u;
  }
  return bits;
}

std::vector<std::uint8_t> ml_detect(const SymbolBlock& estimates, const ConstellationSpec& c) {
  return ml_detect(std::span<const cplx>(estimates.symbols), c);
}

std::size_t subcarrier_bin(std::size_t k, std::size_t n, std::size_t m) {
  return k < n / 2 ? k : m - n + k;
}

void ofdm_modulate(std::span<const cplx> symbols, int oversampling, std::span<cplx> out) {
  check_oversampling(oversampling);
  const std::size_t n = symbols.size();
  check_subcarriers(n);
  const std::size_t m = n * static_cast<std::size_t>(oversampling);
  if (out.size() != m) throw InputShapeError("ofdm_modulate: output length must be L*N");
  thread_local std::vector<cplx> spectrum;
  spectrum.assign(m, cplx{});
  for (std::size_t k = 0; k < n; ++k) spectrum[subcarrier_bin(k, n, m)] = symbols[k];
  fft::inverse(spectrum, out);
  simd::scale(1.0 / std::sqrt(static_cast<double>(n)), as_reals(out));
}

void ofdm_demodulate(std::span<const cplx> samples, int oversampling, std::span<cplx> out) {
  check_oversampling(oversampling);
  const auto l = static_cast<std::size_t>(oversampling);
  if (samples.size() % l != 0) throw InputShapeError("ofdm_demodulate: length is not a multiple of L");
  const std::size_t m = samples.size();
  const std::size_t n = m / l;
  check_subcarriers(n);
  if (out.size() != n) throw InputShapeError("ofdm_demodulate: output length must be N");
  thread_local std::vector<cplx> spectrum;
  spectrum.resize(m);
  fft::forward(samples, spectrum);
  const double s = 1.0 / (static_cast<double>(l) * std::sqrt(static_cast<double>(n)));
  for (std::size_t k = 0; k < n; ++k) out[k] = s * spectrum[subcarrier_bin(k, n, m)];
}

TimeWaveform ofdm_modulate(const SymbolBlock& block, int oversampling) {
  check_oversampling(oversampling);
  TimeWaveform w{std::vector<cplx>(block.size() * static_cast<std::size_t>(oversampling)), Stage::raw};
  ofdm_modulate(block.symbols, oversampling, w.samples);
  return w;
}

SymbolBlock ofdm_demodulate(const TimeWaveform& wave, int oversampling) {
  check_oversampling(oversampling);
  if (wave.size() % static_cast<std::size_t>(oversampling) != 0)
    throw InputShapeError("ofdm_demodulate: length is not a multiple of L");
  SymbolBlock b{std::vector<cplx>(wave.size() / static_cast<std::size_t>(oversampling))};
  ofdm_demodulate(wave.samples, oversampling, b.symbols);
  return b;
}

ComplexBatch ofdm_modulate(const ComplexBatch& symbols, int oversampling) {
  check_oversampling(oversampling);
  ComplexBatch out(symbols.rows(), symbols.cols() * static_cast<std::size_t>(oversampling));
  for (std::size_t r = 0; r < symbols.rows(); ++r) ofdm_modulate(symbols.row(r), oversampling, out.row(r));
  return out;
}

ComplexBatch ofdm_demodulate(const ComplexBatch& waves, int oversampling) {
  check_oversampling(oversampling);
  if (waves.cols() % static_cast<std::size_t>(oversampling) != 0)
    throw InputShapeError("ofdm_demodulate: length is not a multiple of L");
  ComplexBatch out(waves.rows(), waves.cols() / static_cast<std::size_t>(oversampling));
  for (std::size_t r = 0; r < waves.rows(); ++r) ofdm_demodulate(waves.row(r), oversampling, out.row(r));
  return out;
}

void bpf_in_place(std::span<cplx> samples, std::size_t subcarriers) {
  check_subcarriers(subcarriers);
  const std::size_t m = samples.size();
  if (m < subcarriers) throw InputShapeError("bpf: waveform shorter than the pass band");
  thread_local std::vector<cplx> spectrum;
  spectrum.resize(m);
  fft::forward(samples, spectrum);
  for (std::size_t k = subcarriers / 2; k < m - subcarriers / 2; ++k) spectrum[k] = cplx{};
  fft::inverse(spectrum, samples);
  simd::scale(1.0 / static_cast<double>(m), as_reals(samples));
}

TimeWaveform bpf(const TimeWaveform& wave, std::size_t subcarriers) {
  TimeWaveform out{wave.samples, Stage::filtered};
  bpf_in_place(out.samples, subcarriers);
  return out;
}

void bpf_in_place(ComplexBatch& waves, std::size_t subcarriers) {
  for (std::size_t r = 0; r < waves.rows(); ++r) bpf_in_place(waves.row(r), subcarriers);
}

double mean_power(std::span<const cplx> samples) {
  if (samples.empty()) return 0.0;
  return simd::sum_squares(as_reals(samples)) / static_cast<double>(samples.size());
}

double mean_power(const ComplexBatch& batch) { return mean_power(std::span<const cplx>(batch.data())); }

double power_normalize_in_place(ComplexBatch& batch) {
  const double p = mean_power(batch);
  if (!(p > 0.0)) throw DegenerateInputError("power_normalize: batch has zero power");
  const double factor = 1.0 / std::sqrt(p);
  simd::scale(factor, as_reals(std::span<cplx>(batch.data())));
  return factor;
}

ComplexBatch power_normalize(const ComplexBatch& batch) {
  ComplexBatch out = batch;
  power_normalize_in_place(out);
  return out;
}

std::vector<TimeWaveform> power_normalize(const std::vector<TimeWaveform>& batch) {
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& w : batch) {
    total += simd::sum_squares(as_reals(std::span<const cplx>(w.samples)));
    count += w.size();
  }
  if (count == 0 || !(total > 0.0)) throw DegenerateInputError("power_normalize: batch has zero power");
  const double factor = std::sqrt(static_cast<double>(count) / total);
  std::vector<TimeWaveform> out = batch;
  for (auto& w : out) simd::scale(factor, as_reals(std::span<cplx>(w.samples)));
  return out;
}

}  // namespace paprlab
