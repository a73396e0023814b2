#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "paprlab/error.hpp"

namespace paprlab {

using cplx = std::complex<double>;

/// N frequency-domain data symbols of one OFDM symbol.
struct SymbolBlock {
  std::vector<cplx> symbols;

  std::size_t size() const noexcept { return symbols.size(); }
};

/// Where along the transmit/receive chain a waveform was tapped.
enum class Stage { raw, encoded, filtered, amplified, received };

/// L*N complex time-domain samples.
struct TimeWaveform {
  std::vector<cplx> samples;
  Stage stage = Stage::raw;

  std::size_t size() const noexcept { return samples.size(); }
};

/// Row-major batch of equally sized complex vectors (symbol blocks or
/// waveforms). Rows are contiguous so whole-batch kernels can run over
/// `data` directly.
class ComplexBatch {
 public:
  ComplexBatch() = default;
  ComplexBatch(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0; }

  std::span<cplx> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const cplx> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<cplx>& data() noexcept { return data_; }
  const std::vector<cplx>& data() const noexcept { return data_; }

  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  bool operator==(const ComplexBatch&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

/// View a complex span as interleaved (re, im) doubles.
inline std::span<const double> as_reals(std::span<const cplx> z) {
  return {reinterpret_cast<const double*>(z.data()), 2 * z.size()};
}
inline std::span<double> as_reals(std::span<cplx> z) {
  return {reinterpret_cast<double*>(z.data()), 2 * z.size()};
}

}  // namespace paprlab
