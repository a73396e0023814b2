#include "paprlab/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "paprlab/fft.hpp"
#include "paprlab/ofdm.hpp"
#include "paprlab/simd/kernels.hpp"

namespace paprlab {

double to_db(double linear) { return 10.0 * std::log10(linear); }
double from_db(double db) { return std::pow(10.0, db / 10.0); }

namespace {

struct PeakStats {
  std::size_t argmax = 0;
  double peak = 0.0;
  double total = 0.0;
};

PeakStats peak_stats(std::span<const cplx> x) {
  thread_local std::vector<double> mag2;
  mag2.resize(x.size());
  simd::active().abs2(as_reals(x).data(), mag2.data(), x.size());
  PeakStats s;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s.total += mag2[i];
    if (mag2[i] > s.peak) {
      s.peak = mag2[i];
      s.argmax = i;
    }
  }
  return s;
}

}  // namespace

double papr(std::span<const cplx> samples) {
  const PeakStats s = peak_stats(samples);
  if (!(s.total > 0.0)) throw DegenerateInputError("papr: zero waveform");
  return s.peak * static_cast<double>(samples.size()) / s.total;
}

double papr(const TimeWaveform& wave) { return papr(std::span<const cplx>(wave.samples)); }
double papr_db(std::span<const cplx> samples) { return to_db(papr(samples)); }

double papr_with_grad(std::span<const cplx> samples, std::span<cplx> grad) {
  if (grad.size() != samples.size()) throw InputShapeError("papr_with_grad: gradient length mismatch");
  const PeakStats s = peak_stats(samples);
  if (!(s.total > 0.0)) throw DegenerateInputError("papr: zero waveform");
  const double m = static_cast<double>(samples.size());
  const double value = s.peak * m / s.total;
  // d/dx_j [P*M/S] = (M/S)*2x_m*delta_jm - (P*M/S^2)*2x_j
  const double c = -2.0 * value / s.total;
  for (std::size_t j = 0; j < samples.size(); ++j) grad[j] = c * samples[j];
  grad[s.argmax] += 2.0 * m / s.total * samples[s.argmax];
  return value;
}

CcdfCurve ccdf(std::span<const double> values_db, std::span<const double> thresholds_db) {
  if (values_db.empty()) throw InputShapeError("ccdf: no values");
  std::vector<double> sorted(values_db.begin(), values_db.end());
  std::sort(sorted.begin(), sorted.end());
  CcdfCurve c;
  c.thresholds_db.assign(thresholds_db.begin(), thresholds_db.end());
  c.probabilities.reserve(thresholds_db.size());
  for (double t : thresholds_db) {
    const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), t);
    c.probabilities.push_back(static_cast<double>(above) / static_cast<double>(sorted.size()));
  }
  return c;
}

double exceedance_level(std::span<const double> values, double probability) {
  if (values.empty()) throw InputShapeError("exceedance_level: no values");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), sorted[i]);
    if (static_cast<double>(above) / n <= probability) return sorted[i];
  }
  return sorted.back();
}

namespace {

std::vector<double> psd_rows(std::size_t rows, std::size_t m, auto&& row_at) {
  if (rows == 0) throw InputShapeError("psd: empty batch");
  std::vector<double> acc(m, 0.0);
  std::vector<cplx> spectrum(m);
  std::vector<double> mag2(m);
  for (std::size_t r = 0; r < rows; ++r) {
    std::span<const cplx> x = row_at(r);
    if (x.size() != m) throw InputShapeError("psd: rows differ in length");
    fft::forward(x, spectrum);
    simd::active().abs2(as_reals(std::span<const cplx>(spectrum)).data(), mag2.data(), m);
    for (std::size_t k = 0; k < m; ++k) acc[k] += mag2[k];
  }
  const double s = 1.0 / (static_cast<double>(rows) * static_cast<double>(m) * static_cast<double>(m));
  std::vector<double> out(m);
  for (std::size_t j = 0; j < m; ++j) out[j] = s * acc[(j + m / 2) % m];
  return out;
}

struct BandIndex {
  std::size_t main_lo, upper_lo, lower_lo, width;
};

BandIndex band_index(std::size_t m, const SpectralParams& sp) {
  const std::size_t bw = sp.bw_bins;
  if (bw == 0 || bw % 2 != 0) throw ParameterError("acpr: bandwidth must be an even number of bins");
  const std::size_t c = m / 2;
  if (m % 2 != 0 || c < 3 * bw / 2 || c + 3 * bw / 2 > m)
    throw ParameterError("acpr: adjacent bands do not fit inside the spectrum (need L >= 3)");
  return {c - bw / 2, c + bw / 2, c - 3 * bw / 2, bw};
}

double band_sum(std::span<const double> p, std::size_t lo, std::size_t width) {
  double s = 0.0;
  for (std::size_t i = lo; i < lo + width; ++i) s += p[i];
  return s;
}

}  // namespace

std::vector<double> psd(const ComplexBatch& batch) {
  return psd_rows(batch.rows(), batch.cols(), [&](std::size_t r) { return batch.row(r); });
}

std::vector<double> psd(const std::vector<TimeWaveform>& batch) {
  const std::size_t m = batch.empty() ? 0 : batch.front().size();
  return psd_rows(batch.size(), m, [&](std::size_t r) { return std::span<const cplx>(batch[r].samples); });
}

BandPowers band_powers(std::span<const double> p, const SpectralParams& sp) {
  const BandIndex b = band_index(p.size(), sp);
  return {band_sum(p, b.main_lo, b.width), band_sum(p, b.upper_lo, b.width), band_sum(p, b.lower_lo, b.width)};
}

double acpr_db(std::span<const double> p, const SpectralParams& sp) {
  const BandPowers b = band_powers(p, sp);
  if (!(b.main > 0.0)) throw DegenerateInputError("acpr: no power in the main band");
  const double adj = std::max(b.upper, b.lower);
  if (!(adj > 0.0)) return kAcprFloorDb;
  return std::max(kAcprFloorDb, to_db(adj / b.main));
}

double acpr_db_with_grad(const ComplexBatch& batch, const SpectralParams& sp, AcprMax mode,
                         ComplexBatch* grad) {
  const std::size_t m = batch.cols();
  const std::vector<double> p = psd(batch);
  const BandIndex bi = band_index(m, sp);
  const BandPowers b = band_powers(p, sp);
  if (!(b.main > 0.0)) throw DegenerateInputError("acpr: no power in the main band");

  // dACPR/dP for the upper band, lower band and main band.
  double value = 0.0, w_up = 0.0, w_lo = 0.0, w_main = 0.0;
  const double k10 = 10.0 / std::log(10.0);
  if (mode == AcprMax::hard) {
    const bool upper = b.upper >= b.lower;
    const double adj = upper ? b.upper : b.lower;
    if (!(adj > 0.0) || to_db(adj / b.main) < kAcprFloorDb) {
      value = kAcprFloorDb;
    } else {
      value = to_db(adj / b.main);
      (upper ? w_up : w_lo) = k10 / adj;
      w_main = -k10 / b.main;
    }
  } else {
    if (!(b.upper > 0.0) || !(b.lower > 0.0)) {
      value = kAcprFloorDb;
    } else {
      const double u = to_db(b.upper / b.main);
      const double l = to_db(b.lower / b.main);
      const double hi = std::max(u, l);
      const double eu = std::exp(kAcprSmoothness * (u - hi));
      const double el = std::exp(kAcprSmoothness * (l - hi));
      value = hi + std::log(eu + el) / kAcprSmoothness;
      const double su = eu / (eu + el);
      const double sl = el / (eu + el);
      w_up = su * k10 / b.upper;
      w_lo = sl * k10 / b.lower;
      w_main = -k10 / b.main;
    }
  }

  if (grad != nullptr) {
    *grad = ComplexBatch(batch.rows(), m);
    if (w_up == 0.0 && w_lo == 0.0 && w_main == 0.0) return value;
    // Per-bin weight in natural FFT order.
    std::vector<double> c(m, 0.0);
    auto fill = [&](std::size_t lo, double w) {
      for (std::size_t j = lo; j < lo + bi.width; ++j) c[(j + m / 2) % m] = w;
    };
    fill(bi.upper_lo, w_up);
    fill(bi.lower_lo, w_lo);
    fill(bi.main_lo, w_main);
    // P_j = (1/(B M^2)) sum_b |W x_b|_j^2  =>  grad_b = (2/(B M^2)) W^H (c .* W x_b)
    const double s = 2.0 / (static_cast<double>(batch.rows()) * static_cast<double>(m) * static_cast<double>(m));
    std::vector<cplx> spectrum(m);
    for (std::size_t r = 0; r < batch.rows(); ++r) {
      fft::forward(batch.row(r), spectrum);
      for (std::size_t k = 0; k < m; ++k) spectrum[k] *= s * c[k];
      fft::inverse(spectrum, grad->row(r));
    }
  }
  return value;
}

double obo_db(const ComplexBatch& pa_input, double a0) {
  const double p = mean_power(pa_input);
  if (!(p > 0.0)) throw DegenerateInputError("obo: zero input power");
  return to_db(a0 * a0 / p);
}

double obo_db(const std::vector<TimeWaveform>& pa_input, double a0) {
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& w : pa_input) {
    total += simd::sum_squares(as_reals(std::span<const cplx>(w.samples)));
    count += w.size();
  }
  if (count == 0 || !(total > 0.0)) throw DegenerateInputError("obo: zero input power");
  return to_db(a0 * a0 * static_cast<double>(count) / total);
}

std::size_t bit_errors(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx) {
  if (tx.size() != rx.size()) throw InputShapeError("ber: sequences differ in length");
  std::size_t errors = 0;
  for (std::size_t i = 0; i < tx.size(); ++i) errors += (tx[i] != rx[i]) ? 1 : 0;
  return errors;
}

double ber(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx) {
  const std::size_t e = bit_errors(tx, rx);
  return tx.empty() ? 0.0 : static_cast<double>(e) / static_cast<double>(tx.size());
}

}  // namespace paprlab
