#include "paprlab/frontend.hpp"

#include <cmath>

#include "paprlab/simd/kernels.hpp"

namespace paprlab {

void HpaParams::validate() const {
  if (!(a0 > 0.0)) throw ParameterError("hpa.a0 must be > 0");
  if (!(v > 0.0)) throw ParameterError("hpa.v must be > 0");
  if (!(p > 0.0)) throw ParameterError("hpa.p must be > 0");
  if (!std::isfinite(ibo_db)) throw ParameterError("hpa.ibo_db must be finite");
}

double ibo_gain(const HpaParams& hpa) { return hpa.a0 * std::pow(10.0, -hpa.ibo_db / 20.0); }

TimeWaveform apply_ibo(const TimeWaveform& wave, const HpaParams& hpa) {
  TimeWaveform out{wave.samples, wave.stage};
  simd::scale(ibo_gain(hpa), as_reals(std::span<cplx>(out.samples)));
  return out;
}

void apply_ibo_in_place(ComplexBatch& batch, const HpaParams& hpa) {
  simd::scale(ibo_gain(hpa), as_reals(std::span<cplx>(batch.data())));
}

namespace {

// Output/input gain f(s) for s = |x|^2, and s*df/ds.
struct RappGain {
  double f;
  double s_dfds;
};

RappGain rapp_gain(double s, const HpaParams& hpa) {
  const double q = hpa.v * hpa.v / (hpa.a0 * hpa.a0);
  const double u = std::pow(q * s, hpa.p);
  const double f = hpa.v * std::pow(1.0 + u, -1.0 / (2.0 * hpa.p));
  // f'(s) = -f * u / (2 s (1+u))
  return {f, -0.5 * f * u / (1.0 + u)};
}

}  // namespace

double rapp_output_amplitude(double amplitude, const HpaParams& hpa) {
  return amplitude * rapp_gain(amplitude * amplitude, hpa).f;
}

void rapp_amplify(std::span<const cplx> in, std::span<cplx> out, const HpaParams& hpa) {
  if (in.size() != out.size()) throw InputShapeError("rapp_amplify: length mismatch");
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = rapp_gain(std::norm(in[i]), hpa).f * in[i];
}

TimeWaveform rapp_amplify(const TimeWaveform& wave, const HpaParams& hpa) {
  TimeWaveform out{std::vector<cplx>(wave.size()), Stage::amplified};
  rapp_amplify(wave.samples, out.samples, hpa);
  return out;
}

ComplexBatch rapp_amplify(const ComplexBatch& batch, const HpaParams& hpa) {
  ComplexBatch out(batch.rows(), batch.cols());
  rapp_amplify(batch.data(), out.data(), hpa);
  return out;
}

void rapp_backward(std::span<const cplx> in, std::span<const cplx> grad_out, std::span<cplx> grad_in,
                   const HpaParams& hpa) {
  if (in.size() != grad_out.size() || in.size() != grad_in.size())
    throw InputShapeError("rapp_backward: length mismatch");
  for (std::size_t i = 0; i < in.size(); ++i) {
    const double s = std::norm(in[i]);
    const RappGain g = rapp_gain(s, hpa);
    // y = f(s) x  =>  grad_x = f g + 2 f'(s) Re(conj(x) g) x
    cplx gi = g.f * grad_out[i];
    if (s > 0.0) {
      const double proj = (std::conj(in[i]) * grad_out[i]).real();
      gi += 2.0 * (g.s_dfds / s) * proj * in[i];
    }
    grad_in[i] = gi;
  }
}

namespace {

CompensationState alpha_from_sums(cplx cross, double power) {
  if (!(power > 0.0)) throw DegenerateInputError("bussgang_alpha: zero input power");
  return {cross / power};
}

}  // namespace

CompensationState bussgang_alpha(const ComplexBatch& reference, const ComplexBatch& amplified) {
  if (reference.rows() != amplified.rows() || reference.cols() != amplified.cols())
    throw InputShapeError("bussgang_alpha: shape mismatch");
  cplx cross{};
  double power = 0.0;
  const auto& x = reference.data();
  const auto& y = amplified.data();
  for (std::size_t i = 0; i < x.size(); ++i) {
    cross += x[i] * std::conj(y[i]);
    power += std::norm(x[i]);
  }
  return alpha_from_sums(cross, power);
}

CompensationState bussgang_alpha(const std::vector<TimeWaveform>& reference,
                                 const std::vector<TimeWaveform>& amplified) {
  if (reference.size() != amplified.size()) throw InputShapeError("bussgang_alpha: shape mismatch");
  cplx cross{};
  double power = 0.0;
  for (std::size_t r = 0; r < reference.size(); ++r) {
    const auto& x = reference[r].samples;
    const auto& y = amplified[r].samples;
    if (x.size() != y.size()) throw InputShapeError("bussgang_alpha: shape mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) {
      cross += x[i] * std::conj(y[i]);
      power += std::norm(x[i]);
    }
  }
  return alpha_from_sums(cross, power);
}

}  // namespace paprlab
