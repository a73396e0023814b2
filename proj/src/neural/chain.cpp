#include "paprlab/neural/chain.hpp"

#include "paprlab/ofdm.hpp"
#include "paprlab/simd/kernels.hpp"

namespace paprlab::neural {
namespace {

void check_context(const AutoencoderModel& model, const ComplexBatch& symbols, const ChainContext& ctx) {
  const auto& a = model.architecture();
  if (a.subcarriers != ctx.system.subcarriers || a.oversampling != ctx.system.oversampling)
    throw ConfigError("system", "model was built for a different subcarrier count or oversampling");
  if (symbols.cols() != ctx.system.subcarriers) throw InputShapeError("chain: symbol block length is not N");
}

void add_scaled(ComplexBatch& dst, const ComplexBatch& src, double s) {
  if (src.empty()) return;
  if (src.rows() != dst.rows() || src.cols() != dst.cols()) throw InputShapeError("chain: gradient shape mismatch");
  simd::axpy(s, as_reals(std::span<const cplx>(src.data())), as_reals(std::span<cplx>(dst.data())));
}

}  // namespace

ChainTaps transmit(AutoencoderModel& model, const ComplexBatch& symbols, const ChainContext& ctx, Mode mode) {
  check_context(model, symbols, ctx);
  const auto layout = model.architecture().layout;
  ChainTaps t;
  t.symbols = symbols;
  t.x_raw = ofdm_modulate(symbols, ctx.system.oversampling);
  t.x_enc = from_tensor(model.encoder().forward(to_tensor(t.x_raw, layout), mode), layout);
  if (t.x_enc.cols() != ctx.system.waveform_length())
    throw InputShapeError("chain: encoder output length is not L*N");
  t.x_norm = t.x_enc;
  t.norm_factor = power_normalize_in_place(t.x_norm);
  t.x_f = t.x_norm;
  bpf_in_place(t.x_f, ctx.system.subcarriers);
  return t;
}

void receive(AutoencoderModel& model, ChainTaps& t, const ChainContext& ctx, Rng& noise_rng, Mode mode) {
  const auto layout = model.architecture().layout;
  t.x_pa_in = t.x_f;
  apply_ibo_in_place(t.x_pa_in, ctx.hpa);
  if (ctx.linear_pa) {
    t.x_p = t.x_pa_in;
    simd::scale(ctx.hpa.v, as_reals(std::span<cplx>(t.x_p.data())));
  } else {
    t.x_p = rapp_amplify(t.x_pa_in, ctx.hpa);
  }
  t.y = t.x_p;
  add_awgn(t.y.data(), noise_variance(ctx.p_snr_db, ctx.hpa), noise_rng);
  t.comp = ctx.alpha_override ? CompensationState{*ctx.alpha_override} : bussgang_alpha(t.x_f, t.x_p);
  ComplexBatch compensated = t.y;
  compensate_in_place(compensated.data(), t.comp);
  t.y_freq = ofdm_demodulate(compensated, ctx.system.oversampling);
  t.decoded = from_tensor(model.decoder().forward(to_tensor(t.y_freq, layout), mode), layout);
  if (t.decoded.cols() != ctx.system.subcarriers) throw InputShapeError("chain: decoder output length is not N");
}

ChainTaps cae_forward(AutoencoderModel& model, const ComplexBatch& symbols, const ChainContext& ctx,
                      Rng& noise_rng, Mode mode) {
  ChainTaps t = transmit(model, symbols, ctx, mode);
  receive(model, t, ctx, noise_rng, mode);
  return t;
}

ComplexBatch power_normalize_backward(const ComplexBatch& x, double factor, const ComplexBatch& grad_out) {
  // out = c x, c = (mean|x|^2)^(-1/2)  =>  grad_x = c g - (c^3/K) Re(sum conj(x) g) x
  const auto xs = as_reals(std::span<const cplx>(x.data()));
  const auto gs = as_reals(std::span<const cplx>(grad_out.data()));
  const double proj = simd::dot(xs, gs);
  const double k = static_cast<double>(x.rows() * x.cols());
  ComplexBatch g(x.rows(), x.cols());
  auto out = as_reals(std::span<cplx>(g.data()));
  simd::axpy(factor, gs, out);
  simd::axpy(-factor * factor * factor / k * proj, xs, out);
  return g;
}

void cae_backward(AutoencoderModel& model, const ChainTaps& t, const ChainContext& ctx, const TapGradients& grads) {
  const auto layout = model.architecture().layout;
  const std::size_t rows = t.symbols.rows();
  const std::size_t m = ctx.system.waveform_length();
  const int l = ctx.system.oversampling;

  // Decoder and receiver: y -> /alpha -> DFT -> unpad is C-linear, its adjoint
  // is conj(1/alpha)/L times the (padded) modulator.
  ComplexBatch g_y(rows, m);
  if (!grads.decoded.empty()) {
    const ComplexBatch g_freq =
        from_tensor(model.decoder().backward(to_tensor(grads.decoded, layout)), layout);
    const cplx adj = std::conj(1.0 / t.comp.alpha) / static_cast<double>(l);
    for (std::size_t r = 0; r < rows; ++r) {
      ofdm_modulate(g_freq.row(r), l, g_y.row(r));
      for (auto& z : g_y.row(r)) z *= adj;
    }
  }

  // Noise is additive, so g_xp = g_y + ACPR tap gradient.
  ComplexBatch& g_xp = g_y;
  add_scaled(g_xp, grads.x_p, 1.0);

  ComplexBatch g_xf(rows, m);
  if (ctx.linear_pa) {
    add_scaled(g_xf, g_xp, ctx.hpa.v);
  } else {
    rapp_backward(t.x_pa_in.data(), g_xp.data(), g_xf.data(), ctx.hpa);
  }
  simd::scale(ibo_gain(ctx.hpa), as_reals(std::span<cplx>(g_xf.data())));
  add_scaled(g_xf, grads.x_f, 1.0);

  // The rectangular band-pass is an orthogonal projection: self-adjoint.
  bpf_in_place(g_xf, ctx.system.subcarriers);
  const ComplexBatch g_enc = power_normalize_backward(t.x_enc, t.norm_factor, g_xf);
  model.encoder().backward(to_tensor(g_enc, layout));
}

}  // namespace paprlab::neural
