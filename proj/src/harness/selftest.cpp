#include "paprlab/harness/selftest.hpp"

#include <cmath>
#include <cstdio>
#include <functional>

#include "paprlab/error.hpp"
#include "paprlab/harness/config.hpp"
#include "paprlab/metrics.hpp"
#include "paprlab/neural/loss.hpp"
#include "paprlab/neural/train.hpp"
#include "paprlab/ofdm.hpp"
#include "paprlab/simd/kernels.hpp"

namespace paprlab::harness {
namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

SelfCheck check(std::string name, double value, double limit) {
  return {std::move(name), value < limit, "error " + sci(value) + " (limit " + sci(limit) + ")"};
}

SelfCheck dft_round_trip() {
  Rng rng(11);
  const std::size_t n = 72;
  ComplexBatch x(1, n);
  for (auto& z : x.data()) z = {rng.normal(), rng.normal()};
  const ComplexBatch y = ofdm_demodulate(ofdm_modulate(x, 4), 4);
  double err = 0.0;
  for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(y.data()[i] - x.data()[i]));
  return check("ofdm round trip", err, 1e-10);
}

SelfCheck parseval() {
  Rng rng(12);
  ComplexBatch x(1, 72);
  for (auto& z : x.data()) z = {rng.normal(), rng.normal()};
  double freq = 0.0;
  for (auto z : x.data()) freq += std::norm(z);
  freq /= 72.0;
  const double time = mean_power(ofdm_modulate(x, 4));
  return check("parseval", std::abs(time - freq) / freq, 1e-10);
}

SelfCheck papr_all_ones() {
  std::vector<cplx> ones(64, cplx(1.0, 0.0));
  const TimeWaveform w = ofdm_modulate(SymbolBlock{ones}, 1);
  return check("papr of all-ones block", std::abs(papr(w) - 64.0), 1e-9);
}

SelfCheck rapp_anchor() {
  HpaParams hpa;
  const double g = rapp_output_amplitude(hpa.a0 / hpa.v, hpa);
  return check("rapp saturation point", std::abs(g - std::pow(2.0, -1.0 / (2.0 * hpa.p))), 1e-6);
}

SelfCheck bussgang_linear() {
  Rng rng(13);
  ComplexBatch x(4, 32);
  for (auto& z : x.data()) z = {rng.normal(), rng.normal()};
  const double v = 0.8;
  ComplexBatch y = x;
  for (auto& z : y.data()) z *= v;
  return check("bussgang gain of a linear amplifier", std::abs(bussgang_alpha(x, y).alpha - v), 1e-12);
}

SelfCheck conv_weights() {
  neural::Architecture a;
  a.layout = neural::ComplexLayout::interleaved;
  neural::AutoencoderModel m(a);
  const std::size_t n = m.transmitter_conv_weight_count();
  return {"transmitter conv weights (1 input channel)", n == 468, std::to_string(n)};
}

SelfCheck kernels_agree() {
  const simd::Kernels* v = simd::avx2_kernels();
  if (v == nullptr) return {"simd kernels", true, "vector table unavailable, scalar only"};
  const simd::Kernels& s = simd::scalar_kernels();
  Rng rng(14);
  std::vector<double> a(1003), b(1003);
  for (auto& e : a) e = rng.normal();
  for (auto& e : b) e = rng.normal();
  double err = std::abs(s.dot(a.data(), b.data(), a.size()) - v->dot(a.data(), b.data(), a.size()));
  err = std::max(err, std::abs(s.sum_squares(a.data(), a.size()) - v->sum_squares(a.data(), a.size())));
  std::vector<double> y1 = b, y2 = b;
  s.axpy(0.3, a.data(), y1.data(), a.size());
  v->axpy(0.3, a.data(), y2.data(), a.size());
  for (std::size_t i = 0; i < y1.size(); ++i) err = std::max(err, std::abs(y1[i] - y2[i]));
  return check(std::string("simd kernels (") + v->name + " vs scalar)", err, 1e-10);
}

SelfCheck chain_gradient() {
  neural::Architecture a;
  a.subcarriers = 8;
  a.oversampling = 4;
  a.encoder_channels = {3, 2};
  a.decoder_channels = {2, 3};
  neural::AutoencoderModel model(a);
  model.initialize(15);
  // Zero biases put padded taps exactly on the SELU kink.
  Rng jitter(18);
  for (neural::Parameter* p : model.parameters())
    if (!p->decay)
      for (double& v : p->value) v += 0.05 * jitter.normal();
  neural::ChainContext ctx;
  ctx.system = {8, 4};
  ctx.spectral.bw_bins = 8;
  ctx.p_snr_db = 12.0;
  Rng data(16);
  const ComplexBatch symbols = neural::random_symbols(data, 4, 8);
  neural::LossOptions opt;
  opt.acpr_max = AcprMax::smooth;
  {
    // Backward treats alpha as a constant, so hold it fixed while probing.
    Rng noise(17);
    ctx.alpha_override = neural::cae_forward(model, symbols, ctx, noise, neural::Mode::eval).comp.alpha;
  }

  auto loss = [&](neural::TapGradients* grads) {
    Rng noise(17);
    const neural::ChainTaps taps = neural::cae_forward(model, symbols, ctx, noise, neural::Mode::eval);
    const auto r = neural::joint_loss(taps, symbols, {}, ctx.spectral, neural::LossStage::joint, opt, grads, &model);
    if (grads != nullptr) neural::cae_backward(model, taps, ctx, *grads);
    return r.total;
  };

  model.zero_grad();
  neural::TapGradients g;
  loss(&g);
  double worst = 0.0;
  for (neural::Parameter* p : model.parameters()) {
    const std::size_t idx = p->size() / 2;
    const double analytic = p->grad[idx];
    const double saved = p->value[idx];
    const double h = 1e-6;
    p->value[idx] = saved + h;
    const double up = loss(nullptr);
    p->value[idx] = saved - h;
    const double down = loss(nullptr);
    p->value[idx] = saved;
    const double numeric = (up - down) / (2 * h);
    const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
    worst = std::max(worst, std::abs(analytic - numeric) / scale);
  }
  return check("chain gradient", worst, 1e-4);
}

SelfCheck config_round_trip() {
  ExperimentConfig c;
  c.methods = {Method::none, Method::fc_ae};
  c.eval.p_snr_db = {1.5, 2.25};
  const ExperimentConfig back = parse_config(serialize_config(c));
  return {"config round trip", back == c, back == c ? "equal" : "differs"};
}

}  // namespace

std::vector<SelfCheck> run_selftest() {
  const std::function<SelfCheck()> checks[] = {dft_round_trip, parseval,      papr_all_ones,  rapp_anchor,
                                               bussgang_linear, conv_weights, kernels_agree,  chain_gradient,
                                               config_round_trip};
  std::vector<SelfCheck> out;
  for (const auto& c : checks) {
    try {
      out.push_back(c());
    } catch (const std::exception& e) {
      out.push_back({"(check threw)", false, e.what()});
    }
  }
  return out;
}

}  // namespace paprlab::harness
