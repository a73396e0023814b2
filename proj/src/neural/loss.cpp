#include "paprlab/neural/loss.hpp"

#include <algorithm>

#include "paprlab/simd/kernels.hpp"

namespace paprlab::neural {

double weight_norm_squared(AutoencoderModel& model) {
  double s = 0.0;
  for (auto* p : model.parameters())
    if (p->decay) s += simd::sum_squares(p->value);
  return s;
}

LossReport joint_loss(const ChainTaps& taps, const ComplexBatch& target, const LossWeights& w,
                      const SpectralParams& sp, LossStage stage, const LossOptions& opt, TapGradients* grads,
                      AutoencoderModel* model) {
  if (target.rows() != taps.decoded.rows() || target.cols() != taps.decoded.cols())
    throw InputShapeError("joint_loss: target shape does not match decoder output");
  const bool joint = stage == LossStage::joint;
  LossReport r;

  // L1: reconstruction error, mean over every symbol of the batch.
  const double count = static_cast<double>(target.rows() * target.cols());
  if (grads != nullptr) grads->decoded = ComplexBatch(target.rows(), target.cols());
  double se = 0.0;
  for (std::size_t i = 0; i < target.data().size(); ++i) {
    const cplx e = taps.decoded.data()[i] - target.data()[i];
    se += std::norm(e);
    if (grads != nullptr) grads->decoded.data()[i] = 2.0 / count * e;
  }
  r.mse = se / count;
  r.l1 = r.mse;
  if (opt.regularization == RegularizationMode::additive && w.lambda1 != 0.0) {
    if (model == nullptr) throw ConfigError("loss.lambda1", "additive regularization needs the model");
    r.l1 += w.lambda1 * weight_norm_squared(*model);
    if (grads != nullptr) {
      for (auto* p : model->parameters())
        if (p->decay) simd::axpy(2.0 * w.lambda1, p->value, p->grad);
    }
  }

  // L2: batch-mean PAPR at the filter output.
  const std::size_t rows = taps.x_f.rows();
  ComplexBatch g_papr(rows, taps.x_f.cols());
  double papr_sum = 0.0, papr_db_sum = 0.0;
  for (std::size_t b = 0; b < rows; ++b) {
    const double p = papr_with_grad(taps.x_f.row(b), g_papr.row(b));
    papr_sum += p;
    papr_db_sum += to_db(p);
  }
  r.l2 = papr_sum / static_cast<double>(rows);
  r.mean_papr_db = papr_db_sum / static_cast<double>(rows);

  // L3: ACPR of the amplifier output against the requirement.
  ComplexBatch g_acpr;
  r.acpr_db = acpr_db_with_grad(taps.x_p, sp, opt.acpr_max, grads != nullptr && joint ? &g_acpr : nullptr);
  r.l3 = r.acpr_db - sp.acpr_req_db;
  bool l3_active = true;
  if (opt.acpr_mode == AcprLossMode::hinge && r.l3 <= 0.0) {
    r.l3 = 0.0;
    l3_active = false;
  }

  r.total = r.l1;
  if (joint) {
    r.total += w.lambda2 * r.l2 + w.lambda3 * r.l3;
    if (grads != nullptr) {
      simd::scale(w.lambda2 / static_cast<double>(rows), as_reals(std::span<cplx>(g_papr.data())));
      grads->x_f = std::move(g_papr);
      if (l3_active) {
        simd::scale(w.lambda3, as_reals(std::span<cplx>(g_acpr.data())));
        grads->x_p = std::move(g_acpr);
      } else {
        grads->x_p = ComplexBatch();
      }
    }
  } else if (grads != nullptr) {
    grads->x_f = ComplexBatch();
    grads->x_p = ComplexBatch();
  }
  return r;
}

}  // namespace paprlab::neural
