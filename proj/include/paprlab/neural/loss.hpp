#pragma once

#include "paprlab/metrics.hpp"
#include "paprlab/neural/chain.hpp"

namespace paprlab::neural {

/// Reconstruction-only warm-up, then the full three-term objective.
enum class LossStage { reconstruction, joint };

/// How the ||theta||^2 term is realized: as AdamW's decoupled decay, or as an
/// explicit lambda1 * ||theta||^2 added to L1.
enum class RegularizationMode { decoupled, additive };

/// L3 = ACPR - ACPR_req as a plain difference, or max(0, .) once met.
enum class AcprLossMode { difference, hinge };

struct LossWeights {
  double lambda1 = 1e-4;
  double lambda2 = 0.004;
  double lambda3 = 0.001;

  bool operator==(const LossWeights&) const = default;
};

struct LossOptions {
  RegularizationMode regularization = RegularizationMode::decoupled;
  AcprMax acpr_max = AcprMax::hard;
  AcprLossMode acpr_mode = AcprLossMode::difference;

  bool operator==(const LossOptions&) const = default;
};

struct LossReport {
  double total = 0.0;
  double l1 = 0.0;   // mse (+ lambda1 ||theta||^2 in additive mode)
  double mse = 0.0;  // mean |X - X_hat|^2 per symbol
  double l2 = 0.0;   // batch-mean linear PAPR of x_f
  double l3 = 0.0;   // ACPR(x_p) - ACPR_req, dB
  double acpr_db = 0.0;
  double mean_papr_db = 0.0;
};

/// Evaluates all three terms (for logging) and combines them per `stage`.
/// When `grads` is non-null it receives the tap gradients of the combined
/// loss; in additive mode the L2 term's gradient goes straight into `model`.
LossReport joint_loss(const ChainTaps& taps, const ComplexBatch& target, const LossWeights& w,
                      const SpectralParams& sp, LossStage stage, const LossOptions& opt, TapGradients* grads,
                      AutoencoderModel* model = nullptr);

/// Sum of squares over decay-eligible parameters (weights, not biases or BN).
double weight_norm_squared(AutoencoderModel& model);

}  // namespace paprlab::neural
