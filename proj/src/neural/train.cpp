#include "paprlab/neural/train.hpp"

#include <cmath>

#include "paprlab/ofdm.hpp"

namespace paprlab::neural {

void TrainConfig::validate() const {
  if (epochs < 0) throw ConfigError("train.epochs", "must be >= 0");
  if (batches_per_epoch < 1) throw ConfigError("train.batches_per_epoch", "must be >= 1");
  if (batch_size < 2) throw ConfigError("train.batch_size", "must be >= 2 (batch norm)");
  if (stage1_epochs < 0 || stage1_epochs > epochs)
    throw ConfigError("train.stage1_epochs", "must lie in [0, epochs]");
  if (!(optimizer.lr > 0.0)) throw ConfigError("train.lr", "must be > 0");
  if (optimizer.weight_decay < 0.0) throw ConfigError("train.weight_decay", "must be >= 0");
  if (snr_min_db > snr_max_db) throw ConfigError("train.snr_range_db", "min exceeds max");
}

LossStage stage_for_epoch(const TrainConfig& cfg, int epoch) {
  if (cfg.schedule == Schedule::fixed) return LossStage::joint;
  return epoch < cfg.stage1_epochs ? LossStage::reconstruction : LossStage::joint;
}

ComplexBatch random_symbols(Rng& rng, std::size_t rows, std::size_t subcarriers, std::vector<std::uint8_t>* bits) {
  ComplexBatch out(rows, subcarriers);
  const std::vector<std::uint8_t> b = random_bits(rng, 2 * rows * subcarriers);
  const SymbolBlock block = qam4_map(b);
  std::copy(block.symbols.begin(), block.symbols.end(), out.data().begin());
  if (bits != nullptr) *bits = b;
  return out;
}

TrainResult train(AutoencoderModel& model, const TrainConfig& cfg, const LossWeights& weights,
                  const ChainContext& ctx, std::uint64_t seed, const std::function<void(const EpochLog&)>& on_epoch) {
  cfg.validate();
  TrainResult result;
  Rng rng(seed);
  AdamW opt(cfg.optimizer);
  const auto params = model.parameters();
  ChainContext step_ctx = ctx;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const LossStage stage = stage_for_epoch(cfg, epoch);
    EpochLog log;
    log.epoch = epoch;
    log.stage = stage;
    for (int it = 0; it < cfg.batches_per_epoch; ++it) {
      const ComplexBatch symbols =
          random_symbols(rng, static_cast<std::size_t>(cfg.batch_size), ctx.system.subcarriers);
      step_ctx.p_snr_db =
          cfg.snr_min_db == cfg.snr_max_db ? cfg.snr_min_db : rng.uniform(cfg.snr_min_db, cfg.snr_max_db);
      model.zero_grad();
      const ChainTaps taps = cae_forward(model, symbols, step_ctx, rng, Mode::train);
      TapGradients grads;
      const LossReport r = joint_loss(taps, symbols, weights, ctx.spectral, stage, cfg.loss, &grads, &model);
      if (!std::isfinite(r.total)) throw TrainingError(epoch, "loss is not finite");
      cae_backward(model, taps, step_ctx, grads);
      opt.step(params);

      log.loss += r.total;
      log.l1 += r.l1;
      log.mse += r.mse;
      log.l2 += r.l2;
      log.l3 += r.l3;
      log.mean_papr_db += r.mean_papr_db;
      log.acpr_db += r.acpr_db;
    }
    const double n = cfg.batches_per_epoch;
    for (double* v : {&log.loss, &log.l1, &log.mse, &log.l2, &log.l3, &log.mean_papr_db, &log.acpr_db}) *v /= n;
    result.log.push_back(log);
    if (on_epoch) on_epoch(log);
  }
  result.optimizer_steps = opt.steps();
  return result;
}

}  // namespace paprlab::neural
