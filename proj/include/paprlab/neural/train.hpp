#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "paprlab/neural/adamw.hpp"
#include "paprlab/neural/chain.hpp"
#include "paprlab/neural/loss.hpp"

namespace paprlab::neural {

/// gradual: reconstruction loss for stage1_epochs, then the joint loss.
/// fixed: joint loss from the first epoch.
enum class Schedule { gradual, fixed };

struct TrainConfig {
  int epochs = 160;
  int batches_per_epoch = 4375;
  int batch_size = 32;
  int stage1_epochs = 40;
  Schedule schedule = Schedule::gradual;
  AdamWConfig optimizer;
  /// Each batch draws its P_SNR uniformly from this range.
  double snr_min_db = 6.0;
  double snr_max_db = 16.0;
  LossOptions loss;

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

struct EpochLog {
  int epoch = 0;
  LossStage stage = LossStage::reconstruction;
  double loss = 0.0;
  double l1 = 0.0;
  double mse = 0.0;
  double l2 = 0.0;
  double l3 = 0.0;
  double mean_papr_db = 0.0;
  double acpr_db = 0.0;
};

struct TrainResult {
  std::vector<EpochLog> log;
  std::uint64_t optimizer_steps = 0;
};

LossStage stage_for_epoch(const TrainConfig& cfg, int epoch);

/// Optimizes `model` in place. Batches, SNR draws and channel noise all come
/// from one stream seeded by `seed`, so the result is a pure function of
/// (initial model, cfg, weights, ctx, seed). Throws TrainingError carrying the
/// epoch index if the loss stops being finite.
TrainResult train(AutoencoderModel& model, const TrainConfig& cfg, const LossWeights& weights,
                  const ChainContext& ctx, std::uint64_t seed,
                  const std::function<void(const EpochLog&)>& on_epoch = {});

/// One batch of random Gray 4-QAM blocks, and the bits behind them.
ComplexBatch random_symbols(Rng& rng, std::size_t rows, std::size_t subcarriers,
                            std::vector<std::uint8_t>* bits = nullptr);

}  // namespace paprlab::neural
