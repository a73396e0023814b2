#pragma once

// Experiment description. Read from a JSON file; every omitted field takes
// its default, unknown fields are rejected, and CLI `--set a.b=value`
// overrides are applied to the JSON tree before validation.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "paprlab/baselines.hpp"
#include "paprlab/frontend.hpp"
#include "paprlab/metrics.hpp"
#include "paprlab/neural/model.hpp"
#include "paprlab/neural/train.hpp"

namespace paprlab::harness {

/// cae_fixed is the CAE trained with the joint loss from epoch 0.
enum class Method { none, cf, slm, cae, cae_fixed, fc_ae };

const char* method_name(Method m);
Method parse_method(const std::string& s);
bool is_learned(Method m);

struct EvalConfig {
  std::vector<double> p_snr_db{6, 8, 10, 12, 14, 16};
  std::size_t ber_symbols = 20000;
  double ccdf_min_db = 0.0;
  double ccdf_max_db = 13.0;
  double ccdf_step_db = 0.1;
  std::size_t ccdf_symbols = 100000;
  std::size_t psd_symbols = 10000;
  std::size_t table_symbols = 10000;
  std::vector<double> ibo_sweep_db{0, 1, 2, 3, 4, 5, 6, 7, 8};
  /// OFDM symbols per Monte-Carlo chunk; each chunk has its own seed.
  std::size_t chunk_symbols = 1000;
  /// Sanity mode: linear amplifier and no reduction, for the analytic check.
  bool linear_chain = false;
  /// Worker threads. Results do not depend on it.
  int threads = 1;

  std::vector<double> ccdf_thresholds() const;
  bool operator==(const EvalConfig&) const = default;
};

struct ExperimentConfig {
  neural::SystemParams system;
  std::string constellation = "qam4";
  HpaParams hpa;
  SpectralParams spectral;
  neural::TrainConfig train;
  neural::LossWeights loss;
  neural::Architecture model;  // conv plan and fc_ae widths; sizes follow `system`
  CfParams cf;
  int slm_sequences = 128;
  std::vector<Method> methods{Method::none, Method::cf, Method::slm, Method::cae};
  EvalConfig eval;
  std::uint64_t seed = 1;
  std::string output_dir;

  void validate() const;
  neural::Architecture architecture(Method m) const;
  neural::TrainConfig train_config(Method m) const;
  SlmParams slm() const;
  bool operator==(const ExperimentConfig&) const = default;
};

/// Fixed sub-seeds of the master seed.
namespace seed_stream {
inline constexpr std::uint64_t model_init = 1;
inline constexpr std::uint64_t training = 2;
inline constexpr std::uint64_t slm_table = 3;
inline constexpr std::uint64_t ber = 10;
inline constexpr std::uint64_t ccdf = 11;
inline constexpr std::uint64_t psd = 12;
inline constexpr std::uint64_t table = 13;
inline constexpr std::uint64_t obo_acpr = 14;
}  // namespace seed_stream

ExperimentConfig parse_config(const std::string& json_text, const std::vector<std::string>& overrides = {});
ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});
std::string serialize_config(const ExperimentConfig& c);

/// Serialized config without the fields that cannot change results
/// (output_dir, eval.threads).
std::string canonical_config(const ExperimentConfig& c);

/// FNV-1a 64 of canonical_config, as 16 hex digits.
std::string config_hash(const ExperimentConfig& c);

}  // namespace paprlab::harness
