#pragma once

// Experiment runners behind the CLI. Every Monte-Carlo run is split into
// chunks of eval.chunk_symbols OFDM symbols; chunk c draws its data from a
// seed derived from (master seed, command stream, c) and results are merged
// in chunk order, so output does not depend on the worker count.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "paprlab/harness/config.hpp"
#include "paprlab/harness/curve_file.hpp"
#include "paprlab/neural/checkpoint.hpp"

namespace paprlab::harness {

std::filesystem::path checkpoint_path(const std::filesystem::path& dir, Method m);
std::filesystem::path train_log_path(const std::filesystem::path& dir, Method m);

/// Loads the checkpoint of a learned method and checks it matches the
/// configured architecture. Throws Error naming the method when missing.
neural::LoadedCheckpoint load_method_checkpoint(const ExperimentConfig& cfg, const std::filesystem::path& dir,
                                                Method m);

struct TrainRun {
  Method method = Method::cae;
  neural::TrainResult result;
};

/// Trains every learned method in cfg.methods, writing <method>.ckpt and
/// <method>_train_log.csv to `out`. Progress lines go to `progress` if set.
std::vector<TrainRun> run_train(const ExperimentConfig& cfg, const std::filesystem::path& out,
                                std::ostream* progress = nullptr);

struct BerPoint {
  double p_snr_db = 0.0;
  std::uint64_t symbols = 0;
  std::uint64_t bits = 0;
  std::uint64_t errors = 0;

  double ber() const { return bits ? static_cast<double>(errors) / static_cast<double>(bits) : 0.0; }
  /// Normal-approximation 95% half-width of the BER estimate.
  double half_width() const;
};

struct BerResult {
  std::map<std::string, std::vector<BerPoint>> curves;
  CurveFile file;
};

/// BER against P_SNR per method. In linear-chain mode only the no-reduction
/// method runs, through a linear amplifier, and the file carries the
/// analytic Gray 4-QAM value per point.
BerResult eval_ber(const ExperimentConfig& cfg, const std::filesystem::path& checkpoints);

/// Bit-error probability of Gray 4-QAM on the linear chain at this P_SNR.
double linear_chain_analytic_ber(const ExperimentConfig& cfg, double p_snr_db);

struct CcdfResult {
  std::map<std::string, std::vector<double>> papr_db;  // per OFDM symbol
  std::map<std::string, double> papr0_db;               // at CCDF 1e-2
  CurveFile file;
};
CcdfResult eval_ccdf(const ExperimentConfig& cfg, const std::filesystem::path& checkpoints);

struct PsdResult {
  std::map<std::string, std::vector<double>> psd;  // fftshifted, sums to mean power
  std::map<std::string, double> mean_power;
  CurveFile file;
};
/// Amplifier-output PSD per method, plus the ideal in-band rectangle.
PsdResult eval_psd(const ExperimentConfig& cfg, const std::filesystem::path& checkpoints);

struct TableEntry {
  double acpr_db = 0.0;
  double obo_db = 0.0;
};
struct TableResult {
  std::map<std::string, TableEntry> entries;
  CurveFile file;
};
TableResult eval_table(const ExperimentConfig& cfg, const std::filesystem::path& checkpoints);

struct OboAcprResult {
  /// Per method, one entry per eval.ibo_sweep_db value.
  std::map<std::string, std::vector<TableEntry>> sweeps;
  CurveFile file;
};
OboAcprResult eval_obo_vs_acpr(const ExperimentConfig& cfg, const std::filesystem::path& checkpoints);

/// Writes the curve file and a JSON summary for one command into `out`.
void write_run(const std::filesystem::path& out, const std::string& command, const ExperimentConfig& cfg,
               const CurveFile& file, const std::string& summary_json_body);

/// JSON summaries (objects) of each result, used by write_run.
std::string summarize(const BerResult& r);
std::string summarize(const CcdfResult& r);
std::string summarize(const PsdResult& r);
std::string summarize(const TableResult& r);
std::string summarize(const OboAcprResult& r);

}  // namespace paprlab::harness
