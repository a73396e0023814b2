// paprlab: train and evaluate PAPR-reducing OFDM transmitters.
//
//   paprlab <command> [--config FILE] [--seed S] [--out DIR] [--checkpoints DIR]
//                     [--set key=value]... [--threads T]
//
// Output goes to --out, else the config's output_dir, else $PAPRLAB_OUTPUT_DIR,
// else ./paprlab_out.

#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "paprlab/error.hpp"
#include "paprlab/harness/experiments.hpp"
#include "paprlab/harness/selftest.hpp"

namespace fs = std::filesystem;
using namespace paprlab;
using namespace paprlab::harness;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string checkpoints;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

ExperimentConfig resolve_config(const Options& o) {
  std::vector<std::string> overrides = o.sets;
  if (o.seed) overrides.push_back("seed=" + std::to_string(*o.seed));
  if (o.threads) overrides.push_back("eval.threads=" + std::to_string(*o.threads));
  if (o.config.empty()) return parse_config("{}", overrides);
  return load_config(o.config, overrides);
}

fs::path resolve_output(const Options& o, const ExperimentConfig& cfg) {
  if (!o.out.empty()) return o.out;
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  if (const char* env = std::getenv("PAPRLAB_OUTPUT_DIR"); env != nullptr && *env != '\0') return env;
  return "paprlab_out";
}

int run(const std::string& command, const Options& o) {
  if (command == "selftest") {
    int failed = 0;
    for (const auto& c : run_selftest()) {
      std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
      failed += c.passed ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
  }

  const ExperimentConfig cfg = resolve_config(o);
  const fs::path out = resolve_output(o, cfg);
  const fs::path ckpt = o.checkpoints.empty() ? out : fs::path(o.checkpoints);
  fs::create_directories(out);

  if (command == "train") {
    const auto runs = run_train(cfg, out, &std::cerr);
    std::string body = "{";
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const auto& r = runs[i];
      const std::string final_mse = r.result.log.empty() ? "null" : format_number(r.result.log.back().mse);
      body += std::string(i ? "," : "") + "\"" + method_name(r.method) + "\":{\"epochs\":" +
              std::to_string(r.result.log.size()) + ",\"optimizer_steps\":" +
              std::to_string(r.result.optimizer_steps) + ",\"final_mse\":" + final_mse + "}";
    }
    body += "}";
    write_run(out, "train", cfg, CurveFile{}, body);
  } else if (command == "eval-ber") {
    const auto r = eval_ber(cfg, ckpt);
    write_run(out, command, cfg, r.file, summarize(r));
  } else if (command == "eval-ccdf") {
    const auto r = eval_ccdf(cfg, ckpt);
    write_run(out, command, cfg, r.file, summarize(r));
  } else if (command == "eval-psd") {
    const auto r = eval_psd(cfg, ckpt);
    write_run(out, command, cfg, r.file, summarize(r));
  } else if (command == "eval-table") {
    const auto r = eval_table(cfg, ckpt);
    write_run(out, command, cfg, r.file, summarize(r));
    for (const auto& [name, e] : r.entries)
      std::cout << name << ": ACPR " << e.acpr_db << " dB, OBO " << e.obo_db << " dB\n";
  } else if (command == "eval-obo-acpr") {
    const auto r = eval_obo_vs_acpr(cfg, ckpt);
    write_run(out, command, cfg, r.file, summarize(r));
  }
  std::cerr << "wrote " << command << " results to " << out.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PAPR reduction experiments for oversampled OFDM"};
  app.require_subcommand(1);
  Options o;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"train", "train every learned method in the config"},
      {"eval-ber", "bit error rate against peak SNR"},
      {"eval-ccdf", "CCDF of the PAPR"},
      {"eval-psd", "amplifier output spectrum"},
      {"eval-table", "ACPR and OBO at the configured back-off"},
      {"eval-obo-acpr", "ACPR and OBO over a back-off sweep"},
      {"selftest", "run the built-in property checks"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    if (name == "selftest") continue;
    sub->add_option("--config", o.config, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--checkpoints", o.checkpoints, "directory holding <method>.ckpt (default: output directory)");
    sub->add_option("--set", o.sets, "override a config field, e.g. --set train.epochs=2")->take_all();
    sub->add_option("--seed", o.seed, "master seed");
    sub->add_option("--threads", o.threads, "Monte-Carlo worker threads");
  }
  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const TrainingError& e) {
    std::cerr << "training diverged at epoch " << e.epoch() << ": " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
