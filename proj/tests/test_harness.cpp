#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "paprlab/error.hpp"
#include "paprlab/harness/experiments.hpp"

using namespace paprlab;
using namespace paprlab::harness;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / "paprlab_test_harness" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Small system for fast runs: N = 8, L = 4.
ExperimentConfig small_config(std::vector<std::string> extra = {}) {
  std::vector<std::string> o{"system.subcarriers=8", "eval.chunk_symbols=250", "eval.ber_symbols=1000",
                             "eval.ccdf_symbols=2000", "eval.psd_symbols=1000", "eval.table_symbols=1000",
                             "slm.sequences=8", "methods=[\"none\",\"cf\",\"slm\"]"};
  o.insert(o.end(), extra.begin(), extra.end());
  return parse_config("{}", o);
}

std::string config_error_field(const std::string& text, std::vector<std::string> overrides = {}) {
  try {
    parse_config(text, overrides);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<no error>";
}

}  // namespace

TEST_CASE("omitted fields take the published defaults") {
  const ExperimentConfig c = parse_config("{}");
  CHECK(c.system.subcarriers == 72);
  CHECK(c.system.oversampling == 4);
  CHECK(c.constellation == "qam4");
  CHECK(c.train.epochs == 160);
  CHECK(c.train.batches_per_epoch == 4375);
  CHECK(c.train.batch_size == 32);
  CHECK(c.train.optimizer.lr == 1e-3);
  CHECK(c.loss.lambda1 == 1e-4);
  CHECK(c.loss.lambda2 == 0.004);
  CHECK(c.loss.lambda3 == 0.001);
  CHECK(c.spectral.acpr_req_db == -45.0);
  CHECK(c.spectral.bw_bins == 72);
  CHECK(c.hpa.p == 2.0);
  CHECK(c.hpa.a0 == 1.0);
  CHECK(c.model.encoder_channels == std::vector<std::size_t>{13, 11});
  CHECK(c.model.decoder_channels == std::vector<std::size_t>{11, 13});
  CHECK(c.model.kernel == 3);
  CHECK(c.model.padding == 2);
  CHECK(c.model.activation == neural::ActivationKind::selu);
  CHECK(c.model.fc_hidden == std::vector<std::size_t>{2500, 3500});
  CHECK(c.cf.clip_ratio_db == 1.58);
  CHECK(c.slm_sequences == 128);
  // The spectral band follows N when not given.
  CHECK(parse_config(R"({"system": {"subcarriers": 32}})").spectral.bw_bins == 32);
}

TEST_CASE("config errors name the field") {
  CHECK(config_error_field(R"({"train": {"epoch": 3}})") == "train.epoch");
  CHECK(config_error_field(R"({"system": {"subcarriers": "many"}})") == "system.subcarriers");
  CHECK(config_error_field(R"({"system": {"subcarriers": 7}})") == "system.subcarriers");
  CHECK(config_error_field(R"({"methods": ["cae", "magic"]})") == "methods");
  CHECK(config_error_field(R"({"train": {"schedule": "sometimes"}})") == "train.schedule");
  CHECK(config_error_field(R"({"eval": {"p_snr_db": [10, 8]}})") == "eval.p_snr_db");
  CHECK(config_error_field(R"({"spectral": {"bw_bins": 72}, "system": {"oversampling": 2}})") == "spectral.bw_bins");
  CHECK(config_error_field("{}", {"train.batch_size=1"}) == "train.batch_size");
  CHECK(config_error_field("{}", {"bogus=1"}) == "bogus");
  CHECK(config_error_field("{ not json") == "<file>");
}

TEST_CASE("overrides apply before validation") {
  const ExperimentConfig c =
      parse_config(R"({"train": {"epochs": 10}})", {"train.epochs=2", "seed=99", R"(methods=["none","slm"])",
                                                     "output_dir=somewhere", "train.stage1_epochs=1"});
  CHECK(c.train.epochs == 2);
  CHECK(c.seed == 99);
  CHECK(c.methods == std::vector<Method>{Method::none, Method::slm});
  CHECK(c.output_dir == "somewhere");
}

TEST_CASE("config round trip and hash") {
  ExperimentConfig c = parse_config("{}", {"methods=[\"cae\",\"fc_ae\",\"cae_fixed\"]", "train.acpr_max=smooth",
                                           "model.layout=interleaved", "eval.p_snr_db=[0.5,7.25]"});
  const ExperimentConfig back = parse_config(serialize_config(c));
  CHECK(back == c);
  CHECK(serialize_config(back) == serialize_config(c));

  ExperimentConfig d = c;
  d.output_dir = "elsewhere";
  d.eval.threads = 4;
  CHECK(config_hash(d) == config_hash(c));
  d.seed += 1;
  CHECK(config_hash(d) != config_hash(c));
  CHECK(config_hash(c).size() == 16);
}

TEST_CASE("curve files are sorted and self-describing") {
  CurveFile f;
  f.kind = "demo";
  f.extra_columns = {"n"};
  f.config_hash = "00ff";
  f.add(2.0, 0.5, "b", {"1"});
  f.add(1.0, 0.25, "z", {"2"});
  f.add(2.0, 0.75, "a", {"3"});
  CHECK_THROWS_AS(f.add(0.0, 0.0, "x"), InputShapeError);
  f.sort();
  const std::string text = f.to_text();
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  CHECK(line == "# paprlab demo");
  std::getline(in, line);
  CHECK(line.rfind("# build: ", 0) == 0);
  std::getline(in, line);
  CHECK(line == "# config_hash: 00ff");
  std::getline(in, line);
  CHECK(line == "x,y,method,n");
  std::getline(in, line);
  CHECK(line == "1,0.25,z,2");
  std::getline(in, line);
  CHECK(line == "2,0.75,a,3");
  std::getline(in, line);
  CHECK(line == "2,0.5,b,1");
  CHECK(format_number(0.1) == "0.1");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("no-reduction PAPR at CCDF 1e-2 for N = 72, L = 4") {
  ExperimentConfig c = parse_config("{}", {"methods=[\"none\"]", "eval.ccdf_symbols=100000",
                                           "eval.ccdf_min_db=-2"});
  const CcdfResult r = eval_ccdf(c, ".");
  const double papr0 = r.papr0_db.at("none");
  CHECK(papr0 >= 9.0);
  CHECK(papr0 <= 12.0);
  // Independent read-off from the raw values.
  std::vector<double> v = r.papr_db.at("none");
  std::sort(v.begin(), v.end());
  CHECK(papr0 == doctest::Approx(v[static_cast<std::size_t>(0.99 * v.size()) - 1]).epsilon(2e-2));
  for (const auto& row : r.file.rows)
    if (row.x < 0.0) CHECK(row.y == 1.0);
}

TEST_CASE("BER is zero without noise for every reference method") {
  ExperimentConfig c = small_config();
  c.eval.p_snr_db = {std::numeric_limits<double>::infinity()};
  const BerResult r = eval_ber(c, ".");
  for (const char* m : {"none", "cf", "slm"}) {
    CAPTURE(m);
    CHECK(r.curves.at(m).at(0).errors == 0);
    CHECK(r.curves.at(m).at(0).bits == 16000);
  }
}

TEST_CASE("linear-chain BER agrees with the analytic curve") {
  ExperimentConfig c = small_config({"eval.linear_chain=true", "eval.ber_symbols=20000", "eval.chunk_symbols=2000",
                                     "eval.p_snr_db=[2,4,6,8]"});
  const BerResult r = eval_ber(c, ".");
  REQUIRE(r.curves.size() == 1);
  for (const auto& p : r.curves.at("none")) {
    CAPTURE(p.p_snr_db);
    const double g2 = std::pow(10.0, -c.hpa.ibo_db / 10.0);
    const double es_n0 = c.system.oversampling * g2 / std::pow(10.0, -p.p_snr_db / 10.0);
    const double expected = oracle::q_function(std::sqrt(es_n0));
    CHECK(linear_chain_analytic_ber(c, p.p_snr_db) == doctest::Approx(expected).epsilon(1e-12));
    const double sigma = std::sqrt(expected * (1 - expected) / static_cast<double>(p.bits));
    CHECK(std::abs(p.ber() - expected) < 3.0 * sigma);
  }
  CHECK(r.file.extra_columns.back() == "analytic");
}

TEST_CASE("PSD: Parseval, linear floor and nonlinear skirts") {
  ExperimentConfig lin = small_config({"eval.linear_chain=true"});
  const PsdResult a = eval_psd(lin, ".");
  const auto& p = a.psd.at("none");
  double total = 0.0;
  for (double v : p) total += v;
  const double expected = std::pow(10.0, -lin.hpa.ibo_db / 10.0) * lin.hpa.v * lin.hpa.v;
  CHECK(std::abs(total - expected) / expected < 1e-6);
  CHECK(a.mean_power.at("none") == doctest::Approx(total).epsilon(1e-12));
  // 32 bins, data band [12, 20).
  for (std::size_t j = 0; j < 32; ++j)
    if (j < 12 || j >= 20) CHECK(p[j] < 1e-25);
  CHECK(a.mean_power.at("ideal") == 1.0);

  const PsdResult b = eval_psd(small_config(), ".");
  const auto& q = b.psd.at("none");
  double main = 0.0, adjacent = 0.0;
  for (std::size_t j = 12; j < 20; ++j) main += q[j];
  for (std::size_t j = 20; j < 28; ++j) adjacent += q[j];
  CHECK(adjacent / main > 1e-6);
}

TEST_CASE("back-off sweep: OBO rises, ACPR falls toward the floor") {
  ExperimentConfig c = small_config({"eval.ibo_sweep_db=[0,2,4,8,16,30]"});
  const OboAcprResult r = eval_obo_vs_acpr(c, ".");
  for (const auto& [name, entries] : r.sweeps) {
    CAPTURE(name);
    REQUIRE(entries.size() == 6);
    for (std::size_t i = 1; i < entries.size(); ++i) {
      CHECK(entries[i].obo_db > entries[i - 1].obo_db);
      CHECK(entries[i].acpr_db < entries[i - 1].acpr_db);
    }
    CHECK(entries.back().acpr_db < -80.0);
  }
  const TableResult t = eval_table(c, ".");
  for (const auto& [name, e] : t.entries) CHECK(e.obo_db == doctest::Approx(c.hpa.ibo_db).epsilon(1e-9));
}

TEST_CASE("results do not depend on the worker count") {
  ExperimentConfig one = small_config({"eval.p_snr_db=[4,8]"});
  ExperimentConfig three = one;
  three.eval.threads = 3;
  CHECK(eval_ber(one, ".").file.to_text() == eval_ber(three, ".").file.to_text());
  CHECK(eval_psd(one, ".").file.to_text() == eval_psd(three, ".").file.to_text());
}

TEST_CASE("learned methods: training, checkpoints and evaluation") {
  const fs::path dir = temp_dir("learned");
  ExperimentConfig c = small_config({"methods=[\"none\",\"cae\",\"fc_ae\"]", "train.epochs=2",
                                     "train.stage1_epochs=1", "train.batches_per_epoch=5", "train.batch_size=8",
                                     "fc_ae.hidden=[16,24]", "model.encoder_channels=[3,2]",
                                     "model.decoder_channels=[2,3]"});
  SUBCASE("missing checkpoint names the method") {
    try {
      eval_ccdf(c, dir);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("'cae'") != std::string::npos);
    }
  }
  SUBCASE("train then evaluate") {
    const auto runs = run_train(c, dir);
    REQUIRE(runs.size() == 2);
    CHECK(fs::exists(checkpoint_path(dir, Method::cae)));
    CHECK(fs::exists(checkpoint_path(dir, Method::fc_ae)));
    const std::string log = read_file(train_log_path(dir, Method::cae));
    CHECK(std::count(log.begin(), log.end(), '\n') == 3 + 1 + 2);

    const BerResult b = eval_ber(c, dir);
    CHECK(b.curves.count("cae") == 1);
    CHECK(b.curves.count("fc_ae") == 1);

    // Same seed, same checkpoint bytes.
    const fs::path again = temp_dir("learned_again");
    run_train(c, again);
    CHECK(read_file(checkpoint_path(dir, Method::cae)) == read_file(checkpoint_path(again, Method::cae)));

    ExperimentConfig other = c;
    other.model.encoder_channels = {4, 2};
    CHECK_THROWS_AS(eval_ccdf(other, dir), Error);
  }
  SUBCASE("zero epochs writes an initialized model and an empty log") {
    ExperimentConfig z = c;
    z.train.epochs = 0;
    z.train.stage1_epochs = 0;
    run_train(z, dir);
    const std::string log = read_file(train_log_path(dir, Method::cae));
    CHECK(std::count(log.begin(), log.end(), '\n') == 4);
    const auto ck = load_method_checkpoint(z, dir, Method::cae);
    CHECK(ck.meta.epoch == 0);
    CHECK(ck.meta.optimizer_steps == 0);
  }
}

TEST_CASE("run output files") {
  const fs::path dir = temp_dir("write");
  ExperimentConfig c = small_config();
  const TableResult t = eval_table(c, ".");
  write_run(dir, "eval-table", c, t.file, summarize(t));
  CHECK(fs::exists(dir / "eval-table.csv"));
  const std::string summary = read_file(dir / "eval-table_summary.json");
  CHECK(summary.find("\"config_hash\": \"" + config_hash(c) + "\"") != std::string::npos);
  CHECK(summary.find("\"slm\"") != std::string::npos);
}
