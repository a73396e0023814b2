#include "paprlab/harness/experiments.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <ostream>
#include <thread>

#include "json.hpp"
#include "paprlab/error.hpp"
#include "paprlab/ofdm.hpp"

namespace paprlab::harness {

using nlohmann::json;
namespace fs = std::filesystem;

fs::path checkpoint_path(const fs::path& dir, Method m) { return dir / (std::string(method_name(m)) + ".ckpt"); }

fs::path train_log_path(const fs::path& dir, Method m) {
  return dir / (std::string(method_name(m)) + "_train_log.csv");
}

neural::LoadedCheckpoint load_method_checkpoint(const ExperimentConfig& cfg, const fs::path& dir, Method m) {
  const fs::path p = checkpoint_path(dir, m);
  if (!fs::exists(p))
    throw Error(std::string("missing checkpoint for method '") + method_name(m) + "': " + p.string());
  neural::LoadedCheckpoint ck = neural::load_checkpoint(p);
  if (!(ck.model.architecture() == cfg.architecture(m)))
    throw Error(std::string("checkpoint for method '") + method_name(m) +
                "' does not match the configured architecture: " + p.string());
  return ck;
}

namespace {

neural::ChainContext make_context(const ExperimentConfig& cfg) {
  neural::ChainContext ctx;
  ctx.system = cfg.system;
  ctx.hpa = cfg.hpa;
  ctx.spectral = cfg.spectral;
  ctx.linear_pa = cfg.eval.linear_chain;
  return ctx;
}

std::vector<Method> eval_methods(const ExperimentConfig& cfg) {
  if (cfg.eval.linear_chain) return {Method::none};
  return cfg.methods;
}

std::uint64_t chunk_seed(const ExperimentConfig& cfg, std::uint64_t stream, std::size_t chunk) {
  return Rng::derive(Rng::derive(cfg.seed, stream), chunk);
}

std::size_t chunk_count(std::size_t total, std::size_t chunk) { return (total + chunk - 1) / chunk; }

std::size_t chunk_rows(std::size_t total, std::size_t chunk, std::size_t c) {
  return std::min(chunk, total - c * chunk);
}

// Produces the band-limited, unit-power waveform x_f of one method and
// recovers symbol estimates from the channel output.
class Transmitter {
 public:
  Transmitter(const ExperimentConfig& cfg, Method m, const fs::path& checkpoints)
      : cfg_(cfg), method_(m), identity_(neural::AutoencoderModel::identity(cfg.system.subcarriers,
                                                                             cfg.system.oversampling)) {
    if (is_learned(m)) model_.emplace(load_method_checkpoint(cfg, checkpoints, m).model);
    if (m == Method::slm) table_.emplace(cfg.slm(), cfg.system.subcarriers);
  }

  ComplexBatch transmit(const ComplexBatch& symbols, const neural::ChainContext& ctx) {
    const int l = cfg_.system.oversampling;
    const std::size_t n = cfg_.system.subcarriers;
    switch (method_) {
      case Method::none: {
        ComplexBatch x = ofdm_modulate(symbols, l);
        power_normalize_in_place(x);
        bpf_in_place(x, n);
        return x;
      }
      case Method::cf: {
        ComplexBatch x = ofdm_modulate(symbols, l);
        for (std::size_t r = 0; r < x.rows(); ++r) clip_filter_in_place(x.row(r), cfg_.cf, n);
        return x;
      }
      case Method::slm: {
        ComplexBatch x(symbols.rows(), cfg_.system.waveform_length());
        slm_index_.assign(symbols.rows(), 0);
        for (std::size_t r = 0; r < symbols.rows(); ++r) {
          const auto row = symbols.row(r);
          const SlmResult res = slm_select(SymbolBlock{{row.begin(), row.end()}}, *table_, l);
          std::copy(res.wave.samples.begin(), res.wave.samples.end(), x.row(r).begin());
          slm_index_[r] = res.index;
        }
        power_normalize_in_place(x);
        return x;
      }
      default:
        return neural::transmit(*model_, symbols, ctx, neural::Mode::eval).x_f;
    }
  }

  ComplexBatch receive(const ComplexBatch& x_f, const neural::ChainContext& ctx, Rng& noise) {
    neural::ChainTaps taps;
    taps.x_f = x_f;
    neural::receive(model_ ? *model_ : identity_, taps, ctx, noise, neural::Mode::eval);
    if (method_ == Method::slm) {
      for (std::size_t r = 0; r < taps.decoded.rows(); ++r) slm_derotate(taps.decoded.row(r), *table_, slm_index_[r]);
    }
    return std::move(taps.decoded);
  }

 private:
  const ExperimentConfig& cfg_;
  Method method_;
  neural::AutoencoderModel identity_;
  std::optional<neural::AutoencoderModel> model_;
  std::optional<SlmPhaseTable> table_;
  std::vector<std::size_t> slm_index_;
};

// Runs fn(worker, chunk) for every chunk on up to `threads` workers, each
// owning one make() result. Results land at their chunk index.
template <class Make, class Fn>
auto run_chunks(std::size_t n, int threads, Make make, Fn fn) {
  using W = decltype(make());
  using R = decltype(fn(std::declval<W&>(), std::size_t{}));
  std::vector<R> out(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex mu;
  auto work = [&] {
    try {
      W w = make();
      for (std::size_t i; (i = next.fetch_add(1)) < n;) out[i] = fn(w, i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (!error) error = std::current_exception();
      next.store(n);
    }
  };
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

ComplexBatch chunk_symbols(const ExperimentConfig& cfg, std::uint64_t stream, std::size_t total, std::size_t c,
                           std::vector<std::uint8_t>* bits = nullptr) {
  Rng data(chunk_seed(cfg, stream, c));
  return neural::random_symbols(data, chunk_rows(total, cfg.eval.chunk_symbols, c), cfg.system.subcarriers, bits);
}

struct Amplified {
  ComplexBatch pa_in;
  ComplexBatch out;
};

Amplified amplify(const ComplexBatch& x_f, const HpaParams& hpa, bool linear) {
  Amplified a{x_f, {}};
  apply_ibo_in_place(a.pa_in, hpa);
  if (linear) {
    a.out = a.pa_in;
    for (auto& z : a.out.data()) z *= hpa.v;
  } else {
    a.out = rapp_amplify(a.pa_in, hpa);
  }
  return a;
}

// Accumulated spectrum and amplifier-input power over a run.
struct SpectrumAccumulator {
  std::vector<double> psd_sum;
  double pa_in_power_sum = 0.0;
  std::size_t rows = 0;

  void add(const Amplified& a) {
    const std::vector<double> p = psd(a.out);
    if (psd_sum.empty()) psd_sum.assign(p.size(), 0.0);
    const auto r = static_cast<double>(a.out.rows());
    for (std::size_t i = 0; i < p.size(); ++i) psd_sum[i] += p[i] * r;
    pa_in_power_sum += mean_power(a.pa_in) * r;
    rows += a.out.rows();
  }
  void merge(const SpectrumAccumulator& o) {
    if (psd_sum.empty()) psd_sum.assign(o.psd_sum.size(), 0.0);
    for (std::size_t i = 0; i < o.psd_sum.size(); ++i) psd_sum[i] += o.psd_sum[i];
    pa_in_power_sum += o.pa_in_power_sum;
    rows += o.rows;
  }
  std::vector<double> mean_psd() const {
    std::vector<double> p = psd_sum;
    for (auto& v : p) v /= static_cast<double>(rows);
    return p;
  }
  TableEntry entry(const ExperimentConfig& cfg) const {
    const double p_in = pa_in_power_sum / static_cast<double>(rows);
    if (!(p_in > 0.0)) throw DegenerateInputError("obo: zero amplifier input power");
    return {acpr_db(mean_psd(), cfg.spectral), to_db(cfg.hpa.a0 * cfg.hpa.a0 / p_in)};
  }
};

std::string count_text(std::uint64_t v) { return std::to_string(v); }

json config_json(const ExperimentConfig& cfg) { return json::parse(canonical_config(cfg)); }

}  // namespace

double BerPoint::half_width() const {
  if (bits == 0) return 0.0;
  const double p = ber();
  return 1.959963984540054 * std::sqrt(p * (1.0 - p) / static_cast<double>(bits));
}

std::vector<TrainRun> run_train(const ExperimentConfig& cfg, const fs::path& out, std::ostream* progress) {
  std::vector<TrainRun> runs;
  const neural::ChainContext ctx = [&] {
    neural::ChainContext c = make_context(cfg);
    c.linear_pa = false;
    return c;
  }();
  for (Method m : cfg.methods) {
    if (!is_learned(m)) continue;
    neural::AutoencoderModel model(cfg.architecture(m));
    model.initialize(Rng::derive(cfg.seed, seed_stream::model_init));
    const neural::TrainConfig tc = cfg.train_config(m);

    CurveFile log_file;
    log_file.kind = std::string("train_log ") + method_name(m);
    log_file.config_hash = config_hash(cfg);
    std::string body = "epoch,stage,loss,l1,mse,l2,l3,mean_papr_db,acpr_db\n";
    auto on_epoch = [&](const neural::EpochLog& e) {
      const char* stage = e.stage == neural::LossStage::reconstruction ? "reconstruction" : "joint";
      body += std::to_string(e.epoch) + "," + stage + "," + format_number(e.loss) + "," + format_number(e.l1) + "," +
              format_number(e.mse) + "," + format_number(e.l2) + "," + format_number(e.l3) + "," +
              format_number(e.mean_papr_db) + "," + format_number(e.acpr_db) + "\n";
      if (progress != nullptr) {
        *progress << method_name(m) << " epoch " << (e.epoch + 1) << "/" << tc.epochs << " " << stage
                  << " loss " << e.loss << " mse " << e.mse << " papr " << e.mean_papr_db << " dB acpr "
                  << e.acpr_db << " dB\n"
                  << std::flush;
      }
    };
    TrainRun run{m, neural::train(model, tc, cfg.loss, ctx, Rng::derive(cfg.seed, seed_stream::training), on_epoch)};

    fs::create_directories(out);
    neural::save_checkpoint(checkpoint_path(out, m), model,
                            {cfg.seed, tc.epochs, run.result.optimizer_steps});
    // Header lines match the curve files; the body has its own columns.
    std::string header = log_file.to_text();
    header = header.substr(0, header.find("x,y,method"));
    write_text(train_log_path(out, m), header + body);
    runs.push_back(std::move(run));
  }
  return runs;
}

double linear_chain_analytic_ber(const ExperimentConfig& cfg, double p_snr_db) {
  const double var = noise_variance(p_snr_db, cfg.hpa);
  if (var == 0.0) return 0.0;
  const double gain = ibo_gain(cfg.hpa) * cfg.hpa.v;
  const double es_n0 = cfg.system.oversampling * gain * gain / var;
  return 0.5 * std::erfc(std::sqrt(es_n0 / 2.0));
}

BerResult eval_ber(const ExperimentConfig& cfg, const fs::path& checkpoints) {
  BerResult result;
  result.file.kind = "ber";
  result.file.x_name = "p_snr_db";
  result.file.y_name = "ber";
  result.file.extra_columns = {"symbols", "bits", "errors", "half_width"};
  if (cfg.eval.linear_chain) result.file.extra_columns.push_back("analytic");
  result.file.config_hash = config_hash(cfg);

  const neural::ChainContext base = make_context(cfg);
  const std::size_t total = cfg.eval.ber_symbols;
  const std::size_t chunks = chunk_count(total, cfg.eval.chunk_symbols);
  const std::size_t points = cfg.eval.p_snr_db.size();
  const ConstellationSpec qam = ConstellationSpec::qam4();

  for (Method m : eval_methods(cfg)) {
    auto per_chunk = run_chunks(
        chunks, cfg.eval.threads, [&] { return Transmitter(cfg, m, checkpoints); },
        [&](Transmitter& tx, std::size_t c) {
          std::vector<std::uint8_t> bits;
          const ComplexBatch symbols = chunk_symbols(cfg, seed_stream::ber, total, c, &bits);
          neural::ChainContext ctx = base;
          const ComplexBatch x_f = tx.transmit(symbols, ctx);
          std::vector<BerPoint> pts(points);
          for (std::size_t i = 0; i < points; ++i) {
            ctx.p_snr_db = cfg.eval.p_snr_db[i];
            Rng noise(Rng::derive(chunk_seed(cfg, seed_stream::ber, c), 1 + i));
            const ComplexBatch decoded = tx.receive(x_f, ctx, noise);
            const auto detected = ml_detect(std::span<const cplx>(decoded.data()), qam);
            pts[i].symbols = symbols.rows();
            pts[i].bits = bits.size();
            pts[i].errors = bit_errors(bits, detected);
          }
          return pts;
        });
    std::vector<BerPoint> curve(points);
    for (std::size_t i = 0; i < points; ++i) {
      curve[i].p_snr_db = cfg.eval.p_snr_db[i];
      for (const auto& chunk : per_chunk) {
        curve[i].symbols += chunk[i].symbols;
        curve[i].bits += chunk[i].bits;
        curve[i].errors += chunk[i].errors;
      }
      std::vector<std::string> extras{count_text(curve[i].symbols), count_text(curve[i].bits),
                                      count_text(curve[i].errors), format_number(curve[i].half_width())};
      if (cfg.eval.linear_chain) extras.push_back(format_number(linear_chain_analytic_ber(cfg, curve[i].p_snr_db)));
      result.file.add(curve[i].p_snr_db, curve[i].ber(), method_name(m), std::move(extras));
    }
    result.curves[method_name(m)] = std::move(curve);
  }
  result.file.sort();
  return result;
}

CcdfResult eval_ccdf(const ExperimentConfig& cfg, const fs::path& checkpoints) {
  CcdfResult result;
  result.file.kind = "ccdf";
  result.file.x_name = "papr_db";
  result.file.y_name = "ccdf";
  result.file.config_hash = config_hash(cfg);
  const neural::ChainContext ctx = make_context(cfg);
  const std::size_t total = cfg.eval.ccdf_symbols;
  const std::size_t chunks = chunk_count(total, cfg.eval.chunk_symbols);
  const std::vector<double> thresholds = cfg.eval.ccdf_thresholds();

  for (Method m : eval_methods(cfg)) {
    auto per_chunk = run_chunks(
        chunks, cfg.eval.threads, [&] { return Transmitter(cfg, m, checkpoints); },
        [&](Transmitter& tx, std::size_t c) {
          const ComplexBatch x_f = tx.transmit(chunk_symbols(cfg, seed_stream::ccdf, total, c), ctx);
          std::vector<double> v(x_f.rows());
          for (std::size_t r = 0; r < x_f.rows(); ++r) v[r] = papr_db(x_f.row(r));
          return v;
        });
    std::vector<double> values;
    values.reserve(total);
    for (const auto& chunk : per_chunk) values.insert(values.end(), chunk.begin(), chunk.end());
    const CcdfCurve curve = ccdf(values, thresholds);
    for (std::size_t i = 0; i < thresholds.size(); ++i)
      result.file.add(curve.thresholds_db[i], curve.probabilities[i], method_name(m));
    result.papr0_db[method_name(m)] = exceedance_level(values, 1e-2);
    result.papr_db[method_name(m)] = std::move(values);
  }
  result.file.sort();
  return result;
}

PsdResult eval_psd(const ExperimentConfig& cfg, const fs::path& checkpoints) {
  PsdResult result;
  result.file.kind = "psd";
  result.file.x_name = "freq";
  result.file.y_name = "psd_db";
  result.file.extra_columns = {"psd"};
  result.file.config_hash = config_hash(cfg);
  const neural::ChainContext ctx = make_context(cfg);
  const std::size_t total = cfg.eval.psd_symbols;
  const std::size_t chunks = chunk_count(total, cfg.eval.chunk_symbols);
  const std::size_t m_len = cfg.system.waveform_length();
  const auto n = static_cast<double>(cfg.system.subcarriers);

  // x: offset from the carrier in units of the occupied bandwidth (N bins),
  // so the band edges sit at +-0.5. y: PSD relative to the
  // method's total power, in dB. "psd": absolute periodogram value.
  auto emit = [&](const std::string& name, const std::vector<double>& p) {
    double total_power = 0.0;
    for (double v : p) total_power += v;
    for (std::size_t j = 0; j < m_len; ++j) {
      const double x = (static_cast<double>(j) - static_cast<double>(m_len / 2)) / n;
      const double rel = total_power > 0.0 ? p[j] / total_power : 0.0;
      result.file.add(x, rel > 0.0 ? std::max(to_db(rel), kAcprFloorDb) : kAcprFloorDb, name,
                      {format_number(p[j])});
    }
  };

  for (Method m : eval_methods(cfg)) {
    auto per_chunk = run_chunks(
        chunks, cfg.eval.threads, [&] { return Transmitter(cfg, m, checkpoints); },
        [&](Transmitter& tx, std::size_t c) {
          SpectrumAccumulator acc;
          acc.add(amplify(tx.transmit(chunk_symbols(cfg, seed_stream::psd, total, c), ctx), cfg.hpa, ctx.linear_pa));
          return acc;
        });
    SpectrumAccumulator acc;
    for (const auto& chunk : per_chunk) acc.merge(chunk);
    std::vector<double> p = acc.mean_psd();
    double power = 0.0;
    for (double v : p) power += v;
    emit(method_name(m), p);
    result.mean_power[method_name(m)] = power;
    result.psd[method_name(m)] = std::move(p);
  }

  // Unit-power rectangle over the data band.
  std::vector<double> ideal(m_len, 0.0);
  const std::size_t lo = m_len / 2 - cfg.system.subcarriers / 2;
  for (std::size_t j = lo; j < lo + cfg.system.subcarriers; ++j) ideal[j] = 1.0 / n;
  emit("ideal", ideal);
  result.mean_power["ideal"] = 1.0;
  result.psd["ideal"] = std::move(ideal);
  result.file.sort();
  return result;
}

TableResult eval_table(const ExperimentConfig& cfg, const fs::path& checkpoints) {
  TableResult result;
  result.file.kind = "table";
  result.file.x_name = "acpr_db";
  result.file.y_name = "obo_db";
  result.file.config_hash = config_hash(cfg);
  const neural::ChainContext ctx = make_context(cfg);
  const std::size_t total = cfg.eval.table_symbols;
  const std::size_t chunks = chunk_count(total, cfg.eval.chunk_symbols);

  for (Method m : eval_methods(cfg)) {
    auto per_chunk = run_chunks(
        chunks, cfg.eval.threads, [&] { return Transmitter(cfg, m, checkpoints); },
        [&](Transmitter& tx, std::size_t c) {
          SpectrumAccumulator acc;
          acc.add(
              amplify(tx.transmit(chunk_symbols(cfg, seed_stream::table, total, c), ctx), cfg.hpa, ctx.linear_pa));
          return acc;
        });
    SpectrumAccumulator acc;
    for (const auto& chunk : per_chunk) acc.merge(chunk);
    const TableEntry e = acc.entry(cfg);
    result.entries[method_name(m)] = e;
    result.file.add(e.acpr_db, e.obo_db, method_name(m));
  }
  result.file.sort();
  return result;
}

OboAcprResult eval_obo_vs_acpr(const ExperimentConfig& cfg, const fs::path& checkpoints) {
  OboAcprResult result;
  result.file.kind = "obo_acpr";
  result.file.x_name = "acpr_db";
  result.file.y_name = "obo_db";
  result.file.extra_columns = {"ibo_db"};
  result.file.config_hash = config_hash(cfg);
  const neural::ChainContext ctx = make_context(cfg);
  const std::size_t total = cfg.eval.table_symbols;
  const std::size_t chunks = chunk_count(total, cfg.eval.chunk_symbols);
  const auto& sweep = cfg.eval.ibo_sweep_db;

  for (Method m : eval_methods(cfg)) {
    auto per_chunk = run_chunks(
        chunks, cfg.eval.threads, [&] { return Transmitter(cfg, m, checkpoints); },
        [&](Transmitter& tx, std::size_t c) {
          const ComplexBatch x_f = tx.transmit(chunk_symbols(cfg, seed_stream::obo_acpr, total, c), ctx);
          std::vector<SpectrumAccumulator> accs(sweep.size());
          for (std::size_t i = 0; i < sweep.size(); ++i) {
            HpaParams hpa = cfg.hpa;
            hpa.ibo_db = sweep[i];
            accs[i].add(amplify(x_f, hpa, ctx.linear_pa));
          }
          return accs;
        });
    std::vector<TableEntry> entries;
    for (std::size_t i = 0; i < sweep.size(); ++i) {
      SpectrumAccumulator acc;
      for (const auto& chunk : per_chunk) acc.merge(chunk[i]);
      entries.push_back(acc.entry(cfg));
      result.file.add(entries.back().acpr_db, entries.back().obo_db, method_name(m), {format_number(sweep[i])});
    }
    result.sweeps[method_name(m)] = std::move(entries);
  }
  result.file.sort();
  return result;
}

void write_run(const fs::path& out, const std::string& command, const ExperimentConfig& cfg, const CurveFile& file,
               const std::string& summary_json_body) {
  if (!file.kind.empty()) file.write(out / (command + ".csv"));
  json s;
  s["command"] = command;
  s["build"] = build_id();
  s["config_hash"] = config_hash(cfg);
  s["config"] = config_json(cfg);
  s["results"] = json::parse(summary_json_body);
  write_text(out / (command + "_summary.json"), s.dump(2) + "\n");
}

namespace {

json table_json(const TableEntry& e) { return {{"acpr_db", e.acpr_db}, {"obo_db", e.obo_db}}; }

}  // namespace

std::string summarize(const BerResult& r) {
  json j = json::object();
  for (const auto& [name, curve] : r.curves) {
    json pts = json::array();
    for (const auto& p : curve) {
      pts.push_back({{"p_snr_db", p.p_snr_db},
                     {"symbols", p.symbols},
                     {"bits", p.bits},
                     {"errors", p.errors},
                     {"ber", p.ber()},
                     {"half_width", p.half_width()}});
    }
    j[name] = pts;
  }
  return j.dump();
}

std::string summarize(const CcdfResult& r) {
  json j = json::object();
  for (const auto& [name, v] : r.papr0_db) j[name] = {{"papr0_db_at_1e-2", v}, {"symbols", r.papr_db.at(name).size()}};
  return j.dump();
}

std::string summarize(const PsdResult& r) {
  json j = json::object();
  for (const auto& [name, p] : r.mean_power) j[name] = {{"mean_power", p}};
  return j.dump();
}

std::string summarize(const TableResult& r) {
  json j = json::object();
  for (const auto& [name, e] : r.entries) j[name] = table_json(e);
  return j.dump();
}

std::string summarize(const OboAcprResult& r) {
  json j = json::object();
  for (const auto& [name, entries] : r.sweeps) {
    json arr = json::array();
    for (const auto& e : entries) arr.push_back(table_json(e));
    j[name] = arr;
  }
  return j.dump();
}

}  // namespace paprlab::harness
