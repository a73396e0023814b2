#include "paprlab/harness/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "paprlab/error.hpp"

namespace paprlab::harness {

using nlohmann::json;

namespace {

constexpr Method kAllMethods[] = {Method::none, Method::cf, Method::slm, Method::cae, Method::cae_fixed, Method::fc_ae};

// Reads fields of one JSON object, remembering which keys were used so the
// leftovers can be reported as unknown.
class Section {
 public:
  Section(const json& j, std::string path) : path_(std::move(path)) {
    if (!j.is_null() && !j.is_object()) throw ConfigError(path_, "expected an object");
    if (j.is_object()) obj_ = &j;
  }

  bool has(const char* key) const { return obj_ != nullptr && obj_->contains(key); }

  const json* get(const char* key) {
    seen_.insert(key);
    if (!has(key)) return nullptr;
    return &(*obj_)[key];
  }

  Section sub(const char* key) {
    const json* v = get(key);
    return v ? Section(*v, field(key)) : Section(json(), field(key));
  }

  template <class T>
  void num(const char* key, T& out) {
    const json* v = get(key);
    if (!v) return;
    if (!v->is_number()) throw ConfigError(field(key), "expected a number");
    if constexpr (std::is_integral_v<T>) {
      if (!v->is_number_integer()) throw ConfigError(field(key), "expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v->is_number_unsigned()) {
          out = v->get<T>();
        } else {
          const auto s = v->get<long long>();
          if (s < 0) throw ConfigError(field(key), "must be non-negative");
          out = static_cast<T>(s);
        }
      } else {
        out = v->get<T>();
      }
    } else {
      out = v->get<T>();
    }
  }

  void boolean(const char* key, bool& out) {
    const json* v = get(key);
    if (!v) return;
    if (!v->is_boolean()) throw ConfigError(field(key), "expected true or false");
    out = v->get<bool>();
  }

  void str(const char* key, std::string& out) {
    const json* v = get(key);
    if (!v) return;
    if (!v->is_string()) throw ConfigError(field(key), "expected a string");
    out = v->get<std::string>();
  }

  template <class T>
  void list(const char* key, std::vector<T>& out) {
    const json* v = get(key);
    if (!v) return;
    if (!v->is_array()) throw ConfigError(field(key), "expected a list");
    std::vector<T> r;
    for (const auto& e : *v) {
      if (!e.is_number()) throw ConfigError(field(key), "expected a list of numbers");
      if constexpr (std::is_integral_v<T>) {
        if (!e.is_number_integer() || e.get<long long>() < 0)
          throw ConfigError(field(key), "expected non-negative integers");
      }
      r.push_back(e.get<T>());
    }
    out = std::move(r);
  }

  template <class E>
  void choice(const char* key, E& out, std::initializer_list<std::pair<const char*, E>> options) {
    const json* v = get(key);
    if (!v) return;
    if (v->is_string()) {
      for (const auto& [name, value] : options) {
        if (v->get<std::string>() == name) {
          out = value;
          return;
        }
      }
    }
    std::string allowed;
    for (const auto& [name, value] : options) allowed += std::string(allowed.empty() ? "" : ", ") + name;
    throw ConfigError(field(key), "expected one of " + allowed);
  }

  void finish() const {
    if (obj_ == nullptr) return;
    for (const auto& [k, v] : obj_->items()) {
      if (!seen_.count(k)) throw ConfigError(field(k.c_str()), "unknown field");
    }
  }

  std::string field(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const json* obj_ = nullptr;
  std::string path_;
  std::set<std::string> seen_;
};

json parse_override_value(const std::string& text) {
  json v = json::parse(text, nullptr, false);
  if (v.is_discarded()) return json(text);
  return v;
}

void apply_override(json& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError(assignment, "override must look like key=value");
  const std::string key = assignment.substr(0, eq);
  json* node = &root;
  std::stringstream ss(key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    json& next = (*node)[parts[i]];
    if (next.is_null()) next = json::object();
    if (!next.is_object()) throw ConfigError(key, "override path crosses a non-object");
    node = &next;
  }
  (*node)[parts.back()] = parse_override_value(assignment.substr(eq + 1));
}

const char* layout_name(neural::ComplexLayout l) {
  return l == neural::ComplexLayout::two_channel ? "two_channel" : "interleaved";
}

}  // namespace

const char* method_name(Method m) {
  switch (m) {
    case Method::none: return "none";
    case Method::cf: return "cf";
    case Method::slm: return "slm";
    case Method::cae: return "cae";
    case Method::cae_fixed: return "cae_fixed";
    case Method::fc_ae: return "fc_ae";
  }
  return "?";
}

Method parse_method(const std::string& s) {
  for (Method m : kAllMethods) {
    if (s == method_name(m)) return m;
  }
  throw ConfigError("methods", "unknown method '" + s + "'");
}

bool is_learned(Method m) { return m == Method::cae || m == Method::cae_fixed || m == Method::fc_ae; }

std::vector<double> EvalConfig::ccdf_thresholds() const {
  std::vector<double> t;
  const auto n = static_cast<long>(std::floor((ccdf_max_db - ccdf_min_db) / ccdf_step_db + 1e-9));
  for (long i = 0; i <= n; ++i) t.push_back(ccdf_min_db + static_cast<double>(i) * ccdf_step_db);
  return t;
}

void ExperimentConfig::validate() const {
  if (system.subcarriers == 0 || system.subcarriers % 2 != 0)
    throw ConfigError("system.subcarriers", "must be even and positive");
  if (system.oversampling < 1) throw ConfigError("system.oversampling", "must be >= 1");
  if (constellation != "qam4") throw ConfigError("system.constellation", "only qam4 is supported");
  if (!(hpa.a0 > 0.0)) throw ConfigError("hpa.a0", "must be > 0");
  if (!(hpa.v > 0.0)) throw ConfigError("hpa.v", "must be > 0");
  if (!(hpa.p > 0.0)) throw ConfigError("hpa.p", "must be > 0");
  if (!std::isfinite(hpa.ibo_db)) throw ConfigError("hpa.ibo_db", "must be finite");
  if (spectral.bw_bins == 0) throw ConfigError("spectral.bw_bins", "must be positive");
  if (3 * spectral.bw_bins > system.waveform_length())
    throw ConfigError("spectral.bw_bins", "three bands of this width do not fit in L*N bins");
  train.validate();
  if (loss.lambda1 < 0 || loss.lambda2 < 0 || loss.lambda3 < 0)
    throw ConfigError("loss", "weights must be non-negative");
  if (model.kernel == 0) throw ConfigError("model.kernel", "must be positive");
  if (model.encoder_channels.empty()) throw ConfigError("model.encoder_channels", "must not be empty");
  if (model.decoder_channels.empty()) throw ConfigError("model.decoder_channels", "must not be empty");
  if (!(cf.clip_ratio_db > -100.0)) throw ConfigError("cf.clip_ratio_db", "out of range");
  if (cf.iterations < 1) throw ConfigError("cf.iterations", "must be >= 1");
  if (slm_sequences < 1) throw ConfigError("slm.sequences", "must be >= 1");
  if (methods.empty()) throw ConfigError("methods", "must not be empty");
  std::set<Method> seen;
  for (Method m : methods) {
    if (!seen.insert(m).second) throw ConfigError("methods", std::string("duplicate ") + method_name(m));
  }
  if (eval.p_snr_db.empty()) throw ConfigError("eval.p_snr_db", "must not be empty");
  for (std::size_t i = 1; i < eval.p_snr_db.size(); ++i) {
    if (!(eval.p_snr_db[i] > eval.p_snr_db[i - 1])) throw ConfigError("eval.p_snr_db", "must be increasing");
  }
  if (!(eval.ccdf_step_db > 0.0)) throw ConfigError("eval.ccdf_step_db", "must be > 0");
  if (eval.ccdf_max_db < eval.ccdf_min_db) throw ConfigError("eval.ccdf_max_db", "below ccdf_min_db");
  if (eval.chunk_symbols < 2) throw ConfigError("eval.chunk_symbols", "must be >= 2");
  if (eval.threads < 1) throw ConfigError("eval.threads", "must be >= 1");
  for (std::size_t i = 1; i < eval.ibo_sweep_db.size(); ++i) {
    if (!(eval.ibo_sweep_db[i] > eval.ibo_sweep_db[i - 1]))
      throw ConfigError("eval.ibo_sweep_db", "must be increasing");
  }
}

neural::Architecture ExperimentConfig::architecture(Method m) const {
  neural::Architecture a = model;
  a.kind = m == Method::fc_ae ? neural::ArchitectureKind::fc_ae : neural::ArchitectureKind::cae;
  a.subcarriers = system.subcarriers;
  a.oversampling = system.oversampling;
  return a;
}

neural::TrainConfig ExperimentConfig::train_config(Method m) const {
  neural::TrainConfig t = train;
  if (m == Method::cae_fixed) t.schedule = neural::Schedule::fixed;
  return t;
}

SlmParams ExperimentConfig::slm() const { return {slm_sequences, Rng::derive(seed, seed_stream::slm_table)}; }

ExperimentConfig parse_config(const std::string& json_text, const std::vector<std::string>& overrides) {
  json root = json::parse(json_text, nullptr, false, true);
  if (root.is_discarded()) throw ConfigError("<file>", "not valid JSON");
  if (root.is_null()) root = json::object();
  if (!root.is_object()) throw ConfigError("<file>", "top level must be an object");
  for (const auto& o : overrides) apply_override(root, o);

  ExperimentConfig c;
  Section top(root, "");

  Section sys = top.sub("system");
  sys.num("subcarriers", c.system.subcarriers);
  sys.num("oversampling", c.system.oversampling);
  sys.str("constellation", c.constellation);
  sys.finish();

  Section hpa = top.sub("hpa");
  hpa.num("a0", c.hpa.a0);
  hpa.num("v", c.hpa.v);
  hpa.num("p", c.hpa.p);
  hpa.num("ibo_db", c.hpa.ibo_db);
  hpa.finish();

  Section sp = top.sub("spectral");
  c.spectral.bw_bins = c.system.subcarriers;
  sp.num("bw_bins", c.spectral.bw_bins);
  sp.num("acpr_req_db", c.spectral.acpr_req_db);
  sp.finish();

  Section tr = top.sub("train");
  tr.num("epochs", c.train.epochs);
  tr.num("batches_per_epoch", c.train.batches_per_epoch);
  tr.num("batch_size", c.train.batch_size);
  tr.num("stage1_epochs", c.train.stage1_epochs);
  tr.choice("schedule", c.train.schedule,
            {{"gradual", neural::Schedule::gradual}, {"fixed", neural::Schedule::fixed}});
  tr.num("lr", c.train.optimizer.lr);
  tr.num("beta1", c.train.optimizer.beta1);
  tr.num("beta2", c.train.optimizer.beta2);
  tr.num("eps", c.train.optimizer.eps);
  tr.num("weight_decay", c.train.optimizer.weight_decay);
  {
    std::vector<double> range{c.train.snr_min_db, c.train.snr_max_db};
    tr.list("snr_range_db", range);
    if (range.size() != 2) throw ConfigError("train.snr_range_db", "expected [min, max]");
    c.train.snr_min_db = range[0];
    c.train.snr_max_db = range[1];
  }
  tr.choice("regularization", c.train.loss.regularization,
            {{"decoupled", neural::RegularizationMode::decoupled}, {"additive", neural::RegularizationMode::additive}});
  tr.choice("acpr_max", c.train.loss.acpr_max, {{"hard", AcprMax::hard}, {"smooth", AcprMax::smooth}});
  tr.choice("acpr_loss", c.train.loss.acpr_mode,
            {{"difference", neural::AcprLossMode::difference}, {"hinge", neural::AcprLossMode::hinge}});
  tr.finish();

  Section lw = top.sub("loss");
  lw.num("lambda1", c.loss.lambda1);
  lw.num("lambda2", c.loss.lambda2);
  lw.num("lambda3", c.loss.lambda3);
  lw.finish();

  Section md = top.sub("model");
  md.choice("layout", c.model.layout,
            {{"two_channel", neural::ComplexLayout::two_channel}, {"interleaved", neural::ComplexLayout::interleaved}});
  md.choice("activation", c.model.activation,
            {{"selu", neural::ActivationKind::selu}, {"relu", neural::ActivationKind::relu}});
  md.list("encoder_channels", c.model.encoder_channels);
  md.list("decoder_channels", c.model.decoder_channels);
  md.num("kernel", c.model.kernel);
  md.num("padding", c.model.padding);
  md.num("bn_eps", c.model.bn_eps);
  md.num("bn_momentum", c.model.bn_momentum);
  md.finish();

  Section fc = top.sub("fc_ae");
  fc.list("hidden", c.model.fc_hidden);
  fc.finish();

  Section cf = top.sub("cf");
  cf.num("clip_ratio_db", c.cf.clip_ratio_db);
  cf.num("iterations", c.cf.iterations);
  cf.finish();

  Section slm = top.sub("slm");
  slm.num("sequences", c.slm_sequences);
  slm.finish();

  if (const json* m = top.get("methods")) {
    if (!m->is_array()) throw ConfigError("methods", "expected a list of method names");
    c.methods.clear();
    for (const auto& e : *m) {
      if (!e.is_string()) throw ConfigError("methods", "expected a list of method names");
      c.methods.push_back(parse_method(e.get<std::string>()));
    }
  }

  Section ev = top.sub("eval");
  ev.list("p_snr_db", c.eval.p_snr_db);
  ev.num("ber_symbols", c.eval.ber_symbols);
  ev.num("ccdf_min_db", c.eval.ccdf_min_db);
  ev.num("ccdf_max_db", c.eval.ccdf_max_db);
  ev.num("ccdf_step_db", c.eval.ccdf_step_db);
  ev.num("ccdf_symbols", c.eval.ccdf_symbols);
  ev.num("psd_symbols", c.eval.psd_symbols);
  ev.num("table_symbols", c.eval.table_symbols);
  ev.list("ibo_sweep_db", c.eval.ibo_sweep_db);
  ev.num("chunk_symbols", c.eval.chunk_symbols);
  ev.boolean("linear_chain", c.eval.linear_chain);
  ev.num("threads", c.eval.threads);
  ev.finish();

  top.num("seed", c.seed);
  top.str("output_dir", c.output_dir);
  top.finish();

  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

namespace {

json to_json(const ExperimentConfig& c) {
  json j;
  j["system"] = {{"subcarriers", c.system.subcarriers},
                 {"oversampling", c.system.oversampling},
                 {"constellation", c.constellation}};
  j["hpa"] = {{"a0", c.hpa.a0}, {"v", c.hpa.v}, {"p", c.hpa.p}, {"ibo_db", c.hpa.ibo_db}};
  j["spectral"] = {{"bw_bins", c.spectral.bw_bins}, {"acpr_req_db", c.spectral.acpr_req_db}};
  const auto& t = c.train;
  j["train"] = {
      {"epochs", t.epochs},
      {"batches_per_epoch", t.batches_per_epoch},
      {"batch_size", t.batch_size},
      {"stage1_epochs", t.stage1_epochs},
      {"schedule", t.schedule == neural::Schedule::gradual ? "gradual" : "fixed"},
      {"lr", t.optimizer.lr},
      {"beta1", t.optimizer.beta1},
      {"beta2", t.optimizer.beta2},
      {"eps", t.optimizer.eps},
      {"weight_decay", t.optimizer.weight_decay},
      {"snr_range_db", {t.snr_min_db, t.snr_max_db}},
      {"regularization", t.loss.regularization == neural::RegularizationMode::decoupled ? "decoupled" : "additive"},
      {"acpr_max", t.loss.acpr_max == AcprMax::hard ? "hard" : "smooth"},
      {"acpr_loss", t.loss.acpr_mode == neural::AcprLossMode::difference ? "difference" : "hinge"}};
  j["loss"] = {{"lambda1", c.loss.lambda1}, {"lambda2", c.loss.lambda2}, {"lambda3", c.loss.lambda3}};
  j["model"] = {{"layout", layout_name(c.model.layout)},
                {"activation", c.model.activation == neural::ActivationKind::selu ? "selu" : "relu"},
                {"encoder_channels", c.model.encoder_channels},
                {"decoder_channels", c.model.decoder_channels},
                {"kernel", c.model.kernel},
                {"padding", c.model.padding},
                {"bn_eps", c.model.bn_eps},
                {"bn_momentum", c.model.bn_momentum}};
  j["fc_ae"] = {{"hidden", c.model.fc_hidden}};
  j["cf"] = {{"clip_ratio_db", c.cf.clip_ratio_db}, {"iterations", c.cf.iterations}};
  j["slm"] = {{"sequences", c.slm_sequences}};
  json methods = json::array();
  for (Method m : c.methods) methods.push_back(method_name(m));
  j["methods"] = methods;
  const auto& e = c.eval;
  j["eval"] = {{"p_snr_db", e.p_snr_db},
               {"ber_symbols", e.ber_symbols},
               {"ccdf_min_db", e.ccdf_min_db},
               {"ccdf_max_db", e.ccdf_max_db},
               {"ccdf_step_db", e.ccdf_step_db},
               {"ccdf_symbols", e.ccdf_symbols},
               {"psd_symbols", e.psd_symbols},
               {"table_symbols", e.table_symbols},
               {"ibo_sweep_db", e.ibo_sweep_db},
               {"chunk_symbols", e.chunk_symbols},
               {"linear_chain", e.linear_chain},
               {"threads", e.threads}};
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  return j;
}

}  // namespace

std::string serialize_config(const ExperimentConfig& c) { return to_json(c).dump(2) + "\n"; }

std::string canonical_config(const ExperimentConfig& c) {
  json j = to_json(c);
  j.erase("output_dir");
  j["eval"].erase("threads");
  return j.dump(2) + "\n";
}

std::string config_hash(const ExperimentConfig& c) {
  const std::string s = canonical_config(c);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace paprlab::harness
