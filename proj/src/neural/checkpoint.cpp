#include "paprlab/neural/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "paprlab/error.hpp"

namespace paprlab::neural {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[16] = {'P', 'A', 'P', 'R', 'L', 'A', 'B', '-', 'C', 'K', 'P', 'T', 0, 0, 0, 0};

std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::vector<std::size_t> split_sizes(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoull(item));
  }
  return out;
}

class Writer {
 public:
  explicit Writer(const std::filesystem::path& p) : out_(p, std::ios::binary | std::ios::trunc) {
    if (!out_) throw Error("cannot open checkpoint for writing: " + p.string());
  }
  template <class T>
  void pod(const T& v) { out_.write(reinterpret_cast<const char*>(&v), sizeof(T)); }
  void str(const std::string& s) {
    pod(static_cast<std::uint32_t>(s.size()));
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  void doubles(const std::vector<double>& v) {
    out_.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  }
  void finish() {
    out_.flush();
    if (!out_) throw Error("checkpoint write failed");
  }

 private:
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& p) : in_(p, std::ios::binary) {
    if (!in_) throw Error("cannot open checkpoint: " + p.string());
  }
  template <class T>
  T pod() {
    T v{};
    in_.read(reinterpret_cast<char*>(&v), sizeof(T));
    check();
    return v;
  }
  std::string str() {
    const auto n = pod<std::uint32_t>();
    if (n > (1u << 20)) throw Error("corrupt checkpoint: string length");
    std::string s(n, '\0');
    in_.read(s.data(), n);
    check();
    return s;
  }
  void doubles(std::vector<double>& v) {
    in_.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
    check();
  }
  void raw(char* p, std::size_t n) {
    in_.read(p, static_cast<std::streamsize>(n));
    check();
  }

 private:
  void check() {
    if (!in_) throw Error("truncated checkpoint");
  }
  std::ifstream in_;
};

}  // namespace

std::string describe_architecture(const Architecture& a) {
  std::ostringstream os;
  os << "kind=" << (a.kind == ArchitectureKind::cae ? "cae" : "fc_ae") << '\n'
     << "subcarriers=" << a.subcarriers << '\n'
     << "oversampling=" << a.oversampling << '\n'
     << "activation=" << (a.activation == ActivationKind::selu ? "selu" : "relu") << '\n'
     << "layout=" << (a.layout == ComplexLayout::two_channel ? "two_channel" : "interleaved") << '\n'
     << "encoder_channels=" << join(a.encoder_channels) << '\n'
     << "decoder_channels=" << join(a.decoder_channels) << '\n'
     << "kernel=" << a.kernel << '\n'
     << "padding=" << a.padding << '\n'
     << "fc_hidden=" << join(a.fc_hidden) << '\n';
  os.precision(17);
  os << "bn_eps=" << a.bn_eps << '\n' << "bn_momentum=" << a.bn_momentum << '\n';
  return os.str();
}

Architecture parse_architecture(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto get = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw Error(std::string("checkpoint architecture lacks '") + key + "'");
    return it->second;
  };
  Architecture a;
  const std::string& kind = get("kind");
  if (kind == "cae") a.kind = ArchitectureKind::cae;
  else if (kind == "fc_ae") a.kind = ArchitectureKind::fc_ae;
  else throw Error("checkpoint architecture: unknown kind " + kind);
  a.subcarriers = std::stoull(get("subcarriers"));
  a.oversampling = std::stoi(get("oversampling"));
  a.activation = get("activation") == "relu" ? ActivationKind::relu : ActivationKind::selu;
  a.layout = get("layout") == "interleaved" ? ComplexLayout::interleaved : ComplexLayout::two_channel;
  a.encoder_channels = split_sizes(get("encoder_channels"));
  a.decoder_channels = split_sizes(get("decoder_channels"));
  a.kernel = std::stoull(get("kernel"));
  a.padding = std::stoull(get("padding"));
  a.fc_hidden = split_sizes(get("fc_hidden"));
  a.bn_eps = std::stod(get("bn_eps"));
  a.bn_momentum = std::stod(get("bn_momentum"));
  return a;
}

void save_checkpoint(const std::filesystem::path& path, AutoencoderModel& model, const CheckpointMeta& meta) {
  Writer w(path);
  for (char c : kMagic) w.pod(c);
  w.pod(kCheckpointVersion);
  w.str(describe_architecture(model.architecture()));
  w.pod(meta.seed);
  w.pod(static_cast<std::int32_t>(meta.epoch));
  w.pod(meta.optimizer_steps);

  const auto params = model.parameters();
  w.pod(static_cast<std::uint32_t>(params.size()));
  for (const Parameter* p : params) {
    w.str(p->name);
    w.pod(static_cast<std::uint32_t>(p->shape.size()));
    for (auto d : p->shape) w.pod(static_cast<std::uint64_t>(d));
    w.pod(static_cast<std::uint8_t>(p->decay ? 1 : 0));
    w.doubles(p->value);
    w.doubles(p->m);
    w.doubles(p->v);
  }
  const auto bufs = model.buffers();
  w.pod(static_cast<std::uint32_t>(bufs.size()));
  for (const Buffer* b : bufs) {
    w.str(b->name);
    w.pod(static_cast<std::uint64_t>(b->value.size()));
    w.doubles(b->value);
  }
  w.finish();
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  Reader r(path);
  char magic[16];
  r.raw(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof magic) != 0) throw Error("not a checkpoint file: " + path.string());
  const auto version = r.pod<std::uint32_t>();
  if (version != kCheckpointVersion)
    throw Error("unsupported checkpoint version " + std::to_string(version));

  LoadedCheckpoint out{AutoencoderModel(parse_architecture(r.str())), {}};
  out.meta.seed = r.pod<std::uint64_t>();
  out.meta.epoch = r.pod<std::int32_t>();
  out.meta.optimizer_steps = r.pod<std::uint64_t>();

  const auto params = out.model.parameters();
  if (r.pod<std::uint32_t>() != params.size()) throw Error("checkpoint parameter count mismatch");
  for (Parameter* p : params) {
    if (r.str() != p->name) throw Error("checkpoint parameter name mismatch at " + p->name);
    const auto rank = r.pod<std::uint32_t>();
    if (rank != p->shape.size()) throw Error("checkpoint shape mismatch at " + p->name);
    for (auto d : p->shape) {
      if (r.pod<std::uint64_t>() != d) throw Error("checkpoint shape mismatch at " + p->name);
    }
    p->decay = r.pod<std::uint8_t>() != 0;
    r.doubles(p->value);
    r.doubles(p->m);
    r.doubles(p->v);
  }
  const auto bufs = out.model.buffers();
  if (r.pod<std::uint32_t>() != bufs.size()) throw Error("checkpoint buffer count mismatch");
  for (Buffer* b : bufs) {
    if (r.str() != b->name) throw Error("checkpoint buffer name mismatch at " + b->name);
    if (r.pod<std::uint64_t>() != b->value.size()) throw Error("checkpoint buffer size mismatch at " + b->name);
    r.doubles(b->value);
  }
  return out;
}

}  // namespace paprlab::neural
