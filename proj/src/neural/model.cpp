#include "paprlab/neural/model.hpp"

#include "paprlab/error.hpp"

namespace paprlab::neural {

std::size_t input_channels(ComplexLayout layout) { return layout == ComplexLayout::two_channel ? 2 : 1; }

namespace {

std::size_t real_length(std::size_t complex_len, ComplexLayout layout) {
  return layout == ComplexLayout::two_channel ? complex_len : 2 * complex_len;
}

void build_conv_stack(Sequential& s, const std::string& prefix, const Architecture& a,
                      const std::vector<std::size_t>& channels, std::size_t complex_len) {
  std::size_t ch = input_channels(a.layout);
  std::size_t len = real_length(complex_len, a.layout);
  for (std::size_t i = 0; i < channels.size(); ++i) {
    const std::string name = prefix + ".conv" + std::to_string(i + 1);
    auto& conv = s.add<Conv1d>(name, ch, channels[i], a.kernel, a.padding);
    len = conv.output_length(len);
    ch = channels[i];
    s.add<BatchNorm1d>(prefix + ".bn" + std::to_string(i + 1), ch, a.bn_eps, a.bn_momentum);
    s.add<Activation>(a.activation);
  }
  s.add<Linear>(prefix + ".fc", ch * len, 2 * complex_len);
}

void build_fc_stack(Sequential& s, const std::string& prefix, const Architecture& a, std::size_t complex_len) {
  std::size_t width = 2 * complex_len;
  for (std::size_t i = 0; i < a.fc_hidden.size(); ++i) {
    s.add<Linear>(prefix + ".fc" + std::to_string(i + 1), width, a.fc_hidden[i]);
    s.add<Activation>(a.activation);
    width = a.fc_hidden[i];
  }
  s.add<Linear>(prefix + ".out", width, 2 * complex_len);
}

}  // namespace

AutoencoderModel::AutoencoderModel(Architecture arch) : arch_(std::move(arch)) {
  if (arch_.subcarriers == 0 || arch_.subcarriers % 2 != 0)
    throw ConfigError("system.subcarriers", "must be even and positive");
  if (arch_.oversampling < 1) throw ConfigError("system.oversampling", "must be >= 1");
  const std::size_t m = arch_.waveform_length();
  if (arch_.kind == ArchitectureKind::cae) {
    if (arch_.kernel == 0) throw ConfigError("model.kernel", "must be positive");
    build_conv_stack(encoder_, "enc", arch_, arch_.encoder_channels, m);
    build_conv_stack(decoder_, "dec", arch_, arch_.decoder_channels, arch_.subcarriers);
  } else {
    build_fc_stack(encoder_, "enc", arch_, m);
    build_fc_stack(decoder_, "dec", arch_, arch_.subcarriers);
  }
}

AutoencoderModel AutoencoderModel::identity(std::size_t subcarriers, int oversampling, ComplexLayout layout) {
  AutoencoderModel m;
  m.arch_.subcarriers = subcarriers;
  m.arch_.oversampling = oversampling;
  m.arch_.layout = layout;
  m.arch_.encoder_channels.clear();
  m.arch_.decoder_channels.clear();
  m.arch_.fc_hidden.clear();
  return m;
}

std::vector<Parameter*> AutoencoderModel::parameters() {
  auto p = encoder_.parameters();
  for (auto* q : decoder_.parameters()) p.push_back(q);
  return p;
}

std::vector<Buffer*> AutoencoderModel::buffers() {
  auto b = encoder_.buffers();
  for (auto* q : decoder_.buffers()) b.push_back(q);
  return b;
}

void AutoencoderModel::initialize(std::uint64_t seed) {
  Rng rng(seed);
  encoder_.initialize(rng);
  decoder_.initialize(rng);
  for (auto* p : parameters()) {
    std::fill(p->m.begin(), p->m.end(), 0.0);
    std::fill(p->v.begin(), p->v.end(), 0.0);
    p->zero_grad();
  }
}

void AutoencoderModel::zero_grad() {
  for (auto* p : parameters()) p->zero_grad();
}

std::size_t AutoencoderModel::parameter_count() {
  std::size_t n = 0;
  for (auto* p : parameters()) n += p->size();
  return n;
}

std::size_t AutoencoderModel::transmitter_conv_weight_count() {
  std::size_t n = 0;
  for (std::size_t i = 0; i < encoder_.size(); ++i)
    if (auto* conv = dynamic_cast<Conv1d*>(&encoder_.layer(i))) n += conv->weight().size();
  return n;
}

AutoencoderModel make_cae_model(std::size_t subcarriers, int oversampling) {
  Architecture a;
  a.subcarriers = subcarriers;
  a.oversampling = oversampling;
  return AutoencoderModel(a);
}

AutoencoderModel make_fc_ae_model(std::size_t subcarriers, int oversampling, std::vector<std::size_t> hidden) {
  Architecture a;
  a.kind = ArchitectureKind::fc_ae;
  a.subcarriers = subcarriers;
  a.oversampling = oversampling;
  a.fc_hidden = std::move(hidden);
  a.encoder_channels.clear();
  a.decoder_channels.clear();
  return AutoencoderModel(a);
}

Tensor to_tensor(const ComplexBatch& batch, ComplexLayout layout) {
  const std::size_t n = batch.cols();
  if (layout == ComplexLayout::two_channel) {
    Tensor t(batch.rows(), 2, n);
    for (std::size_t b = 0; b < batch.rows(); ++b) {
      auto re = t.row(b, 0);
      auto im = t.row(b, 1);
      auto z = batch.row(b);
      for (std::size_t i = 0; i < n; ++i) {
        re[i] = z[i].real();
        im[i] = z[i].imag();
      }
    }
    return t;
  }
  Tensor t(batch.rows(), 1, 2 * n);
  const auto src = as_reals(std::span<const cplx>(batch.data()));
  std::copy(src.begin(), src.end(), t.values.begin());
  return t;
}

ComplexBatch from_tensor(const Tensor& t, ComplexLayout layout) {
  const std::size_t s = t.sample_size();
  if (s % 2 != 0) throw InputShapeError("from_tensor: odd feature count");
  const std::size_t n = s / 2;
  ComplexBatch out(t.batch, n);
  for (std::size_t b = 0; b < t.batch; ++b) {
    auto x = t.sample(b);
    auto z = out.row(b);
    if (layout == ComplexLayout::two_channel) {
      for (std::size_t i = 0; i < n; ++i) z[i] = {x[i], x[n + i]};
    } else {
      for (std::size_t i = 0; i < n; ++i) z[i] = {x[2 * i], x[2 * i + 1]};
    }
  }
  return out;
}

}  // namespace paprlab::neural
