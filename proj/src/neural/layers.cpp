#include "paprlab/neural/layers.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "paprlab/error.hpp"
#include "paprlab/simd/kernels.hpp"

namespace paprlab::neural {
namespace {

void normal_fill(std::vector<double>& v, double stddev, Rng& rng) {
  for (auto& x : v) x = stddev * rng.normal();
}

// Output positions t in [lo, hi) for which input index t + k - padding is
// inside [0, in_len).
struct TapRange {
  std::ptrdiff_t lo, hi;
};

TapRange tap_range(std::size_t k, std::size_t padding, std::size_t in_len, std::size_t out_len) {
  const auto sk = static_cast<std::ptrdiff_t>(k);
  const auto sp = static_cast<std::ptrdiff_t>(padding);
  const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, sp - sk);
  const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(out_len),
                                                     static_cast<std::ptrdiff_t>(in_len) + sp - sk);
  return {lo, hi};
}

}  // namespace

// ---------------------------------------------------------------- Conv1d

Conv1d::Conv1d(std::string name, std::size_t in_channels, std::size_t out_channels, std::size_t kernel,
               std::size_t padding)
    : in_ch_(in_channels),
      out_ch_(out_channels),
      kernel_(kernel),
      padding_(padding),
      weight_(name + ".weight", {out_channels, in_channels, kernel}, true),
      bias_(name + ".bias", {out_channels}, false) {}

std::size_t Conv1d::output_length(std::size_t input_length) const {
  return input_length + 2 * padding_ - kernel_ + 1;
}

void Conv1d::initialize(Rng& rng) {
  normal_fill(weight_.value, 1.0 / std::sqrt(static_cast<double>(in_ch_ * kernel_)), rng);
  std::fill(bias_.value.begin(), bias_.value.end(), 0.0);
}

Tensor Conv1d::forward(const Tensor& in, Mode) {
  if (in.channels != in_ch_) throw InputShapeError("conv1d: input channel count does not match weights");
  if (in.length + 2 * padding_ < kernel_) throw InputShapeError("conv1d: input shorter than kernel");
  input_ = in;
  const std::size_t out_len = output_length(in.length);
  Tensor out(in.batch, out_ch_, out_len);
  const auto& k = simd::active();
  for (std::size_t b = 0; b < in.batch; ++b) {
    for (std::size_t o = 0; o < out_ch_; ++o) {
      auto row = out.row(b, o);
      std::fill(row.begin(), row.end(), bias_.value[o]);
      for (std::size_t i = 0; i < in_ch_; ++i) {
        const double* src = in.row(b, i).data();
        for (std::size_t t = 0; t < kernel_; ++t) {
          const double w = weight_.value[(o * in_ch_ + i) * kernel_ + t];
          const TapRange r = tap_range(t, padding_, in.length, out_len);
          if (r.hi <= r.lo) continue;
          k.axpy(w, src + (r.lo + static_cast<std::ptrdiff_t>(t) - static_cast<std::ptrdiff_t>(padding_)),
                 row.data() + r.lo, static_cast<std::size_t>(r.hi - r.lo));
        }
      }
    }
  }
  return out;
}

Tensor Conv1d::backward(const Tensor& grad_out) {
  const Tensor& in = input_;
  const std::size_t out_len = output_length(in.length);
  if (grad_out.channels != out_ch_ || grad_out.length != out_len || grad_out.batch != in.batch)
    throw InputShapeError("conv1d: gradient shape mismatch");
  Tensor grad_in(in.batch, in_ch_, in.length);
  const auto& k = simd::active();
  for (std::size_t b = 0; b < in.batch; ++b) {
    for (std::size_t o = 0; o < out_ch_; ++o) {
      const double* g = grad_out.row(b, o).data();
      double gsum = 0.0;
      for (std::size_t t = 0; t < out_len; ++t) gsum += g[t];
      bias_.grad[o] += gsum;
      for (std::size_t i = 0; i < in_ch_; ++i) {
        const double* src = in.row(b, i).data();
        double* dst = grad_in.row(b, i).data();
        for (std::size_t t = 0; t < kernel_; ++t) {
          const std::size_t widx = (o * in_ch_ + i) * kernel_ + t;
          const TapRange r = tap_range(t, padding_, in.length, out_len);
          if (r.hi <= r.lo) continue;
          const auto n = static_cast<std::size_t>(r.hi - r.lo);
          const std::ptrdiff_t off = r.lo + static_cast<std::ptrdiff_t>(t) - static_cast<std::ptrdiff_t>(padding_);
          weight_.grad[widx] += k.dot(g + r.lo, src + off, n);
          k.axpy(weight_.value[widx], g + r.lo, dst + off, n);
        }
      }
    }
  }
  return grad_in;
}

std::string Conv1d::describe() const {
  return "conv1d(" + std::to_string(in_ch_) + "->" + std::to_string(out_ch_) + ", k=" + std::to_string(kernel_) +
         ", pad=" + std::to_string(padding_) + ")";
}

// ----------------------------------------------------------- BatchNorm1d

BatchNorm1d::BatchNorm1d(std::string name, std::size_t channels, double eps, double momentum)
    : channels_(channels),
      eps_(eps),
      momentum_(momentum),
      gamma_(name + ".gamma", {channels}, false),
      beta_(name + ".beta", {channels}, false),
      running_mean_{name + ".running_mean", std::vector<double>(channels, 0.0)},
      running_var_{name + ".running_var", std::vector<double>(channels, 1.0)} {
  std::fill(gamma_.value.begin(), gamma_.value.end(), 1.0);
}

void BatchNorm1d::initialize(Rng&) {
  std::fill(gamma_.value.begin(), gamma_.value.end(), 1.0);
  std::fill(beta_.value.begin(), beta_.value.end(), 0.0);
  std::fill(running_mean_.value.begin(), running_mean_.value.end(), 0.0);
  std::fill(running_var_.value.begin(), running_var_.value.end(), 1.0);
}

Tensor BatchNorm1d::forward(const Tensor& in, Mode mode) {
  if (in.channels != channels_) throw InputShapeError("batchnorm: channel count mismatch");
  if (mode == Mode::train && in.batch < 2)
    throw ConfigError("batch_size", "batch norm needs at least 2 samples per batch in training mode");
  last_mode_ = mode;
  xhat_ = Tensor(in.batch, in.channels, in.length);
  inv_std_.assign(channels_, 0.0);
  Tensor out(in.batch, in.channels, in.length);
  const double n = static_cast<double>(in.batch * in.length);
  for (std::size_t c = 0; c < channels_; ++c) {
    double mean, var;
    if (mode == Mode::train) {
      double s = 0.0;
      for (std::size_t b = 0; b < in.batch; ++b)
        for (double x : in.row(b, c)) s += x;
      mean = s / n;
      double ss = 0.0;
      for (std::size_t b = 0; b < in.batch; ++b)
        for (double x : in.row(b, c)) ss += (x - mean) * (x - mean);
      var = ss / n;
      running_mean_.value[c] = (1.0 - momentum_) * running_mean_.value[c] + momentum_ * mean;
      const double unbiased = n > 1.0 ? var * n / (n - 1.0) : var;
      running_var_.value[c] = (1.0 - momentum_) * running_var_.value[c] + momentum_ * unbiased;
    } else {
      mean = running_mean_.value[c];
      var = running_var_.value[c];
    }
    const double inv = 1.0 / std::sqrt(var + eps_);
    inv_std_[c] = inv;
    const double g = gamma_.value[c], be = beta_.value[c];
    for (std::size_t b = 0; b < in.batch; ++b) {
      auto x = in.row(b, c);
      auto xh = xhat_.row(b, c);
      auto y = out.row(b, c);
      for (std::size_t t = 0; t < in.length; ++t) {
        xh[t] = (x[t] - mean) * inv;
        y[t] = g * xh[t] + be;
      }
    }
  }
  return out;
}

Tensor BatchNorm1d::backward(const Tensor& grad_out) {
  const std::size_t batch = xhat_.batch, len = xhat_.length;
  if (grad_out.batch != batch || grad_out.channels != channels_ || grad_out.length != len)
    throw InputShapeError("batchnorm: gradient shape mismatch");
  Tensor grad_in(batch, channels_, len);
  const double n = static_cast<double>(batch * len);
  for (std::size_t c = 0; c < channels_; ++c) {
    double sum_g = 0.0, sum_gx = 0.0;
    for (std::size_t b = 0; b < batch; ++b) {
      auto g = grad_out.row(b, c);
      auto xh = xhat_.row(b, c);
      for (std::size_t t = 0; t < len; ++t) {
        sum_g += g[t];
        sum_gx += g[t] * xh[t];
      }
    }
    gamma_.grad[c] += sum_gx;
    beta_.grad[c] += sum_g;
    const double gm = gamma_.value[c], inv = inv_std_[c];
    for (std::size_t b = 0; b < batch; ++b) {
      auto g = grad_out.row(b, c);
      auto xh = xhat_.row(b, c);
      auto dx = grad_in.row(b, c);
      if (last_mode_ == Mode::train) {
        // dx = gamma*inv/n * (n*g - sum(g) - xhat*sum(g*xhat))
        for (std::size_t t = 0; t < len; ++t) dx[t] = gm * inv / n * (n * g[t] - sum_g - xh[t] * sum_gx);
      } else {
        for (std::size_t t = 0; t < len; ++t) dx[t] = gm * inv * g[t];
      }
    }
  }
  return grad_in;
}

std::string BatchNorm1d::describe() const { return "batchnorm(" + std::to_string(channels_) + ")"; }

// ------------------------------------------------------------ Activation

double selu(double x) { return x > 0.0 ? kSeluScale * x : kSeluScale * kSeluAlpha * std::expm1(x); }

Tensor Activation::forward(const Tensor& in, Mode) {
  input_ = in;
  Tensor out = in;
  if (kind_ == ActivationKind::selu) {
    for (auto& x : out.values) x = selu(x);
  } else {
    for (auto& x : out.values) x = x > 0.0 ? x : 0.0;
  }
  return out;
}

Tensor Activation::backward(const Tensor& grad_out) {
  if (grad_out.size() != input_.size()) throw InputShapeError("activation: gradient shape mismatch");
  Tensor grad_in = grad_out;
  for (std::size_t i = 0; i < grad_in.size(); ++i) {
    const double x = input_.values[i];
    if (kind_ == ActivationKind::selu) {
      grad_in.values[i] *= x > 0.0 ? kSeluScale : kSeluScale * kSeluAlpha * std::exp(x);
    } else {
      grad_in.values[i] *= x > 0.0 ? 1.0 : 0.0;
    }
  }
  return grad_in;
}

std::string Activation::describe() const { return kind_ == ActivationKind::selu ? "selu" : "relu"; }

// ---------------------------------------------------------------- Linear

Linear::Linear(std::string name, std::size_t in_features, std::size_t out_features)
    : in_(in_features),
      out_(out_features),
      weight_(name + ".weight", {out_features, in_features}, true),
      bias_(name + ".bias", {out_features}, false) {}

void Linear::initialize(Rng& rng) {
  normal_fill(weight_.value, 1.0 / std::sqrt(static_cast<double>(in_)), rng);
  std::fill(bias_.value.begin(), bias_.value.end(), 0.0);
}

Tensor Linear::forward(const Tensor& in, Mode) {
  if (in.sample_size() != in_) throw InputShapeError("linear: input feature count does not match weights");
  input_ = in;
  in_channels_ = in.channels;
  in_length_ = in.length;
  Tensor out(in.batch, 1, out_);
  const auto& k = simd::active();
  for (std::size_t o = 0; o < out_; ++o) {
    const double* w = weight_.value.data() + o * in_;
    for (std::size_t b = 0; b < in.batch; ++b)
      out.values[b * out_ + o] = bias_.value[o] + k.dot(w, in.sample(b).data(), in_);
  }
  return out;
}

Tensor Linear::backward(const Tensor& grad_out) {
  if (grad_out.batch != input_.batch || grad_out.sample_size() != out_)
    throw InputShapeError("linear: gradient shape mismatch");
  Tensor grad_in(input_.batch, in_channels_, in_length_);
  const auto& k = simd::active();
  for (std::size_t o = 0; o < out_; ++o) {
    const double* w = weight_.value.data() + o * in_;
    double* dw = weight_.grad.data() + o * in_;
    for (std::size_t b = 0; b < input_.batch; ++b) {
      const double g = grad_out.values[b * out_ + o];
      if (g == 0.0) continue;
      bias_.grad[o] += g;
      k.axpy(g, w, grad_in.sample(b).data(), in_);
      k.axpy(g, input_.sample(b).data(), dw, in_);
    }
  }
  return grad_in;
}

std::string Linear::describe() const {
  return "linear(" + std::to_string(in_) + "->" + std::to_string(out_) + ")";
}

// ------------------------------------------------------------ Sequential

Tensor Sequential::forward(const Tensor& in, Mode mode) {
  Tensor x = in;
  for (auto& l : layers_) x = l->forward(x, mode);
  return x;
}

Tensor Sequential::backward(const Tensor& grad_out) {
  Tensor g = grad_out;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
  return g;
}

std::vector<Parameter*> Sequential::parameters() {
  std::vector<Parameter*> out;
  for (auto& l : layers_)
    for (auto* p : l->parameters()) out.push_back(p);
  return out;
}

std::vector<Buffer*> Sequential::buffers() {
  std::vector<Buffer*> out;
  for (auto& l : layers_)
    for (auto* b : l->buffers()) out.push_back(b);
  return out;
}

void Sequential::initialize(Rng& rng) {
  for (auto& l : layers_) l->initialize(rng);
}

}  // namespace paprlab::neural
