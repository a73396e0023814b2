#include <cmath>

#include "doctest.h"
#include "paprlab/channel.hpp"
#include "paprlab/error.hpp"
#include "paprlab/metrics.hpp"
#include "paprlab/ofdm.hpp"

using namespace paprlab;

TEST_CASE("noise variance follows the peak SNR definition") {
  HpaParams hpa;
  CHECK(noise_variance(10.0, hpa) == doctest::Approx(0.1));
  hpa.a0 = 2.0;
  CHECK(noise_variance(0.0, hpa) == doctest::Approx(4.0));
  CHECK(noise_variance(ChannelParams::kNoiseless, hpa) == 0.0);
}

TEST_CASE("AWGN statistics") {
  const std::size_t n = 400000;
  TimeWaveform zero{std::vector<cplx>(n), Stage::amplified};
  ChannelParams ch{3.0, 42};
  HpaParams hpa;
  const TimeWaveform y = awgn(zero, ch, hpa);
  CHECK(y.stage == Stage::received);
  const double var = noise_variance(3.0, hpa);
  double re2 = 0.0, im2 = 0.0, cross = 0.0;
  cplx mean = 0.0;
  for (auto z : y.samples) {
    re2 += z.real() * z.real();
    im2 += z.imag() * z.imag();
    cross += z.real() * z.imag();
    mean += z;
  }
  const double dn = static_cast<double>(n);
  // Each statistic has relative standard error ~ sqrt(2/n) ~ 2.2e-3.
  CHECK(re2 / dn == doctest::Approx(var / 2).epsilon(0.015));
  CHECK(im2 / dn == doctest::Approx(var / 2).epsilon(0.015));
  CHECK(std::abs(cross / dn) < 0.01 * var);
  CHECK(std::abs(mean / dn) < 0.01 * std::sqrt(var));

  // Same seed, same noise; different seed, different noise.
  CHECK(awgn(zero, ch, hpa).samples == y.samples);
  ch.rng_seed = 43;
  CHECK(awgn(zero, ch, hpa).samples != y.samples);
  ch.p_snr_db = ChannelParams::kNoiseless;
  CHECK(awgn(zero, ch, hpa).samples == zero.samples);
}

TEST_CASE("noise per data bin after demodulation has variance sigma^2 / L") {
  const std::size_t n = 64;
  const int l = 4;
  const double var = 0.5;
  Rng rng(7);
  double acc = 0.0;
  const int trials = 2000;
  for (int t = 0; t < trials; ++t) {
    std::vector<cplx> w(n * l);
    add_awgn(w, var, rng);
    std::vector<cplx> bins(n);
    ofdm_demodulate(w, l, bins);
    for (auto z : bins) acc += std::norm(z);
  }
  CHECK(acc / (trials * static_cast<double>(n)) == doctest::Approx(var / l).epsilon(0.01));
}

TEST_CASE("compensation divides by alpha") {
  TimeWaveform w{{cplx(2, 0), cplx(0, 4)}, Stage::received};
  const TimeWaveform c = compensate(w, {cplx(2, 0)});
  CHECK(c.samples[0] == cplx(1, 0));
  CHECK(c.samples[1] == cplx(0, 2));
  CHECK_THROWS_AS(compensate(w, {cplx(0, 0)}), DegenerateInputError);
}
