#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "paprlab/error.hpp"
#include "paprlab/frontend.hpp"
#include "paprlab/metrics.hpp"
#include "paprlab/ofdm.hpp"

using namespace paprlab;

namespace {

ComplexBatch random_batch(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  ComplexBatch b(rows, cols);
  for (auto& z : b.data()) z = {rng.normal(), rng.normal()};
  return b;
}

}  // namespace

TEST_CASE("PAPR of the all-ones block equals N") {
  for (std::size_t n : {8, 64, 72}) {
    const std::vector<cplx> ones(n, cplx(1.0, 0.0));
    CHECK(papr(ofdm_modulate(SymbolBlock{ones}, 1)) == doctest::Approx(static_cast<double>(n)).epsilon(1e-12));
    CHECK(papr(ofdm_modulate(SymbolBlock{ones}, 4)) == doctest::Approx(static_cast<double>(n)).epsilon(1e-12));
  }
}

TEST_CASE("PAPR basics") {
  std::vector<cplx> one_tone(8, cplx(0, 0));
  one_tone[1] = cplx(1, 0);
  CHECK(papr(ofdm_modulate(SymbolBlock{one_tone}, 4)) == doctest::Approx(1.0).epsilon(1e-12));
  const std::vector<cplx> zero(16);
  CHECK_THROWS_AS(papr(zero), DegenerateInputError);
  const auto x = random_batch(1, 32, 1);
  const std::vector<cplx> v(x.data());
  CHECK(papr(x.row(0)) == doctest::Approx(oracle::papr(v)).epsilon(1e-14));
  CHECK(papr_db(x.row(0)) == doctest::Approx(10.0 * std::log10(oracle::papr(v))).epsilon(1e-14));
}

TEST_CASE("PAPR gradient matches central differences") {
  auto x = random_batch(1, 32, 2);
  std::vector<cplx> grad(32);
  papr_with_grad(x.row(0), grad);
  auto f = [&] { return papr(x.row(0)); };
  for (std::size_t i : {0u, 5u, 17u, 31u}) {
    auto* re = reinterpret_cast<double*>(&x.data()[i]);
    CHECK(oracle::relative_error(grad[i].real(), oracle::central_difference(f, re[0], 1e-6)) < 1e-4);
    CHECK(oracle::relative_error(grad[i].imag(), oracle::central_difference(f, re[1], 1e-6)) < 1e-4);
  }
  // The peak sample carries the positive part of the gradient.
  std::size_t peak = 0;
  for (std::size_t i = 0; i < 32; ++i)
    if (std::norm(x.data()[i]) > std::norm(x.data()[peak])) peak = i;
  auto* re = reinterpret_cast<double*>(&x.data()[peak]);
  CHECK(oracle::relative_error(grad[peak].real(), oracle::central_difference(f, re[0], 1e-7)) < 1e-4);
}

TEST_CASE("CCDF") {
  const std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const std::vector<double> t{-1, 0, 2.5, 9.5, 10};
  const CcdfCurve c = ccdf(v, t);
  CHECK(c.probabilities == std::vector<double>{1.0, 1.0, 0.8, 0.1, 0.0});
  for (std::size_t i = 1; i < c.probabilities.size(); ++i) CHECK(c.probabilities[i] <= c.probabilities[i - 1]);
  CHECK(exceedance_level(v, 0.1) == 9.0);
  CHECK(exceedance_level(v, 0.0) == 10.0);
  CHECK(exceedance_level(v, 1.0) == 1.0);
}

TEST_CASE("PSD is an averaged periodogram that sums to the mean power") {
  const auto x = random_batch(5, 32, 3);
  const auto p = psd(x);
  REQUIRE(p.size() == 32);
  double total = 0.0;
  for (double e : p) total += e;
  CHECK(total == doctest::Approx(mean_power(x)).epsilon(1e-12));

  std::vector<double> ref(32, 0.0);
  for (std::size_t r = 0; r < 5; ++r) {
    const auto spec = oracle::dft(std::vector<cplx>(x.row(r).begin(), x.row(r).end()));
    for (std::size_t b = 0; b < 32; ++b) ref[(b + 16) % 32] += std::norm(spec[b]) / (32.0 * 32.0 * 5.0);
  }
  for (std::size_t j = 0; j < 32; ++j) CHECK(p[j] == doctest::Approx(ref[j]).epsilon(1e-12));
}

TEST_CASE("band powers and ACPR on a synthetic spectrum") {
  // N = 8, L = 4: shifted spectrum of 32 bins, main band [12, 20).
  SpectralParams sp{8, -45.0};
  std::vector<double> p(32, 0.0);
  for (std::size_t j = 12; j < 20; ++j) p[j] = 1.0;
  p[21] = 0.08;  // upper band
  p[5] = 0.02;   // lower band
  const BandPowers b = band_powers(p, sp);
  CHECK(b.main == 8.0);
  CHECK(b.upper == doctest::Approx(0.08));
  CHECK(b.lower == doctest::Approx(0.02));
  CHECK(acpr_db(p, sp) == doctest::Approx(10.0 * std::log10(0.01)));

  p[21] = p[5] = 0.0;
  CHECK(acpr_db(p, sp) == kAcprFloorDb);
  const std::vector<double> short_psd(16, 1.0);
  CHECK_THROWS_AS(band_powers(short_psd, sp), ParameterError);  // L = 2
}

TEST_CASE("ACPR of a band-limited waveform sits at the floor") {
  ComplexBatch syms = random_batch(4, 8, 4);
  const ComplexBatch x = ofdm_modulate(syms, 4);
  CHECK(acpr_db(psd(x), {8, -45.0}) < -150.0);
}

TEST_CASE("ACPR gradient matches central differences") {
  ComplexBatch x = ofdm_modulate(random_batch(3, 8, 5), 4);
  HpaParams hpa;
  x = rapp_amplify(x, hpa);  // out-of-band skirts
  const SpectralParams sp{8, -45.0};
  for (AcprMax mode : {AcprMax::hard, AcprMax::smooth}) {
    CAPTURE(static_cast<int>(mode));
    ComplexBatch g;
    acpr_db_with_grad(x, sp, mode, &g);
    auto f = [&] { return acpr_db_with_grad(x, sp, mode, nullptr); };
    for (std::size_t i : {0u, 7u, 40u, 95u}) {
      auto* re = reinterpret_cast<double*>(&x.data()[i]);
      CHECK(oracle::relative_error(g.data()[i].real(), oracle::central_difference(f, re[0], 1e-6), 1e-6) < 1e-4);
      CHECK(oracle::relative_error(g.data()[i].imag(), oracle::central_difference(f, re[1], 1e-6), 1e-6) < 1e-4);
    }
  }
}

TEST_CASE("smooth ACPR bounds the hard one from above") {
  ComplexBatch x = rapp_amplify(ofdm_modulate(random_batch(3, 8, 6), 4), HpaParams{});
  const SpectralParams sp{8, -45.0};
  const double hard = acpr_db_with_grad(x, sp, AcprMax::hard, nullptr);
  const double smooth = acpr_db_with_grad(x, sp, AcprMax::smooth, nullptr);
  CHECK(hard == doctest::Approx(acpr_db(psd(x), sp)).epsilon(1e-12));
  CHECK(smooth >= hard);
  CHECK(smooth - hard <= std::log(2.0) / kAcprSmoothness + 1e-12);
}

TEST_CASE("OBO after a 3 dB back-off of a unit-power batch") {
  ComplexBatch x = power_normalize(random_batch(4, 32, 7));
  HpaParams hpa;
  hpa.ibo_db = 3.0;
  apply_ibo_in_place(x, hpa);
  CHECK(obo_db(x, hpa.a0) == doctest::Approx(3.0).epsilon(1e-12));
  ComplexBatch zero(1, 4);
  CHECK_THROWS_AS(obo_db(zero, 1.0), DegenerateInputError);
}

TEST_CASE("bit error counting") {
  const std::vector<std::uint8_t> a{0, 1, 1, 0, 1, 0, 0, 0};
  const std::vector<std::uint8_t> b{0, 1, 0, 0, 1, 1, 0, 0};
  CHECK(bit_errors(a, b) == 2);
  CHECK(ber(a, b) == 0.25);
  const std::vector<std::uint8_t> c{0};
  CHECK_THROWS_AS(ber(a, c), InputShapeError);
}

TEST_CASE("dB helpers") {
  CHECK(to_db(100.0) == doctest::Approx(20.0));
  CHECK(from_db(-3.0) == doctest::Approx(std::pow(10.0, -0.3)));
}
