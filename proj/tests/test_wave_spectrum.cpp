#include "rhowave/wave_spectrum.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

#include "rhowave/coefficient.hpp"
#include "rhowave/errors.hpp"
#include "test_util.hpp"

using namespace rhowave;

namespace {
constexpr double kPi = std::numbers::pi;

std::shared_ptr<const EigenBasis> make_basis(double c, double a1, double b1, double a2, double b2,
                                             int count, int grid) {
  auto coeff = Coefficient::exponential(c);
  return std::make_shared<EigenBasis>(eigensolve(coeff, classify_transformed(a1, b1, a2, b2), count, grid));
}

// robin/robin dispersion root for constant potential 1 and unit ratios
double robin_root(int j) {
  double lo = j + 1e-9, hi = j + 1.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double g = mid * kPi - 2.0 * std::atan(1.0 / mid) - j * kPi;
    (g < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}
}  // namespace

TEST_CASE("periods reduce to lowest terms") {
  PeriodSpec p = reduce_period(4, 6);
  CHECK(p.a == 2);
  CHECK(p.b == 3);
  CHECK(p.T() == doctest::Approx(4.0 * kPi / 3.0));
  CHECK(p.nu(4) == doctest::Approx(6.0));
  CHECK(reduce_period(1, 1).T() == doctest::Approx(2.0 * kPi));
  expect_error(errc::invalid_period, [] { reduce_period(0, 3); });
  expect_error(errc::invalid_period, [] { reduce_period(2, -1); });
}

TEST_CASE("essential windows for the exponential profile") {
  auto c = Coefficient::exponential(1.0);
  auto consts = spectral_constants(c);
  auto w1 = essential_window(1, consts);
  CHECK(w1.lo == doctest::Approx(2.0 * (std::sqrt(2.0) - 1.0)).epsilon(1e-12));
  CHECK(w1.hi == doctest::Approx(2.0).epsilon(1e-12));
  auto w2 = essential_window(2, consts);
  CHECK(w2.lo == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(w2.hi == doctest::Approx(2.0).epsilon(1e-12));
  auto w5 = essential_window(5, spectral_constants(c, 1.0, 1.0));
  CHECK(w5.lo == doctest::Approx(2.0 * (std::sqrt(2.0) - 1.0)).epsilon(1e-12));
  CHECK(w5.hi == doctest::Approx(2.0 * (1.0 + 3.0 / kPi)).epsilon(1e-12));
  expect_error(errc::invalid_case, [&] { essential_window(5, consts); });
  expect_error(errc::assumption_a1_violated,
               [&] { essential_window(1, spectral_constants(Coefficient::exponential(0.0))); });
}

TEST_CASE("dirichlet table reproduces k^2+1-j^2 and its gaps") {
  auto basis = make_basis(1.0, 1, 0, 1, 0, 6, 512);
  auto consts = spectral_constants(Coefficient::exponential(1.0));
  auto table = build_spectrum(basis, reduce_period(1, 1), 6, consts);
  CHECK(table.kmax() == 6);
  CHECK(table.resonant());

  for (int k = 1; k <= 6; ++k)
    for (int j = 0; j <= 6; ++j)
      CHECK(table.lambda_jk(j, k) == doctest::Approx(k * k + 1.0 - j * j).epsilon(1e-7));

  for (double mu : {2.1, 3.7, 7.3, -0.4}) {
    double brute = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 6; ++k)
      for (int j = 0; j <= 6; ++j) brute = std::min(brute, std::abs(k * k + 1.0 - j * j - mu));
    CHECK(table.gap_to(mu) == doctest::Approx(brute).epsilon(1e-6));
  }

  CHECK(table.gap_to(1.0) < 1e-9);  // j = k pairs collapse onto 1
  CHECK(table.gap_to(2.0) < 1e-9);  // (j, k) = (0, 1)
  auto near = table.nearest(3.7);  // k^2+1-j^2 = 4 at (j, k) = (1, 2)
  CHECK(near.first == 1);
  CHECK(near.second == 2);
}

TEST_CASE("temporal resonance depends on the pattern and the period") {
  auto consts1 = spectral_constants(Coefficient::exponential(1.0));
  auto b1 = make_basis(1.0, 1, 0, 1, 0, 4, 256);
  auto b2 = make_basis(1.0, 1, 0, 0, 1, 4, 256);
  CHECK(build_spectrum(b1, reduce_period(3, 2), 4, consts1).resonant());
  CHECK_FALSE(build_spectrum(b2, reduce_period(1, 1), 4, consts1).resonant());
  CHECK_FALSE(build_spectrum(b2, reduce_period(3, 1), 4, consts1).resonant());
  CHECK(build_spectrum(b2, reduce_period(2, 1), 4, consts1).resonant());
}

TEST_CASE("tail certificate floors match hand computation in the dirichlet case") {
  auto basis = make_basis(1.0, 1, 0, 1, 0, 6, 512);
  auto consts = spectral_constants(Coefficient::exponential(1.0));
  auto table = build_spectrum(basis, reduce_period(1, 1), 6, consts);

  double mu = 3.7;
  auto cert = certify_accumulation(table, mu);
  CHECK(cert.theta_bar == doctest::Approx(std::sqrt(51.0) - 7.0).epsilon(1e-12));
  CHECK(cert.floor_a == doctest::Approx(mu - 37.0 + 49.0).epsilon(1e-6));
  CHECK(cert.floor_b_pos == doctest::Approx(13.0 - mu).epsilon(1e-12));
  double tb = std::sqrt(51.0) - 7.0;
  CHECK(cert.floor_b_neg == doctest::Approx(mu + (1.0 - tb) * (15.0 + tb)).epsilon(1e-9));
  CHECK(cert.floor_res == doctest::Approx(mu - 2.0).epsilon(1e-9));
  CHECK(cert.tail_floor == doctest::Approx(mu - 2.0).epsilon(1e-9));
  CHECK(cert.conclusive);

  auto rep = assess_mu(table, mu);
  CHECK(rep.admissible);
  CHECK(rep.delta == doctest::Approx(0.3).epsilon(1e-6));
  CHECK_FALSE(rep.in_spectrum);
  CHECK(rep.above_window);
}

TEST_CASE("assessment rejects window interior, spectrum points, and starved truncations") {
  auto basis = make_basis(1.0, 1, 0, 1, 0, 6, 512);
  auto consts = spectral_constants(Coefficient::exponential(1.0));
  auto table = build_spectrum(basis, reduce_period(1, 1), 6, consts);

  auto below = assess_mu(table, 1.5);
  CHECK_FALSE(below.above_window);
  CHECK_FALSE(below.admissible);
  CHECK(below.delta == doctest::Approx(0.5).epsilon(1e-6));

  auto hit = assess_mu(table, 2.0);
  CHECK(hit.in_spectrum);
  CHECK_FALSE(hit.admissible);

  auto starved = build_spectrum(basis, reduce_period(1, 1), 2, consts);
  auto rep = assess_mu(starved, 3.7);
  CHECK(rep.tail.floor_a < 0);
  CHECK_FALSE(rep.tail.conclusive);
  CHECK_FALSE(rep.admissible);
}

TEST_CASE("half-integer pattern with odd period numerator has no resonant floor") {
  auto basis = make_basis(1.0, 1, 0, 0, 1, 7, 512);
  auto consts = spectral_constants(Coefficient::exponential(1.0));
  auto table = build_spectrum(basis, reduce_period(1, 1), 7, consts);

  double mu = 2.26;
  auto cert = certify_accumulation(table, mu);
  CHECK(std::isinf(cert.floor_res));
  CHECK(cert.theta_bar == doctest::Approx(2.0 / (std::sqrt(7.5 * 7.5 + 2.0) + 7.5)).epsilon(1e-12));
  CHECK(cert.floor_a == doctest::Approx(mu - (6.5 * 6.5 + 1.0) + 64.0).epsilon(1e-6));
  CHECK(cert.floor_b_pos == doctest::Approx(0.5 * (2.0 * 7.5 - 0.5) - mu).epsilon(1e-12));
  CHECK(cert.conclusive);

  auto rep = assess_mu(table, mu);
  CHECK(rep.admissible);
  CHECK(rep.delta == doctest::Approx(0.01).epsilon(1e-5));
  CHECK(rep.j_near == 1);  // (1.5^2 + 1) - 1 = 2.25
  CHECK(rep.k_near == 1);
}

TEST_CASE("robin/robin assessment uses the threshold label from certification") {
  auto coeff = Coefficient::exponential(1.0);
  auto basis = std::make_shared<const EigenBasis>(
      eigensolve(coeff, classify_transformed(1, 1, 1, 1), 8, 512));
  auto consts = spectral_constants(coeff, 1.0, 1.0);
  auto table = build_spectrum(basis, reduce_period(1, 1), 8, consts, 1);

  double m2 = robin_root(2);
  double mu = 5.0;
  auto rep = assess_mu(table, mu);
  CHECK(rep.delta == doctest::Approx(m2 * m2 - 5.0).epsilon(1e-5));
  CHECK(rep.above_window);
  CHECK(rep.tail.conclusive);
  CHECK(rep.admissible);
  CHECK(rep.tail.floor_res == doctest::Approx(mu - 2.0 * (1.0 + 3.0 / kPi)).epsilon(1e-9));

  auto guarded = build_spectrum(basis, reduce_period(1, 1), 8, consts, 20);
  CHECK_FALSE(assess_mu(guarded, mu).tail.conclusive);
}

TEST_CASE("spectrum construction validates its inputs") {
  auto basis = make_basis(1.0, 1, 0, 1, 0, 4, 256);
  auto consts = spectral_constants(Coefficient::exponential(1.0));
  expect_error(errc::invalid_truncation,
               [&] { build_spectrum(basis, reduce_period(1, 1), -1, consts); });
  expect_error(errc::invalid_spec,
               [&] { build_spectrum(nullptr, reduce_period(1, 1), 4, consts); });
  auto table = build_spectrum(basis, reduce_period(1, 1), 4, consts);
  expect_error(errc::invalid_spec, [&] { table.lambda_sq(99); });
}
