#include "rhowave/variational.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "rhowave/coefficient.hpp"
#include "rhowave/errors.hpp"
#include "test_util.hpp"

using namespace rhowave;

namespace {
constexpr double kPi = std::numbers::pi;

std::shared_ptr<const SpectrumTable> make_table(double c, int a1, int b1, int a2, int b2,
                                                int count, int jmax, int grid) {
  auto coeff = Coefficient::exponential(c);
  auto basis = std::make_shared<const EigenBasis>(
      eigensolve(coeff, classify_transformed(a1, b1, a2, b2), count, grid));
  return std::make_shared<const SpectrumTable>(
      build_spectrum(basis, reduce_period(1, 1), jmax, spectral_constants(coeff)));
}

CoeffField random_field(const WorkingSpace& ws, unsigned seed, double amp = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-amp, amp);
  CoeffField u = ws.zero();
  for (auto& v : u.a) v = unif(rng);
  return u;
}

double simpson(double a, double b, int panels, const std::function<double(double)>& f) {
  double h = (b - a) / (2 * panels), s = f(a) + f(b);
  for (int i = 1; i < 2 * panels; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}
}  // namespace

TEST_CASE("odd power nonlinearity and primitive at reference points") {
  CHECK(f_eval(0.0, 0.5) == 0.0);
  CHECK(F_eval(0.0, 0.5) == 0.0);
  CHECK(f_eval(4.0, 0.5) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(F_eval(4.0, 0.5) == doctest::Approx(16.0 / 3.0).epsilon(1e-15));
  CHECK(f_eval(-4.0, 0.5) == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(F_eval(-4.0, 0.5) == F_eval(4.0, 0.5));
  CHECK(std::abs(f_eval(1e-12, 0.7)) < 1e-8);
  CHECK(df_eval(4.0, 0.5) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(df_eval(0.0, 0.5, 1e-8) == doctest::Approx(0.5e4).epsilon(1e-12));
}

TEST_CASE("upper critical level follows the closed formula") {
  CHECK(rho_from_zeta(0.5, 0.5) == doctest::Approx(1.0 / 384.0).epsilon(1e-14));
  for (double p : {0.3, 0.5, 0.8}) {
    double z = 0.73;
    double shrink = rho_from_zeta(z / 2, p) / rho_from_zeta(z, p);
    CHECK(shrink == doctest::Approx(std::pow(2.0, -2.0 * (p + 1.0) / (1.0 - p))).epsilon(1e-12));
  }
}

TEST_CASE("action vanishes at zero, is even, and splits by sign exactly") {
  auto table = make_table(1.0, 1, 0, 1, 0, 6, 6, 256);
  Functional fn(table, 2.5, 0.5, 52);
  const WorkingSpace& ws = fn.space();

  CHECK(fn.value(ws.zero()) == 0.0);

  CoeffField u = random_field(ws, 5);
  CoeffField nu = u;
  nu.scale(-1.0);
  CHECK(fn.value(nu) == doctest::Approx(fn.value(u)).epsilon(1e-14));

  CoeffField up = u, um = u;
  ws.project_sign(up, +1);
  ws.project_sign(um, -1);
  CHECK(fn.quadratic(up) == -0.5 * ws.energy_sq(up));
  CHECK(fn.quadratic(um) == 0.5 * ws.energy_sq(um));
  CHECK(fn.quadratic(u) ==
        doctest::Approx(0.5 * ws.energy_sq(um) - 0.5 * ws.energy_sq(up)).epsilon(1e-13));
}

TEST_CASE("single negative mode splits into exact quadratic plus checked quadrature") {
  auto table = make_table(1.0, 1, 0, 1, 0, 6, 6, 512);
  Functional fn(table, 2.5, 0.5, 52);
  CoeffField u = fn.space().zero();
  u.c(1, table->basis().index_of_label(1)) = 1.0;

  CHECK(fn.quadratic(u) == doctest::Approx(0.75).epsilon(1e-9));
  double nonlin = fn.value(u) - fn.quadratic(u);
  CHECK(nonlin > 0);
  CHECK(fn.quadrature_residual(u) < 5e-4 * nonlin);

  // flat-coefficient twin of the same mode has a closed-form sample field,
  // so an independent product-rule quadrature pins the nonlinear part
  auto flat = make_table(0.0, 1, 0, 1, 0, 6, 6, 512);
  Functional ffn(flat, 2.5, 0.5, 52);
  CoeffField v = ffn.space().zero();
  v.c(1, flat->basis().index_of_label(1)) = 1.0;
  double amp = std::sqrt(2.0 / (2.0 * kPi)) * std::sqrt(2.0 / kPi);
  double it = simpson(0.0, 2.0 * kPi, 1 << 13,
                      [](double t) { return std::pow(std::abs(std::cos(t)), 1.5); });
  double ix = simpson(0.0, kPi, 1 << 13,
                      [](double x) { return std::pow(std::abs(std::sin(x)), 1.5); });
  double oracle = std::pow(amp, 1.5) * it * ix / 1.5;
  double got = ffn.value(v) - ffn.quadratic(v);
  CHECK(got == doctest::Approx(oracle).epsilon(1e-4));
}

TEST_CASE("gradient matches centered differences on fields bounded away from zero") {
  auto table = make_table(0.0, 0, 1, 0, 1, 5, 4, 256);
  Functional fn(table, 2.5, 0.5, 40);
  const WorkingSpace& ws = fn.space();
  int flat_mode = table->basis().index_of_label(0);

  for (unsigned trial = 0; trial < 20; ++trial) {
    CoeffField u = random_field(ws, 300 + trial, 0.002);
    u.c(0, flat_mode) += 2.0;
    auto field = fn.transform().synthesize(u);
    double fmin = 1e300;
    for (double vq : field) fmin = std::min(fmin, std::abs(vq));
    REQUIRE(fmin >= 0.1);

    CoeffField v = random_field(ws, 900 + trial);
    v.scale(1.0 / l2_norm(v));
    CoeffField g = fn.gradient(u);
    double pairing = dot(g, v);

    double h = 1e-5;
    CoeffField up = u, um = u;
    up.axpy(h, v);
    um.axpy(-h, v);
    double fd = (fn.value(up) - fn.value(um)) / (2.0 * h);
    CHECK(fd == doctest::Approx(pairing).epsilon(1e-6));
  }

  CoeffField g0 = fn.gradient(ws.zero());
  CHECK(l2_norm(g0) == 0.0);
}

TEST_CASE("pairing the gradient with the field balances energy and mass") {
  auto table = make_table(1.0, 1, 0, 1, 0, 6, 6, 256);
  Functional fn(table, 2.5, 0.5, 52);
  for (unsigned seed : {31u, 32u, 33u}) {
    CoeffField u = random_field(fn.space(), seed);
    CoeffField g = fn.gradient(u);
    CHECK(dot(g, u) ==
          doctest::Approx(2.0 * fn.quadratic(u) + fn.mass(u)).epsilon(1e-12));
  }
}

TEST_CASE("second derivative action matches differenced gradients") {
  auto table = make_table(0.0, 0, 1, 0, 1, 5, 4, 256);
  Functional fn(table, 2.5, 0.5, 40);
  const WorkingSpace& ws = fn.space();
  CoeffField u = random_field(ws, 41, 0.002);
  u.c(0, table->basis().index_of_label(0)) += 2.0;
  CoeffField v = random_field(ws, 42);
  v.scale(1.0 / l2_norm(v));

  auto field = fn.transform().synthesize(u);
  CoeffField hv = fn.hessian_apply(field, v);

  double h = 1e-5;
  CoeffField up = u, um = u;
  up.axpy(h, v);
  um.axpy(-h, v);
  CoeffField gp = fn.gradient(up), gm = fn.gradient(um);
  gp.axpy(-1.0, gm);
  gp.scale(1.0 / (2.0 * h));
  gp.axpy(-1.0, hv);
  CHECK(l2_norm(gp) < 1e-5 * std::max(1.0, l2_norm(hv)));
}

TEST_CASE("riesz representation reproduces the energy gradient norm") {
  auto table = make_table(1.0, 1, 0, 1, 0, 6, 6, 256);
  Functional fn(table, 2.5, 0.5, 52);
  CoeffField u = random_field(fn.space(), 55);
  CoeffField g = fn.gradient(u);
  CoeffField r = fn.riesz(g);
  CHECK(fn.space().energy_sq(r) == doctest::Approx(fn.grad_norm_e(g) * fn.grad_norm_e(g))
                                       .epsilon(1e-13));
  CHECK(dot(g, r) == doctest::Approx(fn.space().energy_sq(r)).epsilon(1e-13));
}

TEST_CASE("level bounds certify the linking geometry by sampling") {
  auto table = make_table(1.0, 1, 0, 1, 0, 8, 8, 256);
  Functional fn(table, 2.5, 0.5, 68);
  const WorkingSpace& ws = fn.space();
  const double p = 0.5;

  LevelBounds lb = level_bounds(fn, 1, 1024, 2024);
  CHECK(lb.l == 1);
  CHECK(lb.samples >= 1000);
  CHECK(lb.zeta == doctest::Approx(ws.zeta(1, p)).epsilon(1e-15));
  CHECK(lb.rho == doctest::Approx(rho_from_zeta(lb.zeta, p)).epsilon(1e-15));
  CHECK(lb.c0 > 0);
  CHECK(lb.radius > 0);
  CHECK(lb.sigma == doctest::Approx(0.5 * lb.radius * lb.radius).epsilon(1e-15));
  CHECK(lb.sigma <= lb.rho);
  CHECK_FALSE(lb.low_confidence);

  // the chain constant reproduces the radius from the sampled constant
  double T = table->period().T();
  double chain = std::pow(table->consts().beta0 * T * kPi, 0.5 / 3.0) / std::sqrt(ws.delta());
  CHECK(lb.radius ==
        doctest::Approx(std::pow(1.0 / (6.0 * lb.c0), 2.0) / chain).epsilon(1e-12));

  // fresh draws never beat the refined constant by more than the safety margin
  std::mt19937_64 rng(77);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int n = 0; n < 50; ++n) {
    CoeffField u = ws.zero();
    for (auto& vq : u.a) vq = gauss(rng);
    ws.project_constrained_plus(u, 2);
    double nrm = ws.energy_norm(u);
    if (!(nrm > 0)) continue;
    u.scale(1.0 / nrm);
    CoeffField plus = u;
    ws.project_sign(plus, +1);
    double den = fn.transform().weighted_Lr_norm(fn.transform().synthesize(u), 1.5);
    CHECK(ws.energy_sq(plus) / (den * den) <= 4.0 * lb.c0);
  }

  // sphere samples in the enlarged constrained space stay above the floor
  int low = 0;
  for (int n = 0; n < 1000; ++n) {
    CoeffField u = ws.zero();
    for (auto& vq : u.a) vq = gauss(rng);
    ws.project_constrained_plus(u, 2);
    double nrm = ws.energy_norm(u);
    if (!(nrm > 0)) continue;
    u.scale(lb.radius / nrm);
    if (!(fn.value(u) >= lb.sigma - fn.quadrature_residual(u) - 1e-12)) ++low;
  }
  CHECK(low == 0);

  // samples orthogonal to the small constrained space stay below the cap
  std::lognormal_distribution<double> scale_draw(0.0, 1.5);
  int high = 0;
  for (int n = 0; n < 1000; ++n) {
    CoeffField u = ws.zero();
    for (auto& vq : u.a) vq = gauss(rng);
    ws.project_constrained_plus_complement(u, 1);
    double nrm = ws.energy_norm(u);
    if (!(nrm > 0)) continue;
    u.scale(scale_draw(rng) / nrm);
    if (!(fn.value(u) <= lb.rho + fn.quadrature_residual(u) + 1e-12)) ++high;
  }
  CHECK(high == 0);
}

TEST_CASE("functional construction rejects bad exponents") {
  auto table = make_table(1.0, 1, 0, 1, 0, 6, 6, 256);
  expect_error(errc::invalid_spec, [&] { Functional(table, 2.5, 1.5, 52); });
  expect_error(errc::invalid_spec, [&] { Functional(table, 2.5, 0.0, 52); });
}
