#include "rhowave/solver.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "rhowave/coefficient.hpp"
#include "rhowave/errors.hpp"
#include "test_util.hpp"

using namespace rhowave;

namespace {

std::shared_ptr<const SpectrumTable> exp_table(int count, int jmax, int grid) {
  auto coeff = Coefficient::exponential(1.0);
  auto basis = std::make_shared<const EigenBasis>(
      eigensolve(coeff, classify_transformed(1, 0, 1, 0), count, grid));
  return std::make_shared<const SpectrumTable>(
      build_spectrum(basis, reduce_period(1, 1), jmax, spectral_constants(coeff)));
}

}  // namespace

TEST_CASE("zero start is a trivial fixed point for both solvers") {
  auto table = exp_table(6, 6, 192);
  Functional fn(table, 2.5, 0.5, 52);
  CoeffField zero = fn.space().zero();

  SolutionRecord fp = fixed_point_solve(fn, zero, 4, 1e-10, 50);
  CHECK(fp.converged);
  CHECK(fp.trivial);
  CHECK(fp.iterations == 1);
  CHECK(fp.residual == 0.0);
  CHECK(fp.phi == 0.0);

  SolutionRecord sd = saddle_search(fn, zero, 4, 1e-10, 50);
  CHECK(sd.converged);
  CHECK(sd.trivial);
  CHECK(sd.iterations == 0);
}

TEST_CASE("single-mode iteration reproduces the one-dimensional algebra") {
  auto table = exp_table(6, 6, 256);
  Functional fn(table, 2.5, 0.5, 52);
  const WorkingSpace& ws = fn.space();
  int i2 = table->basis().index_of_label(2);
  REQUIRE(ws.shift(1, i2) == doctest::Approx(1.5).epsilon(1e-8));

  Projector one_mode = [i2](CoeffField& u) {
    double keep = u.c(1, i2);
    u.set_zero();
    u.c(1, i2) = keep;
  };

  CoeffField e = ws.zero();
  e.c(1, i2) = 1.0;
  double q = fn.mass(e);  // quadrature factor of the mode
  double shift = ws.shift(1, i2);
  double alpha_star = (q / shift) * (q / shift);

  CoeffField u0 = ws.zero();
  u0.c(1, i2) = 1.0;
  SolutionRecord fp = fixed_point_solve_projected(fn, u0, one_mode, 6, 1e-12, 200);
  CHECK(fp.converged);
  CHECK_FALSE(fp.trivial);
  CHECK(fp.iterations <= 80);
  CHECK(fp.u.c(1, i2) == doctest::Approx(alpha_star).epsilon(1e-10));
  CHECK(fp.u.c(1, i2) == doctest::Approx(std::pow(q / 1.5, 2.0)).epsilon(1e-7));

  // residual descent started above the root comes back to it; started at the
  // one-dimensional residual ridge, the direction vanishes and the run is
  // flagged as residual-stationary instead of critical
  CoeffField u_hi = ws.zero();
  u_hi.c(1, i2) = 2.0 * alpha_star;
  SolutionRecord sd = saddle_search_projected(fn, u_hi, one_mode, 6, 1e-10, 400);
  CHECK(sd.converged);
  CHECK_FALSE(sd.trivial);
  CHECK(std::abs(sd.u.c(1, i2) - fp.u.c(1, i2)) <= 1e-8);

  CoeffField u_ridge = ws.zero();
  u_ridge.c(1, i2) = std::pow(0.5 * q / shift, 2.0);
  SolutionRecord sr = saddle_search_projected(fn, u_ridge, one_mode, 6, 1e-10, 400);
  CHECK(sr.saddle_of_residual);
  CHECK_FALSE(sr.converged);

  // critical-value identity: action equals the sublinear mass fraction
  CHECK(fp.phi == doctest::Approx(fp.mass / 6.0).epsilon(1e-9));
}

TEST_CASE("saddle search accepts a fixed-point output without moving") {
  auto table = exp_table(6, 6, 256);
  Functional fn(table, 2.5, 0.5, 52);
  int i2 = table->basis().index_of_label(2);
  Projector one_mode = [i2](CoeffField& u) {
    double keep = u.c(1, i2);
    u.set_zero();
    u.c(1, i2) = keep;
  };
  CoeffField u0 = fn.space().zero();
  u0.c(1, i2) = 1.0;
  SolutionRecord fp = fixed_point_solve_projected(fn, u0, one_mode, 6, 1e-12, 200);
  SolutionRecord sd = saddle_search_projected(fn, fp.u, one_mode, 6, 1e-9, 100);
  CHECK(sd.converged);
  CHECK(sd.iterations == 0);
  CHECK(fn.space().energy_norm([&] {
          CoeffField d = sd.u;
          d.axpy(-1.0, fp.u);
          return d;
        }()) == 0.0);
}

TEST_CASE("phase rotation of coefficients is a norm-preserving translation") {
  auto table = exp_table(5, 4, 192);
  WorkingSpace ws(table, 2.5);
  Transform tr(table, 20);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  CoeffField u = ws.zero();
  for (auto& v : u.a) v = gauss(rng);
  double T = table->period().T();

  CoeffField v = time_translate(*table, u, 3.0 * T / tr.nt());
  CHECK(ws.energy_norm(v) == doctest::Approx(ws.energy_norm(u)).epsilon(1e-13));
  CoeffField back = time_translate(*table, v, -3.0 * T / tr.nt());
  back.axpy(-1.0, u);
  CHECK(l2_norm(back) < 1e-13 * l2_norm(u));

  auto fu = tr.synthesize(u), fv = tr.synthesize(v);
  for (int s = 0; s < tr.nt(); s += 4)
    for (int q = 0; q < tr.nx(); q += 48)
      CHECK(fv[static_cast<size_t>(s) * tr.nx() + q] ==
            doctest::Approx(fu[static_cast<size_t>((s + 3) % tr.nt()) * tr.nx() + q])
                .epsilon(1e-10));
}

TEST_CASE("deflation rejects copies, negations, and time shifts only") {
  auto table = exp_table(6, 6, 192);
  Functional fn(table, 2.5, 0.5, 52);
  const WorkingSpace& ws = fn.space();
  double T = table->period().T();

  std::mt19937_64 rng(17);
  std::normal_distribution<double> gauss(0.0, 1.0);
  SolutionRecord a;
  a.u = ws.zero();
  for (auto& v : a.u.a) v = gauss(rng);
  std::vector<SolutionRecord> found = {a};

  SolutionRecord same = a;
  DeflateDecision d0 = deflate(ws, found, same);
  CHECK_FALSE(d0.accepted);
  CHECK(d0.matched == 0);
  CHECK(d0.matched_sign == 1);
  CHECK(d0.matched_phase == 0);

  SolutionRecord neg = a;
  neg.u.scale(-1.0);
  DeflateDecision d1 = deflate(ws, found, neg);
  CHECK_FALSE(d1.accepted);
  CHECK(d1.matched_sign == -1);

  SolutionRecord shifted = a;
  shifted.u = time_translate(*table, a.u, 5.0 * T / 64.0);
  DeflateDecision d2 = deflate(ws, found, shifted);
  CHECK_FALSE(d2.accepted);
  CHECK(d2.matched_phase == 5);

  SolutionRecord other;
  other.u = ws.zero();
  for (auto& v : other.u.a) v = gauss(rng);
  CHECK(deflate(ws, found, other).accepted);
}

TEST_CASE("sequence finds deflated positive-action critical points deterministically") {
  auto table = exp_table(8, 8, 128);
  Functional fn(table, 2.5, 0.5, 68);

  SequenceConfig cfg;
  cfg.levels = 2;
  cfg.m = 6;
  cfg.starts = 8;
  cfg.seed = 424242;
  cfg.tol = 1e-9;
  cfg.max_iter = 800;
  cfg.c0_samples = 1000;

  SequenceResult seq = solution_sequence(fn, cfg);
  REQUIRE(!seq.records.empty());
  CHECK(seq.levels.size() == 2);

  for (size_t k = 0; k < seq.records.size(); ++k) {
    const SolutionRecord& rec = seq.records[k];
    CHECK(rec.converged);
    CHECK_FALSE(rec.trivial);
    CHECK(rec.residual <= cfg.tol);
    CHECK(rec.phi > 0);
    REQUIRE(rec.level >= 1);
    REQUIRE(rec.level <= 2);
    CHECK(rec.phi <= seq.levels[rec.level - 1].bounds.rho);
    CHECK(std::abs(rec.phi - rec.mass / 6.0) <= 1e-6 * std::max(1.0, rec.mass));
    if (k > 0) CHECK(seq.records[k - 1].phi >= rec.phi);

    SolutionRecord neg = rec;
    neg.u.scale(-1.0);
    CHECK_FALSE(deflate(fn.space(), seq.records, neg).accepted);
  }

  SequenceResult twin = solution_sequence(fn, cfg);
  REQUIRE(twin.records.size() == seq.records.size());
  for (size_t k = 0; k < seq.records.size(); ++k) {
    CHECK(twin.records[k].phi == seq.records[k].phi);
    CHECK(twin.records[k].seed == seq.records[k].seed);
    for (size_t q = 0; q < seq.records[k].u.a.size(); ++q)
      CHECK(twin.records[k].u.a[q] == seq.records[k].u.a[q]);
  }
}

TEST_CASE("verification scores discrete critical points and flags perturbations") {
  auto table = exp_table(8, 8, 128);
  Functional fn(table, 2.5, 0.5, 68);

  SequenceConfig cfg;
  cfg.levels = 1;
  cfg.m = 6;
  cfg.starts = 6;
  cfg.seed = 99;
  cfg.tol = 1e-10;
  cfg.max_iter = 1200;
  cfg.c0_samples = 1000;
  SequenceResult seq = solution_sequence(fn, cfg);
  REQUIRE(!seq.records.empty());
  const SolutionRecord& rec = seq.records.front();

  VerifyReport rep = verify_solution(fn, rec, 100, 31337);
  CHECK(rep.n_tests == 100);
  CHECK(rep.max_weak_residual <= 1e-7);
  CHECK(rep.critical_value_defect <= 1e-8 * std::max(1.0, rec.mass));
  CHECK(rep.energy_balance_defect <= 1e-8 * std::max(1.0, rec.mass));

  SolutionRecord zero;
  zero.u = fn.space().zero();
  zero.truncation = 6;
  VerifyReport zrep = verify_solution(fn, zero, 10, 1);
  CHECK(zrep.max_weak_residual == 0.0);

  int ip = table->basis().index_of_label(6);
  SolutionRecord bad = rec;
  bad.u.c(0, ip) += 1e-3;
  double shift = std::abs(fn.space().shift(0, ip));
  VerifyReport brep = verify_solution(fn, bad, 100, 31337);
  CHECK(brep.max_weak_residual >= 1e-3 * shift / 10.0);
}

TEST_CASE("refinement keeps the solution and bounds the iterates") {
  auto table = exp_table(8, 8, 128);
  Functional fn(table, 2.5, 0.5, 68);

  SequenceConfig cfg;
  cfg.levels = 1;
  cfg.m = 4;
  cfg.starts = 6;
  cfg.seed = 7;
  cfg.tol = 1e-9;
  cfg.max_iter = 800;
  cfg.c0_samples = 1000;
  SequenceResult seq = solution_sequence(fn, cfg);
  REQUIRE(!seq.records.empty());
  const SolutionRecord& rec = seq.records.front();

  TruncationReport rep = truncation_study(fn, rec, 6, 1e-9, 1200);
  CHECK(rep.m_from == 4);
  CHECK(rep.m_to == 6);
  CHECK(rep.converged);
  CHECK(rep.diff_e < 0.05 * std::max(1.0, fn.space().energy_norm(rec.u)));
  CHECK(rep.max_iterate_norm < 10.0 * std::max(1.0, fn.space().energy_norm(rec.u)));

  expect_error(errc::invalid_truncation, [&] { truncation_study(fn, rec, 4, 1e-9, 100); });
}
