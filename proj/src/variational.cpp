#include "rhowave/variational.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "rhowave/errors.hpp"

namespace rhowave {

double f_eval(double v, double p) {
  if (v == 0.0) return 0.0;
  return v > 0 ? std::pow(v, p) : -std::pow(-v, p);
}

double F_eval(double v, double p) { return std::pow(std::abs(v), p + 1.0) / (p + 1.0); }

double df_eval(double v, double p, double floor_abs) {
  return p * std::pow(std::max(std::abs(v), floor_abs), p - 1.0);
}

double rho_from_zeta(double zeta, double p) {
  return (1.0 / (p + 1.0) - 0.5) * std::pow(zeta, 2.0 * (p + 1.0) / (1.0 - p));
}

Functional::Functional(std::shared_ptr<const SpectrumTable> table, double mu, double p, int nt)
    : ws_(table, mu), tr_(table, nt), tr2_(table, 2 * nt), p_(p) {
  if (!(p > 0) || !(p < 1)) fail(errc::invalid_spec, "exponent must lie in (0, 1)");
}

double Functional::quadratic(const CoeffField& u) const {
  double s = 0;
  for (int j = 0; j <= u.jmax; ++j)
    for (int i = 0; i < u.nmodes; ++i) {
      double w = ws_.shift(j, i);
      s += w * u.c(j, i) * u.c(j, i);
      if (j >= 1) s += w * u.s(j, i) * u.s(j, i);
    }
  return -0.5 * s;
}

double Functional::value(const CoeffField& u) const {
  double m = std::pow(tr_.weighted_Lr_norm(tr_.synthesize(u), p_ + 1.0), p_ + 1.0);
  return quadratic(u) + m / (p_ + 1.0);
}

double Functional::quadrature_residual(const CoeffField& u) const {
  double m1 = std::pow(tr_.weighted_Lr_norm(tr_.synthesize(u), p_ + 1.0), p_ + 1.0);
  double m2 = std::pow(tr2_.weighted_Lr_norm(tr2_.synthesize(u), p_ + 1.0), p_ + 1.0);
  return std::abs(m2 - m1) / (p_ + 1.0);
}

CoeffField Functional::gradient(const CoeffField& u) const {
  std::vector<double> field = tr_.synthesize(u);
  for (auto& v : field) v = f_eval(v, p_);
  CoeffField g = tr_.analyze(field);
  for (int j = 0; j <= u.jmax; ++j)
    for (int i = 0; i < u.nmodes; ++i) {
      double w = ws_.shift(j, i);
      g.c(j, i) -= w * u.c(j, i);
      if (j >= 1) g.s(j, i) -= w * u.s(j, i);
    }
  return g;
}

CoeffField Functional::riesz(const CoeffField& g) const {
  CoeffField r = g;
  for (int j = 0; j <= g.jmax; ++j)
    for (int i = 0; i < g.nmodes; ++i) {
      double w = std::abs(ws_.shift(j, i));
      r.c(j, i) /= w;
      if (j >= 1) r.s(j, i) /= w;
    }
  return r;
}

double Functional::grad_norm_e(const CoeffField& g) const {
  double s = 0;
  for (int j = 0; j <= g.jmax; ++j)
    for (int i = 0; i < g.nmodes; ++i) {
      double w = std::abs(ws_.shift(j, i));
      s += g.c(j, i) * g.c(j, i) / w;
      if (j >= 1) s += g.s(j, i) * g.s(j, i) / w;
    }
  return std::sqrt(s);
}

CoeffField Functional::hessian_apply(const std::vector<double>& field_u,
                                     const CoeffField& v) const {
  std::vector<double> fv = tr_.synthesize(v);
  for (size_t q = 0; q < fv.size(); ++q) fv[q] *= df_eval(field_u[q], p_);
  CoeffField h = tr_.analyze(fv);
  for (int j = 0; j <= v.jmax; ++j)
    for (int i = 0; i < v.nmodes; ++i) {
      double w = ws_.shift(j, i);
      h.c(j, i) -= w * v.c(j, i);
      if (j >= 1) h.s(j, i) -= w * v.s(j, i);
    }
  return h;
}

double Functional::mass(const CoeffField& u) const {
  return std::pow(tr_.weighted_Lr_norm(tr_.synthesize(u), p_ + 1.0), p_ + 1.0);
}

namespace {

double plus_over_mass_ratio(const Functional& fn, const CoeffField& u, double* mass_norm_out) {
  const WorkingSpace& ws = fn.space();
  CoeffField plus = u;
  ws.project_sign(plus, +1);
  double num = ws.energy_sq(plus);
  double den = fn.transform().weighted_Lr_norm(fn.transform().synthesize(u), fn.p() + 1.0);
  if (mass_norm_out) *mass_norm_out = den;
  if (!(den > 0)) return 0.0;
  return num / (den * den);
}

}  // namespace

LevelBounds level_bounds(const Functional& fn, int l, int samples, std::uint64_t seed) {
  const WorkingSpace& ws = fn.space();
  const double p = fn.p();
  LevelBounds out;
  out.l = l;
  out.zeta = ws.zeta(l, p);
  out.rho = rho_from_zeta(out.zeta, p);
  out.samples = std::max(samples, 1000);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  CoeffField best = ws.zero();
  double c0 = 0;
  for (int n = 0; n < out.samples; ++n) {
    CoeffField u = ws.zero();
    for (auto& v : u.a) v = gauss(rng);
    ws.project_constrained_plus(u, l + 1);
    double nrm = ws.energy_norm(u);
    if (!(nrm > 0)) continue;
    u.scale(1.0 / nrm);
    double r = plus_over_mass_ratio(fn, u, nullptr);
    if (r > c0) {
      c0 = r;
      best = u;
    }
  }
  if (!(c0 > 0))
    fail(errc::numeric_error, "sampled subspace has no positive-energy component");

  // sharpen the sampled maximum by projected gradient ascent on log(ratio)
  const Transform& tr = fn.transform();
  double step = 0.05;
  double last_rel = 1.0;
  CoeffField u = best;
  for (int it = 0; it < 400 && step > 1e-14; ++it) {
    CoeffField plus = u;
    ws.project_sign(plus, +1);
    double num = ws.energy_sq(plus);
    std::vector<double> field = tr.synthesize(u);
    double den = tr.weighted_Lr_norm(field, p + 1.0);
    for (auto& v : field) v = f_eval(v, p);
    CoeffField gmass = tr.analyze(field);
    CoeffField g = ws.zero();
    for (int j = 0; j <= g.jmax; ++j)
      for (int i = 0; i < g.nmodes; ++i) {
        double w = std::abs(ws.shift(j, i));
        double gp = ws.shift(j, i) > 0 ? 2.0 * w * plus.c(j, i) / num : 0.0;
        g.c(j, i) = gp - 2.0 * gmass.c(j, i) / std::pow(den, p + 1.0);
        if (j >= 1) {
          double gs = ws.shift(j, i) > 0 ? 2.0 * w * plus.s(j, i) / num : 0.0;
          g.s(j, i) = gs - 2.0 * gmass.s(j, i) / std::pow(den, p + 1.0);
        }
      }
    ws.project_constrained_plus(g, l + 1);
    CoeffField trial = u;
    trial.axpy(step, g);
    double nrm = ws.energy_norm(trial);
    if (!(nrm > 0)) break;
    trial.scale(1.0 / nrm);
    double rt = plus_over_mass_ratio(fn, trial, nullptr);
    if (rt > c0) {
      last_rel = (rt - c0) / c0;
      c0 = rt;
      u = trial;
      step *= 1.3;
    } else {
      step *= 0.5;
    }
  }
  out.low_confidence = last_rel > 1e-6 && step > 1e-14;
  out.c0 = c0;

  double T = ws.table().period().T();
  double beta0 = ws.table().consts().beta0;
  double chain = std::pow(beta0 * T * std::numbers::pi, (1.0 - p) / (2.0 * (p + 1.0))) /
                 std::sqrt(ws.delta());
  out.radius = std::pow(1.0 / (4.0 * c0 * (p + 1.0)), 1.0 / (1.0 - p)) / chain;
  out.sigma = 0.5 * out.radius * out.radius;
  return out;
}

}  // namespace rhowave
