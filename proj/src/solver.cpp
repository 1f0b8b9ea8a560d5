#include "rhowave/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <utility>

#include "rhowave/errors.hpp"

namespace rhowave {

namespace {

Projector window_projector(const WorkingSpace& ws, int m) {
  return [&ws, m](CoeffField& u) { ws.project_constrained_minus(u, m); };
}

void finalize(const Functional& fn, const Projector& proj, SolutionRecord& rec) {
  CoeffField g = fn.gradient(rec.u);
  proj(g);
  rec.residual = fn.grad_norm_e(g);
  rec.phi = fn.value(rec.u);
  rec.mass = fn.mass(rec.u);
}

}  // namespace

SolutionRecord fixed_point_solve(const Functional& fn, const CoeffField& u0, int m, double tol,
                                 int max_iter, double relax) {
  return fixed_point_solve_projected(fn, u0, window_projector(fn.space(), m), m, tol, max_iter,
                                     relax);
}

SolutionRecord fixed_point_solve_projected(const Functional& fn, const CoeffField& u0,
                                           const Projector& proj, int m, double tol,
                                           int max_iter, double relax) {
  const WorkingSpace& ws = fn.space();
  SolutionRecord rec;
  rec.method = "fixed-point";
  rec.truncation = m;
  rec.u = u0;
  proj(rec.u);
  rec.max_iterate_norm = ws.energy_norm(rec.u);

  double omega = std::clamp(relax, 1.0 / 128.0, 1.0);
  double prev_step = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iter; ++it) {
    std::vector<double> field = fn.transform().synthesize(rec.u);
    for (auto& v : field) v = f_eval(v, fn.p());
    CoeffField next = fn.transform().analyze(field);
    for (int j = 0; j <= next.jmax; ++j)
      for (int i = 0; i < next.nmodes; ++i) {
        double w = ws.shift(j, i);
        next.c(j, i) /= w;
        if (j >= 1) next.s(j, i) /= w;
      }
    proj(next);
    CoeffField diff = next;
    diff.axpy(-1.0, rec.u);
    double step = ws.energy_norm(diff);
    if (step > 1.2 * prev_step) omega = std::max(omega * 0.5, 1.0 / 128.0);
    rec.u.axpy(omega, diff);
    prev_step = step;
    rec.iterations = it;
    rec.max_iterate_norm = std::max(rec.max_iterate_norm, ws.energy_norm(rec.u));
    if (step <= tol) {
      rec.converged = true;
      break;
    }
  }
  rec.trivial = rec.converged && ws.energy_norm(rec.u) < 10.0 * tol;
  finalize(fn, proj, rec);
  return rec;
}

SolutionRecord saddle_search(const Functional& fn, const CoeffField& u0, int m, double tol,
                             int max_iter) {
  return saddle_search_projected(fn, u0, window_projector(fn.space(), m), m, tol, max_iter);
}

SolutionRecord saddle_search_projected(const Functional& fn, const CoeffField& u0,
                                       const Projector& proj, int m, double tol, int max_iter) {
  const WorkingSpace& ws = fn.space();
  SolutionRecord rec;
  rec.method = "saddle";
  rec.truncation = m;
  rec.u = u0;
  proj(rec.u);
  rec.max_iterate_norm = ws.energy_norm(rec.u);

  auto masked_grad = [&](const CoeffField& v) {
    CoeffField g = fn.gradient(v);
    proj(g);
    return g;
  };

  CoeffField g = masked_grad(rec.u);
  double resid = fn.grad_norm_e(g);
  double obj = 0.5 * resid * resid;

  CoeffField prev_step = ws.zero(), prev_slope_vec = ws.zero();
  bool have_prev = false;
  int stalls = 0;
  double resid_checkpoint = resid;

  for (int it = 1; it <= max_iter && resid > tol; ++it) {
    if (it % 64 == 0) {
      // drift watchdog: residual descent that flattens far from the target
      // is burning iterations in a shallow valley, typically near zero
      if (resid > 0.95 * resid_checkpoint && resid > 1000.0 * tol) break;
      resid_checkpoint = resid;
    }
    std::vector<double> field = fn.transform().synthesize(rec.u);

    // pairing-coefficient gradient of the squared-residual objective
    CoeffField rg = fn.riesz(g);
    CoeffField obj_grad = fn.hessian_apply(field, rg);
    proj(obj_grad);
    CoeffField dir = fn.riesz(obj_grad);
    dir.scale(-1.0);
    double slope = dot(obj_grad, dir);  // equals -|dir|_E^2
    double dir_norm = std::sqrt(std::max(0.0, -slope));

    if (dir_norm <= 1e-10 * std::max(1.0, resid)) {
      rec.saddle_of_residual = resid > tol;
      break;
    }

    // spectral step from the previous accepted move, else scale to the target
    double tau = obj / (-slope);
    if (have_prev) {
      CoeffField y = dir;
      y.scale(-1.0);
      y.axpy(-1.0, prev_slope_vec);  // change of the riesz'd objective gradient
      double sy = 0;
      for (int j = 0; j <= y.jmax; ++j)
        for (int i = 0; i < y.nmodes; ++i) {
          double w = std::abs(ws.shift(j, i));
          sy += w * prev_step.c(j, i) * y.c(j, i);
          if (j >= 1) sy += w * prev_step.s(j, i) * y.s(j, i);
        }
      double ss = ws.energy_sq(prev_step);
      if (sy > 0) tau = ss / sy;
    }
    tau = std::clamp(tau, 1e-12, 1e4);

    bool accepted = false;
    CoeffField g_new = g;
    for (int bt = 0; bt < 30; ++bt) {
      CoeffField trial = rec.u;
      trial.axpy(tau, dir);
      g_new = masked_grad(trial);
      double resid_new = fn.grad_norm_e(g_new);
      double obj_new = 0.5 * resid_new * resid_new;
      if (obj_new <= obj + 1e-4 * tau * slope) {
        prev_step = dir;
        prev_step.scale(tau);
        prev_slope_vec = fn.riesz(obj_grad);
        have_prev = true;
        rec.u = trial;
        g = g_new;
        resid = resid_new;
        obj = obj_new;
        accepted = true;
        break;
      }
      tau *= 0.5;
    }
    rec.iterations = it;
    rec.max_iterate_norm = std::max(rec.max_iterate_norm, ws.energy_norm(rec.u));
    if (!accepted) {
      if (++stalls >= 3) {
        rec.saddle_of_residual = resid > tol && dir_norm <= 1e-6 * std::max(1.0, resid);
        break;
      }
      have_prev = false;
      continue;
    }
    stalls = 0;

    // normal-equation polish once the residual is moderate; also fired on
    // entry, where continuation seeds already sit near their critical point
    if ((resid < 0.5 && it % 5 == 0) || it == 1) {
      std::vector<double> fu = fn.transform().synthesize(rec.u);
      auto apply = [&](const CoeffField& v) {
        CoeffField h = fn.hessian_apply(fu, v);
        proj(h);
        CoeffField out = fn.riesz(h);
        return out;
      };
      auto e_dot = [&](const CoeffField& x, const CoeffField& y2) {
        double s = 0;
        for (int j = 0; j <= x.jmax; ++j)
          for (int i = 0; i < x.nmodes; ++i) {
            double w = std::abs(ws.shift(j, i));
            s += w * x.c(j, i) * y2.c(j, i);
            if (j >= 1) s += w * x.s(j, i) * y2.s(j, i);
          }
        return s;
      };
      CoeffField target = fn.riesz(g);
      CoeffField y = ws.zero();
      CoeffField res = apply(target);
      CoeffField pvec = res;
      double rs = e_dot(res, res), rs0 = rs;
      for (int cg = 0; cg < 48 && rs > 1e-6 * rs0; ++cg) {
        CoeffField bp = apply(apply(pvec));
        double denom = e_dot(pvec, bp);
        if (!(denom > 0)) break;
        double alpha = rs / denom;
        y.axpy(alpha, pvec);
        res.axpy(-alpha, bp);
        double rs_new = e_dot(res, res);
        pvec.scale(rs_new / rs);
        pvec.axpy(1.0, res);
        rs = rs_new;
      }
      double scale = 1.0;
      for (int nt = 0; nt < 3; ++nt, scale *= 0.5) {
        CoeffField trial = rec.u;
        trial.axpy(-scale, y);
        CoeffField g_try = masked_grad(trial);
        double resid_try = fn.grad_norm_e(g_try);
        if (resid_try < 0.9 * resid) {
          rec.u = trial;
          g = g_try;
          resid = resid_try;
          obj = 0.5 * resid * resid;
          have_prev = false;
          rec.max_iterate_norm = std::max(rec.max_iterate_norm, ws.energy_norm(rec.u));
          break;
        }
      }
    }
  }

  rec.converged = resid <= tol;
  rec.trivial = rec.converged && ws.energy_norm(rec.u) < 10.0 * tol;
  finalize(fn, proj, rec);
  return rec;
}

CoeffField time_translate(const SpectrumTable& table, const CoeffField& u, double t0) {
  CoeffField v = u;
  for (int j = 1; j <= u.jmax; ++j) {
    double th = table.period().nu(j) * t0;
    double cth = std::cos(th), sth = std::sin(th);
    for (int i = 0; i < u.nmodes; ++i) {
      v.c(j, i) = u.c(j, i) * cth + u.s(j, i) * sth;
      v.s(j, i) = -u.c(j, i) * sth + u.s(j, i) * cth;
    }
  }
  return v;
}

DeflateDecision deflate(const WorkingSpace& ws, const std::vector<SolutionRecord>& found,
                        const SolutionRecord& cand, double sep, int phases) {
  if (sep < 0) sep = 1e-3 * std::max(1.0, ws.energy_norm(cand.u));
  DeflateDecision d;
  const int J = cand.u.jmax;
  const double cn = ws.energy_sq(cand.u);
  const double two_pi = 2.0 * std::numbers::pi;
  for (size_t k = 0; k < found.size(); ++k) {
    const CoeffField& s = found[k].u;
    double sn = ws.energy_sq(s);
    // energy inner product against the phase-rotated record is a trig
    // polynomial of the rotation angle; minimizing the distance over the
    // whole orbit closes the gaps a finite phase grid would leave
    double a0 = 0;
    std::vector<double> A(J + 1, 0.0), B(J + 1, 0.0);
    for (int i = 0; i < cand.u.nmodes; ++i)
      a0 += std::abs(ws.shift(0, i)) * cand.u.c(0, i) * s.c(0, i);
    for (int j = 1; j <= J; ++j)
      for (int i = 0; i < cand.u.nmodes; ++i) {
        double w = std::abs(ws.shift(j, i));
        A[j] += w * (cand.u.c(j, i) * s.c(j, i) + cand.u.s(j, i) * s.s(j, i));
        B[j] += w * (cand.u.c(j, i) * s.s(j, i) - cand.u.s(j, i) * s.c(j, i));
      }
    auto inner_at = [&](double ang) {
      double v = a0;
      for (int j = 1; j <= J; ++j) v += A[j] * std::cos(j * ang) + B[j] * std::sin(j * ang);
      return v;
    };
    int nscan = std::max(phases, 8) * 16;
    double best_ang = 0, best_abs = -1;
    for (int g = 0; g < nscan; ++g) {
      double ang = two_pi * g / nscan;
      double v = std::abs(inner_at(ang));
      if (v > best_abs) {
        best_abs = v;
        best_ang = ang;
      }
    }
    double step = two_pi / nscan;
    for (int refine = 0; refine < 24; ++refine) {
      step *= 0.5;
      double lo = std::abs(inner_at(best_ang - step));
      double hi = std::abs(inner_at(best_ang + step));
      if (lo > best_abs && lo >= hi) {
        best_abs = lo;
        best_ang -= step;
      } else if (hi > best_abs) {
        best_abs = hi;
        best_ang += step;
      }
    }
    double dist_sq = cn + sn - 2.0 * best_abs;
    if (std::sqrt(std::max(dist_sq, 0.0)) <= sep) {
      d.accepted = false;
      d.matched = static_cast<int>(k);
      d.matched_sign = inner_at(best_ang) >= 0 ? +1 : -1;
      d.matched_phase =
          static_cast<int>(std::llround(best_ang / two_pi * phases)) % std::max(phases, 1);
      return d;
    }
  }
  return d;
}

SequenceResult solution_sequence(const Functional& fn, const SequenceConfig& cfg) {
  const WorkingSpace& ws = fn.space();
  if (cfg.levels < 1 || cfg.starts < 1) fail(errc::invalid_spec, "need levels >= 1, starts >= 1");

  SequenceResult out;
  std::vector<SolutionRecord> kept;

  // deterministic mode order for the continuation starts, nearest-resonance
  // first; only positive shifts carry a one-mode balance point
  std::vector<std::pair<int, int>> mode_order;
  {
    CoeffField probe = ws.zero();
    for (int j = 0; j <= probe.jmax; ++j)
      for (int i = 0; i < probe.nmodes; ++i) {
        if (!(ws.shift(j, i) > 0)) continue;
        mode_order.emplace_back(j, i);
      }
    std::stable_sort(mode_order.begin(), mode_order.end(),
                     [&](const std::pair<int, int>& a, const std::pair<int, int>& b) {
                       return std::abs(ws.shift(a.first, a.second)) <
                              std::abs(ws.shift(b.first, b.second));
                     });
  }

  for (int l = 1; l <= cfg.levels; ++l) {
    LevelReport report;
    report.bounds =
        level_bounds(fn, l, cfg.c0_samples, cfg.seed ^ (0x9E3779B97F4A7C15ULL * l));
    for (int start = 0; start < cfg.starts; ++start) {
      std::uint64_t run_seed = cfg.seed + 1000003ULL * l + start;
      std::mt19937_64 rng(run_seed);
      std::normal_distribution<double> gauss(0.0, 1.0);
      CoeffField u0 = ws.zero();
      // four start kinds in rotation: sphere seeds inside the linking window,
      // seeds in its complement, single-mode continuation seeds at the
      // one-mode balance amplitude, and order-one random seeds
      int kind = start % 4;
      if (kind == 2 && !mode_order.empty()) {
        auto [mj, mi] =
            mode_order[(start / 4 + (l - 1) * ((cfg.starts + 3) / 4)) % mode_order.size()];
        u0.c(mj, mi) = 1.0;
        double q = fn.mass(u0);
        double s = std::abs(ws.shift(mj, mi));
        if (q > 0 && s > 0) u0.c(mj, mi) = std::pow(q / s, 1.0 / (1.0 - fn.p()));
      } else {
        for (auto& v : u0.a) v = gauss(rng);
        if (kind == 1)
          ws.project_constrained_plus_complement(u0, l);
        else
          ws.project_constrained_plus(u0, l + 1);
        ws.project_constrained_minus(u0, cfg.m);
        double nrm = ws.energy_norm(u0);
        if (!(nrm > 0)) continue;
        u0.scale((kind == 3 ? 1.0 : report.bounds.radius) / nrm);
      }
      if (!(ws.energy_norm(u0) > 0)) continue;

      // the damped diagonal iteration escapes the repelling origin; its
      // endpoint then seeds the residual minimizer, which polishes points
      // the iteration cannot stabilize. continuation seeds skip the
      // iteration: they already sit beside their critical point, where the
      // diagonal map is expansive and would slide them into the dominant
      // attractors
      SolutionRecord runs[2];
      if (kind == 2) {
        runs[0] = saddle_search(fn, u0, cfg.m, cfg.tol, cfg.max_iter);
      } else {
        runs[0] = fixed_point_solve(fn, u0, cfg.m, cfg.tol, std::min(cfg.max_iter, 400),
                                    cfg.fp_relax);
        runs[1] = saddle_search(fn, runs[0].u, cfg.m, cfg.tol, cfg.max_iter);
      }
      for (auto& rec : runs) {
        rec.seed = run_seed;
        if (!rec.converged || rec.trivial || rec.residual > cfg.tol) continue;
        if (!(rec.phi > 0) || rec.phi > report.bounds.rho) continue;
        if (!deflate(ws, kept, rec).accepted) continue;
        rec.level = l;
        kept.push_back(rec);
        ++report.accepted;
        if (rec.phi >= report.bounds.sigma && rec.phi <= report.bounds.rho)
          report.found_in_window = true;
      }
    }
    out.levels.push_back(report);
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const SolutionRecord& a, const SolutionRecord& b) { return a.phi > b.phi; });
  out.records = std::move(kept);
  return out;
}

TruncationReport truncation_study(const Functional& fn, const SolutionRecord& rec, int m_to,
                                  double tol, int max_iter) {
  if (m_to <= rec.truncation)
    fail(errc::invalid_truncation, "refinement window must be strictly larger");
  TruncationReport rep;
  rep.m_from = rec.truncation;
  rep.m_to = m_to;
  rep.refined = rec.method == "fixed-point"
                    ? fixed_point_solve(fn, rec.u, m_to, tol, max_iter)
                    : saddle_search(fn, rec.u, m_to, tol, max_iter);
  if (!rep.refined.converged && rep.refined.method == "fixed-point")
    rep.refined = saddle_search(fn, rec.u, m_to, tol, max_iter);
  rep.converged = rep.refined.converged;
  rep.max_iterate_norm = rep.refined.max_iterate_norm;
  CoeffField diff = rep.refined.u;
  diff.axpy(-1.0, rec.u);
  rep.diff_e = fn.space().energy_norm(diff);
  return rep;
}

VerifyReport verify_solution(const Functional& fn, const SolutionRecord& rec, int n_tests,
                             std::uint64_t seed) {
  const WorkingSpace& ws = fn.space();
  VerifyReport rep;
  rep.n_tests = n_tests;
  CoeffField g = fn.gradient(rec.u);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int n = 0; n < n_tests; ++n) {
    CoeffField psi = ws.zero();
    for (auto& v : psi.a) v = gauss(rng);
    ws.project_constrained_minus(psi, rec.truncation);
    double nrm = l2_norm(psi);
    if (!(nrm > 0)) continue;
    rep.max_weak_residual = std::max(rep.max_weak_residual, std::abs(dot(g, psi)) / nrm);
  }
  double phi = fn.value(rec.u);
  double mass = fn.mass(rec.u);
  rep.critical_value_defect = std::abs(phi - (1.0 / (fn.p() + 1.0) - 0.5) * mass);
  rep.energy_balance_defect = std::abs(-2.0 * fn.quadratic(rec.u) - mass);
  return rep;
}

}  // namespace rhowave
