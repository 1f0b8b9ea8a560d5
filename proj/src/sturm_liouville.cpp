#include "rhowave/sturm_liouville.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "rhowave/errors.hpp"
#include "rhowave/tridiag.hpp"

namespace rhowave {

namespace {
constexpr double kPi = std::numbers::pi;

double snap_zero(double v, double scale) { return std::abs(v) <= 1e-11 * scale ? 0.0 : v; }
}  // namespace

RobinBC classify_transformed(double alpha1, double beta1, double alpha2, double beta2) {
  RobinBC bc;
  double scale = std::max({1.0, std::abs(alpha1), std::abs(alpha2), beta1, beta2});
  bc.alpha1 = snap_zero(alpha1, scale);
  bc.alpha2 = snap_zero(alpha2, scale);
  bc.beta1 = snap_zero(beta1, scale);
  bc.beta2 = snap_zero(beta2, scale);

  auto end_ok = [](double a, double b) { return a >= 0 && b >= 0 && a + b > 0; };
  if (!end_ok(bc.alpha1, bc.beta1) || !end_ok(bc.alpha2, bc.beta2))
    fail(errc::assumption_a2_violated,
         "need alpha_i >= 0, beta_i >= 0, alpha_i + beta_i > 0 in the transformed data");

  const bool d1 = bc.beta1 == 0, n1 = bc.alpha1 == 0;
  const bool d2 = bc.beta2 == 0, n2 = bc.alpha2 == 0;
  if (d1 && d2) {
    bc.case_tag = 1;
    bc.pattern_shift = 0;
  } else if (d1 && n2) {
    bc.case_tag = 2;
    bc.pattern_shift = 0.5;
  } else if (n1 && d2) {
    bc.case_tag = 3;
    bc.pattern_shift = 0.5;
    bc.reflected = true;
  } else if (n1 && n2) {
    bc.case_tag = 4;
    bc.pattern_shift = 0;
    bc.extra_mode = true;
  } else if (!d1 && !n1 && !d2 && !n2) {
    bc.case_tag = 5;
    bc.pattern_shift = 0;
  } else {
    fail(errc::unsupported_case,
         "admissible data with mixed Dirichlet/Robin or Neumann/Robin ends is outside "
         "the five-case classification");
  }
  return bc;
}

RobinBC boundary_transform(const Coefficient& coeff, double a1, double b1, double a2, double b2) {
  double r0 = coeff.drho(0) / coeff.rho(0);
  double rpi = coeff.drho(kPi) / coeff.rho(kPi);
  RobinBC bc = classify_transformed(a1 - 0.5 * b1 * r0, -b1, a2 - 0.5 * b2 * rpi, b2);
  bc.a1 = a1;
  bc.b1 = b1;
  bc.a2 = a2;
  bc.b2 = b2;
  return bc;
}

namespace {

struct Assembled {
  std::vector<double> x, w;   // nodes and trapezoid weight factors
  std::vector<double> d, e;   // symmetric tridiagonal after the half-weight similarity
};

// left/right data are in "solve orientation" (already swapped for reflected runs).
Assembled assemble(const std::function<double(double)>& eta, int n, bool keep_left,
                   double left_ratio, bool keep_right, double right_ratio) {
  Assembled g;
  double h = kPi / n;
  int i0 = keep_left ? 0 : 1;
  int i1 = keep_right ? n : n - 1;
  int m = i1 - i0 + 1;
  g.x.resize(m);
  g.w.resize(m);
  g.d.resize(m);
  g.e.assign(m - 1, -1.0 / (h * h));
  for (int i = i0; i <= i1; ++i) {
    int r = i - i0;
    g.x[r] = h * i;
    g.w[r] = 1.0;
    g.d[r] = 2.0 / (h * h) + eta(g.x[r]);
  }
  if (keep_left) {
    g.w[0] = 0.5;
    g.d[0] += 2.0 * left_ratio / h;
    g.e[0] *= std::numbers::sqrt2;
  }
  if (keep_right) {
    g.w[m - 1] = 0.5;
    g.d[m - 1] += 2.0 * right_ratio / h;
    g.e[m - 2] *= std::numbers::sqrt2;
  }
  return g;
}

}  // namespace

EigenBasis::EigenBasis(int grid_n, double h, std::vector<double> x, std::vector<double> w,
                       std::vector<double> rho, std::vector<EigenMode> modes,
                       std::vector<std::vector<double>> z, RobinBC bc)
    : grid_n_(grid_n),
      h_(h),
      x_(std::move(x)),
      w_(std::move(w)),
      rho_(std::move(rho)),
      modes_(std::move(modes)),
      z_(std::move(z)),
      bc_(bc) {
  sqrt_rho_.resize(rho_.size());
  for (size_t i = 0; i < rho_.size(); ++i) sqrt_rho_[i] = std::sqrt(rho_[i]);
}

int EigenBasis::index_of_label(int k) const {
  for (int i = 0; i < size(); ++i)
    if (modes_[i].label == k) return i;
  return -1;
}

double EigenBasis::inner(const std::vector<double>& f, const std::vector<double>& g) const {
  double s = 0;
  for (size_t i = 0; i < x_.size(); ++i) s += w_[i] * f[i] * g[i];
  return s * h_;
}

EigenBasis eigensolve(const Coefficient& coeff, const RobinBC& bc, int count, int grid_n) {
  if (count < 1) fail(errc::invalid_spec, "need count >= 1");
  if (bc.case_tag < 1 || bc.case_tag > 5) fail(errc::invalid_bc, "unclassified boundary data");
  if (grid_n < 16 * count)
    fail(errc::resolution_error, "grid must have at least 16 intervals per requested mode");

  // Solve orientation: case 3 runs as case 2 on the reflected coefficient.
  const bool refl = bc.reflected;
  auto eta = [&](double x) { return coeff.potential(refl ? kPi - x : x); };
  double lratio_a = bc.beta1 > 0 ? bc.alpha1 / bc.beta1 : 0.0;
  double rratio_a = bc.beta2 > 0 ? bc.alpha2 / bc.beta2 : 0.0;
  bool keep_left = refl ? bc.beta2 > 0 : bc.beta1 > 0;
  bool keep_right = refl ? bc.beta1 > 0 : bc.beta2 > 0;
  double left_ratio = refl ? rratio_a : lratio_a;
  double right_ratio = refl ? lratio_a : rratio_a;

  auto solve_grid = [&](int n) {
    Assembled g = assemble(eta, n, keep_left, left_ratio, keep_right, right_ratio);
    auto lam2 = tridiag::smallest_eigenvalues(g.d, g.e, count);
    return std::pair<Assembled, std::vector<double>>(std::move(g), std::move(lam2));
  };

  auto [grid, lam2_n] = solve_grid(grid_n);
  auto lam2_2n = solve_grid(2 * grid_n).second;

  std::vector<EigenMode> modes(count);
  for (int k = 0; k < count; ++k) {
    EigenMode& m = modes[k];
    m.lambda_sq = (4.0 * lam2_2n[k] - lam2_n[k]) / 3.0;
    m.below_zero = m.lambda_sq < 0;
    m.lambda = m.below_zero ? -std::sqrt(-m.lambda_sq) : std::sqrt(m.lambda_sq);
    auto safe_sqrt = [](double v) { return v < 0 ? -std::sqrt(-v) : std::sqrt(v); };
    m.err_est = std::abs(safe_sqrt(lam2_2n[k]) - safe_sqrt(lam2_n[k])) / 3.0;
  }

  // Positional labels: consecutive sorted eigenvalues get consecutive indices.
  int first_label;
  switch (bc.case_tag) {
    case 1: first_label = 1; break;
    case 2:
    case 3:
    case 4: first_label = 0; break;
    default: {  // case 5: one leading off-pattern mode may or may not be present
      double top = modes.back().lambda;
      double dev_with_extra = std::abs(top - (count - 1));  // labels 0..count-1
      double dev_without = std::abs(top - count);           // labels 1..count
      first_label = dev_with_extra < dev_without ? 0 : 1;
      break;
    }
  }
  RobinBC bc_out = bc;
  if (bc.case_tag == 5) bc_out.extra_mode = first_label == 0;
  for (int k = 0; k < count; ++k) {
    modes[k].label = first_label + k;
    bool off_pattern = bc_out.extra_mode && modes[k].label == 0;
    modes[k].theta = modes[k].lambda - (off_pattern ? 0.0 : modes[k].label + bc.pattern_shift);
  }

  // Eigenvectors on the N grid, then one Gram-Schmidt pass: raw inverse iteration
  // orthogonality degrades like eps * ||T|| / gap, which lands above the 1e-10
  // orthonormality budget at fine grids.
  int nn = static_cast<int>(grid.x.size());
  std::vector<std::vector<double>> w_vecs(count);
  for (int k = 0; k < count; ++k)
    w_vecs[k] = tridiag::eigenvector(grid.d, grid.e, lam2_n[k], 0x5EED0000ULL + k);
  for (int k = 0; k < count; ++k) {
    for (int j = 0; j < k; ++j) {
      double dot = 0;
      for (int i = 0; i < nn; ++i) dot += w_vecs[k][i] * w_vecs[j][i];
      for (int i = 0; i < nn; ++i) w_vecs[k][i] -= dot * w_vecs[j][i];
    }
    double nrm = 0;
    for (int i = 0; i < nn; ++i) nrm += w_vecs[k][i] * w_vecs[k][i];
    nrm = std::sqrt(nrm);
    if (!(nrm > 0.5)) fail(errc::numeric_error, "eigenvector degenerated during orthogonalization");
    for (int i = 0; i < nn; ++i) w_vecs[k][i] /= nrm;
  }

  double h = kPi / grid_n;
  std::vector<std::vector<double>> z(count, std::vector<double>(nn));
  for (int k = 0; k < count; ++k)
    for (int i = 0; i < nn; ++i) z[k][i] = w_vecs[k][i] / std::sqrt(grid.w[i] * h);

  std::vector<double> x_out = grid.x, w_out = grid.w;
  if (refl) {
    for (int i = 0; i < nn; ++i) x_out[i] = kPi - grid.x[nn - 1 - i];
    std::reverse(w_out.begin(), w_out.end());
    for (auto& zk : z) std::reverse(zk.begin(), zk.end());
  }
  for (auto& zk : z) {  // deterministic orientation: first significant node positive
    double zmax = 0;
    for (double v : zk) zmax = std::max(zmax, std::abs(v));
    int ilead = 0;
    while (ilead < nn - 1 && std::abs(zk[ilead]) < 0.1 * zmax) ++ilead;
    if (zk[ilead] < 0)
      for (auto& v : zk) v = -v;
  }

  std::vector<double> rho_nodes(nn);
  for (int i = 0; i < nn; ++i) rho_nodes[i] = coeff.rho(x_out[i]);

  return EigenBasis(grid_n, h, std::move(x_out), std::move(w_out), std::move(rho_nodes),
                    std::move(modes), std::move(z), bc_out);
}

CertReport certify_asymptotics(const EigenBasis& basis, const SpectralConstants& consts) {
  if (!consts.positivity_holds)
    fail(errc::assumption_a1_violated,
         "potential infimum is not positive; the deviation windows do not apply");
  const RobinBC& bc = basis.bc();
  CertReport rep;
  rep.case_tag = bc.case_tag;
  if ((bc.case_tag == 5) && !consts.has_rho4)
    fail(errc::invalid_case, "case 5 certification needs rho4 (both boundary ratios)");

  const double r0 = consts.rho0, r1 = consts.rho1, r2 = consts.rho2, r3 = consts.rho3,
               r4 = consts.rho4;
  for (const auto& m : basis.modes()) {
    if (bc.extra_mode && m.label == 0) continue;  // off-pattern leading mode
    if (m.below_zero) continue;
    int k = m.label;
    double p = k + bc.pattern_shift;
    CertRow row;
    row.k = k;
    row.lambda = m.lambda;
    row.theta = m.theta;
    switch (bc.case_tag) {
      case 1:
        row.lower = std::sqrt(k * (double)k + r0) - k;
        row.upper = std::sqrt(k * (double)k + r1) - k;
        row.outer_lower = r2 / k;
        row.outer_upper = r1 / (2.0 * k);
        break;
      case 2:
      case 3:
        row.lower = r3 / (2.0 * k + 1.0);
        row.upper = r1 / (std::sqrt(p * p + r1) + p);
        row.outer_lower = row.lower;
        row.outer_upper = r1 / (2.0 * k + 1.0);
        break;
      case 4:
        row.lower = r2 / k;
        row.upper = std::sqrt(k * (double)k + r1) - k;
        row.outer_lower = row.lower;
        row.outer_upper = r1 / (2.0 * k);
        break;
      default:
        row.lower = r2 / k;
        row.upper = std::sqrt(k * (double)k + 2.0 * r4) - k;
        row.outer_lower = row.lower;
        row.outer_upper = r4 / k;
        break;
    }
    row.tol = std::max(10.0 * m.err_est, 1e-9);
    row.pass = m.theta >= row.lower - row.tol && m.theta <= row.upper + row.tol &&
               m.theta >= row.outer_lower - row.tol && m.theta <= row.outer_upper + row.tol;
    rep.rows.push_back(row);
  }
  if (rep.rows.empty()) fail(errc::certification_failure, "no certifiable modes in range");

  if (bc.case_tag == 5) {
    int n0 = -1;
    for (size_t i = 0; i < rep.rows.size(); ++i) {
      bool all = true;
      for (size_t j = i; j < rep.rows.size(); ++j) all = all && rep.rows[j].pass;
      if (all) {
        n0 = rep.rows[i].k;
        break;
      }
    }
    rep.verdict = n0 >= 1;
    rep.n0 = n0;
  } else {
    rep.verdict = true;
    for (const auto& r : rep.rows) rep.verdict = rep.verdict && r.pass;
    rep.n0 = rep.rows.front().k;
  }
  return rep;
}

}  // namespace rhowave
