#include "rhowave/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "rhowave/errors.hpp"

namespace rhowave::tridiag {

namespace {

double pivmin_for(const std::vector<double>& e) {
  double maxe2 = 1.0;
  for (double v : e) maxe2 = std::max(maxe2, v * v);
  return std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon() * maxe2;
}

int count_below_impl(const std::vector<double>& d, const std::vector<double>& e, double x,
                     double pivmin) {
  int n = static_cast<int>(d.size());
  int cnt = 0;
  double q = d[0] - x;
  if (std::abs(q) < pivmin) q = -pivmin;
  if (q < 0) ++cnt;
  for (int i = 1; i < n; ++i) {
    q = d[i] - x - e[i - 1] * e[i - 1] / q;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0) ++cnt;
  }
  return cnt;
}

}  // namespace

int count_below(const std::vector<double>& d, const std::vector<double>& e, double x) {
  return count_below_impl(d, e, x, pivmin_for(e));
}

std::vector<double> smallest_eigenvalues(const std::vector<double>& d,
                                         const std::vector<double>& e, int count,
                                         double rel_tol) {
  int n = static_cast<int>(d.size());
  if (count < 1 || count > n) fail(errc::invalid_spec, "eigenvalue count out of range");
  double pivmin = pivmin_for(e);

  double glo = d[0], ghi = d[0];
  for (int i = 0; i < n; ++i) {
    double r = (i > 0 ? std::abs(e[i - 1]) : 0.0) + (i + 1 < n ? std::abs(e[i]) : 0.0);
    glo = std::min(glo, d[i] - r);
    ghi = std::max(ghi, d[i] + r);
  }
  double span = ghi - glo;
  glo -= 1e-12 * std::abs(glo) + 1e-300;
  ghi += 1e-12 * std::abs(ghi) + 1e-300;

  std::vector<double> out(count);
  double prev_lo = glo;
  for (int k = 0; k < count; ++k) {
    double lo = prev_lo, hi = ghi;
    // max useful iterations: halving from the Gershgorin span to relative machine width
    int iters = 2 + static_cast<int>(std::ceil(std::log2(std::max(span, 1.0) / rel_tol))) + 60;
    for (int it = 0; it < iters; ++it) {
      double mid = 0.5 * (lo + hi);
      if (hi - lo <= rel_tol * std::max({1.0, std::abs(lo), std::abs(hi)})) break;
      if (count_below_impl(d, e, mid, pivmin) >= k + 1)
        hi = mid;
      else
        lo = mid;
    }
    out[k] = 0.5 * (lo + hi);
    prev_lo = lo;  // eigenvalue k+1 cannot lie below this
  }
  return out;
}

std::vector<double> eigenvector(const std::vector<double>& d, const std::vector<double>& e,
                                double lam, std::uint64_t seed) {
  int n = static_cast<int>(d.size());
  // LU of (T - lam I) with partial pivoting; swaps introduce a second superdiagonal.
  std::vector<double> du0(n), du1(std::max(0, n - 1), 0.0), du2(std::max(0, n - 2), 0.0),
      mult(std::max(0, n - 1), 0.0);
  std::vector<char> swapped(std::max(0, n - 1), 0);
  for (int i = 0; i < n; ++i) du0[i] = d[i] - lam;
  for (int i = 0; i + 1 < n; ++i) du1[i] = e[i];

  double scale = std::abs(lam);
  for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(d[i]));
  for (double v : e) scale = std::max(scale, std::abs(v));
  // pivot floor: small enough that one solve isolates the eigenvector, large
  // enough that squared norms of the amplified iterate stay finite
  const double tiny = scale * 1e-20 + std::numeric_limits<double>::min();

  for (int i = 0; i + 1 < n; ++i) {
    double p0 = du0[i], p1 = du1[i], p2 = (i + 2 < n) ? du2[i] : 0.0;
    double q0 = e[i], q1 = du0[i + 1], q2 = (i + 2 < n) ? du1[i + 1] : 0.0;
    if (std::abs(p0) >= std::abs(q0)) {
      if (std::abs(p0) < tiny) p0 = (p0 < 0 ? -tiny : tiny);
      double m = q0 / p0;
      du0[i] = p0;
      mult[i] = m;
      du0[i + 1] = q1 - m * p1;
      if (i + 2 < n) du1[i + 1] = q2 - m * p2;
    } else {
      swapped[i] = 1;
      double m = p0 / q0;
      mult[i] = m;
      du0[i] = q0;
      du1[i] = q1;
      if (i + 2 < n) du2[i] = q2;
      du0[i + 1] = p1 - m * q1;
      if (i + 2 < n) du1[i + 1] = p2 - m * q2;
    }
  }
  if (std::abs(du0[n - 1]) < tiny) du0[n - 1] = (du0[n - 1] < 0 ? -tiny : tiny);

  auto solve = [&](std::vector<double>& y) {
    for (int i = 0; i + 1 < n; ++i) {
      if (swapped[i]) std::swap(y[i], y[i + 1]);
      y[i + 1] -= mult[i] * y[i];
    }
    for (int i = n - 1; i >= 0; --i) {
      double s = y[i];
      if (i + 1 < n) s -= du1[i] * y[i + 1];
      if (i + 2 < n) s -= du2[i] * y[i + 2];
      y[i] = s / du0[i];
    }
  };

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& vi : v) vi = unif(rng);
  for (int pass = 0; pass < 3; ++pass) {
    solve(v);
    double vmax = 0;
    for (double vi : v) vmax = std::max(vmax, std::abs(vi));
    if (!(vmax > 0) || !std::isfinite(vmax))
      fail(errc::numeric_error, "inverse iteration broke down");
    for (auto& vi : v) vi /= vmax;  // pre-scale so the squared norm cannot overflow
    double nrm = 0;
    for (double vi : v) nrm += vi * vi;
    nrm = std::sqrt(nrm);
    for (auto& vi : v) vi /= nrm;
  }
  int imax = 0;
  for (int i = 1; i < n; ++i)
    if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
  if (v[imax] < 0)
    for (auto& vi : v) vi = -vi;
  return v;
}

}  // namespace rhowave::tridiag
