#include "rhowave/coefficient.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_interp.h>
#include <gsl/gsl_min.h>
#include <gsl/gsl_spline.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rhowave/errors.hpp"
#include "rhowave/io.hpp"

namespace rhowave {

namespace {
constexpr double kPi = std::numbers::pi;

struct GslInit {
  GslInit() { gsl_set_error_handler_off(); }
};
const GslInit gsl_init;

struct Spline {
  gsl_spline* s = nullptr;
  gsl_interp_accel* acc = nullptr;
  double xlo = 0, xhi = 0;

  Spline(const gsl_interp_type* type, const std::vector<double>& x, const std::vector<double>& y) {
    s = gsl_spline_alloc(type, x.size());
    acc = gsl_interp_accel_alloc();
    if (!s || !acc) fail(errc::numeric_error, "interpolant allocation failed");
    if (gsl_spline_init(s, x.data(), y.data(), x.size()) != GSL_SUCCESS)
      fail(errc::numeric_error, "interpolant init failed");
    xlo = x.front();
    xhi = x.back();
  }
  ~Spline() {
    if (s) gsl_spline_free(s);
    if (acc) gsl_interp_accel_free(acc);
  }
  Spline(const Spline&) = delete;
  Spline& operator=(const Spline&) = delete;

  double clampx(double x) const { return std::min(std::max(x, xlo), xhi); }
  double eval(double x) const { return gsl_spline_eval(s, clampx(x), acc); }
  double deriv(double x) const { return gsl_spline_eval_deriv(s, clampx(x), acc); }
  double deriv2(double x) const { return gsl_spline_eval_deriv2(s, clampx(x), acc); }
};

double scan_extremum(const std::function<double(double)>& f, double lo, double hi, int n,
                     bool minimize, double* arg_out) {
  // Grid scan followed by one golden-section refinement around the grid argmin.
  double best = minimize ? HUGE_VAL : -HUGE_VAL;
  int besti = 0;
  std::vector<double> vals(n + 1);
  for (int i = 0; i <= n; ++i) {
    double x = lo + (hi - lo) * i / n;
    vals[i] = f(x);
    if (minimize ? vals[i] < best : vals[i] > best) {
      best = vals[i];
      besti = i;
    }
  }
  double xm = lo + (hi - lo) * besti / n;
  double xa = lo + (hi - lo) * std::max(0, besti - 1) / n;
  double xb = lo + (hi - lo) * std::min(n, besti + 1) / n;
  double fm = minimize ? vals[besti] : -vals[besti];
  auto g = [&](double x) { return minimize ? f(x) : -f(x); };
  // The golden-section minimizer needs a strict interior bracket.
  if (besti > 0 && besti < n && fm < g(xa) && fm < g(xb)) {
    gsl_min_fminimizer* m = gsl_min_fminimizer_alloc(gsl_min_fminimizer_goldensection);
    if (m) {
      std::function<double(double)> gf = g;
      gsl_function F;
      F.function = [](double x, void* p) {
        return (*static_cast<std::function<double(double)>*>(p))(x);
      };
      F.params = &gf;
      if (gsl_min_fminimizer_set(m, &F, xm, xa, xb) == GSL_SUCCESS) {
        for (int it = 0; it < 100; ++it) {
          if (gsl_min_fminimizer_iterate(m) != GSL_SUCCESS) break;
          double a = gsl_min_fminimizer_x_lower(m), b = gsl_min_fminimizer_x_upper(m);
          if (gsl_min_test_interval(a, b, 1e-12, 0.0) == GSL_SUCCESS) break;
        }
        xm = gsl_min_fminimizer_x_minimum(m);
        fm = gsl_min_fminimizer_f_minimum(m);
      }
      gsl_min_fminimizer_free(m);
    }
  }
  if (arg_out) *arg_out = xm;
  return minimize ? fm : -fm;
}

double adaptive_integral(const std::function<double(double)>& f, double lo, double hi,
                         double abstol) {
  gsl_integration_workspace* w = gsl_integration_workspace_alloc(8192);
  if (!w) fail(errc::numeric_error, "quadrature workspace allocation failed");
  struct Ctx {
    const std::function<double(double)>* f;
  } ctx{&f};
  gsl_function F;
  F.function = [](double x, void* p) { return (*static_cast<Ctx*>(p)->f)(x); };
  F.params = &ctx;
  double result = 0, abserr = 0;
  int rc = gsl_integration_qag(&F, lo, hi, abstol, 1e-12, 8192, GSL_INTEG_GAUSS31, w, &result,
                               &abserr);
  gsl_integration_workspace_free(w);
  if (rc != GSL_SUCCESS && rc != GSL_EROUND)
    fail(errc::numeric_error, "adaptive quadrature did not converge");
  return result;
}

}  // namespace

struct Coefficient::Impl {
  CoeffModel model;
  double c = 0;  // exponential exponent parameter
  std::vector<double> tx, ty;
  std::unique_ptr<Spline> spline;
  double beta0 = 0;
  double min_sample = 0;
};

Coefficient Coefficient::exponential(double c) {
  if (!std::isfinite(c)) fail(errc::invalid_coefficient, "non-finite exponent");
  auto impl = std::make_shared<Impl>();
  impl->model = CoeffModel::exponential;
  impl->c = c;
  impl->beta0 = std::max(1.0, std::exp(2 * c * kPi));
  impl->min_sample = std::min(1.0, std::exp(2 * c * kPi));
  Coefficient out;
  out.impl_ = std::move(impl);
  return out;
}

Coefficient Coefficient::tabulated(std::vector<double> x, std::vector<double> rho) {
  if (x.size() != rho.size() || x.size() < 3)
    fail(errc::invalid_spec, "tabulated coefficient needs >= 3 (x, rho) pairs");
  for (size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1])) fail(errc::invalid_spec, "tabulated grid must be strictly increasing");
  if (std::abs(x.front()) > 1e-9 || std::abs(x.back() - kPi) > 1e-9)
    fail(errc::invalid_spec, "tabulated grid must span [0, pi]");
  x.front() = 0.0;
  x.back() = kPi;
  double mins = HUGE_VAL;
  for (double v : rho) {
    if (!std::isfinite(v) || v <= 0) fail(errc::invalid_coefficient, "rho samples must be positive");
    mins = std::min(mins, v);
  }
  auto impl = std::make_shared<Impl>();
  impl->model = CoeffModel::tabulated;
  impl->tx = std::move(x);
  impl->ty = std::move(rho);
  impl->spline = std::make_unique<Spline>(gsl_interp_cspline, impl->tx, impl->ty);
  impl->min_sample = mins;
  const Spline& s = *impl->spline;
  impl->beta0 = scan_extremum([&](double xx) { return s.eval(xx); }, 0, kPi, 4096, false, nullptr);
  Coefficient out;
  out.impl_ = std::move(impl);
  return out;
}

double Coefficient::rho(double x) const {
  return impl_->model == CoeffModel::exponential ? std::exp(2 * impl_->c * x)
                                                 : impl_->spline->eval(x);
}

double Coefficient::drho(double x) const {
  return impl_->model == CoeffModel::exponential ? 2 * impl_->c * std::exp(2 * impl_->c * x)
                                                 : impl_->spline->deriv(x);
}

double Coefficient::d2rho(double x) const {
  return impl_->model == CoeffModel::exponential ? 4 * impl_->c * impl_->c * std::exp(2 * impl_->c * x)
                                                 : impl_->spline->deriv2(x);
}

double Coefficient::potential(double x) const {
  double r = rho(x);
  if (!(r > 0)) fail(errc::invalid_coefficient, "rho <= 0 inside the domain");
  double lr = drho(x) / r;
  return 0.5 * d2rho(x) / r - 0.25 * lr * lr;
}

double Coefficient::beta0() const { return impl_->beta0; }
CoeffModel Coefficient::model() const { return impl_->model; }

double Coefficient::exponent() const {
  if (impl_->model != CoeffModel::exponential)
    fail(errc::domain_error, "exponent() is only defined for the exponential model");
  return impl_->c;
}

double Coefficient::min_sample() const { return impl_->min_sample; }

SpectralConstants spectral_constants(const Coefficient& c) {
  SpectralConstants out;
  auto eta = [&](double x) { return c.potential(x); };
  out.rho0 = scan_extremum(eta, 0, kPi, 4096, true, &out.potential_argmin);
  out.potential_integral = adaptive_integral(eta, 0, kPi, 1e-11);
  out.rho1 = 2.0 / kPi * out.potential_integral;
  out.positivity_holds = out.rho0 > 0;
  out.rho2 = std::sqrt(out.rho0 + 1) - 1;
  out.rho3 = out.rho0 / (1 + out.rho0);
  out.beta0 = c.beta0();
  return out;
}

SpectralConstants spectral_constants(const Coefficient& c, double a1_over_b1,
                                     double a2_over_b2) {
  SpectralConstants out = spectral_constants(c);
  if (!(std::isfinite(a1_over_b1) && std::isfinite(a2_over_b2)))
    fail(errc::invalid_bc, "rho4 needs finite boundary ratios (both betas positive)");
  out.rho4 = (a1_over_b1 + a2_over_b2 + 1 + out.potential_integral) / kPi;
  out.has_rho4 = true;
  return out;
}

SeismicIngest from_seismic(const std::function<double(double)>& omega,
                           const std::function<double(double)>& nu, double z_max, int samples) {
  if (!(z_max > 0)) fail(errc::invalid_profile, "z_max must be positive");
  if (samples < 3) fail(errc::invalid_spec, "need >= 3 resample points");

  const int m = std::max(4 * samples, 4096);  // fine grid for the travel-time integral
  std::vector<double> z(m + 1), xacc(m + 1), slo(m + 1);
  auto slowness = [&](double zz) {
    double w = omega(zz), n = nu(zz);
    if (!(std::isfinite(w) && std::isfinite(n)) || w <= 0 || n <= 0)
      fail(errc::invalid_profile, "omega and nu must be positive over [0, z_max]");
    return std::sqrt(w / n);
  };
  for (int i = 0; i <= m; ++i) {
    z[i] = z_max * i / m;
    slo[i] = slowness(z[i]);
  }
  xacc[0] = 0;
  for (int i = 1; i <= m; ++i) {
    double mid = slowness(0.5 * (z[i - 1] + z[i]));
    xacc[i] = xacc[i - 1] + (z[i] - z[i - 1]) / 6.0 * (slo[i - 1] + 4 * mid + slo[i]);
  }
  double total = xacc.back();
  if (!(total > 0)) fail(errc::degenerate_profile, "travel-time coordinate has zero extent");

  SeismicIngest out;
  out.travel_max = total;
  out.scale = kPi / total;
  for (int i = 0; i <= m; ++i) xacc[i] *= out.scale;
  xacc.front() = 0.0;
  xacc.back() = kPi;

  Spline inverse(gsl_interp_steffen, xacc, z);
  out.x.resize(samples);
  out.rho.resize(samples);
  for (int j = 0; j < samples; ++j) {
    double xj = kPi * j / (samples - 1);
    double zj = inverse.eval(xj);
    out.x[j] = xj;
    out.rho[j] = std::sqrt(omega(zj) * nu(zj));
  }
  out.coeff = Coefficient::tabulated(out.x, out.rho);
  return out;
}

SeismicIngest from_seismic_table(const std::vector<double>& z, const std::vector<double>& omega,
                                 const std::vector<double>& nu, int samples) {
  if (z.size() != omega.size() || z.size() != nu.size() || z.size() < 3)
    fail(errc::invalid_spec, "profile table needs >= 3 aligned (z, omega, nu) rows");
  for (size_t i = 1; i < z.size(); ++i)
    if (!(z[i] > z[i - 1])) fail(errc::invalid_profile, "z column must be strictly increasing");
  if (std::abs(z.front()) > 1e-12) fail(errc::invalid_profile, "profile must start at z = 0");
  for (size_t i = 0; i < z.size(); ++i)
    if (omega[i] <= 0 || nu[i] <= 0) fail(errc::invalid_profile, "omega, nu must be positive");
  Spline sw(gsl_interp_steffen, z, omega);
  Spline sn(gsl_interp_steffen, z, nu);
  return from_seismic([&](double zz) { return sw.eval(zz); }, [&](double zz) { return sn.eval(zz); },
                      z.back(), samples);
}

Coefficient load_coefficient_csv(const std::filesystem::path& path) {
  auto csv = io::read_csv(path);
  int cx = csv.col("x"), cr = csv.col("rho");
  if (cx < 0 || cr < 0) fail(errc::io_error, path.string() + ": expected columns x,rho");
  std::vector<double> x, r;
  for (const auto& row : csv.rows) {
    x.push_back(row[cx]);
    r.push_back(row[cr]);
  }
  return Coefficient::tabulated(std::move(x), std::move(r));
}

SeismicIngest load_seismic_csv(const std::filesystem::path& path, int samples) {
  auto csv = io::read_csv(path);
  int cz = csv.col("z"), cw = csv.col("omega"), cn = csv.col("nu");
  if (cz < 0 || cw < 0 || cn < 0)
    fail(errc::io_error, path.string() + ": expected columns z,omega,nu");
  std::vector<double> z, w, n;
  for (const auto& row : csv.rows) {
    z.push_back(row[cz]);
    w.push_back(row[cw]);
    n.push_back(row[cn]);
  }
  return from_seismic_table(z, w, n, samples);
}

}  // namespace rhowave
