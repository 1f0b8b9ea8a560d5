#include "rhowave/wave_spectrum.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "rhowave/errors.hpp"

namespace rhowave {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSpectrumTol = 1e-9;
}  // namespace

double PeriodSpec::T() const { return 2.0 * std::numbers::pi * static_cast<double>(a) / b; }

double PeriodSpec::nu(int j) const { return static_cast<double>(j) * b / a; }

PeriodSpec reduce_period(long long a, long long b) {
  if (a <= 0 || b <= 0) fail(errc::invalid_period, "period must be 2*pi*a/b with a, b positive");
  long long g = std::gcd(a, b);
  return PeriodSpec{a / g, b / g};
}

EssentialWindow essential_window(int case_tag, const SpectralConstants& c) {
  if (!c.positivity_holds)
    fail(errc::assumption_a1_violated, "essential window needs a positive potential floor");
  switch (case_tag) {
    case 1:
    case 4: return {2.0 * c.rho2, c.rho1};
    case 2:
    case 3: return {c.rho3, c.rho1};
    case 5:
      if (!c.has_rho4) fail(errc::invalid_case, "case 5 window needs both boundary ratios");
      return {2.0 * c.rho2, 2.0 * c.rho4};
    default: fail(errc::invalid_case, "unclassified boundary data");
  }
}

SpectrumTable::SpectrumTable(std::shared_ptr<const EigenBasis> basis, PeriodSpec period, int jmax,
                             SpectralConstants consts, int n0)
    : basis_(std::move(basis)), period_(period), jmax_(jmax), n0_(n0), consts_(consts) {
  if (!basis_ || basis_->size() == 0) fail(errc::invalid_spec, "spectrum needs a nonempty basis");
  if (jmax_ < 0) fail(errc::invalid_truncation, "temporal truncation must be nonnegative");
  if (n0_ < 1) fail(errc::invalid_spec, "certified threshold label must be at least 1");
  kmax_ = 0;
  for (const auto& m : basis_->modes()) kmax_ = std::max(kmax_, m.label);
}

SpectrumTable build_spectrum(std::shared_ptr<const EigenBasis> basis, PeriodSpec period, int jmax,
                             SpectralConstants consts, int n0) {
  return SpectrumTable(std::move(basis), period, jmax, consts, n0);
}

double SpectrumTable::lambda_sq(int label) const {
  int i = basis_->index_of_label(label);
  if (i < 0) fail(errc::invalid_spec, "label outside the computed basis");
  return basis_->modes()[i].lambda_sq;
}

double SpectrumTable::lambda_jk(int j, int label) const {
  double nu = period_.nu(std::abs(j));
  return lambda_sq(label) - nu * nu;
}

bool SpectrumTable::resonant() const {
  // integer pattern: nu_j = k always solvable once k is a multiple of b.
  // half-integer pattern: a*(2k+1) = 2*j*b needs an even a.
  if (pattern_shift() == 0.0) return true;
  return period_.a % 2 == 0;
}

double SpectrumTable::gap_to(double mu) const {
  double best = kInf;
  for (const auto& m : basis_->modes())
    for (int j = 0; j <= jmax_; ++j) {
      double nu = period_.nu(j);
      best = std::min(best, std::abs(m.lambda_sq - nu * nu - mu));
    }
  return best;
}

std::pair<int, int> SpectrumTable::nearest(double mu) const {
  double best = kInf;
  std::pair<int, int> who{0, basis_->modes().front().label};
  for (const auto& m : basis_->modes())
    for (int j = 0; j <= jmax_; ++j) {
      double nu = period_.nu(j);
      double d = std::abs(m.lambda_sq - nu * nu - mu);
      if (d < best) {
        best = d;
        who = {j, m.label};
      }
    }
  return who;
}

double SpectrumTable::gap_resolution(double mu) const {
  double tol = kSpectrumTol;
  int idx = basis_->index_of_label(nearest(mu).second);
  if (idx >= 0) {
    const auto& m = basis_->mode(idx);
    tol = std::max(tol, 2.0 * m.lambda * m.err_est);
  }
  return tol;
}

TailCertificate certify_accumulation(const SpectrumTable& table, double mu) {
  const auto& consts = table.consts();
  const int tag = table.case_tag();
  EssentialWindow win = essential_window(tag, consts);  // validates A1 and rho4

  TailCertificate cert;
  const double a = static_cast<double>(table.period().a);
  const double shift = table.pattern_shift();
  const int kt = table.kmax() + 1;  // first label outside the computed window
  const double pt = kt + shift;

  switch (tag) {
    case 1:
    case 4: cert.theta_bar = std::sqrt(kt * static_cast<double>(kt) + consts.rho1) - kt; break;
    case 2:
    case 3: cert.theta_bar = consts.rho1 / (std::sqrt(pt * pt + consts.rho1) + pt); break;
    default: cert.theta_bar = std::sqrt(kt * static_cast<double>(kt) + 2.0 * consts.rho4) - kt;
  }

  bool theta_valid = tag != 5 || kt >= table.n0();

  // in-window labels at out-of-window frequencies: everything sits below mu
  // once the first excluded frequency clears the largest lambda_k^2
  double lam_sq_max = -kInf;
  for (const auto& m : table.basis().modes()) lam_sq_max = std::max(lam_sq_max, m.lambda_sq);
  double nu_next = table.period().nu(table.jmax() + 1);
  cert.floor_a = mu - lam_sq_max + nu_next * nu_next;

  // out-of-window labels: the pattern keeps a*lambda_k at least g away from
  // any a*nu_j unless exactly resonant
  const double g = shift == 0.0 ? 1.0 : 0.5;
  cert.floor_b_pos = g * (2.0 * pt * a - g) / (a * a) - mu;
  const double slack = g - a * cert.theta_bar;
  cert.floor_b_neg =
      slack > 0 ? mu + slack * (2.0 * pt * a + g + a * cert.theta_bar) / (a * a) : -kInf;
  cert.floor_res = table.resonant() ? mu - win.hi : kInf;

  cert.tail_floor =
      std::min(std::min(cert.floor_a, cert.floor_res), std::min(cert.floor_b_pos, cert.floor_b_neg));
  double delta = table.gap_to(mu);
  // compare against a certified lower bound of the window minimum: when an
  // accumulation limit ties the in-window gap exactly, the discretized
  // eigenvalue sits above the limit by its truncation error and a strict
  // comparison could never conclude at any resolution
  double eps = 1e-12;
  int idx = table.basis().index_of_label(table.nearest(mu).second);
  if (idx >= 0) {
    const auto& m = table.basis().mode(idx);
    eps += 2.0 * m.lambda * m.err_est;
  }
  cert.conclusive = theta_valid && cert.tail_floor >= delta - eps && std::isfinite(delta);
  return cert;
}

MuReport assess_mu(const SpectrumTable& table, double mu) {
  MuReport rep;
  rep.mu = mu;
  rep.delta = table.gap_to(mu);
  auto who = table.nearest(mu);
  rep.j_near = who.first;
  rep.k_near = who.second;
  rep.in_spectrum = rep.delta < table.gap_resolution(mu);
  EssentialWindow win = essential_window(table.case_tag(), table.consts());
  rep.above_window = mu > win.hi;
  rep.tail = certify_accumulation(table, mu);
  rep.admissible = rep.above_window && !rep.in_spectrum && rep.tail.conclusive;
  return rep;
}

}  // namespace rhowave
