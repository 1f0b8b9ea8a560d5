#include "rhowave/working_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rhowave/errors.hpp"

namespace rhowave {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGapTol = 1e-9;
}  // namespace

void CoeffField::scale(double t) {
  for (auto& v : a) v *= t;
}

void CoeffField::axpy(double t, const CoeffField& v) {
  for (size_t i = 0; i < a.size(); ++i) a[i] += t * v.a[i];
}

double dot(const CoeffField& u, const CoeffField& v) {
  double s = 0;
  for (size_t i = 0; i < u.a.size(); ++i) s += u.a[i] * v.a[i];
  return s;
}

double l2_norm(const CoeffField& u) { return std::sqrt(dot(u, u)); }

WorkingSpace::WorkingSpace(std::shared_ptr<const SpectrumTable> table, double mu)
    : table_(std::move(table)), mu_(mu) {
  if (!table_) fail(errc::invalid_spec, "working space needs a spectrum table");
  delta_ = table_->gap_to(mu_);
  if (delta_ < std::max(kGapTol, table_->gap_resolution(mu_)))
    fail(errc::mu_in_spectrum, "shift parameter collides with the computed spectrum");
  for (const auto& m : table_->basis().modes()) labels_.push_back(m.label);
  int J = table_->jmax(), K = nmodes();
  shift_.resize(static_cast<size_t>(J + 1) * K);
  for (int j = 0; j <= J; ++j) {
    double nu = table_->period().nu(j);
    for (int i = 0; i < K; ++i)
      shift_[static_cast<size_t>(j) * K + i] = table_->basis().modes()[i].lambda_sq - nu * nu - mu_;
  }
}

double WorkingSpace::energy_sq(const CoeffField& u) const {
  double acc = 0;
  for (int j = 0; j <= u.jmax; ++j)
    for (int i = 0; i < u.nmodes; ++i) {
      double w = std::abs(shift(j, i));
      acc += w * u.c(j, i) * u.c(j, i);
      if (j >= 1) acc += w * u.s(j, i) * u.s(j, i);
    }
  return acc;
}

double WorkingSpace::energy_norm(const CoeffField& u) const { return std::sqrt(energy_sq(u)); }

void WorkingSpace::project_sign(CoeffField& u, int sign) const {
  for (int j = 0; j <= u.jmax; ++j)
    for (int i = 0; i < u.nmodes; ++i)
      if ((shift(j, i) < 0 ? -1 : 1) != sign) {
        u.c(j, i) = 0;
        if (j >= 1) u.s(j, i) = 0;
      }
}

void WorkingSpace::project_window(CoeffField& u, int m) const {
  for (int j = 0; j <= u.jmax; ++j)
    for (int i = 0; i < u.nmodes; ++i)
      if (labels_[i] > m || j > m) {
        u.c(j, i) = 0;
        if (j >= 1) u.s(j, i) = 0;
      }
}

void WorkingSpace::project_constrained_minus(CoeffField& u, int m) const {
  for (int j = 0; j <= u.jmax; ++j)
    for (int i = 0; i < u.nmodes; ++i)
      if (shift(j, i) < 0 && (labels_[i] > m || j > m)) {
        u.c(j, i) = 0;
        if (j >= 1) u.s(j, i) = 0;
      }
}

void WorkingSpace::project_constrained_plus(CoeffField& u, int l) const {
  for (int j = 0; j <= u.jmax; ++j)
    for (int i = 0; i < u.nmodes; ++i)
      if (shift(j, i) > 0 && (labels_[i] > l || j > l)) {
        u.c(j, i) = 0;
        if (j >= 1) u.s(j, i) = 0;
      }
}

void WorkingSpace::project_constrained_plus_complement(CoeffField& u, int l) const {
  for (int j = 0; j <= u.jmax; ++j)
    for (int i = 0; i < u.nmodes; ++i)
      if (!(shift(j, i) > 0 && (labels_[i] > l || j > l))) {
        u.c(j, i) = 0;
        if (j >= 1) u.s(j, i) = 0;
      }
}

void WorkingSpace::project_resonant(CoeffField& u) const {
  const long long a = table_->period().a, b = table_->period().b;
  for (int j = 0; j <= u.jmax; ++j)
    for (int i = 0; i < u.nmodes; ++i)
      if (labels_[i] < 1 || static_cast<long long>(labels_[i]) * a != j * b) {
        u.c(j, i) = 0;
        if (j >= 1) u.s(j, i) = 0;
      }
}

int WorkingSpace::dim_minus() const {
  int n = 0;
  for (int j = 0; j <= jmax(); ++j)
    for (int i = 0; i < nmodes(); ++i)
      if (shift(j, i) < 0) n += j == 0 ? 1 : 2;
  return n;
}

double WorkingSpace::lambda_plus(int l) const {
  if (l < 1 || l >= std::min(jmax(), table_->kmax()))
    fail(errc::invalid_truncation, "window must leave part of the computed lattice outside");
  double best = kInf;
  for (int j = 0; j <= jmax(); ++j)
    for (int i = 0; i < nmodes(); ++i)
      if (shift(j, i) > 0 && (labels_[i] > l || j > l)) best = std::min(best, shift(j, i) + mu_);

  // the minimum must be attained inside the computed lattice: values beyond it
  // are either below mu (frequency tail) or above the pattern floor (label tail)
  const double a = static_cast<double>(table_->period().a);
  const double g = table_->pattern_shift() == 0.0 ? 1.0 : 0.5;
  const double pt = table_->kmax() + 1 + table_->pattern_shift();
  double label_tail_floor = g * (2.0 * pt * a - g) / (a * a);
  double lam_sq_max = -kInf;
  for (const auto& m : table_->basis().modes()) lam_sq_max = std::max(lam_sq_max, m.lambda_sq);
  double nu_next = table_->period().nu(jmax() + 1);
  bool freq_tail_below = lam_sq_max - nu_next * nu_next <= mu_;
  if (!freq_tail_below || best > label_tail_floor)
    fail(errc::truncation_error, "computed lattice too small to pin the next spectrum value");
  return best;
}

double WorkingSpace::zeta(int l, double p) const {
  if (!(p > 0) || !(p < 1)) fail(errc::invalid_spec, "exponent must lie in (0, 1)");
  double beta0 = table_->consts().beta0;
  double T = table_->period().T();
  double C = std::sqrt(beta0 * T * std::numbers::pi / delta_);
  double theta = 2.0 * p / (p + 1.0);
  double gap_up = lambda_plus(l) - mu_;
  return std::pow(C, 1.0 - theta) * std::pow(gap_up, -0.5 * theta);
}

Transform::Transform(std::shared_ptr<const SpectrumTable> table, int nt)
    : table_(std::move(table)), nt_(nt) {
  if (!table_) fail(errc::invalid_spec, "transform needs a spectrum table");
  int J = table_->jmax();
  if (nt_ <= 2 * J)
    fail(errc::aliasing_error, "need more than two time samples per retained frequency");
  const EigenBasis& b = table_->basis();
  nx_ = static_cast<int>(b.x().size());
  cos_.resize(static_cast<size_t>(nt_) * J);
  sin_.resize(static_cast<size_t>(nt_) * J);
  for (int s = 0; s < nt_; ++s)
    for (int j = 1; j <= J; ++j) {
      double ang = 2.0 * std::numbers::pi * j * s / nt_;
      cos_[static_cast<size_t>(s) * J + (j - 1)] = std::cos(ang);
      sin_[static_cast<size_t>(s) * J + (j - 1)] = std::sin(ang);
    }
  int K = b.size();
  phi_.resize(static_cast<size_t>(K) * nx_);
  wrho_.resize(nx_);
  for (int q = 0; q < nx_; ++q) wrho_[q] = b.h() * b.node_weight()[q] * b.rho()[q];
  for (int i = 0; i < K; ++i)
    for (int q = 0; q < nx_; ++q)
      phi_[static_cast<size_t>(i) * nx_ + q] = b.z(i)[q] / std::sqrt(b.rho()[q]);
}

double Transform::time(int s) const { return s * table_->period().T() / nt_; }

std::vector<double> Transform::synthesize(const CoeffField& u) const {
  int J = table_->jmax(), K = table_->basis().size();
  if (u.jmax != J || u.nmodes != K) fail(errc::invalid_spec, "coefficient shape mismatch");
  double T = table_->period().T();
  double c0 = 1.0 / std::sqrt(T), cj = std::sqrt(2.0 / T);
  std::vector<double> field(static_cast<size_t>(nt_) * nx_, 0.0);
  std::vector<double> ck(K);
  for (int s = 0; s < nt_; ++s) {
    for (int i = 0; i < K; ++i) {
      double v = c0 * u.c(0, i);
      for (int j = 1; j <= J; ++j)
        v += cj * (u.c(j, i) * cos_[static_cast<size_t>(s) * J + (j - 1)] +
                   u.s(j, i) * sin_[static_cast<size_t>(s) * J + (j - 1)]);
      ck[i] = v;
    }
    double* row = field.data() + static_cast<size_t>(s) * nx_;
    for (int i = 0; i < K; ++i) {
      const double* ph = phi_.data() + static_cast<size_t>(i) * nx_;
      for (int q = 0; q < nx_; ++q) row[q] += ck[i] * ph[q];
    }
  }
  return field;
}

CoeffField Transform::analyze(const std::vector<double>& field) const {
  int J = table_->jmax(), K = table_->basis().size();
  if (field.size() != static_cast<size_t>(nt_) * nx_)
    fail(errc::invalid_spec, "field sample count mismatch");
  double T = table_->period().T();
  CoeffField u(J, K);
  std::vector<double> proj(static_cast<size_t>(nt_) * K);
  for (int s = 0; s < nt_; ++s) {
    const double* row = field.data() + static_cast<size_t>(s) * nx_;
    for (int i = 0; i < K; ++i) {
      const double* ph = phi_.data() + static_cast<size_t>(i) * nx_;
      double acc = 0;
      for (int q = 0; q < nx_; ++q) acc += wrho_[q] * row[q] * ph[q];
      proj[static_cast<size_t>(s) * K + i] = acc;
    }
  }
  double f0 = std::sqrt(T) / nt_, fj = std::sqrt(2.0 * T) / nt_;
  for (int i = 0; i < K; ++i) {
    double acc0 = 0;
    for (int s = 0; s < nt_; ++s) acc0 += proj[static_cast<size_t>(s) * K + i];
    u.c(0, i) = f0 * acc0;
    for (int j = 1; j <= J; ++j) {
      double ac = 0, as = 0;
      for (int s = 0; s < nt_; ++s) {
        ac += proj[static_cast<size_t>(s) * K + i] * cos_[static_cast<size_t>(s) * J + (j - 1)];
        as += proj[static_cast<size_t>(s) * K + i] * sin_[static_cast<size_t>(s) * J + (j - 1)];
      }
      u.c(j, i) = fj * ac;
      u.s(j, i) = fj * as;
    }
  }
  return u;
}

double Transform::weighted_Lr_norm(const std::vector<double>& field, double r) const {
  if (!(r >= 1.0)) fail(errc::invalid_spec, "integrability exponent must be at least 1");
  if (field.size() != static_cast<size_t>(nt_) * nx_)
    fail(errc::invalid_spec, "field sample count mismatch");
  double T = table_->period().T();
  double acc = 0;
  for (int s = 0; s < nt_; ++s) {
    const double* row = field.data() + static_cast<size_t>(s) * nx_;
    double slice = 0;
    for (int q = 0; q < nx_; ++q) slice += wrho_[q] * std::pow(std::abs(row[q]), r);
    acc += slice;
  }
  acc *= T / nt_;
  return std::pow(acc, 1.0 / r);
}

}  // namespace rhowave
