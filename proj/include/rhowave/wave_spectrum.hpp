#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "rhowave/coefficient.hpp"
#include "rhowave/sturm_liouville.hpp"

namespace rhowave {

// Rational period T = 2*pi*a/b kept in lowest terms; the temporal frequencies
// are nu_j = j*b/a.
struct PeriodSpec {
  long long a = 1;
  long long b = 1;
  double T() const;
  double nu(int j) const;
};

PeriodSpec reduce_period(long long a, long long b);

// Interval that traps every accumulation point of {lambda_k^2 - nu_j^2}.
struct EssentialWindow {
  double lo = 0;
  double hi = 0;
};

EssentialWindow essential_window(int case_tag, const SpectralConstants& consts);

// Finite window of the wave operator's spectrum lambda_jk = lambda_k^2 - nu_j^2
// for |j| <= jmax and the labels carried by the basis, plus the data needed to
// reason about everything outside that window.
class SpectrumTable {
 public:
  SpectrumTable(std::shared_ptr<const EigenBasis> basis, PeriodSpec period, int jmax,
                SpectralConstants consts, int n0);

  const EigenBasis& basis() const { return *basis_; }
  std::shared_ptr<const EigenBasis> basis_ptr() const { return basis_; }
  const PeriodSpec& period() const { return period_; }
  int jmax() const { return jmax_; }
  int kmax() const { return kmax_; }
  int n0() const { return n0_; }
  const SpectralConstants& consts() const { return consts_; }
  int case_tag() const { return basis_->bc().case_tag; }
  double pattern_shift() const { return basis_->bc().pattern_shift; }

  double lambda_sq(int label) const;
  double lambda_jk(int j, int label) const;

  // whether exact temporal resonances nu_j = k + shift exist among tail labels
  bool resonant() const;

  // distance from mu to the computed window, with the attaining pair
  double gap_to(double mu) const;
  std::pair<int, int> nearest(double mu) const;  // (j, label)
  // numerical uncertainty of that distance: the attaining eigenvalue's
  // extrapolation error on the lambda^2 scale, floored at 1e-9
  double gap_resolution(double mu) const;

 private:
  std::shared_ptr<const EigenBasis> basis_;
  PeriodSpec period_;
  int jmax_;
  int kmax_;
  int n0_;
  SpectralConstants consts_;
};

SpectrumTable build_spectrum(std::shared_ptr<const EigenBasis> basis, PeriodSpec period, int jmax,
                             SpectralConstants consts, int n0 = 1);

// Lower bounds on |lambda_jk - mu| over all (j, k) outside the computed window.
// Components are +inf when the corresponding tail region is empty and negative
// or NaN-free but non-certifying when the data cannot exclude it.
struct TailCertificate {
  double theta_bar = 0;  // certified deviation bound from the first tail label on
  double floor_a = 0;    // k in window, |j| > jmax
  double floor_b_pos = 0;  // tail k, frequencies below the pattern
  double floor_b_neg = 0;  // tail k, frequencies above the pattern
  double floor_res = 0;    // tail k at exact resonance
  double tail_floor = 0;
  bool conclusive = false;  // tail_floor >= computed gap, so the gap is exact
};

TailCertificate certify_accumulation(const SpectrumTable& table, double mu);

struct MuReport {
  double mu = 0;
  double delta = 0;  // gap over the computed window
  int j_near = 0;
  int k_near = 0;
  bool in_spectrum = false;
  bool above_window = false;
  TailCertificate tail;
  bool admissible = false;
};

MuReport assess_mu(const SpectrumTable& table, double mu);

}  // namespace rhowave
