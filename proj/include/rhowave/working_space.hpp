#pragma once

#include <memory>
#include <vector>

#include "rhowave/wave_spectrum.hpp"

namespace rhowave {

// Real trig-pair coefficients over the (frequency, mode) lattice: a cosine
// block for j = 0..jmax and a sine block for j = 1..jmax, each nmodes wide.
// The basis functions behind them are T^{-1/2} phi_k and sqrt(2/T) cos/sin(nu_j t) phi_k,
// orthonormal for the rho-weighted space-time inner product.
struct CoeffField {
  int jmax = 0;
  int nmodes = 0;
  std::vector<double> a;

  CoeffField() = default;
  CoeffField(int jmax_, int nmodes_) : jmax(jmax_), nmodes(nmodes_) {
    a.assign(static_cast<size_t>(2 * jmax + 1) * nmodes, 0.0);
  }

  int size() const { return static_cast<int>(a.size()); }
  double& c(int j, int i) { return a[static_cast<size_t>(j) * nmodes + i]; }
  double c(int j, int i) const { return a[static_cast<size_t>(j) * nmodes + i]; }
  double& s(int j, int i) {
    return a[static_cast<size_t>(jmax + j) * nmodes + i];
  }
  double s(int j, int i) const { return a[static_cast<size_t>(jmax + j) * nmodes + i]; }

  void scale(double t);
  void axpy(double t, const CoeffField& v);  // this += t*v
  void set_zero() { std::fill(a.begin(), a.end(), 0.0); }
};

double dot(const CoeffField& u, const CoeffField& v);
double l2_norm(const CoeffField& u);

// Spectral-side view of the space at a fixed admissible mu: per-pair shifts
// lambda_jk - mu, the induced energy norm, the sign split, and the finite
// windows used by the constrained searches.
class WorkingSpace {
 public:
  WorkingSpace(std::shared_ptr<const SpectrumTable> table, double mu);

  const SpectrumTable& table() const { return *table_; }
  std::shared_ptr<const SpectrumTable> table_ptr() const { return table_; }
  double mu() const { return mu_; }
  double delta() const { return delta_; }
  int jmax() const { return table_->jmax(); }
  int nmodes() const { return static_cast<int>(labels_.size()); }
  int label(int i) const { return labels_[i]; }

  CoeffField zero() const { return CoeffField(jmax(), nmodes()); }
  double shift(int j, int i) const { return shift_[static_cast<size_t>(j) * nmodes() + i]; }

  double energy_sq(const CoeffField& u) const;
  double energy_norm(const CoeffField& u) const;

  // keep only coefficients whose shift sign matches (-1 or +1)
  void project_sign(CoeffField& u, int sign) const;
  // keep only the finite window: label <= m and j <= m
  void project_window(CoeffField& u, int m) const;
  // negative part restricted to the window, positive part kept whole
  void project_constrained_minus(CoeffField& u, int m) const;
  // positive part restricted to the window, negative part kept whole
  void project_constrained_plus(CoeffField& u, int l) const;
  // positive part outside the window only (orthogonal complement of the above)
  void project_constrained_plus_complement(CoeffField& u, int l) const;
  // keep only exactly resonant pairs: label * a == j * b with label >= 1
  void project_resonant(CoeffField& u) const;

  int dim_minus() const;  // real dimension of the negative subspace

  // smallest spectrum value above mu among pairs outside the l-window
  double lambda_plus(int l) const;
  // contraction bound for the positive-side reduction at window size l
  double zeta(int l, double p) const;

 private:
  std::shared_ptr<const SpectrumTable> table_;
  double mu_;
  double delta_;
  std::vector<int> labels_;
  std::vector<double> shift_;
};

// Uniform time sampling t_s = s T / nt paired with the spatial eigenbasis; the
// round trip analyze(synthesize(u)) is exact once nt > 2*jmax.
class Transform {
 public:
  Transform(std::shared_ptr<const SpectrumTable> table, int nt);

  const SpectrumTable& table() const { return *table_; }
  const EigenBasis& basis() const { return table_->basis(); }
  int nt() const { return nt_; }
  int nx() const { return nx_; }
  double time(int s) const;

  // field layout: value at (t_s, x_i) lives at index s*nx + i
  std::vector<double> synthesize(const CoeffField& u) const;
  CoeffField analyze(const std::vector<double>& field) const;

  // (integral of |u|^r against the density over one period)^(1/r), r >= 1
  double weighted_Lr_norm(const std::vector<double>& field, double r) const;

 private:
  std::shared_ptr<const SpectrumTable> table_;
  int nt_;
  int nx_;
  std::vector<double> cos_, sin_;   // nt x jmax tables of cos/sin(2 pi j s / nt)
  std::vector<double> phi_;         // nmodes x nx values of phi_k(x_i)
  std::vector<double> wrho_;        // h * w_i * rho_i quadrature weights
};

}  // namespace rhowave
