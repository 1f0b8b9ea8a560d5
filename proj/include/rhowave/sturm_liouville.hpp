#pragma once

#include <vector>

#include "rhowave/coefficient.hpp"

namespace rhowave {

// Separated boundary data for the physical problem
//   b1 u_x(0) + a1 u(0) = 0,   b2 u_x(pi) + a2 u(pi) = 0,
// carried together with its transformed-by-z = sqrt(rho) u counterpart
//   alpha1 z(0) - beta1 z'(0) = 0,   alpha2 z(pi) + beta2 z'(pi) = 0,
// where alpha1 = a1 - (b1/2) rho'(0)/rho(0), beta1 = -b1,
//       alpha2 = a2 - (b2/2) rho'(pi)/rho(pi), beta2 = b2.
// Admissibility: alpha_i >= 0, beta_i >= 0, alpha_i + beta_i > 0.
//
// case_tag follows the end types (D = beta 0, N = alpha 0, R = both positive):
//   1 = D/D,  2 = D/N,  3 = N/D (solved as case 2 on the reflected coefficient),
//   4 = N/N,  5 = R/R.
// Mixed D/R ends are admissible but outside this five-way classification and are
// rejected with unsupported-case.
struct RobinBC {
  double a1 = 0, b1 = 0, a2 = 0, b2 = 0;
  double alpha1 = 0, beta1 = 0, alpha2 = 0, beta2 = 0;
  int case_tag = 0;
  bool reflected = false;     // case 3: outputs are mapped back through x -> pi - x
  double pattern_shift = 0;   // leading-order eigenvalue pattern is k + shift
  bool extra_mode = false;    // cases 4/5 may carry one eigenvalue below the pattern
};

RobinBC boundary_transform(const Coefficient& coeff, double a1, double b1, double a2, double b2);
// Classification of already-transformed data.
RobinBC classify_transformed(double alpha1, double beta1, double alpha2, double beta2);

struct EigenMode {
  int label = 0;         // k in the case's labeling
  double lambda = 0;     // Richardson-extrapolated sqrt of the eigenvalue
  double lambda_sq = 0;  // extrapolated eigenvalue of the transformed problem
  double theta = 0;      // lambda - (label + pattern_shift)
  double err_est = 0;    // |lambda(2N) - lambda(N)| / 3
  bool below_zero = false;
};

// Discrete eigenbasis of z'' + (lambda^2 - eta(x)) z = 0 under the transformed
// boundary conditions, on a uniform grid of N intervals over [0, pi].
//
// Second-order central differences; Dirichlet ends drop their node; beta > 0 ends
// keep theirs via ghost-point elimination with a half-weight boundary row, which
// stays symmetric after the diag(1/sqrt(w)) similarity. Eigenvalues are bisected
// with Sturm counts at both N and 2N and Richardson-extrapolated; eigenvectors are
// inverse-iterated on the N grid and re-orthonormalized (modified Gram-Schmidt) in
// the trapezoid inner product <f, g> = h * sum w_i f_i g_i.
class EigenBasis {
 public:
  int grid_n() const { return grid_n_; }
  double h() const { return h_; }
  int nodes() const { return static_cast<int>(x_.size()); }
  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& node_weight() const { return w_; }  // 1 interior, 1/2 kept ends
  const std::vector<double>& rho() const { return rho_; }
  const std::vector<double>& sqrt_rho() const { return sqrt_rho_; }

  int size() const { return static_cast<int>(modes_.size()); }
  const EigenMode& mode(int i) const { return modes_[i]; }
  const std::vector<EigenMode>& modes() const { return modes_; }
  const std::vector<double>& z(int i) const { return z_[i]; }
  // physical eigenfunction phi_k = z_k / sqrt(rho), weighted-orthonormal
  double phi(int i, int node) const { return z_[i][node] / sqrt_rho_[node]; }

  const RobinBC& bc() const { return bc_; }
  int index_of_label(int k) const;  // -1 when absent

  double inner(const std::vector<double>& f, const std::vector<double>& g) const;

  EigenBasis(int grid_n, double h, std::vector<double> x, std::vector<double> w,
             std::vector<double> rho, std::vector<EigenMode> modes,
             std::vector<std::vector<double>> z, RobinBC bc);

 private:
  int grid_n_;
  double h_;
  std::vector<double> x_, w_, rho_, sqrt_rho_;
  std::vector<EigenMode> modes_;
  std::vector<std::vector<double>> z_;
  RobinBC bc_;
};

// count smallest modes; requires grid_n >= 16 * count.
EigenBasis eigensolve(const Coefficient& coeff, const RobinBC& bc, int count, int grid_n);

struct CertRow {
  int k = 0;
  double lambda = 0, theta = 0;
  double lower = 0, upper = 0;              // sharp certified window
  double outer_lower = 0, outer_upper = 0;  // wide closed-form window
  double tol = 0;
  bool pass = false;
};

struct CertReport {
  int case_tag = 0;
  bool verdict = false;
  int n0 = 1;  // case 5: first certified index; 1 (or 0 for case 2/3) otherwise
  std::vector<CertRow> rows;
};

// Checks the eigenvalue deviations theta_k against the case's certified window:
//   case 1: sqrt(k^2+rho0)-k <= theta <= sqrt(k^2+rho1)-k, outer [rho2/k, rho1/(2k)]
//   case 2/3 (k >= 0): rho3/(2k+1) <= theta <= rho1/(sqrt((k+1/2)^2+rho1)+k+1/2),
//            outer upper rho1/(2k+1)
//   case 4: rho2/k <= theta <= sqrt(k^2+rho1)-k, outer upper rho1/(2k)
//   case 5: rho2/k <= theta <= sqrt(k^2+2 rho4)-k for k >= N0, outer upper rho4/k
// Per-row tolerance: max(10 * err_est, 1e-9). Refuses when rho0 <= 0.
CertReport certify_asymptotics(const EigenBasis& basis, const SpectralConstants& consts);

}  // namespace rhowave
