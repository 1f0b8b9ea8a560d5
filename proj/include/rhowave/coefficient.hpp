#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <vector>

namespace rhowave {

enum class CoeffModel { exponential, tabulated };

// Weight rho(x) of the medium on [0, pi], with enough smoothness bookkeeping to
// evaluate the transformed potential
//   eta(x) = rho''/(2 rho) - (rho'/rho)^2 / 4,
// i.e. the zero-order term produced by the substitution z = sqrt(rho) * phi.
//
// Models: exponential rho = e^{2 c x} (analytic derivatives), or tabulated samples
// interpolated by a natural cubic spline.
class Coefficient {
 public:
  static Coefficient exponential(double c);
  // Strictly increasing grid spanning [0, pi] (ends matched to 1e-9), >= 3 points,
  // positive samples.
  static Coefficient tabulated(std::vector<double> x, std::vector<double> rho);

  double rho(double x) const;
  double drho(double x) const;
  double d2rho(double x) const;
  double potential(double x) const;

  double beta0() const;  // ess sup of rho over [0, pi]
  CoeffModel model() const;
  double exponent() const;  // c of the exponential model; throws otherwise
  double min_sample() const;  // tabulated: smallest rho sample; exponential: min end value

  struct Impl;

 private:
  std::shared_ptr<const Impl> impl_;
};

// Quantities controlling the eigenvalue windows:
//   rho0 = ess inf eta    (grid scan >= 4096 samples + golden-section refinement)
//   rho1 = (2/pi) * integral of eta over (0, pi)
//   rho2 = sqrt(rho0 + 1) - 1
//   rho3 = rho0 / (1 + rho0)
//   rho4 = (alpha1/beta1 + alpha2/beta2 + 1 + integral of eta) / pi
// rho4 needs both transformed-boundary ratios, so it is only filled by the overload
// that receives them.
struct SpectralConstants {
  double rho0 = 0;
  double rho1 = 0;
  double rho2 = 0;
  double rho3 = 0;
  double rho4 = 0;
  bool has_rho4 = false;
  bool positivity_holds = false;  // rho0 > 0; certification refuses otherwise
  double beta0 = 0;
  double potential_argmin = 0;
  double potential_integral = 0;  // integral of eta over (0, pi), abs tol 1e-10
};

SpectralConstants spectral_constants(const Coefficient& c);
SpectralConstants spectral_constants(const Coefficient& c, double alpha1_over_beta1,
                                     double alpha2_over_beta2);

// Travel-time change of variables for layered-medium profiles omega(z), nu(z),
// z in [0, z_max]:
//   x(z) = integral_0^z sqrt(omega/nu),  rescaled so x(z_max) -> pi,
//   rho(x) = sqrt(omega(z(x)) * nu(z(x))).
// The inverse z(x) uses monotone (Steffen) interpolation on a fine grid.
struct SeismicIngest {
  Coefficient coeff;
  double scale = 0;         // pi / x(z_max)
  double travel_max = 0;    // x(z_max) before rescaling
  std::vector<double> x;    // resampled uniform grid on [0, pi]
  std::vector<double> rho;  // sqrt(omega * nu) along it
};

SeismicIngest from_seismic(const std::function<double(double)>& omega,
                           const std::function<double(double)>& nu, double z_max,
                           int samples = 2049);
SeismicIngest from_seismic_table(const std::vector<double>& z, const std::vector<double>& omega,
                                 const std::vector<double>& nu, int samples = 2049);

// CSV loaders. Columns: "x,rho" or "z,omega,nu" (header required).
Coefficient load_coefficient_csv(const std::filesystem::path& path);
SeismicIngest load_seismic_csv(const std::filesystem::path& path, int samples = 2049);

}  // namespace rhowave
