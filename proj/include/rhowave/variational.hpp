#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "rhowave/working_space.hpp"

namespace rhowave {

// odd sublinear power and its even primitive, both continuous at zero
double f_eval(double v, double p);
double F_eval(double v, double p);
// slope p|v|^{p-1} with the singularity at v = 0 clamped to a finite value
double df_eval(double v, double p, double floor_abs = 1e-8);

// closed formula mapping the interpolation bound to the upper critical level
double rho_from_zeta(double zeta, double p);

// Action functional on the shifted-energy coefficient space. The quadratic
// part is evaluated spectrally; the nonlinear part by grid quadrature with a
// companion double-rate transform that prices the aliasing error.
class Functional {
 public:
  Functional(std::shared_ptr<const SpectrumTable> table, double mu, double p, int nt);

  const WorkingSpace& space() const { return ws_; }
  const Transform& transform() const { return tr_; }
  double p() const { return p_; }

  double quadratic(const CoeffField& u) const;
  double value(const CoeffField& u) const;
  // difference between the base-rate and double-rate nonlinear parts
  double quadrature_residual(const CoeffField& u) const;

  // L2-pairing coefficients of the derivative
  CoeffField gradient(const CoeffField& u) const;
  // representation of a pairing-coefficient vector in the energy metric
  CoeffField riesz(const CoeffField& g) const;
  double grad_norm_e(const CoeffField& g) const;
  // action of the second derivative at a pre-synthesized base field
  CoeffField hessian_apply(const std::vector<double>& field_u, const CoeffField& v) const;

  // integral of |u|^{p+1} against the density over one period
  double mass(const CoeffField& u) const;

 private:
  WorkingSpace ws_;
  Transform tr_, tr2_;
  double p_;
};

struct LevelBounds {
  int l = 0;
  double zeta = 0;
  double rho = 0;     // upper critical level
  double radius = 0;  // linking sphere radius
  double sigma = 0;   // lower level on the sphere, radius^2 / 2
  double c0 = 0;      // sampled positive-projection constant
  int samples = 0;
  bool low_confidence = false;
};

LevelBounds level_bounds(const Functional& fn, int l, int samples = 1024,
                         std::uint64_t seed = 0x5EEDB071ULL);

}  // namespace rhowave
