#pragma once

#include <span>

#include "ctd/cfe_basis.hpp"
#include "ctd/field.hpp"

namespace ctd {

/// Coefficients of the Allen-Cahn model and the time discretization.
struct PhysParams {
  double mobility = 5.0;        // L
  double kappa = 1.0;           // gradient energy coefficient
  double a0 = 10.0;             // double-well height
  double alpha = 50.0;          // stabilization
  double dt = 0.01;
  double final_time = 10.0;
};

void validate(const PhysParams& params);

/// Double-well bulk energy a0 (u^2 - 1)^2.
inline double double_well(double u, double a0) {
  const double q = u * u - 1.0;
  return a0 * q * q;
}

/// dF/du = 4 a0 u (u^2 - 1).
inline double double_well_derivative(double u, double a0) { return 4.0 * a0 * u * (u * u - 1.0); }

/// d^2F/du^2 = 4 a0 (3u^2 - 1).
inline double double_well_curvature(double u, double a0) { return 4.0 * a0 * (3.0 * u * u - 1.0); }

/// Smallest alpha for which the stabilized step is energy stable while u
/// stays in [u_lo, u_hi]: half the largest curvature on that range.
double min_alpha(double a0, double u_lo = -1.0, double u_hi = 1.0);

/// Discrete total energy: integral of F(u) + kappa/2 |grad u|^2 evaluated by
/// tensor Gauss quadrature on the given per-axis bases.
double total_energy(const FullField& field, const BasisSet& bases, double kappa, double a0);

}  // namespace ctd
