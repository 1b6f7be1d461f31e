#pragma once

// Boundary-element estimate of the capacity of the unit disc in R^3.
//
// The disc is held at potential 1; the single-layer charge q solves
//   integral q(y) / (4 pi |x - y|) dA(y) = 1   on the disc,
// and the capacity (Dirichlet energy of the potential) is the total charge.
// Axisymmetry reduces the surface integral to rings:
//   V(rho) = integral_0^1 q(s) s K(k) / (pi (rho + s)) ds,
//   k^2 = 4 rho s / (rho + s)^2,
// with K the complete elliptic integral of the first kind.  Charge is
// piecewise constant on rings graded toward the rim, collocated at ring
// midpoints.

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/ellint_1.hpp>

namespace oracle {

// K(k) written through k' = |rho - s| / (rho + s); the logarithmic
// asymptote takes over where k is indistinguishable from 1.
inline double ring_kernel(double rho, double s, double gap) {
  const double kp = gap / (rho + s);
  double K;
  if (kp < 1e-7)
    K = std::log(4.0 / kp);
  else
    K = boost::math::ellint_1(std::sqrt((1.0 - kp) * (1.0 + kp)));
  return s * K / (std::numbers::pi * (rho + s));
}

inline double disc_capacity(int rings) {
  // Ring edges s_i = sin(pi/2 * i/N) crowd toward the rim where q blows up.
  std::vector<double> edge(rings + 1);
  for (int i = 0; i <= rings; ++i)
    edge[i] = std::sin(0.5 * std::numbers::pi * i / rings);
  edge[rings] = 1.0;

  boost::math::quadrature::tanh_sinh<double> integrator;
  Eigen::MatrixXd A(rings, rings);
  for (int i = 0; i < rings; ++i) {
    const double rho = 0.5 * (edge[i] + edge[i + 1]);
    for (int j = 0; j < rings; ++j) {
      // The complement argument xc measures the distance to the nearer end
      // exactly, which keeps |rho - s| accurate next to the singularity.
      const auto below = [rho](double s, double xc) {
        return ring_kernel(rho, s, xc > 0.0 ? xc : rho - s);
      };
      const auto above = [rho](double s, double xc) {
        return ring_kernel(rho, s, xc < 0.0 ? -xc : s - rho);
      };
      const auto plain = [rho](double s, double) { return ring_kernel(rho, s, std::abs(rho - s)); };
      if (i == j)
        A(i, j) = integrator.integrate(below, edge[j], rho) +
                  integrator.integrate(above, rho, edge[j + 1]);
      else
        A(i, j) = integrator.integrate(plain, edge[j], edge[j + 1]);
    }
  }
  const Eigen::VectorXd q = A.partialPivLu().solve(Eigen::VectorXd::Ones(rings));
  double charge = 0.0;
  for (int j = 0; j < rings; ++j)
    charge += q[j] * std::numbers::pi * (edge[j + 1] * edge[j + 1] - edge[j] * edge[j]);
  return charge;
}

}  // namespace oracle
